"""Exception types shared across the package."""


class RelkitError(Exception):
    pass


class DimensionError(RelkitError, ValueError):
    """Operands live on different base sets."""


class MissingOperationError(RelkitError, KeyError):
    """A structure has no table for the requested symbol."""

    def __str__(self):
        return str(self.args[0]) if self.args else "missing operation"


class UndefinedEntryError(RelkitError, LookupError):
    pass


class PreconditionError(RelkitError, ValueError):
    pass


class ClosureError(RelkitError):
    """A formal-sum operation produced a grid outside the carrier."""


class InputError(RelkitError, ValueError):
    """Malformed user input; carries the offending path and field."""

    def __init__(self, message, path=None, field=None):
        super().__init__(message)
        self.path = path
        self.field = field

    def __str__(self):
        where = []
        if self.path:
            where.append(str(self.path))
        if self.field:
            where.append(f"field {self.field!r}")
        prefix = ": ".join(where)
        return f"{prefix}: {self.args[0]}" if prefix else str(self.args[0])
