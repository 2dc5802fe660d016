"""Reading the JSON input formats with path/field diagnostics."""

from __future__ import annotations

import json
from pathlib import Path

from .errors import InputError
from .kernels import Graph
from .pgroups import FiniteGroup, SquarePartialGroup
from .relcore import Relation
from .structures import FiniteStructure, RepresentationCandidate


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def read_json(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read file ({exc.strerror})", path=path) from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}", path=path) from None


def unwrap(data):
    """Accept either a bare object or a CLI result envelope carrying it under ``result``."""
    if isinstance(data, dict) and "result" in data and isinstance(data["result"], dict):
        return data["result"]
    return data


def _parse(path, parser, data):
    if not isinstance(data, dict):
        raise InputError("expected a JSON object", path=path)
    try:
        return parser(data)
    except InputError as exc:
        raise InputError(exc.args[0], path=path, field=exc.field) from None
    except KeyError as exc:
        field = exc.args[0] if exc.args and isinstance(exc.args[0], str) else None
        raise InputError("missing or unknown key", path=path, field=field) from None
    except (ValueError, TypeError, IndexError) as exc:
        raise InputError(str(exc), path=path) from None


def _relation(data) -> Relation:
    if "n" not in data:
        raise InputError("missing field 'n'", field="n")
    if "pairs" not in data:
        raise InputError("missing field 'pairs'", field="pairs")
    if not isinstance(data["pairs"], list) or any(not isinstance(p, list) or len(p) != 2 for p in data["pairs"]):
        raise InputError("pairs must be a list of [x, y] lists", field="pairs")
    return Relation.from_pairs(int(data["n"]), map(tuple, data["pairs"]))


def load_relation(path) -> Relation:
    return _parse(path, _relation, unwrap(read_json(path)))


def load_env(path) -> dict:
    data = read_json(path)

    def parse(d):
        out = {}
        for name, value in d.items():
            if not isinstance(value, dict):
                raise InputError("expected a relation object", field=name)
            try:
                out[name] = _relation(value)
            except InputError as exc:
                raise InputError(exc.args[0], field=f"{name}.{exc.field}") from None
        return out

    return _parse(path, parse, data)


def load_structure(path) -> FiniteStructure:
    data = unwrap(read_json(path))
    for key in ("carrier", "signature", "tables"):
        if isinstance(data, dict) and key not in data:
            raise InputError(f"missing field {key!r}", path=path, field=key)
    return _parse(path, FiniteStructure.from_json, data)


def load_representation(path, structure) -> RepresentationCandidate:
    data = unwrap(read_json(path))
    for key in ("base", "assignment"):
        if isinstance(data, dict) and key not in data:
            raise InputError(f"missing field {key!r}", path=path, field=key)
    return _parse(path, lambda d: RepresentationCandidate.from_json(structure, d), data)


def load_pgroup(path) -> SquarePartialGroup:
    return _parse(path, SquarePartialGroup.from_json, unwrap(read_json(path)))


def load_group(path) -> FiniteGroup:
    data = unwrap(read_json(path))
    if isinstance(data, dict) and "group" in data and "elements" not in data:
        data = data["group"]  # the envelope written by pgroup embed
    for key in ("elements", "product"):
        if isinstance(data, dict) and key not in data:
            raise InputError(f"missing field {key!r}", path=path, field=key)
    return _parse(path, FiniteGroup.from_json, data)


def load_graph(path) -> Graph:
    data = unwrap(read_json(path))
    if isinstance(data, dict) and "n" not in data:
        raise InputError("missing field 'n'", path=path, field="n")
    return _parse(path, Graph.from_json, data)


def load_injection(path, p: SquarePartialGroup, g: FiniteGroup) -> list:
    data = unwrap(read_json(path))
    if isinstance(data, dict) and "injection" in data:
        data = data["injection"]

    def parse(d):
        out = []
        for x in p.elements:
            if x not in d:
                raise InputError(f"no image for {x!r}", field=x)
            if d[x] not in g.elements:
                raise InputError(f"{d[x]!r} is not a group element", field=x)
            out.append(g.index(d[x]))
        return out

    return _parse(path, parse, data)
