"""Binary relations over finite sets, weak relation-algebra signatures and their representations."""

from .relcore import OpSymbol, Relation, op
from .structures import FiniteStructure, RepresentationCandidate, search_representation, verify_representation
from .terms import SignatureSpec, parse_term, signature
from .verdict import SearchResult, Verdict

__all__ = [
    "OpSymbol", "Relation", "op",
    "FiniteStructure", "RepresentationCandidate", "search_representation", "verify_representation",
    "SignatureSpec", "parse_term", "signature",
    "SearchResult", "Verdict",
]
