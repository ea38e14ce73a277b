"""Straight hairy Cantor sets at finite depth, in exact rational arithmetic."""

from .cantor import CantorApprox, Interval, Layout, Scheme, build_cantor
from .errors import (
    AddressError,
    ContractError,
    DomainError,
    HairyCantorError,
    MatchingError,
    ResourceError,
)
from .hair import LengthModel, canonical_length, canonical_model, check_shcs_definition

__all__ = [
    "AddressError",
    "CantorApprox",
    "ContractError",
    "DomainError",
    "HairyCantorError",
    "Interval",
    "Layout",
    "LengthModel",
    "MatchingError",
    "ResourceError",
    "Scheme",
    "build_cantor",
    "canonical_length",
    "canonical_model",
    "check_shcs_definition",
]
