"""Exact computations with filtered local systems on punctured curves.

Slope stability, the quiver model with King's criterion, the G-local-system
(root datum) layer and fixed Levi monodromy, over Q and prime fields.
"""

from .errors import FiltlocError, IncompleteCertificate, MalformedInput, PreconditionError
from .field import QQ, PrimeField
from .filtered import (
    SEMISTABLE,
    STABLE,
    UNSTABLE,
    FilteredLocalSystem,
    WeightedFlag,
    degree,
    jordan_holder,
    make_fls,
    s_equivalent,
    slope_stability,
)
from .quiver import git_equivalent, king_check, rep_to_point
from .rootdatum import r_stability
from .surface import make_rep

__version__ = "0.1.0"

__all__ = [
    "FiltlocError",
    "IncompleteCertificate",
    "MalformedInput",
    "PreconditionError",
    "QQ",
    "PrimeField",
    "SEMISTABLE",
    "STABLE",
    "UNSTABLE",
    "FilteredLocalSystem",
    "WeightedFlag",
    "degree",
    "jordan_holder",
    "make_fls",
    "s_equivalent",
    "slope_stability",
    "git_equivalent",
    "king_check",
    "rep_to_point",
    "r_stability",
    "make_rep",
]
