"""Principal series of real semisimple groups, their Berezin-Weyl symbols and
the contraction onto the Cartan motion group, checked numerically on sl(n, R)."""

from .errors import (
    ConfigError,
    DegreeTooHigh,
    NonRegular,
    NotInBigCell,
    NotInRestrictedClass,
    RankDeficient,
    SingularSystem,
)
from .liealg import RealizedAlgebra, build_sl, get_realization
from .reps import PrincipalSeriesParams

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "DegreeTooHigh",
    "NonRegular",
    "NotInBigCell",
    "NotInRestrictedClass",
    "PrincipalSeriesParams",
    "RankDeficient",
    "RealizedAlgebra",
    "SingularSystem",
    "build_sl",
    "get_realization",
]
