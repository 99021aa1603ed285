"""Polylogarithms, their inversion identity, and a recursive additive
Riemann-Hilbert reconstruction of Li_k from zeta(k)."""

from .domain import DomainError, DomainId, in_domain, log_power_term, principal_log
from .inversion import InversionResidual, inversion_lhs, residual_grid
from .rh_engine import (
    ContourError,
    ContourSpec,
    LiouvilleCeilingError,
    Mode,
    ReconstructionReport,
    plemelj_split,
    reconstruct_all,
)
from .specialfn import li, li1, li21n, li_derivative, li_series, zeta

__version__ = "0.1.0"

__all__ = [
    "ContourError",
    "ContourSpec",
    "DomainError",
    "DomainId",
    "InversionResidual",
    "LiouvilleCeilingError",
    "Mode",
    "ReconstructionReport",
    "in_domain",
    "inversion_lhs",
    "li",
    "li1",
    "li21n",
    "li_derivative",
    "li_series",
    "log_power_term",
    "plemelj_split",
    "principal_log",
    "reconstruct_all",
    "residual_grid",
    "zeta",
]
