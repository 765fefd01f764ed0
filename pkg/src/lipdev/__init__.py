"""Exact extremal deviation D(x) = sup over 1-Lipschitz f of mu{f - E f >= x}."""
from .cube import D_cube, mcdiarmid_bound
from .gaussian import D_gauss
from .oracle import exact_deviation_sup, is_isoperimetric, iso_profile
from .space import FiniteSpace, from_matrix, hamming_power, load_space
from .sphere import D_sphere

__all__ = [
    "D_cube",
    "D_gauss",
    "D_sphere",
    "FiniteSpace",
    "exact_deviation_sup",
    "from_matrix",
    "hamming_power",
    "is_isoperimetric",
    "iso_profile",
    "load_space",
    "mcdiarmid_bound",
]
