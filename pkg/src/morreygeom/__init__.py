"""Morrey and small Morrey norms of radial piecewise-power functions, and the
geometric constants (von Neumann-Jordan, James, Dunkl-Williams, octahedral)
they witness."""

from .constants import (
    QuotientKind,
    QuotientReport,
    WitnessSet,
    build_octahedral_witnesses,
    build_witnesses,
    dw_quotient,
    james_quotient,
    nj_quotient,
    octahedral_min,
    octahedral_norms,
    sweep,
    witness_bound,
)
from .norm import CumulativeIntegral, Method, NormResult, ball_norm, centered_norm, cumulative_integral
from .oracle import offcenter_probe, oracle_norm
from .space import (
    LinearCombination,
    PowerPiece,
    RadialFunction,
    SpaceParams,
    Variant,
    add,
    negate,
    scale,
    sphere_area,
    validate_membership,
)

__version__ = "0.1.0"
