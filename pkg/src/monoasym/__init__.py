"""Exact asymptotic expansions for monomial sublevel volumes and the
oscillatory, Laplace and Mellin integrals built from them."""

__version__ = "0.1.0"

from .cones import ConeCell, MonomialMap, PolyCone, SimplicialCone, cone_from_ratios, decompose_domain
from .errors import BudgetError, InputError, MonoasymError
from .exact import LaurentMonomial, LogPowerSum, PolynomialAmplitude, SublevelFunction, SublevelSum
from .parsing import ExpressionAST, parse_expression
from .sublevel import (
    MonomialPhase,
    SublevelProblem,
    dominant_phase_per_cell,
    expand_multi,
    monomial_cell_volume,
    sublevel_expansion,
)
from .transfer import (
    AsymptoticSeries,
    PoleDatum,
    laplace_expansion,
    mellin_meromorphic,
    mellin_product_oracle,
    oscillatory_expansion,
)
