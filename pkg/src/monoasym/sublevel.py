"""Exact sublevel-set volumes for monomial phases on the unit cube."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Sequence

from .cones import ConeCell, decompose_domain, pullback
from .errors import (
    DimensionMismatchError,
    DuplicatePhaseError,
    IncomparablePhasesError,
    InputError,
)
from .exact import (
    UNIT_STEP,
    LaurentMonomial,
    LogPowerSum,
    MultiIndex,
    PolynomialAmplitude,
    SublevelFunction,
    SublevelSum,
    as_fraction,
    collapse,
    integrate_scaled,
    multi_index,
)


@dataclass(frozen=True)
class MonomialPhase:
    """``coefficient * x^exponents`` with a positive rational coefficient."""

    coefficient: Fraction
    exponents: MultiIndex

    def __post_init__(self):
        object.__setattr__(self, "coefficient", as_fraction(self.coefficient))
        object.__setattr__(self, "exponents", multi_index(self.exponents))
        if self.coefficient <= 0:
            raise InputError("phase coefficient must be positive")
        if not any(self.exponents):
            raise InputError("phase must be a nonconstant monomial")

    @property
    def dimension(self) -> int:
        return len(self.exponents)

    @property
    def monomial(self) -> LaurentMonomial:
        return LaurentMonomial(self.coefficient, self.exponents)

    def __str__(self):
        return str(self.monomial)


@dataclass(frozen=True)
class SublevelProblem:
    phases: tuple[MonomialPhase, ...]
    amplitude: PolynomialAmplitude

    def __post_init__(self):
        object.__setattr__(self, "phases", tuple(self.phases))
        if not self.phases:
            raise InputError("at least one phase required")
        n = self.amplitude.dimension
        if any(p.dimension != n for p in self.phases):
            raise DimensionMismatchError("phases and amplitude have different dimensions")
        if self.amplitude.is_zero():
            raise InputError("amplitude must be nonzero")

    @property
    def dimension(self) -> int:
        return self.amplitude.dimension


@lru_cache(maxsize=4096)
def monomial_cell_volume(alpha: MultiIndex, m: MultiIndex) -> SublevelFunction:
    """``t -> int_{(0,1)^n, y^m < t} y^alpha dy``.

    Built by integrating the unit step once per variable with ``m_i > 0``
    (ascending index order); variables with ``m_i = 0`` only contribute the
    factor ``1/(alpha_i + 1)``.
    """
    alpha, m = multi_index(alpha), multi_index(m, len(alpha))
    if not any(m):
        raise InputError("monomial must be nonconstant")
    g = UNIT_STEP
    free = Fraction(1)
    for a, b in zip(alpha, m):
        if b:
            g = integrate_scaled(g, a, b)
        else:
            free /= a + 1
    return g.scale_values(free) if free != 1 else g


def sublevel_expansion(p: SublevelProblem) -> SublevelFunction:
    """Single phase ``c x^m``: ``K(t) = sum_alpha Phi_alpha E(t/c; alpha, m)``."""
    if len(p.phases) != 1:
        raise InputError("sublevel_expansion takes exactly one phase")
    phase = p.phases[0]
    germ = LogPowerSum()
    total = Fraction(0)
    for alpha, coeff in p.amplitude.items():
        v = monomial_cell_volume(alpha, phase.exponents)
        germ = germ + v.germ.scale(coeff)
        total += coeff * v.total_mass
    unit = SublevelFunction(germ, Fraction(1), total, True)
    return unit.with_scale(phase.coefficient) if phase.coefficient != 1 else unit


@dataclass(frozen=True)
class CellReduction:
    """One cell of the multi-phase reduction: the dominant phase index and the
    pulled-back single-phase problem on ``(0,1)^n`` in the cell's ``z``."""

    cell: ConeCell | None
    dominant: int
    problem: SublevelProblem


def _prune_phases(phases: Sequence[MonomialPhase]) -> list[int]:
    """Indices of phases that can dominate somewhere; same monomial with a
    smaller constant is dominated everywhere."""
    keep: dict[MultiIndex, int] = {}
    for i, ph in enumerate(phases):
        j = keep.get(ph.exponents)
        if j is None:
            keep[ph.exponents] = i
        elif phases[j].coefficient == ph.coefficient:
            raise DuplicatePhaseError(f"phase {ph} appears twice")
        elif ph.coefficient > phases[j].coefficient:
            keep[ph.exponents] = i
    return sorted(keep.values())


def dominant_phase_per_cell(phases: Sequence[MonomialPhase],
                            amplitude: PolynomialAmplitude | None = None) -> list[CellReduction]:
    """Split the cube so that one phase dominates all others on each cell.

    Cells come from decomposing all pairwise ratios ``f_l / f_m``; on a cell
    the phase ``l`` dominates if every ``f_m / f_l`` pulls back to a monomial
    with nonnegative exponents and constant at most 1 (its supremum, attained
    at the corner ``(1,...,1)``).
    """
    phases = list(phases)
    if not phases:
        raise InputError("no phases")
    n = phases[0].dimension
    if any(p.dimension != n for p in phases):
        raise DimensionMismatchError("phases have different dimensions")
    if amplitude is None:
        amplitude = PolynomialAmplitude.constant(n)
    live = _prune_phases(phases)
    if len(live) == 1:
        i = live[0]
        return [CellReduction(None, i, SublevelProblem((phases[i],), amplitude))]
    ratios = [phases[a].monomial / phases[b].monomial for a, b in combinations(live, 2)]
    ratios = [LaurentMonomial(1, r.exponents) for r in ratios]
    out = []
    for cell in decompose_domain(list(dict.fromkeys(ratios))):
        pulled = {i: pullback(phases[i].monomial, cell.map) for i in live}
        dom = None
        for l in live:
            ok = True
            for m in live:
                if m == l:
                    continue
                r = pulled[m] / pulled[l]
                if any(e < 0 for e in r.exponents) or r.coefficient > 1:
                    ok = False
                    break
            if ok:
                dom = l
                break
        if dom is None:
            raise IncomparablePhasesError(
                f"no phase dominates on cell {cell.sign_pattern}; distinct phase constants "
                "must not compete on the same cell")
        amp = _pull_amplitude(amplitude, cell)
        phase = MonomialPhase(pulled[dom].coefficient, pulled[dom].exponents)
        out.append(CellReduction(cell, dom, SublevelProblem((phase,), amp)))
    return out


def _pull_amplitude(amplitude: PolynomialAmplitude, cell: ConeCell) -> PolynomialAmplitude:
    terms = {}
    for alpha, c in amplitude.items():
        e = pullback(LaurentMonomial(1, alpha), cell.map).exponents
        terms[e] = terms.get(e, 0) + c
    pulled = PolynomialAmplitude(terms, amplitude.dimension)
    return pulled.times_monomial(cell.jacobian.coefficient, cell.jacobian.exponents)


def expand_multi_cells(p: SublevelProblem) -> list[tuple[CellReduction, SublevelFunction]]:
    return [(red, sublevel_expansion(red.problem))
            for red in dominant_phase_per_cell(p.phases, p.amplitude)]


def expand_multi(p: SublevelProblem) -> SublevelFunction | SublevelSum:
    """Volume of ``{x in (0,1)^n : max_l f_l(x) < t}`` weighted by the
    amplitude, summed over the cells of the dominance decomposition."""
    if len(p.phases) == 1:
        return sublevel_expansion(p)
    return collapse([v for _, v in expand_multi_cells(p)])
