"""Monomial-ratio cones and their resolution into invertible monomial maps.

In logarithmic coordinates ``y_i = ln x_i`` a monomial inequality
``x^a < 1`` on the open unit cube becomes the strict halfspace ``a.y < 0``.
For every sign pattern of the input ratios the feasible cone is split into
simplicial cones; each simplicial cone with facet-normal matrix ``H`` (normals
as columns) gets the exponent matrix ``eps = sign(det H) adj(H)``, so that
``eps @ H == N * I`` with ``N = |det H|``.  The substitution
``x_i = prod_d z_d^eps[d][i]`` maps the open unit cube in ``z`` bijectively
onto the cone's image in ``x``, and every input ratio (or its reciprocal)
becomes a monomial with nonnegative exponents there.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import Eq, Integer, Rational, S, symbols
from sympy.solvers.simplex import InfeasibleLPError, UnboundedLPError, lpmax

from .errors import (
    ConstantRatioError,
    DimensionMismatchError,
    EmptyConeError,
    InputError,
    NegativeExponentError,
    SingularMatrixError,
)
from .exact import (
    IntMatrix,
    LaurentMonomial,
    adjugate,
    det,
    identity,
    matmul,
    matvec,
    primitive,
    rank,
    solve_exact,
    transpose,
)

BELOW, ABOVE = "below", "above"


@dataclass(frozen=True)
class HalfSpace:
    """Open halfspace ``normal . y < 0`` with a primitive integer normal."""

    normal: tuple[int, ...]

    def __post_init__(self):
        if not any(self.normal):
            raise InputError("halfspace normal must be nonzero")
        object.__setattr__(self, "normal", primitive(self.normal))

    def value(self, y) -> Fraction:
        return sum(a * b for a, b in zip(self.normal, y))


@dataclass(frozen=True)
class PolyCone:
    dimension: int
    halfspaces: tuple[HalfSpace, ...]

    @classmethod
    def octant(cls, n: int) -> PolyCone:
        return cls(n, tuple(HalfSpace(tuple(int(i == j) for j in range(n))) for i in range(n)))

    def contains(self, y) -> bool:
        return all(h.value(y) < 0 for h in self.halfspaces)


@dataclass(frozen=True)
class SimplicialCone:
    """``H`` holds the facet normals as columns; ``rays[d]`` is the primitive
    extreme ray lying on every facet except facet ``d``."""

    H: IntMatrix
    rays: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        if det(self.H) == 0:
            raise SingularMatrixError("simplicial cone needs a nonsingular facet matrix")

    @property
    def dimension(self) -> int:
        return len(self.H)

    @property
    def normals(self) -> tuple[tuple[int, ...], ...]:
        return transpose(self.H)


@dataclass(frozen=True)
class MonomialMap:
    """``x_i = prod_d z_d^eps[d][i]``."""

    eps: IntMatrix
    N: int

    @property
    def dimension(self) -> int:
        return len(self.eps)

    def jacobian(self) -> LaurentMonomial:
        d = abs(det(self.eps))
        if d == 0:
            raise SingularMatrixError("monomial map is not invertible")
        return LaurentMonomial(d, tuple(sum(row) - 1 for row in self.eps))

    def compose(self, inner: MonomialMap) -> MonomialMap:
        """``self o inner``: first ``z = inner(w)``, then ``x = self(z)``."""
        return MonomialMap(matmul(inner.eps, self.eps), self.N * inner.N)

    def apply(self, z: Sequence[float]) -> tuple[float, ...]:
        n = self.dimension
        out = []
        for i in range(n):
            v = 1.0
            for d in range(n):
                v *= z[d] ** self.eps[d][i]
            out.append(v)
        return tuple(out)

    @classmethod
    def identity(cls, n: int) -> MonomialMap:
        return cls(identity(n), 1)


@dataclass(frozen=True)
class ConeCell:
    sign_pattern: tuple[str, ...]
    cone: SimplicialCone
    map: MonomialMap
    jacobian: LaurentMonomial

    @property
    def rectangle(self) -> tuple[tuple[int, int], ...]:
        # unit-cube domain: the translation vector vanishes, so always (0,1)^n
        return ((0, 1),) * self.cone.dimension

    def to_json(self) -> dict:
        return {
            "sign_pattern": list(self.sign_pattern),
            "H": [list(r) for r in self.cone.H],
            "eps": [list(r) for r in self.map.eps],
            "N": self.map.N,
            "rays": [list(r) for r in self.cone.rays],
            "jacobian": {"coefficient": str(self.jacobian.coefficient),
                         "exponents": list(self.jacobian.exponents)},
        }


# --------------------------------------------------------------------------

def _validate_ratios(ratios: Sequence[LaurentMonomial]) -> int:
    if not ratios:
        raise InputError("need at least one ratio")
    n = ratios[0].dimension
    for r in ratios:
        if r.dimension != n:
            raise DimensionMismatchError("ratios have inconsistent dimensions")
        if r.is_constant():
            raise ConstantRatioError(f"ratio {r} is constant")
    return n


def cone_from_ratios(ratios: Sequence[LaurentMonomial], signs: Sequence[str],
                     dimension: int | None = None) -> PolyCone:
    """``below`` for ``r`` means ``r < 1`` (normal = exponents of ``r``),
    ``above`` negates the normal.  The coordinate halfspaces are always added."""
    if len(ratios) != len(signs):
        raise InputError("one sign per ratio required")
    if ratios:
        n = _validate_ratios(ratios)
        if dimension is not None and dimension != n:
            raise DimensionMismatchError("dimension does not match ratios")
    elif dimension is None:
        raise InputError("dimension required when no ratios are given")
    else:
        n = dimension
    hs = list(PolyCone.octant(n).halfspaces)
    for r, sgn in zip(ratios, signs):
        if sgn not in (BELOW, ABOVE):
            raise InputError(f"bad sign {sgn!r}")
        a = r.exponents if sgn == BELOW else tuple(-e for e in r.exponents)
        hs.append(HalfSpace(a))
    return PolyCone(n, tuple(dict.fromkeys(hs)))


def _lp_max(objective, A, b, A_eq=None, b_eq=None):
    """Exact maximisation of ``objective . v`` over ``A v <= b`` and
    ``A_eq v = b_eq`` with free variables.  ``None`` when unbounded,
    ``-inf`` when infeasible."""
    v = symbols(f"v0:{len(objective)}")

    def lin(row):
        return sum((Rational(int(Fraction(a).numerator), int(Fraction(a).denominator)) * x
                    for a, x in zip(row, v) if a), Integer(0))

    constr = [lin(row) <= rhs for row, rhs in zip(A, b)]
    for row, rhs in zip(A_eq or (), b_eq or ()):
        constr.append(Eq(lin(row), rhs))
    constr = [c for c in constr if c is not S.true]
    if any(c is S.false for c in constr):
        return float("-inf")
    try:
        val, _ = lpmax(lin(objective), constr)
    except UnboundedLPError:
        return None
    except InfeasibleLPError:
        return float("-inf")
    return Fraction(int(val.p), int(val.q))


def cone_nonempty(c: PolyCone) -> bool:
    """Strict feasibility: maximise ``s`` subject to ``a.y + s <= 0``,
    ``sum |y_i| <= 1``, ``s >= 0``; nonempty iff the optimum is positive.
    The coordinate halfspaces force ``y <= 0`` so ``sum|y| = -sum y``."""
    n = c.dimension
    A, b = [], []
    for h in c.halfspaces:
        A.append(list(h.normal) + [1])
        b.append(0)
    A.append([-1] * n + [0])
    b.append(1)
    A.append([0] * n + [-1])
    b.append(0)
    for i in range(n):
        row = [0] * (n + 1)
        row[i] = 1
        A.append(row)
        b.append(0)
    best = _lp_max([0] * n + [1], A, b)
    return best is not None and best > 0


def remove_redundant(c: PolyCone) -> PolyCone:
    """Drop halfspaces implied by the others (exact LP on the cross-section
    ``sum y = -1``)."""
    hs = list(c.halfspaces)
    n = c.dimension
    i = 0
    while i < len(hs):
        others = hs[:i] + hs[i + 1:]
        if others:
            best = _lp_max(hs[i].normal, [list(h.normal) for h in others], [0] * len(others),
                           [[1] * n], [-1])
        else:
            best = None
        if best is not None and best <= 0:
            hs.pop(i)
        else:
            i += 1
    return PolyCone(n, tuple(hs))


def _dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def cross_section_vertices(c: PolyCone) -> list[tuple[Fraction, ...]]:
    """Vertices of ``{a.y <= 0 for all a, sum y = -1}``."""
    n = c.dimension
    normals = [h.normal for h in c.halfspaces]
    verts = set()
    for combo in itertools.combinations(normals, n - 1):
        sol = solve_exact([*combo, (1,) * n], [0] * (n - 1) + [-1])
        if sol is None:
            continue
        if all(_dot(a, sol) <= 0 for a in normals):
            verts.add(sol)
    return sorted(verts)


def _affine_rank(points) -> int:
    pts = list(points)
    if not pts:
        return -1
    p0 = pts[0]
    return rank([tuple(a - b for a, b in zip(p, p0)) for p in pts[1:]]) if len(pts) > 1 else 0


def _pulling(verts: frozenset, normals, dim: int) -> list[tuple]:
    """Pulling triangulation: cone from the lexicographically smallest vertex
    over a triangulation of every facet not containing it."""
    v0 = min(verts)
    if dim == 0:
        return [(v0,)]
    out = []
    seen = set()
    for a in normals:
        if _dot(a, v0) == 0:
            continue
        face = frozenset(v for v in verts if _dot(a, v) == 0)
        if face in seen or len(face) < dim or _affine_rank(face) != dim - 1:
            continue
        seen.add(face)
        for simplex in _pulling(face, normals, dim - 1):
            out.append((v0, *simplex))
    return out


def _simplicial_from_rays(rays: Sequence[Sequence[Fraction]]) -> SimplicialCone:
    n = len(rays)
    prays = [primitive(r) for r in rays]
    normals = []
    for k in range(n):
        # h with h.r_j = 0 (j != k), h.r_k = -1
        rhs = [0] * n
        rhs[k] = -1
        h = solve_exact(prays, rhs)
        if h is None:
            raise SingularMatrixError("degenerate simplex")
        normals.append((primitive(h), tuple(prays[k])))
    normals.sort(key=lambda pair: pair[0], reverse=True)
    H = transpose(tuple(h for h, _ in normals))
    return SimplicialCone(H, tuple(r for _, r in normals))


def triangulate(c: PolyCone) -> list[SimplicialCone]:
    if not cone_nonempty(c):
        raise EmptyConeError("cannot triangulate an empty cone")
    n = c.dimension
    verts = cross_section_vertices(c)
    if _affine_rank(verts) != n - 1:
        raise EmptyConeError("cross-section is not full dimensional")
    normals = [h.normal for h in c.halfspaces]
    simplices = _pulling(frozenset(verts), normals, n - 1)
    cones = [_simplicial_from_rays(s) for s in simplices]
    return sorted(cones, key=lambda sc: sc.rays)


def monomial_map_for(cone: SimplicialCone) -> MonomialMap:
    d = det(cone.H)
    if d == 0:
        raise SingularMatrixError("facet matrix is singular")
    sign = 1 if d > 0 else -1
    eps = tuple(tuple(sign * v for v in row) for row in adjugate(cone.H))
    N = abs(d)
    if any(v < 0 for row in eps for v in row):
        raise NegativeExponentError(f"cone {cone.H} is not inside the negative octant")
    assert matmul(eps, cone.H) == tuple(tuple(N * v for v in r) for r in identity(len(eps)))
    return MonomialMap(eps, N)


def pullback(m: LaurentMonomial, g: MonomialMap) -> LaurentMonomial:
    """Exponents transform as ``eps @ a``; the coefficient is unchanged."""
    if m.dimension != g.dimension:
        raise DimensionMismatchError("monomial and map dimensions differ")
    return LaurentMonomial(m.coefficient, matvec(g.eps, m.exponents))


def decompose_domain(ratios: Sequence[LaurentMonomial]) -> list[ConeCell]:
    """Cells covering ``(0,1)^n`` up to measure zero, one per simplicial cone
    of every feasible sign pattern, sorted by sign pattern then rays."""
    n = _validate_ratios(ratios)
    cells = []
    for pattern in itertools.product((BELOW, ABOVE), repeat=len(ratios)):
        cone = cone_from_ratios(ratios, pattern, n)
        if not cone_nonempty(cone):
            continue
        cone = remove_redundant(cone)
        for sc in triangulate(cone):
            g = monomial_map_for(sc)
            for r, sgn in zip(ratios, pattern):
                pb = pullback(r if sgn == BELOW else r.reciprocal(), g)
                if any(e < 0 for e in pb.exponents):
                    raise NegativeExponentError(f"ratio {r} does not pull back to a monomial")
            cells.append(ConeCell(tuple(pattern), sc, g, g.jacobian()))
    order = {BELOW: 0, ABOVE: 1}
    cells.sort(key=lambda c: (tuple(order[s] for s in c.sign_pattern), c.cone.rays))
    return cells


def cell_of_point(cells: Sequence[ConeCell], x: Sequence[float], margin: float = 1e-9):
    """Indices of the cells whose image contains ``x``, plus a flag telling
    whether ``x`` is farther than ``margin`` from every cell boundary.

    ``z = g^{-1}(x)`` satisfies ``ln z = H^T ln x / N``; ``x`` is inside the
    cell iff every ``ln z_d < 0``.
    """
    import math

    lx = [math.log(v) for v in x]
    hits = []
    clear = True
    for idx, cell in enumerate(cells):
        vals = [sum(h * l for h, l in zip(col, lx)) / cell.map.N for col in cell.cone.normals]
        if all(v < 0 for v in vals):
            hits.append(idx)
        if min(abs(v) for v in vals) <= margin:
            clear = False
    return hits, clear
