"""Independent numerical oracles for sublevel volumes, oscillatory and
Laplace integrals, plus small fitting helpers for empirical exponents.

Nothing here uses the symbolic recursion: sublevel regions are integrated
with explicit breakpoints where the region boundary hits the cube, Monte
Carlo uses plain indicator sampling, oscillatory integrals use composite
Gauss-Legendre with panels scaled to the phase frequency.
"""

from __future__ import annotations

import math
from itertools import combinations
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize
from scipy.stats import qmc

from .errors import DimensionTooLargeError, InputError, InsufficientSpanError, LambdaTooLargeError
from .exact import PolynomialAmplitude
from .sublevel import SublevelProblem

METHODS = ("tensor-gauss", "adaptive-nested", "monte-carlo", "quasi-monte-carlo")

# nodes allowed for one oscillatory tensor rule
NODE_BUDGET = 10 ** 8


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "adaptive-nested"
    points: int = 20          # Gauss nodes per panel, or samples for (Q)MC
    seed: int = 0
    tolerance: float = 1e-11

    def __post_init__(self):
        if self.method not in METHODS:
            raise InputError(f"unknown quadrature method {self.method!r}")
        if self.method in ("monte-carlo", "quasi-monte-carlo") and self.points < 1000:
            raise InputError("Monte Carlo needs at least 1000 samples")
        if not 0 < self.tolerance <= 1e-2:
            raise InputError("tolerance must lie in (0, 1e-2]")
        if self.points < 1:
            raise InputError("points must be positive")


@dataclass
class FitReport:
    fitted_exponent: float
    fitted_logpower: int
    residual: float
    decay_slope: float
    coefficients: list = field(default_factory=list)


# --------------------------------------------------------------------------
# evaluation helpers

def eval_amplitude(amp: PolynomialAmplitude, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    out = np.zeros(X.shape[0])
    for e, c in amp.items():
        term = np.full(X.shape[0], float(c))
        for i, k in enumerate(e):
            if k:
                term = term * X[:, i] ** k
        out += term
    return out


def eval_phase_max(p: SublevelProblem, X: np.ndarray) -> np.ndarray:
    X = np.atleast_2d(X)
    best = np.zeros(X.shape[0])
    for ph in p.phases:
        v = np.full(X.shape[0], float(ph.coefficient))
        for i, k in enumerate(ph.exponents):
            if k:
                v = v * X[:, i] ** k
        best = np.maximum(best, v)
    return best


def evaluate_germ(V, t: float) -> float:
    """Float value of a sublevel function (or sum of scaled parts) at ``t``."""
    total = 0.0
    for part in V.parts:
        u = t / float(part.scale)
        if u <= 0:
            continue
        if u >= 1:
            total += float(part.total_mass)
            continue
        lu = math.log(u)
        total += math.fsum(float(c) * u ** float(s) * lu ** k for s, k, c in part.germ)
    return total


def evaluate_logpowersum(terms, t: float) -> float:
    lt = math.log(t)
    return math.fsum(float(c) * t ** float(s) * lt ** k for s, k, c in terms)


# --------------------------------------------------------------------------
# sublevel volumes

def _kinks(p: SublevelProblem, level: int, fixed: Sequence[float], t: float) -> list[float]:
    """Points in ``(0,1)`` of the coordinate ``x_level`` where the region in
    the remaining coordinates changes shape.

    In log coordinates the region is cut out by the hyperplanes
    ``ln f_l = ln t`` and ``ln x_j = 0``; its shape changes where ``x_level``
    passes through the projection of a vertex of that arrangement.
    """
    n = p.dimension
    free = n - level
    rows, rhs = [], []
    for ph in p.phases:
        P = float(ph.coefficient)
        for i, x in enumerate(fixed):
            P *= x ** ph.exponents[i]
        if P <= 0:
            continue
        rows.append([float(e) for e in ph.exponents[level:]])
        rhs.append(math.log(t / P))
    for j in range(1, free):
        rows.append([1.0 if i == j else 0.0 for i in range(free)])
        rhs.append(0.0)
    pts = set()
    for sub in combinations(range(len(rows)), free):
        A = np.array([rows[i] for i in sub])
        if abs(np.linalg.det(A)) < 1e-12:
            continue
        y = np.linalg.solve(A, np.array([rhs[i] for i in sub]))
        if y[0] < 0 and np.all(y[1:] <= 1e-12):
            pts.add(math.exp(y[0]))
    return sorted(x for x in pts if 0 < x < 1)


def _inner_upper(p: SublevelProblem, fixed: Sequence[float], t: float) -> float:
    last = len(fixed)
    ub = 1.0
    for ph in p.phases:
        P = float(ph.coefficient)
        for i, x in enumerate(fixed):
            P *= x ** ph.exponents[i]
        m = ph.exponents[last]
        if m == 0:
            if P >= t:
                return 0.0
        elif P > 0:
            ub = min(ub, (t / P) ** (1.0 / m))
    return ub


def _gl(a: float, b: float, q: int):
    x, w = np.polynomial.legendre.leggauss(q)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _graded_panels(breaks: Sequence[float]) -> list[tuple[float, float]]:
    """Split ``(0,1)`` at the breakpoints and grade each piece geometrically
    towards its left end (factor 4) so integrands like ``t/x`` stay resolved."""
    edges = [0.0, *breaks, 1.0]
    panels = []
    for a, b in zip(edges[:-1], edges[1:]):
        if a == 0.0:
            lo = b
            stops = [b]
            while lo > b * 1e-14:
                lo /= 4
                stops.append(lo)
            stops.append(0.0)
            stops.reverse()
        else:
            stops = [a]
            while stops[-1] * 4 < b:
                stops.append(stops[-1] * 4)
            stops.append(b)
        panels.extend(zip(stops[:-1], stops[1:]))
    return panels


def _sublevel_nested(p: SublevelProblem, t: float, tol: float, fixed_rule: int | None):
    n = p.dimension
    amp_terms = list(p.amplitude.items())
    deg_last = p.amplitude.axis_degree(n - 1)
    xq, wq = np.polynomial.legendre.leggauss(deg_last // 2 + 1)
    err_acc = [0.0]

    def innermost(fixed):
        ub = _inner_upper(p, fixed, t)
        if ub <= 0:
            return 0.0
        nodes = 0.5 * ub * (xq + 1)
        weights = 0.5 * ub * wq
        val = np.zeros_like(nodes)
        for e, c in amp_terms:
            coef = float(c)
            for i, x in enumerate(fixed):
                coef *= x ** e[i]
            val += coef * nodes ** e[n - 1]
        return float(np.dot(weights, val))

    def level(fixed):
        k = len(fixed)
        if k == n - 1:
            return innermost(fixed)
        kinks = _kinks(p, k, fixed, t)
        f = lambda x: level((*fixed, x))
        if fixed_rule is None:
            val, err = integrate.quad(f, 0.0, 1.0, points=kinks or None, epsabs=tol * 1e-3,
                                      epsrel=tol, limit=400)
            if k == 0:
                err_acc[0] = err
            return val
        total = 0.0
        for a, b in _graded_panels(kinks):
            xs, ws = _gl(a, b, fixed_rule)
            total += sum(w * f(x) for x, w in zip(xs, ws))
        return total

    return level(()), err_acc[0]


def _mc_values(p: SublevelProblem, X: np.ndarray, t: float) -> np.ndarray:
    return eval_amplitude(p.amplitude, X) * (eval_phase_max(p, X) < t)


def _monte_carlo(f: Callable[[np.ndarray], np.ndarray], n: int, samples: int, seed: int):
    rng = np.random.default_rng(seed)
    chunk = 1 << 16
    s1 = s2 = 0.0
    left = samples
    while left > 0:
        m = min(chunk, left)
        v = f(rng.random((m, n)))
        s1 += float(np.sum(v))
        s2 += float(np.sum(v * v))
        left -= m
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0) * samples / (samples - 1)
    return mean, math.sqrt(var / samples)


def _quasi_monte_carlo(f, n: int, samples: int, seed: int, reps: int = 8):
    m = max(int(math.log2(max(samples // reps, 2))), 1)
    means = []
    for r in range(reps):
        X = qmc.Sobol(d=n, scramble=True, seed=seed + r).random_base2(m)
        means.append(float(np.mean(f(X))))
    means = np.array(means)
    return float(means.mean()), float(means.std(ddof=1) / math.sqrt(reps))


def numeric_sublevel(p: SublevelProblem, t: float, q: QuadratureSpec | None = None):
    """``(value, error_estimate)`` for ``int_{max f_l < t} phi dx`` over the cube."""
    q = q or QuadratureSpec()
    t = float(t)
    if not 0 < t:
        raise InputError("t must be positive")
    n = p.dimension
    if q.method in ("monte-carlo", "quasi-monte-carlo"):
        f = lambda X: _mc_values(p, X, t)
        if q.method == "monte-carlo":
            return _monte_carlo(f, n, q.points, q.seed)
        return _quasi_monte_carlo(f, n, q.points, q.seed)
    if n > 4:
        raise DimensionTooLargeError("quadrature methods support n <= 4")
    if q.method == "adaptive-nested":
        return _sublevel_nested(p, t, q.tolerance, None)
    val, _ = _sublevel_nested(p, t, q.tolerance, q.points)
    coarse, _ = _sublevel_nested(p, t, q.tolerance, max(q.points // 2, 2))
    return val, abs(val - coarse)


# --------------------------------------------------------------------------
# oscillatory and Laplace integrals

def _single_phase(p: SublevelProblem):
    if len(p.phases) != 1:
        raise InputError("single-phase problem required")
    return p.phases[0]


def numeric_oscillatory(p: SublevelProblem, lam: float, q: QuadratureSpec | None = None) -> complex:
    """``int_{(0,1)^n} e^{i lam f(x)} phi(x) dx`` by composite Gauss-Legendre,
    panels per axis proportional to ``lam * c * m_i``."""
    q = q or QuadratureSpec(method="tensor-gauss")
    ph = _single_phase(p)
    n = p.dimension
    if n > 2:
        raise DimensionTooLargeError("oscillatory quadrature supports n <= 2")
    lam = float(lam)
    if lam == 0:
        return complex(float(p.amplitude.integral()))
    if abs(lam) > 1e5:
        raise LambdaTooLargeError("lambda beyond 1e5")
    nodes_per_panel = max(q.points, 8)
    axes = []
    total_nodes = 1
    for i in range(n):
        freq = abs(lam) * float(ph.coefficient) * ph.exponents[i]
        panels = int(math.ceil(freq / 4.0)) + 2
        edges = np.linspace(0.0, 1.0, panels + 1)
        x, w = np.polynomial.legendre.leggauss(nodes_per_panel)
        h = np.diff(edges)
        xs = (edges[:-1, None] + 0.5 * h[:, None] * (x[None, :] + 1)).ravel()
        ws = (0.5 * h[:, None] * w[None, :]).ravel()
        axes.append((xs, ws))
        total_nodes *= xs.size
    if total_nodes > NODE_BUDGET:
        raise LambdaTooLargeError(f"{total_nodes} nodes exceed the budget of {NODE_BUDGET}")
    if n == 1:
        xs, ws = axes[0]
        X = xs[:, None]
        f = eval_phase_max(p, X)
        return complex(np.sum(ws * eval_amplitude(p.amplitude, X) * np.exp(1j * lam * f)))
    (x0, w0), (x1, w1) = axes
    total = 0.0 + 0.0j
    step = max(1, 2_000_000 // x1.size)
    for start in range(0, x0.size, step):
        a = x0[start:start + step]
        X = np.column_stack([np.repeat(a, x1.size), np.tile(x1, a.size)])
        W = np.repeat(w0[start:start + step], x1.size) * np.tile(w1, a.size)
        f = eval_phase_max(p, X)
        total += np.sum(W * eval_amplitude(p.amplitude, X) * np.exp(1j * lam * f))
    return complex(total)


def reduced_oscillatory(V, lam: float) -> complex:
    """Non-independent check: ``int_0^1 e^{i lam t} dV(t)`` from the exact
    germ, integrated by parts and evaluated with QAWO."""
    if not V.exact_everywhere:
        raise InputError("reduced form needs an exact-everywhere germ")
    lam = float(lam)
    J = lambda t: evaluate_germ(V, t)
    opts = dict(wvar=lam, limit=2000, epsabs=1e-15, epsrel=1e-13)
    c, _ = integrate.quad(J, 0, 1, weight="cos", **opts)
    s, _ = integrate.quad(J, 0, 1, weight="sin", **opts)
    return complex(float(V.total_mass) * np.exp(1j * lam) - 1j * lam * complex(c, s))


def numeric_laplace(p: SublevelProblem, tau: float, q: QuadratureSpec | None = None) -> float:
    """``int e^{-tau f} phi`` over the cube, nested adaptive quadrature with
    breakpoints where ``tau * f`` crosses powers of sqrt(10)."""
    q = q or QuadratureSpec()
    ph = _single_phase(p)
    n = p.dimension
    if n > 3:
        raise DimensionTooLargeError("Laplace quadrature supports n <= 3")
    tau = float(tau)
    if tau == 0:
        return float(p.amplitude.integral())
    if tau > 1e8 or tau < 0:
        raise InputError("tau must lie in [0, 1e8]")
    c = float(ph.coefficient)
    m = ph.exponents
    scales = [10 ** (j / 2) for j in range(-6, 9)]
    amp_terms = [(e, float(v)) for e, v in p.amplitude.items()]

    def breaks(P, k):
        if m[k] == 0 or P <= 0:
            return []
        return sorted({x for s in scales if 0 < (x := (s / (tau * P)) ** (1.0 / m[k])) < 1})

    def amp_coef(fixed):
        out = []
        for e, v in amp_terms:
            for i, x in enumerate(fixed):
                v *= x ** e[i]
            out.append((e[n - 1], v))
        return out

    gx, gw = np.polynomial.legendre.leggauss(30)

    def innermost(fixed):
        P = c
        for i, x in enumerate(fixed):
            P *= x ** m[i]
        mk = m[n - 1]
        edges = np.array([0.0, *breaks(P, n - 1), 1.0])
        if mk:
            # beyond tau*f = 60 the integrand is below e^-60
            edges = edges[tau * P * edges ** mk <= 60 * 10 ** 0.5 + 1e-300]
            if edges.size == 1:
                edges = np.array([0.0, min(1.0, (60 / (tau * P)) ** (1 / mk))])
        a, b = edges[:-1, None], edges[1:, None]
        xs = (0.5 * (b - a) * (gx + 1) + a).ravel()
        ws = (0.5 * (b - a) * gw).ravel()
        val = sum(v * xs ** e for e, v in amp_coef(fixed))
        return float(np.dot(ws, val * np.exp(-tau * P * xs ** mk)))

    def level(fixed):
        k = len(fixed)
        if k == n - 1:
            return innermost(fixed)
        P = c
        for i, x in enumerate(fixed):
            P *= x ** m[i]
        val, _ = integrate.quad(lambda x: level((*fixed, x)), 0, 1, points=breaks(P, k) or None,
                                epsabs=0.0, epsrel=q.tolerance, limit=400)
        return val

    return level(())


# --------------------------------------------------------------------------
# fitting

def loglog_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    lx = np.log(np.asarray(xs, float))
    ly = np.log(np.abs(np.asarray(ys, float)))
    return float(np.polyfit(lx, ly, 1)[0])


def fit_leading(samples: Sequence[tuple[float, float]], max_logpower: int = 3) -> FitReport:
    """Fit ``value ~ t^s P_k(ln t) + d t^s'`` with ``P_k`` a degree-``k``
    polynomial and ``s' > s`` a single correction exponent.

    For each candidate ``k`` the exponents are found by minimising the
    relative least-squares residual with the linear coefficients solved
    exactly; the smallest ``k`` whose residual is within a factor 10 of the
    best (or below 1e-10) wins.
    """
    pts = sorted((float(t), float(v)) for t, v in samples)
    if len(pts) < 6:
        raise InsufficientSpanError("need at least 6 samples")
    ts = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(ts <= 0) or np.log10(ts.max() / ts.min()) < 3 - 1e-9:
        raise InsufficientSpanError("samples must span at least 3 decades of positive t")
    lt = np.log(ts)

    def solve(params, k, corrected):
        s, eta = params
        cols = [ts ** s * lt ** j for j in range(k + 1)]
        if corrected:
            cols.append(ts ** (s + math.exp(eta)))
        A = np.column_stack(cols) / vs[:, None]
        coef, *_ = np.linalg.lstsq(A, np.ones_like(vs), rcond=None)
        r = A @ coef - 1.0
        resid = float(np.sqrt(np.mean(r * r)))
        if corrected:
            # the correction must stay subleading at the smallest t
            lead = abs(sum(coef[j] * ts[0] ** s * lt[0] ** j for j in range(k + 1)))
            if lead <= abs(coef[-1] * ts[0] ** (s + math.exp(eta))):
                resid = 1e30
        return resid, coef

    slope = loglog_slope(ts, vs)
    results = []
    for k in range(max_logpower + 1):
        best = None
        for corrected in (False, True):
            if corrected and (len(pts) <= k + 3 or (best is not None and best[0] <= 1e-10)):
                break
            for s0 in (slope - 0.3, slope, slope + 0.3):
                for eta0 in (math.log(0.3), math.log(1.0)):
                    f = lambda q: solve(q, k, corrected)[0]
                    res = optimize.minimize(f, [s0, eta0], method="Nelder-Mead",
                                            options={"xatol": 1e-10, "fatol": 1e-16, "maxiter": 4000})
                    if best is None or res.fun < best[0]:
                        best = (res.fun, res.x, corrected)
        resid, coef = solve(best[1], k, best[2])
        results.append((k, float(best[1][0]), resid, coef))
    floor = min(r[2] for r in results)
    k, s, resid, coef = next(r for r in results if r[2] <= max(10 * floor, 1e-10))
    return FitReport(s, k, resid, slope, [float(c) for c in coef[:k + 1]])


# --------------------------------------------------------------------------
# reports

def _jsonable(v):
    if isinstance(v, complex):
        return {"re": v.real, "im": v.imag}
    return float(v)


def verify_case(p: SublevelProblem, *, t=None, lam=None, tau=None, order_cap=3,
                quad: QuadratureSpec | None = None, rtol: float | None = None) -> dict:
    """Compare the symbolic result against an independent numeric value.

    Exactly one of ``t`` (sublevel volume), ``lam`` (oscillatory series) or
    ``tau`` (Laplace series) selects the case.  The verdict is ``pass`` when
    ``abs_err <= max(3 sigma, rtol |symbolic|)``; ``rtol`` defaults to 1e-8
    for exact germs and 1e-3 for truncated asymptotic series.
    """
    from .sublevel import expand_multi
    from .transfer import laplace_expansion, oscillatory_expansion

    chosen = [k for k, v in (("t", t), ("lambda", lam), ("tau", tau)) if v is not None]
    if len(chosen) != 1:
        raise InputError("give exactly one of t, lambda, tau")
    case = chosen[0]
    V = expand_multi(p)
    sigma = 0.0
    if case == "t":
        quad = quad or QuadratureSpec()
        sym = evaluate_germ(V, float(t))
        num, sigma = numeric_sublevel(p, float(t), quad)
        rtol = 1e-8 if rtol is None else rtol
        label = f"sublevel t={float(t):g}"
    elif case == "lambda":
        sym = complex(oscillatory_expansion(V, order_cap)(float(lam)))
        num = numeric_oscillatory(p, float(lam), quad if quad and quad.method == "tensor-gauss" else None)
        rtol = 1e-3 if rtol is None else rtol
        label = f"oscillatory lambda={float(lam):g}"
    else:
        sym = float(laplace_expansion(V, order_cap)(float(tau)).real)
        num = numeric_laplace(p, float(tau), quad if quad and quad.method == "adaptive-nested" else None)
        rtol = 1e-3 if rtol is None else rtol
        label = f"laplace tau={float(tau):g}"
    abs_err = abs(num - sym)
    rel_err = abs_err / abs(sym) if sym != 0 else float("inf")
    ok = abs_err <= max(3 * sigma, rtol * abs(sym))
    return {"case": label, "symbolic_value": _jsonable(sym), "numeric_value": _jsonable(num),
            "abs_err": abs_err, "rel_err": rel_err, "sigma": float(sigma),
            "verdict": "pass" if ok else "fail"}
