"""Brute-force reference values for K_l(u), K_l(u, kappa) and rho(u).

Nothing here uses the expansion constants.  K_l is evaluated from its
definition through the one-dimensional recursion obtained by integrating
out the last variable,

    K_l(u) = (1/l) int_1^{u-l+1} K_{l-1}(u - t) dt / t,   K_1(u) = log u,

with K_{l-1} tabulated as piecewise Chebyshev interpolants so that each
level costs a fixed number of quadratures.  rho(u) comes from marching the
integral equation u rho(u) = int_{u-1}^u rho(t) dt.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial import chebyshev, legendre

from .expand import DomainError, ResourceLimitError

MAX_ORACLE_ELL = 5

_GL_X, _GL_W = legendre.leggauss(15)

# Unit-width interpolation pieces up to l + UNIT_SPAN, doubling widths after.
UNIT_SPAN = 16


class QuadratureError(RuntimeError):
    pass


@dataclass(eq=False)
class QuadratureConfig:
    """Absolute tolerance per integration level plus the interpolation memo.

    The memo maps (level, piece index) to Chebyshev coefficients and is only
    ever appended to, so a config can be reused across evaluations.
    """

    tol: float = 1e-10
    max_depth: int = 40
    nodes: int = 64
    cache: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not 1e-12 <= self.tol <= 1e-2:
            raise ValueError(f"tol must lie in [1e-12, 1e-2], got {self.tol}")
        if self.max_depth < 1 or self.nodes < 2:
            raise ValueError("max_depth >= 1 and nodes >= 2 required")


def _gl(f, a, b):
    half = 0.5 * (b - a)
    return half * float(np.dot(_GL_W, f(0.5 * (a + b) + half * _GL_X)))


def adaptive_gl(f, a: float, b: float, tol: float, max_depth: int = 40) -> float:
    """Integrate a vectorized f over [a, b] to absolute tolerance tol.

    15-point Gauss-Legendre, bisecting wherever the halves disagree with
    the whole interval by more than the local share of tol.
    """
    if b <= a:
        return 0.0
    done = []
    stack = [(a, b, _gl(f, a, b), tol, 0)]
    while stack:
        lo, hi, whole, t, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        left, right = _gl(f, lo, mid), _gl(f, mid, hi)
        both = left + right
        if abs(both - whole) <= max(t, 4e-16 * abs(both)):
            done.append(both)
        elif depth >= max_depth:
            raise QuadratureError(f"no convergence on [{lo}, {hi}] after {depth} bisections")
        else:
            stack.append((lo, mid, left, 0.5 * t, depth + 1))
            stack.append((mid, hi, right, 0.5 * t, depth + 1))
    return math.fsum(done)


def _integrate_pieces(f, points, tol, max_depth):
    pts = sorted(set(points))
    n = len(pts) - 1
    return math.fsum(adaptive_gl(f, a, b, tol / n, max_depth) for a, b in zip(pts, pts[1:]))


# --------------------------------------------------------------------------
# piecewise tables of K_l


def piece_bounds(level: int, i: int) -> tuple:
    """[lo, hi] of interpolation piece i for K_level (pieces start at v = level)."""
    if i < UNIT_SPAN:
        return float(level + i), float(level + i + 1)
    w = UNIT_SPAN * 2 ** (i - UNIT_SPAN)
    return float(level + w), float(level + 2 * w)


def piece_index(level: int, v):
    """Index of the piece containing v > level (vectorized)."""
    d = np.asarray(v, dtype=float) - level
    unit = np.floor(d)
    geo = UNIT_SPAN + np.floor(np.log2(np.maximum(d, UNIT_SPAN) / UNIT_SPAN))
    return np.where(d < UNIT_SPAN, unit, geo).astype(int)


def piece_boundaries(level: int, lo: float, hi: float) -> list:
    """Piece boundaries of K_level strictly inside (lo, hi)."""
    out = []
    i = 0
    while True:
        b = piece_bounds(level, i)[1]
        if b >= hi:
            return out
        if b > lo:
            out.append(b)
        i += 1


def _k_table(level, v, cfg):
    """K_level at an array of points, from the memoized interpolants."""
    v = np.asarray(v, dtype=float)
    if level == 1:
        return np.log(np.maximum(v, 1.0))
    out = np.zeros_like(v)
    live = v > level
    if not np.any(live):
        return out
    vl = v[live]
    idx = piece_index(level, vl)
    res = np.empty_like(vl)
    for i in np.unique(idx):
        sel = idx == i
        lo, hi = piece_bounds(level, int(i))
        coef = _piece(level, int(i), cfg)
        res[sel] = chebyshev.chebval((2.0 * vl[sel] - lo - hi) / (hi - lo), coef)
    out[live] = res
    return out


def _piece(level, i, cfg):
    key = (level, i)
    coef = cfg.cache.get(key)
    if coef is None:
        lo, hi = piece_bounds(level, i)

        def values(x):
            return np.array([_k_direct(level, 0.5 * (lo + hi) + 0.5 * (hi - lo) * xi, cfg) for xi in x])

        coef = chebyshev.chebinterpolate(values, cfg.nodes - 1)
        coef.setflags(write=False)
        cfg.cache[key] = coef
    return coef


def _k_direct(level, u, cfg):
    """(1/l) int_1^{u-l+1} K_{l-1}(u-t) dt/t, K_{l-1} from the tables."""
    if u <= level:
        return 0.0
    top = u - level + 1.0
    pts = [1.0, top]
    pts += [u - b for b in piece_boundaries(level - 1, level - 1.0, u - 1.0)]
    p = 2.0
    while p < top:
        pts.append(p)
        p *= 2.0

    def f(t):
        return _k_table(level - 1, u - t, cfg) / t

    return _integrate_pieces(f, pts, cfg.tol, cfg.max_depth) / level


def _check_args(ell, u):
    if ell < 1:
        raise DomainError(f"ell must be >= 1, got {ell}")
    if ell > MAX_ORACLE_ELL:
        raise ResourceLimitError(f"oracle limited to ell <= {MAX_ORACLE_ELL}, got {ell}")
    if not math.isfinite(u):
        raise DomainError(f"u must be finite, got {u}")
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")


def k_ell_oracle(ell: int, u: float, cfg: QuadratureConfig | None = None) -> float:
    """K_l(u) by nested adaptive quadrature; exactly 0 for u <= l."""
    _check_args(ell, u)
    u = float(u)
    if u <= ell:
        return 0.0
    if ell == 1:
        return math.log(u)
    return _k_direct(ell, u, cfg or QuadratureConfig())


def k_ell_kappa_oracle(ell: int, kappa: int, u: float, cfg: QuadratureConfig | None = None) -> float:
    """K_l(u, kappa) = kappa int_l^u (u-t)^(kappa-1) K_l(t) dt."""
    _check_args(ell, u)
    if kappa < 0:
        raise DomainError(f"kappa must be >= 0, got {kappa}")
    cfg = cfg or QuadratureConfig()
    if kappa == 0:
        return k_ell_oracle(ell, u, cfg)
    u = float(u)
    if u <= ell:
        return 0.0
    pts = [float(ell), u] + piece_boundaries(ell, ell, u)

    def f(t):
        return (u - t) ** (kappa - 1) * _k_table(ell, t, cfg)

    return kappa * _integrate_pieces(f, pts, cfg.tol, cfg.max_depth)


def rho_oracle_sum(u: float, cfg: QuadratureConfig | None = None) -> float:
    """rho(u) = sum_{0<=l<u} (-1)^l K_l(u) with quadrature K_l."""
    if u < 0:
        raise DomainError(f"u must be >= 0, got {u}")
    cfg = cfg or QuadratureConfig()
    terms = [1.0]
    ell = 1
    while ell < u:
        terms.append((-1) ** ell * k_ell_oracle(ell, u, cfg))
        ell += 1
    return math.fsum(terms)


# --------------------------------------------------------------------------
# delay equation


@lru_cache(maxsize=8)
def _rho_grid(n_per_unit: int, units: int) -> np.ndarray:
    """rho on the grid k/n_per_unit, 0 <= k <= units*n_per_unit.

    Implicit trapezoid rule on u rho(u) = F(u) - F(u-1), F(u) = int_0^u rho.
    Grid points land on the integers, where rho' jumps.
    """
    N = n_per_unit
    h = 1.0 / N
    total = units * N
    rho = np.ones(total + 1)
    F = np.arange(total + 1, dtype=float) * h  # exact on [0, 1]
    for n in range(N + 1, total + 1):
        un = n * h
        rn = (F[n - 1] + 0.5 * h * rho[n - 1] - F[n - N]) / (un - 0.5 * h)
        rho[n] = rn
        F[n] = F[n - 1] + 0.5 * h * (rho[n - 1] + rn)
    rho.setflags(write=False)
    return rho


def rho_ode(u: float, step: float = 1e-4) -> float:
    """rho(u) from the delay equation u rho'(u) = -rho(u - 1).

    The grid step is 1/ceil(1/step).  Between grid points rho is
    interpolated by a cubic through four points of the same unit interval.
    """
    if not math.isfinite(u) or u < 0:
        raise DomainError(f"u must be finite and >= 0, got {u}")
    if not 0 < step <= 1e-3:
        raise ValueError(f"step must be in (0, 1e-3], got {step}")
    if u <= 1.0:
        return 1.0
    N = math.ceil(1.0 / step - 1e-9)
    units = max(2, math.ceil(u))
    grid = _rho_grid(N, units)
    x = u * N
    k = round(x)
    if abs(x - k) < 1e-9:
        return float(grid[k])
    # four nodes inside the unit interval containing u
    base = math.floor(u) * N
    i0 = min(max(int(math.floor(x)) - 1, base), base + N - 3)
    xs = np.arange(i0, i0 + 4, dtype=float)
    ys = grid[i0 : i0 + 4]
    total = 0.0
    for a in range(4):
        w = 1.0
        for b in range(4):
            if b != a:
                w *= (x - xs[b]) / (xs[a] - xs[b])
        total += w * ys[a]
    return float(total)


# --------------------------------------------------------------------------
# calibration of the advisory error constants


def fit_error_constants(ells=(2, 3, 4), Js=range(0, 11), us=(10, 20, 40, 80, 160), tables=None, cfg=None):
    """Max of |expansion - oracle| / (log^l(eu)/u^(J+1)) over the u sweep, doubled.

    Deviations within 1e-13 relative of the reference are rounding noise
    and are skipped; (l, J) pairs with no usable point are left out.
    """
    from .expand import error_scale, k_ell

    cfg = cfg or QuadratureConfig(tol=1e-12)
    out = {}
    for ell in ells:
        ref = {u: k_ell_oracle(ell, u, cfg) for u in us}
        for J in Js:
            ratios = []
            for u in us:
                dev = abs(k_ell(ell, u, J, tables).value - ref[u])
                if dev > 1e-13 * abs(ref[u]):
                    ratios.append(dev / error_scale(ell, u, J))
            if ratios:
                out[(ell, J)] = 2.0 * max(ratios)
    return out
