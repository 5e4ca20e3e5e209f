"""Constant tables for the K_l expansions, built from their generating functions.

Three families of constants are needed:

* ``C_r``, the Taylor coefficients of ``exp(gamma z) / Gamma(1 - z)``
  (the Dickman constants),
* ``C_{r,k}``, the coefficients of ``exp(gamma z) / Gamma(k + 1 - z)``,
* ``E_{j,m}``, the coefficient of ``z**j`` in ``g(z)**m`` where
  ``g(z) = int_0^z (1 - exp(-t)) / t dt``.

All of them come out of truncated power-series arithmetic.  ``C_r`` is
computed twice, once as ``exp(-sum_{k>=2} zeta(k) z^k / k)`` and once from
partial Bell polynomials in the zeta values, and the two routes are compared
when the tables are built.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Sequence

import numpy as np

BUILDER_VERSION = "1"

DEFAULT_RMAX = 30
DEFAULT_KMAX = 12
DEFAULT_JMAX = 30
DEFAULT_MMAX = 12

# r beyond which the two C_r routes are not required to agree (cancellation).
ROUTE_CHECK_RMAX = 12
ROUTE_CHECK_RTOL = 1e-12


class TableError(ValueError):
    """Raised when a coefficient table fails a consistency check."""


class TruncatedSeries:
    """Power series in ``z`` truncated after ``z**order``.

    Coefficients beyond ``order`` are unknown rather than zero, so every
    operation returns a series of the smaller order of its operands.
    """

    __slots__ = ("_c",)

    def __init__(self, coeffs: Sequence[float]):
        c = np.array(coeffs, dtype=float)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("need at least one coefficient")
        if not np.all(np.isfinite(c)):
            raise ValueError("series coefficients must be finite")
        c.setflags(write=False)
        self._c = c

    @classmethod
    def zero(cls, order: int) -> "TruncatedSeries":
        return cls(np.zeros(order + 1))

    @classmethod
    def one(cls, order: int) -> "TruncatedSeries":
        c = np.zeros(order + 1)
        c[0] = 1.0
        return cls(c)

    @property
    def order(self) -> int:
        return self._c.size - 1

    @property
    def coeffs(self) -> np.ndarray:
        return self._c

    def __getitem__(self, n: int) -> float:
        return float(self._c[n])

    def __len__(self) -> int:
        return self._c.size

    def __repr__(self) -> str:
        return f"TruncatedSeries({self._c.tolist()!r})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, TruncatedSeries):
            return NotImplemented
        return np.array_equal(self._c, other._c)

    def truncate(self, order: int) -> "TruncatedSeries":
        if order > self.order:
            raise ValueError(f"cannot extend order {self.order} to {order}")
        return TruncatedSeries(self._c[: order + 1])

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        n = min(self.order, other.order) + 1
        return TruncatedSeries(self._c[:n] + other._c[:n])

    def __neg__(self) -> "TruncatedSeries":
        return TruncatedSeries(-self._c)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, float)):
            return TruncatedSeries(self._c * other)
        n = min(self.order, other.order) + 1
        a, b = self._c, other._c
        out = [math.fsum(a[k] * b[i - k] for k in range(i + 1)) for i in range(n)]
        return TruncatedSeries(out)

    __rmul__ = __mul__

    def __pow__(self, m: int) -> "TruncatedSeries":
        if not isinstance(m, int) or m < 0:
            raise ValueError("only non-negative integer powers are supported")
        result = TruncatedSeries.one(self.order)
        base = self
        while m:
            if m & 1:
                result = result * base
            m >>= 1
            if m:
                base = base * base
        return result

    def exp(self) -> "TruncatedSeries":
        return series_exp(self)


def series_exp(s: TruncatedSeries) -> TruncatedSeries:
    """exp(s) for a series with zero constant term.

    Uses ``n b_n = sum_{k=1}^n k a_k b_{n-k}``, summed with ``math.fsum``.
    """
    a = s.coeffs
    if a[0] != 0.0:
        raise ValueError("series_exp needs a zero constant term")
    b = [1.0]
    for n in range(1, s.order + 1):
        b.append(math.fsum(k * a[k] * b[n - k] for k in range(1, n + 1)) / n)
    return TruncatedSeries(b)


def base_series(order: int) -> TruncatedSeries:
    """g(z) = sum_{n>=1} (-1)^(n-1) z^n / (n n!), i.e. int_0^z (1-e^-t)/t dt."""
    c = [0.0]
    for n in range(1, order + 1):
        c.append((-1) ** (n - 1) / (n * math.factorial(n)))
    return TruncatedSeries(c)


def series_int_power(m: int, order: int) -> TruncatedSeries:
    """m-th power of :func:`base_series`; the z^j coefficient is E_{j,m}."""
    if m < 0:
        raise ValueError("m must be non-negative")
    if order < m:
        raise ValueError(f"order {order} < m = {m}")
    return base_series(order) ** m


# --------------------------------------------------------------------------
# zeta values

# B_2, B_4, ..., B_20
_BERNOULLI_EVEN = (
    1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6,
    -3617 / 510, 43867 / 798, -174611 / 330,
)


def _zeta_em(s: int, n_direct: int = 10) -> float:
    """zeta(s), s >= 2 integer, by Euler-Maclaurin summation after n_direct terms."""
    N = n_direct
    terms = [n ** -float(s) for n in range(N - 1, 0, -1)]
    terms.append(N ** (1.0 - s) / (s - 1))
    terms.append(0.5 * N ** -float(s))
    rising = float(s)  # s (s+1) ... (s + 2k - 2)
    fact = 2.0  # (2k)!
    for k, b2k in enumerate(_BERNOULLI_EVEN, start=1):
        terms.append(b2k / fact * rising * N ** (-float(s) - 2 * k + 1))
        rising *= (s + 2 * k - 1) * (s + 2 * k)
        fact *= (2 * k + 1) * (2 * k + 2)
    return math.fsum(terms)


@dataclass(frozen=True)
class ZetaTable:
    """zeta(2), ..., zeta(kmax)."""

    values: tuple

    @property
    def kmax(self) -> int:
        return len(self.values) + 1

    def __call__(self, k: int) -> float:
        if not 2 <= k <= self.kmax:
            raise IndexError(f"zeta({k}) not in table (2..{self.kmax})")
        return self.values[k - 2]


@lru_cache(maxsize=None)
def zeta_values(kmax: int) -> ZetaTable:
    if kmax < 2:
        raise ValueError("kmax must be >= 2")
    return ZetaTable(tuple(_zeta_em(k) for k in range(2, kmax + 1)))


# --------------------------------------------------------------------------
# Dickman constants


@dataclass(frozen=True)
class DickmanConstants:
    c: np.ndarray

    @property
    def rmax(self) -> int:
        return self.c.size - 1

    def __getitem__(self, r: int) -> float:
        return float(self.c[r])


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


def dickman_constants(rmax: int, zt: ZetaTable | None = None) -> DickmanConstants:
    """C_0..C_rmax as coefficients of exp(-sum_{k>=2} zeta(k) z^k / k).

    ``log Gamma(1 - z) = gamma z + sum_{k>=2} zeta(k) z^k / k`` so the
    ``exp(gamma z)`` factor cancels and gamma is never needed.
    """
    if rmax < 0:
        raise ValueError("rmax must be >= 0")
    if rmax < 2:
        return DickmanConstants(_frozen([1.0, 0.0][: rmax + 1]))
    zt = zt or zeta_values(rmax)
    log_gf = [0.0, 0.0] + [-zt(k) / k for k in range(2, rmax + 1)]
    return DickmanConstants(_frozen(series_exp(TruncatedSeries(log_gf)).coeffs))


def bell_polynomial(n: int, k: int, x: Sequence[float]) -> float:
    """Partial exponential Bell polynomial B_{n,k}(x_1, ..., x_{n-k+1}).

    ``x[i - 1]`` holds ``x_i``.  Evaluated with the recurrence
    ``B_{n,k} = sum_i binom(n-1, i-1) x_i B_{n-i,k-1}``.
    """
    return _bell_table(tuple(float(v) for v in x[: max(n - k + 1, 0)]), n)[n][k]


@lru_cache(maxsize=64)
def _bell_table(x: tuple, nmax: int) -> list:
    B = [[0.0] * (nmax + 1) for _ in range(nmax + 1)]
    B[0][0] = 1.0
    for n in range(1, nmax + 1):
        for k in range(1, n + 1):
            top = min(n - k + 1, len(x))
            B[n][k] = math.fsum(
                math.comb(n - 1, i - 1) * x[i - 1] * B[n - i][k - 1]
                for i in range(1, top + 1)
            )
    return B


def dickman_constants_bell(rmax: int, zt: ZetaTable | None = None) -> DickmanConstants:
    """C_r = (1/r!) sum_{k=1}^r (-1)^k B_{r,k}(0, 1! zeta(2), 2! zeta(3), ...)."""
    if rmax < 0:
        raise ValueError("rmax must be >= 0")
    if zt is None:
        zt = zeta_values(max(rmax, 2))
    if rmax >= 2 and zt.kmax < rmax:
        raise ValueError(f"zeta table stops at {zt.kmax}, need {rmax}")
    # x_1 = 0, x_i = (i-1)! zeta(i)
    x = [0.0] + [math.factorial(i - 1) * zt(i) for i in range(2, rmax + 1)]
    c = [1.0]
    for r in range(1, rmax + 1):
        B = _bell_table(tuple(x[:r]), r)
        c.append(math.fsum((-1) ** k * B[r][k] for k in range(1, r + 1)) / math.factorial(r))
    return DickmanConstants(_frozen(c))


# --------------------------------------------------------------------------
# generalized constants and E coefficients


@dataclass(frozen=True)
class GeneralizedDickmanTable:
    """c[k, r] = C_{r,k}; kappa is the outer index."""

    c: np.ndarray

    @property
    def kmax(self) -> int:
        return self.c.shape[0] - 1

    @property
    def rmax(self) -> int:
        return self.c.shape[1] - 1

    def __call__(self, r: int, kappa: int) -> float:
        if r < 0:
            return 0.0
        return float(self.c[kappa, r])

    def recursion_residual(self, r: int, kappa: int) -> float:
        """kappa C_{r,k} - C_{r,k-1} - C_{r-1,k}, scaled by max(1, |kappa C_{r,k}|)."""
        lhs = kappa * self(r, kappa)
        res = lhs - self(r, kappa - 1) - self(r - 1, kappa)
        return abs(res) / max(1.0, abs(lhs))


def generalized_dickman(
    rmax: int, kmax: int, base: DickmanConstants | None = None
) -> GeneralizedDickmanTable:
    """C_{r,k} from C_{r,k} = sum_{j<=r} C_{j,k-1} / k^(r-j+1).

    This is multiplication of the generating function by 1/(k - z).
    """
    if rmax < 0 or kmax < 0:
        raise ValueError("rmax and kmax must be >= 0")
    base = base or dickman_constants(rmax)
    if base.rmax < rmax:
        raise ValueError("base Dickman table too short")
    c = np.zeros((kmax + 1, rmax + 1))
    c[0] = base.c[: rmax + 1]
    for kappa in range(1, kmax + 1):
        prev = c[kappa - 1]
        for r in range(rmax + 1):
            c[kappa, r] = math.fsum(
                prev[j] / float(kappa) ** (r - j + 1) for j in range(r + 1)
            )
    return GeneralizedDickmanTable(_frozen(c))


@dataclass(frozen=True)
class ECoefficientTable:
    """e[m, j] = E_{j,m}; m is the outer index."""

    e: np.ndarray

    @property
    def mmax(self) -> int:
        return self.e.shape[0] - 1

    @property
    def jmax(self) -> int:
        return self.e.shape[1] - 1

    def __call__(self, j: int, m: int) -> float:
        return float(self.e[m, j])


def e_coefficients(jmax: int, mmax: int) -> ECoefficientTable:
    if mmax < 0:
        raise ValueError("mmax must be >= 0")
    if jmax < mmax:
        raise ValueError(f"jmax ({jmax}) must be >= mmax ({mmax})")
    g = base_series(jmax)
    rows = [TruncatedSeries.one(jmax)]
    for _ in range(mmax):
        rows.append(rows[-1] * g)
    e = np.array([row.coeffs for row in rows])
    # g^m = z^m (1 + ...): entries below the diagonal are exactly zero
    for m in range(mmax + 1):
        e[m, :m] = 0.0
    return ECoefficientTable(_frozen(e))


# --------------------------------------------------------------------------
# bundled tables and the JSON cache


@dataclass(frozen=True)
class CoefficientTables:
    """Everything the expansions need, built once and shared read-only."""

    C: DickmanConstants
    Ckappa: GeneralizedDickmanTable
    E: ECoefficientTable
    meta: dict = field(default_factory=dict, compare=False)

    @property
    def rmax(self) -> int:
        return self.C.rmax

    @property
    def kmax(self) -> int:
        return self.Ckappa.kmax

    @property
    def jmax(self) -> int:
        return self.E.jmax

    @property
    def mmax(self) -> int:
        return self.E.mmax

    def check(self) -> None:
        """Run the table invariants; raises TableError on the first failure."""
        c = self.C.c
        if c[0] != 1.0:
            raise TableError("C_0 != 1")
        if c.size > 1 and abs(c[1]) > 1e-14:
            raise TableError(f"C_1 = {c[1]!r}, expected 0")
        rcheck = min(self.rmax, ROUTE_CHECK_RMAX)
        bell = dickman_constants_bell(rcheck)
        for r in range(rcheck + 1):
            if abs(bell[r] - c[r]) > ROUTE_CHECK_RTOL * max(abs(c[r]), 1e-300):
                raise TableError(f"C_{r}: series {c[r]!r} vs Bell {bell[r]!r}")
        ck = self.Ckappa
        if not np.array_equal(ck.c[0], c[: ck.rmax + 1]):
            raise TableError("row kappa=0 differs from C_r")
        for kappa in range(1, ck.kmax + 1):
            if abs(ck(0, kappa) * math.factorial(kappa) - 1.0) > 1e-13:
                raise TableError(f"C_(0,{kappa}) != 1/{kappa}!")
            for r in range(ck.rmax + 1):
                if ck.recursion_residual(r, kappa) > 1e-12:
                    raise TableError(f"recursion residual at r={r}, kappa={kappa}")
        E = self.E
        for m in range(E.mmax + 1):
            for n in range(E.jmax + 1):
                v = E(n, m)
                if n < m and v != 0.0:
                    raise TableError(f"E_({n},{m}) should vanish")
                if abs(v) > m**n / math.factorial(n) * (1 + 1e-12):
                    raise TableError(f"|E_({n},{m})| exceeds m^n/n!")
            if m <= E.jmax and abs(E(m, m) - 1.0) > 1e-14:
                raise TableError(f"E_({m},{m}) != 1")

    def to_json(self) -> str:
        doc = {
            "rmax": self.rmax,
            "kmax": self.kmax,
            "jmax": self.jmax,
            "mmax": self.mmax,
            "C": self.C.c.tolist(),
            "Ckappa": self.Ckappa.c.tolist(),
            "E": self.E.e.tolist(),
            "meta": {
                "zeta_kmax": self.meta.get("zeta_kmax", max(self.rmax, 2)),
                "builder_version": self.meta.get("builder_version", BUILDER_VERSION),
            },
        }
        return json.dumps(doc, indent=1) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "CoefficientTables":
        doc = json.loads(text)
        try:
            C = np.array(doc["C"], dtype=float)
            Ck = np.array(doc["Ckappa"], dtype=float)
            E = np.array(doc["E"], dtype=float)
            dims = (doc["rmax"], doc["kmax"], doc["jmax"], doc["mmax"])
        except KeyError as exc:
            raise TableError(f"coefficient cache missing field {exc}") from None
        rmax, kmax, jmax, mmax = dims
        if C.shape != (rmax + 1,) or Ck.shape != (kmax + 1, rmax + 1) or E.shape != (mmax + 1, jmax + 1):
            raise TableError("coefficient cache arrays do not match declared extents")
        return cls(
            DickmanConstants(_frozen(C)),
            GeneralizedDickmanTable(_frozen(Ck)),
            ECoefficientTable(_frozen(E)),
            meta=dict(doc.get("meta", {})),
        )

    def save(self, path) -> None:
        Path(path).write_text(self.to_json())

    @classmethod
    def load(cls, path) -> "CoefficientTables":
        return cls.from_json(Path(path).read_text())


def build_tables(
    rmax: int = DEFAULT_RMAX,
    kmax: int = DEFAULT_KMAX,
    jmax: int = DEFAULT_JMAX,
    mmax: int = DEFAULT_MMAX,
    check: bool = True,
) -> CoefficientTables:
    zt = zeta_values(max(rmax, 2))
    C = dickman_constants(rmax, zt)
    tables = CoefficientTables(
        C,
        generalized_dickman(rmax, kmax, C),
        e_coefficients(jmax, mmax),
        meta={"zeta_kmax": zt.kmax, "builder_version": BUILDER_VERSION},
    )
    if check:
        tables.check()
    return tables


@lru_cache(maxsize=1)
def default_tables() -> CoefficientTables:
    return build_tables()
