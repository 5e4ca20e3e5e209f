"""Exact smooth-number counts and divisor sums, against rho_kappa(u).

For y-smooth n <= x (largest prime factor <= y) we compare

    sum_{n in S(x, y)} d_kappa(n)   with   rho_kappa(u) x log^(kappa-1) y,

u = log x / log y.  The sieve works on segments of [1, x]: dividing out
every prime up to sqrt(x) leaves either 1 or the one prime factor above
sqrt(x), which gives the largest prime factor and d_kappa(n) in one pass.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .expand import DomainError, ResourceLimitError, rho_kappa

MAX_X = 10**8
SEGMENT = 1 << 20
CSV_HEADER = "x,y,u,kappa,exact,predicted,relDev"


def primes_up_to(n: int) -> np.ndarray:
    if n < 2:
        return np.zeros(0, dtype=np.int64)
    sieve = np.ones(n + 1, dtype=bool)
    sieve[:2] = False
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = False
    return np.flatnonzero(sieve).astype(np.int64)


def _check_xy(x, y):
    if not (isinstance(x, (int, np.integer)) and isinstance(y, (int, np.integer))):
        raise DomainError("x and y must be integers")
    if y < 2 or x < y:
        raise DomainError(f"need 2 <= y <= x, got x={x}, y={y}")
    if x > MAX_X:
        raise ResourceLimitError(f"x={x} exceeds the sieve cap {MAX_X}")


def lpf_segments(x: int, kappa: int | None = None, segment: int = SEGMENT):
    """Yield (lo, lpf, dk) over [1, x] in segments.

    ``lpf[i]`` is the largest prime factor of lo + i (1 for n = 1) and
    ``dk[i]`` is d_kappa(lo + i), or None when kappa is None.
    """
    small = primes_up_to(math.isqrt(x))
    binom = None
    if kappa is not None:
        # d_kappa(p^e) = C(e + kappa - 1, kappa - 1); e < 64 for n < 2^63
        binom = np.array([math.comb(e + kappa - 1, kappa - 1) for e in range(64)], dtype=np.int64)
    for lo in range(1, x + 1, segment):
        hi = min(lo + segment - 1, x)
        n = np.arange(lo, hi + 1, dtype=np.int64)
        rem = n.copy()
        lpf = np.ones_like(n)
        dk = np.ones_like(n) if kappa is not None else None
        for p in small:
            p = int(p)
            if p * p > hi:
                break
            first = (-lo) % p
            idx = np.arange(first, n.size, p)
            if idx.size == 0:
                continue
            lpf[idx] = p
            e = np.zeros(idx.size, dtype=np.int64)
            sub = rem[idx]
            mask = sub % p == 0
            while mask.any():
                e[mask] += 1
                sub[mask] //= p
                mask = sub % p == 0
            rem[idx] = sub
            if dk is not None:
                dk[idx] *= binom[e]
        big = rem > 1
        lpf[big] = rem[big]
        if dk is not None:
            dk[big] *= kappa
        yield lo, lpf, dk


def smooth_sieve(x: int, y: int) -> np.ndarray:
    """Boolean flags, index n-1 <-> n, for n <= x with largest prime factor <= y."""
    _check_xy(x, y)
    return np.concatenate([lpf <= y for _, lpf, _ in lpf_segments(x)])


def psi(x: int, y: int) -> int:
    """Psi(x, y), the number of y-smooth n <= x (n = 1 included)."""
    _check_xy(x, y)
    return sum(int(np.count_nonzero(lpf <= y)) for _, lpf, _ in lpf_segments(x))


def divisor_kappa(n: int, kappa: int) -> int:
    """d_kappa(n) by trial division."""
    if n < 1 or kappa < 1:
        raise ValueError("need n >= 1 and kappa >= 1")
    out = 1
    p = 2
    while p * p <= n:
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        out *= math.comb(e + kappa - 1, kappa - 1)
        p += 1
    if n > 1:
        out *= kappa
    return out


@dataclass(frozen=True)
class SmoothSumReport:
    x: int
    y: int
    u: float
    kappa: int
    exact: int
    predicted: float
    rel_dev: float

    def csv_row(self) -> str:
        return ",".join(
            [str(self.x), str(self.y), f"{self.u:.17g}", str(self.kappa), str(self.exact),
             f"{self.predicted:.17g}", f"{self.rel_dev:.17g}"]
        )

    def as_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "u": self.u, "kappa": self.kappa,
                "exact": self.exact, "predicted": self.predicted, "relDev": self.rel_dev}


def divisor_sum_smooth(x: int, y: int, kappa: int, method: str = "oracle") -> SmoothSumReport:
    """Exact sum of d_kappa over S(x, y) versus rho_kappa(u) x log^(kappa-1) y."""
    _check_xy(x, y)
    if not 1 <= kappa <= 4:
        raise DomainError(f"kappa must be in [1, 4], got {kappa}")
    exact = 0
    for _, lpf, dk in lpf_segments(x, kappa):
        exact += int(dk[lpf <= y].sum())
    u = math.log(x) / math.log(y)
    predicted = rho_kappa(u, kappa, method) * x * math.log(y) ** (kappa - 1)
    return SmoothSumReport(x, y, u, kappa, exact, predicted, abs(exact - predicted) / predicted)
