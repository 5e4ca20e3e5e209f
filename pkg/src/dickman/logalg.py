"""Finite sums of ``c * log(u)**a * u**(-b)``, closed under d/du.

The expansions need ``(log^k u)^(j)`` for j up to ~30.  Nested numerical
differentiation would be useless there, so derivatives are taken termwise:

    d/du [log^a u * u^-b] = a log^(a-1) u * u^-(b+1) - b log^a u * u^-(b+1)
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Iterable, Mapping

Key = tuple  # (a, b)


class LogLaurentPoly:
    """Immutable map (a, b) -> coefficient for the sum of c log^a(u) u^-b.

    Integer coefficients stay Python ints, so repeated differentiation of
    ``log^k u`` is exact however large the factorials get.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, float] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict = {}
        for (a, b), c in items:
            if a < 0 or b < 0:
                raise ValueError(f"exponents must be non-negative, got {(a, b)}")
            key = (int(a), int(b))
            acc[key] = acc.get(key, 0) + c
        self._terms = {k: c for k, c in sorted(acc.items()) if c != 0}

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, LogLaurentPoly):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(tuple(self._terms.items()))

    def __repr__(self) -> str:
        if not self._terms:
            return "LogLaurentPoly(0)"
        parts = [f"{c:g}*log^{a}(u)*u^-{b}" for (a, b), c in self._terms.items()]
        return "LogLaurentPoly(" + " + ".join(parts) + ")"

    def __add__(self, other: "LogLaurentPoly") -> "LogLaurentPoly":
        return LogLaurentPoly(list(self) + list(other))

    def __neg__(self) -> "LogLaurentPoly":
        return LogLaurentPoly({k: -c for k, c in self})

    def __sub__(self, other: "LogLaurentPoly") -> "LogLaurentPoly":
        return self + (-other)

    def scale(self, s: float) -> "LogLaurentPoly":
        return LogLaurentPoly({k: s * c for k, c in self})

    def differentiate(self, times: int = 1) -> "LogLaurentPoly":
        return differentiate(self, times)

    def __call__(self, u: float) -> float:
        return evaluate(self, u)


def log_power(k: int) -> LogLaurentPoly:
    """log(u)**k."""
    if k < 0:
        raise ValueError("k must be non-negative")
    return LogLaurentPoly({(k, 0): 1})


def _diff_once(p: LogLaurentPoly) -> LogLaurentPoly:
    out = []
    for (a, b), c in p:
        if a:
            out.append(((a - 1, b + 1), a * c))
        if b:
            out.append(((a, b + 1), -b * c))
    return LogLaurentPoly(out)


def differentiate(p: LogLaurentPoly, times: int = 1) -> LogLaurentPoly:
    if times < 0:
        raise ValueError("times must be non-negative")
    for _ in range(times):
        p = _diff_once(p)
    return p


@lru_cache(maxsize=None)
def log_power_derivative(k: int, j: int) -> LogLaurentPoly:
    """(log^k u)^(j), memoized."""
    if j == 0:
        return log_power(k)
    return _diff_once(log_power_derivative(k, j - 1))


def evaluate(p: LogLaurentPoly, u: float) -> float:
    if not u > 0:
        raise ValueError(f"log-Laurent polynomials need u > 0, got {u}")
    L = math.log(u)
    return math.fsum(c * L**a * u ** (-b) for (a, b), c in p)
