"""Asymptotic expansions of K_l(u) and K_l(u, kappa), and rho / rho_kappa.

For ``u >= l`` and any truncation order ``J``::

    K_l(u) ~ sum_{j<=J} sum_{m<=l} sum_{r<=l-m}
                 (-1)^r / (m! (l-m-r)!) E_{j,m} C_r (log^{l-m-r} u)^(j)

with error ``O(log^l(eu) / u^(J+1))``.  The kappa version has a closed main
term in ``C_{r,kappa-n} u^(kappa-n) log^(l-m-r) u`` plus derivative
corrections with ``E_{kappa+j,m}``.  All constants come from
:mod:`dickman.seriesgen`; all derivatives are exact (:mod:`dickman.logalg`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .logalg import evaluate, log_power_derivative
from .seriesgen import CoefficientTables, default_tables


class DomainError(ValueError):
    """Arguments outside the region where a formula is valid."""


class ResourceLimitError(ValueError):
    """Request exceeds a table extent or a cost cap."""


DEFAULT_J = 6

# Fitted multiplier A(l, J) for the advisory error estimate
# A * log^l(eu) / u^(J+1): max over u in {10, 20, 40, 80, 160} of
# |expansion - oracle| u^(J+1) / log^l(eu), times 2, at kappa = 0.
# Regenerate with dickman.oracle.fit_error_constants().
ERROR_CONSTANTS = {
    (2, 0): 0.19, (2, 1): 0.048, (2, 2): 0.022, (2, 3): 0.012, (2, 4): 0.0079,
    (2, 5): 0.0055, (2, 6): 0.0041, (2, 7): 0.0031, (2, 8): 0.0025, (2, 9): 0.002,
    (3, 0): 0.13, (3, 1): 0.012, (3, 2): 0.026, (3, 3): 0.031, (3, 4): 0.036,
    (3, 5): 0.044, (3, 6): 0.057, (3, 7): 0.076, (3, 8): 0.11, (3, 9): 0.15,
    (3, 10): 0.23,
    (4, 0): 0.029, (4, 1): 0.013, (4, 2): 0.0035, (4, 3): 0.0096, (4, 4): 0.026,
    (4, 5): 0.053, (4, 6): 0.1, (4, 7): 0.2, (4, 8): 0.39, (4, 9): 0.79,
    (4, 10): 1.6,
}
DEFAULT_ERROR_CONSTANT = 1.0


@dataclass(frozen=True)
class ExpansionRequest:
    ell: int
    kappa: int
    u: float
    J: int

    def validate(self, tables: CoefficientTables) -> None:
        if self.ell < 1:
            raise DomainError(f"ell must be >= 1, got {self.ell}")
        if self.kappa < 0:
            raise DomainError(f"kappa must be >= 0, got {self.kappa}")
        if self.J < 0:
            raise DomainError(f"J must be >= 0, got {self.J}")
        if not math.isfinite(self.u):
            raise DomainError(f"u must be finite, got {self.u}")
        if self.u < self.ell:
            raise DomainError(f"expansion needs u >= ell ({self.u} < {self.ell})")
        if self.ell > min(tables.mmax, tables.rmax):
            raise ResourceLimitError(f"ell={self.ell} beyond coefficient tables")
        if self.kappa > tables.kmax:
            raise ResourceLimitError(f"kappa={self.kappa} beyond kmax={tables.kmax}")
        if self.kappa + self.J > tables.jmax:
            raise ResourceLimitError(
                f"kappa + J = {self.kappa + self.J} beyond jmax={tables.jmax}"
            )


@dataclass(frozen=True)
class EvalResult:
    value: float
    error_estimate: float
    terms_used: int
    request: ExpansionRequest


def error_scale(ell: int, u: float, J: int) -> float:
    """log^l(eu) / u^(J+1)."""
    return (1.0 + math.log(u)) ** ell / u ** (J + 1)


def error_estimate(ell: int, kappa: int, u: float, J: int) -> float:
    if ell == 1:
        # K_1(u, kappa) is reproduced exactly for every kappa
        return 0.0
    A = ERROR_CONSTANTS.get((ell, J), DEFAULT_ERROR_CONSTANT)
    return A * math.factorial(kappa) * error_scale(ell, u, J)


def _correction_terms(ell, u, j, e_index, weight, tables, out):
    """Append weight (-1)^r/(m!(l-m-r)!) E_{e_index,m} C_r (log^{l-m-r} u)^(j)."""
    E, C = tables.E, tables.C
    for m in range(ell + 1):
        e = E(e_index, m)
        if e == 0.0:
            continue
        for r in range(ell - m + 1):
            c = C[r]
            if c == 0.0:
                continue
            poly = log_power_derivative(ell - m - r, j)
            if not len(poly):
                continue
            coef = (-1) ** r / (math.factorial(m) * math.factorial(ell - m - r))
            out.append(weight * coef * e * c * evaluate(poly, u))


def k_ell(ell: int, u: float, J: int = DEFAULT_J, tables: CoefficientTables | None = None) -> EvalResult:
    """K_l(u) from the truncated expansion (requires u >= l)."""
    tables = tables or default_tables()
    req = ExpansionRequest(ell, 0, float(u), J)
    req.validate(tables)
    terms: list = []
    for j in range(J + 1):
        _correction_terms(ell, req.u, j, j, 1.0, tables, terms)
    return EvalResult(math.fsum(terms), error_estimate(ell, 0, req.u, J), len(terms), req)


def _main_terms(ell, kappa, u, tables, out):
    E, Ck = tables.E, tables.Ckappa
    L = math.log(u)
    kf = math.factorial(kappa)
    for m in range(min(ell, kappa) + 1):
        for n in range(m, kappa + 1):
            e = E(n, m)
            if e == 0.0:
                continue
            for r in range(ell - m + 1):
                c = Ck(r, kappa - n)
                coef = (-1) ** r * kf / (math.factorial(m) * math.factorial(ell - m - r))
                out.append(coef * e * c * u ** (kappa - n) * L ** (ell - m - r))


def k_ell_kappa_main(ell: int, kappa: int, u: float, tables: CoefficientTables | None = None) -> float:
    """Main term of the K_l(u, kappa) expansion, error O(log^l(eu) / u)."""
    tables = tables or default_tables()
    req = ExpansionRequest(ell, kappa, float(u), 0)
    req.validate(tables)
    terms: list = []
    _main_terms(ell, kappa, req.u, tables, terms)
    return math.fsum(terms)


def k_ell_kappa(
    ell: int, kappa: int, u: float, J: int = DEFAULT_J, tables: CoefficientTables | None = None
) -> EvalResult:
    """K_l(u, kappa): main term plus J derivative corrections."""
    tables = tables or default_tables()
    req = ExpansionRequest(ell, kappa, float(u), J)
    req.validate(tables)
    terms: list = []
    _main_terms(ell, kappa, req.u, tables, terms)
    kf = float(math.factorial(kappa))
    for j in range(1, J + 1):
        _correction_terms(ell, req.u, j, kappa + j, kf, tables, terms)
    return EvalResult(math.fsum(terms), error_estimate(ell, kappa, req.u, J), len(terms), req)


# --------------------------------------------------------------------------
# rho and rho_kappa

RHO_J = 24


def _k_backend(method, J, tables, cfg):
    if method == "expansion":
        def k(ell, kappa, u):
            return k_ell_kappa(ell, kappa, u, min(J, tables.jmax - kappa), tables).value
    elif method == "oracle":
        from .oracle import QuadratureConfig, k_ell_kappa_oracle

        cfg = cfg or QuadratureConfig()

        def k(ell, kappa, u):
            return k_ell_kappa_oracle(ell, kappa, u, cfg)
    else:
        raise ValueError(f"unknown method {method!r}; use 'expansion' or 'oracle'")
    return k


def rho_kappa(
    u: float,
    kappa: int,
    method: str = "oracle",
    J: int = RHO_J,
    tables: CoefficientTables | None = None,
    cfg=None,
) -> float:
    """rho_kappa(u) = sum_{0<=l<u} (-kappa)^l / (kappa-1)! K_l(u, kappa-1).

    ``K_0(u, kappa-1) = u^(kappa-1)`` is used for every u >= 0.
    """
    if kappa < 1:
        raise DomainError(f"kappa must be >= 1, got {kappa}")
    if not (u >= 0 and math.isfinite(u)):
        raise DomainError(f"u must be finite and >= 0, got {u}")
    tables = tables or default_tables()
    k = _k_backend(method, J, tables, cfg)
    terms = [float(u) ** (kappa - 1)]
    ell = 1
    while ell < u:
        terms.append(float(-kappa) ** ell * k(ell, kappa - 1, u))
        ell += 1
    return math.fsum(terms) / math.factorial(kappa - 1)


def rho(
    u: float,
    method: str = "oracle",
    J: int = RHO_J,
    tables: CoefficientTables | None = None,
    cfg=None,
) -> float:
    """Dickman rho(u) as the finite alternating sum of K_l(u)."""
    return rho_kappa(u, 1, method, J, tables, cfg)
