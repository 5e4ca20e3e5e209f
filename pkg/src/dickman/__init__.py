"""Dickman-type multiple integrals K_l(u), K_l(u, kappa) and rho_kappa(u).

Refined asymptotic expansions with exact constant tables, plus independent
quadrature, delay-equation and sieve references to check them against.
"""

from .expand import (
    DomainError,
    EvalResult,
    ExpansionRequest,
    ResourceLimitError,
    k_ell,
    k_ell_kappa,
    k_ell_kappa_main,
    rho,
    rho_kappa,
)
from .logalg import LogLaurentPoly, differentiate, evaluate, log_power
from .oracle import QuadratureConfig, k_ell_kappa_oracle, k_ell_oracle, rho_ode
from .seriesgen import (
    CoefficientTables,
    TruncatedSeries,
    build_tables,
    default_tables,
    dickman_constants,
    dickman_constants_bell,
    e_coefficients,
    generalized_dickman,
    series_exp,
    series_int_power,
    zeta_values,
)
from .smoothlab import SmoothSumReport, divisor_sum_smooth, psi, smooth_sieve

__version__ = "0.1.0"
