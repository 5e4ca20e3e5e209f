import math

import numpy as np
import pytest

from dickman.expand import DomainError, ResourceLimitError, k_ell, k_ell_kappa
from dickman.oracle import (
    QuadratureConfig,
    adaptive_gl,
    k_ell_kappa_oracle,
    k_ell_oracle,
    piece_boundaries,
    rho_oracle_sum,
    rho_ode,
)
from refs import k2_closed_form, k3_mpmath


def test_config_validation():
    for bad in (0.0, 1e-13, 0.1, -1e-6):
        with pytest.raises(ValueError):
            QuadratureConfig(tol=bad)
    QuadratureConfig(tol=1e-12)
    QuadratureConfig(tol=1e-2)


def test_adaptive_gl_known_integrals():
    assert adaptive_gl(np.exp, 0, 1, 1e-13) == pytest.approx(math.e - 1, abs=1e-13)
    assert adaptive_gl(np.log, 1, 2, 1e-13) == pytest.approx(2 * math.log(2) - 1, abs=1e-13)
    # integrable endpoint singularity needs bisection
    assert adaptive_gl(np.sqrt, 0, 1, 1e-10) == pytest.approx(2 / 3, abs=1e-9)
    assert adaptive_gl(np.exp, 1, 1, 1e-10) == 0.0


def test_examples(cfg):
    assert k_ell_oracle(2, 2, cfg) == 0.0
    assert k_ell_oracle(1, 7, cfg) == pytest.approx(math.log(7), rel=1e-15)
    assert k_ell_oracle(2, 3, cfg) == pytest.approx(0.14722, abs=1e-5)


@pytest.mark.parametrize("ell", [1, 2, 3, 4, 5])
def test_zero_on_and_below_ell(ell, cfg):
    for u in (0.0, 0.5 * ell, float(ell)):
        assert k_ell_oracle(ell, u, cfg) == 0.0
        assert k_ell_kappa_oracle(ell, 2, u, cfg) == 0.0


def test_rejects_bad_arguments(cfg):
    with pytest.raises(ResourceLimitError):
        k_ell_oracle(6, 10, cfg)
    with pytest.raises(DomainError):
        k_ell_oracle(2, float("inf"), cfg)
    with pytest.raises(DomainError):
        k_ell_oracle(2, -1.0, cfg)
    with pytest.raises(DomainError):
        k_ell_kappa_oracle(2, -1, 5.0, cfg)


@pytest.mark.parametrize("u", [2.5, 3.0, 7.3, 20, 100, 1000])
def test_k2_against_closed_form(u, cfg):
    assert k_ell_oracle(2, u, cfg) == pytest.approx(k2_closed_form(u), abs=1e-9)


@pytest.mark.parametrize("u", [3.5, 4, 6.2, 10, 40])
def test_k3_against_mpmath(u, cfg):
    assert k_ell_oracle(3, u, cfg) == pytest.approx(k3_mpmath(u), abs=1e-9)


@pytest.mark.parametrize("ell", [2, 3])
@pytest.mark.parametrize("u", [10, 20, 50])
def test_consistency_with_expansion(ell, u, cfg):
    bound = 10 * math.log(math.e * u) ** ell / u**7
    assert abs(k_ell_oracle(ell, u, cfg) - k_ell(ell, u, 6).value) <= bound


def test_convolution_against_closed_form(cfg):
    for u in np.linspace(1, 50, 50):
        exact = u * math.log(u) - u + 1
        assert abs(k_ell_kappa_oracle(1, 1, u, cfg) - exact) <= cfg.tol * max(1.0, exact)


def test_convolution_examples(cfg):
    assert k_ell_kappa_oracle(1, 1, 2, cfg) == pytest.approx(2 * math.log(2) - 1, abs=1e-12)
    # 2 int_1^3 (3 - t) log t dt = 9 log 3 - 8
    v = k_ell_kappa_oracle(1, 2, 3, cfg)
    assert v == pytest.approx(9 * math.log(3) - 8, rel=1e-10)
    assert v == pytest.approx(k_ell_kappa(1, 2, 3, 4).value, rel=1e-4)


def test_kappa_zero_delegates(cfg):
    for ell, u in [(1, 3.0), (2, 7.5), (3, 11.0)]:
        assert k_ell_kappa_oracle(ell, 0, u, cfg) == k_ell_oracle(ell, u, cfg)


def test_rho_ode_examples():
    assert rho_ode(0.4) == 1.0
    assert rho_ode(1) == 1.0
    assert rho_ode(2) == pytest.approx(1 - math.log(2), abs=1e-8)
    assert rho_ode(4) == pytest.approx(0.00491093, abs=5e-9)


def test_rho_ode_rejects_bad_arguments():
    with pytest.raises(DomainError):
        rho_ode(-0.5)
    with pytest.raises(ValueError):
        rho_ode(2.0, step=1e-2)
    with pytest.raises(ValueError):
        rho_ode(2.0, step=0.0)


def test_rho_ode_solves_the_integral_equation():
    # u rho(u) = int_{u-1}^u rho(t) dt
    for u in (1.5, 2.7, 4.1):
        lhs = u * rho_ode(u)
        rhs = adaptive_gl(np.vectorize(rho_ode), u - 1, u, 1e-11)
        assert lhs == pytest.approx(rhs, abs=1e-8)


def test_rho_agreement(cfg):
    for u in np.arange(1.0, 6.0 + 1e-9, 0.25):
        assert abs(rho_oracle_sum(u, cfg) - rho_ode(u)) <= 1e-6


def test_tolerance_monotonicity():
    ref_cfg = QuadratureConfig(tol=1e-12)
    for ell, u in [(2, 13.3), (3, 9.7)]:
        ref = k_ell_oracle(ell, u, ref_cfg)
        tol = 1e-4
        prev = abs(k_ell_oracle(ell, u, QuadratureConfig(tol=tol)) - ref)
        while tol > 2e-12:
            tol /= 2
            dev = abs(k_ell_oracle(ell, u, QuadratureConfig(tol=tol)) - ref)
            # deviations at the reference's own noise level are exempt
            assert dev <= 2 * prev or dev <= 1e-12
            prev = dev


def test_piece_boundaries_cover_interval():
    pts = piece_boundaries(2, 2.0, 300.0)
    assert pts[:3] == [3.0, 4.0, 5.0]
    assert all(2.0 < p < 300.0 for p in pts)
    assert all(a < b for a, b in zip(pts, pts[1:]))
    # unit pieces up to l + 16, then doubling widths
    assert pts[15:] == [18.0, 34.0, 66.0, 130.0, 258.0]
