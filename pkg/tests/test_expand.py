import math

import numpy as np
import pytest

from dickman.expand import (
    DomainError,
    ResourceLimitError,
    error_scale,
    k_ell,
    k_ell_kappa,
    k_ell_kappa_main,
    rho,
    rho_kappa,
)
from dickman.oracle import k_ell_kappa_oracle, k_ell_oracle, rho_ode
from dickman.seriesgen import build_tables
from refs import k2_closed_form, k3_mpmath


def test_k1_is_log():
    r = k_ell(1, 10, 5)
    assert r.value == pytest.approx(2.302585092994, abs=1e-12)
    assert r.error_estimate == 0.0


@pytest.mark.parametrize("u", [2, 3.5, 10, 50, 160])
def test_k2_tail_is_dilogarithm_series(u):
    # for l = 2 only m = 1, r = 0 survives at j >= 1: E_{j,1} (log u)^(j) = 1/(j^2 u^j)
    exact = k2_closed_form(u)
    for J in range(0, 12):
        tail = math.fsum(1 / (j * j * u**j) for j in range(J + 1, 200))
        assert exact - k_ell(2, u, J).value == pytest.approx(tail, rel=1e-9, abs=2e-15 * exact)


def test_k2_at_50(cfg):
    v = k_ell(2, 50, 6).value
    assert abs(v - k_ell_oracle(2, 50, cfg)) <= 1e-8
    assert abs(v - k2_closed_form(50)) <= 1e-8


def test_k2_at_3():
    v = k_ell(2, 3, 6).value
    assert v == pytest.approx(0.14722, abs=2e-5)
    # rho(3) = 1 - K_1(3) + K_2(3)
    assert k2_closed_form(3) == pytest.approx(rho_ode(3) - 1 + math.log(3), abs=1e-8)


@pytest.mark.parametrize("u", [4, 10, 40])
def test_k3_against_mpmath(u):
    # convergence near u = l is geometric in 1/u, so use most of the table
    assert k_ell(3, u, 28).value == pytest.approx(k3_mpmath(u), rel=1e-10)


def test_k_ell_rejects_u_below_ell():
    with pytest.raises(DomainError):
        k_ell(3, 2.5)


def test_k_ell_rejects_bad_arguments():
    with pytest.raises(DomainError):
        k_ell(0, 5)
    with pytest.raises(DomainError):
        k_ell(2, 5, -1)
    with pytest.raises(DomainError):
        k_ell(2, float("nan"))


def test_table_extents_enforced():
    small = build_tables(4, 2, 6, 3)
    with pytest.raises(ResourceLimitError):
        k_ell(2, 10, 7, small)
    with pytest.raises(ResourceLimitError):
        k_ell(4, 10, 2, small)
    with pytest.raises(ResourceLimitError):
        k_ell_kappa(2, 3, 10, 0, small)


# ---------------------------------------------------------------- kappa


def test_main_term_examples():
    assert k_ell_kappa_main(1, 1, 2) == pytest.approx(2 * math.log(2) - 1, rel=1e-15)
    assert k_ell_kappa_main(1, 0, 10) == pytest.approx(math.log(10), rel=1e-15)


def test_main_term_against_convolution(cfg):
    u = 20
    bound = 10 * (1 + math.log(u)) ** 2 / u
    assert abs(k_ell_kappa_main(2, 1, u) - k_ell_kappa_oracle(2, 1, u, cfg)) <= bound


@pytest.mark.parametrize("kappa", [0, 1, 2, 3, 5])
def test_k1_kappa_is_exact(kappa):
    # int_1^u (u-t)^kappa dt/t = u^kappa (log u - H_kappa) + sum_i C(kappa,i) (-1)^(i+1) u^(kappa-i) / i
    for u in [1.0, 2.5, 7.0, 40.0]:
        H = sum(1 / i for i in range(1, kappa + 1))
        exact = u**kappa * (math.log(u) - H) + math.fsum(
            math.comb(kappa, i) * (-1) ** (i + 1) * u ** (kappa - i) / i for i in range(1, kappa + 1)
        )
        for J in (0, 3):
            assert k_ell_kappa(1, kappa, u, J).value == pytest.approx(exact, rel=1e-12, abs=1e-13)


def test_kappa_zero_reduces_to_plain_expansion():
    for ell in (1, 2, 3, 4):
        for u in (ell, ell + 0.5, 10, 100, 1000):
            for J in range(9):
                a = k_ell_kappa(ell, 0, u, J).value
                b = k_ell(ell, u, J).value
                assert a == pytest.approx(b, rel=1e-12, abs=1e-300)


def test_kappa_one_at_five():
    assert k_ell_kappa(1, 1, 5, 0).value == pytest.approx(5 * math.log(5) - 4, rel=1e-15)


def test_kappa_two_against_convolution(cfg):
    v = k_ell_kappa(2, 2, 30, 4).value
    assert v == pytest.approx(k_ell_kappa_oracle(2, 2, 30, cfg), rel=1e-5)


def test_j_zero_is_main_term():
    for ell, kappa, u in [(2, 1, 5.0), (3, 2, 12.0), (2, 4, 30.0)]:
        assert k_ell_kappa(ell, kappa, u, 0).value == k_ell_kappa_main(ell, kappa, u)


@pytest.mark.parametrize("ell,kappa,u", [(1, 1, 5), (2, 2, 5), (2, 1, 8), (3, 2, 9)])
def test_derivative_identity(ell, kappa, u):
    h = 1e-4 * u
    f = lambda v: k_ell_kappa(ell, kappa, v, 10).value
    fd = (f(u + h) - f(u - h)) / (2 * h)
    target = kappa * k_ell_kappa(ell, kappa - 1, u, 10).value
    assert fd == pytest.approx(target, rel=1e-4)


# ---------------------------------------------------------------- error behaviour


def test_error_decays_with_J(cfg):
    ref = k_ell_oracle(2, 100, cfg)
    devs = [abs(k_ell(2, 100, J).value - ref) for J in range(7)]
    for a, b in zip(devs, devs[1:]):
        if b > 1e-12:
            assert b <= 2 * a


def test_error_estimate_covers_calibration_grid(cfg):
    for ell in (2, 3):
        for u in (10, 20, 40, 80, 160):
            ref = k_ell_oracle(ell, u, cfg)
            for J in range(7):
                r = k_ell(ell, u, J)
                assert math.isfinite(r.error_estimate) and r.error_estimate >= 0
                assert abs(r.value - ref) <= r.error_estimate + 1e-13 * ref


def test_error_scale():
    assert error_scale(2, 1.0, 3) == 1.0
    assert error_scale(1, 10.0, 0) == pytest.approx((1 + math.log(10)) / 10)


# ---------------------------------------------------------------- rho


def test_rho_examples():
    for method in ("expansion", "oracle"):
        assert rho(0.5, method) == 1.0
        assert rho(2, method) == pytest.approx(1 - math.log(2), abs=1e-14)
        assert rho(3, method) == pytest.approx(0.0486084, abs=5e-8)


def test_rho_rejects_negative():
    with pytest.raises(DomainError):
        rho(-1.0)
    with pytest.raises(ValueError):
        rho(2.0, "nonsense")


@pytest.mark.parametrize("method", ["expansion", "oracle"])
def test_rho_positive_and_decreasing(method, cfg):
    grid = np.round(np.arange(1.0, 6.0 + 1e-9, 0.01), 10)
    vals = np.array([rho(u, method, cfg=cfg) for u in grid])
    assert np.all(vals > 0)
    assert np.all(np.diff(vals) < 0)


def test_rho_kappa_one_is_rho(cfg):
    for u in (0.3, 1.0, 1.7, 2.5, 4.2):
        assert rho_kappa(u, 1, "oracle", cfg=cfg) == rho(u, "oracle", cfg=cfg)
        assert rho_kappa(u, 1, "expansion") == rho(u, "expansion")


def test_rho_kappa_two_on_unit_interval():
    for u in (0.0, 0.25, 1.0):
        assert rho_kappa(u, 2) == u


def test_rho_kappa_two_at_one_and_a_half(cfg):
    expected = 1.5 - 2 * (1.5 * math.log(1.5) - 0.5)
    assert expected == pytest.approx(1.2836, abs=1e-4)
    assert rho_kappa(1.5, 2, "expansion") == pytest.approx(expected, rel=1e-14)
    assert rho_kappa(1.5, 2, "oracle", cfg=cfg) == pytest.approx(expected, rel=1e-10)


def test_rho_kappa_rejects_kappa_zero():
    with pytest.raises(DomainError):
        rho_kappa(2.0, 0)
