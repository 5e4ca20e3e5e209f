"""Reference values computed with mpmath, independent of the package."""

import mpmath


def k2_closed_form(u):
    """K_2(u) = (log u log(u-1) - Li2(1 - 1/u) + Li2(1/u)) / 2, for u >= 2."""
    with mpmath.workdps(30):
        return float(_k2(mpmath.mpf(u)))


def _k2(v):
    return (mpmath.log(v) * mpmath.log(v - 1) - mpmath.polylog(2, 1 - 1 / v) + mpmath.polylog(2, 1 / v)) / 2


def k3_mpmath(u):
    """K_3(u) = (1/3) int_1^{u-2} K_2(u-t) dt/t over the closed form of K_2."""
    with mpmath.workdps(20):
        top = mpmath.mpf(u) - 2
        pts = [1, 2, top] if top > 2 else [1, top]
        return float(mpmath.quad(lambda t: _k2(u - t) / t, pts) / 3)


def dickman_gf_coeffs(rmax, kappa=0):
    """Taylor coefficients of exp(gamma z) / Gamma(kappa + 1 - z)."""
    with mpmath.workdps(40):
        c = mpmath.taylor(lambda z: mpmath.exp(mpmath.euler * z) / mpmath.gamma(kappa + 1 - z), 0, rmax)
        return [float(v) for v in c]
