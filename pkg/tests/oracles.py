"""Independent numerical oracles used across the test suite.

Every routine here avoids the closed forms under test: symplectic spectra
come from an eigenvalue decomposition, extrema from golden-section search,
roots from bisection, and variance optima from grid-plus-golden scans of
the raw quadratic form.
"""

import math

import numpy as np

from filtered_tms.gaussian import CovarianceBlocks, CovarianceMatrix

_J = np.array([[0.0, 1.0], [-1.0, 0.0]])
_OMEGA = np.block([[_J, np.zeros((2, 2))], [np.zeros((2, 2)), _J]])
_PT = np.diag([1.0, 1.0, 1.0, -1.0])


def nu_min_eigen(v: CovarianceMatrix, transposed: bool = True) -> float:
    """Smallest symplectic eigenvalue from the spectrum of i Omega V."""
    m = _PT @ v.entries @ _PT if transposed else v.entries
    eigs = np.linalg.eigvals(1j * _OMEGA @ m)
    return float(np.min(np.abs(eigs)))


def golden_min(f, a: float, b: float, tol: float = 1e-10) -> float:
    """Golden-section argmin of a unimodal scalar function on [a, b]."""
    phi = (math.sqrt(5.0) - 1.0) / 2.0
    x1 = b - phi * (b - a)
    x2 = a + phi * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 < f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - phi * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + phi * (b - a)
            f2 = f(x2)
    return 0.5 * (a + b)


def refine_parabolic(f, x0: float, h: float = 1e-4) -> float:
    """One parabolic-vertex refinement of an argmin estimate.

    Resolves the argmin of a smooth objective well below the sqrt(eps)
    limit of comparison-based searches.
    """
    fm, f0, fp = f(x0 - h), f(x0), f(x0 + h)
    denom = fm - 2.0 * f0 + fp
    if denom <= 0.0:
        return x0
    return x0 + 0.5 * h * (fm - fp) / denom


def bisect_root(f, a: float, b: float, tol: float = 1e-12) -> float:
    """Bisection root of a sign-changing scalar function on [a, b]."""
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise ValueError(f"no sign change on [{a}, {b}]: f(a)={fa}, f(b)={fb}")
    while b - a > tol:
        mid = 0.5 * (a + b)
        fm = f(mid)
        if fm == 0.0:
            return mid
        if fa * fm < 0.0:
            b = mid
        else:
            a, fa = mid, fm
    return 0.5 * (a + b)


def min_variance_numeric(blocks: CovarianceBlocks, n_phi: int = 1024):
    """(min variance, argmin phase sum, argmin ratio) by scan plus golden.

    A phase grid with a golden-section ratio search per phase locates the
    basin; a nested golden refinement polishes both coordinates.
    """
    from filtered_tms.gaussian import build_covariance

    v = build_covariance(blocks).entries
    d_i, d_s = 2.0 * v[0, 0], 2.0 * v[2, 2]
    c11, c12 = 2.0 * v[0, 2], 2.0 * v[0, 3]

    def var(phi, rho):
        cross = math.cos(phi) * c11 + math.sin(phi) * c12
        return (rho * rho * d_i + d_s + 2.0 * rho * cross) / (rho * rho + 1.0)

    def best_rho(phi):
        return golden_min(lambda lr: var(phi, math.exp(lr)), -14.0, 14.0, 1e-12)

    phis = np.linspace(0.0, 2.0 * math.pi, n_phi, endpoint=False)
    coarse = [var(p, math.exp(best_rho(p))) for p in phis]
    k = int(np.argmin(coarse))
    lo, hi = phis[k] - 2.0 * (phis[1] - phis[0]), phis[k] + 2.0 * (phis[1] - phis[0])
    phi_star = golden_min(lambda p: var(p, math.exp(best_rho(p))), lo, hi, 1e-10)
    phi_star = refine_parabolic(lambda p: var(p, math.exp(best_rho(p))), phi_star)
    log_rho = best_rho(phi_star)
    for h in (1e-4, 1e-6):
        log_rho = refine_parabolic(lambda lr: var(phi_star, math.exp(lr)), log_rho, h=h)
    rho_star = math.exp(log_rho)
    return var(phi_star, rho_star), phi_star, rho_star


def random_tmsv_params(rng: np.random.Generator):
    from filtered_tms.filters import OverlapFactors
    from filtered_tms.tmsv import TmsvParams

    return TmsvParams(
        r=float(rng.uniform(0.05, 2.0)),
        eta_i=float(rng.uniform(0.3, 1.0)),
        eta_s=float(rng.uniform(0.3, 1.0)),
        overlap=OverlapFactors(float(rng.uniform(0.3, 1.0)), 0.0),
    )


def random_thermal_params(rng: np.random.Generator, require_window: bool = False):
    from filtered_tms import thermal
    from filtered_tms.filters import OverlapFactors

    while True:
        k_f = float(rng.uniform(0.6, 0.999))
        l_max = math.sqrt(1.0 - k_f**2)
        p = thermal.ThermalParams(
            r=float(rng.uniform(0.05, 2.0)),
            n_i=float(rng.uniform(0.0, 1.5)),
            n_s=float(rng.uniform(0.0, 1.5)),
            overlap=OverlapFactors(k_f, float(rng.uniform(0.0, 0.9 * l_max))),
        )
        if not require_window:
            return p
        cp = thermal.critical_points(p)
        if cp.has_window and math.isfinite(cp.r_ucf_en):
            return p
