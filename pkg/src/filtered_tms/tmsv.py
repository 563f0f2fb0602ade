"""Filtered two-mode squeezed vacuum: covariance and closed-form landmarks.

A two-mode squeezed vacuum of squeezing amplitude r, detected with optical
quantum efficiencies (eta_i, eta_s) through a filter pair of overlap K_f,
has the steady-state covariance blocks

    D_I = 1 + 2 eta_i sinh^2 r,      D_S = 1 + 2 eta_s sinh^2 r,
    C11 = sqrt(eta_i eta_s) K_f sinh 2r,   C12 = 0.

The entanglement window, its maximum, and the optimized two-mode squeezing
all have closed forms collected here; each is verified against numerical
extremization in the test suite.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .filters import IDENTICAL_FILTERS, OverlapFactors
from .gaussian import CovarianceBlocks


@dataclass(frozen=True)
class TmsvParams:
    """Squeezing amplitude, detection efficiencies and filter overlap.

    The vacuum input makes C12 independent of L_f, so only K_f enters the
    covariance; the overlap's l_f is carried along but has no effect.
    """

    r: float
    eta_i: float = 1.0
    eta_s: float = 1.0
    overlap: OverlapFactors = IDENTICAL_FILTERS

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0.0:
            raise ValueError(f"squeezing amplitude must be finite and >= 0, got {self.r}")
        for name, eta in (("eta_i", self.eta_i), ("eta_s", self.eta_s)):
            if not 0.0 < eta <= 1.0:
                raise ValueError(f"{name} must lie in (0, 1], got {eta}")


@dataclass(frozen=True)
class TmsvCriticalPoints:
    """Squeezing-amplitude landmarks of the entanglement and squeezing curves.

    r_ucf_en: upper cutoff of entanglement, tanh(r) = K_f (eta-independent).
    r_max_en: argmax of E_N(r), also the argmin of the optimized variance.
    r_max_sq: argmin of the equal-weight quadrature variance,
              tanh(2r) = 2 sqrt(eta_i eta_s) K_f / (eta_i + eta_s).
    r_ucf_sq: SQL crossing of the equal-weight variance, = 2 r_max_sq.

    K_f = 1 landmarks that diverge are reported as math.inf.
    """

    r_ucf_en: float
    r_max_en: float
    r_max_sq: float
    r_ucf_sq: float


def covariance(p: TmsvParams) -> CovarianceBlocks:
    """Steady-state covariance blocks of the lossy filtered TMSV."""
    s2 = math.sinh(p.r) ** 2
    return CovarianceBlocks(
        d_i=1.0 + 2.0 * p.eta_i * s2,
        d_s=1.0 + 2.0 * p.eta_s * s2,
        c11=math.sqrt(p.eta_i * p.eta_s) * p.overlap.k_f * math.sinh(2.0 * p.r),
        c12=0.0,
    )


def critical_points(p: TmsvParams) -> TmsvCriticalPoints:
    """Closed-form entanglement/squeezing landmarks for 0 < K_f <= 1."""
    kf = p.overlap.k_f
    if not 0.0 < kf <= 1.0:
        raise ValueError(f"critical points require K_f in (0, 1], got {kf}")
    ei, es = p.eta_i, p.eta_s

    # unbounded landmarks at K_f = 1 branch on the exact value so rounding
    # can never turn them into large finite floats
    r_ucf_en = math.atanh(kf) if kf < 1.0 else math.inf

    if kf == 1.0:
        # argmax of E_N(r); E_N = 2r grows without bound for matched filters
        r_max_en = math.inf
    else:
        g = math.sqrt((1.0 - kf**2) * ei * es)
        w = 2.0 * ei * es + (ei + es) * g
        t = math.sqrt(4.0 * ei * es * kf**2 * (w - ei * es * kf**2)) / w
        r_max_en = 0.5 * math.atanh(t) if t < 1.0 else math.inf

    if kf == 1.0 and ei == es:
        r_max_sq = math.inf
    else:
        t_sq = 2.0 * math.sqrt(ei * es) * kf / (ei + es)
        r_max_sq = 0.5 * math.atanh(t_sq) if t_sq < 1.0 else math.inf

    return TmsvCriticalPoints(
        r_ucf_en=r_ucf_en,
        r_max_en=r_max_en,
        r_max_sq=r_max_sq,
        r_ucf_sq=2.0 * r_max_sq,
    )


def weight_ratio(p: TmsvParams) -> float:
    """Optimal weight ratio mu_i/mu_s of the hybrid quadrature.

    Evaluates to sqrt(eta_s/eta_i) at the entanglement cutoff tanh r = K_f.
    """
    if p.r <= 0.0:
        raise ValueError("weight ratio undefined at r = 0 (uncorrelated state)")
    kf = p.overlap.k_f
    if kf <= 0.0:
        raise ValueError(f"weight ratio requires K_f > 0, got {kf}")
    ei, es = p.eta_i, p.eta_s
    th = math.tanh(p.r)
    num = math.sqrt(4.0 * ei * es * kf**2 + (ei - es) ** 2 * th**2) + (es - ei) * th
    return num / (2.0 * kf * math.sqrt(ei * es))


def optimized_squeezing_closed(p: TmsvParams) -> float:
    """Minimal hybrid-quadrature variance at the optimal phase and weights.

    1 + (eta_i + eta_s) sinh^2 r
      - sinh r * sqrt(4 eta_i eta_s K_f^2 cosh^2 r + (eta_i - eta_s)^2 sinh^2 r);
    drops below 1 exactly on 0 < r < r_ucf_en.
    """
    ei, es, kf = p.eta_i, p.eta_s, p.overlap.k_f
    s, c = math.sinh(p.r), math.cosh(p.r)
    return 1.0 + (ei + es) * s**2 - s * math.sqrt(
        4.0 * ei * es * kf**2 * c**2 + (ei - es) ** 2 * s**2
    )
