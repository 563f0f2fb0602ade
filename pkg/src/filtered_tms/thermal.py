"""Filtered two-mode squeezed thermal light at unit detection efficiency.

With mean thermal occupations (n_i, n_s) feeding the squeezer, the
covariance blocks depend on A = n_i + n_s + 1 and B = n_i - n_s:

    D_I = B + A cosh 2r,          D_S = -B + A cosh 2r,
    C11 = A K_f sinh 2r,          C12 = -B L_f sinh 2r.

Thermal population opens a lower entanglement cutoff in addition to the
filter-induced upper one; both cutoffs coincide with the SQL crossings of
the weight-optimized hybrid quadrature.  Detection efficiencies are fixed
at 1 here; lossy thermal states can be explored numerically by composing
``covariance`` with ``gaussian.apply_loss`` (no closed-form landmarks then).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .filters import IDENTICAL_FILTERS, OverlapFactors
from .gaussian import CovarianceBlocks

_DEN_LIMIT = 1e-12


@dataclass(frozen=True)
class ThermalParams:
    """Squeezing amplitude, thermal occupations and filter overlap."""

    r: float
    n_i: float = 0.0
    n_s: float = 0.0
    overlap: OverlapFactors = IDENTICAL_FILTERS

    def __post_init__(self):
        if not math.isfinite(self.r) or self.r < 0.0:
            raise ValueError(f"squeezing amplitude must be finite and >= 0, got {self.r}")
        for name, n in (("n_i", self.n_i), ("n_s", self.n_s)):
            if not math.isfinite(n) or n < 0.0:
                raise ValueError(f"{name} must be finite and >= 0, got {n}")

    @property
    def a(self) -> float:
        return self.n_i + self.n_s + 1.0

    @property
    def b(self) -> float:
        return self.n_i - self.n_s


@dataclass(frozen=True)
class ThermalCriticalPoints:
    """Entanglement window, squeezing window and maxima for thermal input.

    The entanglement fields delimit E_N > 0; the squeezing fields delimit
    the sub-SQL region of the *equal-weight* composite quadrature at the
    optimal phase (the weight-optimized quadrature shares the entanglement
    window instead).  ``has_window`` is False when no r is entangled, in
    which case the window fields are nan.  zeta is the squeezing angle.
    """

    r_lcf_en: float
    r_ucf_en: float
    r_max_en: float
    r_lcf_sq: float
    r_ucf_sq: float
    r_max_sq: float
    zeta: float
    has_window: bool = True

    @classmethod
    def empty(cls, zeta: float) -> "ThermalCriticalPoints":
        nan = math.nan
        return cls(nan, nan, nan, nan, nan, nan, zeta, has_window=False)


def covariance(p: ThermalParams) -> CovarianceBlocks:
    """Steady-state covariance blocks; reduces to the TMSV blocks at n = 0."""
    a, b = p.a, p.b
    ch, sh = math.cosh(2.0 * p.r), math.sinh(2.0 * p.r)
    return CovarianceBlocks(
        d_i=b + a * ch,
        d_s=-b + a * ch,
        c11=a * p.overlap.k_f * sh,
        c12=-b * p.overlap.l_f * sh,
    )


def squeezing_angle(p: ThermalParams) -> float:
    """zeta = arctan(B L_f / (A K_f)); zero for matched populations or L_f = 0."""
    return math.atan2(p.b * p.overlap.l_f, p.a * p.overlap.k_f)


def critical_points(p: ThermalParams) -> ThermalCriticalPoints:
    """Closed-form windows and maxima, with the identical-filter limit branch.

    The entanglement cutoffs solve cosh(2r) = (A -+ sqrt(rad)) / den with
    den = A^2 (1 - K_f^2) - B^2 L_f^2 and rad = A^2 - den (Q - B^2 + 1),
    Q = A^2 K_f^2 + B^2 L_f^2.  The lower cutoff is evaluated in the
    rationalized form (Q - B^2 + 1) / (A + sqrt(rad)), which is exact for
    every den and passes smoothly into the identical-filter limit
    cosh(2 r_lcf) = (A^2 - B^2 + 1) / (2A), where r_ucf diverges.
    A negative rad means no entanglement window at any r.
    """
    kf, lf = p.overlap.k_f, p.overlap.l_f
    if not 0.0 < kf <= 1.0:
        raise ValueError(f"critical points require K_f in (0, 1], got {kf}")
    a, b = p.a, p.b
    q = a**2 * kf**2 + b**2 * lf**2
    den = a**2 * (1.0 - kf**2) - b**2 * lf**2
    g = q - b**2 + 1.0
    zeta = math.atan2(b * lf, a * kf)

    if den < _DEN_LIMIT:
        # identical filters: upper cutoff diverges, lower cutoff stays finite
        ch_l = g / (2.0 * a)
        r_lcf = 0.5 * math.acosh(max(ch_l, 1.0))
        r_ucf = math.inf
        r_max_en = math.inf
        r_max_sq = math.inf
        r_lcf_sq, r_ucf_sq = _sq_window(a, q)
        return ThermalCriticalPoints(
            r_lcf_en=r_lcf, r_ucf_en=r_ucf, r_max_en=r_max_en,
            r_lcf_sq=r_lcf_sq, r_ucf_sq=r_ucf_sq, r_max_sq=r_max_sq,
            zeta=zeta,
        )

    rad = a**2 - den * g
    if rad < 0.0:
        return ThermalCriticalPoints.empty(zeta)
    root = math.sqrt(rad)
    ch_l = g / (a + root)
    ch_u = (a + root) / den
    if ch_u < 1.0:
        return ThermalCriticalPoints.empty(zeta)
    r_lcf = 0.5 * math.acosh(max(ch_l, 1.0))
    r_ucf = 0.5 * math.acosh(ch_u)

    # maximum of E_N(r), shared by the weight-optimized variance; a
    # non-empty window guarantees Q > B^2, the nan arm is defensive
    num = a**2 * (q - b**2)
    if num > 0.0:
        r_max_en = 0.5 * math.acosh(max(math.sqrt(num / (q * den)), 1.0))
    else:
        r_max_en = math.nan

    t_sq = math.sqrt(q) / a
    r_max_sq = 0.5 * math.atanh(t_sq) if t_sq < 1.0 else math.inf
    r_lcf_sq, r_ucf_sq = _sq_window(a, q)

    return ThermalCriticalPoints(
        r_lcf_en=r_lcf, r_ucf_en=r_ucf, r_max_en=r_max_en,
        r_lcf_sq=r_lcf_sq, r_ucf_sq=r_ucf_sq, r_max_sq=r_max_sq,
        zeta=zeta,
    )


def _sq_window(a: float, q: float) -> tuple[float, float]:
    """SQL crossings of the equal-weight composite quadrature.

    tanh(r) = (sqrt(Q) -+ sqrt(Q - A^2 + 1)) / (A + 1); empty (nan, nan)
    when the variance never dips below the SQL.
    """
    disc = q - a**2 + 1.0
    if disc < 0.0:
        return math.nan, math.nan
    root_q, root_d = math.sqrt(q), math.sqrt(disc)
    t_l = (root_q - root_d) / (a + 1.0)
    t_u = (root_q + root_d) / (a + 1.0)
    r_l = math.atanh(min(max(t_l, 0.0), 1.0)) if t_l < 1.0 else math.inf
    r_u = math.atanh(t_u) if t_u < 1.0 else math.inf
    return r_l, r_u


def weight_ratio(p: ThermalParams) -> float:
    """Optimal weight ratio mu_i/mu_s; approaches 1 as r grows or as B -> 0.

    (sqrt(sinh^2 2r (A^2 K_f^2 + B^2 L_f^2) + B^2) - B)
        / (sinh 2r sqrt(A^2 K_f^2 + B^2 L_f^2))
    """
    if p.r <= 0.0:
        raise ValueError("weight ratio undefined at r = 0 (uncorrelated state)")
    a, b = p.a, p.b
    q = a**2 * p.overlap.k_f**2 + b**2 * p.overlap.l_f**2
    if q <= 0.0:
        raise ValueError("weight ratio requires a non-vanishing overlap")
    sh = math.sinh(2.0 * p.r)
    return (math.sqrt(sh**2 * q + b**2) - b) / (sh * math.sqrt(q))


def optimized_squeezing_closed(p: ThermalParams) -> float:
    """Minimal hybrid-quadrature variance over phases and weights.

    A cosh 2r - sqrt(sinh^2 2r (A^2 K_f^2 + B^2 L_f^2) + B^2); dips below
    the SQL exactly on the entanglement window (r_lcf_en, r_ucf_en).
    """
    a, b = p.a, p.b
    q = a**2 * p.overlap.k_f**2 + b**2 * p.overlap.l_f**2
    sh = math.sinh(2.0 * p.r)
    return a * math.cosh(2.0 * p.r) - math.sqrt(sh**2 * q + b**2)
