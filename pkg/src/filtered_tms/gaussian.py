"""State-independent machinery for two-mode Gaussian states.

All states handled here are zero-mean and specified by a 4x4 covariance
matrix over the quadrature vector (X_I, Y_I, X_S, Y_S), normalized so the
vacuum matrix is I/2.  All covariances handled here carry a restricted
block structure,

    V = 1/2 [[D_I, 0,   C11,  C12 ],
             [0,   D_I, C12, -C11 ],
             [C11, C12, D_S,  0   ],
             [C12, -C11, 0,   D_S ]],

which makes the symplectic spectrum, purity and quadrature optimization
available in closed form.  Every function is pure; inputs are immutable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

_BLOCK_TOL = 1e-9
_SYMPLECTIC_FLOOR = 0.5 - 1e-10


@dataclass(frozen=True)
class CovarianceBlocks:
    """Independent elements (D_I, D_S, C11, C12) of the block covariance.

    Model-generated blocks satisfy d_i, d_s >= 1 (vacuum floor) and assemble
    into a physical matrix; ``build_covariance`` enforces both.
    """

    d_i: float
    d_s: float
    c11: float
    c12: float

    def __post_init__(self):
        vals = (self.d_i, self.d_s, self.c11, self.c12)
        if not all(math.isfinite(v) for v in vals):
            raise ValueError(f"covariance blocks must be finite, got {vals}")

    def correlation_strength(self) -> float:
        """sqrt(C11**2 + C12**2), the magnitude of the cross-mode coupling."""
        return math.hypot(self.c11, self.c12)


@dataclass(frozen=True)
class QuadratureSpec:
    """Phases and positive weights of a two-party hybrid quadrature.

    The variance of the hybrid quadrature is invariant under joint
    rescaling of (mu_i, mu_s); only phi_i + phi_s and mu_i/mu_s matter.
    """

    phi_i: float
    phi_s: float
    mu_i: float = 1.0
    mu_s: float = 1.0

    def __post_init__(self):
        if not all(math.isfinite(v) for v in (self.phi_i, self.phi_s, self.mu_i, self.mu_s)):
            raise ValueError("quadrature parameters must be finite")
        if self.mu_i <= 0 or self.mu_s <= 0:
            raise ValueError("quadrature weights must be strictly positive")


@dataclass(frozen=True)
class EntanglementResult:
    """Smallest partial-transpose symplectic eigenvalue and log-negativity."""

    nu_minus: float
    e_n: float


class CovarianceMatrix:
    """Immutable 4x4 covariance matrix with the restricted block structure."""

    __slots__ = ("entries",)

    def __init__(self, entries: np.ndarray):
        m = np.array(entries, dtype=float)
        if m.shape != (4, 4):
            raise ValueError(f"covariance matrix must be 4x4, got {m.shape}")
        if not np.all(np.isfinite(m)):
            raise ValueError("covariance matrix must be finite")
        if np.max(np.abs(m - m.T)) > 1e-12:
            raise ValueError("covariance matrix must be symmetric to 1e-12")
        if np.any(np.linalg.eigvalsh(m) <= 0.0):
            raise ValueError("covariance matrix must be positive definite")
        _check_block_structure(m)
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    def __setattr__(self, name, value):
        raise AttributeError("CovarianceMatrix is immutable")

    def __repr__(self):
        b = self.blocks()
        return (
            f"CovarianceMatrix(d_i={b.d_i:.6g}, d_s={b.d_s:.6g}, "
            f"c11={b.c11:.6g}, c12={b.c12:.6g})"
        )

    def blocks(self) -> CovarianceBlocks:
        m = self.entries
        return CovarianceBlocks(2.0 * m[0, 0], 2.0 * m[2, 2], 2.0 * m[0, 2], 2.0 * m[0, 3])

    def det(self) -> float:
        b = self.blocks()
        return (b.d_i * b.d_s - b.c11**2 - b.c12**2) ** 2 / 16.0


def _check_block_structure(m: np.ndarray) -> None:
    d_i, d_s = 2.0 * m[0, 0], 2.0 * m[2, 2]
    c11, c12 = 2.0 * m[0, 2], 2.0 * m[0, 3]
    ref = 0.5 * np.array(
        [
            [d_i, 0.0, c11, c12],
            [0.0, d_i, c12, -c11],
            [c11, c12, d_s, 0.0],
            [c12, -c11, 0.0, d_s],
        ]
    )
    scale = max(1.0, float(np.max(np.abs(m))))
    if np.max(np.abs(m - ref)) > _BLOCK_TOL * scale:
        raise ValueError("matrix does not have the restricted block structure")


def _sigma(b: CovarianceBlocks, transposed: bool) -> float:
    """det V_I + det V_S -+ 2 det V_corr for the (partially transposed) state."""
    det_corr = -(b.c11**2 + b.c12**2) / 4.0
    sign = -2.0 if transposed else 2.0
    return b.d_i**2 / 4.0 + b.d_s**2 / 4.0 + sign * det_corr


def _nu_minus(b: CovarianceBlocks, transposed: bool) -> float:
    sigma = _sigma(b, transposed)
    det_v = (b.d_i * b.d_s - b.c11**2 - b.c12**2) ** 2 / 16.0
    rad = sigma**2 - 4.0 * det_v
    if rad < -1e-10:
        raise ValueError(f"non-physical covariance: Sigma^2 - 4 det V = {rad:g} < 0")
    # rationalized minus branch: exact where the direct subtraction
    # sigma - sqrt(rad) cancels catastrophically at large squeezing
    nusq = 2.0 * det_v / (sigma + math.sqrt(max(rad, 0.0)))
    if nusq <= 0.0:
        raise ValueError("non-physical covariance: vanishing symplectic eigenvalue")
    return math.sqrt(nusq)


def check_blocks(blocks: CovarianceBlocks, tol: float = 1e-10) -> None:
    """Reject blocks below the vacuum floor or the symplectic floor 1/2."""
    if blocks.d_i < 1.0 - tol or blocks.d_s < 1.0 - tol:
        raise ValueError(
            f"diagonal blocks below the vacuum floor: d_i={blocks.d_i}, d_s={blocks.d_s}"
        )
    if _nu_minus(blocks, transposed=False) < _SYMPLECTIC_FLOOR:
        raise ValueError("blocks assemble to a non-physical covariance matrix")


def build_covariance(blocks: CovarianceBlocks) -> CovarianceMatrix:
    """Assemble the 4x4 covariance matrix (global 1/2 prefactor included)."""
    check_blocks(blocks)
    b = blocks
    m = 0.5 * np.array(
        [
            [b.d_i, 0.0, b.c11, b.c12],
            [0.0, b.d_i, b.c12, -b.c11],
            [b.c11, b.c12, b.d_s, 0.0],
            [b.c12, -b.c11, 0.0, b.d_s],
        ]
    )
    return CovarianceMatrix(m)


def log_negativity(v: CovarianceMatrix) -> EntanglementResult:
    """Logarithmic negativity E_N = max(0, -ln 2 nu-) of a two-mode state.

    nu- is the smaller symplectic eigenvalue of the partially transposed
    covariance, taken from the minus branch of
    nu**2 = (Sigma - sqrt(Sigma**2 - 4 det V)) / 2; the minus branch is the
    one that reproduces E_N = 2r for the ideal two-mode squeezed vacuum.
    """
    nu = _nu_minus(v.blocks(), transposed=True)
    return EntanglementResult(nu_minus=nu, e_n=max(0.0, -math.log(2.0 * nu)))


def log_negativity_blocks(blocks: CovarianceBlocks) -> EntanglementResult:
    """log_negativity without assembling the matrix; used by sweeps."""
    nu = _nu_minus(blocks, transposed=True)
    return EntanglementResult(nu_minus=nu, e_n=max(0.0, -math.log(2.0 * nu)))


def purity(v: CovarianceMatrix) -> float:
    """Tr[rho^2] = 1 / |C11^2 + C12^2 - D_I D_S| for block-structured states.

    Cross-checked internally against the general Gaussian result
    1/(4 sqrt(det V)); a disagreement beyond 1e-10 means the block
    structure was violated.
    """
    b = v.blocks()
    denom = abs(b.c11**2 + b.c12**2 - b.d_i * b.d_s)
    if denom < 1e-14:
        raise ValueError("degenerate covariance: |C11^2 + C12^2 - D_I D_S| ~ 0")
    closed = 1.0 / denom
    general = 1.0 / (4.0 * math.sqrt(float(np.linalg.det(v.entries))))
    if abs(closed - general) > 1e-10 * max(1.0, closed):
        raise ValueError(
            f"purity cross-check failed: closed form {closed:.15g} vs 1/(4 sqrt(det V)) {general:.15g}"
        )
    return closed


def wigner(v: CovarianceMatrix, u) -> float:
    """Gaussian Wigner density W(u) = exp(-u^T V^-1 u / 2) / (pi^2 sqrt(det V)).

    With the vacuum normalization V = I/2 this gives W(0) = 4/pi^2 and the
    purity integral Tr[rho^2] = (pi^2/4) \\int W^2.
    """
    u = np.asarray(u, dtype=float)
    if u.shape != (4,):
        raise ValueError(f"phase-space point must be a 4-vector, got shape {u.shape}")
    det = float(np.linalg.det(v.entries))
    if det < 1e-300:
        raise ValueError("singular covariance matrix")
    sol = np.linalg.solve(v.entries, u)
    return float(math.exp(-0.5 * float(u @ sol)) / (math.pi**2 * math.sqrt(det)))


def apply_loss(v: CovarianceMatrix, eta_i: float, eta_s: float) -> CovarianceMatrix:
    """Beamsplitter loss map V -> E V E + (I - E^2)/2, E = diag over modes.

    Frequency-flat loss commutes with the filter kernel, so applying this to
    lossless filtered blocks reproduces the lossy steady-state blocks exactly.
    """
    for name, eta in (("eta_i", eta_i), ("eta_s", eta_s)):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"{name} must lie in [0, 1], got {eta}")
    e = np.diag([math.sqrt(eta_i)] * 2 + [math.sqrt(eta_s)] * 2)
    m = e @ v.entries @ e + (np.eye(4) - e @ e) / 2.0
    return CovarianceMatrix(m)


def quadrature_variance(v: CovarianceMatrix, q: QuadratureSpec) -> float:
    """Variance of the weighted two-party quadrature, SQL-normalized.

    Equals [mu_i^2 D_I + mu_s^2 D_S + 2 mu_i mu_s (cos(phi_i + phi_s) C11
    + sin(phi_i + phi_s) C12)] / (mu_i^2 + mu_s^2); vacuum gives exactly 1
    for every spec.
    """
    c = np.array(
        [
            q.mu_i * math.cos(q.phi_i),
            q.mu_i * math.sin(q.phi_i),
            q.mu_s * math.cos(q.phi_s),
            q.mu_s * math.sin(q.phi_s),
        ]
    )
    return float(2.0 * c @ v.entries @ c / (q.mu_i**2 + q.mu_s**2))


def squeezing_angle(blocks: CovarianceBlocks) -> float:
    """Angle zeta in (-pi/2, pi/2] such that phi_i + phi_s = pi - zeta is the
    maximally squeezed phase; zeta = 0 when C12 = 0."""
    if blocks.c11 == 0.0 and blocks.c12 == 0.0:
        return 0.0
    z = math.atan2(-blocks.c12, blocks.c11)
    if z > math.pi / 2.0:
        z -= math.pi
    elif z <= -math.pi / 2.0:
        z += math.pi
    return z


def optimal_phase_sum(blocks: CovarianceBlocks) -> float:
    """The phase sum phi_i + phi_s minimizing the hybrid-quadrature variance."""
    return math.pi - math.atan2(-blocks.c12, blocks.c11)


def optimal_weight_ratio(blocks: CovarianceBlocks) -> float:
    """Weight ratio mu_i/mu_s minimizing the variance at the optimal phase.

    (D_S - D_I + sqrt(4 C11^2 + 4 C12^2 + (D_I - D_S)^2)) / (2 sqrt(C11^2 + C12^2))
    """
    r = blocks.correlation_strength()
    if r == 0.0:
        raise ValueError("uncorrelated state: weight ratio undefined for C11 = C12 = 0")
    diff = blocks.d_s - blocks.d_i
    return (diff + math.hypot(diff, 2.0 * r)) / (2.0 * r)


def optimized_squeezing(blocks: CovarianceBlocks) -> float:
    """Minimal hybrid-quadrature variance over phases and weights.

    (D_I + D_S - sqrt(4 C11^2 + 4 C12^2 + (D_I - D_S)^2)) / 2; below 1
    exactly when the state is two-mode squeezed beyond the SQL.
    """
    b = blocks
    return 0.5 * (
        b.d_i + b.d_s - math.hypot(b.d_i - b.d_s, 2.0 * b.correlation_strength())
    )
