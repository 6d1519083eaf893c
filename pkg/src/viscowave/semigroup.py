"""Exact mode-wise solution operator of the coupled velocity/strain system.

Per mode xi the linearized dynamics reduce to the damped oscillator

    y'' + mu |xi|^2 y' + |xi|^2 y = 0

whose characteristic roots lam1 (plus branch) and lam2 drive three scalar
amplitudes:

    A(t) = (e^{lam1 t} - e^{lam2 t}) / (lam1 - lam2)    strain<->velocity
    B(t) = dA/dt                                        velocity persistence
    C(t) = B + mu |xi|^2 A                              strain persistence

A is the oscillator impulse response, C its free response; all three are
real for real |xi| even though intermediates are complex.  When the two
roots collide (|xi| = 2/mu) the formulas switch to their confluent limits.

The full propagator acts block-wise on a divergence-free velocity uhat and
a strain tensor Ehat:

    uhat(t) = B uhat0 + A P (i Ehat0 xi)
    Ehat(t) = i A uhat0 xi^T + C W + (Ehat0 - W),  W = (P Ehat0 xi) xi^T/|xi|^2

with P = I - xi xi^T/|xi|^2.  Only the rank-one "wave channel" W of the
strain moves; its complement is frozen.  The zero mode is left alone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpectralTensorField, SpectralVectorField
from .grid import Grid
from .operators import divergence_error

__all__ = [
    "CONFLUENT_EPS",
    "EigenPair",
    "Amplitudes",
    "eigenpair",
    "amplitudes",
    "wave_form_B",
    "propagate_exact",
]

# relative root-gap threshold below which the confluent formulas take over
CONFLUENT_EPS = 1e-6


@dataclass(frozen=True)
class EigenPair:
    """Characteristic roots of one (or many) modes; lam1 carries the + branch."""

    lam1: np.ndarray
    lam2: np.ndarray
    discriminant: np.ndarray


@dataclass(frozen=True)
class Amplitudes:
    """The three propagator amplitudes evaluated at a fixed time."""

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray


def eigenpair(xi2: np.ndarray | float, mu: float) -> EigenPair:
    """Roots of lam^2 + mu*xi2*lam + xi2 = 0, vectorized over xi2."""
    if mu <= 0:
        raise ValueError(f"mu must be positive, got {mu}")
    xi2 = np.asarray(xi2, dtype=float)
    if np.any(xi2 < 0):
        raise ValueError("xi2 must be nonnegative")
    disc = (mu * xi2) ** 2 - 4.0 * xi2
    sq = np.sqrt(disc.astype(complex))
    lam1 = 0.5 * (-mu * xi2 + sq)
    lam2 = 0.5 * (-mu * xi2 - sq)
    return EigenPair(lam1, lam2, disc)


def amplitudes(xi2: np.ndarray | float, mu: float, t: float) -> Amplitudes:
    """Evaluate A, B, C at time t >= 0 with a confluent-safe branch switch."""
    if t < 0:
        raise ValueError(f"t must be nonnegative, got {t}")
    pair = eigenpair(xi2, mu)
    l1, l2 = pair.lam1, pair.lam2
    gap = l1 - l2
    confluent = np.abs(gap) < CONFLUENT_EPS * np.maximum(1.0, np.abs(l1))

    safe_gap = np.where(confluent, 1.0, gap)
    e1 = np.exp(l1 * t)
    e2 = np.exp(l2 * t)
    a = (e1 - e2) / safe_gap
    b = (l1 * e1 - l2 * e2) / safe_gap
    c = (l1 * e2 - l2 * e1) / safe_gap

    lam = 0.5 * (l1 + l2)  # == -mu*xi2/2
    ec = np.exp(lam * t)
    a = np.where(confluent, t * ec, a)
    b = np.where(confluent, (1.0 + lam * t) * ec, b)
    c = np.where(confluent, (1.0 - lam * t) * ec, c)
    return Amplitudes(a, b, c)


def wave_form_B(xi2: np.ndarray | float, mu: float, t: float) -> np.ndarray:
    """B via the explicit damped-cosine form, oscillatory modes only.

    Independent of :func:`amplitudes` (cos/sin route instead of complex
    exponentials); valid where mu^2 * xi2 < 4.
    """
    xi2 = np.asarray(xi2, dtype=float)
    if np.any(mu * mu * xi2 >= 4.0):
        raise ValueError("wave_form_B requires mu^2 * xi2 < 4 (oscillatory regime)")
    rho = np.sqrt(xi2)
    b = 0.5 * rho * np.sqrt(4.0 - mu * mu * xi2)
    # sin(b t)/b via sinc to stay finite as b -> 0
    sin_over_b = t * np.sinc(b * t / np.pi)
    return np.exp(-0.5 * mu * xi2 * t) * (
        np.cos(b * t) - 0.5 * mu * xi2 * sin_over_b
    )


def _block_apply(
    grid: Grid,
    amps: Amplitudes,
    u_coeff: np.ndarray,
    e_coeff: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Apply the block propagator to raw coefficient arrays."""
    xi = grid.xi
    inv2 = grid.inv_xi2
    a = amps.A[..., None]
    b = amps.B[..., None]

    exi = np.einsum("...ij,...j->...i", e_coeff, xi)
    # solenoidal part of (Ehat xi): the forcing seen by the velocity
    p_exi = exi - xi * (np.einsum("...i,...i->...", exi, xi) * inv2)[..., None]
    u_new = b * u_coeff + 1j * a * p_exi
    w = np.einsum("...i,...j->...ij", p_exi * inv2[..., None], xi)
    e_new = (
        e_coeff
        + (amps.C - 1.0)[..., None, None] * w
        + 1j * a[..., None] * np.einsum("...i,...j->...ij", u_coeff, xi)
    )
    return u_new, e_new


def propagate_exact(
    u: SpectralVectorField,
    e: SpectralTensorField,
    mu: float,
    t: float,
    *,
    div_tol: float = 1e-8,
) -> tuple[SpectralVectorField, SpectralTensorField]:
    """Advance (u, E) by time t under the linearized dynamics, exactly.

    The closed form assumes xi . uhat = 0; inputs violating that beyond
    ``div_tol`` are rejected.
    """
    if u.grid is not e.grid and u.grid != e.grid:
        raise ValueError("velocity and strain live on different grids")
    err = divergence_error(u)
    if err > div_tol:
        raise ValueError(
            f"velocity is not divergence-free: residual {err:.3e} > {div_tol:.1e}"
        )
    amps = amplitudes(u.grid.xi2, mu, t)
    u_new, e_new = _block_apply(u.grid, amps, u.coeff, e.coeff)
    return SpectralVectorField(u.grid, u_new), SpectralTensorField(u.grid, e_new)
