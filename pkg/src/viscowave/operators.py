"""Mode-wise projectors, derivatives, dealiasing and the frequency cutoff.

Conventions, fixed once for the whole package:

* gradient rows are velocity components, columns derivatives:
  ``grad(u)[..., i, j] = d_j u_i``
* tensor divergence contracts the column index:
  ``div_tensor(E)[..., i] = d_j E_{ij}``
* the solenoidal projector acts per mode as ``I - xi xi^T/|xi|^2`` and
  leaves the zero mode alone; the compressive projector multiplies from
  the right, ``E -> E (xi xi^T/|xi|^2)``, and maps the zero mode to 0.
* derivative multipliers drop the Nyquist plane (see ``Grid.xi_deriv``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import SpectralField, SpectralTensorField, SpectralVectorField
from .grid import Grid

__all__ = [
    "leray_project",
    "q_project",
    "grad",
    "div_tensor",
    "div_vector",
    "curl",
    "dealias",
    "divergence_error",
    "CutoffProfile",
    "split_low_high",
]


def leray_project(field: SpectralVectorField) -> SpectralVectorField:
    """Remove the compressive part of a vector field, mode by mode.

    Built from the same Nyquist-zeroed wavenumbers as the derivative
    operators, so div_vector of the result is exactly zero and real
    fields stay real (the full-xi direction is not even across the
    unpaired Nyquist plane).
    """
    g = field.grid
    xi = g.xi_deriv
    dot = np.einsum("...i,...i->...", field.coeff, xi)
    coeff = field.coeff - xi * (dot * g.inv_xi_deriv2)[..., None]
    return SpectralVectorField(g, coeff)


def q_project(field: SpectralTensorField) -> SpectralTensorField:
    """Right-multiply each mode by xi xi^T/|xi|^2 (zero mode -> 0).

    Same Nyquist-zeroed wavenumbers as leray_project.
    """
    g = field.grid
    xi = g.xi_deriv
    exi = np.einsum("...ij,...j->...i", field.coeff, xi)
    coeff = np.einsum("...i,...j->...ij", exi * g.inv_xi_deriv2[..., None], xi)
    return SpectralTensorField(g, coeff)


def grad(field: SpectralVectorField) -> SpectralTensorField:
    coeff = np.einsum("...i,...j->...ij", field.coeff, 1j * field.grid.xi_deriv)
    return SpectralTensorField(field.grid, coeff)


def div_tensor(field: SpectralTensorField) -> SpectralVectorField:
    coeff = np.einsum("...ij,...j->...i", field.coeff, 1j * field.grid.xi_deriv)
    return SpectralVectorField(field.grid, coeff)


def div_vector(field: SpectralVectorField) -> SpectralField:
    coeff = np.einsum("...i,...i->...", field.coeff, 1j * field.grid.xi_deriv)
    return SpectralField(field.grid, coeff)


def curl(field: SpectralVectorField) -> SpectralVectorField:
    xi = field.grid.xi_deriv
    coeff = 1j * np.cross(xi, field.coeff)
    return SpectralVectorField(field.grid, coeff)


def dealias(field: SpectralField) -> SpectralField:
    """Zero every mode with any |k_i| > n/3 (2/3 rule)."""
    mask = field.grid.dealias_mask
    coeff = field.coeff * mask.reshape(mask.shape + (1,) * len(field.comp_shape))
    return type(field)(field.grid, coeff)


def divergence_error(field: SpectralVectorField) -> float:
    """Worst mode |xi . uhat| / (|xi| max|uhat|).

    The gauge is the global coefficient scale, not the mode's own size:
    per-mode normalization would let pure roundoff at negligible modes
    dominate the report.
    """
    g = field.grid
    amp = np.max(np.sqrt(np.sum(np.abs(field.coeff) ** 2, axis=-1)))
    if amp == 0.0:
        return 0.0
    xi = g.xi_deriv
    norm = np.sqrt(np.sum(xi**2, axis=-1))
    dot = np.abs(np.einsum("...i,...i->...", field.coeff, xi))
    with np.errstate(invalid="ignore", divide="ignore"):
        ratio = np.where(norm > 0, dot / (norm * amp), 0.0)
    return float(np.max(ratio))


def _smooth_step(x: np.ndarray) -> np.ndarray:
    """C-infinity monotone ramp: 0 for x<=0, 1 for x>=1."""
    x = np.clip(x, 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        g = np.where(x > 0, np.exp(-1.0 / np.where(x > 0, x, 1.0)), 0.0)
        gc = np.where(x < 1, np.exp(-1.0 / np.where(x < 1, 1.0 - x, 1.0)), 0.0)
    return g / (g + gc)


@dataclass(frozen=True)
class CutoffProfile:
    """Smooth radial partition at the frequency threshold m1 = 1/mu.

    ``low`` is identically 1 up to m1/2, identically 0 from m1/sqrt(2),
    and monotone in between; ``high`` is its exact complement.
    """

    m1: float

    def __post_init__(self) -> None:
        if not self.m1 > 0:
            raise ValueError(f"m1 must be positive, got {self.m1}")

    @property
    def inner(self) -> float:
        return self.m1 / 2.0

    @property
    def outer(self) -> float:
        return self.m1 / np.sqrt(2.0)

    def low(self, rho: np.ndarray) -> np.ndarray:
        rho = np.asarray(rho, dtype=float)
        return _smooth_step((self.outer - rho) / (self.outer - self.inner))

    def high(self, rho: np.ndarray) -> np.ndarray:
        return 1.0 - self.low(rho)


def split_low_high(
    field: SpectralField, cutoff: CutoffProfile
) -> tuple[SpectralField, SpectralField]:
    """Exact partition of a field across the cutoff: low + high == field."""
    w = cutoff.low(field.grid.xi_norm)
    w = w.reshape(w.shape + (1,) * len(field.comp_shape))
    low = field.coeff * w
    return type(field)(field.grid, low), type(field)(field.grid, field.coeff - low)
