"""Grid norms, scale-weighted functionals, and power-law decay fits.

Physical LP norms use the quadrature weight (length/n)^3 per grid point;
spectral sums use the matching Parseval weight length^3/n^6.  Vector and
tensor fields are reduced pointwise to their Euclidean / Frobenius
magnitude before the norm is taken.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fields import SpectralField, to_physical
from .grid import Grid

__all__ = [
    "lp_norm_grid",
    "derivative_norm",
    "sobolev_norm",
    "negative_sobolev_norm",
    "besov_norm",
    "energy_functional",
    "energy_cross_bound",
    "DecayFitResult",
    "NormRecord",
    "fit_decay",
]


def _magnitude(arr: np.ndarray, comp_ndim: int) -> np.ndarray:
    if comp_ndim == 0:
        return np.abs(arr)
    axes = tuple(range(arr.ndim - comp_ndim, arr.ndim))
    return np.sqrt(np.sum(arr**2, axis=axes))


def lp_norm_grid(field: SpectralField | np.ndarray, p: float, grid: Grid | None = None) -> float:
    """L^p norm over the box; ``p=inf`` takes the grid max of the magnitude."""
    if isinstance(field, SpectralField):
        grid = field.grid
        phys = to_physical(field)
        comp_ndim = len(field.comp_shape)
    else:
        if grid is None:
            raise ValueError("grid is required when passing a raw array")
        phys = field
        comp_ndim = phys.ndim - 3
    mag = _magnitude(phys, comp_ndim)
    if np.isinf(p):
        return float(np.max(mag))
    if p <= 0:
        raise ValueError(f"p must be positive, got {p}")
    return float((np.sum(mag**p) * grid.cell_volume) ** (1.0 / p))


def _mode_mass2(field: SpectralField) -> np.ndarray:
    """Per-mode squared magnitude summed over components."""
    comp_axes = tuple(range(3, 3 + len(field.comp_shape)))
    return np.sum(np.abs(field.coeff) ** 2, axis=comp_axes) if comp_axes else np.abs(field.coeff) ** 2


def derivative_norm(field: SpectralField, ell: int) -> float:
    """L^2 norm of the order-``ell`` derivative via the radial multiplier |xi|^ell."""
    if ell < 0:
        raise ValueError(f"ell must be nonnegative, got {ell}")
    g = field.grid
    return float(
        np.sqrt(np.sum(g.xi2**ell * _mode_mass2(field)) * g.mode_weight)
    )


def sobolev_norm(field: SpectralField, k: int) -> float:
    """Inhomogeneous H^k norm: root sum of derivative norms for orders 0..k."""
    return float(
        np.sqrt(sum(derivative_norm(field, ell) ** 2 for ell in range(k + 1)))
    )


def negative_sobolev_norm(field: SpectralField, s: float) -> float:
    """Homogeneous negative-index norm |||xi|^-s fhat||; requires 0 <= s < 3/2.

    The zero mode is excluded; the index bound keeps the weight locally
    square-integrable in three dimensions.
    """
    if not 0 <= s < 1.5:
        raise ValueError(f"s must lie in [0, 3/2), got {s}")
    g = field.grid
    mass2 = _mode_mass2(field)
    w = g.inv_xi2**s
    return float(np.sqrt(np.sum(w * mass2) * g.mode_weight))


def besov_norm(field: SpectralField, s: float) -> float:
    """sup over dyadic shells 2^l <= |xi| < 2^(l+1) of 2^(-s l) * shell L2 mass.

    Sharp shell cutoffs; s restricted to (0, 3/2].
    """
    if not 0 < s <= 1.5:
        raise ValueError(f"s must lie in (0, 3/2], got {s}")
    g = field.grid
    mass2 = _mode_mass2(field) * g.mode_weight
    norm = g.xi_norm
    active = norm > 0
    if not np.any(mass2[active] > 0):
        return 0.0
    lmin = int(np.floor(np.log2(np.min(norm[active]))))
    lmax = int(np.floor(np.log2(np.max(norm[active]))))
    best = 0.0
    for l in range(lmin, lmax + 1):
        shell = active & (norm >= 2.0**l) & (norm < 2.0 ** (l + 1))
        if not np.any(shell):
            continue
        best = max(best, 2.0 ** (-s * l) * math.sqrt(float(np.sum(mass2[shell]))))
    return best


def _skew_parts(u: SpectralField, e: SpectralField) -> tuple[np.ndarray, np.ndarray]:
    """Spectral (grad u - grad u^T, E^T - E) pair used by the cross terms."""
    g = u.grid
    gu = np.einsum("...i,...j->...ij", u.coeff, 1j * g.xi_deriv)
    x = gu - np.swapaxes(gu, -1, -2)
    y = np.swapaxes(e.coeff, -1, -2) - e.coeff
    return x, y


def energy_functional(
    u: SpectralField,
    e: SpectralField,
    k1: int,
    k2: int,
    delta: float,
    scale: float = 1.0,
) -> float:
    """Scale-weighted derivative energy with skew-coupling cross terms.

    sum_{l=k1..k2} ||grad^l (u, E)||^2 / scale
      + delta/scale * sum_{l=k1..k2-1} int grad^(l-1)(grad u - grad u^T)
                                         : grad^(l+1)(E^T - E) dx

    grad^l is the radial multiplier |xi|^l; for l = 0 the l-1 factor is
    realized as |xi|^(-1) on nonzero modes.
    """
    if k1 < 0 or k2 < k1 + 1:
        raise ValueError(f"need 0 <= k1 <= k2 - 1, got k1={k1}, k2={k2}")
    if scale <= 0:
        raise ValueError(f"scale must be positive, got {scale}")
    g = u.grid
    w = g.mode_weight
    mass2 = _mode_mass2(u) + _mode_mass2(e)

    total = 0.0
    for ell in range(k1, k2 + 1):
        total += float(np.sum(g.xi2**ell * mass2) * w)

    if delta != 0.0 and k2 > k1:
        x, y = _skew_parts(u, e)
        inner = np.real(np.einsum("...ij,...ij->...", x, np.conj(y)))
        for ell in range(k1, k2):
            total += delta * float(np.sum(g.xi2**ell * inner) * w)
    return total / scale


def energy_cross_bound(u: SpectralField, e: SpectralField, k1: int, k2: int) -> float:
    """Cauchy-Schwarz bound on the summed cross terms (same weights)."""
    g = u.grid
    w = g.mode_weight
    x, y = _skew_parts(u, e)
    x2 = np.sum(np.abs(x) ** 2, axis=(-2, -1))
    y2 = np.sum(np.abs(y) ** 2, axis=(-2, -1))
    total = 0.0
    for ell in range(k1, k2):
        nx = np.sqrt(np.sum(g.inv_xi2 * g.xi2**ell * x2) * w)
        ny = np.sqrt(np.sum(g.xi2 ** (ell + 1) * y2) * w)
        total += float(nx * ny)
    return total


@dataclass(frozen=True)
class DecayFitResult:
    """Power-law fit of a positive series against (1 + t)."""

    slope: float
    amplitude: float
    r2: float
    window: tuple[float, float]
    sensitivity: float
    npoints: int

    def as_dict(self) -> dict:
        return {
            "slope": self.slope,
            "amplitude": self.amplitude,
            "r2": self.r2,
            "window": list(self.window),
            "sensitivity": self.sensitivity,
            "npoints": self.npoints,
        }


@dataclass
class NormRecord:
    """One time sample of a named norm series."""

    t: float
    name: str
    value: float
    meta: dict = field(default_factory=dict)


def _ls_powerlaw(t: np.ndarray, v: np.ndarray) -> tuple[float, float, float]:
    x = np.log1p(t)
    y = np.log(v)
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = np.sum((y - np.mean(y)) ** 2)
    r2 = 1.0 - float(np.sum(resid**2)) / float(ss_tot) if ss_tot > 0 else 1.0
    return float(slope), float(np.exp(intercept)), r2


def fit_decay(
    times: np.ndarray,
    values: np.ndarray,
    window: tuple[float, float] | None = None,
) -> DecayFitResult:
    """Least-squares fit of log(value) against log(1 + t).

    ``sensitivity`` is the slope change when the window shrinks by 25%
    (from the left, in log time), a cheap check that the fit sits in the
    asymptotic regime.  Requires at least 8 points in the window and
    strictly positive values.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    if times.shape != values.shape:
        raise ValueError("times and values must have the same shape")
    if window is None:
        window = (float(np.min(times)), float(np.max(times)))
    lo, hi = window
    sel = (times >= lo) & (times <= hi)
    t, v = times[sel], values[sel]
    if t.size < 8:
        raise ValueError(f"need at least 8 points in the window, got {t.size}")
    if np.any(v <= 0):
        raise ValueError("values must be strictly positive for a log-log fit")
    order = np.argsort(t)
    t, v = t[order], v[order]

    slope, amplitude, r2 = _ls_powerlaw(t, v)

    # shrink the window by 25% in log(1+t) from the left
    x = np.log1p(t)
    cut = x[0] + 0.25 * (x[-1] - x[0])
    sub = x >= cut
    if np.sum(sub) >= 3:
        slope_sub, _, _ = _ls_powerlaw(t[sub], v[sub])
        sensitivity = abs(slope_sub - slope)
    else:
        sensitivity = float("nan")
    return DecayFitResult(slope, amplitude, r2, (float(lo), float(hi)), sensitivity, int(t.size))
