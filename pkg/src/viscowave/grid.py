"""Periodic cubic grid and its Fourier lattice.

All spectral data in this package lives on the plain ``numpy.fft`` lattice:
integer mode indices ``k`` in FFT order, physical wavenumbers
``xi = 2*pi*k/length``.  The forward transform is the unnormalized DFT and
the inverse carries the full ``1/n**3`` factor, so a physical field ``f``
and its coefficients ``fhat`` satisfy Parseval in the form

    sum_x |f(x)|^2 * (length/n)**3 == sum_k |fhat(k)|^2 * length**3 / n**6

The bridge to the symmetric continuum transform used by the radial kernel
module is ``fhat_cont(xi_k) ~= (2*pi)**(-3/2) * (length/n)**3 * fhat(k)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

__all__ = ["Grid"]


@dataclass(frozen=True)
class Grid:
    """Uniform n^3 grid on a periodic cube of side ``length``."""

    n: int
    length: float = 2.0 * np.pi

    def __post_init__(self) -> None:
        if self.n < 4 or self.n % 2:
            raise ValueError(f"n must be even and >= 4, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"length must be positive, got {self.length}")

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)

    @property
    def spacing(self) -> float:
        return self.length / self.n

    @property
    def cell_volume(self) -> float:
        return (self.length / self.n) ** 3

    @property
    def volume(self) -> float:
        return self.length**3

    @cached_property
    def modes(self) -> np.ndarray:
        """Integer mode indices along one axis, FFT order."""
        return np.fft.fftfreq(self.n, d=1.0 / self.n)

    @cached_property
    def xi_axis(self) -> np.ndarray:
        return 2.0 * np.pi * self.modes / self.length

    @cached_property
    def xi(self) -> np.ndarray:
        """Wavenumber vectors, shape (n, n, n, 3)."""
        ax = self.xi_axis
        out = np.empty(self.shape + (3,))
        out[..., 0] = ax[:, None, None]
        out[..., 1] = ax[None, :, None]
        out[..., 2] = ax[None, None, :]
        return out

    @cached_property
    def xi2(self) -> np.ndarray:
        """|xi|^2, shape (n, n, n)."""
        return np.sum(self.xi**2, axis=-1)

    @cached_property
    def xi_norm(self) -> np.ndarray:
        return np.sqrt(self.xi2)

    @cached_property
    def inv_xi2(self) -> np.ndarray:
        """1/|xi|^2 with the zero mode mapped to 0."""
        out = np.zeros(self.shape)
        np.divide(1.0, self.xi2, out=out, where=self.xi2 > 0)
        return out

    @cached_property
    def xi_deriv(self) -> np.ndarray:
        """Wavenumbers for derivative multipliers; Nyquist planes zeroed.

        The n/2 mode has no sign-consistent conjugate partner, so every
        derivative operator drops it to keep real fields real.
        """
        out = self.xi.copy()
        nyq = self.n // 2
        idx = np.where(self.modes == -nyq)[0]
        for axis, comp in enumerate(range(3)):
            sl = [slice(None)] * 3
            sl[axis] = idx
            out[tuple(sl) + (comp,)] = 0.0
        return out

    @cached_property
    def inv_xi_deriv2(self) -> np.ndarray:
        """1/|xi_deriv|^2 with zero (and pure-Nyquist) modes mapped to 0."""
        d2 = np.sum(self.xi_deriv**2, axis=-1)
        out = np.zeros(self.shape)
        np.divide(1.0, d2, out=out, where=d2 > 0)
        return out

    @cached_property
    def dealias_mask(self) -> np.ndarray:
        """True on modes kept by the 2/3 rule (all |k_i| <= n/3)."""
        keep = np.abs(self.modes) <= self.n / 3.0
        return (
            keep[:, None, None] & keep[None, :, None] & keep[None, None, :]
        )

    @cached_property
    def coords(self) -> np.ndarray:
        """Physical coordinates, shape (n, n, n, 3)."""
        ax = np.arange(self.n) * self.spacing
        out = np.empty(self.shape + (3,))
        out[..., 0] = ax[:, None, None]
        out[..., 1] = ax[None, :, None]
        out[..., 2] = ax[None, None, :]
        return out

    @property
    def mode_weight(self) -> float:
        """Parseval weight for mode sums: length^3 / n^6."""
        return self.length**3 / float(self.n) ** 6
