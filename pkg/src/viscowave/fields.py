"""Spectral vector and tensor fields plus transforms and on-disk formats."""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .grid import Grid

__all__ = [
    "SpectralVectorField",
    "SpectralTensorField",
    "to_spectral",
    "to_physical",
    "hermitian_error",
    "resample",
    "save_field",
    "load_field",
]

_MAGIC = b"VWF1"


@dataclass
class SpectralField:
    """Base container: complex coefficients on ``grid`` in FFT order."""

    grid: Grid
    coeff: np.ndarray

    comp_shape: ClassVar[tuple[int, ...]] = ()

    def __post_init__(self) -> None:
        want = self.grid.shape + self.comp_shape
        if self.coeff.shape != want:
            raise ValueError(
                f"coefficient shape {self.coeff.shape} != expected {want}"
            )
        if self.coeff.dtype != np.complex128:
            self.coeff = self.coeff.astype(np.complex128)

    def copy(self):
        return type(self)(self.grid, self.coeff.copy())

    @property
    def ncomp(self) -> int:
        return int(np.prod(self.comp_shape, dtype=int)) if self.comp_shape else 1


@dataclass
class SpectralVectorField(SpectralField):
    comp_shape: ClassVar[tuple[int, ...]] = (3,)


@dataclass
class SpectralTensorField(SpectralField):
    comp_shape: ClassVar[tuple[int, ...]] = (3, 3)


def _field_class(comp_shape: tuple[int, ...]):
    if comp_shape == ():
        return SpectralField
    if comp_shape == (3,):
        return SpectralVectorField
    if comp_shape == (3, 3):
        return SpectralTensorField
    raise ValueError(f"unsupported component shape {comp_shape}")


def to_spectral(grid: Grid, physical: np.ndarray) -> SpectralField:
    """Forward transform of a real physical array (components trailing)."""
    if physical.shape[:3] != grid.shape:
        raise ValueError(
            f"physical array shape {physical.shape[:3]} does not match grid {grid.shape}"
        )
    coeff = np.fft.fftn(physical, axes=(0, 1, 2))
    return _field_class(physical.shape[3:])(grid, coeff)


def to_physical(field: SpectralField) -> np.ndarray:
    """Inverse transform; imaginary residue is discarded.

    The residue is meaningful only if the coefficients are Hermitian
    symmetric; use :func:`hermitian_error` to check when in doubt.
    """
    return np.real(np.fft.ifftn(field.coeff, axes=(0, 1, 2)))


def _conjugate_reflection(coeff: np.ndarray) -> np.ndarray:
    # index map k -> -k (mod n) on the first three axes
    rev = coeff[::-1, ::-1, ::-1]
    return np.conj(np.roll(rev, 1, axis=(0, 1, 2)))


def hermitian_error(field: SpectralField) -> float:
    """Max |fhat(-k) - conj(fhat(k))| relative to the largest coefficient."""
    scale = np.max(np.abs(field.coeff))
    if scale == 0:
        return 0.0
    return float(
        np.max(np.abs(field.coeff - _conjugate_reflection(field.coeff))) / scale
    )


def resample(field: SpectralField, grid: Grid) -> SpectralField:
    """Spectral zero-pad / truncation onto another grid with the same length.

    Exact for band-limited fields.  Coefficients scale by (n_new/n_old)^3 so
    the physical values are preserved.
    """
    if grid.length != field.grid.length:
        raise ValueError("resample requires identical box lengths")
    n_old, n_new = field.grid.n, grid.n
    keep = min(n_old, n_new) // 2
    src = field.coeff
    out = np.zeros(grid.shape + field.comp_shape, dtype=np.complex128)
    idx_old = np.fft.fftfreq(n_old, 1.0 / n_old).astype(int)
    sel_old = np.where(np.abs(idx_old) < keep)[0]
    idx_new = np.fft.fftfreq(n_new, 1.0 / n_new).astype(int)
    pos_new = {k: i for i, k in enumerate(idx_new)}
    dest = np.array([pos_new[idx_old[i]] for i in sel_old])
    out[np.ix_(dest, dest, dest)] = src[np.ix_(sel_old, sel_old, sel_old)]
    out *= (n_new / n_old) ** 3
    return _field_class(field.comp_shape)(grid, out)


def save_field(field: SpectralField, path) -> None:
    """Write the documented little-endian binary snapshot.

    Layout: magic ``VWF1``, then ``<q d q`` header (n, length, component
    count), then complex128 coefficients, row-major in k order with the
    flattened component index last.
    """
    flat = field.coeff.reshape(field.grid.shape + (field.ncomp,))
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<qdq", field.grid.n, field.grid.length, field.ncomp))
        fh.write(np.ascontiguousarray(flat, dtype="<c16").tobytes())


def load_field(path) -> SpectralField:
    with open(path, "rb") as fh:
        magic = fh.read(4)
        if magic != _MAGIC:
            raise ValueError(f"not a field snapshot: bad magic {magic!r}")
        n, length, ncomp = struct.unpack("<qdq", fh.read(24))
        data = np.frombuffer(fh.read(), dtype="<c16")
    grid = Grid(n, length)
    if data.size != n**3 * ncomp:
        raise ValueError(
            f"snapshot truncated: expected {n**3 * ncomp} coefficients, got {data.size}"
        )
    comp_shape = {1: (), 3: (3,), 9: (3, 3)}.get(ncomp)
    if comp_shape is None:
        raise ValueError(f"unsupported component count {ncomp}")
    coeff = data.reshape(grid.shape + comp_shape).astype(np.complex128)
    return _field_class(comp_shape)(grid, coeff)
