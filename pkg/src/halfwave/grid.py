"""Discrete space and space-time lattices with continuum-normalized transforms.

The spatial box is [-L, L)^3 sampled at N points per axis, x_n = -L + n*dx
with dx = 2L/N.  The paired frequency lattice is xi_j = j*pi/L for
j = -N/2 .. N/2-1, so dx*dxi = 2*pi/N exactly and the discrete transform

    F(xi) = dx^3 * sum_x f(x) exp(-i<x, xi>)

is a Riemann sum for the continuum Fourier integral.  The time direction,
when present, uses the same construction on [-T, T) with the convention
F_t u(tau) = dt * sum_t u(t) exp(-i t tau).

All sample arrays are stored in ascending-coordinate order: x (and t)
increase along each axis, and frequency axes run from -N/2*dxi upward.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import GridMismatchError, ParameterError, RepresentationError

__all__ = [
    "SpatialGrid",
    "SpacetimeGrid",
    "Field",
    "Spectrum",
    "SpacetimeField",
    "SpacetimeSpectrum",
    "forward_transform",
    "inverse_transform",
    "apply_multiplier",
    "bessel_multiplier",
    "modulus_multiplier",
    "derivative_multiplier",
]


def _axis_points(n: int, half_length: float) -> np.ndarray:
    step = 2.0 * half_length / n
    return -half_length + step * np.arange(n)


def _freq_axis(n: int, half_length: float) -> np.ndarray:
    step = np.pi / half_length
    return step * np.arange(-n // 2, n // 2)


@dataclass(frozen=True)
class SpatialGrid:
    """Cubic lattice for the periodic box [-L, L)^3."""

    n: int
    half_length: float

    def __post_init__(self):
        if self.n < 4 or self.n % 2 != 0:
            raise ParameterError(f"N must be an even integer >= 4, got {self.n}")
        if self.half_length <= 0:
            raise ParameterError(f"L must be positive, got {self.half_length}")

    @property
    def dx(self) -> float:
        return 2.0 * self.half_length / self.n

    @property
    def dxi(self) -> float:
        return np.pi / self.half_length

    @property
    def nyquist(self) -> float:
        """Largest per-axis frequency magnitude, (N/2)*dxi."""
        return (self.n // 2) * self.dxi

    @property
    def x_axis(self) -> np.ndarray:
        return _axis_points(self.n, self.half_length)

    @property
    def xi_axis(self) -> np.ndarray:
        return _freq_axis(self.n, self.half_length)

    def xi_mesh(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Open-grid frequency component arrays, broadcastable to (N, N, N)."""
        ax = self.xi_axis
        return ax[:, None, None], ax[None, :, None], ax[None, None, :]

    def xi_modulus(self) -> np.ndarray:
        k1, k2, k3 = self.xi_mesh()
        return np.sqrt(k1**2 + k2**2 + k3**2)

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.n, self.n, self.n)


@dataclass(frozen=True)
class SpacetimeGrid:
    """Spatial lattice extended by a time lattice on [-T, T)."""

    spatial: SpatialGrid
    m: int
    half_time: float

    def __post_init__(self):
        if self.m < 4 or self.m % 2 != 0:
            raise ParameterError(f"M must be an even integer >= 4, got {self.m}")
        if self.half_time <= 0:
            raise ParameterError(f"T must be positive, got {self.half_time}")

    @property
    def dt(self) -> float:
        return 2.0 * self.half_time / self.m

    @property
    def dtau(self) -> float:
        return np.pi / self.half_time

    @property
    def t_axis(self) -> np.ndarray:
        return _axis_points(self.m, self.half_time)

    @property
    def tau_axis(self) -> np.ndarray:
        return _freq_axis(self.m, self.half_time)

    @property
    def origin_index(self) -> int:
        """Lattice index of t = 0 (the center of the time axis)."""
        return self.m // 2

    @property
    def shape(self) -> tuple[int, int, int, int]:
        return (self.m,) + self.spatial.shape


class _LatticeData:
    """Complex samples bound to a lattice; subclasses fix the representation."""

    is_frequency: bool
    is_spacetime: bool

    def __init__(self, grid, data):
        data = np.ascontiguousarray(data, dtype=np.complex128)
        expected = grid.shape
        if data.shape != expected:
            raise GridMismatchError(
                f"sample array shape {data.shape} does not match lattice {expected}"
            )
        self.grid = grid
        self.data = data

    def copy(self):
        return type(self)(self.grid, self.data.copy())

    def __add__(self, other):
        self._check_mate(other)
        return type(self)(self.grid, self.data + other.data)

    def __sub__(self, other):
        self._check_mate(other)
        return type(self)(self.grid, self.data - other.data)

    def __mul__(self, scalar):
        return type(self)(self.grid, self.data * scalar)

    __rmul__ = __mul__

    def _check_mate(self, other):
        if type(other) is not type(self):
            raise RepresentationError(
                f"cannot combine {type(self).__name__} with {type(other).__name__}"
            )
        if other.grid != self.grid:
            raise GridMismatchError("operands live on different grids")


class Field(_LatticeData):
    """Configuration-space samples over a SpatialGrid."""

    is_frequency = False
    is_spacetime = False


class Spectrum(_LatticeData):
    """Frequency-space samples over a SpatialGrid (continuum-normalized)."""

    is_frequency = True
    is_spacetime = False


class SpacetimeField(_LatticeData):
    """Configuration samples over a SpacetimeGrid; axis 0 is time."""

    is_frequency = False
    is_spacetime = True


class SpacetimeSpectrum(_LatticeData):
    """Full (xi, tau) transform over a SpacetimeGrid; axis 0 is tau."""

    is_frequency = True
    is_spacetime = True


def _alt_phase(n: int) -> np.ndarray:
    """(-1)^j for j = -n/2 .. n/2-1, the boundary phase of the shifted DFT."""
    j = np.arange(-n // 2, n // 2)
    return np.where(j % 2 == 0, 1.0, -1.0)


def _forward_axis(data: np.ndarray, axis: int, n: int, step: float) -> np.ndarray:
    # step * sum_n f(x_n) e^{-i x_n xi_j} = step * (-1)^j * fftshift(fft(f))
    ph = _alt_phase(n)
    shape = [1] * data.ndim
    shape[axis] = n
    out = np.fft.fftshift(np.fft.fft(data, axis=axis), axes=axis)
    return step * ph.reshape(shape) * out

def _inverse_axis(data: np.ndarray, axis: int, n: int, step: float) -> np.ndarray:
    # exact algebraic inverse of _forward_axis
    ph = _alt_phase(n)
    shape = [1] * data.ndim
    shape[axis] = n
    tmp = np.fft.ifftshift(ph.reshape(shape) * data, axes=axis)
    return np.fft.ifft(tmp, axis=axis) / step


def forward_transform(f):
    """Continuum-normalized forward transform (space, and time when present)."""
    if f.is_frequency:
        raise RepresentationError("forward_transform expects configuration data")
    if f.is_spacetime:
        g = f.grid
        sg = g.spatial
        out = f.data
        for axis in (1, 2, 3):
            out = _forward_axis(out, axis, sg.n, sg.dx)
        out = _forward_axis(out, 0, g.m, g.dt)
        return SpacetimeSpectrum(g, out)
    sg = f.grid
    out = f.data
    for axis in (0, 1, 2):
        out = _forward_axis(out, axis, sg.n, sg.dx)
    return Spectrum(sg, out)


def inverse_transform(F):
    """Exact inverse of forward_transform."""
    if not F.is_frequency:
        raise RepresentationError("inverse_transform expects frequency data")
    if F.is_spacetime:
        g = F.grid
        sg = g.spatial
        out = _inverse_axis(F.data, 0, g.m, g.dt)
        for axis in (1, 2, 3):
            out = _inverse_axis(out, axis, sg.n, sg.dx)
        return SpacetimeField(g, out)
    sg = F.grid
    out = F.data
    for axis in (0, 1, 2):
        out = _inverse_axis(out, axis, sg.n, sg.dx)
    return Field(sg, out)


def spatial_forward_slices(f: SpacetimeField) -> np.ndarray:
    """Space-only transform of every time slice; returns the raw (M,N,N,N) array."""
    sg = f.grid.spatial
    out = f.data
    for axis in (1, 2, 3):
        out = _forward_axis(out, axis, sg.n, sg.dx)
    return out


def spatial_inverse_slices(grid: SpacetimeGrid, spec_slices: np.ndarray) -> SpacetimeField:
    """Inverse space-only transform of per-time-slice spectra."""
    sg = grid.spatial
    out = spec_slices
    for axis in (1, 2, 3):
        out = _inverse_axis(out, axis, sg.n, sg.dx)
    return SpacetimeField(grid, out)


def time_forward(grid: SpacetimeGrid, slices: np.ndarray) -> np.ndarray:
    """Time-direction transform of an (M, ...) stack, convention e^{-i t tau}."""
    return _forward_axis(slices, 0, grid.m, grid.dt)


def bessel_multiplier(order: float) -> Callable:
    """<xi>^order with <xi> = (1 + |xi|^2)^(1/2); order -1 inverts order +1."""

    def m(k1, k2, k3):
        return (1.0 + k1**2 + k2**2 + k3**2) ** (order / 2.0)

    return m


def modulus_multiplier(order: float = 1.0) -> Callable:
    """|xi|^order (the half-wave symbol for order 1)."""

    def m(k1, k2, k3):
        return np.sqrt(k1**2 + k2**2 + k3**2) ** order

    return m


def derivative_multiplier(axis: int) -> Callable:
    """i*xi_axis, the spectral symbol of d/dx_axis (axis in {0, 1, 2})."""
    if axis not in (0, 1, 2):
        raise ParameterError(f"derivative axis must be 0, 1 or 2, got {axis}")

    def m(k1, k2, k3):
        comp = (k1, k2, k3)[axis]
        return 1j * comp * np.ones_like(k1 + k2 + k3, dtype=np.complex128)

    return m


def _multiplier_values(grid: SpatialGrid, m: Callable) -> np.ndarray:
    k1, k2, k3 = grid.xi_mesh()
    vals = np.broadcast_to(np.asarray(m(k1, k2, k3)), grid.shape)
    if not np.all(np.isfinite(vals)):
        bad = np.argwhere(~np.isfinite(vals))[0]
        ax = grid.xi_axis
        xi = (ax[bad[0]], ax[bad[1]], ax[bad[2]])
        raise ParameterError(f"multiplier is not finite at xi = {xi}")
    return vals


def apply_multiplier(F, m: Callable):
    """Pointwise product m(xi) * F(xi); spatial multipliers broadcast over tau."""
    if not F.is_frequency:
        raise RepresentationError("apply_multiplier expects frequency data")
    if F.is_spacetime:
        vals = _multiplier_values(F.grid.spatial, m)
        return SpacetimeSpectrum(F.grid, F.data * vals[None, :, :, :])
    vals = _multiplier_values(F.grid, m)
    return Spectrum(F.grid, F.data * vals)
