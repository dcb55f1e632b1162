"""
Uniform periodic grids and the fields that live on them.

The whole space is approximated by a periodic box of side ``box_side``
centred at the origin; a grid has ``n`` points per axis at
``y_j = (j - n/2) * spacing``. The Fourier convention is the one of the
continuous transform ``f^(xi) = int f(y) exp(-2 pi i y.xi) dy`` so that
``d/dy_d <-> 2 pi i xi_d`` and ``Laplacian <-> -4 pi^2 |xi|^2``.

All operations are pure; input fields are never modified.

>>> from libssns.grid import Grid, gaussian_curl_field, leray_project
>>> grid = Grid(32, 16.0)
>>> u = gaussian_curl_field(grid, width=2.0)
>>> v = leray_project(u)
"""

from dataclasses import dataclass
from enum import IntEnum
from functools import cached_property

import numpy as np
from scipy import ndimage

from .errors import DomainError, DimensionError, NumericError


_AXES = (-3, -2, -1)


class Interpolation(IntEnum):
    """ How fields are evaluated off the grid nodes """

    FOURIER_RESAMPLE = 0
    """ Evaluate the trigonometric interpolant exactly at the new points """
    CUBIC_SPLINE = 1
    """ Periodic cubic spline; cheaper and less accurate """


@dataclass(frozen=True)
class Grid:
    """
    A periodic ``n``×``n``×``n`` grid on a box of side ``box_side``
    centred at the origin.
    """

    n: int
    """ Points per axis; positive and even """
    box_side: float
    """ Side length of the box """
    dealias_fraction: float = 2.0/3.0
    """ Fraction of the resolved band kept in quadratic products """

    def __post_init__(self):
        if int(self.n) != self.n or self.n <= 0 or self.n % 2 != 0:
            raise DomainError("grid size must be a positive even integer, got %r" % self.n)
        if not (np.isfinite(self.box_side) and self.box_side > 0.0):
            raise DomainError("box side must be positive, got %r" % self.box_side)
        if not (0.0 < self.dealias_fraction <= 1.0):
            raise DomainError("dealias fraction must lie in (0, 1], got %r" % \
                self.dealias_fraction)

    @property
    def spacing(self):
        return self.box_side / self.n

    @property
    def shape(self):
        return (self.n, self.n, self.n)

    @property
    def cell_volume(self):
        return self.spacing**3

    @property
    def origin(self):
        """ Coordinate of the first node along every axis """
        return -0.5 * self.box_side

    @cached_property
    def coords(self):
        return (np.arange(self.n) - self.n // 2) * self.spacing

    @cached_property
    def mesh(self):
        return np.meshgrid(self.coords, self.coords, self.coords, indexing='ij')

    @cached_property
    def radius(self):
        (y1, y2, y3) = self.mesh
        return np.sqrt(y1**2 + y2**2 + y3**2)

    @cached_property
    def frequencies(self):
        """ Full-layout frequencies (cycles per unit length) """
        return np.fft.fftfreq(self.n, d=self.spacing)

    @cached_property
    def xi(self):
        """
        Derivative frequencies in the half-spectrum layout used by
        `rfft3`, broadcastable to the spectral shape. The Nyquist
        frequency is zeroed on every axis.
        """
        full = np.fft.fftfreq(self.n, d=self.spacing)
        half = np.fft.rfftfreq(self.n, d=self.spacing)
        full[self.n // 2] = 0.0
        half[-1] = 0.0
        return (full.reshape(-1, 1, 1), full.reshape(1, -1, 1),
            half.reshape(1, 1, -1))

    @cached_property
    def xi_sq(self):
        (x1, x2, x3) = self.xi
        return x1**2 + x2**2 + x3**2

    @cached_property
    def kappa_sq(self):
        """ True |xi|^2 (Nyquist kept) in the half-spectrum layout """
        full = np.fft.fftfreq(self.n, d=self.spacing)
        half = np.fft.rfftfreq(self.n, d=self.spacing)
        return full.reshape(-1, 1, 1)**2 + full.reshape(1, -1, 1)**2 + \
            half.reshape(1, 1, -1)**2

    @cached_property
    def dealias_mask(self):
        cutoff = self.dealias_fraction * self.n / 2
        full = np.abs(np.fft.fftfreq(self.n) * self.n) <= cutoff
        half = np.abs(np.fft.rfftfreq(self.n) * self.n) <= cutoff
        return full.reshape(-1, 1, 1) & full.reshape(1, -1, 1) & \
            half.reshape(1, 1, -1)

    @cached_property
    def phase(self):
        """ exp(-2 pi i origin.xi) in the full layout; real, +-1 """
        k = np.round(np.fft.fftfreq(self.n) * self.n).astype(int)
        s = np.where(k % 2 == 0, 1.0, -1.0)
        return s.reshape(-1, 1, 1) * s.reshape(1, -1, 1) * s.reshape(1, 1, -1)

    def scaled(self, factor):
        """ Same resolution on a box ``factor`` times larger """
        return Grid(self.n, self.box_side * factor, self.dealias_fraction)


def _finite(arr, what):
    if not np.all(np.isfinite(arr)):
        raise NumericError("non-finite entries in %s" % what)


@dataclass(frozen=True, eq=False)
class ScalarField:
    """ A real scalar (pressure, potential, test function) on a grid """

    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.values, dtype=float)
        if arr.shape != self.grid.shape:
            raise DimensionError("scalar field of shape %s on a %d^3 grid" % \
                (arr.shape, self.grid.n))
        _finite(arr, "scalar field")
        object.__setattr__(self, 'values', arr)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros(grid.shape))

    def __add__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.values + other.values)

    def __sub__(self, other):
        _same_grid(self, other)
        return ScalarField(self.grid, self.values - other.values)

    def __mul__(self, c):
        return ScalarField(self.grid, self.values * float(c))

    __rmul__ = __mul__

    def __neg__(self):
        return ScalarField(self.grid, -self.values)


@dataclass(frozen=True, eq=False)
class VectorField:
    """ Three real components sharing one grid """

    grid: Grid
    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=float)
        if arr.shape != (3,) + self.grid.shape:
            raise DimensionError("vector field of shape %s on a %d^3 grid" % \
                (arr.shape, self.grid.n))
        _finite(arr, "vector field")
        object.__setattr__(self, 'components', arr)

    @classmethod
    def zeros(cls, grid):
        return cls(grid, np.zeros((3,) + grid.shape))

    def __getitem__(self, i):
        return self.components[i]

    def __add__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.components + other.components)

    def __sub__(self, other):
        _same_grid(self, other)
        return VectorField(self.grid, self.components - other.components)

    def __mul__(self, c):
        return VectorField(self.grid, self.components * float(c))

    __rmul__ = __mul__

    def __truediv__(self, c):
        return VectorField(self.grid, self.components / float(c))

    def __neg__(self):
        return VectorField(self.grid, -self.components)

    def magnitude(self):
        return np.sqrt(np.sum(self.components**2, axis=0))

    def masked(self, mask):
        """ Copy with every component zeroed where ``mask`` is false """
        return VectorField(self.grid, self.components * mask)


@dataclass(frozen=True, eq=False)
class TensorField:
    """ ``components[i, j]`` holds d_j f_i """

    grid: Grid
    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=float)
        if arr.shape != (3, 3) + self.grid.shape:
            raise DimensionError("tensor field of shape %s on a %d^3 grid" % \
                (arr.shape, self.grid.n))
        _finite(arr, "tensor field")
        object.__setattr__(self, 'components', arr)


@dataclass(frozen=True, eq=False)
class SpectralField:
    """
    Fourier coefficients of a `VectorField` under the continuous
    transform convention; ``components[c]`` is in the full fftn layout.
    """

    grid: Grid
    components: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.components, dtype=complex)
        if arr.shape != (3,) + self.grid.shape:
            raise DimensionError("spectral field of shape %s on a %d^3 grid" % \
                (arr.shape, self.grid.n))
        object.__setattr__(self, 'components', arr)


def _same_grid(*fields):
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise DimensionError("fields live on different grids: %r vs %r" % \
                (grid, f.grid))
    return grid


def _array(f):
    if isinstance(f, ScalarField):
        return f.values
    return f.components


def rfft3(arr):
    """ Real-to-complex transform over the three trailing axes """
    return np.fft.rfftn(arr, axes=_AXES)


def irfft3(grid, hat):
    return np.fft.irfftn(hat, s=grid.shape, axes=_AXES)


def to_spectral(f):
    grid = f.grid
    hat = np.fft.fftn(f.components, axes=_AXES)
    return SpectralField(grid, hat * (grid.cell_volume * grid.phase))


def from_spectral(F):
    grid = F.grid
    vals = np.fft.ifftn(F.components * grid.phase, axes=_AXES).real
    return VectorField(grid, vals / grid.cell_volume)


def spectral_l2_norm(F):
    """ L2 norm of the coefficients w.r.t. the dual lattice measure """
    return float(np.sqrt(np.sum(np.abs(F.components)**2)) / F.grid.box_side**1.5)


def _magnitude(f):
    arr = _array(f)
    if isinstance(f, ScalarField):
        return np.abs(arr)
    lead = arr.ndim - 3
    return np.sqrt(np.sum(arr**2, axis=tuple(range(lead))))


def lp_norm(f, p):
    """
    Discrete L^p norm, ``(sum |f|^p spacing^3)^(1/p)``, with ``|f|`` the
    Euclidean (Frobenius for tensors) magnitude at each node.
    """
    if not np.isfinite(p):
        raise DomainError("p must be finite, got %r" % p)
    if p < 1.0:
        raise DomainError("L^p norm needs p >= 1, got %r" % p)

    mag = _magnitude(f)
    peak = float(mag.max())
    if peak == 0.0:
        return 0.0

    return peak * float(np.sum((mag / peak)**p) * f.grid.cell_volume)**(1.0/p)


def inner(f, g):
    """ L2 pairing of two fields of the same rank """
    _same_grid(f, g)
    return float(np.sum(_array(f) * _array(g)) * f.grid.cell_volume)


def gradient(f):
    """
    Spectral gradient. A `ScalarField` gives a `VectorField`; a
    `VectorField` gives the `TensorField` ``d_j f_i``.
    """
    grid = f.grid
    hat = rfft3(_array(f))
    parts = [irfft3(grid, 2j * np.pi * xi_d * hat) for xi_d in grid.xi]

    if isinstance(f, ScalarField):
        return VectorField(grid, np.stack(parts))
    return TensorField(grid, np.stack(parts, axis=1))


def divergence(f):
    grid = f.grid
    hat = rfft3(f.components)
    out = sum(2j * np.pi * xi_d * hat[d] for (d, xi_d) in enumerate(grid.xi))
    return ScalarField(grid, irfft3(grid, out))


def laplacian(f):
    grid = f.grid
    hat = rfft3(_array(f)) * (-4.0 * np.pi**2 * grid.xi_sq)
    if isinstance(f, ScalarField):
        return ScalarField(grid, irfft3(grid, hat))
    return VectorField(grid, irfft3(grid, hat))


def curl(f):
    grid = f.grid
    hat = rfft3(f.components)
    (x1, x2, x3) = [2j * np.pi * xi_d for xi_d in grid.xi]
    out = np.stack([
        x2 * hat[2] - x3 * hat[1],
        x3 * hat[0] - x1 * hat[2],
        x1 * hat[1] - x2 * hat[0]])
    return VectorField(grid, irfft3(grid, out))


def leray_project(f):
    """
    Orthogonal projection onto divergence-free fields, symbol
    ``I - xi xi^T / |xi|^2``. Modes with zero derivative frequency
    (the mean) are left untouched.
    """
    grid = f.grid
    hat = rfft3(f.components)
    xi = grid.xi
    xi_sq = np.where(grid.xi_sq == 0.0, 1.0, grid.xi_sq)
    div = (xi[0] * hat[0] + xi[1] * hat[1] + xi[2] * hat[2]) / xi_sq
    out = np.stack([hat[d] - xi[d] * div for d in range(3)])
    return VectorField(grid, irfft3(grid, out))


def dealiased_products(U, V):
    """
    Dealiased spectrum of the pointwise products, ``hat[i, j]`` is the
    transform of ``V_i U_j`` restricted to the retained band.
    """
    grid = _same_grid(U, V)
    prod = V.components[:, None] * U.components[None, :]
    return rfft3(prod) * grid.dealias_mask


def tensor_divergence(U, V):
    """ ``(div (U (x) V))_i = sum_j d_j (U_j V_i)`` with 2/3-rule products """
    grid = _same_grid(U, V)
    hat = dealiased_products(U, V)
    out = sum(2j * np.pi * xi_d * hat[:, d] for (d, xi_d) in enumerate(grid.xi))
    return VectorField(grid, irfft3(grid, out))


def divergence_residual(f):
    """ ``||div f||_2 / ||grad f||_2``; zero for a constant field """
    scale = lp_norm(gradient(f), 2)
    if scale == 0.0:
        return 0.0
    return lp_norm(divergence(f), 2) / scale


def trusted_mask(grid, radius):
    return grid.radius < radius


def _interpolation_matrix(grid, points):
    arg = np.outer(np.asarray(points, dtype=float) - grid.origin, grid.frequencies)
    return np.exp(2j * np.pi * arg) / grid.n


def evaluate_interpolant(f, points, interpolation=Interpolation.FOURIER_RESAMPLE):
    """
    Evaluate ``f`` on the tensor grid ``points[0] x points[1] x points[2]``
    (a single 1-D array is used for all three axes). Points are taken
    periodically.
    """
    if not isinstance(points, (tuple, list)):
        points = (points, points, points)
    grid = f.grid
    arr = _array(f)

    if interpolation == Interpolation.FOURIER_RESAMPLE:
        (e1, e2, e3) = [_interpolation_matrix(grid, p) for p in points]
        hat = np.fft.fftn(arr, axes=_AXES)
        out = np.einsum('ai,bj,ck,...ijk->...abc', e1, e2, e3, hat,
            optimize=True)
        return out.real

    if interpolation == Interpolation.CUBIC_SPLINE:
        idx = [(np.asarray(p, dtype=float) - grid.origin) / grid.spacing
            for p in points]
        coords = np.stack(np.meshgrid(*idx, indexing='ij'))
        lead = arr.reshape((-1,) + grid.shape)
        out = np.stack([ndimage.map_coordinates(c, coords, order=3,
            mode='grid-wrap') for c in lead])
        return out.reshape(arr.shape[:-3] + coords.shape[1:])

    raise DomainError("unknown interpolation %r" % interpolation)


def resample(f, target, scale=1.0, interpolation=Interpolation.FOURIER_RESAMPLE):
    """
    Field on grid ``target`` whose value at ``y`` is ``f(scale * y)``.
    The scaled target nodes must stay inside the source box.
    """
    points = scale * target.coords
    half = 0.5 * f.grid.box_side
    if np.max(np.abs(points)) > half * (1.0 + 1e-12):
        raise DomainError("resampling points reach %.6g beyond the source box %.6g" % \
            (np.max(np.abs(points)), half))

    out = evaluate_interpolant(f, points, interpolation)
    if isinstance(f, ScalarField):
        return ScalarField(target, out)
    return VectorField(target, out)


def gaussian_scalar(grid, width=1.0, center=(0.0, 0.0, 0.0), amplitude=1.0):
    """ ``amplitude * exp(-pi |y - center|^2 / width)`` """
    (y1, y2, y3) = grid.mesh
    r2 = (y1 - center[0])**2 + (y2 - center[1])**2 + (y3 - center[2])**2
    return ScalarField(grid, amplitude * np.exp(-np.pi * r2 / width))


def gaussian_field(grid, width=1.0, center=(0.0, 0.0, 0.0), amplitude=1.0, axis=0):
    """ Gaussian scalar embedded along one coordinate axis """
    comps = np.zeros((3,) + grid.shape)
    comps[axis] = gaussian_scalar(grid, width, center, amplitude).values
    return VectorField(grid, comps)


def gaussian_curl_field(grid, width=1.0, amplitude=1.0, direction=(0.0, 0.0, 1.0),
        center=(0.0, 0.0, 0.0)):
    """
    Curl of the potential ``amplitude * g * direction`` with ``g`` the
    Gaussian of `gaussian_scalar`. Divergence-free to round-off and
    Gaussian-decaying; the standard small-data family.
    """
    direction = np.asarray(direction, dtype=float)
    direction = direction / np.linalg.norm(direction)
    g = gaussian_scalar(grid, width, center, amplitude).values
    return curl(VectorField(grid, direction.reshape(3, 1, 1, 1) * g))


def _band_limited_array(grid, kmax, rng, count):
    n = grid.n
    if not (0 < kmax < grid.dealias_fraction * n / 2):
        raise DomainError("kmax must lie in (0, %g), got %r" % \
            (grid.dealias_fraction * n / 2, kmax))
    hat = np.zeros((count, n, n, n // 2 + 1), dtype=complex)
    k = np.round(np.fft.fftfreq(n) * n).astype(int)
    kh = np.round(np.fft.rfftfreq(n) * n).astype(int)
    sel = (np.abs(k) <= kmax, np.abs(k) <= kmax, np.abs(kh) <= kmax)
    shape = (count, int(sel[0].sum()), int(sel[1].sum()), int(sel[2].sum()))
    block = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    hat[np.ix_(np.arange(count), *[np.flatnonzero(s) for s in sel])] = block
    hat[:, 0, 0, 0] = 0.0
    arr = irfft3(grid, hat)
    return arr / np.max(np.abs(arr))


def band_limited_field(grid, kmax, rng, solenoidal=False):
    """
    Random trigonometric field with integer modes ``|k_d| <= kmax``,
    normalised to unit peak component.
    """
    f = VectorField(grid, _band_limited_array(grid, kmax, rng, 3))
    if solenoidal:
        f = leray_project(f)
    return f


def band_limited_scalar(grid, kmax, rng):
    return ScalarField(grid, _band_limited_array(grid, kmax, rng, 1)[0])


def coordinate_advection(f):
    """
    ``(y . grad) f`` with the spectral gradient multiplied pointwise by
    the coordinates. Only trustworthy away from the box boundary.
    """
    grid = f.grid
    (y1, y2, y3) = grid.mesh
    J = gradient(f).components
    return VectorField(grid, J[:, 0] * y1 + J[:, 1] * y2 + J[:, 2] * y3)
