"""
The bilinear term ``F(U, V) = 2 P div(U (x) V)``, its pressure form, the
Duhamel integral ``G(U, V)(tau) = int_0^tau exp(-(tau-s)A) F(U,V)(s) ds``
and the residuals of the steady rescaled equation

    U + (y . grad) U + 2 (U . grad) U = -2 grad P + 2 Lap U.
"""

from dataclasses import dataclass

import numpy as np

from .grid import VectorField, ScalarField
from .grid import rfft3, irfft3, leray_project, tensor_divergence, dealiased_products
from .grid import gradient, laplacian, lp_norm, inner, trusted_mask
from .grid import coordinate_advection, divergence_residual, Interpolation
from .semigroup import semigroup_apply, t0
from .lemmas import gauss_panels, graded_breaks, gamma_of_p
from .errors import DomainError, DimensionError, PreconditionError


@dataclass(frozen=True)
class QuadratureRule:
    """
    Composite Gauss-Legendre in ``sigma = tau - s`` on panels graded
    toward ``sigma = 0``, where the semigroup kernel is singular.
    """

    panels: int = 8
    nodes_per_panel: int = 4
    grading_exponent: float = 2.0

    def __post_init__(self):
        if self.panels < 1:
            raise DomainError("need at least one panel, got %r" % self.panels)
        if self.nodes_per_panel < 2:
            raise DomainError("need at least two nodes per panel, got %r" % \
                self.nodes_per_panel)
        if not self.grading_exponent >= 1.0:
            raise DomainError("grading exponent must be >= 1, got %r" % \
                self.grading_exponent)

    def nodes(self, tau):
        """ ``(sigma, weights)`` on ``[0, tau]`` """
        breaks = graded_breaks(tau, self.panels, self.grading_exponent)
        return gauss_panels(breaks, self.nodes_per_panel)

    def refined(self):
        return QuadratureRule(2 * self.panels, self.nodes_per_panel,
            self.grading_exponent)


@dataclass(frozen=True, eq=False)
class TimeSlices:
    """ A trajectory ``s -> V(s)`` sampled at increasing ``taus`` from 0 """

    taus: np.ndarray
    fields: tuple

    def __post_init__(self):
        taus = np.asarray(self.taus, dtype=float)
        fields = tuple(self.fields)
        if taus.ndim != 1 or len(taus) != len(fields) or len(taus) == 0:
            raise DimensionError("%d taus for %d fields" % (taus.size, len(fields)))
        if taus[0] != 0.0:
            raise DomainError("trajectories start at tau = 0, got %r" % taus[0])
        if np.any(np.diff(taus) <= 0.0):
            raise DomainError("taus must be strictly increasing")
        grid = fields[0].grid
        if any(f.grid != grid for f in fields):
            raise DimensionError("trajectory slices live on different grids")
        object.__setattr__(self, 'taus', taus)
        object.__setattr__(self, 'fields', fields)

    @classmethod
    def zeros(cls, grid, taus):
        zero = VectorField.zeros(grid)
        return cls(taus, [zero] * len(taus))

    @property
    def grid(self):
        return self.fields[0].grid

    @property
    def horizon(self):
        return float(self.taus[-1])

    def __len__(self):
        return len(self.taus)

    def __iter__(self):
        return zip(self.taus, self.fields)

    def at(self, s):
        """ Piecewise linear interpolation in ``s`` """
        taus = self.taus
        if s < 0.0 or s > taus[-1] * (1.0 + 1e-12):
            raise DomainError("s = %r outside the trajectory [0, %r]" % (s, taus[-1]))
        i = int(np.searchsorted(taus, s, side='right')) - 1
        i = min(max(i, 0), len(taus) - 1)
        if taus[i] == s or i == len(taus) - 1:
            return self.fields[i]
        w = (s - taus[i]) / (taus[i + 1] - taus[i])
        return self.fields[i] * (1.0 - w) + self.fields[i + 1] * w

    def norms(self, p):
        return [lp_norm(f, p) for f in self.fields]

    def map(self, fn):
        return TimeSlices(self.taus, [fn(f) for f in self.fields])


def bilinear_F(U, V):
    return leray_project(tensor_divergence(U, V)) * 2.0


def pressure_from_velocity(U):
    """
    ``P^ = -(xi_j xi_k / |xi|^2) (U_j U_k)^`` so that
    ``-Lap P = div div (U (x) U)``; zero mean.
    """
    grid = U.grid
    hat = dealiased_products(U, U)
    xi = grid.xi
    xi_sq = np.where(grid.xi_sq == 0.0, 1.0, grid.xi_sq)
    acc = np.zeros(hat.shape[2:], dtype=complex)
    for j in range(3):
        for k in range(3):
            acc += xi[j] * xi[k] * hat[j, k]
    return ScalarField(grid, irfft3(grid, -acc / xi_sq))


def duhamel_G(traj_U, traj_V, tau, rule=QuadratureRule(),
        interpolation=Interpolation.FOURIER_RESAMPLE, executor=None):
    """
    Quadrature of ``s -> exp(-(tau-s)A) F(U(s), V(s))`` on ``[0, tau]``.
    Nodes may be farmed out to ``executor``; the sum is always taken in
    node order. The result is projected so that it stays solenoidal on
    the truncated box.
    """
    if traj_U.grid != traj_V.grid:
        raise DimensionError("trajectories live on different grids")
    if not tau >= 0.0:
        raise DomainError("tau must be nonnegative, got %r" % tau)
    if tau > min(traj_U.horizon, traj_V.horizon) * (1.0 + 1e-12):
        raise DomainError("tau = %r beyond the trajectory range" % tau)
    if tau == 0.0:
        return VectorField.zeros(traj_U.grid)

    (sigma, weights) = rule.nodes(tau)

    def term(k):
        s = max(tau - sigma[k], 0.0)
        F = bilinear_F(traj_U.at(s), traj_V.at(s))
        return semigroup_apply(F, sigma[k], interpolation).components * weights[k]

    if executor is None:
        parts = [term(k) for k in range(len(sigma))]
    else:
        parts = list(executor.map(term, range(len(sigma))))

    total = np.zeros_like(parts[0])
    for part in parts:
        total += part

    return leray_project(VectorField(traj_U.grid, total))


def duhamel_bound(traj_U, traj_V, tau, c0, p, rule=QuadratureRule()):
    """
    Scalar majorant of ``||G(U, V)(tau)||_p``::

        2 c0 int_0^tau e^{-(2-gamma) sigma} t0(sigma)^{-(1+gamma)/2}
                       ||U(tau-sigma)||_p ||V(tau-sigma)||_p dsigma

    The singular end is straightened by ``sigma = u^(2/(1-gamma))``.
    """
    gamma = gamma_of_p(p)
    if tau == 0.0:
        return 0.0
    q = 2.0 / (1.0 - gamma)
    breaks = graded_breaks(tau**(1.0/q), rule.panels, rule.grading_exponent)
    (u, w) = gauss_panels(breaks, max(rule.nodes_per_panel, 8))

    total = 0.0
    for (uk, wk) in zip(u, w):
        sigma = uk**q
        s = max(tau - sigma, 0.0)
        kernel = np.exp(-(2.0 - gamma) * sigma) * t0(sigma)**(-0.5 * (1.0 + gamma))
        total += wk * q * uk**(q - 1.0) * kernel * \
            lp_norm(traj_U.at(s), p) * lp_norm(traj_V.at(s), p)

    return 2.0 * c0 * total


def _trusted_radius(grid):
    return grid.box_side / 4.0


def steady_residual(U_bar, tol=1e-6):
    """
    Residual of the steady equation on ``|y| < L/4`` and its L2 size
    relative to ``U_bar`` there. Returns ``(field, relative)``.
    """
    if divergence_residual(U_bar) > tol:
        raise PreconditionError("steady residual needs a solenoidal field "
            "(divergence residual %.3e)" % divergence_residual(U_bar))

    grid = U_bar.grid
    P = pressure_from_velocity(U_bar)
    R = U_bar + coordinate_advection(U_bar) + \
        tensor_divergence(U_bar, U_bar) * 2.0 + \
        gradient(P) * 2.0 - laplacian(U_bar) * 2.0

    mask = trusted_mask(grid, _trusted_radius(grid))
    R = R.masked(mask)
    scale = lp_norm(U_bar.masked(mask), 2)
    if scale == 0.0:
        return (R, 0.0)
    return (R, lp_norm(R, 2) / scale)


def _bump(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - x[inside]**2))
    return out


def _bump_slope(x):
    out = np.zeros_like(x)
    inside = np.abs(x) < 1.0
    xi = x[inside]
    out[inside] = np.exp(-1.0 / (1.0 - xi**2)) * (-2.0 * xi / (1.0 - xi**2)**2)
    return out


def compact_test_field(grid, seed=0):
    """
    Curl of ``psi(y) e`` with ``psi`` a tensor product of C-infinity
    bumps of radius ``L/8``. The centre lies within ``L/64`` of the
    origin and ``e`` is a random unit vector, both drawn from ``seed``.
    Normalised to unit peak magnitude.
    """
    rng = np.random.default_rng(seed)
    radius = grid.box_side / 8.0
    center = rng.uniform(-grid.box_side / 64.0, grid.box_side / 64.0, 3)
    e = rng.standard_normal(3)
    e /= np.linalg.norm(e)

    x = [(grid.coords - center[d]) / radius for d in range(3)]
    b = [_bump(xd) for xd in x]
    db = [_bump_slope(xd) / radius for xd in x]

    def outer3(f1, f2, f3):
        return f1[:, None, None] * f2[None, :, None] * f3[None, None, :]

    dpsi = [outer3(db[0], b[1], b[2]), outer3(b[0], db[1], b[2]),
        outer3(b[0], b[1], db[2])]
    phi = np.stack([
        dpsi[1] * e[2] - dpsi[2] * e[1],
        dpsi[2] * e[0] - dpsi[0] * e[2],
        dpsi[0] * e[1] - dpsi[1] * e[0]])

    peak = np.max(np.sqrt(np.sum(phi**2, axis=0)))
    return VectorField(grid, phi / peak)


def weak_steady_terms(U_bar, phi):
    """
    The four pairings of the weak steady equation, in order
    ``<phi, U>``, ``-<div(phi (x) y), U>``, ``-2 <grad phi, U (x) U>``
    and ``-2 <Lap phi, U>``.
    """
    grid = phi.grid
    outside = ~trusted_mask(grid, _trusted_radius(grid))
    if np.any(phi.magnitude()[outside] > 0.0):
        raise PreconditionError("test function reaches |y| >= L/4")
    if U_bar.grid != grid:
        raise DimensionError("test function and velocity on different grids")

    # (div(phi (x) y))_i = sum_j d_j (y_j phi_i)
    (y1, y2, y3) = grid.mesh
    hat = rfft3(phi.components[:, None] * np.stack([y1, y2, y3])[None, :])
    div_hat = sum(2j * np.pi * xi_d * hat[:, d] for (d, xi_d) in enumerate(grid.xi))
    transport = VectorField(grid, irfft3(grid, div_hat))

    J = gradient(phi).components
    UU = irfft3(grid, dealiased_products(U_bar, U_bar))
    # UU[i, j] holds U_i U_j, J[i, j] holds d_j phi_i
    quad = float(np.sum(J * UU) * grid.cell_volume)

    return (inner(phi, U_bar), -inner(transport, U_bar), -2.0 * quad,
        -2.0 * inner(laplacian(phi), U_bar))


def weak_steady_residual(U_bar, phi):
    return float(sum(weak_steady_terms(U_bar, phi)))


def holder_gap(R, phi, p):
    """
    ``(|int grad phi : R (x) R|, ||grad phi||_q ||R||_p^2)`` with
    ``q = p/(p-2)``.
    """
    if not p > 2.0:
        raise DomainError("Hoelder pairing needs p > 2, got %r" % p)
    q = p / (p - 2.0)
    J = gradient(phi)
    RR = R.components[:, None] * R.components[None, :]
    lhs = abs(float(np.sum(J.components * RR) * R.grid.cell_volume))
    rhs = lp_norm(J, q) * lp_norm(R, p)**2
    return (lhs, rhs)
