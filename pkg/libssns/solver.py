"""
Pseudo-spectral time stepping of the rescaled system

    U_tau + U + (y . grad) U + 2 (U . grad) U = -2 grad P + 2 Lap U

with the pressure eliminated by Leray projection. ``2 Lap`` is handled
exactly by an integrating factor, the rest by classical RK4 (Lawson).
"""

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .grid import VectorField, rfft3, irfft3, leray_project, laplacian
from .grid import coordinate_advection, divergence_residual, lp_norm
from .nonlinear import TimeSlices, bilinear_F
from .errors import DomainError, PreconditionError, NumericError, SchemeBlowupError
from .log import LOG


class Integrator(IntEnum):
    """ Time integration scheme """

    RK4_INTEGRATING_FACTOR = 0
    """ Lawson RK4 with the diffusion integrated exactly """


@dataclass
class SolverConfig:
    """ Settings of one `evolve` run """

    dt: float = 1e-2
    """ Largest tau step """
    t_end: float = 0.5
    """ Final rescaled time """
    integrator: int = Integrator.RK4_INTEGRATING_FACTOR
    cfl_safety: float = 0.5
    """ Fraction of the drift/advection stability limit dt may use """
    slices: int = 11
    """ Number of equally spaced output nodes when none are requested """

    def __post_init__(self):
        if not self.dt > 0.0:
            raise DomainError("dt must be positive, got %r" % self.dt)
        if not self.t_end >= 0.0:
            raise DomainError("t_end must be nonnegative, got %r" % self.t_end)
        if not (0.0 < self.cfl_safety < 1.0):
            raise DomainError("cfl safety must lie in (0, 1), got %r" % self.cfl_safety)
        if self.slices < 1:
            raise DomainError("need at least one output slice")
        self.integrator = Integrator(self.integrator)

    def stable_dt(self, U):
        """ ``cfl_safety * h / (L/2 + 2 max|U|)`` """
        grid = U.grid
        speed = 0.5 * grid.box_side + 2.0 * float(np.max(U.magnitude()))
        return self.cfl_safety * grid.spacing / speed


def linear_rhs(U):
    """ ``-U - P((y . grad) U) + 2 Lap U`` """
    return -U - leray_project(coordinate_advection(U)) + laplacian(U) * 2.0


def rhs(U, tol=1e-8):
    residual = divergence_residual(U)
    if residual > tol:
        raise PreconditionError("rhs needs a solenoidal field "
            "(divergence residual %.3e)" % residual)
    return linear_rhs(U) - bilinear_F(U, U)


def _nonstiff(U):
    # everything except the diffusion, projected as a whole
    return -U - leray_project(coordinate_advection(U)) - bilinear_F(U, U)


class _Lawson():

    def __init__(self, grid):
        self.grid = grid
        self._cache = {}

    def factor(self, h):
        if h not in self._cache:
            self._cache[h] = np.exp(-8.0 * np.pi**2 * self.grid.kappa_sq * h)
        return self._cache[h]

    def propagate(self, arr, h):
        return irfft3(self.grid, rfft3(arr) * self.factor(h))

    def step(self, U, h):
        grid = self.grid
        u = U.components
        half = self.propagate(u, 0.5 * h)

        k1 = _nonstiff(U).components
        a = self.propagate(u + 0.5 * h * k1, 0.5 * h)
        k2 = _nonstiff(VectorField(grid, a)).components
        b = half + 0.5 * h * k2
        k3 = _nonstiff(VectorField(grid, b)).components
        c = self.propagate(u, h) + h * self.propagate(k3, 0.5 * h)
        k4 = _nonstiff(VectorField(grid, c)).components

        out = self.propagate(u, h) + (h / 6.0) * (self.propagate(k1, h) + \
            2.0 * self.propagate(k2 + k3, 0.5 * h) + k4)
        return out


def evolve(U0, config=SolverConfig(), taus=None):
    """
    Integrate from ``U0`` and return the `TimeSlices` at ``taus``
    (default: ``config.slices`` equally spaced nodes on ``[0, t_end]``).
    Each interval between nodes is split into equal steps no larger than
    ``config.dt``.
    """
    residual = divergence_residual(U0)
    if residual > 1e-8:
        raise PreconditionError("initial data is not solenoidal "
            "(divergence residual %.3e)" % residual)

    if taus is None:
        taus = np.linspace(0.0, config.t_end, config.slices) \
            if config.slices > 1 else np.array([0.0])
    taus = np.asarray(taus, dtype=float)

    limit = config.stable_dt(U0)
    if config.dt > limit:
        raise DomainError("dt = %.3e exceeds the stability limit %.3e" % \
            (config.dt, limit))

    grid = U0.grid
    stepper = _Lawson(grid)
    saved = [U0]
    U = U0
    tau = 0.0

    for target in taus[1:]:
        count = max(1, int(np.ceil((target - tau) / config.dt - 1e-9)))
        h = (target - tau) / count
        for i in range(count):
            try:
                U = VectorField(grid, stepper.step(U, h))
            except NumericError:
                # a non-finite stage or result
                raise SchemeBlowupError(tau + (i + 1) * h,
                    TimeSlices(taus[:len(saved)], saved))
        tau = target
        saved.append(U)
        LOG.trace("direct: tau=%.4f |U|_2=%.6e" % (tau, lp_norm(U, 2)))

    LOG.debug("direct: %d slices up to tau=%g" % (len(saved), tau))
    return TimeSlices(taus, saved)


def trace(traj, p):
    """ Rows ``(tau, ||U||_2, ||U||_p, divergence residual)`` """
    return [(float(tau), lp_norm(U, 2), lp_norm(U, p), divergence_residual(U))
        for (tau, U) in traj]
