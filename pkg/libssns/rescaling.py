"""
Dynamic rescaling about a putative singular time ``T``::

    tau = 1/2 log(T / (T - t)),   y = x / sqrt(T - t),
    u(x, t) = (T - t)^{-1/2} U(y, tau),   p(x, t) = (T - t)^{-1} P(y, tau)

and the bookkeeping that turns decay of ``U`` into bounds on ``u``.

Without an explicit target grid the transforms are exact: the field
values are kept and the box is rescaled, ``L_y = L_x / sqrt(T - t)``.
"""

from dataclasses import dataclass

import numpy as np

from .grid import VectorField, ScalarField, Interpolation, resample
from .grid import lp_norm
from .lemmas import gamma_of_p
from .errors import DomainError, DimensionError, PreconditionError


def _check_T(T):
    if not (np.isfinite(T) and T > 0.0):
        raise DomainError("T must be positive, got %r" % T)


def tau_of_t(T, t):
    _check_T(T)
    if not (0.0 <= t < T):
        raise DomainError("need 0 <= t < T, got t=%r T=%r" % (t, T))
    return -0.5 * np.log1p(-t / T)


def t_of_tau(T, tau):
    _check_T(T)
    if not (tau >= 0.0 and np.isfinite(tau)):
        raise DomainError("tau must be finite and nonnegative, got %r" % tau)
    return -T * np.expm1(-2.0 * tau)


def t_m(T, tau_m):
    """ Physical time at which the smallness rule first holds """
    return t_of_tau(T, tau_m)


@dataclass(frozen=True)
class TimeMap:
    """ One instant seen in both clocks """

    T: float
    """ Putative singular time """
    t: float = 0.0

    def __post_init__(self):
        tau_of_t(self.T, self.t)

    @classmethod
    def from_tau(cls, T, tau):
        return cls(T, t_of_tau(T, tau))

    @property
    def tau(self):
        return tau_of_t(self.T, self.t)

    @property
    def scale(self):
        """ ``sqrt(T - t)``, the length of one ``y`` unit in ``x`` """
        return np.sqrt(self.T - self.t)


def to_selfsimilar(u, T, t, target=None, interpolation=Interpolation.FOURIER_RESAMPLE):
    """ ``U(y) = sqrt(T - t) u(sqrt(T - t) y)`` """
    s = TimeMap(T, t).scale
    if target is None:
        return VectorField(u.grid.scaled(1.0 / s), u.components * s)
    return resample(u, target, s, interpolation) * s


def from_selfsimilar(U, T, tau, target=None, interpolation=Interpolation.FOURIER_RESAMPLE):
    """ ``u(x) = U(x / sqrt(T - t)) / sqrt(T - t)`` """
    s = TimeMap.from_tau(T, tau).scale
    if target is None:
        return VectorField(U.grid.scaled(s), U.components / s)
    return resample(U, target, 1.0 / s, interpolation) / s


def pressure_to_selfsimilar(p, T, t):
    """ ``P(y) = (T - t) p(sqrt(T - t) y)`` on the rescaled box """
    s = TimeMap(T, t).scale
    return ScalarField(p.grid.scaled(1.0 / s), p.values * s**2)


def pressure_from_selfsimilar(P, T, tau):
    s = TimeMap.from_tau(T, tau).scale
    return ScalarField(P.grid.scaled(s), P.values / s**2)


@dataclass
class ProfileTrace:
    """ ``||U(tau) - Ubar||_p`` along a trajectory """

    rows: list
    """ ``(tau, distance)`` pairs """
    converged: bool


def profile_convergence(traj_U, U_bar, p, tol=1e-6):
    """
    Distance of every slice to ``U_bar``. Converged when the last three
    distances are below ``tol`` and non-increasing.
    """
    if traj_U.grid != U_bar.grid:
        raise DimensionError("profile and trajectory live on different grids")
    rows = [(float(tau), lp_norm(U - U_bar, p)) for (tau, U) in traj_U]
    tail = [d for (_, d) in rows[-3:]]
    converged = len(tail) == 3 and all(d < tol for d in tail) and \
        tail[0] >= tail[1] >= tail[2]
    return ProfileTrace(rows, converged)


@dataclass
class DecayReport:
    """ Weighted maxima on the annulus ``L/8 <= |y| <= L/4`` """

    C: float
    velocity: float
    """ ``max |U| |y|`` """
    pressure: float = 0.0
    """ ``max |P| |y|^2``; zero when no pressure was checked """

    @property
    def passed(self):
        return self.velocity <= self.C and self.pressure <= self.C


def pointwise_decay_check(U, C, P=None):
    if not C > 0.0:
        raise DomainError("decay constant must be positive, got %r" % C)
    grid = U.grid
    r = grid.radius
    shell = (r >= grid.box_side / 8.0) & (r <= grid.box_side / 4.0)

    velocity = float(np.max((U.magnitude() * r)[shell]))
    pressure = 0.0
    if P is not None:
        pressure = float(np.max((np.abs(P.values) * r**2)[shell]))
    return DecayReport(C, velocity, pressure)


def non_blowup_bound(ledger, T):
    """ ``K_max e^{(1-gamma) tau_m} / T^{(1-gamma)/2}`` """
    _check_T(T)
    if not ledger.certified:
        raise PreconditionError("non-blowup bound needs a certified ledger "
            "(K0 M = %.6e > 1/6)" % ledger.smallness)
    a = 1.0 - ledger.gamma
    return ledger.K_max * np.exp(a * ledger.tau_m) / T**(0.5 * a)


def cancellation_residual(T, t, gamma):
    """
    Relative deviation of ``(T-t)^{-(1-gamma)/2} e^{-(1-gamma) tau}`` from
    ``T^{-(1-gamma)/2}``; zero in exact arithmetic.
    """
    a = 1.0 - gamma
    tau = tau_of_t(T, t)
    lhs = (T - t)**(-0.5 * a) * np.exp(-a * tau)
    rhs = T**(-0.5 * a)
    return abs(lhs - rhs) / rhs


def lps_check(p, q):
    """ ``3/p + 2/q <= 1``; either exponent may be ``inf`` """
    if not (p >= 3.0 and q >= 1.0):
        return False
    return 3.0 / p + 2.0 / q <= 1.0


def physical_norm_trace(traj_U, T, ledger, tau_offset=0.0):
    """
    Rows ``(tau, t, ||U||_p, ||u||_p, envelope, bound, pass)`` where
    ``u`` is the physical field reconstructed from each slice, the
    envelope is ``K_max e^{-(1-gamma)(tau - tau_m)}`` and ``bound`` is
    `non_blowup_bound`. Only slices with ``tau >= tau_m`` are judged.
    """
    p = ledger.p
    gamma = gamma_of_p(p)
    bound = non_blowup_bound(ledger, T) if ledger.certified else np.inf
    rows = []

    for (tau, U) in traj_U:
        tau = float(tau) + tau_offset
        t = t_of_tau(T, tau)
        norm_U = lp_norm(U, p)
        norm_u = lp_norm(from_selfsimilar(U, T, tau), p)
        envelope = ledger.K_max * np.exp(-(1.0 - gamma) * (tau - ledger.tau_m))
        ok = tau < ledger.tau_m or norm_u <= 1.05 * bound
        rows.append((tau, t, norm_U, norm_u, envelope, bound, int(ok)))

    return rows
