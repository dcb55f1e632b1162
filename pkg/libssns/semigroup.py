"""
The linearised solution operator ``exp(-tau A)`` of the rescaled system,

    V(y, tau) = exp(-tau) * (H_{t0(tau)} V0)(exp(-tau) y),
    t0(tau)   = 1 - exp(-2 tau),

with ``H_t`` heat smoothing, and the empirical estimation of the heat
kernel constant ``c0``.
"""

from dataclasses import dataclass, field

import numpy as np

from .grid import Grid, Interpolation, ScalarField, VectorField, TensorField
from .grid import rfft3, irfft3, lp_norm, gradient, laplacian, resample
from .grid import coordinate_advection, trusted_mask, gaussian_scalar
from .grid import band_limited_scalar
from .errors import DomainError
from .log import LOG


def t0(tau):
    if not tau >= 0.0:
        raise DomainError("tau must be nonnegative, got %r" % tau)
    return -np.expm1(-2.0 * tau)


@dataclass(frozen=True)
class SemigroupParams:
    """ Everything needed to apply ``exp(-tau A)`` on one grid """

    tau: float
    """ Rescaled time """
    grid: Grid
    interpolation: Interpolation = Interpolation.FOURIER_RESAMPLE
    """ How the dilation step evaluates off-grid points """

    def __post_init__(self):
        if not (np.isfinite(self.tau) and self.tau >= 0.0):
            raise DomainError("tau must be finite and nonnegative, got %r" % self.tau)

    @property
    def smoothing_time(self):
        return t0(self.tau)

    @property
    def dilation(self):
        return np.exp(-self.tau)


def heat_apply(f, t):
    """ Fourier multiplier ``exp(-4 pi^2 |xi|^2 t)`` on every component """
    if not t >= 0.0:
        raise DomainError("heat time must be nonnegative, got %r" % t)
    if t == 0.0:
        return f

    grid = f.grid
    damp = np.exp(-4.0 * np.pi**2 * grid.kappa_sq * t)

    if isinstance(f, ScalarField):
        return ScalarField(grid, irfft3(grid, rfft3(f.values) * damp))
    return VectorField(grid, irfft3(grid, rfft3(f.components) * damp))


def dilate(f, lam, interpolation=Interpolation.FOURIER_RESAMPLE):
    """ ``y -> f(lam * y)`` for ``0 < lam <= 1`` """
    if not (0.0 < lam <= 1.0):
        raise DomainError("dilation factor must lie in (0, 1], got %r" % lam)
    if lam == 1.0:
        return f
    return resample(f, f.grid, lam, interpolation)


def _apply(params, V0):
    if params.tau == 0.0:
        return V0
    lam = params.dilation
    smoothed = heat_apply(V0, params.smoothing_time)
    return dilate(smoothed, lam, params.interpolation) * lam


def semigroup_apply(V0, tau, interpolation=Interpolation.FOURIER_RESAMPLE):
    return _apply(SemigroupParams(tau, V0.grid, interpolation), V0)


def semigroup_gradient(V0, tau, interpolation=Interpolation.FOURIER_RESAMPLE):
    """
    ``grad exp(-tau A) V0`` as a `TensorField`, formed by dilating the
    gradient of the smoothed field; the chain rule contributes one more
    factor ``exp(-tau)``.
    """
    params = SemigroupParams(tau, V0.grid, interpolation)
    J = gradient(heat_apply(V0, params.smoothing_time))
    if tau == 0.0:
        return J
    lam = params.dilation
    rows = [dilate(VectorField(J.grid, J.components[i]), lam,
        interpolation).components for i in range(3)]
    return TensorField(J.grid, np.stack(rows) * lam**2)


def linear_residual(V0, tau, dtau=1e-3, interpolation=Interpolation.FOURIER_RESAMPLE):
    """
    Consistency of `semigroup_apply` with the linear equation
    ``V_tau + V + (y . grad) V - 2 Lap V = 0``: centred differencing in
    tau, spectral operators in y, measured on ``|y| < L/4`` relative to
    the size of ``V_tau`` there.
    """
    if not (0.0 < dtau <= tau):
        raise DomainError("need 0 < dtau <= tau, got dtau=%r tau=%r" % (dtau, tau))

    V = semigroup_apply(V0, tau, interpolation)
    ahead = semigroup_apply(V0, tau + dtau, interpolation)
    behind = semigroup_apply(V0, tau - dtau, interpolation)
    dV = (ahead - behind) / (2.0 * dtau)

    R = dV + V + coordinate_advection(V) - 2.0 * laplacian(V)
    mask = trusted_mask(V0.grid, V0.grid.box_side / 4.0)
    scale = lp_norm(dV.masked(mask), 2)
    if scale == 0.0:
        return 0.0
    return lp_norm(R.masked(mask), 2) / scale


def _check_exponents(p_tilde, q_tilde):
    if not (1.0 < p_tilde <= q_tilde < np.inf):
        raise DomainError("need 1 < p_tilde <= q_tilde < inf, got (%r, %r)" % \
            (p_tilde, q_tilde))


def heat_ratio(w, t, p_tilde, q_tilde, with_gradient=False):
    """
    ``||(grad) H_t w||_q~ t^((delta + g)/2) / ||w||_p~`` with
    ``delta = 3/p~ - 3/q~`` and ``g`` 1 for the gradient form.
    """
    _check_exponents(p_tilde, q_tilde)
    base = lp_norm(w, p_tilde)
    if base == 0.0:
        return 0.0

    delta = 3.0/p_tilde - 3.0/q_tilde
    smoothed = heat_apply(w, t)
    if with_gradient:
        exponent = 0.5 * (delta + 1.0)
        top = lp_norm(gradient(smoothed), q_tilde)
    else:
        exponent = 0.5 * delta
        top = lp_norm(smoothed, q_tilde)

    if exponent > 0.0:
        top = top * t**exponent
    return top / base


def heat_family(grid, size=4, seed=0):
    """
    The members over which `estimate_c0` takes its supremum: centred
    Gaussians of ``size`` widths between ``(4 h)^2`` and ``(L/8)^2``,
    ``size`` random band-limited fields and ``size`` shifted Gaussians.
    Returns ``(member_id, ScalarField)`` pairs.
    """
    rng = np.random.default_rng(seed)
    a_min = (4.0 * grid.spacing)**2
    a_max = max(a_min, (grid.box_side / 8.0)**2)
    members = []

    for a in np.geomspace(a_min, a_max, size):
        members.append(("gaussian-a%.6g" % a, gaussian_scalar(grid, a)))

    kcap = max(1, int(grid.dealias_fraction * grid.n / 2) - 1)
    for i in range(size):
        kmax = min(kcap, 1 + i % 3)
        members.append(("bandlimited-%d" % i, band_limited_scalar(grid, kmax, rng)))

    a_mid = np.sqrt(a_min * a_max)
    for i in range(size):
        center = rng.uniform(-grid.box_side / 8.0, grid.box_side / 8.0, 3)
        members.append(("shifted-%d" % i, gaussian_scalar(grid, a_mid, center)))

    return members


def heat_times(grid, count=24):
    """
    ``t = 0`` followed by a log grid reaching the time at which a Gaussian
    of width ``(L/8)^2`` has spread to width ``(L/4)^2``.
    """
    if count < 2:
        raise DomainError("need at least 2 heat times, got %r" % count)
    a_min = (4.0 * grid.spacing)**2
    a_max = (grid.box_side / 8.0)**2
    t_max = ((grid.box_side / 4.0)**2 - a_max) / (4.0 * np.pi)
    t_min = 1e-6 * a_min / (4.0 * np.pi)
    return np.concatenate([[0.0], np.geomspace(t_min, t_max, count - 1)])


@dataclass
class C0Estimate:
    """ Empirical lower estimate of one heat kernel constant """

    value: float
    p_tilde: float
    q_tilde: float
    with_gradient: bool
    family: str
    """ Human readable description of the test family """
    rows: list = field(default_factory=list)
    """ ``(p_tilde, q_tilde, gradient, t, member_id, ratio)`` tuples """

    def __float__(self):
        return float(self.value)


def estimate_c0(p_tilde, q_tilde, with_gradient=False, grid=None, family_size=4,
        n_times=24, seed=0):
    """
    Supremum of `heat_ratio` over `heat_family` and `heat_times`. This is
    a lower estimate of the true constant, recorded with its family.
    """
    _check_exponents(p_tilde, q_tilde)
    if grid is None:
        grid = Grid(32, 16.0)

    times = heat_times(grid, n_times)
    members = heat_family(grid, family_size, seed)
    rows = []

    for (member_id, w) in members:
        for t in times:
            r = heat_ratio(w, t, p_tilde, q_tilde, with_gradient)
            rows.append((p_tilde, q_tilde, int(with_gradient), float(t), member_id, r))

    value = max(r[-1] for r in rows)
    family = "%d members (gaussian, bandlimited, shifted) x %d times on %d^3 L=%g seed=%d" % \
        (len(members), len(times), grid.n, grid.box_side, seed)
    LOG.debug("c0(p~=%g, q~=%g, grad=%d) = %.6e over %s" % \
        (p_tilde, q_tilde, int(with_gradient), value, family))

    return C0Estimate(value, p_tilde, q_tilde, bool(with_gradient), family, rows)


def ledger_c0(p, grid=None, family_size=4, seed=0):
    """
    The single ``c0`` used by the constants ledger: the largest of the
    contraction estimate ``(p, p)``, the gradient estimate ``(p, p)`` and
    the product estimate ``(p/2, p)`` with gradient.
    """
    estimates = [
        estimate_c0(p, p, False, grid, family_size, seed=seed),
        estimate_c0(p, p, True, grid, family_size, seed=seed),
        estimate_c0(p / 2.0, p, True, grid, family_size, seed=seed)]
    return max(estimates, key=float)


def smoothing_envelopes(V0, taus, p_tilde, q_tilde, c0):
    """
    Both sides of the two semigroup estimates at each tau::

        ||exp(-tau A) V0||_q~      <= c0 e^{-(1-3/q~) tau} t0^{-delta/2}     ||V0||_p~
        ||grad exp(-tau A) V0||_q~ <= c0 e^{-(2-3/q~) tau} t0^{-(1+delta)/2} ||V0||_p~

    Rows are ``(tau, value_lhs, value_rhs, grad_lhs, grad_rhs)``; at
    ``tau = 0`` a singular right side is reported as ``inf``.
    """
    _check_exponents(p_tilde, q_tilde)
    delta = 3.0/p_tilde - 3.0/q_tilde
    base = c0 * lp_norm(V0, p_tilde)
    rows = []

    for tau in taus:
        s = t0(tau)
        value_lhs = lp_norm(semigroup_apply(V0, tau), q_tilde)
        grad_lhs = lp_norm(semigroup_gradient(V0, tau), q_tilde)

        if s == 0.0:
            value_rhs = base if delta == 0.0 else np.inf
            grad_rhs = np.inf
        else:
            value_rhs = base * np.exp(-(1.0 - 3.0/q_tilde) * tau) * s**(-0.5 * delta)
            grad_rhs = base * np.exp(-(2.0 - 3.0/q_tilde) * tau) * \
                s**(-0.5 * (1.0 + delta))

        rows.append((float(tau), value_lhs, value_rhs, grad_lhs, grad_rhs))

    return rows
