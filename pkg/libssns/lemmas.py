"""
Scalar lemmas behind the Picard argument: the exponent ``gamma = 3/p``,
the constant ``c1`` bounding

    I(gamma, tau) = e^{-tau} int_0^tau e^{gamma s} (1 - e^{-2(tau-s)})^{-(1+gamma)/2} ds,

the recurrence ``K_{n+1} = K_0 + M K_n^2`` and the choice of ``tau_m``.
All functions are pure and work on plain floats.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy import special, optimize

from .errors import DomainError, QuadratureError
from .log import LOG


ONE_MINUS_E2 = -np.expm1(-2.0)

SMALLNESS = 1.0/6.0


def gamma_of_p(p):
    if not (3.0 < p < np.inf):
        raise DomainError("p must lie in (3, inf), got %r" % p)
    return 3.0 / p


def _check_gamma(gamma):
    if not (0.0 < gamma < 1.0):
        raise DomainError("gamma must lie in (0, 1), got %r" % gamma)


def c1_formula(gamma):
    """
    ``(2/(1-gamma) + max(1/gamma, 1/2)) (1-e^{-2})^{-(1+gamma)/2}``, the
    constant produced by the splitting argument.
    """
    _check_gamma(gamma)
    return (2.0/(1.0 - gamma) + max(1.0/gamma, 0.5)) * \
        ONE_MINUS_E2**(-0.5 * (1.0 + gamma))


def c1_formula_stated(gamma):
    """ The shorter form ``(2/(1-gamma) + 1/2) (1-e^{-2})^{-(1+gamma)/2}`` """
    _check_gamma(gamma)
    return (2.0/(1.0 - gamma) + 0.5) * ONE_MINUS_E2**(-0.5 * (1.0 + gamma))


def c1_integral_bound(gamma, tau):
    """ Two-case bound on ``I(gamma, tau)``; never exceeds `c1_formula` """
    c1 = c1_formula(gamma)
    if tau <= 1.0:
        return c1 * tau**(0.5 * (1.0 - gamma)) * np.exp(-(1.0 - gamma) * tau)
    return c1 * np.exp(-(1.0 - gamma) * tau)


def gauss_panels(breaks, order):
    """
    Composite Gauss-Legendre rule on consecutive intervals of ``breaks``.
    Returns ``(nodes, weights)``.
    """
    (x, w) = special.roots_legendre(order)
    breaks = np.asarray(breaks, dtype=float)
    (a, b) = (breaks[:-1, None], breaks[1:, None])
    nodes = 0.5 * (b - a) * x[None, :] + 0.5 * (a + b)
    weights = 0.5 * (b - a) * w[None, :]
    return (nodes.ravel(), weights.ravel())


def graded_breaks(length, panels, exponent):
    """ ``length * (k/panels)^exponent``, clustered toward zero """
    return length * (np.arange(panels + 1) / panels)**exponent


def _c1_pieces(gamma, tau, panels, order):
    # sigma = tau - s; the singular end sigma = 0 is straightened by
    # sigma = u^q which makes the integrand bounded near u = 0
    q = 2.0 / (1.0 - gamma)
    split = min(1.0, tau)

    (u, wu) = gauss_panels(graded_breaks(split**(1.0/q), panels, 2.0), order)
    sigma = u**q
    jac = q * u**(q - 1.0)
    near = np.sum(wu * jac * np.exp(-gamma * sigma) * \
        (-np.expm1(-2.0 * sigma))**(-0.5 * (1.0 + gamma)))

    far = 0.0
    if tau > 1.0:
        count = panels * int(np.ceil(tau - 1.0))
        (s, ws) = gauss_panels(np.linspace(1.0, tau, count + 1), order)
        far = np.sum(ws * np.exp(-gamma * s) * (-np.expm1(-2.0 * s))**(-0.5 * (1.0 + gamma)))

    return np.exp(-(1.0 - gamma) * tau) * (near + far)


def c1_integral(gamma, tau, tol=1e-10, order=8, max_panels=1024):
    """
    ``I(gamma, tau)`` self-converged by doubling the panel count until the
    relative change is below ``tol``. A final change above ``1e-6`` is a
    `QuadratureError`.
    """
    _check_gamma(gamma)
    if not tau >= 0.0:
        raise DomainError("tau must be nonnegative, got %r" % tau)
    if tau == 0.0:
        return 0.0

    panels = 4
    coarse = _c1_pieces(gamma, tau, panels, order)
    while True:
        panels *= 2
        fine = _c1_pieces(gamma, tau, panels, order)
        change = abs(fine - coarse) / abs(fine)
        if change <= tol:
            return fine
        if panels >= max_panels:
            break
        coarse = fine

    if change > 1e-6:
        raise QuadratureError("c1 integral at gamma=%g tau=%g did not converge "
            "(relative change %.3e)" % (gamma, tau, change), coarse, fine)
    LOG.debug("c1 integral at gamma=%g tau=%g stopped at change %.3e" % \
        (gamma, tau, change))
    return fine


def c1_integral_sup(gamma, tau_max=8.0, n_tau=161):
    """
    Largest ``I(gamma, tau)`` over ``[0, tau_max]``: a uniform scan
    followed by a bounded refinement around the best node.
    """
    _check_gamma(gamma)
    if not tau_max >= 4.0:
        raise DomainError("tau_max must be at least 4, got %r" % tau_max)
    if n_tau < 3:
        raise DomainError("need at least 3 tau nodes, got %r" % n_tau)

    taus = np.linspace(0.0, tau_max, n_tau)
    values = np.array([c1_integral(gamma, t) for t in taus])
    i = int(np.argmax(values))
    lo = taus[max(i - 1, 0)]
    hi = taus[min(i + 1, n_tau - 1)]

    res = optimize.minimize_scalar(lambda t: -c1_integral(gamma, t),
        bounds=(lo, hi), method='bounded', options={'xatol': 1e-10})
    best = max(values[i], -res.fun)
    LOG.trace("c1 sup at gamma=%g: %.12e near tau=%.6f" % (gamma, best, res.x))

    return float(best)


@dataclass
class InequalityReport:
    """ Outcome of `basic_inequality_check` """

    samples: int
    min_slack: float
    argmin: float

    @property
    def passed(self):
        return self.min_slack >= 0.0


def basic_inequality_check(samples=100000):
    """ ``1 - e^{-2x} >= (1 - e^{-2}) x`` on a uniform grid of ``[0, 1]`` """
    if samples < 2:
        raise DomainError("need at least 2 samples, got %r" % samples)
    x = np.linspace(0.0, 1.0, samples)
    slack = -np.expm1(-2.0 * x) - ONE_MINUS_E2 * x
    i = int(np.argmin(slack))
    return InequalityReport(samples, float(slack[i]), float(x[i]))


@dataclass
class RecurrenceResult:
    """
    The scalar majorant ``K~_{n+1} = K0 + M K~_n^2`` and what it certifies.
    Unpacks as ``(sequence, K_max, certified)``.
    """

    sequence: list
    K_max: float
    certified: bool
    fixed_point: Optional[float] = None
    """ ``(1 - sqrt(1 - 4 K0 M)) / (2 M)`` when real """
    contraction: float = 0.0
    """ ``max_j M (K_{j-1} + K_j)``; at most 1/2 when certified """

    def __iter__(self):
        return iter((self.sequence, self.K_max, self.certified))


def recurrence_majorant(K0, M, n_max=100):
    if not K0 >= 0.0:
        raise DomainError("K0 must be nonnegative, got %r" % K0)
    if not M > 0.0:
        raise DomainError("M must be positive, got %r" % M)
    if n_max < 1:
        raise DomainError("n_max must be at least 1, got %r" % n_max)

    seq = [float(K0)]
    for _ in range(n_max):
        nxt = K0 + M * seq[-1]**2
        if not np.isfinite(nxt) or nxt > 1e150:
            break
        seq.append(nxt)

    disc = 1.0 - 4.0 * K0 * M
    # stable form of (1 - sqrt(disc)) / (2M)
    fixed = 2.0 * K0 / (1.0 + np.sqrt(disc)) if disc >= 0.0 else None

    contraction = max([M * (a + b) for (a, b) in zip(seq[:-1], seq[1:])] or [0.0])

    if K0 * M <= SMALLNESS:
        K_max = 4.0/3.0 * K0
        tol = 1e-12 * max(1.0, K_max)
        certified = all(k <= K_max + tol for k in seq) and \
            2.0 * M * K_max <= 4.0/9.0 + 1e-12
    else:
        K_max = max(seq)
        certified = False

    return RecurrenceResult(seq, K_max, certified, fixed, contraction)


def tau_m_rule(norm_trace, c0, c1):
    """
    First ``tau`` in ``norm_trace`` (pairs ``(tau, ||U||_p)``, ascending)
    with ``2 c0^2 c1 ||U|| <= 1/6``; ``None`` while the trace is not yet
    small.
    """
    if len(norm_trace) == 0:
        raise DomainError("empty norm trace")
    for (tau, norm) in norm_trace:
        if 2.0 * c0**2 * c1 * norm <= SMALLNESS:
            return tau
    return None


@dataclass
class ConstantsLedger:
    """ The constants the Picard argument runs on """

    p: float
    gamma: float
    c0: float
    """ Empirical heat kernel constant """
    c1: float
    M: float
    """ Always ``2 c0 c1`` """
    K0: float
    K_max: float
    tau_m: float = 0.0
    c1_stated: float = 0.0
    """ The shorter c1 form, for side by side reporting """
    c0_family: str = ""
    """ Description of the family ``c0`` was estimated on """
    certified: bool = False
    extra: dict = field(default_factory=dict)

    @classmethod
    def build(cls, p, c0, norm_V0, tau_m=0.0, c0_family=""):
        gamma = gamma_of_p(p)
        if not c0 > 0.0:
            raise DomainError("c0 must be positive, got %r" % c0)
        c1 = c1_formula(gamma)
        M = 2.0 * c0 * c1
        K0 = c0 * norm_V0
        res = recurrence_majorant(K0, M)
        if not res.certified:
            LOG.warn("ledger smallness K0*M = %.6e exceeds 1/6" % (K0 * M))
        return cls(p, gamma, c0, c1, M, K0, res.K_max, tau_m,
            c1_formula_stated(gamma), c0_family, res.certified)

    @property
    def smallness(self):
        """ ``K0 M = 2 c0^2 c1 ||V0||_p`` """
        return self.K0 * self.M

    def items(self):
        return [('p', self.p), ('gamma', self.gamma), ('c0', self.c0),
            ('c1', self.c1), ('c1_stated', self.c1_stated), ('M', self.M),
            ('K0', self.K0), ('K_max', self.K_max), ('tau_m', self.tau_m),
            ('certified', int(self.certified))]
