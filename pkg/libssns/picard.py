"""
Successive approximation of the mild solution

    V^(0)(tau)   = exp(-tau A) V0
    V^(n+1)(tau) = V^(0)(tau) - G(V^(n), V^(n))(tau)

on a finite tau grid, together with the ledger ``K_n`` of weighted sup
norms ``sup_tau e^{(1-gamma) tau} ||V^(n)(tau)||_p``, the gaps between
consecutive iterates and the residual of the limit equation.

>>> from libssns.grid import Grid, gaussian_curl_field
>>> from libssns.picard import picard_solve, default_tau_grid
>>> V0 = gaussian_curl_field(Grid(32, 32.0), width=16.0, amplitude=1e-3)
>>> (Vbar, report) = picard_solve(V0, default_tau_grid(0.5, 6))
"""

from dataclasses import dataclass, field, replace
from concurrent.futures import ThreadPoolExecutor
from typing import Optional

import numpy as np

from .grid import Interpolation, lp_norm, leray_project, divergence_residual
from .semigroup import semigroup_apply, ledger_c0
from .nonlinear import TimeSlices, QuadratureRule, duhamel_G
from .lemmas import ConstantsLedger, RecurrenceResult, recurrence_majorant
from .errors import DomainError, PreconditionError, RecurrenceViolation
from .log import LOG


SLACK = 1.05


def default_tau_grid(tau_max=6.0, nodes=25, beta=3.0):
    """ ``nodes`` points on ``[0, tau_max]``, exponentially clustered near 0 """
    if nodes < 2 or not tau_max > 0.0:
        raise DomainError("need at least 2 nodes on a positive horizon")
    x = np.linspace(0.0, 1.0, nodes)
    taus = tau_max * np.expm1(beta * x) / np.expm1(beta)
    taus[0] = 0.0
    taus[-1] = tau_max
    return taus


def weighted_sup(traj, p, gamma):
    """ ``sup_tau e^{(1-gamma) tau} ||V(tau)||_p`` over the slices """
    return max(np.exp((1.0 - gamma) * tau) * lp_norm(f, p) for (tau, f) in traj)


def _difference(a, b):
    return TimeSlices(a.taus, [x - y for (x, y) in zip(a.fields, b.fields)])


@dataclass(frozen=True)
class PicardState:
    """ Iterates so far and their ledgers; never mutated, steps return a new one """

    iterates: tuple
    """ `TimeSlices` V^(0), V^(1), ... on one tau grid """
    kn_ledger: tuple
    gap_history: tuple
    p: float
    rule: QuadratureRule
    ledger: ConstantsLedger
    interpolation: Interpolation = Interpolation.FOURIER_RESAMPLE
    workers: Optional[int] = None
    """ Threads used across tau nodes within one step; ``None`` runs inline """

    @property
    def gamma(self):
        return self.ledger.gamma

    @property
    def taus(self):
        return self.iterates[0].taus

    @property
    def latest(self):
        return self.iterates[-1]

    @property
    def gap_ratios(self):
        gaps = self.gap_history
        return [b / a if a > 0.0 else 0.0 for (a, b) in zip(gaps[:-1], gaps[1:])]


def _map_nodes(fn, count, workers):
    if workers is None or workers <= 1:
        return [fn(k) for k in range(count)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count)))


def picard_init(V0, tau_grid, rule=QuadratureRule(), p=4.0, c0=None,
        interpolation=Interpolation.FOURIER_RESAMPLE, workers=None, seed=0):
    """
    Iterate 0 is ``tau -> exp(-tau A) V0``. When ``c0`` is not given it is
    estimated on ``V0``'s grid with `ledger_c0`.
    """
    residual = divergence_residual(V0)
    if residual > 1e-8:
        raise PreconditionError("initial data is not solenoidal "
            "(divergence residual %.3e)" % residual)

    taus = np.asarray(tau_grid, dtype=float)
    if len(taus) == 0 or taus[0] != 0.0:
        raise DomainError("tau grid must start at 0")

    family = "supplied"
    if c0 is None:
        est = ledger_c0(p, V0.grid, seed=seed)
        (c0, family) = (float(est), est.family)

    ledger = ConstantsLedger.build(p, c0, lp_norm(V0, p), c0_family=family)
    if not ledger.certified:
        LOG.warn("smallness 2 c0^2 c1 ||V0||_p = %.6e > 1/6; "
            "convergence is not guaranteed" % ledger.smallness)

    def slice_at(k):
        return leray_project(semigroup_apply(V0, taus[k], interpolation))

    first = TimeSlices(taus, _map_nodes(slice_at, len(taus), workers))
    K0 = weighted_sup(first, p, ledger.gamma)
    LOG.debug("picard init: %d tau nodes, K_0 = %.6e, ledger K0 = %.6e" % \
        (len(taus), K0, ledger.K0))

    return PicardState((first,), (K0,), (), p, rule, ledger, interpolation, workers)


def picard_step(state):
    if len(state.iterates) == 0:
        raise DomainError("picard step needs at least one iterate")

    base = state.iterates[0]
    prev = state.latest
    taus = state.taus

    def slice_at(k):
        G = duhamel_G(prev, prev, taus[k], state.rule, state.interpolation)
        return base.fields[k] - G

    new = TimeSlices(taus, _map_nodes(slice_at, len(taus), state.workers))

    n = len(state.iterates) - 1
    K_prev = state.kn_ledger[-1]
    K_new = weighted_sup(new, state.p, state.gamma)
    gap = weighted_sup(_difference(new, prev), state.p, state.gamma)

    bound = state.ledger.K0 + state.ledger.M * K_prev**2
    LOG.trace("picard n=%d: K=%.6e bound=%.6e gap=%.6e" % (n + 1, K_new, bound, gap))
    if K_new > SLACK * bound:
        raise RecurrenceViolation(K_new, bound, n + 1)

    return replace(state, iterates=state.iterates + (new,),
        kn_ledger=state.kn_ledger + (K_new,),
        gap_history=state.gap_history + (gap,))


@dataclass
class PicardReport:
    """ What `picard_solve` found; ``rows`` follow the decay CSV block """

    converged: bool
    iterations: int
    ledger: ConstantsLedger
    kn_ledger: list
    gap_history: list
    rows: list = field(default_factory=list)
    """ ``(tau, ||Vbar||_p, K_max e^{-(1-gamma) tau}, limit residual)`` """
    error_history: list = field(default_factory=list)
    """ ``sup_tau e^{(1-gamma) tau} ||V^(n) - Vbar||_p`` per iterate """
    majorant: Optional[RecurrenceResult] = None
    warning: Optional[str] = None

    @property
    def max_residual(self):
        return max([r[3] for r in self.rows] or [0.0])

    @property
    def decay_ok(self):
        return all(r[1] <= SLACK * r[2] for r in self.rows)

    @property
    def gap_ratios(self):
        gaps = self.gap_history
        return [b / a if a > 0.0 else 0.0 for (a, b) in zip(gaps[:-1], gaps[1:])]

    @property
    def error_bound_ok(self):
        """ Every ``V^(n) - Vbar`` within ``2 K_max`` in the weighted norm """
        return all(e <= SLACK * 2.0 * self.ledger.K_max for e in self.error_history)


def limit_residual(state, Vbar):
    """ ``||Vbar - V^(0) + G(Vbar, Vbar)||_p`` at every tau node """
    base = state.iterates[0]

    def at(k):
        G = duhamel_G(Vbar, Vbar, state.taus[k], state.rule, state.interpolation)
        return lp_norm(Vbar.fields[k] - base.fields[k] + G, state.p)

    return _map_nodes(at, len(state.taus), state.workers)


def picard_solve(V0, tau_grid=None, rule=QuadratureRule(), max_iter=30, tol=1e-8,
        p=4.0, c0=None, interpolation=Interpolation.FOURIER_RESAMPLE, workers=None,
        seed=0):
    """
    Iterate until the weighted gap drops below ``tol`` or ``max_iter``
    steps were taken. Returns ``(Vbar, report)``; an unconverged run is
    flagged in the report rather than raised.
    """
    if tau_grid is None:
        tau_grid = default_tau_grid()

    state = picard_init(V0, tau_grid, rule, p, c0, interpolation, workers, seed)
    ledger = state.ledger
    warning = None
    if not ledger.certified:
        warning = "smallness %.6e > 1/6" % ledger.smallness

    converged = False
    for _ in range(max_iter):
        state = picard_step(state)
        if state.gap_history[-1] < tol:
            converged = True
            break

    Vbar = state.latest
    residuals = limit_residual(state, Vbar)
    gamma = state.gamma
    rows = []
    for (k, (tau, f)) in enumerate(Vbar):
        envelope = ledger.K_max * np.exp(-(1.0 - gamma) * tau)
        rows.append((float(tau), lp_norm(f, state.p), envelope, residuals[k]))

    errors = [weighted_sup(_difference(it, Vbar), state.p, gamma)
        for it in state.iterates]

    iterations = len(state.iterates) - 1
    if converged:
        LOG.info("picard converged after %d iterations (gap %.3e)" % \
            (iterations, state.gap_history[-1]))
    else:
        LOG.warn("picard did not converge in %d iterations (gap %.3e)" % \
            (iterations, state.gap_history[-1] if state.gap_history else np.nan))

    report = PicardReport(converged, iterations, ledger, list(state.kn_ledger),
        list(state.gap_history), rows, errors,
        recurrence_majorant(ledger.K0, ledger.M, max(iterations, 1)), warning)

    return (Vbar, report)
