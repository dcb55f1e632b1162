from dataclasses import replace

import numpy as np
import pytest

from libssns.grid import Grid, VectorField, gaussian_curl_field, gaussian_field, lp_norm
from libssns.nonlinear import QuadratureRule, TimeSlices
from libssns.picard import (
    default_tau_grid,
    weighted_sup,
    picard_init,
    picard_step,
    picard_solve,
)
from libssns.solver import SolverConfig, evolve
from libssns.errors import DomainError, PreconditionError, RecurrenceViolation


CHEAP = QuadratureRule(panels=2, nodes_per_panel=3)


def _cheap_data(grid, norm=1e-3):
    V0 = gaussian_curl_field(grid, 4.0)
    return V0 * (norm / lp_norm(V0, 4.0))


class TestTauGrid:

    def test_endpoints(self):
        taus = default_tau_grid(6.0, 25)
        assert taus[0] == 0.0
        assert taus[-1] == 6.0
        assert len(taus) == 25
        assert np.all(np.diff(taus) > 0.0)

    def test_clustered_near_zero(self):
        taus = default_tau_grid(6.0, 25)
        steps = np.diff(taus)
        assert steps[0] < steps[-1]

    @pytest.mark.parametrize("tau_max,nodes", [(1.0, 1), (0.0, 5), (-1.0, 5)])
    def test_validation(self, tau_max, nodes):
        with pytest.raises(DomainError):
            default_tau_grid(tau_max, nodes)


class TestWeightedSup:

    def test_weight(self, small_grid):
        u = gaussian_curl_field(small_grid, 4.0)
        traj = TimeSlices([0.0, 1.0], [u, u])
        expected = np.exp(0.25) * lp_norm(u, 4.0)
        assert weighted_sup(traj, 4.0, 0.75) == pytest.approx(expected, rel=1e-14)


class TestPicardInit:

    def test_not_solenoidal(self, small_grid):
        with pytest.raises(PreconditionError, match="solenoidal"):
            picard_init(gaussian_field(small_grid, 4.0), [0.0, 0.1], c0=1.0)

    def test_grid_starts_at_zero(self, small_grid):
        with pytest.raises(DomainError):
            picard_init(_cheap_data(small_grid), [0.1, 0.2], c0=1.0)

    def test_first_iterate(self, small_grid):
        V0 = _cheap_data(small_grid)
        state = picard_init(V0, [0.0, 0.05, 0.1], CHEAP, c0=1.0)

        assert len(state.iterates) == 1
        assert state.latest.fields[0] is not V0
        assert lp_norm(state.latest.fields[0] - V0, 2) < 1e-10 * lp_norm(V0, 2)
        assert state.kn_ledger[0] == pytest.approx(1e-3, rel=1e-9)
        assert state.ledger.c0_family == "supplied"
        assert state.ledger.certified

    def test_first_ledger_entry_closed_form(self):
        grid = Grid(64, 32.0)
        width = 16.0
        scale = 1e-3 / lp_norm(gaussian_curl_field(grid, width), 4.0)
        taus = np.linspace(0.0, 0.3, 4)
        state = picard_init(gaussian_curl_field(grid, width) * scale, taus, CHEAP, c0=1.0)

        # heat widens the Gaussian by 4 pi t, the dilation by 1 / lambda^2
        expected = 0.0
        for tau in taus:
            (lam, t0) = (np.exp(-tau), -np.expm1(-2.0 * tau))
            V = gaussian_curl_field(grid, (width + 4.0 * np.pi * t0) / lam**2,
                amplitude=(width / (width + 4.0 * np.pi * t0))**1.5)
            expected = max(expected, np.exp(0.25 * tau) * lp_norm(V * scale, 4.0))

        assert state.kn_ledger[0] == pytest.approx(expected, rel=1e-7)

    def test_uncertified_data_still_starts(self, small_grid):
        state = picard_init(_cheap_data(small_grid, 0.1), [0.0, 0.1], CHEAP, c0=1.0)
        assert not state.ledger.certified
        assert state.ledger.smallness > 1.0 / 6.0


class TestPicardStep:

    def test_appends(self, small_grid):
        state = picard_init(_cheap_data(small_grid), [0.0, 0.05, 0.1], CHEAP, c0=1.0)
        nxt = picard_step(state)

        assert len(state.iterates) == 1
        assert len(nxt.iterates) == 2
        assert len(nxt.kn_ledger) == 2
        assert len(nxt.gap_history) == 1
        # V^(1)(0) = V^(0)(0) since G vanishes at tau = 0
        assert np.array_equal(nxt.latest.fields[0].components,
            state.latest.fields[0].components)

    def test_recurrence_violation(self, small_grid):
        state = picard_init(_cheap_data(small_grid), [0.0, 0.1], CHEAP, c0=1.0)
        broken = replace(state, ledger=replace(state.ledger, K0=0.0, M=1e-30))

        with pytest.raises(RecurrenceViolation) as info:
            picard_step(broken)
        assert info.value.iteration == 1
        assert info.value.lhs > info.value.rhs

    def test_workers_match_inline(self, small_grid):
        V0 = _cheap_data(small_grid)
        taus = [0.0, 0.05, 0.1]
        inline = picard_step(picard_init(V0, taus, CHEAP, c0=1.0))
        threaded = picard_step(picard_init(V0, taus, CHEAP, c0=1.0, workers=3))

        for (a, b) in zip(inline.latest.fields, threaded.latest.fields):
            assert np.array_equal(a.components, b.components)


class TestPicardSolve:

    def test_zero_data(self, small_grid):
        (Vbar, report) = picard_solve(VectorField.zeros(small_grid), [0.0, 0.1],
            CHEAP, c0=1.0)

        assert report.converged
        assert report.iterations == 1
        assert report.max_residual == 0.0
        assert all(lp_norm(f, 2) == 0.0 for f in Vbar.fields)

    def test_iteration_cap(self, small_grid):
        (_, report) = picard_solve(_cheap_data(small_grid), [0.0, 0.1], CHEAP,
            max_iter=1, tol=0.0, c0=1.0)
        assert not report.converged
        assert report.iterations == 1


@pytest.mark.slow
class TestMildSolution:

    @pytest.fixture(scope="class")
    def taus(self):
        return np.linspace(0.0, 0.5, 11)

    @pytest.fixture(scope="class")
    def solved(self, small_data, taus):
        return picard_solve(small_data, taus, max_iter=12, c0=1.0)

    def test_converges(self, solved):
        (_, report) = solved
        assert report.converged
        assert report.iterations <= 12
        assert report.warning is None
        assert report.ledger.certified

    def test_contracts(self, solved):
        (_, report) = solved
        assert all(r <= 0.55 for r in report.gap_ratios)

    def test_limit_equation(self, solved):
        (_, report) = solved
        assert report.max_residual < 1e-6

    def test_decay_envelope(self, solved):
        (_, report) = solved
        assert report.decay_ok
        assert report.error_bound_ok
        assert len(report.rows) == 11

    def test_ledger_recurrence(self, solved):
        (_, report) = solved
        ledger = report.ledger
        for (a, b) in zip(report.kn_ledger[:-1], report.kn_ledger[1:]):
            assert b <= 1.05 * (ledger.K0 + ledger.M * a**2)
        assert report.majorant.certified

    def test_below_majorant(self, solved):
        (_, report) = solved
        majorant = report.majorant.sequence
        assert len(majorant) >= len(report.kn_ledger)
        for (K, bound) in zip(report.kn_ledger, majorant):
            assert K <= 1.05 * bound

    def test_matches_direct_solver(self, solved, small_data, taus):
        (Vbar, _) = solved
        direct = evolve(small_data, SolverConfig(dt=0.01, t_end=0.5), taus)

        scale = lp_norm(small_data, 2)
        for (V, U) in zip(Vbar.fields, direct.fields):
            assert lp_norm(V - U, 2) < 1e-4 * scale
