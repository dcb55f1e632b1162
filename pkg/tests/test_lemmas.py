import numpy as np
import pytest
from scipy import integrate

from libssns.lemmas import (
    ONE_MINUS_E2,
    SMALLNESS,
    gamma_of_p,
    c1_formula,
    c1_formula_stated,
    c1_integral,
    c1_integral_bound,
    c1_integral_sup,
    gauss_panels,
    graded_breaks,
    basic_inequality_check,
    recurrence_majorant,
    tau_m_rule,
    ConstantsLedger,
)
from libssns.errors import DomainError


def _reference_integral(gamma, tau):
    """ Same integral through QUADPACK's algebraic-weight rule """
    alpha = -0.5 * (1.0 + gamma)

    def smooth(s):
        ratio = -np.expm1(-2.0 * s) / s if s > 0.0 else 2.0
        return np.exp(-gamma * s) * ratio**alpha

    (value, _) = integrate.quad(smooth, 0.0, tau, weight='alg', wvar=(alpha, 0.0),
        epsabs=0.0, epsrel=1e-13, limit=200)
    return np.exp(-(1.0 - gamma) * tau) * value


class TestGamma:

    def test_values(self):
        assert gamma_of_p(4.0) == 0.75
        assert gamma_of_p(6.0) == 0.5

    @pytest.mark.parametrize("p", [3.0, 2.0, np.inf, np.nan])
    def test_domain(self, p):
        with pytest.raises(DomainError):
            gamma_of_p(p)


class TestC1:

    def test_formula_values(self):
        assert c1_formula(0.5) == pytest.approx(6.6914, rel=1e-4)
        assert c1_formula(0.75) == pytest.approx(10.600, rel=1e-3)

    def test_stated_form_is_smaller(self):
        for g in (0.1, 0.5, 0.9):
            assert c1_formula_stated(g) <= c1_formula(g)
        assert c1_formula_stated(0.5) == pytest.approx(4.5 * ONE_MINUS_E2**(-0.75))

    @pytest.mark.parametrize("gamma", [0.0, 1.0, -0.5])
    def test_formula_domain(self, gamma):
        with pytest.raises(DomainError):
            c1_formula(gamma)

    def test_integral_at_zero(self):
        assert c1_integral(0.5, 0.0) == 0.0
        with pytest.raises(DomainError):
            c1_integral(0.5, -1.0)

    @pytest.mark.parametrize("gamma,tau", [(0.25, 0.3), (0.5, 2.0), (0.75, 5.5)])
    def test_integral_accuracy(self, gamma, tau):
        assert c1_integral(gamma, tau) == pytest.approx(
            _reference_integral(gamma, tau), rel=1e-9)

    @pytest.mark.parametrize("gamma", [0.25, 0.5, 0.75])
    def test_supremum_below_formula(self, gamma):
        sup = c1_integral_sup(gamma, tau_max=8.0, n_tau=41)
        assert 0.0 < sup <= c1_formula(gamma)

    def test_two_case_bound(self):
        for gamma in (0.25, 0.75):
            for tau in (0.01, 0.5, 1.0, 3.0):
                assert c1_integral(gamma, tau) <= c1_integral_bound(gamma, tau)

    def test_supremum_arguments(self):
        with pytest.raises(DomainError):
            c1_integral_sup(0.5, tau_max=2.0)
        with pytest.raises(DomainError):
            c1_integral_sup(0.5, n_tau=2)


class TestQuadrature:

    def test_panels_exact_for_polynomials(self):
        (x, w) = gauss_panels([0.0, 1.0, 3.0], 3)
        assert len(x) == 6
        assert np.sum(w * x**5) == pytest.approx(3.0**6 / 6.0, rel=1e-13)

    def test_graded_breaks(self):
        b = graded_breaks(1.0, 4, 2.0)
        assert np.allclose(b, [0.0, 1.0/16, 1.0/4, 9.0/16, 1.0])


class TestBasicInequality:

    def test_holds(self):
        report = basic_inequality_check()
        assert report.samples == 100000
        assert report.passed
        assert report.min_slack >= 0.0

    def test_endpoints_are_tight(self):
        report = basic_inequality_check(101)
        assert report.argmin in (0.0, 1.0)
        assert report.min_slack == pytest.approx(0.0, abs=1e-15)

    def test_samples(self):
        with pytest.raises(DomainError):
            basic_inequality_check(1)


class TestRecurrence:

    def test_certified_at_boundary(self):
        res = recurrence_majorant(1.0, SMALLNESS)

        assert res.certified
        assert res.K_max == pytest.approx(4.0 / 3.0)
        assert max(res.sequence) <= res.K_max
        assert res.fixed_point == pytest.approx(2.0 / (1.0 + np.sqrt(1.0 / 3.0)))
        assert res.contraction <= 0.5

    def test_unpacks(self):
        (seq, K_max, certified) = recurrence_majorant(0.1, 1.0, n_max=10)
        assert len(seq) == 11
        assert seq[0] == 0.1
        assert seq[1] == pytest.approx(0.11)
        assert certified

    def test_uncertified(self):
        """K0 M = 0.3 > 1/4 has no real fixed point and the sequence escapes."""
        res = recurrence_majorant(1.0, 0.3, n_max=200)
        assert not res.certified
        assert res.fixed_point is None
        assert res.K_max == max(res.sequence)
        assert res.K_max > 100.0

    def test_monotone(self, rng):
        for _ in range(20):
            K0 = 10.0**rng.uniform(-3.0, 1.0)
            M = rng.uniform(0.01, SMALLNESS) / K0
            seq = recurrence_majorant(K0, M, n_max=50).sequence
            assert all(b >= a for (a, b) in zip(seq[:-1], seq[1:]))

    @pytest.mark.parametrize("K0,M,n", [(-1.0, 1.0, 5), (1.0, 0.0, 5), (1.0, 1.0, 0)])
    def test_domain(self, K0, M, n):
        with pytest.raises(DomainError):
            recurrence_majorant(K0, M, n)


class TestTauM:

    def test_threshold(self):
        c1 = 6.6913
        threshold = 1.0 / (12.0 * c1)
        trace = [(0.0, 1.0), (0.5, 1.01 * threshold), (1.0, 0.99 * threshold),
            (1.5, 0.5 * threshold)]
        assert tau_m_rule(trace, 1.0, c1) == 1.0

    def test_not_yet_small(self):
        assert tau_m_rule([(0.0, 1.0), (1.0, 0.5)], 1.0, 6.69) is None

    def test_empty(self):
        with pytest.raises(DomainError):
            tau_m_rule([], 1.0, 6.69)


class TestLedger:

    def test_build(self):
        ledger = ConstantsLedger.build(4.0, 1.0, 1e-3)

        assert ledger.gamma == 0.75
        assert ledger.M == 2.0 * ledger.c0 * ledger.c1
        assert ledger.K0 == pytest.approx(1e-3)
        assert ledger.K_max == pytest.approx(4.0 / 3.0 * 1e-3)
        assert ledger.certified
        assert ledger.smallness == pytest.approx(2.0 * c1_formula(0.75) * 1e-3)
        assert ledger.c1_stated == c1_formula_stated(0.75)

    def test_items(self):
        keys = [k for (k, _) in ConstantsLedger.build(4.0, 1.0, 0.0).items()]
        assert keys == ['p', 'gamma', 'c0', 'c1', 'c1_stated', 'M', 'K0',
            'K_max', 'tau_m', 'certified']

    def test_uncertified(self):
        ledger = ConstantsLedger.build(4.0, 1.0, 1.0)
        assert not ledger.certified
        assert ledger.smallness > SMALLNESS

    def test_c0_must_be_positive(self):
        with pytest.raises(DomainError):
            ConstantsLedger.build(4.0, 0.0, 1.0)
