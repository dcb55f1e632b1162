import numpy as np

from . import Module
from .. import generic_check_runner
from ..lemmas import gamma_of_p, c1_formula, c1_formula_stated, c1_integral
from ..lemmas import c1_integral_sup, c1_integral_bound, basic_inequality_check
from ..lemmas import recurrence_majorant, ConstantsLedger, SMALLNESS
from ..errors import DomainError


class LemmaVerifier(Module):

    name = "verify-lemmas"
    tag = "VL"
    description = "Scalar checks of gamma, c1, the basic inequality and the K_n recurrence"

    default_config = {
            "gammas": [0.1, 0.25, 0.5, 0.75, 0.9],
            "tau_max": 8.0,
            "n_tau": 161,
            "samples": 100000,
            "pairs": 200,
            "divergent_pairs": 50,
            "n_max": 100,
            "K0": None,
            "M": None,
            "c0": 1.0 }

    columns = {
            "checks": ("check_id", "gamma_or_params", "lhs", "rhs", "slack", "pass"),
            "majorant": ("K0", "M", "K_max", "fixed_point", "contraction", "certified"),
            "c1_forms": ("gamma", "sup_integral", "c1", "c1_stated", "stated_holds") }

    @classmethod
    def check(cls, conf):
        for g in conf["gammas"]:
            c1_formula(g)
        if conf["n_tau"] < 2 or conf["samples"] < 1 or conf["n_max"] < 1:
            raise DomainError("n_tau, samples and n_max are too small")
        if conf["pairs"] < 1 or conf["divergent_pairs"] < 1:
            raise DomainError("need at least one recurrence pair of each kind")
        if (conf["K0"] is None) != (conf["M"] is None):
            raise DomainError("K0 and M are given together")
        if conf["K0"] is not None and not (conf["K0"] >= 0.0 and conf["M"] > 0.0):
            raise DomainError("need K0 >= 0 and M > 0, got (%r, %r)" % (conf["K0"], conf["M"]))

    def _gamma_checks(self):
        for p in (3.5, 4.0, 6.0, 12.0):
            yield ("gamma-range", "p=%g" % p, gamma_of_p(p), 1.0)

    def _c1_checks(self, conf):
        for g in conf["gammas"]:
            sup = c1_integral_sup(g, conf["tau_max"], conf["n_tau"])
            yield ("c1-integral", "gamma=%g" % g, sup, c1_formula(g))
            yield ("c1-small-tau", "gamma=%g;tau=0.01" % g,
                c1_integral(g, 0.01), c1_integral_bound(g, 0.01))
            # the shorter form is informative; the computed supremum may exceed it
            stated = c1_formula_stated(g)
            self.emit("c1_forms", (g, sup, c1_formula(g), stated, int(sup <= stated)))

    def _recurrence_checks(self, conf, rng):
        ratio = 0.0
        two_mk = 0.0
        uncertified = 0
        for _ in range(conf["pairs"]):
            K0 = 10.0**rng.uniform(-3.0, 2.0)
            M = rng.uniform(0.0, SMALLNESS) / K0
            res = recurrence_majorant(K0, M, conf["n_max"])
            ratio = max(ratio, max(res.sequence) / (4.0/3.0 * K0))
            two_mk = max(two_mk, 2.0 * M * max(res.sequence))
            uncertified += int(not res.certified)
        yield ("recurrence-bound", "pairs=%d" % conf["pairs"], ratio, 1.0)
        yield ("recurrence-2MKmax", "pairs=%d" % conf["pairs"], two_mk, 4.0/9.0)
        yield ("recurrence-uncertified", "pairs=%d" % conf["pairs"], float(uncertified), 0.0)

        certified = 0
        for _ in range(conf["divergent_pairs"]):
            K0 = 10.0**rng.uniform(-3.0, 2.0)
            M = rng.uniform(0.25, 4.0) / K0 * (1.0 + 1e-9)
            certified += int(recurrence_majorant(K0, M, conf["n_max"]).certified)
        yield ("recurrence-divergent", "pairs=%d" % conf["divergent_pairs"],
            float(certified), 0.0)

        boundary = recurrence_majorant(1.0, SMALLNESS, conf["n_max"])
        yield ("recurrence-boundary", "K0=1;M=1/6", boundary.fixed_point, 4.0/3.0)

    def run(self, conf=default_config):

        rng = np.random.default_rng(self.session.config.seed)
        p = self.session.config.p
        self.publish(ConstantsLedger.build(p, conf["c0"], 0.0, c0_family="nominal"))

        checks = list(self._gamma_checks())
        checks += list(self._c1_checks(conf))

        slack = basic_inequality_check(conf["samples"])
        checks.append(("basic-inequality", "samples=%d" % slack.samples,
            0.0, slack.min_slack))
        checks += list(self._recurrence_checks(conf, rng))

        if not generic_check_runner(checks, self.sink):
            self.ok = False

        # an explicit pair is informative only; uncertified is not a failure
        if conf["K0"] is not None and conf["M"] is not None:
            res = recurrence_majorant(conf["K0"], conf["M"], conf["n_max"])
            self.emit("majorant", (float(conf["K0"]), float(conf["M"]), res.K_max,
                res.fixed_point, res.contraction, int(res.certified)))
