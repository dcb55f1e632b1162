"""
End to end: physical data -> rescaled variables -> direct integration ->
smallness rule -> ledger -> Picard cross-check -> physical norm trace
against the non-blowup bound.
"""

from . import Module, initial_field, check_initial, check_c0
from ..grid import lp_norm
from ..semigroup import ledger_c0
from ..solver import SolverConfig, evolve
from ..nonlinear import TimeSlices
from ..picard import picard_solve
from ..lemmas import ConstantsLedger, tau_m_rule, c1_formula
from ..rescaling import tau_of_t, to_selfsimilar, physical_norm_trace
from ..log import LOG


class Pipeline(Module):

    name = "pipeline"
    tag = "PIPE"
    description = "Rescale, integrate, certify and bound the physical L^p norm"

    default_config = {
            "amplitude": 1e-3,
            "width": 16.0,
            "direction": [0.0, 0.0, 1.0],
            "T": 1.0,
            "t_end": 0.5,
            "dt": 1e-2,
            "slices": 11,
            "c0": None,
            "picard": True }

    columns = {
            "trace": ("tau", "t", "norm_U", "norm_u", "envelope", "bound", "pass"),
            "crosscheck": ("tau", "norm_picard", "norm_direct", "rel_l2_diff"),
            "status": ("outcome", "tau_m") }

    @classmethod
    def check(cls, conf):
        check_initial(conf)
        check_c0(conf["c0"], optional=True)
        tau_of_t(conf["T"], 0.0)
        SolverConfig(conf["dt"], conf["t_end"], slices=conf["slices"])

    def run(self, conf=default_config):

        session = self.session
        p = session.config.p
        T = conf["T"]

        u0 = initial_field(session, conf)
        U0 = to_selfsimilar(u0, T, 0.0)

        traj = evolve(U0, SolverConfig(conf["dt"], conf["t_end"], slices=conf["slices"]))

        c0 = conf["c0"]
        family = "supplied"
        if c0 is None:
            est = ledger_c0(p, U0.grid, seed=session.config.seed)
            (c0, family) = (float(est), est.family)

        unscaled = ConstantsLedger.build(p, c0, 0.0)
        norms = [(float(tau), lp_norm(U, p)) for (tau, U) in traj]
        tau_m = tau_m_rule(norms, c0, c1_formula(unscaled.gamma))
        if tau_m is None:
            self.publish(unscaled)
            self.emit("status", ("not-yet-small", None))
            self.ok = False
            return

        k = [tau for (tau, _) in norms].index(tau_m)
        ledger = ConstantsLedger.build(p, c0, norms[k][1], tau_m, family)
        self.publish(ledger)

        tail = TimeSlices(traj.taus[k:] - tau_m, traj.fields[k:])
        if conf["picard"] and len(tail) > 1:
            (Vbar, report) = picard_solve(tail.fields[0], tail.taus, c0=c0, p=p,
                interpolation=session.config.interpolation,
                workers=session.config.workers)
            for ((tau, V), U) in zip(Vbar, tail.fields):
                scale = lp_norm(U, 2)
                diff = lp_norm(V - U, 2) / scale if scale > 0.0 else 0.0
                self.emit("crosscheck", (float(tau) + tau_m, lp_norm(V, p),
                    lp_norm(U, p), diff))

        for row in physical_norm_trace(traj, T, ledger):
            self.emit("trace", row)
            if not row[-1]:
                self.ok = False

        outcome = "bounded" if self.ok else "bound-violated"
        LOG.info("pipeline: %s (tau_m = %g)" % (outcome, tau_m))
        self.emit("status", (outcome, tau_m))
