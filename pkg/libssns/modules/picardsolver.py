from . import Module, initial_field, check_initial, check_c0
from ..nonlinear import QuadratureRule
from ..picard import picard_solve, default_tau_grid
from ..container import dump_field
from ..errors import DomainError


class PicardSolver(Module):

    name = "picard"
    tag = "PIC"
    description = "Mild solution by successive approximation with K_n ledger"

    default_config = {
            "amplitude": 1e-3,
            "width": 16.0,
            "direction": [0.0, 0.0, 1.0],
            "tau_max": 0.5,
            "nodes": 6,
            "panels": 8,
            "nodes_per_panel": 4,
            "grading": 2.0,
            "max_iter": 30,
            "tol": 1e-8,
            "c0": None,
            "dump": None }

    columns = {
            "kn": ("n", "K_n", "gap_n"),
            "decay": ("tau", "norm_p", "envelope", "limit_residual"),
            "status": ("outcome", "iterations", "max_residual") }

    @classmethod
    def check(cls, conf):
        check_initial(conf)
        check_c0(conf["c0"], optional=True)
        QuadratureRule(conf["panels"], conf["nodes_per_panel"], conf["grading"])
        default_tau_grid(conf["tau_max"], conf["nodes"])
        if conf["max_iter"] < 1:
            raise DomainError("max_iter must be at least 1, got %r" % conf["max_iter"])
        if not float(conf["tol"]) >= 0.0:
            raise DomainError("tol must be nonnegative, got %r" % conf["tol"])

    def run(self, conf=default_config):

        session = self.session
        V0 = initial_field(session, conf)
        rule = QuadratureRule(conf["panels"], conf["nodes_per_panel"], conf["grading"])

        (Vbar, report) = picard_solve(V0, default_tau_grid(conf["tau_max"], conf["nodes"]),
            rule, conf["max_iter"], conf["tol"], session.config.p, conf["c0"],
            session.config.interpolation, session.config.workers, session.config.seed)
        self.publish(report.ledger)

        gaps = [None] + list(report.gap_history)
        for (n, K) in enumerate(report.kn_ledger):
            self.emit("kn", (n, K, gaps[n]))
        for row in report.rows:
            self.emit("decay", row)

        if report.warning is not None:
            self.emit("status", ("smallness-warning", report.iterations, report.max_residual))

        if report.converged and report.decay_ok:
            self.emit("status", ("converged", report.iterations, report.max_residual))
        else:
            outcome = "no-convergence" if not report.converged else "decay-violated"
            self.emit("status", (outcome, report.iterations, report.max_residual))
            self.ok = False

        if conf["dump"]:
            dump_field(Vbar.fields[-1], conf["dump"])
