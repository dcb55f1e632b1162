from . import Module, initial_field, check_initial, check_c0
from ..solver import SolverConfig, evolve, trace
from ..nonlinear import steady_residual
from ..lemmas import ConstantsLedger
from ..grid import lp_norm
from ..container import dump_field


class TimeStepper(Module):

    name = "direct"
    tag = "DIR"
    description = "Pseudo-spectral integration of the rescaled system"

    default_config = {
            "amplitude": 1e-3,
            "width": 16.0,
            "direction": [0.0, 0.0, 1.0],
            "dt": 1e-2,
            "t_end": 0.5,
            "slices": 11,
            "cfl_safety": 0.5,
            "c0": 1.0,
            "dump": None }

    columns = {
            "trace": ("tau", "norm_l2", "norm_lp", "div_residual"),
            "residual": ("tag", "tau_or_na", "residual_l2_rel", "trusted_radius") }

    @classmethod
    def check(cls, conf):
        check_initial(conf)
        check_c0(conf["c0"])
        SolverConfig(conf["dt"], conf["t_end"], cfl_safety=conf["cfl_safety"],
            slices=conf["slices"])

    def run(self, conf=default_config):

        session = self.session
        p = session.config.p
        U0 = initial_field(session, conf)
        self.publish(ConstantsLedger.build(p, conf["c0"], lp_norm(U0, p),
            c0_family="nominal"))

        config = SolverConfig(conf["dt"], conf["t_end"], cfl_safety=conf["cfl_safety"],
            slices=conf["slices"])
        traj = evolve(U0, config)

        radius = session.grid.box_side / 4.0
        for (row, (tau, U)) in zip(trace(traj, p), traj):
            self.emit("trace", row)
            if row[3] > 1e-8:
                self.ok = False
                continue
            (_, rel) = steady_residual(U)
            self.emit("residual", ("steady", float(tau), rel, radius))

        if conf["dump"]:
            dump_field(traj.fields[-1], conf["dump"])
