from . import Module
from ..semigroup import estimate_c0
from ..lemmas import ConstantsLedger
from ..errors import DomainError


class ConstantEstimator(Module):

    name = "estimate-c0"
    tag = "C0"
    description = "Empirical heat kernel constant over a Gaussian/band-limited family"

    default_config = {
            "p_tilde": 2.0,
            "q_tilde": 4.0,
            "gradient": True,
            "family_size": 4,
            "n_times": 24 }

    columns = {
            "ratios": ("p_tilde", "q_tilde", "gradient", "t", "family_member_id", "ratio"),
            "summary": ("p_tilde", "q_tilde", "gradient", "c0", "members") }

    @classmethod
    def check(cls, conf):
        (p_tilde, q_tilde) = (float(conf["p_tilde"]), float(conf["q_tilde"]))
        if not (1.0 < p_tilde <= q_tilde < float("inf")):
            raise DomainError("need 1 < p_tilde <= q_tilde < inf, got (%r, %r)" % \
                (conf["p_tilde"], conf["q_tilde"]))
        if conf["family_size"] < 1 or conf["n_times"] < 2:
            raise DomainError("need a nonempty family and at least 2 heat times")

    def run(self, conf=default_config):

        session = self.session
        est = estimate_c0(conf["p_tilde"], conf["q_tilde"], bool(conf["gradient"]),
            session.grid, conf["family_size"], conf["n_times"],
            session.config.seed)

        self.publish(ConstantsLedger.build(session.config.p, est.value, 0.0,
            c0_family=est.family))

        for row in est.rows:
            self.emit("ratios", row)
        self.emit("summary", (est.p_tilde, est.q_tilde, int(est.with_gradient),
            est.value, len(est.rows)))
