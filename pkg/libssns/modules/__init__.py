from abc import ABCMeta, abstractmethod

import numpy as np

from ..grid import gaussian_curl_field, lp_norm
from ..errors import DomainError


class Published():
    """ A constants ledger in transit from a module thread to its report """

    def __init__(self, ledger):
        self.ledger = ledger


class Module(metaclass=ABCMeta):
    """
    A runnable command. Subclasses define ``name``, ``tag``,
    ``description``, ``default_config`` and ``columns`` (block name to
    column names) and push ``(block, row)`` pairs through ``sink``.
    """

    columns = {}

    def __init__(self, session, sink=None):
        self.session = session
        if sink is None:
            self.sink = self.session.add_to_buffer
        else:
            self.sink = sink
        self.ok = True

    def __call__(self, *args):
        self.run(*args)

    def emit(self, block, row):
        self.sink((block, tuple(row)))

    def publish(self, ledger):
        self.sink(Published(ledger))

    @classmethod
    def check(cls, conf):
        """
        Validate a merged config before the run thread starts. Raises
        `DomainError`, `TypeError` or `ValueError` on a bad value.
        """
        return

    @abstractmethod
    def run(self, conf=None):
        return


def initial_field(session, conf):
    """
    Divergence-free Gaussian data from a module config: the curl field of
    width ``conf["width"]`` scaled to ``||V0||_p = conf["amplitude"]``.
    """
    grid = session.grid
    V0 = gaussian_curl_field(grid, conf["width"], 1.0, conf["direction"])
    amplitude = float(conf["amplitude"])
    if amplitude == 0.0:
        return V0 * 0.0
    return V0 * (amplitude / lp_norm(V0, session.config.p))


def check_initial(conf):
    """ Validate the keys read by `initial_field` """
    if not float(conf["amplitude"]) >= 0.0:
        raise DomainError("amplitude must be nonnegative, got %r" % conf["amplitude"])
    if not float(conf["width"]) > 0.0:
        raise DomainError("width must be positive, got %r" % conf["width"])
    direction = np.asarray(conf["direction"], dtype=float)
    if direction.shape != (3,) or not np.all(np.isfinite(direction)) \
            or not np.any(direction):
        raise DomainError("direction must be a nonzero 3-vector, got %r" % \
            (conf["direction"],))


def check_c0(value, optional=False):
    if value is None and optional:
        return
    if not (np.isfinite(float(value)) and float(value) > 0.0):
        raise DomainError("c0 must be positive, got %r" % value)
