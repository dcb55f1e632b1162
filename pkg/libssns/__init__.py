from .grid import Grid, VectorField, ScalarField, SpectralField, Interpolation
from .session import Session, SessionConf
from .lemmas import ConstantsLedger
from .log import LOG


def generic_check_runner(checks, sink, block='checks'):
    """
    Most verification modules compare a computed left side with a bound.
    Each ``(check_id, params, lhs, rhs)`` tuple becomes a row
    ``(check_id, params, lhs, rhs, slack, pass)`` with ``slack = rhs - lhs``;
    a check passes when ``lhs <= rhs`` up to round-off in ``rhs``. Returns
    whether every check passed.
    """
    passed = True
    for (check_id, params, lhs, rhs) in checks:
        slack = rhs - lhs
        ok = bool(slack >= -1e-12 * max(1.0, abs(rhs)))
        if not ok:
            LOG.warn("check %s (%s) failed: %.6e > %.6e" % (check_id, params, lhs, rhs))
        sink((block, (check_id, params, float(lhs), float(rhs), float(slack), int(ok))))
        passed = passed and ok
    return passed
