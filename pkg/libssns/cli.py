"""
Command line entry point::

    libssns <command> [--config PATH] [--out DIR] [--seed N] [--verbose]

with ``<command>`` one of ``verify-lemmas``, ``estimate-c0``, ``picard``,
``direct`` or ``pipeline``. The report goes to ``<out>/<command>.csv``.
Exit codes: 0 all checks passed, 1 numeric or check failure, 2 usage or
configuration error.
"""

import argparse
import json
import os
import sys

from .session import Session, SessionConf
from .errors import SSNSError, ConfigError
from .log import LOG, LOG_LEVEL


COMMANDS = ("verify-lemmas", "estimate-c0", "picard", "direct", "pipeline")

CONFIG_SCHEMA = 1

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2


def build_parser():
    parser = argparse.ArgumentParser(prog="libssns",
        description="Rescaled self-similar Navier-Stokes verification runs")
    sub = parser.add_subparsers(dest="command", metavar="command")
    sub.required = True
    for command in COMMANDS:
        cmd = sub.add_parser(command)
        cmd.add_argument("--config", default=None, help="JSON run configuration")
        cmd.add_argument("--out", default=".", help="directory for the CSV report")
        cmd.add_argument("--seed", type=int, default=None, help="overrides session.seed")
        cmd.add_argument("--verbose", action="store_true", help="debug logging")
    return parser


def load_config(path):
    """
    Read ``{"schema": 1, "session": {...}, "params": {...}}``. A missing
    path gives the defaults.
    """
    if path is None:
        return (SessionConf(), {})

    try:
        with open(path, "r", encoding="utf-8") as fp:
            doc = json.load(fp)
    except OSError as exc:
        raise ConfigError("cannot read config %s: %s" % (path, exc))
    except ValueError as exc:
        raise ConfigError("malformed JSON in %s: %s" % (path, exc))

    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = sorted(set(doc) - {"schema", "session", "params"})
    if unknown:
        raise ConfigError("unknown top-level keys: %s" % ", ".join(unknown))
    if doc.get("schema") != CONFIG_SCHEMA:
        raise ConfigError("unsupported config schema %r" % doc.get("schema"))

    session = doc.get("session", {})
    params = doc.get("params", {})
    if not isinstance(session, dict) or not isinstance(params, dict):
        raise ConfigError("session and params must be JSON objects")

    return (SessionConf.from_dict(session), params)


def run(command, conf, params, out):
    session = Session(conf)
    if params.get("dump"):
        params = dict(params, dump=os.path.join(out, params["dump"]))
    (report, ok) = session.execute(command, params)

    os.makedirs(out, exist_ok=True)
    report.save(os.path.join(out, "%s.csv" % command))

    for (name, (columns, rows)) in report.blocks.items():
        if "pass" in columns:
            i = columns.index("pass")
            for row in rows:
                if not row[i]:
                    print("FAILED %s: %s" % (name, ",".join(str(v) for v in row)),
                        file=sys.stderr)
    return ok


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE

    if args.verbose:
        LOG.set_level(LOG_LEVEL.DEBUG)

    try:
        (conf, params) = load_config(args.config)
        if args.seed is not None:
            conf.seed = args.seed
        ok = run(args.command, conf, params, args.out)
    except ConfigError as exc:
        LOG.warn("configuration error: %s" % exc.message)
        return EXIT_USAGE
    except SSNSError as exc:
        LOG.warn("%s: %s" % (type(exc).__name__, exc.message))
        return EXIT_FAILURE

    if not ok:
        LOG.warn("%s reported failures" % args.command)
        return EXIT_FAILURE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
