"""
CSV reports. A report is a comment header followed by named blocks::

    # libssns schema 1
    # command picard
    # ledger p=4.0000000000000000e+00,gamma=...
    # block decay
    tau,norm,envelope,limit_residual
    0.0000000000000000e+00,...

Floats are written with 17 significant digits so identical runs give
byte-identical files.
"""

import csv
import io
from collections import OrderedDict

import numpy as np


SCHEMA = 1


def format_value(value):
    if value is None:
        return "na"
    if isinstance(value, (bool, np.bool_)):
        return "%d" % int(value)
    if isinstance(value, (int, np.integer)):
        return "%d" % value
    if isinstance(value, (float, np.floating)):
        return "%.16e" % value
    return str(value)


class Report():

    def __init__(self, command):
        self.command = command
        self.ledger = None
        self.blocks = OrderedDict()

    def add_block(self, name, columns):
        if name not in self.blocks:
            self.blocks[name] = (tuple(columns), [])

    def add_row(self, name, row):
        if name not in self.blocks:
            raise KeyError("unknown report block %r" % name)
        (columns, rows) = self.blocks[name]
        if len(row) != len(columns):
            raise ValueError("block %s has %d columns, row has %d" % \
                (name, len(columns), len(row)))
        rows.append(tuple(row))

    def rows(self, name):
        return self.blocks[name][1]

    def ledger_line(self):
        if self.ledger is None:
            return "# ledger none"
        parts = ["%s=%s" % (k, format_value(v)) for (k, v) in self.ledger.items()]
        if self.ledger.c0_family:
            parts.append("c0_family=%s" % self.ledger.c0_family.replace(",", ";"))
        return "# ledger " + ",".join(parts)

    def write(self, fp):
        fp.write("# libssns schema %d\n" % SCHEMA)
        fp.write("# command %s\n" % self.command)
        fp.write(self.ledger_line() + "\n")
        writer = csv.writer(fp, lineterminator="\n")
        for (name, (columns, rows)) in self.blocks.items():
            fp.write("# block %s\n" % name)
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(v) for v in row])

    def dumps(self):
        buf = io.StringIO()
        self.write(buf)
        return buf.getvalue()

    def save(self, path):
        with open(path, "w", encoding="utf-8", newline="") as fp:
            self.write(fp)
