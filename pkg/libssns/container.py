"""
Binary container for grid fields.

Layout (all little-endian)::

    magic   4s   b"SSNS"
    version u32
    n       u32  points per axis
    L       f64  box side
    dealias f64  retained fraction of the band in quadratic products
    ncomp   u32  1 for scalars, 3 for vectors
    data    ncomp arrays of n^3 f64, row-major, component after component
"""

from .params import Magic, UInt32, Float64, ArrayParam
from .grid import Grid, ScalarField, VectorField
from .errors import DimensionError, DomainError


MAGIC = b"SSNS"
VERSION = 1


class Packet():

    def __iter__(self):
        return self._pkt.__iter__()

    def write(self, fp):
        for part in self:
            fp.write(bytes(part))


class HEADER(Packet):

    def __init__(self, grid, ncomp):
        self._pkt = [Magic(MAGIC), UInt32(VERSION), \
                UInt32(grid.n), Float64(grid.box_side), \
                Float64(grid.dealias_fraction), UInt32(ncomp)]


class COMPONENT(Packet):

    def __init__(self, values):
        self._pkt = [ArrayParam(values)]


def _open(target, mode):
    if hasattr(target, 'read' if 'r' in mode else 'write'):
        return (target, False)
    return (open(target, mode), True)


def dump_field(field, target):
    """ Write ``field`` to a path or binary file object """
    if isinstance(field, ScalarField):
        comps = [field.values]
    else:
        comps = list(field.components)

    (fp, owned) = _open(target, 'wb')
    try:
        HEADER(field.grid, len(comps)).write(fp)
        for c in comps:
            COMPONENT(c).write(fp)
    finally:
        if owned:
            fp.close()


def load_field(source):
    (fp, owned) = _open(source, 'rb')
    try:
        magic = Magic.unpack(fp).value
        if magic != MAGIC:
            raise DimensionError("not a field container (magic %r)" % magic)
        version = UInt32.unpack(fp).value
        if version != VERSION:
            raise DimensionError("unsupported container version %d" % version)
        n = UInt32.unpack(fp).value
        box_side = Float64.unpack(fp).value
        dealias = Float64.unpack(fp).value
        ncomp = UInt32.unpack(fp).value
        if ncomp not in (1, 3):
            raise DimensionError("unsupported component count %d" % ncomp)

        try:
            grid = Grid(n, box_side, dealias)
        except DomainError as exc:
            raise DimensionError("bad grid in container header: %s" % exc.message)
        comps = [ArrayParam.unpack(fp, grid.shape).value for _ in range(ncomp)]
        if fp.read(1) != b"":
            raise DimensionError("trailing bytes after field data")
    finally:
        if owned:
            fp.close()

    if ncomp == 1:
        return ScalarField(grid, comps[0])
    return VectorField(grid, comps)
