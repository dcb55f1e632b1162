import struct

import numpy as np

from .errors import DimensionError


class Param():

    def __init__(self, value):
        self.value = value

    def __str__(self):
        return str(self.value)


class BytePackedParam(Param):

    def __bytes__(self):
        return struct.pack(self.identifier, self.value)

    def __iter__(self):
        return bytes(self).__iter__()

    @classmethod
    def unpack(cls, stream):
        size = struct.calcsize(cls.identifier)
        data = stream.read(size)
        if len(data) != size:
            raise DimensionError("truncated %s: wanted %d bytes, got %d" % \
                (cls.__name__, size, len(data)))
        return cls(struct.unpack(cls.identifier, data)[0])


class ArrayParam(Param):
    """ A real array stored contiguously, row-major, little-endian """

    identifier = '<f8'

    def __bytes__(self):
        return np.ascontiguousarray(self.value, dtype=self.identifier).tobytes(order='C')

    def __iter__(self):
        return bytes(self).__iter__()

    @classmethod
    def unpack(cls, stream, shape):
        count = int(np.prod(shape))
        size = count * np.dtype(cls.identifier).itemsize
        data = stream.read(size)
        if len(data) != size:
            raise DimensionError("truncated array: wanted %d bytes, got %d" % \
                (size, len(data)))
        arr = np.frombuffer(data, dtype=cls.identifier).reshape(shape)
        return cls(arr.astype(float))


class ParamClass(type):

    def __new__(cls, name, parents, attrs):
        return type.__new__(cls, name, parents, attrs)


class BytePackedParamClass(ParamClass):

    @staticmethod
    def new(name, identifier):
        return BytePackedParamClass(name, (BytePackedParam,), {'identifier': identifier})


Magic = BytePackedParamClass.new('Magic', '<4s')
UInt32 = BytePackedParamClass.new('UInt32', '<I')
Float64 = BytePackedParamClass.new('Float64', '<d')
