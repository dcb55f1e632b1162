import os
import sys
from enum import IntEnum

class LOG_LEVEL(IntEnum):
    INFO = 0
    DEBUG = 1
    TRACE = 2


class Logger():

    def __init__(self, lvl):
        self.lvl = lvl

    def set_level(self, lvl):
        self.lvl = int(lvl)

    def _log(self, *args, **kwargs):
        if 'file' in kwargs.keys():
            kwargs.pop('file')

        print(*args, file=sys.stderr, **kwargs)

    def _at(self, lvl, prefix, args, kwargs):

        if self.lvl < lvl:
            return

        args = list(args)
        args.insert(0, prefix)
        self._log(*args, **kwargs)

    def warn(self, *args, **kwargs):
        # warnings are never filtered
        args = list(args)
        args.insert(0, '[WARN]')
        self._log(*args, **kwargs)

    def info(self, *args, **kwargs):
        self._at(LOG_LEVEL.INFO, '[INFO]', args, kwargs)

    def debug(self, *args, **kwargs):
        self._at(LOG_LEVEL.DEBUG, '[DBUG]', args, kwargs)

    def trace(self, *args, **kwargs):
        self._at(LOG_LEVEL.TRACE, '[TRCE]', args, kwargs)

LOG = Logger(int(os.environ.get('SSNSDBG', 0)))
