import inspect, importlib, pkgutil
import threading
import json
from queue import Queue
from dataclasses import dataclass, fields

from . import modules
from .grid import Grid, Interpolation
from .reports import Report
from .errors import ConfigError, DomainError, OperationInProgress
from .log import LOG


@dataclass
class SessionConf:
    """
    Settings shared by every module of a session.

    >>> from libssns.session import Session, SessionConf
    >>> conf = SessionConf()
    >>> conf.n = 64
    >>> session = Session(conf)
    """

    n: int = 32
    """ Grid points per axis; positive and even """
    box_side: float = 16.0
    """ Side of the periodic box standing in for the whole space """
    dealias_fraction: float = 2.0/3.0
    """ Retained fraction of the band in quadratic products """
    p: float = 4.0
    """ Lebesgue exponent of the ledger; must exceed 3 """
    seed: int = 0
    """ Seed for every random draw of a run """
    interpolation: int = Interpolation.FOURIER_RESAMPLE
    """ Off-grid evaluation; see `libssns.grid.Interpolation` """
    workers: int = 1
    """ Threads used across tau nodes; 1 runs inline """

    @classmethod
    def from_dict(cls, values):
        known = {f.name: f for f in fields(cls)}
        unknown = sorted(set(values) - set(known))
        if unknown:
            raise ConfigError("unknown session keys: %s" % ", ".join(unknown))
        conf = cls()
        for (key, value) in values.items():
            kind = type(getattr(conf, key))
            try:
                if kind is int and isinstance(value, float) and not value.is_integer():
                    raise ValueError(value)
                setattr(conf, key, kind(value))
            except (TypeError, ValueError):
                raise ConfigError("session key %s: cannot use %r" % (key, value))
        return conf


class Failure():
    """ An exception raised inside a module thread, in transit to the caller """

    def __init__(self, exc):
        self.exc = exc


class Session():
    """
    Owns the grid and the registry of runnable modules. Modules run in a
    worker thread that feeds a FIFO buffer; `Session.run_module` returns
    an iterator over it.
    """

    def __init__(self, config=None):
        if config is None:
            config = SessionConf()

        self._buffer = Queue()
        self.add_to_buffer = self._buffer.put
        self._get_from_buffer = self._buffer.get

        self._config = config
        if not config.p > 3.0:
            raise ConfigError("p must exceed 3, got %r" % config.p)
        try:
            self.grid = Grid(config.n, config.box_side, config.dealias_fraction)
            config.interpolation = Interpolation(config.interpolation)
        except (DomainError, ValueError) as exc:
            raise ConfigError(str(exc))

        self._operation = None

        self.modules = {}
        self._load_builtin_modules()

        LOG.debug(self._config)

    def _load_builtin_modules(self):
        for loader, modname, is_pkg in pkgutil.walk_packages(modules.__path__):
            if is_pkg:
                continue
            mod = importlib.import_module(".".join((modules.__name__, modname)))
            for _, kls in inspect.getmembers(mod, inspect.isclass):
                if issubclass(kls, modules.Module) and kls is not modules.Module:
                    self.register_module(kls)

    @property
    def config(self):
        return self._config

    def register_module(self, mod):
        """
        Register module ``mod`` under its name; an existing module with the
        same name is replaced.
        """
        if not (inspect.isclass(mod) and issubclass(mod, modules.Module)):
            raise ValueError("Invalid module type; must subclass `libssns.modules.Module`")

        self.modules[mod.name] = mod

    def _module_from_arg(self, target):
        if inspect.isclass(target):
            return target
        try:
            return self.modules[target]
        except KeyError:
            raise ConfigError("unknown command %r" % target)

    def resolve_config(self, kls, conf):
        """
        Module defaults overlaid with ``conf``. Unknown keys and values the
        module rejects raise `ConfigError`.
        """
        conf = dict(conf or {})
        unknown = sorted(set(conf) - set(kls.default_config))
        if unknown:
            raise ConfigError("unknown %s keys: %s" % (kls.name, ", ".join(unknown)))
        merged = dict(kls.default_config)
        merged.update(conf)
        try:
            kls.check(merged)
        except (TypeError, ValueError, KeyError) as exc:
            raise ConfigError("%s: %s" % (kls.name, exc))
        return merged

    def finish_op(self):
        if self._operation is not threading.current_thread():
            self._operation.join()
        self._operation = None

    def wait_on_op(self):
        if self._operation is not None:
            self._operation.join()

    def _wrap_op(self, mod, conf):
        """
        Run ``mod`` in a thread framed by JSON status markers and close the
        buffer with ``None``.
        """
        if self._operation is not None:
            raise OperationInProgress(self._operation.name)

        def wrapper():
            mod.sink(json.dumps({'mod': mod.name, 'tag': mod.tag,
                'status': 0, 'conf': conf}, sort_keys=True, default=str))
            try:
                mod(conf)
            except Exception as exc:
                mod.ok = False
                mod.sink(Failure(exc))
            self.finish_op()
            mod.sink(json.dumps({'mod': mod.name, 'tag': mod.tag,
                'status': 1, 'ok': mod.ok}))
            mod.sink(None)

        self._operation = threading.Thread(target=wrapper, name=mod.name)
        self._operation.start()

        return iter(self._get_from_buffer, None)

    def run_module(self, target, conf=None, sink=None):
        kls = self._module_from_arg(target)
        merged = self.resolve_config(kls, conf)
        mod = kls(self, sink)
        return self._wrap_op(mod, merged)

    def execute(self, target, conf=None):
        """
        Run a module to completion and collect what it emits into a
        `Report`. Returns ``(report, ok)``; an exception raised by the
        module is re-raised here once its thread has finished.
        """
        kls = self._module_from_arg(target)
        report = Report(kls.name)
        for (block, columns) in kls.columns.items():
            report.add_block(block, columns)

        ok = True
        failure = None
        for item in self.run_module(kls, conf):
            if isinstance(item, Failure):
                failure = item.exc
            elif isinstance(item, str):
                marker = json.loads(item)
                LOG.trace(marker)
                if marker['status'] == 1:
                    ok = marker['ok']
            elif isinstance(item, modules.Published):
                report.ledger = item.ledger
            else:
                report.add_row(*item)

        self.wait_on_op()
        if failure is not None:
            raise failure
        return (report, ok)
