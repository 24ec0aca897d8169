# -*- coding: utf-8 -*-
import sys
from threading import RLock

from loguru import logger

from .config import get_config

configs = get_config()


class LoggerLoader:
    _init_status = False
    _lock = RLock()
    _loggers = {}
    _sink_ids = []

    def _log_init(self, log_level=None):
        """Initialize loggings."""
        log_level = log_level or configs['log']['console_log_level']
        log_format = configs['log']['console_log_format']

        logger.remove()
        loggers = {}
        LoggerLoader._sink_ids = []
        for name in ('default', 'solver'):
            sink_id = logger.add(sys.stderr,
                                 level=log_level,
                                 filter=self._make_filter(name=name),
                                 format=log_format)
            LoggerLoader._sink_ids.append(sink_id)
            loggers[name] = logger.bind(name=name)
        loggers['default'].debug("Registered the default and solver loggers")
        return loggers

    @staticmethod
    def _make_filter(name):
        return lambda record: record["extra"].get("name") == name

    @staticmethod
    def load(logger_name: str):
        """Returns the loguru.Logger based on logger name.

        :param logger_name: Logger name.
        :return: a loguru.Logger.
        """
        if not LoggerLoader._init_status:
            with LoggerLoader._lock:
                if not LoggerLoader._init_status:
                    LoggerLoader._loggers = LoggerLoader()._log_init()
                    LoggerLoader._init_status = True
        return LoggerLoader._loggers.get(logger_name)

    @staticmethod
    def set_level(log_level: str):
        """Re-register the sinks with another level, e.g. 'DEBUG' for --verbose."""
        with LoggerLoader._lock:
            LoggerLoader._loggers = LoggerLoader()._log_init(log_level)
            LoggerLoader._init_status = True


def get_logger(name=None):
    name = name or 'default'
    return LoggerLoader.load(name)
