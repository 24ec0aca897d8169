# -*- coding: utf-8 -*-
"""Package defaults read from ``config/global.ini``.

Scenario files only override these values; every section a scenario can
leave out must be present here.
"""
import os
import sys
import configparser
from threading import RLock
from typing import Callable, Dict

REQUIRED_SECTIONS = ('log', 'geometry', 'interface', 'stabilization', 'newton', 'output')


class GlobalConfig(object):
    _init_status = False
    _lock = RLock()
    _configs = None
    package_dir = os.path.dirname(__file__)
    config_fpath = os.path.abspath(os.path.join(package_dir, 'config/global.ini'))

    def _config_init(self):
        if not os.path.isfile(self.config_fpath):
            print("Config file not found: %s" % self.config_fpath)
            sys.exit(2)

        configs = configparser.ConfigParser(interpolation=None)
        configs.read(self.config_fpath)
        missing = [name for name in REQUIRED_SECTIONS if name not in configs]
        if missing:
            print("Config file %s lacks sections %s" % (self.config_fpath, missing))
            sys.exit(2)
        return configs

    @staticmethod
    def get_config():
        if not GlobalConfig._init_status:
            with GlobalConfig._lock:
                if not GlobalConfig._init_status:
                    GlobalConfig._configs = GlobalConfig()._config_init()
                    GlobalConfig._init_status = True
        return GlobalConfig._configs


def get_config():
    return GlobalConfig.get_config()


def section_values(section: str, parsers: Dict[str, Callable]) -> Dict[str, object]:
    """Typed defaults of one section.

    Keys without a parser are ignored, keys absent from the file are left
    out and empty values are returned as None.

    :param parsers: key -> callable turning the raw text into a value.
    """
    raw = get_config()[section]
    values = {}
    for key, parse in parsers.items():
        if key not in raw:
            continue
        text = raw[key].strip()
        values[key] = parse(text) if text else None
    return values
