# -*- coding: utf-8 -*-
"""Time functions for loads and prescribed values.

Scenario notation: ``constant(v)``, ``ramp(t0, slope[, v0])``,
``cosine(t0, duration, amplitude)`` and ``table(t0:v0; t1:v1; ...)``.
"""
import math
import re

import numpy as np

from .base import BaseTimeFunction
from ..exception import ConfigurationError


def _fmt(value: float) -> str:
    return repr(float(value))


class ConstantFunction(BaseTimeFunction):
    __function_type__ = 'constant'

    def __init__(self, value: float):
        self.value = float(value)

    def __call__(self, t):
        return self.value

    def to_text(self):
        return f"constant({_fmt(self.value)})"


class RampFunction(BaseTimeFunction):
    """Zero (or v0) before t0, then growing linearly with `slope`."""
    __function_type__ = 'ramp'

    def __init__(self, t0: float, slope: float, v0: float = 0.0):
        self.t0 = float(t0)
        self.slope = float(slope)
        self.v0 = float(v0)

    def __call__(self, t):
        return self.v0 + self.slope * max(0.0, t - self.t0)

    def to_text(self):
        return f"ramp({_fmt(self.t0)}, {_fmt(self.slope)}, {_fmt(self.v0)})"


class CosinePulseFunction(BaseTimeFunction):
    """Smooth rise 0.5 * amplitude * (1 - cos(pi * (t - t0) / duration)), held afterwards."""
    __function_type__ = 'cosine'

    def __init__(self, t0: float, duration: float, amplitude: float):
        if duration <= 0.0:
            raise ConfigurationError("cosine duration must be positive")
        self.t0 = float(t0)
        self.duration = float(duration)
        self.amplitude = float(amplitude)

    def __call__(self, t):
        if t <= self.t0:
            return 0.0
        if t >= self.t0 + self.duration:
            return self.amplitude
        return 0.5 * self.amplitude * (1.0 - math.cos(math.pi * (t - self.t0) / self.duration))

    def to_text(self):
        return f"cosine({_fmt(self.t0)}, {_fmt(self.duration)}, {_fmt(self.amplitude)})"


class TabulatedFunction(BaseTimeFunction):
    """Piecewise linear interpolation, clamped outside the table."""
    __function_type__ = 'table'

    def __init__(self, times, values):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)
        if len(self.times) == 0 or len(self.times) != len(self.values):
            raise ConfigurationError("table needs matching, non-empty time and value lists")
        if np.any(np.diff(self.times) <= 0.0):
            raise ConfigurationError("table times must be strictly increasing")

    def __call__(self, t):
        return float(np.interp(t, self.times, self.values))

    def to_text(self):
        pairs = "; ".join(f"{_fmt(t)}:{_fmt(v)}" for t, v in zip(self.times, self.values))
        return f"table({pairs})"


time_functions = {
    'constant': ConstantFunction,
    'ramp': RampFunction,
    'cosine': CosinePulseFunction,
    'table': TabulatedFunction,
}

_CALL_PATTERN = re.compile(r"^\s*([a-z_]+)\s*\((.*)\)\s*$")


def parse_time_function(text: str, key_path: str = None) -> BaseTimeFunction:
    """Parse the scenario notation of a time function.

    A bare number is read as a constant.

    :param text: function text, e.g. ``ramp(1000, 5e-4)``.
    :param key_path: scenario key, used in error messages.
    """
    text = text.strip()
    try:
        return ConstantFunction(float(text))
    except ValueError:
        pass

    match = _CALL_PATTERN.match(text)
    if match is None:
        raise ConfigurationError(f"Cannot parse time function '{text}'", key_path=key_path)
    name, args = match.group(1), match.group(2)
    function_cls = time_functions.get(name)
    if function_cls is None:
        raise ConfigurationError(f"Unknown time function '{name}', valid: {list(time_functions)}",
                                 key_path=key_path)
    try:
        if function_cls is TabulatedFunction:
            pairs = [item.split(':') for item in args.split(';') if item.strip()]
            times = [float(pair[0]) for pair in pairs]
            values = [float(pair[1]) for pair in pairs]
            return TabulatedFunction(times, values)
        numbers = [float(item) for item in args.split(',') if item.strip()]
        return function_cls(*numbers)
    except ConfigurationError as e:
        raise ConfigurationError(str(e), key_path=key_path)
    except (ValueError, TypeError, IndexError):
        raise ConfigurationError(f"Invalid arguments for time function '{text}'", key_path=key_path)
