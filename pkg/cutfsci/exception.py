# -*- coding: utf-8 -*-
"""Exceptions used in cutfsci."""


class CutFsciError(Exception):
    """Base class of all errors raised by cutfsci."""


class ConfigurationError(CutFsciError):
    """Raised if a scenario or a model input is invalid."""

    def __init__(self, message, key_path=None, line=None):
        location = []
        if key_path is not None:
            location.append(f"key '{key_path}'")
        if line is not None:
            location.append(f"line {line}")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.key_path = key_path
        self.line = line


class GeometryError(CutFsciError):
    """Raised if the interface geometry cannot be classified or integrated."""

    def __init__(self, message, element=None):
        if element is not None:
            message = f"{message} (element {element})"
        super().__init__(message)
        self.element = element


class ElementInversionError(GeometryError):
    """Raised if a solid element has a non-positive Jacobian."""

    def __init__(self, message, element=None, body=None):
        super().__init__(message, element=element)
        self.body = body


class ExtensionError(CutFsciError):
    """Raised if fluid quantities must be extended but a body has no fluid-structure interface."""

    def __init__(self, message, body=None):
        super().__init__(message)
        self.body = body


class SolverError(CutFsciError):
    """Raised if a time step cannot be solved."""


class NewtonDivergenceError(SolverError):
    """Raised if the Newton iteration does not converge within the hard cap."""

    def __init__(self, message, time=None, iteration=None):
        super().__init__(f"{message} (t={time}, iteration={iteration})")
        self.time = time
        self.iteration = iteration


class SingularSystemError(SolverError):
    """Raised if the linearized system cannot be factorized."""


class OutputError(CutFsciError):
    """Raised if an output file cannot be written."""

    def __init__(self, message, path=None):
        if path is not None:
            message = f"{message}: {path}"
        super().__init__(message)
        self.path = path


class CheckpointError(CutFsciError):
    """Raised if a checkpoint file is missing, corrupt or of another format version."""
