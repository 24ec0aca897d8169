# -*- encoding: utf-8 -*-
"""Core base abstract classes"""
from abc import ABC, abstractmethod


class BaseTask(ABC):
    """Abstract task with a `run` method."""
    def __init__(self):
        self.context = {}

    @abstractmethod
    def run(self):
        """Run the task."""
        raise NotImplementedError("Implement run method before calling it.")


class BaseTaskStep(ABC):
    """Abstract task step of a task.
    Every task step can access the task context.
    """
    def __init__(self, task: BaseTask):
        self.task = task


class BaseTimeFunction(ABC):
    """Abstract scalar function of time used by loads and prescribed values."""
    __function_type__ = 'base'

    @abstractmethod
    def __call__(self, t: float) -> float:
        raise NotImplementedError("Implement __call__ method before calling it.")

    @abstractmethod
    def to_text(self) -> str:
        """Returns the scenario-file notation of the function."""
        raise NotImplementedError("Implement to_text method before calling it.")

    def __eq__(self, other):
        return type(self) is type(other) and self.to_text() == other.to_text()

    def __hash__(self):
        return hash(self.to_text())

    def __repr__(self):
        return self.to_text()


class BaseMeshGenerator(ABC):
    """Abstract generator of a structured solid mesh from scenario keys."""
    __generator_type__ = 'base'
    # Scenario keys accepted by the generator, mapped to their parser.
    accepted_keys = {}

    def __init__(self, **params):
        self.params = params

    @abstractmethod
    def generate(self, body: int):
        """Generate the SolidMesh of one body."""
        raise NotImplementedError("Implement generate method before calling it.")
