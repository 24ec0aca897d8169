# -*- coding: utf-8 -*-
"""Solution state with one-step-theta time derivative histories."""
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..exception import ConfigurationError


@dataclass(frozen=True)
class StepContext:
    """Time level t_{n+1} of the step being solved; dt None means steady."""
    time: float
    dt: Optional[float] = None
    theta: float = 1.0

    def __post_init__(self):
        if self.dt is not None and self.dt <= 0.0:
            raise ConfigurationError(f"Time step size must be positive, got {self.dt}")
        if not 0.0 < self.theta <= 1.0:
            raise ConfigurationError(f"theta must lie in (0, 1], got {self.theta}")

    @property
    def steady(self) -> bool:
        return self.dt is None

    @property
    def rate_factor(self) -> float:
        """d(rate_{n+1}) / d(value_{n+1})."""
        return 0.0 if self.steady else 1.0 / (self.theta * self.dt)


def theta_rate(value, value_old, rate_old, context: StepContext):
    """One-step-theta time derivative at t_{n+1}.

    rate_{n+1} = (value_{n+1} - value_n) / (theta dt) - (1 - theta) / theta * rate_n
    """
    if context.steady:
        return np.zeros_like(value)
    theta = context.theta
    return (value - value_old) / (theta * context.dt) - (1.0 - theta) / theta * rate_old


@dataclass
class SolidState:
    """Nodal displacement, velocity and acceleration of all solid nodes."""
    u: np.ndarray
    velocity: np.ndarray
    acceleration: np.ndarray

    @classmethod
    def zeros(cls, n_nodes: int):
        return cls(np.zeros((n_nodes, 2)), np.zeros((n_nodes, 2)), np.zeros((n_nodes, 2)))

    def copy(self):
        return SolidState(self.u.copy(), self.velocity.copy(), self.acceleration.copy())

    def rates(self, u_new, context: StepContext):
        """Velocity and acceleration at t_{n+1} for a trial displacement, self being t_n."""
        velocity = theta_rate(u_new, self.u, self.velocity, context)
        acceleration = theta_rate(velocity, self.velocity, self.acceleration, context)
        return velocity, acceleration


@dataclass
class FluidState:
    """Velocity, pressure and velocity rate on all grid nodes.

    Only nodes flagged in `has_value` carry meaningful values; the others
    have never been active.
    """
    v: np.ndarray
    p: np.ndarray
    rate: np.ndarray
    has_value: np.ndarray

    @classmethod
    def zeros(cls, n_nodes: int):
        return cls(np.zeros((n_nodes, 2)), np.zeros(n_nodes), np.zeros((n_nodes, 2)),
                   np.zeros(n_nodes, dtype=bool))

    def copy(self):
        return FluidState(self.v.copy(), self.p.copy(), self.rate.copy(), self.has_value.copy())


@dataclass
class SystemState:
    """Converged state at time t after `step` steps."""
    time: float
    solid: SolidState
    fluid: FluidState
    step: int = 0
    info: dict = field(default_factory=dict)

    def copy(self):
        return SystemState(self.time, self.solid.copy(), self.fluid.copy(), self.step, dict(self.info))
