# -*- coding: utf-8 -*-
"""Damped Newton-Raphson over all unknowns and the one-step-theta time loop."""
import math
from dataclasses import dataclass, field, fields
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np
import scipy.sparse.linalg as spla

from .state import FluidState, SolidState, StepContext, SystemState, theta_rate
from .system import (CoupledProblem, GeometrySnapshot, apply_dirichlet, assemble_system, fluid_arrays,
                     residual_norms, transfer_to_snapshot, update_geometry)
from ..config import section_values
from ..exception import (ConfigurationError, ElementInversionError, NewtonDivergenceError, SingularSystemError,
                         SolverError)
from ..log import get_logger

logger = get_logger('solver')


@dataclass
class NewtonConfig:
    tolerance: float = 1e-8
    max_iterations: int = 50
    omega_min: float = 0.0625
    omega_decrease: float = 0.5
    omega_increase: float = 1.5
    growth_threshold: float = 1.1
    geometry_freeze_factor: float = 1e-3
    growth_trigger: int = 15

    def __post_init__(self):
        if self.tolerance <= 0.0:
            raise ConfigurationError("Newton tolerance must be positive", key_path="newton.tolerance")
        if not 0.0 < self.omega_min <= 1.0:
            raise ConfigurationError("omega_min must lie in (0, 1]", key_path="newton.omega_min")
        if not 0.0 < self.omega_decrease < 1.0 or self.omega_increase < 1.0:
            raise ConfigurationError("Damping factors must satisfy 0 < decrease < 1 <= increase")
        if self.max_iterations < 1 or self.growth_trigger < 1:
            raise ConfigurationError("Iteration counts must be at least 1")

    @classmethod
    def from_defaults(cls):
        return cls(**section_values('newton', {item.name: item.type for item in fields(cls)}))


@dataclass
class TimeScheme:
    """One-step-theta with a piecewise constant step size.

    `schedule` lists (t_end, dt) pairs: dt applies up to t_end.
    """
    theta: float = 1.0
    schedule: List[Tuple[float, float]] = field(default_factory=list)
    t0: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.theta <= 1.0:
            raise ConfigurationError(f"theta must lie in (0, 1], got {self.theta}", key_path="time.theta")
        previous = self.t0
        for t_end, dt in self.schedule:
            if dt <= 0.0:
                raise ConfigurationError(f"Time step size must be positive, got {dt}", key_path="time.schedule")
            if t_end <= previous:
                raise ConfigurationError("Schedule end times must increase", key_path="time.schedule")
            previous = t_end

    @property
    def t_end(self) -> float:
        return self.schedule[-1][0] if self.schedule else self.t0

    def steps(self, start: float = None):
        """Yield (t_{n+1}, dt) for all steps after `start`; the last step of a segment ends on its t_end."""
        start = self.t0 if start is None else start
        segment_start = self.t0
        for t_end, dt in self.schedule:
            count = max(1, int(math.ceil((t_end - segment_start) / dt - 1e-9)))
            for i in range(1, count + 1):
                t = t_end if i == count else segment_start + i * dt
                t_previous = segment_start + (i - 1) * dt
                if t > start + 1e-12 * max(1.0, abs(t)):
                    yield t, t - max(t_previous, start)
            segment_start = t_end


class DampingRule(object):
    """omega <- max(omega_min, decrease * omega) if the residual norm grows beyond the threshold,
    omega <- min(1, increase * omega) if it decreases.

    Growth while omega already sits at omega_min is divergence: `update` then returns 0.
    """

    def __init__(self, config: NewtonConfig):
        self.config = config
        self.omega = 1.0
        self._previous = None

    def update(self, norm: float) -> float:
        if self._previous is not None:
            if norm > self.config.growth_threshold * self._previous:
                if self.omega <= self.config.omega_min:
                    self._previous = norm
                    return 0.0
                self.omega = max(self.config.omega_min, self.omega * self.config.omega_decrease)
                logger.debug(f"Residual grew, damping omega={self.omega:.4g}")
            elif norm < self._previous:
                self.omega = min(1.0, self.omega * self.config.omega_increase)
        self._previous = norm
        return self.omega

    def cutback(self) -> float:
        """Reduce omega after a failed update; returns 0 below omega_min."""
        if self.omega <= self.config.omega_min:
            return 0.0
        self.omega = max(self.config.omega_min, self.omega * self.config.omega_decrease)
        return self.omega


def solve_linear(matrix, residual, free):
    """Solve C dx = -R on the free dofs with a sparse LU factorization (COLAMD ordering)."""
    dx = np.zeros(len(residual))
    free_index = np.nonzero(free)[0]
    if len(free_index) == 0:
        return dx
    reduced = matrix[free_index][:, free_index].tocsc()
    try:
        factor = spla.splu(reduced, permc_spec='COLAMD')
    except RuntimeError as error:
        raise SingularSystemError(f"Linearized system is singular ({len(free_index)} free dofs): {error}")
    dx[free_index] = factor.solve(-residual[free_index])
    if not np.all(np.isfinite(dx)):
        raise SingularSystemError("Linear solve produced non-finite values")
    return dx


@dataclass
class StepResult:
    state: SystemState
    snapshot: GeometrySnapshot
    evaluation: object
    accumulator: object
    iterations: int
    norms: Dict[str, float]
    history: List[float]


def _converged(norms, tolerance):
    return all(value < tolerance for value in norms.values())


def newton_solve(problem: CoupledProblem, previous: SystemState, context: StepContext, config: NewtonConfig,
                 previous_active=None, forced_cases=None) -> StepResult:
    """Solve one time level starting from the previous converged state.

    :param previous: converged state at t_n.
    :param previous_active: active fluid node mask the previous state was solved on.
    :raise NewtonDivergenceError: no convergence within the iteration cap, or residual growth at omega_min.
    """
    u = previous.solid.u.copy()
    fluid = previous.fluid.copy()
    snapshot = update_geometry(problem, u, fluid, context.dt)
    if previous_active is None:
        previous_active = snapshot.dofmap.active_fluid_nodes
    old_fluid = transfer_to_snapshot(previous.fluid, previous_active, snapshot)
    fluid = transfer_to_snapshot(fluid, previous_active, snapshot)
    old = SystemState(previous.time, previous.solid, old_fluid, previous.step)

    dofmap = snapshot.dofmap
    apply_dirichlet(problem, dofmap, context.time)
    x = dofmap.gather(u, fluid)
    x[dofmap.dirichlet_mask] = dofmap.dirichlet_values[dofmap.dirichlet_mask]
    damping = DampingRule(config)
    retained = None
    history = []
    eps_geom = config.geometry_freeze_factor * snapshot.cut_state.h

    x_base, dx, omega = None, None, 1.0
    for iteration in range(1, config.max_iterations + 1):
        try:
            acc, evaluation = assemble_system(problem, snapshot, x, old, context, fluid_guess=fluid,
                                              forced_cases=forced_cases)
        except ElementInversionError as error:
            if x_base is None:
                raise
            omega = damping.cutback()
            if omega == 0.0:
                raise NewtonDivergenceError(f"Damping exhausted after element inversion: {error}",
                                            time=context.time, iteration=iteration)
            logger.debug(f"Element inversion in iteration {iteration}, retrying with omega={omega:.4g}")
            x = x_base + omega * dx
            continue
        norms = residual_norms(dofmap, acc.residual)
        total = float(np.sqrt(sum(value ** 2 for value in norms.values())))
        history.append(total)
        cases = snapshot.samples.case_counts(evaluation.cases) if evaluation is not None else {}
        logger.debug(f"t={context.time:.6g} iteration {iteration}: solid={norms['solid']:.3e} "
                     f"momentum={norms['momentum']:.3e} continuity={norms['continuity']:.3e} cases={cases}")
        if _converged(norms, config.tolerance):
            state = _final_state(problem, snapshot, x, old, fluid, context, previous.step + 1)
            return StepResult(state=state, snapshot=snapshot, evaluation=evaluation, accumulator=acc,
                              iterations=iteration, norms=norms, history=history)

        omega = damping.update(total)
        if omega == 0.0:
            raise NewtonDivergenceError(f"Residual keeps growing at the minimal damping, norm {total:.3e}",
                                        time=context.time, iteration=iteration)
        dx = solve_linear(acc.matrix(), acc.residual, ~dofmap.dirichlet_mask)
        x_base = x
        x = x + omega * dx

        du = np.max(np.abs(omega * dx[:dofmap.fluid_offset])) if dofmap.fluid_offset else 0.0
        if iteration >= config.growth_trigger and problem.has_fluid:
            active = snapshot.active_elements
            retained = active if retained is None else (retained | active)
        if du > eps_geom:
            u_new, _, _ = dofmap.split(x)
            v_full, p_full = fluid_arrays(dofmap, x, fluid)
            fluid.v[:] = v_full
            fluid.p[:] = p_full
            fluid.has_value[dofmap.fluid_nodes] = True
            active_before = dofmap.active_fluid_nodes
            snapshot = update_geometry(problem, u_new, fluid, context.dt, retained_elements=retained)
            old = SystemState(old.time, old.solid, transfer_to_snapshot(old.fluid, active_before, snapshot), old.step)
            fluid = transfer_to_snapshot(fluid, active_before, snapshot)
            dofmap = snapshot.dofmap
            apply_dirichlet(problem, dofmap, context.time)
            x = dofmap.gather(u_new, fluid)
            x[dofmap.dirichlet_mask] = dofmap.dirichlet_values[dofmap.dirichlet_mask]
            x_base, dx = None, None
            if np.any(dofmap.active_fluid_nodes != active_before):
                logger.debug(f"Geometry updated in iteration {iteration}: {len(dofmap.fluid_nodes)} active fluid nodes")
    raise NewtonDivergenceError(f"Newton iteration did not converge, last norm {history[-1]:.3e}",
                                time=context.time, iteration=config.max_iterations)


def _final_state(problem: CoupledProblem, snapshot: GeometrySnapshot, x, old: SystemState, fluid: FluidState,
                 context: StepContext, step: int) -> SystemState:
    dofmap = snapshot.dofmap
    u = dofmap.split(x)[0].copy()
    velocity, acceleration = old.solid.rates(u, context)
    new_fluid = fluid.copy()
    if problem.has_fluid:
        v_full, p_full = fluid_arrays(dofmap, x, fluid)
        rate = theta_rate(v_full, old.fluid.v, old.fluid.rate, context)
        active = dofmap.fluid_nodes
        new_fluid.v[active] = v_full[active]
        new_fluid.p[active] = p_full[active]
        new_fluid.rate[active] = rate[active]
        new_fluid.has_value[active] = True
    return SystemState(time=context.time, solid=SolidState(u, velocity, acceleration), fluid=new_fluid, step=step,
                       info={'active_nodes': dofmap.active_fluid_nodes.copy()})


def advance_time_step(problem: CoupledProblem, state: SystemState, time: float, dt: Optional[float],
                      theta: float, config: NewtonConfig) -> StepResult:
    """Solve the time level t_{n+1} = time from the converged state at t_n."""
    context = StepContext(time=time, dt=dt, theta=theta)
    result = newton_solve(problem, state, context, config, previous_active=state.info.get('active_nodes'))
    cases = result.snapshot.samples.case_counts(result.evaluation.cases) if result.evaluation is not None else {}
    logger.info(f"t={time:.6g} dt={dt} newton={result.iterations} "
                f"fluid_dofs={result.snapshot.dofmap.n_fluid_dofs} cases={cases}")
    return result


def run_time_loop(problem: CoupledProblem, state: SystemState, scheme: TimeScheme, config: NewtonConfig,
                  on_step: Callable = None) -> SystemState:
    """Advance through the whole schedule; `on_step(result)` is called after every converged step."""
    for time, dt in scheme.steps(start=state.time):
        try:
            result = advance_time_step(problem, state, time, dt, scheme.theta, config)
        except SolverError as error:
            error.state = state
            raise
        state = result.state
        if on_step is not None:
            on_step(result)
    return state


def solve_steady(problem: CoupledProblem, state: SystemState, config: NewtonConfig, time: float = 0.0) -> StepResult:
    """Steady solution without time derivatives, starting from `state`."""
    return newton_solve(problem, state, StepContext(time=time, dt=None), config,
                        previous_active=state.info.get('active_nodes'))
