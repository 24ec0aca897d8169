# -*- encoding: utf-8 -*-
"""Task implementations."""
import os

from .base import BaseTask, BaseTaskStep
from .checkpoint import checkpoint_path, load_checkpoint, save_checkpoint
from .coupling import interface_debug_rows
from .postproc import TimeSeriesRecord, make_record, nearest_node
from .scenario import ScenarioConfig, build_problem, build_scheme
from .solver import run_time_loop, solve_steady
from .state import FluidState, SolidState, SystemState
from .system import update_geometry
from .writer import TimeSeriesWriter, export_fields, timeseries_path, write_interface_debug
from ..exception import CheckpointError, ExtensionError, GeometryError, OutputError, SolverError
from ..log import get_logger

logger = get_logger()


class StepRecorder(BaseTaskStep):
    """Writes the time series, field files, interface tables and checkpoints of converged steps."""

    def __init__(self, task: BaseTask, problem, config: ScenarioConfig, output_dir: str,
                 write_fields_every: int = 0, checkpoint_every: int = 0, debug_cut: bool = False,
                 debug_interface: bool = False):
        super().__init__(task)
        self.problem = problem
        self.output_dir = output_dir
        self.prefix = config.output.prefix
        self.write_fields_every = write_fields_every
        self.checkpoint_every = checkpoint_every
        self.debug_cut = debug_cut
        self.debug_interface = debug_interface
        self.flow_sides = config.output.flow_boundaries if problem.has_fluid else ()
        self.probe_node = nearest_node(problem.mesh, config.output.probe) if config.output.probe else None
        self.timeseries = TimeSeriesWriter(timeseries_path(output_dir, self.prefix))
        self.task.context.setdefault('outputs', [])

    def _outputs(self, paths):
        self.task.context['outputs'].extend(paths if isinstance(paths, list) else [paths])

    def record_initial(self, state: SystemState):
        """Row and field files of the state the run starts from."""
        snapshot = update_geometry(self.problem, state.solid.u, state.fluid, None)
        record = TimeSeriesRecord(t=state.time, ndof=snapshot.dofmap.n_dofs)
        if self.probe_node is not None:
            record.probe_ux, record.probe_uy = state.solid.u[self.probe_node]
        self.timeseries.append(record)
        if self.write_fields_every:
            self._outputs(export_fields(self.output_dir, self.prefix, state.step, self.problem, state, snapshot,
                                        debug_cut=self.debug_cut))

    def on_step(self, result):
        state = result.state
        self.task.context['state'] = state
        self.task.context['steps'] = self.task.context.get('steps', 0) + 1
        self.task.context['newton_iterations'] = self.task.context.get('newton_iterations', 0) + result.iterations
        self.timeseries.append(make_record(result, self.flow_sides, self.probe_node))
        step = state.step
        if self.write_fields_every and step % self.write_fields_every == 0:
            self._outputs(export_fields(self.output_dir, self.prefix, step, self.problem, state, result.snapshot,
                                        result.evaluation, debug_cut=self.debug_cut))
        if self.debug_interface and result.evaluation is not None:
            path = os.path.join(self.output_dir, f"{self.prefix}_interface_{step:06d}.csv")
            self._outputs(write_interface_debug(path, interface_debug_rows(result.snapshot.samples,
                                                                           result.evaluation)))
        if self.checkpoint_every and step % self.checkpoint_every == 0:
            self._outputs(save_checkpoint(checkpoint_path(self.output_dir, self.prefix, step), state))

    def finish(self):
        self._outputs(self.timeseries.write())


class SimulationTask(BaseTask):
    """Runs one scenario: initial state or restart, time loop, outputs.

    context['status'] goes from 'initialized' over 'running' to 'finished',
    'solver_failed' or 'output_failed'; failures also store context['error'].
    """

    def __init__(self,
                 config: ScenarioConfig,
                 output_dir: str = None,
                 write_fields_every: int = None,
                 checkpoint_every: int = None,
                 debug_cut: bool = False,
                 debug_interface: bool = False,
                 restart: str = None):
        super().__init__()
        self.config = config
        self.output_dir = output_dir or os.path.abspath('./')
        self.write_fields_every = config.output.write_fields_every if write_fields_every is None \
            else write_fields_every
        self.checkpoint_every = config.output.checkpoint_every if checkpoint_every is None else checkpoint_every
        self.debug_cut = debug_cut
        self.debug_interface = debug_interface
        self.restart = restart
        self.context['status'] = 'initialized'
        self.context['scenario'] = config.name

    def initial_state(self, problem) -> SystemState:
        if self.restart is not None:
            return load_checkpoint(self.restart, problem.mesh.n_nodes, problem.n_grid_nodes)
        return SystemState(time=self.config.time.t0, solid=SolidState.zeros(problem.mesh.n_nodes),
                           fluid=FluidState.zeros(problem.n_grid_nodes))

    def run(self):
        problem = build_problem(self.config)
        try:
            os.makedirs(self.output_dir, exist_ok=True)
            state = self.initial_state(problem)
            recorder = StepRecorder(self, problem, self.config, self.output_dir, self.write_fields_every,
                                    self.checkpoint_every, self.debug_cut, self.debug_interface)
            if self.restart is None:
                recorder.record_initial(state)
        except (OSError, OutputError, CheckpointError) as e:
            self.context['status'] = 'output_failed'
            self.context['error'] = e
            raise
        self.context['state'] = state
        self.context['status'] = 'running'
        logger.info(f"Running scenario '{self.config.name}' from t={state.time:.6g}, "
                    f"{problem.mesh.n_elements} solid elements, "
                    f"{problem.grid.n_elements if problem.has_fluid else 0} fluid elements")
        try:
            if self.config.time.steady:
                recorder.on_step(solve_steady(problem, state, self.config.newton, time=state.time))
            else:
                run_time_loop(problem, state, build_scheme(self.config), self.config.newton,
                              on_step=recorder.on_step)
        except (SolverError, GeometryError, ExtensionError) as e:
            self.context['status'] = 'solver_failed'
            self.context['error'] = e
            self._dump_failure(recorder)
            raise
        except (OutputError, CheckpointError) as e:
            self.context['status'] = 'output_failed'
            self.context['error'] = e
            raise
        try:
            recorder.finish()
        except OutputError as e:
            self.context['status'] = 'output_failed'
            self.context['error'] = e
            raise
        self.context['status'] = 'finished'
        logger.info(f"Scenario '{self.config.name}' finished at t={self.context['state'].time:.6g} "
                    f"after {self.context.get('steps', 0)} steps")
        return self.context['state']

    def _dump_failure(self, recorder: StepRecorder):
        """Checkpoint of the last converged state and the time series written so far."""
        state = self.context['state']
        path = os.path.join(self.output_dir, f"{self.config.output.prefix}_failed.npz")
        try:
            self.context['failure_checkpoint'] = save_checkpoint(path, state)
            recorder.finish()
        except (OutputError, CheckpointError) as e:
            logger.error(f"Cannot write failure outputs: {e}")
