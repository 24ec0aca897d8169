# -*- coding: utf-8 -*-
"""High level APIs for human"""
from typing import Union

from ..core.scenario import ScenarioConfig, parse_config, resolve_scenario
from ..core.task import SimulationTask


def run_scenario(
        config: Union[str, ScenarioConfig],
        output_dir: str = None,
        write_fields_every: int = None,
        checkpoint_every: int = None,
        debug_cut: bool = False,
        debug_interface: bool = False,
        restart: str = None
    ) -> SimulationTask:
    """Run a scenario through its whole time schedule.

    :param config: a parsed ScenarioConfig, a scenario file path or the name of a shipped scenario.
    :param output_dir: (optional) directory of all outputs, the current directory if None.
    :param write_fields_every: (optional) write VTK field files every N steps, 0 for never.
        If None, the scenario's [output] value is used.
    :param checkpoint_every: (optional) write a checkpoint every N steps, 0 for never.
    :param debug_cut: also write the clipped cut polygons with the field files.
    :param debug_interface: write a per-sample interface table every step.
    :param restart: (optional) checkpoint file to continue from.
    :return: the finished task; its context holds the final state and the written outputs.
    """
    if not isinstance(config, ScenarioConfig):
        config = parse_config(resolve_scenario(config))
    task = SimulationTask(
        config=config,
        output_dir=output_dir,
        write_fields_every=write_fields_every,
        checkpoint_every=checkpoint_every,
        debug_cut=debug_cut,
        debug_interface=debug_interface,
        restart=restart
    )
    task.run()
    return task
