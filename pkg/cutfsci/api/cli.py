# -*- coding: utf-8 -*-
"""Command line tool of cutfsci."""
import os.path
import sys

import click

from ..config import REQUIRED_SECTIONS, GlobalConfig, get_config
from ..exception import CheckpointError, ConfigurationError, CutFsciError, OutputError, SolverError
from ..log import LoggerLoader, get_logger

logger = get_logger()

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_IO = 4


def exit_code(error: Exception) -> int:
    """Exit status of a failed run."""
    if isinstance(error, ConfigurationError):
        return EXIT_CONFIG
    if isinstance(error, (OutputError, CheckpointError, OSError)):
        return EXIT_IO
    if isinstance(error, CutFsciError):
        return EXIT_SOLVER
    raise error


@click.group()
@click.help_option("-h", "--help")
def cli():
    """Command line tool to run unfitted fluid-structure-contact simulations."""
    pass


SECTION_HELP = {
    'geometry': "cut-cell tolerance, island removal and quadrature orders",
    'interface': "Nitsche penalties, slip law and stress weighting",
    'stabilization': "continuous interior and ghost penalty parameters",
    'newton': "Newton tolerance, damping and geometry freezing",
    'output': "CSV version and float format",
    'log': "console log format and level",
}


@cli.command("config")
@click.option("-l", "--location", is_flag=True, help="Show the location of the solver defaults file.")
@click.option("-s", "--section", type=click.Choice(REQUIRED_SECTIONS),
              help="Print the defaults of one section, e.g. --section newton.")
@click.option("-g", "--get", type=(str, str), help="Print one default, "
                                                   "usage: --get <section> <key>, e.g. --get interface slip_length.")
@click.help_option("-h", "--help")
def config(location, section, get):
    """Show the solver defaults a scenario falls back to.

    Without options the sections are listed with what they control.
    """
    from ..core.writer import summary_table

    configs = get_config()
    if location:
        logger.info(f"Solver defaults file path: {GlobalConfig.config_fpath}")
        return

    if get:
        sec, key = get
        if sec not in configs.sections():
            logger.error(f"Section '{sec}' is not found. Valid sections: {configs.sections()}")
            sys.exit(EXIT_CONFIG)
        if key not in configs[sec]:
            logger.error(f"Key '{key}' is not found in [{sec}]. Valid keys: {list(configs[sec].keys())}")
            sys.exit(EXIT_CONFIG)
        print(configs[sec][key] or '<unset>')
        return

    if section:
        print(summary_table([(key, value or '<unset>') for key, value in configs[section].items()],
                            ["Key", "Default"]))
        return

    print(summary_table([(name, len(configs[name]), SECTION_HELP.get(name, ''))
                         for name in configs.sections()], ["Section", "Keys", "Controls"]))


@cli.command("scenario.list")
@click.help_option("-h", "--help")
def list_scenarios():
    """List the scenarios shipped with the package."""
    from ..core.scenario import parse_config, shipped_scenarios
    from ..core.writer import summary_table

    rows = []
    for name, path in shipped_scenarios().items():
        try:
            scenario = parse_config(path)
            description = scenario.description
            t_end = scenario.time.schedule[-1][0] if scenario.time.schedule else scenario.time.t0
        except ConfigurationError as e:
            description, t_end = f"<invalid: {e}>", ''
        rows.append((name, description, t_end))
    print(summary_table(rows, ["Name", "Description", "EndTime"]))


@cli.command("scenario.show")
@click.argument("name")
@click.help_option("-h", "--help")
def show_scenario(name):
    """Print the path and content of a shipped scenario."""
    from ..core.scenario import shipped_scenarios

    scenarios = shipped_scenarios()
    if name not in scenarios:
        logger.error(f"Scenario '{name}' is not shipped. Valid scenarios: {list(scenarios)}")
        sys.exit(EXIT_CONFIG)
    path = scenarios[name]
    logger.info(f"Scenario file path: {path}")
    with open(path, 'r') as f:
        print(f.read())


@cli.command("run")
@click.argument("scenario")
@click.option("-o", "--output-dir",
              help="Output directory, which could be an absolute path or a relative path. "
                   "If not specified, outputs are written to the current directory.")
@click.option("-f", "--write-fields-every", type=int,
              help="Write VTK field files every N steps, 0 for never. "
                   "Overrides the [output] value of the scenario.")
@click.option("--debug-cut", is_flag=True, help="Also write the clipped cut polygons with the field files.")
@click.option("--debug-interface", is_flag=True, help="Write a per-sample interface table every step.")
@click.option("-c", "--checkpoint-every", type=int,
              help="Write a checkpoint every N steps, 0 for never. Overrides the [output] value of the scenario.")
@click.option("-r", "--restart", help="Checkpoint file to continue the run from.")
@click.option("-v", "--verbose", is_flag=True, help="Log Newton iterations and geometry updates.")
@click.help_option("-h", "--help")
def run(scenario, output_dir, write_fields_every, debug_cut, debug_interface, checkpoint_every, restart, verbose):
    """Run a scenario file, or a shipped scenario by name."""
    from ..core.scenario import parse_config, resolve_scenario
    from ..core.task import SimulationTask
    from ..core.writer import summary_table

    if verbose:
        LoggerLoader.set_level("DEBUG")

    try:
        path = resolve_scenario(scenario)
        scenario_config = parse_config(path)
    except ConfigurationError as e:
        logger.error(f"Invalid scenario: {e}")
        sys.exit(EXIT_CONFIG)

    output_dir = os.path.abspath(output_dir or './')
    logger.info("Run scenario. Task information: ")
    logger.info("%15s: %s" % ("Scenario", path))
    logger.info("%15s: %s" % ("Output", output_dir))
    if restart is not None:
        logger.info("%15s: %s" % ("Restart", restart))

    task = SimulationTask(scenario_config, output_dir=output_dir, write_fields_every=write_fields_every,
                          checkpoint_every=checkpoint_every, debug_cut=debug_cut,
                          debug_interface=debug_interface, restart=restart)
    try:
        task.run()
    except (CutFsciError, OSError) as e:
        code = exit_code(e)
        logger.error(f"final status: {task.context['status']}, error: {task.context.get('error', e)}")
        if isinstance(e, SolverError) or task.context['status'] == 'solver_failed':
            checkpoint = task.context.get('failure_checkpoint')
            if checkpoint is not None:
                logger.error(f"Last converged state saved to: {checkpoint}")
        sys.exit(code)

    state = task.context['state']
    print(summary_table([(scenario_config.name, state.time, task.context.get('steps', 0),
                          task.context.get('newton_iterations', 0), len(task.context.get('outputs', [])))],
                        ["Scenario", "FinalTime", "Steps", "NewtonIterations", "Outputs"]))
    sys.exit(EXIT_OK)


if __name__ == '__main__':
    cli()
