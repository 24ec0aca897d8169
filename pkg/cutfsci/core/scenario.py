# -*- coding: utf-8 -*-
"""Scenario files: parsing, validation, serialization and problem construction.

A scenario is a sectioned INI file (see doc/config_grammar.md). Keys not
given fall back to the package defaults in ``config/global.ini``; unknown
sections and keys are rejected.
"""
import configparser
import os
import re
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from .base import BaseTimeFunction
from .coupling import InterfaceParams
from .fluid import FluidBoundary, FluidParams, StabilizationConfig
from .generator import format_edge_tags, mesh_generators, parse_pair
from .material import NeoHookeMaterial
from .mesh import GRID_TAGS, SIDES, SolidMesh, build_structured_grid, merge_solid_meshes, read_solid_mesh
from .solid import SolidNeumann
from .solver import NewtonConfig, TimeScheme
from .system import CoupledProblem, GeometryParams, SolidDirichlet
from .timefunction import ConstantFunction, parse_time_function
from ..config import section_values
from ..exception import ConfigurationError
from ..log import get_logger

logger = get_logger()

LOAD_KINDS = ('dirichlet', 'neumann')
_ZERO = ConstantFunction(0.0)


def _parse_bool(text):
    value = configparser.ConfigParser.BOOLEAN_STATES.get(text.strip().lower())
    if value is None:
        raise ValueError(f"expected a boolean, got '{text}'")
    return value


def _parse_optional_float(text):
    return None if text.strip() == '' else float(text)


def _parse_schedule(text):
    """'t_end:dt; t_end:dt; ...' -> [(t_end, dt), ...]."""
    schedule = []
    for item in text.split(';'):
        if not item.strip():
            continue
        t_end, dt = item.split(':')
        schedule.append((float(t_end), float(dt)))
    return schedule


def _parse_sides(text):
    sides = tuple(item.strip() for item in text.split(',') if item.strip())
    for side in sides:
        if side not in SIDES:
            raise ValueError(f"unknown grid side '{side}'")
    return sides


def _parse_tag(text):
    tag = text.strip()
    if tag not in GRID_TAGS:
        raise ValueError(f"unknown grid boundary tag '{tag}', valid: {list(GRID_TAGS)}")
    return tag


def _format_value(value) -> str:
    if isinstance(value, BaseTimeFunction):
        return value.to_text()
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(_format_value(item) for item in value)
    if isinstance(value, dict):
        return format_edge_tags(value)
    if value is None:
        return ''
    return str(value)


def _format_schedule(schedule) -> str:
    return "; ".join(f"{t_end!r}:{dt!r}" for t_end, dt in schedule)


# Value parsers by key, per section kind.
FUNCTION = 'function'
FIELD_PARSERS = {
    'str': str.strip,
    'int': int,
    'float': float,
    'optional_float': _parse_optional_float,
    'bool': _parse_bool,
    'pair': parse_pair,
    'sides': _parse_sides,
    'tag': _parse_tag,
    'schedule': _parse_schedule,
}

SECTION_KEYS = {
    'scenario': {'name': 'str', 'description': 'str'},
    'grid': dict({'origin': 'pair', 'extent': 'pair', 'nx': 'int', 'ny': 'int'}, **{side: 'tag' for side in SIDES}),
    'fluid': {'density': 'float', 'viscosity': 'float', 'body_force': 'pair', 'pin_point': 'pair',
              'pin_value': FUNCTION},
    'fluid.side': {'x': FUNCTION, 'y': FUNCTION, 'p': FUNCTION, 'pressure': FUNCTION},
    'body': {'id': 'int', 'mesh': 'str', 'generator': 'str', 'youngs_modulus': 'float', 'poisson_ratio': 'float',
             'density': 'float', 'rigid': 'bool', 'cuts_fluid': 'bool', 'motion_x': FUNCTION,
             'motion_y': FUNCTION, 'body_force': 'pair'},
    'body.load': {'x': FUNCTION, 'y': FUNCTION},
    'interface': {'gamma_s0': 'float', 'gamma_f0': 'float', 'gamma_t0': 'optional_float',
                  'gamma_t_scale': 'float', 'slip_length': 'float', 'tangential': 'str', 'weighting': 'str'},
    'stabilization': {'gamma_p': 'float', 'gamma_v': 'float', 'gamma_gv': 'float', 'gamma_gp': 'float',
                      'ghost_penalty': 'bool'},
    'geometry': {'tolerance_factor': 'float', 'island_ratio': 'float', 'volume_order': 'int',
                 'interface_order': 'int', 'contact_point_multiplier': 'int'},
    'time': {'theta': 'float', 't0': 'float', 'schedule': 'schedule', 'steady': 'bool'},
    'newton': {'tolerance': 'float', 'max_iterations': 'int', 'omega_min': 'float', 'omega_decrease': 'float',
               'omega_increase': 'float', 'growth_threshold': 'float', 'geometry_freeze_factor': 'float',
               'growth_trigger': 'int'},
    'output': {'prefix': 'str', 'write_fields_every': 'int', 'checkpoint_every': 'int',
               'flow_boundaries': 'sides', 'probe': 'pair'},
}
GEOMETRY_ONLY = ('tolerance_factor', 'island_ratio', 'volume_order')
INTERFACE_GEOMETRY = ('interface_order', 'contact_point_multiplier')


@dataclass
class GridSpec:
    origin: Tuple[float, float]
    extent: Tuple[float, float]
    nx: int
    ny: int
    tags: Dict[str, str] = field(default_factory=dict)


@dataclass
class FluidSpec:
    density: float
    viscosity: float
    body_force: Optional[Tuple[float, float]] = None
    pin_point: Optional[Tuple[float, float]] = None
    pin_value: BaseTimeFunction = _ZERO


@dataclass
class FluidSideSpec:
    side: str
    components: Dict[str, BaseTimeFunction] = field(default_factory=dict)
    pressure: Optional[BaseTimeFunction] = None


@dataclass
class EdgeLoadSpec:
    kind: str
    edge_set: str
    components: Dict[str, BaseTimeFunction] = field(default_factory=dict)


@dataclass
class BodySpec:
    name: str
    id: int
    generator: Optional[str] = None
    generator_params: Dict[str, object] = field(default_factory=dict)
    mesh: Optional[str] = None
    youngs_modulus: Optional[float] = None
    poisson_ratio: Optional[float] = None
    density: float = 0.0
    rigid: bool = False
    cuts_fluid: bool = True
    motion: Dict[str, BaseTimeFunction] = field(default_factory=dict)
    body_force: Optional[Tuple[float, float]] = None
    loads: List[EdgeLoadSpec] = field(default_factory=list)


@dataclass
class TimeSpec:
    theta: float = 1.0
    t0: float = 0.0
    schedule: List[Tuple[float, float]] = field(default_factory=list)
    steady: bool = False


@dataclass
class OutputSpec:
    prefix: str = 'run'
    write_fields_every: int = 0
    checkpoint_every: int = 0
    flow_boundaries: Tuple[str, ...] = ()
    probe: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        for name in ('write_fields_every', 'checkpoint_every'):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative", key_path=f"output.{name}")


@dataclass
class ScenarioConfig:
    name: str
    description: str = ''
    bodies: List[BodySpec] = field(default_factory=list)
    grid: Optional[GridSpec] = None
    fluid: Optional[FluidSpec] = None
    fluid_sides: List[FluidSideSpec] = field(default_factory=list)
    interface: InterfaceParams = field(default_factory=InterfaceParams)
    stabilization: StabilizationConfig = field(default_factory=StabilizationConfig)
    geometry: GeometryParams = field(default_factory=GeometryParams)
    newton: NewtonConfig = field(default_factory=NewtonConfig)
    time: TimeSpec = field(default_factory=TimeSpec)
    output: OutputSpec = field(default_factory=OutputSpec)
    # Directory relative mesh paths are resolved against.
    base_dir: str = field(default='.', compare=False)

    @property
    def has_fluid(self) -> bool:
        return self.grid is not None


_SECTION_LINE = re.compile(r"^\[([^\]]+)\]")
_KEY_LINE = re.compile(r"^([^=:\s;#][^=:]*?)\s*[=:]")


def _line_numbers(text: str):
    """(section, key) -> line number; (section, None) for section headers."""
    lines = {}
    section = None
    for lineno, line in enumerate(text.splitlines(), start=1):
        match = _SECTION_LINE.match(line)
        if match:
            section = match.group(1).strip()
            lines[(section, None)] = lineno
            continue
        match = _KEY_LINE.match(line)
        if match and section is not None:
            lines[(section, match.group(1).strip().lower())] = lineno
    return lines


class _Reader(object):
    """Typed access to the raw sections with key paths and line numbers in errors."""

    def __init__(self, parser: configparser.ConfigParser, lines):
        self.parser = parser
        self.lines = lines

    def error(self, message, section, key=None):
        key_path = section if key is None else f"{section}.{key}"
        return ConfigurationError(message, key_path=key_path, line=self.lines.get((section, key)))

    def values(self, section: str, schema: Dict[str, str], extra: Dict[str, object] = None):
        extra = extra or {}
        result = {}
        for key, text in self.parser[section].items():
            kind = schema.get(key)
            try:
                if kind == FUNCTION:
                    result[key] = parse_time_function(text, key_path=f"{section}.{key}")
                elif kind is not None:
                    result[key] = FIELD_PARSERS[kind](text)
                elif key in extra:
                    result[key] = extra[key](text)
                else:
                    valid = sorted(list(schema) + list(extra))
                    raise self.error(f"Unknown key '{key}', valid: {valid}", section, key)
            except ConfigurationError as e:
                if e.line is None:
                    error = ConfigurationError(str(e), line=self.lines.get((section, key)))
                    error.key_path = e.key_path
                    raise error
                raise
            except (ValueError, TypeError) as e:
                raise self.error(f"Invalid value '{text}': {e}", section, key)
        return result


def _global_section(name: str, schema: Dict[str, str]):
    """Package defaults of a section, typed like scenario values."""
    return section_values(name, {key: FIELD_PARSERS[kind] for key, kind in schema.items() if kind in FIELD_PARSERS})


def _build(cls, values, section, reader=None):
    try:
        return cls(**values)
    except ConfigurationError as e:
        if reader is not None and e.key_path is not None:
            key = e.key_path.split('.')[-1]
            error = ConfigurationError(str(e), line=reader.lines.get((section, key)))
            error.key_path = e.key_path
            raise error
        raise


def _parse_body(reader: _Reader, section: str, name: str) -> BodySpec:
    generator_name = reader.parser[section].get('generator', '').strip()
    generator_cls = None
    extra = {}
    if generator_name:
        generator_cls = mesh_generators.get(generator_name)
        if generator_cls is None:
            raise reader.error(f"Unknown mesh generator '{generator_name}', valid: {list(mesh_generators)}",
                               section, 'generator')
        extra = generator_cls.accepted_keys
    values = reader.values(section, SECTION_KEYS['body'], extra)
    if 'id' not in values:
        raise reader.error("Body needs an integer 'id'", section)
    if ('mesh' in values) == bool(generator_name):
        raise reader.error("Body needs exactly one of 'mesh' or 'generator'", section)
    body = BodySpec(name=name, id=values['id'], generator=generator_name or None, mesh=values.get('mesh'),
                    youngs_modulus=values.get('youngs_modulus'), poisson_ratio=values.get('poisson_ratio'),
                    density=values.get('density', 0.0), rigid=values.get('rigid', False),
                    cuts_fluid=values.get('cuts_fluid', True), body_force=values.get('body_force'))
    if generator_cls is not None:
        body.generator_params = {key: values[key] for key in generator_cls.accepted_keys if key in values}
        missing = sorted(set(generator_cls.accepted_keys) - {'edge_tags'} - set(body.generator_params))
        if missing:
            raise reader.error(f"Generator '{generator_name}' needs keys {missing}", section)
    for component in 'xy':
        if f"motion_{component}" in values:
            body.motion[component] = values[f"motion_{component}"]
    if body.rigid:
        if body.youngs_modulus is not None or body.poisson_ratio is not None:
            raise reader.error("A rigid body has no material", section)
    else:
        if body.youngs_modulus is None or body.poisson_ratio is None:
            raise reader.error("An elastic body needs 'youngs_modulus' and 'poisson_ratio'", section)
        if body.motion:
            raise reader.error("Only rigid bodies take a prescribed motion", section)
    return body


def parse_config_text(text: str, base_dir: str = '.') -> ScenarioConfig:
    """Parse scenario text; see `parse_config`."""
    parser = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=('#',),
                                       default_section='__defaults__')
    try:
        parser.read_string(text)
    except configparser.MissingSectionHeaderError as e:
        raise ConfigurationError("Key outside of any section", line=e.lineno)
    except (configparser.DuplicateSectionError, configparser.DuplicateOptionError) as e:
        raise ConfigurationError(f"Duplicate entry: {e}", line=e.lineno)
    except configparser.ParsingError as e:
        lineno = e.errors[0][0] if e.errors else None
        raise ConfigurationError("Syntax error", line=lineno)
    reader = _Reader(parser, _line_numbers(text))

    config = ScenarioConfig(name='scenario', base_dir=base_dir)
    interface = _global_section('interface', SECTION_KEYS['interface'])
    interface.update({key: value for key, value in _global_section('geometry', SECTION_KEYS['geometry']).items()
                      if key in INTERFACE_GEOMETRY})
    geometry = {key: value for key, value in _global_section('geometry', SECTION_KEYS['geometry']).items()
                if key in GEOMETRY_ONLY}
    stabilization = _global_section('stabilization', SECTION_KEYS['stabilization'])
    newton = _global_section('newton', SECTION_KEYS['newton'])
    body_sections, load_sections = [], []

    for section in parser.sections():
        parts = section.split('.')
        kind = parts[0]
        if len(parts) == 1 and kind in ('scenario', 'grid', 'fluid', 'interface', 'stabilization', 'geometry',
                                        'time', 'newton', 'output'):
            values = reader.values(section, SECTION_KEYS[kind])
        elif kind == 'fluid' and len(parts) == 2:
            if parts[1] not in SIDES:
                raise reader.error(f"Unknown grid side '{parts[1]}', valid: {list(SIDES)}", section)
            values = reader.values(section, SECTION_KEYS['fluid.side'])
            components = {c: values[c] for c in ('x', 'y', 'p') if c in values}
            config.fluid_sides.append(FluidSideSpec(side=parts[1], components=components,
                                                    pressure=values.get('pressure')))
            continue
        elif kind == 'body' and len(parts) == 2:
            body_sections.append((section, parts[1]))
            continue
        elif kind == 'body' and len(parts) == 4 and parts[2] in LOAD_KINDS:
            load_sections.append((section, parts[1], parts[2], parts[3]))
            continue
        else:
            raise reader.error(f"Unknown section '{section}'", section)

        if kind == 'scenario':
            config.name = values.get('name', config.name)
            config.description = values.get('description', '')
        elif kind == 'grid':
            missing = sorted({'origin', 'extent', 'nx', 'ny'} - set(values))
            if missing:
                raise reader.error(f"Grid needs keys {missing}", section)
            config.grid = GridSpec(origin=values['origin'], extent=values['extent'], nx=values['nx'],
                                   ny=values['ny'], tags={side: values.get(side, 'none') for side in SIDES})
        elif kind == 'fluid':
            if 'density' not in values or 'viscosity' not in values:
                raise reader.error("Fluid needs 'density' and 'viscosity'", section)
            config.fluid = FluidSpec(density=values['density'], viscosity=values['viscosity'],
                                     body_force=values.get('body_force'), pin_point=values.get('pin_point'),
                                     pin_value=values.get('pin_value', _ZERO))
        elif kind == 'interface':
            interface.update(values)
        elif kind == 'geometry':
            geometry.update({key: value for key, value in values.items() if key in GEOMETRY_ONLY})
            interface.update({key: value for key, value in values.items() if key in INTERFACE_GEOMETRY})
        elif kind == 'stabilization':
            stabilization.update(values)
        elif kind == 'newton':
            newton.update(values)
        elif kind == 'time':
            config.time = _build(TimeSpec, values, section, reader)
            _build(TimeScheme, {'theta': config.time.theta, 'schedule': config.time.schedule,
                                't0': config.time.t0}, section, reader)
        elif kind == 'output':
            config.output = _build(OutputSpec, values, section, reader)

    config.interface = _build(InterfaceParams, interface, 'interface', reader)
    config.geometry = _build(GeometryParams, geometry, 'geometry', reader)
    config.stabilization = _build(StabilizationConfig, stabilization, 'stabilization', reader)
    config.newton = _build(NewtonConfig, newton, 'newton', reader)

    bodies = {}
    for section, name in body_sections:
        body = _parse_body(reader, section, name)
        if body.id in {b.id for b in bodies.values()}:
            raise reader.error(f"Duplicate body id {body.id}", section, 'id')
        bodies[name] = body
    for section, name, load_kind, edge_set in load_sections:
        if name not in bodies:
            raise reader.error(f"Load on unknown body '{name}'", section)
        values = reader.values(section, SECTION_KEYS['body.load'])
        bodies[name].loads.append(EdgeLoadSpec(kind=load_kind, edge_set=edge_set, components=values))
    config.bodies = list(bodies.values())
    _validate(config, reader)
    return config


def _validate(config: ScenarioConfig, reader: _Reader):
    if not config.bodies:
        raise ConfigurationError("A scenario needs at least one body", key_path='body')
    if (config.grid is None) != (config.fluid is None):
        raise ConfigurationError("The [grid] and [fluid] sections must be given together", key_path='fluid')
    if config.grid is None:
        if config.fluid_sides:
            raise ConfigurationError("Fluid boundary sections need a grid", key_path='grid')
        if config.output.flow_boundaries:
            raise reader.error("Flow boundaries need a grid", 'output', 'flow_boundaries')
        return
    given = {spec.side for spec in config.fluid_sides}
    for spec in config.fluid_sides:
        tag = config.grid.tags[spec.side]
        section = f"fluid.{spec.side}"
        if tag == 'none':
            raise reader.error(f"Side '{spec.side}' is tagged 'none' but has conditions", section)
        if spec.pressure is not None and tag != 'neumann':
            raise reader.error("A pressure load needs a 'neumann' side", section, 'pressure')
        if tag == 'dirichlet' and not spec.components:
            raise reader.error("A 'dirichlet' side needs at least one component", section)
    for side in SIDES:
        if config.grid.tags[side] == 'dirichlet' and side not in given:
            raise reader.error(f"Side '{side}' is tagged 'dirichlet' but has no [fluid.{side}] section",
                               'grid', side)


def parse_config(path: str) -> ScenarioConfig:
    """Parse and validate a scenario file.

    :raise ConfigurationError: syntax errors with line numbers, semantic errors with key paths.
    """
    if not os.path.isfile(path):
        raise ConfigurationError(f"Scenario file not found: {path}")
    with open(path, 'r') as f:
        text = f.read()
    config = parse_config_text(text, base_dir=os.path.dirname(os.path.abspath(path)))
    logger.debug(f"Parsed scenario '{config.name}' from {path}")
    return config


def _section(lines, name, values):
    lines.append(f"[{name}]")
    for key, value in values:
        lines.append(f"{key} = {_format_value(value)}".rstrip())
    lines.append("")


def serialize_config(config: ScenarioConfig) -> str:
    """Scenario text with every key written out; parsing it gives an equal config."""
    lines = []
    _section(lines, 'scenario', [('name', config.name), ('description', config.description)])
    if config.grid is not None:
        grid = config.grid
        _section(lines, 'grid', [('origin', grid.origin), ('extent', grid.extent), ('nx', grid.nx), ('ny', grid.ny)]
                 + [(side, grid.tags[side]) for side in SIDES])
        fluid = config.fluid
        values = [('density', fluid.density), ('viscosity', fluid.viscosity)]
        for key in ('body_force', 'pin_point'):
            if getattr(fluid, key) is not None:
                values.append((key, getattr(fluid, key)))
        values.append(('pin_value', fluid.pin_value))
        _section(lines, 'fluid', values)
        for spec in config.fluid_sides:
            values = list(spec.components.items())
            if spec.pressure is not None:
                values.append(('pressure', spec.pressure))
            _section(lines, f"fluid.{spec.side}", values)
    for body in config.bodies:
        values = [('id', body.id)]
        if body.generator is not None:
            values.append(('generator', body.generator))
            values.extend(body.generator_params.items())
        else:
            values.append(('mesh', body.mesh))
        if not body.rigid:
            values.extend([('youngs_modulus', body.youngs_modulus), ('poisson_ratio', body.poisson_ratio)])
        values.extend([('density', body.density), ('rigid', body.rigid), ('cuts_fluid', body.cuts_fluid)])
        values.extend((f"motion_{component}", function) for component, function in body.motion.items())
        if body.body_force is not None:
            values.append(('body_force', body.body_force))
        _section(lines, f"body.{body.name}", values)
        for load in body.loads:
            _section(lines, f"body.{body.name}.{load.kind}.{load.edge_set}", list(load.components.items()))
    interface = config.interface
    _section(lines, 'interface', [(key, getattr(interface, key)) for key in SECTION_KEYS['interface']])
    _section(lines, 'stabilization', [(key, getattr(config.stabilization, key))
                                      for key in SECTION_KEYS['stabilization']])
    _section(lines, 'geometry', [(key, getattr(config.geometry, key)) for key in GEOMETRY_ONLY]
             + [(key, getattr(interface, key)) for key in INTERFACE_GEOMETRY])
    _section(lines, 'newton', [(key, getattr(config.newton, key)) for key in SECTION_KEYS['newton']])
    time = config.time
    lines.extend(["[time]", f"theta = {time.theta!r}", f"t0 = {time.t0!r}",
                  f"schedule = {_format_schedule(time.schedule)}".rstrip(),
                  f"steady = {_format_value(time.steady)}", ""])
    output = config.output
    values = [('prefix', output.prefix), ('write_fields_every', output.write_fields_every),
              ('checkpoint_every', output.checkpoint_every)]
    if output.flow_boundaries:
        values.append(('flow_boundaries', output.flow_boundaries))
    if output.probe is not None:
        values.append(('probe', output.probe))
    _section(lines, 'output', values)
    return "\n".join(lines)


def _constant_field(values):
    values = np.asarray(values, dtype=float)
    return lambda points, t: np.broadcast_to(values, (len(points), 2))


def build_solid_mesh(config: ScenarioConfig) -> SolidMesh:
    """Merged mesh of all bodies; edge sets are named '<body>.<set>'."""
    meshes = []
    for body in config.bodies:
        if body.generator is not None:
            mesh = mesh_generators[body.generator](**body.generator_params).generate(body.id)
        else:
            path = body.mesh if os.path.isabs(body.mesh) else os.path.join(config.base_dir, body.mesh)
            mesh = read_solid_mesh(path)
            mesh = SolidMesh(mesh.nodes, mesh.elements, np.full(mesh.n_elements, body.id),
                             list(mesh.edge_sets.values()))
        meshes.append((body.name, mesh))
    return merge_solid_meshes(meshes)


def build_problem(config: ScenarioConfig) -> CoupledProblem:
    """The coupled problem a scenario describes."""
    mesh = build_solid_mesh(config)
    materials, rigid, dirichlet, neumann, body_forces = {}, {}, [], [], {}
    for body in config.bodies:
        if body.rigid:
            rigid[body.id] = (body.motion.get('x', _ZERO), body.motion.get('y', _ZERO))
        else:
            materials[body.id] = NeoHookeMaterial(body.youngs_modulus, body.poisson_ratio, body.density)
        if body.body_force is not None:
            body_forces[body.id] = np.array(body.body_force, dtype=float)
        for load in body.loads:
            name = f"{body.name}.{load.edge_set}"
            if load.kind == 'dirichlet':
                dirichlet.append(SolidDirichlet(nodes=mesh.edge_set_nodes(name), components=dict(load.components)))
            else:
                traction = (load.components.get('x', _ZERO), load.components.get('y', _ZERO))
                neumann.append(SolidNeumann(edges=mesh.edge_set_indices(name), traction=traction))

    grid = fluid = pin = None
    boundaries = []
    cutting = []
    if config.has_fluid:
        spec = config.grid
        grid = build_structured_grid(spec.origin, spec.extent, spec.nx, spec.ny, spec.tags)
        body_force = _constant_field(config.fluid.body_force) if config.fluid.body_force is not None else None
        fluid = FluidParams(density=config.fluid.density, viscosity=config.fluid.viscosity, body_force=body_force)
        boundaries = [FluidBoundary(side=side.side, dirichlet=dict(side.components), pressure=side.pressure)
                      for side in config.fluid_sides]
        cutting = [body.id for body in config.bodies if body.cuts_fluid]
        if config.fluid.pin_point is not None:
            node = int(np.argmin(np.linalg.norm(grid.node_coords - np.array(config.fluid.pin_point), axis=1)))
            pin = (node, config.fluid.pin_value)

    return CoupledProblem(mesh=mesh, materials=materials, grid=grid, fluid=fluid, cutting_bodies=cutting,
                          rigid_bodies=rigid, fluid_boundaries=boundaries, solid_dirichlet=dirichlet,
                          solid_neumann=neumann, body_forces=body_forces, interface=config.interface,
                          stabilization=config.stabilization, geometry=config.geometry, pressure_pin=pin)


def build_scheme(config: ScenarioConfig) -> TimeScheme:
    return TimeScheme(theta=config.time.theta, schedule=list(config.time.schedule), t0=config.time.t0)


SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), 'scenarios')


def shipped_scenarios() -> Dict[str, str]:
    """Name -> path of the scenario files shipped with the package."""
    if not os.path.isdir(SCENARIO_DIR):
        return {}
    return {os.path.splitext(name)[0]: os.path.join(SCENARIO_DIR, name)
            for name in sorted(os.listdir(SCENARIO_DIR)) if name.endswith('.ini')}


def resolve_scenario(name_or_path: str) -> str:
    """A scenario file path, or the path of the shipped scenario of that name."""
    if os.path.isfile(name_or_path):
        return name_or_path
    scenarios = shipped_scenarios()
    if name_or_path in scenarios:
        return scenarios[name_or_path]
    raise ConfigurationError(f"Scenario file not found: {name_or_path}, shipped scenarios: {list(scenarios)}")
