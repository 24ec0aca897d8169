# -*- coding: utf-8 -*-
"""The monolithic problem: definition, geometry snapshots and global assembly."""
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .assembly import SystemAccumulator
from .base import BaseTimeFunction
from .coupling import (InterfaceParams, InterfaceSamples, assemble_normal_coupling, assemble_tangential_coupling,
                       build_interface_samples, evaluate_interface)
from .cutcell import VOID, CutState, build_cut_state, dry_cut_state
from .dofmap import DofMap, transfer_state
from .fluid import (FluidBoundary, FluidParams, StabilizationConfig, assemble_cip, assemble_fluid,
                    assemble_ghost_penalty, cip_faces, face_speeds)
from .material import NeoHookeMaterial
from .mesh import FluidGrid, InterfaceMesh, SolidMesh, extract_interface
from .solid import SolidNeumann, assemble_solid
from .state import FluidState, StepContext, SystemState, theta_rate
from ..exception import ConfigurationError
from ..log import get_logger

logger = get_logger('solver')

COMPONENT_INDEX = {'x': 0, 'y': 1, 'p': 2}


@dataclass
class GeometryParams:
    tolerance_factor: float = 1e-10
    island_ratio: float = 2.0
    volume_order: int = 4


@dataclass
class SolidDirichlet:
    """Prescribed displacement components on solid nodes."""
    nodes: np.ndarray
    components: Dict[str, BaseTimeFunction]


@dataclass
class CoupledProblem:
    """Everything the monolithic solver needs besides the state.

    `rigid_bodies` maps a body id to its prescribed displacement (fx, fy);
    rigid bodies carry no material and no contact samples.
    """
    mesh: SolidMesh
    materials: Dict[int, NeoHookeMaterial]
    grid: Optional[FluidGrid] = None
    fluid: Optional[FluidParams] = None
    cutting_bodies: Sequence[int] = ()
    rigid_bodies: Dict[int, Tuple[BaseTimeFunction, BaseTimeFunction]] = field(default_factory=dict)
    fluid_boundaries: List[FluidBoundary] = field(default_factory=list)
    solid_dirichlet: List[SolidDirichlet] = field(default_factory=list)
    solid_neumann: List[SolidNeumann] = field(default_factory=list)
    body_forces: Dict[int, np.ndarray] = field(default_factory=dict)
    interface: InterfaceParams = field(default_factory=InterfaceParams)
    stabilization: StabilizationConfig = field(default_factory=StabilizationConfig)
    geometry: GeometryParams = field(default_factory=GeometryParams)
    # grid node and value function of a pinned pressure
    pressure_pin: Optional[Tuple[int, BaseTimeFunction]] = None

    def __post_init__(self):
        if (self.grid is None) != (self.fluid is None):
            raise ConfigurationError("A fluid needs a grid and a grid needs a fluid")
        bodies = set(int(b) for b in self.mesh.body_ids)
        elastic = bodies - set(self.rigid_bodies)
        missing = elastic - set(self.materials)
        if missing:
            raise ConfigurationError(f"No material for elastic bodies {sorted(missing)}")
        unknown = set(self.cutting_bodies) - bodies
        if unknown:
            raise ConfigurationError(f"Unknown cutting bodies {sorted(unknown)}")

    @property
    def has_fluid(self) -> bool:
        return self.fluid is not None

    @property
    def n_grid_nodes(self) -> int:
        return self.grid.n_nodes if self.grid is not None else 0


@dataclass
class GeometrySnapshot:
    """Geometry frozen between two re-intersections."""
    interface: InterfaceMesh
    cut_state: CutState
    dofmap: DofMap
    samples: InterfaceSamples
    cip_speeds: Optional[np.ndarray] = None
    ghost_speeds: Optional[np.ndarray] = None

    @property
    def active_elements(self):
        if self.cut_state.classification is None:
            return np.zeros(0, dtype=bool)
        return (self.cut_state.labels != VOID) | self.cut_state.retained_elements


def update_geometry(problem: CoupledProblem, u, fluid: FluidState, dt: Optional[float],
                    retained_elements=None) -> GeometrySnapshot:
    """Intersect the current solid configuration with the grid and freeze the coupling data."""
    u = np.asarray(u).reshape(-1, 2)
    interface = extract_interface(problem.mesh, u)
    if problem.has_fluid:
        geometry = problem.geometry
        cut_state = build_cut_state(problem.grid, problem.mesh, u, interface, problem.cutting_bodies,
                                    island_ratio=geometry.island_ratio, tolerance_factor=geometry.tolerance_factor,
                                    volume_order=geometry.volume_order, retained_elements=retained_elements)
        dofmap = DofMap(problem.mesh.n_nodes, cut_state.active_nodes)
        v_full = fluid.v
    else:
        cut_state = dry_cut_state(interface)
        dofmap = DofMap(problem.mesh.n_nodes, np.zeros(0, dtype=bool))
        v_full = np.zeros((0, 2))
    samples = build_interface_samples(cut_state, problem.mesh, interface, v_full, problem.materials,
                                      problem.rigid_bodies, problem.fluid, problem.interface, dt)
    snapshot = GeometrySnapshot(interface=interface, cut_state=cut_state, dofmap=dofmap, samples=samples)
    logger.debug(f"Geometry snapshot: {len(dofmap.fluid_nodes)} active fluid nodes, {len(samples)} interface samples")
    if problem.has_fluid:
        minus, plus, _, _, _ = cip_faces(cut_state)
        snapshot.cip_speeds = face_speeds(problem.grid, minus, plus, fluid.v)
        ghost = cut_state.ghost_faces
        snapshot.ghost_speeds = face_speeds(problem.grid, ghost.minus, ghost.plus, fluid.v)
    return snapshot


def _boundary_values(function, points, time):
    if isinstance(function, BaseTimeFunction):
        return np.full(len(points), function(time))
    return np.asarray(function(points, time), dtype=float).reshape(len(points))


def apply_dirichlet(problem: CoupledProblem, dofmap: DofMap, time: float):
    """Register all prescribed values at `time` in the dof map."""
    dofmap.dirichlet_mask[:] = False
    dofmap.dirichlet_values[:] = 0.0
    mesh = problem.mesh
    for condition in problem.solid_dirichlet:
        nodes = np.asarray(condition.nodes, dtype=int)
        for component, function in condition.components.items():
            dofmap.constrain(2 * nodes + COMPONENT_INDEX[component], function(time))
    for body, motion in problem.rigid_bodies.items():
        nodes = mesh.nodes_of_body(body)
        for component, function in zip('xy', motion):
            dofmap.constrain(2 * nodes + COMPONENT_INDEX[component], function(time))
    if not problem.has_fluid:
        return
    grid = problem.grid
    for boundary in problem.fluid_boundaries:
        if not boundary.dirichlet:
            continue
        nodes = grid.side_nodes(boundary.side)
        nodes = nodes[dofmap.active_fluid_nodes[nodes]]
        points = grid.node_coords[nodes]
        dofs = dofmap.fluid_dofs(nodes)
        for component, function in boundary.dirichlet.items():
            dofmap.constrain(dofs[:, COMPONENT_INDEX[component]], _boundary_values(function, points, time))
    if problem.pressure_pin is not None:
        node, function = problem.pressure_pin
        if dofmap.active_fluid_nodes[node]:
            dofmap.constrain(dofmap.pressure_dofs(np.array([node])), function(time))


def fluid_arrays(dofmap: DofMap, x, fluid: FluidState):
    """Full-grid velocity and pressure with the active values taken from x."""
    v_full = fluid.v.copy()
    p_full = fluid.p.copy()
    _, v, p = dofmap.split(x)
    v_full[dofmap.fluid_nodes] = v
    p_full[dofmap.fluid_nodes] = p
    return v_full, p_full


def assemble_system(problem: CoupledProblem, snapshot: GeometrySnapshot, x, previous: SystemState,
                    context: StepContext, fluid_guess: FluidState = None, forced_cases=None):
    """Global residual and tangent at the iterate x.

    :param previous: converged state at t_n, its fluid part transferred to the snapshot's active set.
    :param fluid_guess: full-grid fluid values for nodes outside the active set.
    :return: (SystemAccumulator, InterfaceEvaluation or None).
    """
    dofmap = snapshot.dofmap
    acc = SystemAccumulator(dofmap.n_dofs)
    u = dofmap.split(x)[0]
    assemble_solid(acc, dofmap, problem.mesh, problem.materials, u, previous.solid, context,
                   body_forces=problem.body_forces, neumann=problem.solid_neumann,
                   rigid_bodies=list(problem.rigid_bodies))

    v_full = p_full = None
    if problem.has_fluid:
        v_full, p_full = fluid_arrays(dofmap, x, fluid_guess if fluid_guess is not None else previous.fluid)
        cut_state = snapshot.cut_state
        assemble_fluid(acc, dofmap, cut_state, v_full, p_full, previous.fluid, problem.fluid, context,
                       problem.fluid_boundaries)
        assemble_cip(acc, dofmap, cut_state, v_full, p_full, problem.fluid, problem.stabilization, context,
                     speeds=snapshot.cip_speeds)
        assemble_ghost_penalty(acc, dofmap, cut_state, v_full, p_full, problem.fluid, problem.stabilization,
                               context, speeds=snapshot.ghost_speeds)

    evaluation = None
    if len(snapshot.samples):
        velocity = theta_rate(u, previous.solid.u, previous.solid.velocity, context)
        if v_full is None:
            v_full, p_full = np.zeros((0, 2)), np.zeros(0)
        fluid_params = problem.fluid or FluidParams(density=0.0, viscosity=1.0)
        evaluation = evaluate_interface(snapshot.samples, dofmap, problem.mesh, u, velocity, v_full, p_full,
                                        fluid_params, context)
        assemble_normal_coupling(acc, dofmap, snapshot.samples, evaluation, fluid_params, forced_cases)
        if problem.has_fluid:
            assemble_tangential_coupling(acc, dofmap, snapshot.samples, velocity, v_full, p_full, fluid_params,
                                         context)
    return acc, evaluation


def residual_norms(dofmap: DofMap, residual) -> Dict[str, float]:
    """RMS norm of the free residual entries of each field."""
    free = ~dofmap.dirichlet_mask
    norms = {}
    for name, mask in dofmap.field_masks().items():
        selected = residual[mask & free]
        norms[name] = float(np.sqrt(np.mean(selected ** 2))) if len(selected) else 0.0
    return norms


def transfer_to_snapshot(fluid: FluidState, old_active, snapshot: GeometrySnapshot) -> FluidState:
    """Fluid state restricted to the active set of a new snapshot."""
    if len(fluid.v) == 0:
        return fluid
    old_map = DofMap(0, old_active)
    new_state, _ = transfer_state(fluid, old_map, snapshot.dofmap)
    return new_state
