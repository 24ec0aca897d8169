# -*- coding: utf-8 -*-
"""Incompressible Navier-Stokes on the cut grid with equal-order bilinear elements.

Residual per node a, direction i (convective form, symmetric viscous stress):
int rho N_a (dv/dt + v.grad v - b)_i + 2 mu eps(v)_ij dN_a/dx_j - p dN_a/dx_i
and continuity int N_a div v, followed by face-jump stabilization.
"""
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional

import numpy as np

from .assembly import SystemAccumulator
from .cutcell import VOID, CutState
from .dofmap import DofMap
from .mesh import SIDE_NORMALS, FluidGrid
from .quadrature import gauss_legendre
from .state import FluidState, StepContext, theta_rate
from ..exception import ConfigurationError

IDENTITY = np.eye(2)


@dataclass
class FluidParams:
    density: float
    viscosity: float
    # Body force per unit mass, b(points (k, 2), t) -> (k, 2); None for zero.
    body_force: Optional[Callable] = None

    def __post_init__(self):
        if self.density < 0.0:
            raise ConfigurationError(f"Fluid density must be non-negative, got {self.density}")
        if self.viscosity <= 0.0:
            raise ConfigurationError(f"Fluid viscosity must be positive, got {self.viscosity}")


@dataclass
class StabilizationConfig:
    gamma_p: float = 0.05
    gamma_v: float = 0.05
    gamma_gv: float = 0.05
    gamma_gp: float = 0.05
    ghost_penalty: bool = True

    def __post_init__(self):
        for name in ('gamma_p', 'gamma_v', 'gamma_gv', 'gamma_gp'):
            if getattr(self, name) < 0.0:
                raise ConfigurationError(f"Stabilization constant {name} must be non-negative",
                                         key_path=f"stabilization.{name}")


@dataclass
class FluidBoundary:
    """Conditions on one grid side.

    `dirichlet` maps a component ('x', 'y', 'p') to a time function;
    `pressure` is a normal pressure load h = -p(t) n; `traction` is an
    optional traction h(points, t) -> (k, 2).
    """
    side: str
    dirichlet: Dict[str, object] = field(default_factory=dict)
    pressure: Optional[object] = None
    traction: Optional[Callable] = None


def fluid_penalty_scale(params: FluidParams, v_local, h: float, dt: Optional[float]):
    """phi = mu + rho h |v| + rho h^2 / dt; the temporal part vanishes for a steady problem.

    :return: phi (same shape as v_local).
    """
    if dt is not None and dt <= 0.0:
        raise ConfigurationError(f"Time step size must be positive, got {dt}")
    v_local = np.asarray(v_local, dtype=float)
    phi = params.viscosity + params.density * h * v_local
    if dt is not None:
        phi = phi + params.density * h * h / dt
    return phi


def fluid_penalty(gamma_f0: float, params: FluidParams, v_local, h: float, dt: Optional[float]):
    """gamma_F = gamma_F0 * phi / h."""
    return gamma_f0 * fluid_penalty_scale(params, v_local, h, dt) / h


def evaluate_fields(grid: FluidGrid, elements, points, v_full, p_full):
    """Velocity (k, 2), velocity gradient (k, 2, 2) [i, j] = dv_i/dx_j, pressure (k,) and shape data."""
    n, grad = grid.shape(elements, points)
    nodes = grid.element_nodes[elements]
    v_e = v_full[nodes]
    v = np.einsum('ka,kai->ki', n, v_e)
    grad_v = np.einsum('kai,kaj->kij', v_e, grad)
    p = np.einsum('ka,ka->k', n, p_full[nodes])
    return v, grad_v, p, n, grad, nodes


def _reduce_by_element(elements, *arrays):
    starts = np.concatenate([[0], np.nonzero(np.diff(elements))[0] + 1])
    return elements[starts], [np.add.reduceat(array, starts, axis=0) for array in arrays]


def assemble_fluid(acc: SystemAccumulator, dofmap: DofMap, cut_state: CutState, v_full, p_full,
                   old: FluidState, params: FluidParams, context: StepContext, boundaries=()):
    """Add the volume terms over the physical fluid domain and the Neumann loads."""
    grid = cut_state.grid
    quad = cut_state.volume
    if len(quad.weights) == 0:
        return
    rho, mu = params.density, params.viscosity
    v, grad_v, p, n, grad, nodes = evaluate_fields(grid, quad.elements, quad.points, v_full, p_full)
    w = quad.weights
    rate_nodes = theta_rate(v_full, old.v, old.rate, context)
    dvdt = np.einsum('ka,kai->ki', n, rate_nodes[nodes])
    conv = np.einsum('kij,kj->ki', grad_v, v)
    eps = 0.5 * (grad_v + np.transpose(grad_v, (0, 2, 1)))
    force = dvdt + conv
    if params.body_force is not None:
        force = force - np.asarray(params.body_force(quad.points, context.time)).reshape(-1, 2)
    div = grad_v[:, 0, 0] + grad_v[:, 1, 1]

    r_v = (rho * np.einsum('ka,ki->kai', n, force)
           + 2.0 * mu * np.einsum('kij,kaj->kai', eps, grad)
           - np.einsum('k,kai->kai', p, grad)) * w[:, None, None]
    r_p = n * (div * w)[:, None]

    rf = context.rate_factor
    v_dot_grad = np.einsum('ki,kbi->kb', v, grad)
    # q: quadrature point, a/b: test/trial node, i/c: test/trial component
    k_vv = (rho * (np.einsum('qa,qb,ic->qaibc', n, n, IDENTITY) * rf
                   + np.einsum('qa,qb,qic->qaibc', n, n, grad_v)
                   + np.einsum('qa,qb,ic->qaibc', n, v_dot_grad, IDENTITY))
            + mu * (np.einsum('qaj,qbj,ic->qaibc', grad, grad, IDENTITY)
                    + np.einsum('qac,qbi->qaibc', grad, grad))) * w[:, None, None, None, None]
    k_vp = -np.einsum('qai,qb->qaib', grad, n) * w[:, None, None, None]
    k_pv = np.einsum('qa,qbc->qabc', n, grad) * w[:, None, None, None]

    local_r = np.zeros((len(w), 4, 3))
    local_r[:, :, :2] = r_v
    local_r[:, :, 2] = r_p
    local_k = np.zeros((len(w), 4, 3, 4, 3))
    local_k[:, :, :2, :, :2] = k_vv
    local_k[:, :, :2, :, 2] = k_vp
    local_k[:, :, 2, :, :2] = k_pv

    elements, (local_r, local_k) = _reduce_by_element(quad.elements, local_r, local_k)
    dofs = dofmap.fluid_dofs(grid.element_nodes[elements]).reshape(-1, 12)
    acc.add_residual(dofs, local_r.reshape(-1, 12))
    acc.add_matrix(dofs, dofs, local_k.reshape(-1, 12, 12))

    for boundary in boundaries:
        assemble_fluid_neumann(acc, dofmap, cut_state, boundary, context.time)


def assemble_fluid_neumann(acc: SystemAccumulator, dofmap: DofMap, cut_state: CutState,
                           boundary: FluidBoundary, time: float):
    """Traction h on the physical part of a grid side: residual -int N_a h_i ds."""
    if boundary.pressure is None and boundary.traction is None:
        return
    elements, starts, ends = cut_state.boundary_portions[boundary.side]
    if len(elements) == 0:
        return
    s, w = gauss_legendre(2)
    points = (starts[:, None, :] + s[None, :, None] * (ends - starts)[:, None, :]).reshape(-1, 2)
    lengths = np.linalg.norm(ends - starts, axis=1)
    weights = (lengths[:, None] * w[None, :]).ravel()
    point_elements = np.repeat(elements, len(s))
    traction = np.zeros((len(points), 2))
    if boundary.pressure is not None:
        traction -= boundary.pressure(time) * SIDE_NORMALS[boundary.side]
    if boundary.traction is not None:
        traction += np.asarray(boundary.traction(points, time)).reshape(-1, 2)
    grid = cut_state.grid
    n, _ = grid.shape(point_elements, points)
    residual = -np.einsum('ka,ki,k->kai', n, traction, weights)
    dofs = dofmap.velocity_dofs(grid.element_nodes[point_elements]).reshape(-1, 8)
    acc.add_residual(dofs, residual.reshape(-1, 8))


@dataclass
class FaceJumps:
    """Normal-derivative jump operators on grid faces, two Gauss points per face."""
    nodes: np.ndarray     # (f, 8) minus element nodes then plus element nodes
    jumps: np.ndarray     # (f, g, 8) d/dn N_c jump coefficients
    weights: np.ndarray   # (f, g)
    sizes: np.ndarray     # (f,) face length


def face_jumps(grid: FluidGrid, minus, plus, axis, start, end) -> FaceJumps:
    s, w = gauss_legendre(2)
    n_faces = len(minus)
    points = start[:, None, :] + s[None, :, None] * (end - start)[:, None, :]
    flat = points.reshape(-1, 2)
    _, grad_minus = grid.shape(np.repeat(minus, len(s)), flat)
    _, grad_plus = grid.shape(np.repeat(plus, len(s)), flat)
    axis_q = np.repeat(axis, len(s))
    dn_minus = grad_minus[np.arange(len(flat)), :, axis_q]
    dn_plus = grad_plus[np.arange(len(flat)), :, axis_q]
    jumps = np.concatenate([-dn_minus, dn_plus], axis=1).reshape(n_faces, len(s), 8)
    sizes = np.linalg.norm(end - start, axis=1)
    nodes = np.concatenate([grid.element_nodes[minus], grid.element_nodes[plus]], axis=1)
    return FaceJumps(nodes=nodes, jumps=jumps, weights=sizes[:, None] * w[None, :], sizes=sizes)


def _assemble_jumps(acc: SystemAccumulator, dofmap: DofMap, faces: FaceJumps, v_full, p_full,
                    scale_v, scale_p):
    if len(faces.nodes) == 0:
        return
    op = np.einsum('fgc,fgd,fg->fcd', faces.jumps, faces.jumps, faces.weights)
    v_local = v_full[faces.nodes]            # (f, 8, 2)
    p_local = p_full[faces.nodes]            # (f, 8)
    local_r = np.zeros((len(op), 8, 3))
    local_r[:, :, :2] = scale_v[:, None, None] * np.einsum('fcd,fdi->fci', op, v_local)
    local_r[:, :, 2] = scale_p[:, None] * np.einsum('fcd,fd->fc', op, p_local)
    local_k = np.zeros((len(op), 8, 3, 8, 3))
    for i in range(2):
        local_k[:, :, i, :, i] = scale_v[:, None, None] * op
    local_k[:, :, 2, :, 2] = scale_p[:, None, None] * op
    dofs = dofmap.fluid_dofs(faces.nodes).reshape(-1, 24)
    acc.add_residual(dofs, local_r.reshape(-1, 24))
    acc.add_matrix(dofs, dofs, local_k.reshape(-1, 24, 24))


def face_speeds(grid: FluidGrid, minus, plus, v_full):
    """Largest nodal velocity magnitude over the two elements of each face."""
    speed = np.linalg.norm(v_full, axis=1)
    nodes = np.concatenate([grid.element_nodes[minus], grid.element_nodes[plus]], axis=1)
    return speed[nodes].max(axis=1) if len(nodes) else np.zeros(0)


def cip_faces(cut_state: CutState):
    """Interior faces whose two elements are active."""
    grid = cut_state.grid
    minus, plus, axis, start, end = grid.interior_faces()
    active = (cut_state.labels != VOID) | cut_state.retained_elements
    mask = active[minus] & active[plus]
    return minus[mask], plus[mask], axis[mask], start[mask], end[mask]


def assemble_cip(acc: SystemAccumulator, dofmap: DofMap, cut_state: CutState, v_full, p_full,
                 params: FluidParams, stab: StabilizationConfig, context: StepContext, speeds=None):
    """Continuous interior penalty on all faces between active elements.

    s_p = gamma_p h^3 / phi int [dp/dn][d dp/dn], s_v = gamma_v rho |v| h^2 int [dv/dn].[d dv/dn].

    :param speeds: frozen per-face velocity scale; computed from v_full if None.
    """
    minus, plus, axis, start, end = cip_faces(cut_state)
    if len(minus) == 0:
        return
    faces = face_jumps(cut_state.grid, minus, plus, axis, start, end)
    if speeds is None:
        speeds = face_speeds(cut_state.grid, minus, plus, v_full)
    h = faces.sizes
    phi = fluid_penalty_scale(params, speeds, h, context.dt)
    scale_p = stab.gamma_p * h ** 3 / phi
    scale_v = stab.gamma_v * params.density * speeds * h ** 2
    _assemble_jumps(acc, dofmap, faces, v_full, p_full, scale_v, scale_p)


def assemble_ghost_penalty(acc: SystemAccumulator, dofmap: DofMap, cut_state: CutState, v_full, p_full,
                           params: FluidParams, stab: StabilizationConfig, context: StepContext, speeds=None):
    """Ghost penalty on the ghost faces: g_v = gamma_gv phi h, g_p = gamma_gp h^3 / phi."""
    ghost = cut_state.ghost_faces
    if not stab.ghost_penalty or len(ghost) == 0:
        return
    faces = face_jumps(cut_state.grid, ghost.minus, ghost.plus, ghost.axis, ghost.start, ghost.end)
    if speeds is None:
        speeds = face_speeds(cut_state.grid, ghost.minus, ghost.plus, v_full)
    h = faces.sizes
    phi = fluid_penalty_scale(params, speeds, h, context.dt)
    _assemble_jumps(acc, dofmap, faces, v_full, p_full, stab.gamma_gv * phi * h, stab.gamma_gp * h ** 3 / phi)
