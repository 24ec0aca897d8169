# -*- coding: utf-8 -*-
"""Interface physics: gaps, extension, case selection and Nitsche coupling terms.

The normal traction acting on the solid is lambda n with
lambda = min(sigma_S + gamma_S g_n, sigma_F + gamma_F v_rel_n), n being the
outward solid normal. The sign of the case indicator
C = (sigma_S + gamma_S g_n) - (sigma_F + gamma_F v_rel_n) selects the branch:

    ======  ================  =========
    case    interface part    indicator
    ======  ================  =========
    I       fluid-structure   C > 0
    II      closed contact    C <= 0
    III     fluid-structure   C <= 0
    IV      closed contact    C > 0
    ======  ================  =========
"""
from dataclasses import dataclass
from typing import Dict, Optional

import numpy as np

from .assembly import SystemAccumulator
from .cutcell import SIDE_DRY, SIDE_FS, SIDE_SC, CutState, interface_quadrature
from .dofmap import DofMap
from .fluid import FluidParams, fluid_penalty
from .material import NeoHookeMaterial
from .mesh import InterfaceMesh, SolidMesh
from .solid import WEIGHTING_MODES, BoundaryPoints, solid_penalty_scale, stress_weights
from .state import StepContext
from ..exception import ConfigurationError, ExtensionError
from ..log import get_logger

logger = get_logger('solver')

CASES = ('I', 'II', 'III', 'IV')
# dry samples without contact; carry no traction and are not counted
FREE = 'free'
TANGENTIAL_MODES = ('navier', 'noslip', 'slip')
IDENTITY = np.eye(2)


@dataclass
class InterfaceParams:
    gamma_s0: float = 1.0
    gamma_f0: float = 10.0
    gamma_t0: Optional[float] = None
    gamma_t_scale: float = 1.0
    slip_length: float = 0.1
    tangential: str = 'navier'
    weighting: str = 'harmonic'
    interface_order: int = 2
    contact_point_multiplier: int = 3

    def __post_init__(self):
        for name in ('gamma_s0', 'gamma_f0', 'gamma_t_scale'):
            if getattr(self, name) <= 0.0:
                raise ConfigurationError(f"{name} must be positive", key_path=f"interface.{name}")
        if self.gamma_t0 is not None and self.gamma_t0 <= 0.0:
            raise ConfigurationError("gamma_t0 must be positive", key_path="interface.gamma_t0")
        if self.slip_length < 0.0:
            raise ConfigurationError("The reference slip length must be non-negative",
                                     key_path="interface.slip_length")
        if self.tangential not in TANGENTIAL_MODES:
            raise ConfigurationError(f"Unknown tangential mode '{self.tangential}', valid: {list(TANGENTIAL_MODES)}",
                                     key_path="interface.tangential")
        if self.weighting not in WEIGHTING_MODES:
            raise ConfigurationError(f"Unknown weighting mode '{self.weighting}', valid: {list(WEIGHTING_MODES)}",
                                     key_path="interface.weighting")
        if self.interface_order < 1 or self.contact_point_multiplier < 1:
            raise ConfigurationError("Interface quadrature order and point multiplier must be at least 1")

    @property
    def gamma_t(self) -> float:
        """Tangential Nitsche constant, gamma_F0 unless given separately."""
        base = self.gamma_f0 if self.gamma_t0 is None else self.gamma_t0
        return base * self.gamma_t_scale


@dataclass
class GapResult:
    gap: float            # +inf without projection
    point: np.ndarray     # projection point, None without projection
    segment: int          # opposing interface segment, -1 without projection
    param: float          # parameter on the opposing segment
    valid: bool


def _cross(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


def find_partners(points, normals, bodies, interface: InterfaceMesh, tol: float = 1e-9):
    """Closest facing segment of another body hit by the ray x + s n.

    Only segments of other bodies whose normal opposes n are considered.

    :return: segment index (k,) or -1, ray parameter s (k,), segment parameter t (k,).
    """
    points = np.atleast_2d(points)
    normals = np.atleast_2d(normals)
    k = len(points)
    if len(interface) == 0 or k == 0:
        return np.full(k, -1, dtype=int), np.full(k, np.inf), np.zeros(k)
    a = interface.start[None, :, :]
    d = (interface.end - interface.start)[None, :, :]
    n = normals[:, None, :]
    r = a - points[:, None, :]
    denominator = _cross(n, d)
    usable = np.abs(denominator) > 1e-14 * np.linalg.norm(d, axis=2)
    safe = np.where(usable, denominator, 1.0)
    s = _cross(r, d) / safe
    t = _cross(r, n) / safe
    facing = np.einsum('ki,mi->km', normals, interface.normals) < 0.0
    other = np.asarray(bodies)[:, None] != interface.bodies[None, :]
    mask = usable & facing & other & (t >= -tol) & (t <= 1.0 + tol)
    score = np.where(mask, np.abs(s), np.inf)
    best = np.argmin(score, axis=1)
    rows = np.arange(k)
    valid = np.isfinite(score[rows, best])
    segment = np.where(valid, best, -1)
    return segment, np.where(valid, s[rows, best], np.inf), np.clip(t[rows, best], 0.0, 1.0)


def normal_gap(x, n, interface: InterfaceMesh, body: int = -1) -> GapResult:
    """Signed distance from x along n to the opposing interface.

    :param x: (2,) point on the own surface.
    :param n: (2,) unit outward normal at x.
    :param interface: opposing segments; those of `body` are skipped.
    """
    x = np.asarray(x, dtype=float)
    n = np.asarray(n, dtype=float)
    segment, s, t = find_partners(x[None], n[None], np.array([body]), interface)
    if segment[0] < 0:
        return GapResult(gap=np.inf, point=None, segment=-1, param=0.0, valid=False)
    return GapResult(gap=float(s[0]), point=x + s[0] * n, segment=int(segment[0]), param=float(t[0]), valid=True)


def slip_length(gap, h: float, kappa0: float):
    """kappa = 0 for g_n > h, kappa0 h (h / g_n - 1) for 0 < g_n <= h and infinity otherwise."""
    if h <= 0.0:
        raise ConfigurationError(f"Element size must be positive, got {h}")
    gap = np.asarray(gap, dtype=float)
    safe = np.where(gap > 0.0, gap, 1.0)
    kappa = np.where(gap > h, 0.0, np.where(gap > 0.0, kappa0 * h * (h / safe - 1.0), np.inf))
    return float(kappa) if kappa.ndim == 0 else kappa


def case_indicator(solid_branch, fluid_branch, valid=True):
    """C = solid branch - fluid branch; +inf where the gap is undefined."""
    solid_branch = np.asarray(solid_branch, dtype=float)
    fluid_branch = np.asarray(fluid_branch, dtype=float)
    valid = np.asarray(valid, dtype=bool)
    indicator = np.where(valid, solid_branch - np.where(valid, fluid_branch, 0.0), np.inf)
    return float(indicator) if indicator.ndim == 0 else indicator


def interface_normal_traction(solid_branch, fluid_branch):
    return np.minimum(solid_branch, fluid_branch)


def case_labels(sides, indicator):
    sides = np.asarray(sides, dtype=object)
    indicator = np.asarray(indicator, dtype=float)
    fsi = indicator > 0.0
    on_fluid = sides == SIDE_FS
    dry = sides == SIDE_DRY
    labels = np.where(on_fluid, np.where(fsi, 'I', 'III'), np.where(fsi, np.where(dry, FREE, 'IV'), 'II'))
    return labels.astype(object)


class LinearForm(object):
    """Per-sample scalar value with sparse derivatives: a list of (dofs (k, c), d value / d dof (k, c))."""

    def __init__(self, value, terms=()):
        self.value = np.asarray(value, dtype=float)
        self.terms = list(terms)

    def __add__(self, other):
        return LinearForm(self.value + other.value, self.terms + other.terms)

    def __sub__(self, other):
        return self + other.scaled(-1.0)

    def scaled(self, factor):
        factor = np.asarray(factor, dtype=float)
        column = factor[:, None] if factor.ndim else factor
        return LinearForm(self.value * factor, [(cols, d * column) for cols, d in self.terms])

    def take(self, index):
        """Values at other samples; index -1 gives zero."""
        index = np.asarray(index, dtype=int)
        mask = (index >= 0).astype(float)
        safe = np.where(index >= 0, index, 0)
        return LinearForm(self.value[safe] * mask, [(cols[safe], d[safe] * mask[:, None]) for cols, d in self.terms])


def add_tested(acc: SystemAccumulator, rows, test, form: LinearForm, group: str = None):
    """Residual rows += test * value, tangent rows x cols += test (x) derivative."""
    acc.add_residual(rows, test * form.value[:, None], group)
    for cols, d in form.terms:
        acc.add_matrix(rows, cols, test[:, :, None] * d[:, None, :])


@dataclass
class InterfaceSamples:
    """Interface quadrature points of one geometry snapshot.

    Normals, weights, fluid evaluation points, projection partners and all
    penalty scalings are frozen; solid positions and fields follow the
    unknowns.
    """
    positions: np.ndarray       # (k, 2) positions when the snapshot was taken
    normals: np.ndarray         # (k, 2) outward solid normals
    weights: np.ndarray
    bodies: np.ndarray
    sides: np.ndarray           # SIDE_FS / SIDE_SC / SIDE_DRY
    rigid: np.ndarray
    solid: BoundaryPoints
    c: np.ndarray
    beta: np.ndarray
    fluid_elements: np.ndarray  # -1 off the fluid-structure interface
    fluid_shape: np.ndarray
    fluid_grad: np.ndarray
    fluid_nodes: np.ndarray
    partner_edges: np.ndarray   # boundary edge hit by the normal ray, -1 if none
    partner_index: np.ndarray   # samples with an elastic partner
    partner_points: Optional[BoundaryPoints]
    partner_c: np.ndarray
    partner_beta: np.ndarray
    omega: np.ndarray
    gamma_s: np.ndarray
    gamma_f: np.ndarray
    slip: np.ndarray
    sources: np.ndarray         # extension origin of closed-contact samples, -1 otherwise
    arc: np.ndarray
    h: float
    gamma_t: float

    def __len__(self):
        return len(self.weights)

    @property
    def has_fluid(self):
        return self.fluid_elements >= 0

    def fluid_dofs(self, dofmap: DofMap):
        """Velocity dofs (k, 8) and pressure dofs (k, 4) of the fluid element of each sample."""
        dofs = dofmap.fluid_dofs(self.fluid_nodes)
        dofs = np.where(self.has_fluid[:, None, None], dofs, -1)
        return dofs[..., :2].reshape(-1, 8), dofs[..., 2]

    def solid_dofs(self, dofmap: DofMap):
        return dofmap.solid_dofs(self.solid.nodes).reshape(-1, 8)

    def case_counts(self, cases) -> Dict[str, int]:
        return {case: int(np.sum(np.asarray(cases) == case)) for case in CASES}


def boundary_arc_positions(mesh: SolidMesh, edges, params):
    """Reference arc-length position of boundary points along their closed loop.

    :return: arc position (k,), loop id (k,), loop length (k,).
    """
    edge_loop = np.full(len(mesh.boundary_nodes), -1, dtype=int)
    edge_start = np.zeros(len(mesh.boundary_nodes))
    loop_lengths = []
    for body in mesh.body_ids:
        for loop in mesh.boundary_loops(int(body)):
            following = np.roll(loop, -1)
            indices = np.array([mesh.edge_index(a, b) for a, b in zip(loop, following)], dtype=int)
            lengths = np.linalg.norm(mesh.nodes[following] - mesh.nodes[loop], axis=1)
            edge_loop[indices] = len(loop_lengths)
            edge_start[indices] = np.cumsum(lengths) - lengths
            loop_lengths.append(lengths.sum())
    edges = np.asarray(edges, dtype=int)
    pairs = mesh.boundary_nodes[edges]
    edge_lengths = np.linalg.norm(mesh.nodes[pairs[:, 1]] - mesh.nodes[pairs[:, 0]], axis=1)
    loops = edge_loop[edges]
    return edge_start[edges] + np.asarray(params) * edge_lengths, loops, np.array(loop_lengths)[loops]


def extension_sources(arc, loops, loop_lengths, bodies, is_source, needs_source):
    """Nearest source sample along the same boundary loop for every sample that needs one."""
    sources = np.full(len(arc), -1, dtype=int)
    for loop in np.unique(loops[needs_source]):
        targets = np.nonzero(needs_source & (loops == loop))[0]
        candidates = np.nonzero(is_source & (loops == loop))[0]
        if len(candidates) == 0:
            body = int(bodies[targets[0]])
            raise ExtensionError(f"Body {body} is in contact but has no fluid-structure interface on that "
                                 f"boundary, the fluid quantities cannot be extended", body=body)
        distance = np.abs(arc[targets][:, None] - arc[candidates][None, :])
        distance = np.minimum(distance, loop_lengths[targets][:, None] - distance)
        sources[targets] = candidates[np.argmin(distance, axis=1)]
    return sources


def extend_fluid_scalar(values, sources):
    """Constant extension: each sample takes the value at its extension origin (0 without one)."""
    values = np.asarray(values, dtype=float)
    sources = np.asarray(sources, dtype=int)
    return np.where(sources >= 0, values[np.where(sources >= 0, sources, 0)], 0.0)


def build_interface_samples(cut_state: CutState, mesh: SolidMesh, interface: InterfaceMesh, v_full,
                            materials: Dict[int, NeoHookeMaterial], rigid_bodies, fluid_params: FluidParams,
                            params: InterfaceParams, dt: Optional[float]) -> InterfaceSamples:
    """Quadrature points on the resolved interface with their frozen coupling data.

    Rigid bodies contribute fluid-structure samples only.
    """
    grid = cut_state.grid
    resolved = cut_state.resolved
    rigid_list = list(rigid_bodies)
    sub_rigid = np.isin(interface.bodies[resolved.parents], rigid_list)
    on_fluid = resolved.sides == SIDE_FS
    keep = np.where(on_fluid, cut_state.sub_elements >= 0, ~sub_rigid)
    subs = np.nonzero(keep)[0]
    multipliers = np.where(on_fluid[subs], 1, params.contact_point_multiplier)
    points, weights, local, owners = interface_quadrature(resolved.start[subs], resolved.end[subs],
                                                          params.interface_order, multipliers)
    sub = subs[owners]
    parent = resolved.parents[sub]
    edge_params = resolved.t0[sub] + local * (resolved.t1[sub] - resolved.t0[sub])
    edges = interface.edges[parent]
    normals = interface.normals[parent]
    bodies = interface.bodies[parent]
    sides = resolved.sides[sub]
    rigid = np.isin(bodies, rigid_list)
    k = len(points)

    def per_body(attribute, body_ids):
        return np.array([0.0 if b in rigid_list or b < 0 else getattr(materials[int(b)], attribute)
                         for b in body_ids], dtype=float).reshape(-1)

    solid = BoundaryPoints(mesh, edges, edge_params)
    youngs = per_body('youngs_modulus', bodies)

    fluid_elements = np.where(sides == SIDE_FS, cut_state.sub_elements[sub], -1)
    has_fluid = fluid_elements >= 0
    fluid_shape = np.zeros((k, 4))
    fluid_grad = np.zeros((k, 4, 2))
    fluid_nodes = np.zeros((k, 4), dtype=int)
    if np.any(has_fluid):
        shape, grad = grid.shape(fluid_elements[has_fluid], points[has_fluid])
        fluid_shape[has_fluid] = shape
        fluid_grad[has_fluid] = grad
        fluid_nodes[has_fluid] = grid.element_nodes[fluid_elements[has_fluid]]

    segment, s_hit, t_hit = find_partners(points, normals, bodies, interface)
    valid = (segment >= 0) & ~rigid
    safe_segment = np.where(valid, segment, 0)
    partner_edges = np.where(valid, interface.edges[safe_segment] if len(interface) else -1, -1)
    partner_bodies = np.where(valid, interface.bodies[safe_segment] if len(interface) else -1, -1)
    partner_elastic = valid & ~np.isin(partner_bodies, rigid_list)
    partner_index = np.nonzero(partner_elastic)[0]
    partner_points = None
    if len(partner_index):
        partner_points = BoundaryPoints(mesh, partner_edges[partner_index], t_hit[partner_index])

    own_pairs = mesh.boundary_nodes[edges]
    own_length = np.linalg.norm(mesh.nodes[own_pairs[:, 1]] - mesh.nodes[own_pairs[:, 0]], axis=1)
    phi_own = solid_penalty_scale(youngs, own_length)
    phi_partner = np.zeros(k)
    if len(partner_index):
        partner_pairs = mesh.boundary_nodes[partner_edges[partner_index]]
        partner_length = np.linalg.norm(mesh.nodes[partner_pairs[:, 1]] - mesh.nodes[partner_pairs[:, 0]], axis=1)
        phi_partner[partner_index] = solid_penalty_scale(per_body('youngs_modulus', partner_bodies[partner_index]),
                                                         partner_length)
    omega = stress_weights(params.weighting, phi_own, phi_partner, partner_rigid=~partner_elastic)
    total = np.where(partner_elastic, phi_own + phi_partner, 1.0)
    phi_s = np.where(partner_elastic, 2.0 * phi_own * phi_partner / total, phi_own)
    gamma_s = params.gamma_s0 * phi_s

    h = cut_state.h
    gamma_f = np.zeros(k)
    if np.any(has_fluid):
        speed = np.linalg.norm(np.asarray(v_full), axis=1)
        v_local = speed[fluid_nodes[has_fluid]].max(axis=1)
        gamma_f[has_fluid] = fluid_penalty(params.gamma_f0, fluid_params, v_local, h, dt)

    if params.tangential == 'noslip':
        slip = np.zeros(k)
    elif params.tangential == 'slip':
        slip = np.full(k, np.inf)
    else:
        slip = slip_length(np.where(segment >= 0, s_hit, np.inf), h, params.slip_length) * np.ones(k)

    arc, loops, loop_lengths = boundary_arc_positions(mesh, edges, edge_params)
    sources = extension_sources(arc, loops, loop_lengths, bodies, has_fluid, sides == SIDE_SC)

    counts = {side: int(np.sum(sides == side)) for side in (SIDE_FS, SIDE_SC, SIDE_DRY)}
    logger.debug(f"Interface samples {counts}, {len(partner_index)} with an elastic projection partner")
    return InterfaceSamples(
        positions=points, normals=normals, weights=weights, bodies=bodies, sides=sides, rigid=rigid, solid=solid,
        c=per_body('c', bodies), beta=per_body('beta', bodies), fluid_elements=fluid_elements,
        fluid_shape=fluid_shape, fluid_grad=fluid_grad, fluid_nodes=fluid_nodes, partner_edges=partner_edges,
        partner_index=partner_index, partner_points=partner_points,
        partner_c=per_body('c', partner_bodies[partner_index]),
        partner_beta=per_body('beta', partner_bodies[partner_index]), omega=omega, gamma_s=gamma_s,
        gamma_f=gamma_f, slip=slip, sources=sources, arc=arc, h=h, gamma_t=params.gamma_t)


@dataclass
class InterfaceEvaluation:
    """Interface quantities at the current iterate."""
    sigma_f: LinearForm        # fluid normal stress at the own point
    v_rel_n: LinearForm        # (v - du/dt) . n at the own point
    fluid_own: LinearForm      # sigma_F + gamma_F v_rel_n at the own point
    fluid_branch: LinearForm   # extended fluid branch, zero on dry samples
    solid_stress: LinearForm   # weighted solid normal stress
    gap: LinearForm
    solid_branch: LinearForm
    gap_valid: np.ndarray
    indicator: np.ndarray
    cases: np.ndarray


def _fluid_fields(samples: InterfaceSamples, v_full, p_full):
    if not np.any(samples.has_fluid):
        k = len(samples)
        return np.zeros((k, 2)), np.zeros((k, 2, 2)), np.zeros(k)
    nodes = samples.fluid_nodes
    mask = samples.has_fluid.astype(float)
    v_nodes = np.asarray(v_full)[nodes] * mask[:, None, None]
    v = np.einsum('ka,kai->ki', samples.fluid_shape, v_nodes)
    grad_v = np.einsum('kai,kaj->kij', v_nodes, samples.fluid_grad)
    p = np.einsum('ka,ka->k', samples.fluid_shape, np.asarray(p_full)[nodes] * mask[:, None])
    return v, grad_v, p


def evaluate_interface(samples: InterfaceSamples, dofmap: DofMap, mesh: SolidMesh, u, velocity, v_full, p_full,
                       fluid_params: FluidParams, context: StepContext) -> InterfaceEvaluation:
    """Branch values, their derivatives, the case indicator and the case of every sample.

    :param u: solid displacements (n, 2) of the iterate.
    :param velocity: solid nodal velocities (n, 2) belonging to u.
    """
    k = len(samples)
    u = np.asarray(u).reshape(-1, 2)
    n = samples.normals
    mu = fluid_params.viscosity
    rf = context.rate_factor
    own_dofs = samples.solid_dofs(dofmap)
    vel_dofs, p_dofs = samples.fluid_dofs(dofmap)
    shape = samples.fluid_shape
    solid_shape = samples.solid.shape

    v, grad_v, p = _fluid_fields(samples, v_full, p_full)
    dn = np.einsum('kaj,kj->ka', samples.fluid_grad, n)
    sigma_f = LinearForm(-p + 2.0 * mu * np.einsum('ki,kij,kj->k', n, grad_v, n),
                         [(p_dofs, -shape), (vel_dofs, (2.0 * mu * dn[:, :, None] * n[:, None, :]).reshape(k, 8))])
    udot = samples.solid.values(velocity)
    v_rel_n = LinearForm(np.einsum('ki,ki->k', v - udot, n),
                         [(vel_dofs, (shape[:, :, None] * n[:, None, :]).reshape(k, 8)),
                          (own_dofs, (-rf * solid_shape[:, :, None] * n[:, None, :]).reshape(k, 8))])
    fluid_own = sigma_f + v_rel_n.scaled(samples.gamma_f)
    on_fluid = samples.sides == SIDE_FS
    closed = samples.sides == SIDE_SC
    fluid_branch = fluid_own.scaled(on_fluid) + fluid_own.take(samples.sources).scaled(closed)

    sigma_own, d_own = samples.solid.normal_stress(u, n, samples.c, samples.beta)
    own_stress = LinearForm(sigma_own, [(own_dofs, d_own.reshape(k, 8))])
    partner_value = np.zeros(k)
    partner_cols = np.full((k, 8), -1, dtype=int)
    partner_d = np.zeros((k, 8))
    index = samples.partner_index
    if len(index):
        sigma_p, d_p = samples.partner_points.normal_stress(u, n[index], samples.partner_c, samples.partner_beta)
        partner_value[index] = sigma_p
        partner_cols[index] = dofmap.solid_dofs(samples.partner_points.nodes).reshape(-1, 8)
        partner_d[index] = d_p.reshape(-1, 8)
    partner_stress = LinearForm(partner_value, [(partner_cols, partner_d)])
    solid_stress = own_stress.scaled(samples.omega) + partner_stress.scaled(1.0 - samples.omega)

    gap = _gap_form(samples, dofmap, mesh, u)
    valid = samples.partner_edges >= 0
    solid_branch = solid_stress + gap.scaled(samples.gamma_s)
    indicator = case_indicator(solid_branch.value, fluid_branch.value, valid & ~samples.rigid) * np.ones(k)
    cases = case_labels(samples.sides, indicator)
    return InterfaceEvaluation(sigma_f=sigma_f, v_rel_n=v_rel_n, fluid_own=fluid_own, fluid_branch=fluid_branch,
                               solid_stress=solid_stress, gap=gap, solid_branch=solid_branch, gap_valid=valid,
                               indicator=indicator, cases=cases)


def _gap_form(samples: InterfaceSamples, dofmap: DofMap, mesh: SolidMesh, u) -> LinearForm:
    """g_n = s with x + s n on the line through the partner edge; n is frozen."""
    k = len(samples)
    n = samples.normals
    valid = samples.partner_edges >= 0
    pairs = mesh.boundary_nodes[np.where(valid, samples.partner_edges, 0)] if k else np.zeros((0, 2), dtype=int)
    positions = mesh.nodes + u
    x = samples.solid.positions(u)
    y_a = positions[pairs[:, 0]]
    y_b = positions[pairs[:, 1]]
    d = y_b - y_a
    r = y_a - x
    denominator = _cross(n, d)
    denominator = np.where(valid & (np.abs(denominator) > 0.0), denominator, 1.0)
    s = _cross(r, d) / denominator
    ds_dx = -np.column_stack([d[:, 1], -d[:, 0]]) / denominator[:, None]
    dd_dya = np.column_stack([n[:, 1], -n[:, 0]])
    ds_dya = (np.column_stack([d[:, 1] + r[:, 1], -d[:, 0] - r[:, 0]]) - s[:, None] * dd_dya) / denominator[:, None]
    ds_dyb = (np.column_stack([-r[:, 1], r[:, 0]]) + s[:, None] * dd_dya) / denominator[:, None]
    mask = valid.astype(float)[:, None]
    own_d = (samples.solid.shape[:, :, None] * ds_dx[:, None, :]).reshape(k, 8) * mask
    partner_cols = np.where(valid[:, None], dofmap.solid_dofs(pairs).reshape(k, 4), -1)
    partner_d = np.column_stack([ds_dya, ds_dyb]) * mask
    return LinearForm(np.where(valid, s, 0.0), [(samples.solid_dofs(dofmap), own_d), (partner_cols, partner_d)])


def assemble_normal_coupling(acc: SystemAccumulator, dofmap: DofMap, samples: InterfaceSamples,
                             evaluation: InterfaceEvaluation, fluid_params: FluidParams, forced_cases=None):
    """Normal interface terms of cases I to IV.

    On the fluid-structure interface the fluid side always carries the
    Nitsche terms <dv, n (sigma_F + gamma_F v_rel_n)> + <dp, v_rel_n>
    - <2 mu n.eps(dv).n, v_rel_n>; the solid side is tested with the branch
    selected by the case.

    :param forced_cases: labels replacing the evaluated cases.
    """
    k = len(samples)
    if k == 0:
        return
    cases = evaluation.cases if forced_cases is None else np.asarray(forced_cases, dtype=object)
    n = samples.normals
    weights = samples.weights * samples.has_fluid
    vel_dofs, p_dofs = samples.fluid_dofs(dofmap)
    shape = samples.fluid_shape
    dn = np.einsum('kaj,kj->ka', samples.fluid_grad, n)

    test_v = (weights[:, None, None] * shape[:, :, None] * n[:, None, :]).reshape(k, 8)
    add_tested(acc, vel_dofs, test_v, evaluation.fluid_own)
    add_tested(acc, p_dofs, weights[:, None] * shape, evaluation.v_rel_n)
    adjoint = -(2.0 * fluid_params.viscosity * weights[:, None, None] * dn[:, :, None] * n[:, None, :]).reshape(k, 8)
    add_tested(acc, vel_dofs, adjoint, evaluation.v_rel_n)

    test_u = -(samples.weights[:, None, None] * samples.solid.shape[:, :, None] * n[:, None, :]).reshape(k, 8)
    own_dofs = samples.solid_dofs(dofmap)
    add_tested(acc, own_dofs, test_u, evaluation.fluid_branch.scaled(cases == 'I'), group='interface_fsi')
    contact = (evaluation.fluid_branch.scaled(cases == 'IV')
               + evaluation.solid_branch.scaled((cases == 'II') | (cases == 'III')))
    add_tested(acc, own_dofs, test_u, contact, group='interface_contact')


def tangential_factors(slip, h: float, gamma_t: float, viscosity: float):
    """a = 1 / (kappa mu + h / gamma_t) and b = kappa a, with the limits a = 0, b = 1 / mu at kappa = inf."""
    slip = np.asarray(slip, dtype=float)
    finite = np.isfinite(slip)
    kappa = np.where(finite, slip, 0.0)
    a = np.where(finite, 1.0 / (kappa * viscosity + h / gamma_t), 0.0)
    b = np.where(finite, kappa * a, 1.0 / viscosity)
    return a, b


def assemble_tangential_coupling(acc: SystemAccumulator, dofmap: DofMap, samples: InterfaceSamples, velocity,
                                 v_full, p_full, fluid_params: FluidParams, context: StepContext):
    """General Navier condition by Nitsche's method on the fluid-structure interface.

    With T = sigma_F n, w = P (v - du/dt) and P = I - n n:
    <dv - du, (1 - mu b) P T + mu a w> + (h / gamma_t) <2 mu eps(dv) n, b P T - a w>.
    """
    k = len(samples)
    if k == 0:
        return
    mu = fluid_params.viscosity
    rf = context.rate_factor
    n = samples.normals
    weights = samples.weights * samples.has_fluid
    shape = samples.fluid_shape
    grad = samples.fluid_grad
    solid_shape = samples.solid.shape
    vel_dofs, _ = samples.fluid_dofs(dofmap)
    own_dofs = samples.solid_dofs(dofmap)
    a, b = tangential_factors(samples.slip, samples.h, samples.gamma_t, mu)
    hg = samples.h / samples.gamma_t

    v, grad_v, _ = _fluid_fields(samples, v_full, p_full)
    projector = IDENTITY - np.einsum('ki,kj->kij', n, n)
    eps = 0.5 * (grad_v + np.transpose(grad_v, (0, 2, 1)))
    tau = 2.0 * mu * np.einsum('kil,klj,kj->ki', projector, eps, n)
    dn = np.einsum('kbj,kj->kb', grad, n)
    proj_grad = np.einsum('kil,kbl->kbi', projector, grad)
    # derivatives indexed [sample, node, dof component, vector component]
    d_tau = mu * (np.einsum('kic,kb->kbci', projector, dn) + np.einsum('kbi,kc->kbci', proj_grad, n))
    udot = samples.solid.values(velocity)
    w = np.einsum('kij,kj->ki', projector, v - udot)
    d_w_v = np.einsum('kb,kic->kbci', shape, projector)
    d_w_u = -rf * np.einsum('kb,kic->kbci', solid_shape, projector)

    coef_tau = 1.0 - mu * b
    coef_w = mu * a
    f = coef_tau[:, None] * tau + coef_w[:, None] * w
    df_v = coef_tau[:, None, None, None] * d_tau + coef_w[:, None, None, None] * d_w_v
    df_u = coef_w[:, None, None, None] * d_w_u
    g = hg * (b[:, None] * tau - a[:, None] * w)
    dg_v = hg * (b[:, None, None, None] * d_tau - a[:, None, None, None] * d_w_v)
    dg_u = -hg * a[:, None, None, None] * d_w_u

    # 2 mu eps(N_a e_c) n, component j
    q = mu * (np.einsum('cj,ka->kacj', IDENTITY, dn) + np.einsum('kaj,kc->kacj', grad, n))
    vel_by_component = vel_dofs.reshape(k, 4, 2)
    own_by_component = own_dofs.reshape(k, 4, 2)
    for i in range(2):
        f_i = LinearForm(f[:, i], [(vel_dofs, df_v[..., i].reshape(k, 8)), (own_dofs, df_u[..., i].reshape(k, 8))])
        g_i = LinearForm(g[:, i], [(vel_dofs, dg_v[..., i].reshape(k, 8)), (own_dofs, dg_u[..., i].reshape(k, 8))])
        add_tested(acc, vel_by_component[:, :, i], weights[:, None] * shape, f_i)
        add_tested(acc, own_by_component[:, :, i], -weights[:, None] * solid_shape, f_i, group='interface_fsi')
        add_tested(acc, vel_dofs, (weights[:, None, None] * q[..., i]).reshape(k, 8), g_i)


def interface_debug_rows(samples: InterfaceSamples, evaluation: InterfaceEvaluation):
    """Rows (x, y, side, case, g_n, C, kappa, fluid branch, weighted solid stress) per sample."""
    rows = []
    for k in range(len(samples)):
        gap = evaluation.gap.value[k] if evaluation.gap_valid[k] else np.inf
        rows.append((samples.positions[k, 0], samples.positions[k, 1], samples.sides[k], evaluation.cases[k],
                     gap, evaluation.indicator[k], samples.slip[k], evaluation.fluid_branch.value[k],
                     evaluation.solid_stress.value[k]))
    return rows
