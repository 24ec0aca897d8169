# -*- coding: utf-8 -*-
"""Flow rates, mass-balance errors, interface tractions and probes of converged states."""
from dataclasses import dataclass, field
from typing import Dict, Sequence

import numpy as np

from .coupling import CASES
from .cutcell import SIDE_FS
from .mesh import SIDE_NORMALS, SIDES, SolidMesh
from .quadrature import gauss_legendre
from ..exception import ConfigurationError

TIMESERIES_COLUMNS = ('t', 'Phi', 'PhiF', 'PhiS', 'err1', 'err2', 'probe_ux', 'probe_uy', 'newton_iters', 'ndof')
CASE_COLUMNS = tuple(f"n_{case}" for case in CASES)


@dataclass
class TimeSeriesRecord:
    t: float
    phi: float = 0.0
    phi_f: float = 0.0
    phi_s: float = 0.0
    err1: float = 0.0
    err2: float = 0.0
    probe_ux: float = 0.0
    probe_uy: float = 0.0
    newton_iters: int = 0
    ndof: int = 0
    cases: Dict[str, int] = field(default_factory=dict)

    def row(self):
        return ((self.t, self.phi, self.phi_f, self.phi_s, self.err1, self.err2, self.probe_ux, self.probe_uy,
                 self.newton_iters, self.ndof) + tuple(self.cases.get(case, 0) for case in CASES))


@dataclass
class NodalTraction:
    """Interface tractions per solid node: overall = fsi + contact."""
    nodes: np.ndarray
    overall: np.ndarray
    fsi: np.ndarray
    contact: np.ndarray


def boundary_flow_rate(cut_state, v_full, sides: Sequence[str]) -> float:
    """|sum over the sides of int v.n| on the physical part of grid sides."""
    total = 0.0
    s, w = gauss_legendre(2)
    for side in sides:
        if side not in SIDES:
            raise ConfigurationError(f"Unknown boundary '{side}', valid: {list(SIDES)} or 'interface'")
        elements, starts, ends = cut_state.boundary_portions[side]
        if len(elements) == 0:
            continue
        points = (starts[:, None, :] + s[None, :, None] * (ends - starts)[:, None, :]).reshape(-1, 2)
        weights = (np.linalg.norm(ends - starts, axis=1)[:, None] * w[None, :]).ravel()
        point_elements = np.repeat(elements, len(s))
        shape, _ = cut_state.grid.shape(point_elements, points)
        v = np.einsum('ka,kai->ki', shape, np.asarray(v_full)[cut_state.grid.element_nodes[point_elements]])
        total += float(np.sum(weights * (v @ SIDE_NORMALS[side])))
    return abs(total)


def interface_flow_rate(samples, velocity) -> float:
    """|int v.n| over the fluid-structure interface for a velocity sampled at the samples (k, 2)."""
    on_fluid = samples.sides == SIDE_FS
    flux = np.einsum('ki,ki->k', np.asarray(velocity), samples.normals)
    return abs(float(np.sum(samples.weights[on_fluid] * flux[on_fluid])))


def flow_rate(snapshot, state, where, source: str = 'fluid') -> float:
    """Flow rate through grid sides or through the fluid-structure interface.

    :param where: a side name, a sequence of side names or 'interface'.
    :param source: 'fluid' or 'solid' velocity; the solid velocity exists on the interface only.
    """
    if source not in ('fluid', 'solid'):
        raise ConfigurationError(f"Unknown velocity source '{source}', valid: ['fluid', 'solid']")
    if where == 'interface':
        samples = snapshot.samples
        if source == 'solid':
            return interface_flow_rate(samples, samples.solid.values(state.solid.velocity))
        shape = samples.fluid_shape * samples.has_fluid[:, None]
        velocity = np.einsum('ka,kai->ki', shape, state.fluid.v[samples.fluid_nodes])
        return interface_flow_rate(samples, velocity)
    if source == 'solid':
        raise ConfigurationError("The solid velocity is only defined on the interface")
    sides = [where] if isinstance(where, str) else list(where)
    return boundary_flow_rate(snapshot.cut_state, state.fluid.v, sides)


def flow_rate_errors(record: TimeSeriesRecord):
    """err1 = |PhiS - Phi|, err2 = |PhiS - PhiF|."""
    return abs(record.phi_s - record.phi), abs(record.phi_s - record.phi_f)


def tributary_lengths(mesh: SolidMesh, interface) -> np.ndarray:
    """Half the summed length of the interface segments adjacent to each solid node."""
    lengths = np.zeros(mesh.n_nodes)
    pairs = mesh.boundary_nodes[interface.edges]
    half = 0.5 * interface.lengths
    np.add.at(lengths, pairs[:, 0], half)
    np.add.at(lengths, pairs[:, 1], half)
    return lengths


def reconstruct_traction(mesh: SolidMesh, interface, groups: Dict[str, np.ndarray]) -> NodalTraction:
    """Nodal interface tractions from the assembled interface residual groups.

    Nodes without tributary length are skipped.
    """
    lengths = tributary_lengths(mesh, interface)
    nodes = np.nonzero(lengths > 0.0)[0]
    n_solid = 2 * mesh.n_nodes

    def traction(name):
        residual = groups.get(name)
        if residual is None:
            return np.zeros((len(nodes), 2))
        force = -np.asarray(residual)[:n_solid].reshape(-1, 2)
        return force[nodes] / lengths[nodes, None]

    fsi = traction('interface_fsi')
    contact = traction('interface_contact')
    return NodalTraction(nodes=nodes, overall=fsi + contact, fsi=fsi, contact=contact)


def nearest_node(mesh: SolidMesh, point) -> int:
    """Solid node closest to a reference point."""
    return int(np.argmin(np.linalg.norm(mesh.nodes - np.asarray(point, dtype=float), axis=1)))


def probe_displacement(mesh: SolidMesh, u, point):
    return np.asarray(u).reshape(-1, 2)[nearest_node(mesh, point)].copy()


def make_record(result, flow_sides: Sequence[str], probe_node: int = None) -> TimeSeriesRecord:
    """Time-series record of a converged step result."""
    state = result.state
    snapshot = result.snapshot
    record = TimeSeriesRecord(t=state.time, newton_iters=result.iterations, ndof=snapshot.dofmap.n_dofs)
    if snapshot.cut_state.grid is not None:
        if flow_sides:
            record.phi = flow_rate(snapshot, state, list(flow_sides))
        record.phi_f = flow_rate(snapshot, state, 'interface', 'fluid')
        record.phi_s = flow_rate(snapshot, state, 'interface', 'solid')
        record.err1, record.err2 = flow_rate_errors(record)
    if probe_node is not None:
        record.probe_ux, record.probe_uy = state.solid.u[probe_node]
    if result.evaluation is not None:
        record.cases = snapshot.samples.case_counts(result.evaluation.cases)
    return record
