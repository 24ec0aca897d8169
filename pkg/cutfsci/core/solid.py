# -*- coding: utf-8 -*-
"""Finite-deformation elastodynamics on the fitted solid mesh."""
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

from .assembly import SystemAccumulator
from .dofmap import DofMap
from .material import NeoHookeMaterial, determinant, inverse, neo_hooke_stress, normal_stress
from .mesh import SolidMesh
from .quadrature import edge_reference_points, q1_shape, quad_gauss_rule
from .state import SolidState, StepContext
from ..exception import ConfigurationError, ElementInversionError

IDENTITY = np.eye(2)
WEIGHTING_MODES = ('one_sided', 'half', 'harmonic')


@dataclass
class StressEval:
    F: np.ndarray
    J: np.ndarray
    E: np.ndarray
    S: np.ndarray = None
    sigma: np.ndarray = None


@dataclass
class SolidNeumann:
    """Dead traction (reference configuration) on an edge set."""
    edges: np.ndarray       # boundary edge indices
    traction: Sequence      # two time functions (x, y)


def reference_gradients(coords, ref_points):
    """Shape values, gradients with respect to X and reference Jacobian determinants.

    :param coords: (e, 4, 2) reference nodal coordinates.
    :param ref_points: (q, 2) or (e, q, 2) reference points.
    :return: N (.., q, 4), dN/dX (e, q, 4, 2), det J0 (e, q).
    """
    n, dn = q1_shape(ref_points)
    if dn.ndim == 3:
        jac = np.einsum('eai,qaj->eqij', coords, dn)
        inv = inverse(jac)
        grad = np.einsum('qaj,eqji->eqai', dn, inv)
    else:
        jac = np.einsum('eai,eqaj->eqij', coords, dn)
        inv = inverse(jac)
        grad = np.einsum('eqaj,eqji->eqai', dn, inv)
    return n, grad, determinant(jac)


def deformation_gradient(u_e, grad):
    """F = I + du/dX for nodal displacements (e, 4, 2) and gradients (e, q, 4, 2)."""
    return IDENTITY + np.einsum('eai,eqaj->eqij', u_e, grad)


def kinematics(coords, u, ref_point) -> StressEval:
    """Deformation gradient, its determinant and Green-Lagrange strain at one point.

    :param coords: (4, 2) reference coordinates of the element.
    :param u: (4, 2) nodal displacements.
    :param ref_point: (2,) reference coordinates in [-1, 1]^2.
    """
    _, grad, _ = reference_gradients(np.asarray(coords, dtype=float)[None],
                                     np.asarray(ref_point, dtype=float)[None])
    F = deformation_gradient(np.asarray(u, dtype=float)[None], grad)[0, 0]
    J = determinant(F)
    if J <= 0.0:
        raise ElementInversionError("Non-positive deformation Jacobian")
    E = 0.5 * (F.T @ F - IDENTITY)
    return StressEval(F=F, J=J, E=E)


def material_arrays(mesh: SolidMesh, materials: Dict[int, NeoHookeMaterial], elements=None):
    """Per-element c, beta and density."""
    bodies = mesh.bodies if elements is None else mesh.bodies[elements]
    missing = set(np.unique(bodies).tolist()) - set(materials)
    if missing:
        raise ConfigurationError(f"No material for solid bodies {sorted(missing)}")
    c = np.array([materials[b].c for b in bodies])
    beta = np.array([materials[b].beta for b in bodies])
    rho = np.array([materials[b].density for b in bodies])
    return c, beta, rho


def _raise_inversion(mesh, J, elements):
    bad = np.nonzero(np.any(J <= 0.0, axis=1))[0]
    if len(bad):
        element = int(elements[bad[0]])
        raise ElementInversionError("Solid element inverted", element=element, body=int(mesh.bodies[element]))


def assemble_solid(acc: SystemAccumulator, dofmap: DofMap, mesh: SolidMesh, materials: Dict[int, NeoHookeMaterial],
                   u, old: SolidState, context: StepContext, body_forces: Dict[int, np.ndarray] = None,
                   neumann: List[SolidNeumann] = (), rigid_bodies=()):
    """Add inertia, internal, body and Neumann forces of all elastic solid elements.

    Residual per node a and direction i:
    int rho0 N_a a_i + P_iJ dN_a/dX_J - rho0 N_a b_i dV0 - int N_a t_i dS0.
    Elements of rigid bodies carry no terms; their nodes are fully prescribed.
    """
    elements = np.nonzero(~np.isin(mesh.bodies, list(rigid_bodies)))[0]
    if len(elements) == 0:
        return
    connectivity = mesh.elements[elements]
    ref, w = quad_gauss_rule(2)
    coords = mesh.nodes[connectivity]
    u_e = np.asarray(u).reshape(-1, 2)[connectivity]
    n, grad, det0 = reference_gradients(coords, ref)
    dv = det0 * w[None, :]
    F = deformation_gradient(u_e, grad)
    J = determinant(F)
    _raise_inversion(mesh, J, elements)

    c, beta, rho = material_arrays(mesh, materials, elements)
    n_q = len(w)
    S, _, tangent = neo_hooke_stress(None, F, c=np.repeat(c[:, None], n_q, axis=1),
                                     beta=np.repeat(beta[:, None], n_q, axis=1))
    P = np.einsum('eqik,eqkj->eqij', F, S)
    residual = np.einsum('eqij,eqaj,eq->eai', P, grad, dv)

    # A_iJkL = delta_ik S_JL + F_iI F_kK dS_IJ/dE_KL
    A = np.einsum('ik,eqJL->eqiJkL', IDENTITY, S) + np.einsum('eqiI,eqkK,eqIJKL->eqiJkL', F, F, tangent)
    stiffness = np.einsum('eqaJ,eqiJkL,eqbL,eq->eaibk', grad, A, grad, dv)

    mass = np.einsum('qa,qb,eq->eab', n, n, dv * rho[:, None])
    if not context.steady:
        _, acceleration = old.rates(np.asarray(u).reshape(-1, 2), context)
        residual += np.einsum('eab,ebi->eai', mass, acceleration[connectivity])
        stiffness += np.einsum('eab,ik->eaibk', mass, IDENTITY) * context.rate_factor ** 2

    if body_forces:
        b = np.array([body_forces.get(int(body), np.zeros(2)) for body in mesh.bodies[elements]])
        load = np.einsum('qa,eq->ea', n, dv * rho[:, None])
        residual -= load[:, :, None] * b[:, None, :]

    dofs = dofmap.solid_dofs(connectivity).reshape(-1, 8)
    acc.add_residual(dofs, residual.reshape(-1, 8), group='solid')
    acc.add_matrix(dofs, dofs, stiffness.reshape(-1, 8, 8))

    for load in neumann:
        add_solid_neumann(acc, dofmap, mesh, load, context.time)


def add_solid_neumann(acc: SystemAccumulator, dofmap: DofMap, mesh: SolidMesh, load: SolidNeumann, time: float):
    """Dead traction on straight reference edges: half the edge resultant per end node."""
    if len(load.edges) == 0:
        return
    pairs = mesh.boundary_nodes[load.edges]
    lengths = np.linalg.norm(mesh.nodes[pairs[:, 1]] - mesh.nodes[pairs[:, 0]], axis=1)
    traction = np.array([load.traction[0](time), load.traction[1](time)])
    forces = 0.5 * lengths[:, None, None] * traction[None, None, :] * np.ones((1, 2, 1))
    acc.add_residual(dofmap.solid_dofs(pairs).reshape(-1, 4), -forces.reshape(-1, 4))


class BoundaryPoints(object):
    """Solid quantities at points on boundary edges, following the displacement field.

    :param mesh: solid mesh.
    :param edges: (k,) boundary edge index of each point.
    :param params: (k,) parameter along the edge from its first to its second node.
    """

    def __init__(self, mesh: SolidMesh, edges, params):
        self.mesh = mesh
        self.edges = np.asarray(edges, dtype=int)
        self.params = np.asarray(params, dtype=float)
        self.elements = mesh.boundary_elements[self.edges]
        local = mesh.boundary_local[self.edges]
        ref = np.array([edge_reference_points(l, s) for l, s in zip(local, self.params)]).reshape(-1, 2)
        coords = mesh.nodes[mesh.elements[self.elements]]
        self.shape, grad, _ = reference_gradients(coords, ref[:, None, :])
        self.shape = self.shape[:, 0, :] if self.shape.ndim == 3 else self.shape
        self.grad = grad[:, 0]
        self.nodes = mesh.elements[self.elements]
        self.reference = np.einsum('ka,kai->ki', self.shape, coords)

    def __len__(self):
        return len(self.edges)

    def positions(self, u):
        u = np.asarray(u).reshape(-1, 2)
        return self.reference + np.einsum('ka,kai->ki', self.shape, u[self.nodes])

    def values(self, field):
        field = np.asarray(field).reshape(-1, 2)
        return np.einsum('ka,kai->ki', self.shape, field[self.nodes])

    def deformation_gradients(self, u):
        u = np.asarray(u).reshape(-1, 2)
        return IDENTITY + np.einsum('kai,kaj->kij', u[self.nodes], self.grad)

    def normal_stress(self, u, normals, c, beta):
        """sigma_nn and its derivative with respect to the 8 element displacements (k, 4, 2)."""
        F = self.deformation_gradients(u)
        try:
            sigma_nn, d_sigma_dF = normal_stress(F, normals, c, beta)
        except ElementInversionError:
            bad = int(self.elements[np.argmin(determinant(F))])
            raise ElementInversionError("Solid element inverted at the interface", element=bad,
                                        body=int(self.mesh.bodies[bad]))
        d_sigma_du = np.einsum('kij,kaj->kai', d_sigma_dF, self.grad)
        return sigma_nn, d_sigma_du


def stress_weights(mode: str, phi_own, phi_partner=None, partner_rigid=False):
    """Weight omega of the own body's stress in the weighted contact stress.

    :param phi_own: (k,) penalty scaling of the own body.
    :param phi_partner: (k,) penalty scaling of the partner body.
    :param partner_rigid: scalar or (k,) flag, a rigid partner gets omega = 1.
    """
    phi_own = np.asarray(phi_own, dtype=float)
    if mode == 'one_sided':
        omega = np.ones_like(phi_own)
    elif mode == 'half':
        omega = np.full_like(phi_own, 0.5)
    elif mode == 'harmonic':
        if phi_partner is None:
            raise ConfigurationError("Harmonic weighting needs both penalty scalings")
        phi_partner = np.asarray(phi_partner, dtype=float)
        total = phi_own + phi_partner
        omega = np.divide(phi_partner, total, out=np.ones_like(phi_own), where=total > 0.0)
    else:
        raise ConfigurationError(f"Unknown weighting mode '{mode}', valid: {list(WEIGHTING_MODES)}",
                                 key_path='interface.weighting')
    return np.where(partner_rigid, 1.0, omega)


def weighted_normal_stress(sigma_own, sigma_partner, mode: str, phi_own=None, phi_partner=None,
                           partner_rigid=False):
    """Convex combination omega * sigma_own + (1 - omega) * sigma_partner.

    :return: (weighted stress, omega).
    """
    sigma_own = np.asarray(sigma_own, dtype=float)
    if phi_own is None:
        phi_own = np.ones_like(sigma_own)
    omega = stress_weights(mode, phi_own, phi_partner, partner_rigid) * np.ones_like(sigma_own)
    if sigma_partner is None:
        if np.any(omega != 1.0):
            raise ConfigurationError("Weighted solid stress needs a projection partner")
        return sigma_own, omega
    return omega * sigma_own + (1.0 - omega) * np.asarray(sigma_partner, dtype=float), omega


def solid_penalty_scale(youngs_modulus, edge_length):
    """phi_S = E / h_s."""
    return np.asarray(youngs_modulus, dtype=float) / np.asarray(edge_length, dtype=float)


def solid_penalty(gamma_s0: float, youngs_modulus, edge_length):
    """gamma_S = gamma_S0 * E / h_s."""
    return gamma_s0 * solid_penalty_scale(youngs_modulus, edge_length)
