# -*- coding: utf-8 -*-
"""Global numbering of the monolithic unknowns x = (u, v, p)."""
import numpy as np

from .state import FluidState
from ..log import get_logger

logger = get_logger('solver')

SOLID_COMPONENTS = ('x', 'y')
FLUID_COMPONENTS = ('x', 'y', 'p')


class DofMap(object):
    """Solid block first (2 dofs per node), then active fluid nodes (vx, vy, p), node-major."""

    def __init__(self, n_solid_nodes: int, active_fluid_nodes):
        self.n_solid_nodes = int(n_solid_nodes)
        self.active_fluid_nodes = np.asarray(active_fluid_nodes, dtype=bool).copy()
        self.fluid_nodes = np.nonzero(self.active_fluid_nodes)[0]
        self.fluid_index = np.full(len(self.active_fluid_nodes), -1, dtype=int)
        self.fluid_index[self.fluid_nodes] = np.arange(len(self.fluid_nodes))
        self.fluid_offset = 2 * self.n_solid_nodes
        self.n_dofs = self.fluid_offset + 3 * len(self.fluid_nodes)
        self.dirichlet_mask = np.zeros(self.n_dofs, dtype=bool)
        self.dirichlet_values = np.zeros(self.n_dofs)

    @property
    def n_fluid_dofs(self):
        return 3 * len(self.fluid_nodes)

    def solid_dofs(self, nodes):
        nodes = np.asarray(nodes)
        return 2 * nodes[..., None] + np.arange(2)

    def fluid_dofs(self, nodes):
        """(..., 3) dofs (vx, vy, p) of grid nodes, -1 for inactive nodes."""
        nodes = np.asarray(nodes)
        if len(self.fluid_index) == 0:
            return np.full(nodes.shape + (3,), -1, dtype=int)
        index = self.fluid_index[nodes]
        dofs = self.fluid_offset + 3 * index[..., None] + np.arange(3)
        return np.where(index[..., None] >= 0, dofs, -1)

    def velocity_dofs(self, nodes):
        return self.fluid_dofs(nodes)[..., :2]

    def pressure_dofs(self, nodes):
        return self.fluid_dofs(nodes)[..., 2]

    def field_masks(self):
        """Boolean masks of solid, fluid momentum and continuity dofs."""
        solid = np.zeros(self.n_dofs, dtype=bool)
        solid[:self.fluid_offset] = True
        momentum = np.zeros(self.n_dofs, dtype=bool)
        continuity = np.zeros(self.n_dofs, dtype=bool)
        fluid = np.arange(self.fluid_offset, self.n_dofs)
        momentum[fluid[(fluid - self.fluid_offset) % 3 != 2]] = True
        continuity[fluid[(fluid - self.fluid_offset) % 3 == 2]] = True
        return {'solid': solid, 'momentum': momentum, 'continuity': continuity}

    def constrain(self, dofs, values):
        dofs = np.asarray(dofs).ravel()
        values = np.broadcast_to(np.asarray(values, dtype=float), dofs.shape)
        keep = dofs >= 0
        self.dirichlet_mask[dofs[keep]] = True
        self.dirichlet_values[dofs[keep]] = values[keep]

    def gather(self, u, fluid: FluidState):
        x = np.zeros(self.n_dofs)
        x[:self.fluid_offset] = np.asarray(u).ravel()
        if len(self.fluid_nodes):
            block = np.column_stack([fluid.v[self.fluid_nodes], fluid.p[self.fluid_nodes]])
            x[self.fluid_offset:] = block.ravel()
        return x

    def split(self, x):
        """Solid displacements (n, 2), active fluid velocities (m, 2) and pressures (m,)."""
        u = x[:self.fluid_offset].reshape(-1, 2)
        block = x[self.fluid_offset:].reshape(-1, 3)
        return u, block[:, :2], block[:, 2]

    def scatter_fluid(self, x, fluid: FluidState):
        """Write the active fluid values of x into a full-grid fluid state (in place)."""
        _, v, p = self.split(x)
        fluid.v[self.fluid_nodes] = v
        fluid.p[self.fluid_nodes] = p
        fluid.has_value[self.fluid_nodes] = True


def transfer_state(old: FluidState, old_map: DofMap, new_map: DofMap):
    """Carry a fluid state over to a new active node set.

    Nodes active in both maps keep their values. Newly activated nodes keep
    the value they carried when they were last active (ghost zone) and
    start from zero otherwise.

    :return: (new FluidState, ids of newly activated nodes started from zero).
    """
    new = old.copy()
    newly = new_map.active_fluid_nodes & ~old_map.active_fluid_nodes
    zeroed = np.nonzero(newly & ~old.has_value)[0]
    new.v[zeroed] = 0.0
    new.p[zeroed] = 0.0
    new.rate[zeroed] = 0.0
    new.has_value[new_map.fluid_nodes] = True
    if len(zeroed):
        logger.debug(f"Activated {len(zeroed)} fluid node(s) without history: {zeroed.tolist()}")
    return new, zeroed
