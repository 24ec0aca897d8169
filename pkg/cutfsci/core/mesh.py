# -*- coding: utf-8 -*-
"""Fluid background grid, fitted solid meshes and the solid interface."""
import os
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .quadrature import Q1_EDGES, q1_shape, quad_gauss_rule
from ..exception import ConfigurationError, GeometryError, OutputError
from ..log import get_logger

logger = get_logger()

SIDES = ('bottom', 'right', 'top', 'left')
GRID_TAGS = ('dirichlet', 'neumann', 'none')
EDGE_TAGS = ('dirichlet', 'neumann', 'coupling', 'none')

# Outward unit normal of each grid side.
SIDE_NORMALS = {
    'bottom': np.array([0.0, -1.0]),
    'right': np.array([1.0, 0.0]),
    'top': np.array([0.0, 1.0]),
    'left': np.array([-1.0, 0.0]),
}


class FluidGrid(object):
    """Fixed structured grid of axis-aligned bilinear quadrilaterals.

    Nodes and elements are numbered row-major from the origin.
    """

    def __init__(self, origin, extent, nx: int, ny: int, boundary_tags: Dict[str, str] = None):
        self.origin = np.asarray(origin, dtype=float)
        self.extent = np.asarray(extent, dtype=float)
        self.nx = int(nx)
        self.ny = int(ny)
        tags = dict(boundary_tags or {})
        for side in SIDES:
            tags.setdefault(side, 'none')
        self.boundary_tags = tags

        self.hx = self.extent[0] / self.nx
        self.hy = self.extent[1] / self.ny
        self.n_nodes = (self.nx + 1) * (self.ny + 1)
        self.n_elements = self.nx * self.ny

        xs = self.origin[0] + self.hx * np.arange(self.nx + 1)
        ys = self.origin[1] + self.hy * np.arange(self.ny + 1)
        xx, yy = np.meshgrid(xs, ys, indexing='xy')
        self.node_coords = np.column_stack([xx.ravel(), yy.ravel()])

        ii, jj = np.meshgrid(np.arange(self.nx), np.arange(self.ny), indexing='xy')
        ii = ii.ravel()
        jj = jj.ravel()
        self.element_ij = np.column_stack([ii, jj])
        self.element_nodes = np.column_stack([
            self.node_id(ii, jj), self.node_id(ii + 1, jj),
            self.node_id(ii + 1, jj + 1), self.node_id(ii, jj + 1)])
        x0 = self.origin[0] + ii * self.hx
        y0 = self.origin[1] + jj * self.hy
        self.element_boxes = np.column_stack([x0, y0, x0 + self.hx, y0 + self.hy])

    def node_id(self, i, j):
        return j * (self.nx + 1) + i

    def element_id(self, i, j):
        return j * self.nx + i

    @property
    def bounds(self) -> Tuple[float, float, float, float]:
        x0, y0 = self.origin
        return x0, y0, x0 + self.extent[0], y0 + self.extent[1]

    def contains(self, points, tol: float = 0.0):
        points = np.atleast_2d(points)
        x0, y0, x1, y1 = self.bounds
        return ((points[:, 0] >= x0 - tol) & (points[:, 0] <= x1 + tol)
                & (points[:, 1] >= y0 - tol) & (points[:, 1] <= y1 + tol))

    def locate(self, points):
        """Element ids containing the points, -1 outside the grid.

        Points on a shared face go to the element with the larger index.
        """
        points = np.atleast_2d(points)
        i = np.floor((points[:, 0] - self.origin[0]) / self.hx).astype(int)
        j = np.floor((points[:, 1] - self.origin[1]) / self.hy).astype(int)
        inside = self.contains(points)
        i = np.clip(i, 0, self.nx - 1)
        j = np.clip(j, 0, self.ny - 1)
        return np.where(inside, self.element_id(i, j), -1)

    def to_reference(self, elements, points):
        """Reference coordinates of physical points in the given elements."""
        boxes = self.element_boxes[elements]
        xi = 2.0 * (points[:, 0] - boxes[:, 0]) / self.hx - 1.0
        eta = 2.0 * (points[:, 1] - boxes[:, 1]) / self.hy - 1.0
        return np.column_stack([xi, eta])

    def shape(self, elements, points):
        """Shape values (n, 4) and physical gradients (n, 4, 2) at points in elements."""
        n, dn = q1_shape(self.to_reference(elements, points))
        grad = dn * np.array([2.0 / self.hx, 2.0 / self.hy])
        return n, grad

    def interior_faces(self):
        """Interior faces as (minus element, plus element, axis, start, end).

        axis 0: vertical face with normal +x; axis 1: horizontal face with normal +y.
        """
        minus, plus, axis, start, end = [], [], [], [], []
        for j in range(self.ny):
            for i in range(self.nx - 1):
                minus.append(self.element_id(i, j))
                plus.append(self.element_id(i + 1, j))
                axis.append(0)
                start.append(self.node_coords[self.node_id(i + 1, j)])
                end.append(self.node_coords[self.node_id(i + 1, j + 1)])
        for j in range(self.ny - 1):
            for i in range(self.nx):
                minus.append(self.element_id(i, j))
                plus.append(self.element_id(i, j + 1))
                axis.append(1)
                start.append(self.node_coords[self.node_id(i, j + 1)])
                end.append(self.node_coords[self.node_id(i + 1, j + 1)])
        return (np.array(minus, dtype=int), np.array(plus, dtype=int), np.array(axis, dtype=int),
                np.array(start).reshape(-1, 2), np.array(end).reshape(-1, 2))

    def side_nodes(self, side: str):
        if side == 'bottom':
            return self.node_id(np.arange(self.nx + 1), 0)
        if side == 'top':
            return self.node_id(np.arange(self.nx + 1), self.ny)
        if side == 'left':
            return self.node_id(0, np.arange(self.ny + 1))
        if side == 'right':
            return self.node_id(self.nx, np.arange(self.ny + 1))
        raise ConfigurationError(f"Unknown grid side '{side}', valid: {list(SIDES)}")

    def side_edges(self, side: str):
        """Boundary edges of a side as (elements, start points, end points)."""
        nodes = self.side_nodes(side)
        coords = self.node_coords[nodes]
        if side in ('bottom', 'top'):
            j = 0 if side == 'bottom' else self.ny - 1
            elements = self.element_id(np.arange(self.nx), j)
        else:
            i = 0 if side == 'left' else self.nx - 1
            elements = self.element_id(i, np.arange(self.ny))
        return elements, coords[:-1], coords[1:]

    def __repr__(self):
        return f"FluidGrid[origin={self.origin.tolist()}, extent={self.extent.tolist()}, nx={self.nx}, ny={self.ny}]"


def build_structured_grid(origin, extent, nx: int, ny: int, boundary_tags: Dict[str, str] = None) -> FluidGrid:
    """Build the fixed fluid grid.

    :param origin: lower-left corner.
    :param extent: side lengths, componentwise positive.
    :param nx: number of elements in x.
    :param ny: number of elements in y.
    :param boundary_tags: side name -> one of 'dirichlet', 'neumann', 'none'.
    """
    if int(nx) < 1 or int(ny) < 1:
        raise ConfigurationError(f"Grid element counts must be positive, got nx={nx}, ny={ny}")
    extent = np.asarray(extent, dtype=float)
    if extent.shape != (2,) or np.any(extent <= 0.0):
        raise ConfigurationError(f"Grid extent must be positive, got {extent.tolist()}")
    for side, tag in (boundary_tags or {}).items():
        if side not in SIDES:
            raise ConfigurationError(f"Unknown grid side '{side}'", key_path=f"fluid.bc.{side}")
        if tag not in GRID_TAGS:
            raise ConfigurationError(f"Unknown grid boundary tag '{tag}', valid: {list(GRID_TAGS)}",
                                     key_path=f"fluid.bc.{side}")
    return FluidGrid(origin, extent, nx, ny, boundary_tags)


def element_size(grid: FluidGrid) -> float:
    """Representative interface length scale h_gamma of the grid."""
    return float(min(grid.hx, grid.hy))


@dataclass
class EdgeSet:
    name: str
    tag: str
    edges: np.ndarray  # (k, 2) node pairs


class SolidMesh(object):
    """Fitted bilinear quadrilateral mesh of one or more solid bodies."""

    def __init__(self, nodes, elements, bodies, edge_sets: Sequence[EdgeSet] = ()):
        self.nodes = np.asarray(nodes, dtype=float).reshape(-1, 2)
        self.elements = np.asarray(elements, dtype=int).reshape(-1, 4)
        self.bodies = np.asarray(bodies, dtype=int).reshape(-1)
        self.edge_sets = {edge_set.name: edge_set for edge_set in edge_sets}
        if len(self.bodies) != len(self.elements):
            raise ConfigurationError("One body id per solid element is required")
        if len(self.elements) and (self.elements.min() < 0 or self.elements.max() >= len(self.nodes)):
            raise ConfigurationError("Solid element references an unknown node")
        self._check_jacobians()
        self._build_boundary()
        for edge_set in self.edge_sets.values():
            if edge_set.tag not in EDGE_TAGS:
                raise ConfigurationError(f"Unknown edge tag '{edge_set.tag}', valid: {list(EDGE_TAGS)}",
                                         key_path=edge_set.name)
            self.edge_set_indices(edge_set.name)

    @property
    def n_nodes(self):
        return len(self.nodes)

    @property
    def n_elements(self):
        return len(self.elements)

    @property
    def body_ids(self):
        return np.unique(self.bodies)

    def nodes_of_body(self, body: int):
        return np.unique(self.elements[self.bodies == body])

    def _check_jacobians(self):
        ref_points, _ = quad_gauss_rule(2)
        _, dn = q1_shape(ref_points)
        coords = self.nodes[self.elements]  # (e, 4, 2)
        jac = np.einsum('eai,qaj->eqij', coords, dn)
        det = jac[..., 0, 0] * jac[..., 1, 1] - jac[..., 0, 1] * jac[..., 1, 0]
        bad = np.nonzero(np.any(det <= 0.0, axis=1))[0]
        if len(bad):
            raise GeometryError("Solid element with non-positive reference Jacobian", element=int(bad[0]))

    def _build_boundary(self):
        counts = {}
        for e, element in enumerate(self.elements):
            for local, (a, b) in enumerate(Q1_EDGES):
                key = tuple(sorted((element[a], element[b])))
                counts.setdefault(key, []).append((e, local))
        boundary_elements, boundary_local, boundary_nodes = [], [], []
        self._edge_lookup = {}
        for key, owners in counts.items():
            if len(owners) != 1:
                continue
            e, local = owners[0]
            a, b = Q1_EDGES[local]
            self._edge_lookup[key] = len(boundary_elements)
            boundary_elements.append(e)
            boundary_local.append(local)
            boundary_nodes.append((self.elements[e, a], self.elements[e, b]))
        self.boundary_elements = np.array(boundary_elements, dtype=int)
        self.boundary_local = np.array(boundary_local, dtype=int)
        self.boundary_nodes = np.array(boundary_nodes, dtype=int).reshape(-1, 2)
        self.boundary_bodies = self.bodies[self.boundary_elements]

    def edge_index(self, a: int, b: int) -> int:
        """Boundary edge index of the node pair (a, b), -1 if it is not a boundary edge."""
        return self._edge_lookup.get(tuple(sorted((int(a), int(b)))), -1)

    def edge_set_indices(self, name: str):
        """Boundary edge indices of an edge set."""
        edge_set = self.edge_sets.get(name)
        if edge_set is None:
            raise ConfigurationError(f"Unknown edge set '{name}', valid: {list(self.edge_sets)}", key_path=name)
        indices = []
        for a, b in edge_set.edges:
            index = self.edge_index(a, b)
            if index < 0:
                raise ConfigurationError(f"Edge ({a}, {b}) of set '{name}' is not a boundary edge", key_path=name)
            indices.append(index)
        return np.unique(np.array(indices, dtype=int))

    def edge_set_nodes(self, name: str):
        return np.unique(self.boundary_nodes[self.edge_set_indices(name)])

    def coupling_edges(self):
        """Boundary edge indices of all edge sets tagged 'coupling'."""
        indices = [self.edge_set_indices(name) for name, edge_set in self.edge_sets.items()
                   if edge_set.tag == 'coupling']
        if not indices:
            return np.zeros(0, dtype=int)
        return np.unique(np.concatenate(indices))

    def boundary_loops(self, body: int) -> List[np.ndarray]:
        """Closed boundary node loops of one body, oriented with the body on the left."""
        edges = np.nonzero(self.boundary_bodies == body)[0]
        following = {int(self.boundary_nodes[k, 0]): int(self.boundary_nodes[k, 1]) for k in edges}
        loops = []
        remaining = set(following)
        while remaining:
            start = min(remaining)
            loop = [start]
            remaining.discard(start)
            node = following[start]
            while node != start:
                if node not in remaining:
                    raise GeometryError(f"Boundary of body {body} is not a closed manifold loop")
                loop.append(node)
                remaining.discard(node)
                node = following[node]
            loops.append(np.array(loop, dtype=int))
        return loops

    def __repr__(self):
        return (f"SolidMesh[nodes={self.n_nodes}, elements={self.n_elements}, "
                f"bodies={self.body_ids.tolist()}, edge_sets={list(self.edge_sets)}]")


@dataclass
class InterfaceMesh:
    """Straight interface segments in the current configuration."""
    start: np.ndarray    # (m, 2)
    end: np.ndarray      # (m, 2)
    edges: np.ndarray    # (m,) parent boundary edge index
    bodies: np.ndarray   # (m,)
    normals: np.ndarray  # (m, 2) outward solid normals

    @property
    def lengths(self):
        return np.linalg.norm(self.end - self.start, axis=1)

    def __len__(self):
        return len(self.edges)


def extract_interface(solid_mesh: SolidMesh, displacements, edges=None) -> InterfaceMesh:
    """Current-configuration segments of the coupling boundary edges.

    :param solid_mesh: the solid mesh.
    :param displacements: nodal displacements (n_nodes, 2) or flat.
    :param edges: boundary edge indices; defaults to all coupling edges.
    """
    u = np.asarray(displacements, dtype=float).reshape(-1, 2)
    if len(u) != solid_mesh.n_nodes:
        raise ConfigurationError(f"Displacement field has {len(u)} nodes, mesh has {solid_mesh.n_nodes}")
    if edges is None:
        edges = solid_mesh.coupling_edges()
    edges = np.asarray(edges, dtype=int)
    x = solid_mesh.nodes + u
    node_pairs = solid_mesh.boundary_nodes[edges]
    start = x[node_pairs[:, 0]]
    end = x[node_pairs[:, 1]]
    tangent = end - start
    length = np.linalg.norm(tangent, axis=1)
    degenerate = np.nonzero(length <= 0.0)[0]
    if len(degenerate):
        raise GeometryError("Zero-length interface segment",
                            element=int(solid_mesh.boundary_elements[edges[degenerate[0]]]))
    normals = np.column_stack([tangent[:, 1], -tangent[:, 0]]) / length[:, None]
    return InterfaceMesh(start=start, end=end, edges=edges,
                         bodies=solid_mesh.boundary_bodies[edges], normals=normals)


def winding_numbers(points, loop_coords):
    """Winding numbers of points with respect to a closed polygon loop."""
    points = np.atleast_2d(points)
    a = loop_coords
    b = np.roll(loop_coords, -1, axis=0)
    px = points[:, 0, None]
    py = points[:, 1, None]
    is_left = (b[None, :, 0] - a[None, :, 0]) * (py - a[None, :, 1]) \
        - (px - a[None, :, 0]) * (b[None, :, 1] - a[None, :, 1])
    upward = (a[None, :, 1] <= py) & (b[None, :, 1] > py) & (is_left > 0.0)
    downward = (a[None, :, 1] > py) & (b[None, :, 1] <= py) & (is_left < 0.0)
    return upward.sum(axis=1) - downward.sum(axis=1)


def read_solid_mesh(path: str, body_offset: int = 0) -> SolidMesh:
    """Read the ASCII solid mesh format (see doc/mesh_format.md)."""
    if not os.path.isfile(path):
        raise ConfigurationError(f"Solid mesh file not found: {path}")
    node_ids, coords = {}, []
    elements, bodies = [], []
    edge_sets = []
    section = None
    current = None
    with open(path, 'r') as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.split('#', 1)[0].strip()
            if not line:
                continue
            words = line.split()
            keyword = words[0].upper()
            try:
                if keyword in ('NODES', 'ELEMENTS', 'EDGESETS') and len(words) == 1:
                    section = keyword
                    continue
                if section == 'NODES':
                    node_ids[int(words[0])] = len(coords)
                    coords.append((float(words[1]), float(words[2])))
                elif section == 'ELEMENTS':
                    bodies.append(int(words[1]) + body_offset)
                    elements.append([node_ids[int(w)] for w in words[2:6]])
                elif section == 'EDGESETS' and keyword == 'SET':
                    current = EdgeSet(name=words[1], tag=words[2].lower(), edges=[])
                    edge_sets.append(current)
                elif section == 'EDGESETS' and current is not None:
                    current.edges.append((node_ids[int(words[0])], node_ids[int(words[1])]))
                else:
                    raise ValueError("unexpected line")
            except (ValueError, IndexError, KeyError) as e:
                raise ConfigurationError(f"Malformed solid mesh file {path}: {e}", line=lineno)
    for edge_set in edge_sets:
        edge_set.edges = np.array(edge_set.edges, dtype=int).reshape(-1, 2)
    logger.debug(f"Read solid mesh {path}: {len(coords)} nodes, {len(elements)} elements")
    return SolidMesh(coords, elements, bodies, edge_sets)


def write_solid_mesh(mesh: SolidMesh, path: str):
    """Write a mesh in the ASCII solid mesh format, ids starting at 1."""
    try:
        with open(path, 'w') as f:
            f.write("NODES\n")
            for k, (x, y) in enumerate(mesh.nodes):
                f.write(f"{k + 1} {float(x)!r} {float(y)!r}\n")
            f.write("ELEMENTS\n")
            for k, (element, body) in enumerate(zip(mesh.elements, mesh.bodies)):
                f.write(f"{k + 1} {body} " + " ".join(str(n + 1) for n in element) + "\n")
            f.write("EDGESETS\n")
            for edge_set in mesh.edge_sets.values():
                f.write(f"SET {edge_set.name} {edge_set.tag}\n")
                for a, b in edge_set.edges:
                    f.write(f"{a + 1} {b + 1}\n")
    except OSError as e:
        raise OutputError(f"Cannot write solid mesh ({e})", path=path)


def merge_solid_meshes(meshes: Sequence[Tuple[str, SolidMesh]]) -> SolidMesh:
    """Merge body meshes; edge sets are renamed '<prefix>.<name>'."""
    nodes, elements, bodies, edge_sets = [], [], [], []
    offset = 0
    for prefix, mesh in meshes:
        nodes.append(mesh.nodes)
        elements.append(mesh.elements + offset)
        bodies.append(mesh.bodies)
        for edge_set in mesh.edge_sets.values():
            edge_sets.append(EdgeSet(f"{prefix}.{edge_set.name}", edge_set.tag, edge_set.edges + offset))
        offset += mesh.n_nodes
    all_bodies = np.concatenate(bodies) if bodies else np.zeros(0, dtype=int)
    if len(meshes) > 1 and len(np.unique(np.concatenate([np.unique(m.bodies) for _, m in meshes]))) \
            != sum(len(np.unique(m.bodies)) for _, m in meshes):
        raise ConfigurationError("Merged solid meshes must have distinct body ids")
    return SolidMesh(np.vstack(nodes) if nodes else np.zeros((0, 2)),
                     np.vstack(elements) if elements else np.zeros((0, 4), dtype=int),
                     all_bodies, edge_sets)
