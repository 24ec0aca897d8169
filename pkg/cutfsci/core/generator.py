# -*- coding: utf-8 -*-
"""Structured solid mesh generators addressed by name from scenario files."""
import math

import numpy as np

from .base import BaseMeshGenerator
from .mesh import EDGE_TAGS, EdgeSet, SolidMesh
from ..exception import ConfigurationError

BLOCK_SIDES = ('bottom', 'right', 'top', 'left')


def parse_pair(text: str):
    values = [float(item) for item in str(text).split(',')]
    if len(values) != 2:
        raise ValueError(f"expected two comma-separated numbers, got '{text}'")
    return tuple(values)


def parse_edge_tags(text: str):
    """'bottom=coupling, top=neumann' -> dict; missing sides are 'none'."""
    tags = {side: 'none' for side in BLOCK_SIDES}
    for item in str(text).split(','):
        if not item.strip():
            continue
        side, tag = (word.strip() for word in item.split('='))
        if side not in BLOCK_SIDES or tag not in EDGE_TAGS:
            raise ValueError(f"invalid edge tag '{item.strip()}'")
        tags[side] = tag
    return tags


def format_edge_tags(tags) -> str:
    return ", ".join(f"{side}={tags[side]}" for side in BLOCK_SIDES)


def _block_mesh(x_nodes, y_nodes, body, tags):
    """Mesh from (ny+1, nx+1) node coordinate arrays, rows from bottom to top."""
    ny, nx = x_nodes.shape[0] - 1, x_nodes.shape[1] - 1
    nodes = np.column_stack([x_nodes.ravel(), y_nodes.ravel()])

    def node(i, j):
        return j * (nx + 1) + i

    ii, jj = np.meshgrid(np.arange(nx), np.arange(ny), indexing='xy')
    ii = ii.ravel()
    jj = jj.ravel()
    elements = np.column_stack([node(ii, jj), node(ii + 1, jj), node(ii + 1, jj + 1), node(ii, jj + 1)])

    row = np.arange(nx)
    col = np.arange(ny)
    side_edges = {
        'bottom': np.column_stack([node(row, 0), node(row + 1, 0)]),
        'right': np.column_stack([node(nx, col), node(nx, col + 1)]),
        'top': np.column_stack([node(row + 1, ny), node(row, ny)]),
        'left': np.column_stack([node(0, col + 1), node(0, col)]),
    }
    edge_sets = [EdgeSet(side, tags[side], side_edges[side]) for side in BLOCK_SIDES]
    return SolidMesh(nodes, elements, np.full(len(elements), body, dtype=int), edge_sets)


class RectangleMeshGenerator(BaseMeshGenerator):
    """Uniform nx x ny block over x_range x y_range."""
    __generator_type__ = 'rectangle'
    accepted_keys = {
        'x_range': parse_pair,
        'y_range': parse_pair,
        'nx': int,
        'ny': int,
        'edge_tags': parse_edge_tags,
    }

    def generate(self, body: int) -> SolidMesh:
        x0, x1 = self.params['x_range']
        y0, y1 = self.params['y_range']
        nx, ny = self.params['nx'], self.params['ny']
        if nx < 1 or ny < 1 or x1 <= x0 or y1 <= y0:
            raise ConfigurationError("rectangle needs positive counts and increasing ranges")
        xs = np.linspace(x0, x1, nx + 1)
        ys = np.linspace(y0, y1, ny + 1)
        x_nodes, y_nodes = np.meshgrid(xs, ys, indexing='xy')
        tags = self.params.get('edge_tags') or parse_edge_tags('')
        return _block_mesh(x_nodes, y_nodes, body, tags)


class ArcBlockMeshGenerator(BaseMeshGenerator):
    """Block between a circular-arc bottom y_b(x) = c_y - sqrt(r^2 - (x - c_x)^2) and a flat top."""
    __generator_type__ = 'arc_block'
    accepted_keys = {
        'x_range': parse_pair,
        'y_top': float,
        'arc_center': parse_pair,
        'arc_radius': float,
        'nx': int,
        'ny': int,
        'edge_tags': parse_edge_tags,
    }

    def generate(self, body: int) -> SolidMesh:
        x0, x1 = self.params['x_range']
        cx, cy = self.params['arc_center']
        radius = self.params['arc_radius']
        y_top = self.params['y_top']
        nx, ny = self.params['nx'], self.params['ny']
        if nx < 1 or ny < 1 or x1 <= x0:
            raise ConfigurationError("arc_block needs positive counts and an increasing x_range")
        if max(abs(x0 - cx), abs(x1 - cx)) >= radius:
            raise ConfigurationError("arc_block x_range must lie strictly within the arc radius")
        xs = np.linspace(x0, x1, nx + 1)
        y_bottom = np.array([cy - math.sqrt(radius ** 2 - (x - cx) ** 2) for x in xs])
        if np.any(y_bottom >= y_top):
            raise ConfigurationError("arc_block top must lie above the arc")
        s = np.linspace(0.0, 1.0, ny + 1)[:, None]
        x_nodes = np.broadcast_to(xs, (ny + 1, nx + 1)).copy()
        y_nodes = y_bottom[None, :] + s * (y_top - y_bottom[None, :])
        tags = self.params.get('edge_tags') or parse_edge_tags('')
        return _block_mesh(x_nodes, y_nodes, body, tags)


mesh_generators = {
    'rectangle': RectangleMeshGenerator,
    'arc_block': ArcBlockMeshGenerator,
}
