# -*- coding: utf-8 -*-
"""Field and table output: VTK legacy ASCII through meshio, CSV tables through tablib."""
import os
from collections import defaultdict

import meshio
import numpy as np
import tablib

from .coupling import CASES
from .postproc import CASE_COLUMNS, TIMESERIES_COLUMNS, TimeSeriesRecord
from ..config import get_config
from ..exception import OutputError
from ..log import get_logger

logger = get_logger()
configs = get_config()

CSV_VERSION = configs['output'].getint('csv_version')
FLOAT_FORMAT = configs['output'].get('float_format', '%.10e')
INTERFACE_COLUMNS = ('x', 'y', 'side', 'case', 'gap', 'indicator', 'slip_length', 'fluid_branch', 'solid_stress')
# Stand-in for an infinite gap in VTK files.
NO_GAP = 1e30


def _pad(points):
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    return np.column_stack([points, np.zeros(len(points))])


def _format(value):
    if isinstance(value, (float, np.floating)):
        return FLOAT_FORMAT % value
    if isinstance(value, np.integer):
        return int(value)
    return value


def _write_mesh(path: str, mesh: meshio.Mesh):
    try:
        meshio.write(path, mesh, file_format="vtk", binary=False)
    except OSError as e:
        raise OutputError(f"Cannot write VTK file ({e})", path=path)
    logger.debug(f"Wrote {path}")
    return path


def field_path(directory: str, prefix: str, name: str, step: int) -> str:
    return os.path.join(directory, f"{prefix}_{name}_{step:06d}.vtk")


def _polygon_cells(polygons):
    """Group polygons by vertex count into meshio cell blocks."""
    points, blocks = [], defaultdict(list)
    for poly in polygons:
        start = len(points)
        points.extend(poly)
        blocks[len(poly)].append(np.arange(start, start + len(poly)))
    names = {3: 'triangle', 4: 'quad'}
    cells = [(names.get(count, 'polygon'), np.array(rows)) for count, rows in sorted(blocks.items())]
    return np.array(points).reshape(-1, 2), cells


def solid_mesh_data(mesh, state) -> meshio.Mesh:
    return meshio.Mesh(_pad(mesh.nodes), [('quad', mesh.elements)],
                       point_data={'displacement': _pad(state.solid.u), 'velocity': _pad(state.solid.velocity)},
                       cell_data={'body': [mesh.bodies.astype(float)]})


def fluid_mesh_data(grid, state, cut_state) -> meshio.Mesh:
    if cut_state is not None and cut_state.classification is not None:
        labels = cut_state.labels.astype(float)
    else:
        labels = np.zeros(grid.n_elements)
    return meshio.Mesh(_pad(grid.node_coords), [('quad', grid.element_nodes)],
                       point_data={'velocity': _pad(state.fluid.v), 'pressure': np.asarray(state.fluid.p, float)},
                       cell_data={'classification': [labels]})


def cut_mesh_data(cut_state) -> meshio.Mesh:
    """Clipped polygons of the cut elements."""
    polygons, owners = [], []
    if cut_state is not None and cut_state.classification is not None:
        for element, parts in sorted(cut_state.classification.polygons.items()):
            for poly in parts:
                polygons.append(np.asarray(poly))
                owners.append(element)
    points, cells = _polygon_cells(polygons)
    owner_blocks = []
    by_count = defaultdict(list)
    for poly, owner in zip(polygons, owners):
        by_count[len(poly)].append(owner)
    for count in sorted(by_count):
        owner_blocks.append(np.array(by_count[count], dtype=float))
    cell_data = {'element': owner_blocks} if cells else {}
    return meshio.Mesh(_pad(points), cells, cell_data=cell_data)


def interface_mesh_data(samples, evaluation) -> meshio.Mesh:
    """Interface samples as vertices with gap, case indicator and case number."""
    k = len(samples)
    if evaluation is not None and k:
        gap = np.where(evaluation.gap_valid, evaluation.gap.value, NO_GAP)
        indicator = np.asarray(evaluation.indicator, dtype=float)
        case = np.array([CASES.index(c) + 1 if c in CASES else 0 for c in evaluation.cases], dtype=float)
    else:
        gap, indicator, case = np.full(k, NO_GAP), np.zeros(k), np.zeros(k)
    cells = [('vertex', np.arange(k).reshape(-1, 1))] if k else []
    positions = samples.positions if k else np.zeros((0, 2))
    return meshio.Mesh(_pad(positions), cells,
                       point_data={'gap': gap, 'indicator': indicator, 'case': case})


def export_fields(directory: str, prefix: str, step: int, problem, state, snapshot=None, evaluation=None,
                  debug_cut: bool = False):
    """Write the solid, fluid and interface VTK files of one step; the cut polygons on request.

    :return: list of written paths.
    """
    os.makedirs(directory, exist_ok=True)
    paths = [_write_mesh(field_path(directory, prefix, 'solid', step), solid_mesh_data(problem.mesh, state))]
    cut_state = snapshot.cut_state if snapshot is not None else None
    if problem.has_fluid:
        paths.append(_write_mesh(field_path(directory, prefix, 'fluid', step),
                                 fluid_mesh_data(problem.grid, state, cut_state)))
        if debug_cut:
            paths.append(_write_mesh(field_path(directory, prefix, 'cut', step), cut_mesh_data(cut_state)))
    if snapshot is not None:
        paths.append(_write_mesh(field_path(directory, prefix, 'interface', step),
                                 interface_mesh_data(snapshot.samples, evaluation)))
    return paths


class TimeSeriesWriter(object):
    """One CSV row per converged step with a fixed column order."""

    def __init__(self, path: str):
        self.path = path
        self.dataset = tablib.Dataset(headers=list(TIMESERIES_COLUMNS + CASE_COLUMNS))

    def __len__(self):
        return len(self.dataset)

    def append(self, record: TimeSeriesRecord):
        self.dataset.append([_format(value) for value in record.row()])

    def write(self):
        directory = os.path.dirname(self.path)
        try:
            if directory:
                os.makedirs(directory, exist_ok=True)
            with open(self.path, 'w', newline='') as f:
                f.write(self.dataset.export('csv'))
        except OSError as e:
            raise OutputError(f"Cannot write time series ({e})", path=self.path)
        return self.path


def timeseries_path(directory: str, prefix: str) -> str:
    return os.path.join(directory, f"{prefix}_timeseries_v{CSV_VERSION}.csv")


def write_interface_debug(path: str, rows):
    """Per-sample interface table of one step."""
    dataset = tablib.Dataset(headers=list(INTERFACE_COLUMNS))
    for row in rows:
        dataset.append([_format(value) for value in row])
    try:
        with open(path, 'w', newline='') as f:
            f.write(dataset.export('csv'))
    except OSError as e:
        raise OutputError(f"Cannot write interface table ({e})", path=path)
    return path


def summary_table(rows, headers) -> str:
    """psql-formatted table for the console."""
    dataset = tablib.Dataset(headers=list(headers))
    for row in rows:
        dataset.append([_format(value) for value in row])
    return dataset.export('cli', tablefmt='psql')
