# -*- coding: utf-8 -*-
"""Intersection of the solid interface with the fixed fluid grid.

The physical fluid region is the grid box minus the union of the closed
boundary polygons of all fluid-cutting bodies. Interface segments are split
at grid lines and at crossings with other bodies, then sorted into the
fluid-structure part (FS), the closed-contact part (SC) and dry parts (DRY)
that never see fluid unknowns.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Sequence

import numpy as np
import shapely
from shapely.geometry.polygon import orient

from .mesh import FluidGrid, InterfaceMesh, SolidMesh, element_size, winding_numbers
from .quadrature import gauss_legendre, gauss_points_for_order, quad_gauss_rule, triangle_rule
from ..exception import GeometryError
from ..log import get_logger

logger = get_logger()

VOID = 0
FLUID = 1
CUT = 2

SIDE_FS = 'FS'
SIDE_SC = 'SC'
SIDE_DRY = 'DRY'


@dataclass
class CutClassification:
    labels: np.ndarray         # (n_elements,) VOID / FLUID / CUT
    areas: np.ndarray          # (n_elements,) physical area
    active_nodes: np.ndarray   # (n_nodes,) bool, node carries fluid unknowns
    polygons: Dict[int, List[np.ndarray]] = field(default_factory=dict)


@dataclass
class ResolvedInterface:
    """Interface sub-segments with their side."""
    start: np.ndarray     # (k, 2)
    end: np.ndarray       # (k, 2)
    parents: np.ndarray   # (k,) index into the InterfaceMesh
    t0: np.ndarray        # (k,) start parameter on the parent segment
    t1: np.ndarray        # (k,) end parameter on the parent segment
    sides: np.ndarray     # (k,) SIDE_FS / SIDE_SC / SIDE_DRY
    overlap: np.ndarray   # (k,) bool, inside another body
    islands: list = field(default_factory=list)

    def __len__(self):
        return len(self.parents)

    def subset(self, mask):
        return ResolvedInterface(self.start[mask], self.end[mask], self.parents[mask], self.t0[mask],
                                 self.t1[mask], self.sides[mask], self.overlap[mask], self.islands)


@dataclass
class GhostFaceSet:
    faces: np.ndarray   # indices into FluidGrid.interior_faces()
    minus: np.ndarray
    plus: np.ndarray
    axis: np.ndarray
    start: np.ndarray
    end: np.ndarray

    def __len__(self):
        return len(self.faces)


@dataclass
class VolumeQuadrature:
    """Flat volume quadrature over all active fluid elements."""
    elements: np.ndarray
    points: np.ndarray
    weights: np.ndarray


@dataclass
class InterfaceQuadrature:
    points: np.ndarray
    weights: np.ndarray
    normals: np.ndarray
    parents: np.ndarray      # index into the InterfaceMesh
    params: np.ndarray       # parameter on the parent segment
    sub_segments: np.ndarray  # index into the ResolvedInterface


@dataclass
class CutState:
    grid: FluidGrid
    h: float
    tol: float
    classification: CutClassification
    resolved: ResolvedInterface
    sub_elements: np.ndarray      # (k,) grid element of each FS sub-segment, -1 otherwise
    ghost_faces: GhostFaceSet
    volume: VolumeQuadrature
    fluid_region: object
    boundary_portions: Dict[str, tuple]
    retained_elements: np.ndarray

    @property
    def labels(self):
        return self.classification.labels

    @property
    def active_nodes(self):
        return self.classification.active_nodes


def polygon_area(poly) -> float:
    """Signed shoelace area, positive for counter-clockwise vertices."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) < 3:
        return 0.0
    x = poly[:, 0]
    y = poly[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))


def clean_polygon(poly, eps=1e-12):
    """Drop repeated and collinear vertices; empty array if degenerate."""
    poly = np.asarray(poly, dtype=float)
    if len(poly) and np.linalg.norm(poly[0] - poly[-1]) <= eps:
        poly = poly[:-1]
    cleaned = [poly[0]] if len(poly) else []
    for p in poly[1:]:
        if np.linalg.norm(p - cleaned[-1]) > eps:
            cleaned.append(p)
    if len(cleaned) > 1 and np.linalg.norm(cleaned[0] - cleaned[-1]) <= eps:
        cleaned.pop()
    changed = True
    while changed and len(cleaned) >= 3:
        changed = False
        for k in range(len(cleaned)):
            a, b, c = cleaned[k - 1], cleaned[k], cleaned[(k + 1) % len(cleaned)]
            cross = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if abs(cross) <= eps * max(np.linalg.norm(c - a), eps):
                cleaned.pop(k)
                changed = True
                break
    if len(cleaned) < 3:
        return np.zeros((0, 2))
    return np.array(cleaned)


def is_convex(poly, eps=1e-14) -> bool:
    poly = np.asarray(poly)
    edges = np.roll(poly, -1, axis=0) - poly
    cross = edges[:, 0] * np.roll(edges, -1, axis=0)[:, 1] - edges[:, 1] * np.roll(edges, -1, axis=0)[:, 0]
    return bool(np.all(cross >= -eps) or np.all(cross <= eps))


def ear_clip(poly) -> List[tuple]:
    """Triangulate a simple counter-clockwise polygon into index triples."""
    poly = np.asarray(poly)
    remaining = list(range(len(poly)))
    triangles = []

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    guard = 0
    while len(remaining) > 3:
        guard += 1
        if guard > 10 * len(poly) ** 2:
            raise GeometryError("Ear clipping failed on a non-simple polygon")
        for k in range(len(remaining)):
            i_prev, i, i_next = remaining[k - 1], remaining[k], remaining[(k + 1) % len(remaining)]
            a, b, c = poly[i_prev], poly[i], poly[i_next]
            if cross(a, b, c) <= 0.0:
                continue
            others = [j for j in remaining if j not in (i_prev, i, i_next)]
            inside = False
            for j in others:
                p = poly[j]
                if cross(a, b, p) >= 0.0 and cross(b, c, p) >= 0.0 and cross(c, a, p) >= 0.0:
                    inside = True
                    break
            if not inside:
                triangles.append((i_prev, i, i_next))
                remaining.pop(k)
                break
        else:
            raise GeometryError("Ear clipping found no ear, polygon is not simple")
    triangles.append(tuple(remaining))
    return triangles


def volume_quadrature(polygon, order: int):
    """Quadrature points and weights covering a simple CCW polygon.

    Convex polygons are fanned from the centroid, others ear-clipped.
    """
    polygon = np.asarray(polygon, dtype=float)
    if not shapely.Polygon(polygon).is_valid:
        raise GeometryError("Self-intersecting polygon in volume quadrature")
    bary, w_ref = triangle_rule(order)
    if is_convex(polygon):
        centroid = polygon.mean(axis=0)
        tri = np.stack([np.broadcast_to(centroid, polygon.shape), polygon, np.roll(polygon, -1, axis=0)], axis=1)
    else:
        tri = np.array([[polygon[i], polygon[j], polygon[k]] for i, j, k in ear_clip(polygon)])
    area = 0.5 * ((tri[:, 1, 0] - tri[:, 0, 0]) * (tri[:, 2, 1] - tri[:, 0, 1])
                  - (tri[:, 1, 1] - tri[:, 0, 1]) * (tri[:, 2, 0] - tri[:, 0, 0]))
    keep = area > 0.0
    tri, area = tri[keep], area[keep]
    points = np.einsum('qk,tkd->tqd', bary, tri).reshape(-1, 2)
    weights = (area[:, None] * w_ref[None, :]).ravel()
    return points, weights


def interface_quadrature(start, end, order: int, multipliers=None):
    """Gauss points on straight sub-segments.

    :param start: (k, 2) sub-segment starts.
    :param end: (k, 2) sub-segment ends.
    :param order: polynomial order integrated exactly.
    :param multipliers: optional (k,) factor on the number of points.
    :return: points, weights, local parameter in [0, 1], sub-segment index.
    """
    start = np.asarray(start, dtype=float).reshape(-1, 2)
    end = np.asarray(end, dtype=float).reshape(-1, 2)
    base = gauss_points_for_order(order)
    if multipliers is None:
        multipliers = np.ones(len(start), dtype=int)
    points, weights, params, owners = [], [], [], []
    for k in range(len(start)):
        length = np.linalg.norm(end[k] - start[k])
        if length <= 0.0:
            continue
        s, w = gauss_legendre(base * int(multipliers[k]))
        points.append(start[k] + s[:, None] * (end[k] - start[k]))
        weights.append(w * length)
        params.append(s)
        owners.append(np.full(len(s), k, dtype=int))
    if not points:
        return np.zeros((0, 2)), np.zeros(0), np.zeros(0), np.zeros(0, dtype=int)
    return np.vstack(points), np.concatenate(weights), np.concatenate(params), np.concatenate(owners)


def body_polygons(solid_mesh: SolidMesh, positions, bodies: Sequence[int]):
    """Closed current-configuration polygons of the given bodies."""
    polygons = {}
    loops = {}
    for body in bodies:
        body_loops = [positions[loop] for loop in solid_mesh.boundary_loops(body)]
        loops[body] = body_loops
        shells = [loop for loop in body_loops if polygon_area(loop) > 0.0]
        holes = [loop for loop in body_loops if polygon_area(loop) < 0.0]
        if len(shells) != 1:
            raise GeometryError(f"Body {body} must have exactly one outer boundary, found {len(shells)}")
        polygon = shapely.Polygon(shells[0], holes)
        if not polygon.is_valid:
            logger.warning(f"Boundary polygon of body {body} is self-intersecting, repairing it")
            polygon = shapely.make_valid(polygon)
        polygons[body] = polygon
    return polygons, loops


def _point_segment_distance(points, a, b):
    """Distance of each point to the closest of the segments a-b."""
    d = b - a
    dd = np.maximum(np.einsum('ij,ij->i', d, d), 1e-300)
    rel = points[:, None, :] - a[None, :, :]
    t = np.clip(np.einsum('pij,ij->pi', rel, d) / dd[None, :], 0.0, 1.0)
    closest = a[None, :, :] + t[..., None] * d[None, :, :]
    return np.min(np.linalg.norm(points[:, None, :] - closest, axis=2), axis=1)


def _split_parameters(a, b, grid: FluidGrid, other_edges, tol):
    """Parameters in (0, 1) where segment a-b crosses grid lines or other bodies' edges."""
    cuts = [0.0, 1.0]
    d = b - a
    length = np.linalg.norm(d)
    for axis, h, n in ((0, grid.hx, grid.nx), (1, grid.hy, grid.ny)):
        if abs(d[axis]) > 0.0:
            lines = grid.origin[axis] + h * np.arange(n + 1)
            t = (lines - a[axis]) / d[axis]
            cuts.extend(t[(t > 0.0) & (t < 1.0)].tolist())
    if len(other_edges[0]):
        p, q = other_edges
        e = q - p
        denom = d[0] * e[:, 1] - d[1] * e[:, 0]
        ok = np.abs(denom) > 1e-14 * length * np.linalg.norm(e, axis=1)
        rel = p - a
        t = np.where(ok, (rel[:, 0] * e[:, 1] - rel[:, 1] * e[:, 0]) / np.where(ok, denom, 1.0), -1.0)
        s = np.where(ok, (rel[:, 0] * d[1] - rel[:, 1] * d[0]) / np.where(ok, denom, 1.0), -1.0)
        hit = ok & (t > 0.0) & (t < 1.0) & (s >= 0.0) & (s <= 1.0)
        cuts.extend(t[hit].tolist())
    cuts = np.unique(np.array(cuts))
    keep = np.concatenate([[True], np.diff(cuts) * length > tol])
    cuts = cuts[keep]
    cuts[-1] = 1.0
    return cuts


def resolve_contact_overlap(interface: InterfaceMesh, loops, grid: FluidGrid, tol: float) -> ResolvedInterface:
    """Stage 1: split segments and flag the parts lying inside another body.

    :param interface: current interface segments.
    :param loops: body id -> list of closed boundary loops (current coordinates).
    :param grid: the fluid grid, whose lines also split segments.
    :param tol: absolute geometric tolerance.
    """
    def loop_edges(body_loops):
        if not body_loops:
            return np.zeros((0, 2)), np.zeros((0, 2))
        return (np.vstack(body_loops), np.vstack([np.roll(loop, -1, axis=0) for loop in body_loops]))

    edges_of = {body: loop_edges(body_loops) for body, body_loops in loops.items()}
    start, end, parents, t0s, t1s, overlap = [], [], [], [], [], []
    for k in range(len(interface)):
        a, b = interface.start[k], interface.end[k]
        body = int(interface.bodies[k])
        others = [other for other in loops if other != body]
        if others:
            other_edges = (np.vstack([edges_of[o][0] for o in others]), np.vstack([edges_of[o][1] for o in others]))
        else:
            other_edges = (np.zeros((0, 2)), np.zeros((0, 2)))
        cuts = _split_parameters(a, b, grid, other_edges, tol)
        t0, t1 = cuts[:-1], cuts[1:]
        mids = a + 0.5 * (t0 + t1)[:, None] * (b - a)
        inside = np.zeros(len(mids), dtype=bool)
        for other in others:
            winding = sum(winding_numbers(mids, loop) for loop in loops[other])
            near = _point_segment_distance(mids, *edges_of[other]) <= tol
            inside |= (winding != 0) & ~near
        start.append(a + t0[:, None] * (b - a))
        end.append(a + t1[:, None] * (b - a))
        parents.append(np.full(len(t0), k, dtype=int))
        t0s.append(t0)
        t1s.append(t1)
        overlap.append(inside)
    if not parents:
        empty = np.zeros((0, 2))
        return ResolvedInterface(empty, empty, np.zeros(0, dtype=int), np.zeros(0), np.zeros(0),
                                 np.zeros(0, dtype=object), np.zeros(0, dtype=bool))
    overlap = np.concatenate(overlap)
    sides = np.where(overlap, SIDE_SC, SIDE_FS).astype(object)
    return ResolvedInterface(np.vstack(start), np.vstack(end), np.concatenate(parents), np.concatenate(t0s),
                             np.concatenate(t1s), sides, overlap)


def candidate_fluid_region(grid: FluidGrid, polygons: Dict[int, object]):
    region = shapely.box(*grid.bounds)
    if polygons:
        region = region.difference(shapely.unary_union(list(polygons.values())))
    return region


def remove_islands(region, resolved: ResolvedInterface, interface: InterfaceMesh, grid: FluidGrid,
                   cutting_bodies, island_ratio: float, tol: float):
    """Stage 2: drop small fluid components and assign the remaining sides.

    :return: (kept fluid region, resolved interface with final sides).
    """
    h = element_size(grid)
    parts = [part for part in shapely.get_parts(region) if part.area > 0.0]
    kept, islands = [], []
    for part in parts:
        x0, y0, x1, y1 = part.bounds
        if max(x1 - x0, y1 - y0) < island_ratio * h:
            islands.append(part)
        else:
            kept.append(part)
    if islands:
        logger.debug(f"Removed {len(islands)} fluid island(s) of total area {sum(p.area for p in islands):.3e}")
    fluid = shapely.unary_union(kept) if kept else shapely.Polygon()

    sides = resolved.sides.copy()
    if len(resolved):
        mids = 0.5 * (resolved.start + resolved.end)
        bodies = interface.bodies[resolved.parents]
        cutting = np.isin(bodies, list(cutting_bodies))
        in_grid = grid.contains(mids, tol=-tol)
        mid_points = shapely.points(mids)
        touches_fluid = shapely.distance(fluid, mid_points) <= tol if kept else np.zeros(len(mids), dtype=bool)
        for k in range(len(sides)):
            if resolved.overlap[k]:
                sides[k] = SIDE_SC
            elif not cutting[k] or not in_grid[k]:
                sides[k] = SIDE_DRY
            elif touches_fluid[k]:
                sides[k] = SIDE_FS
            else:
                sides[k] = SIDE_SC
    result = ResolvedInterface(resolved.start, resolved.end, resolved.parents, resolved.t0, resolved.t1,
                               sides, resolved.overlap, islands)
    return fluid, result


def _snap_to_box(poly, box, tol):
    poly = poly.copy()
    x0, y0, x1, y1 = box
    for axis, lo, hi in ((0, x0, x1), (1, y0, y1)):
        poly[np.abs(poly[:, axis] - lo) <= tol, axis] = lo
        poly[np.abs(poly[:, axis] - hi) <= tol, axis] = hi
    return poly


def _edge_distances(poly, box):
    x0, y0, x1, y1 = box
    return np.abs(np.column_stack([poly[:, 0] - x0, poly[:, 0] - x1, poly[:, 1] - y0, poly[:, 1] - y1]))


def clip_element(box, region, tol: float = 0.0, element: int = None) -> List[np.ndarray]:
    """Physical parts of an element box inside the fluid region.

    A vertex closer than `tol` to an element edge without lying on it makes
    the classification ambiguous and raises a GeometryError.

    :param box: (x0, y0, x1, y1).
    :param region: shapely geometry of the fluid region.
    :return: list of CCW vertex arrays, empty if nothing is left.
    """
    element_box = shapely.box(*box)
    clipped = element_box.intersection(region)
    noise = max(1e-3 * tol, 1e-13 * max(1.0, float(np.max(np.abs(box)))))
    polygons = []
    for part in shapely.get_parts(clipped):
        if part.geom_type != 'Polygon' or part.area <= 1e-12 * element_box.area:
            continue
        if len(part.interiors):
            raise GeometryError("Solid body enclosed within a single fluid element is not supported", element)
        part = orient(part, sign=1.0)
        raw = np.array(part.exterior.coords)
        if tol > noise:
            distances = _edge_distances(raw, box)
            if np.any((distances > noise) & (distances <= tol)):
                raise GeometryError("Interface runs along an element edge within the geometric tolerance", element)
        poly = clean_polygon(_snap_to_box(raw, box, tol), eps=max(tol, 1e-15))
        if len(poly):
            polygons.append(poly)
    return polygons


def classify_elements(grid: FluidGrid, region, tol: float = 0.0) -> CutClassification:
    """Label elements FLUID / VOID / CUT by their physical area.

    :raise GeometryError: if the interface runs within `tol` of an edge of a cut element.
    """
    boxes = shapely.box(grid.element_boxes[:, 0], grid.element_boxes[:, 1],
                        grid.element_boxes[:, 2], grid.element_boxes[:, 3])
    full = grid.hx * grid.hy
    areas = shapely.area(shapely.intersection(boxes, region))
    labels = np.full(grid.n_elements, CUT, dtype=int)
    labels[areas <= 1e-12 * full] = VOID
    labels[areas >= (1.0 - 1e-12) * full] = FLUID
    polygons = {}
    for e in np.nonzero(labels == CUT)[0]:
        parts = clip_element(grid.element_boxes[e], region, tol, element=int(e))
        if not parts:
            labels[e] = VOID
            continue
        polygons[int(e)] = parts
    areas = np.where(labels == VOID, 0.0, areas)
    active = np.zeros(grid.n_nodes, dtype=bool)
    active[grid.element_nodes[labels != VOID].ravel()] = True
    return CutClassification(labels=labels, areas=areas, active_nodes=active, polygons=polygons)


def select_ghost_faces(grid: FluidGrid, labels, retained=None) -> GhostFaceSet:
    """Interior faces between two active elements of which one is CUT.

    Retained elements (kept alive by solution-space growth) count as active
    and as cut.
    """
    minus, plus, axis, start, end = grid.interior_faces()
    active = labels != VOID
    cut = labels == CUT
    if retained is not None:
        active = active | retained
        cut = cut | retained
    mask = active[minus] & active[plus] & (cut[minus] | cut[plus])
    faces = np.nonzero(mask)[0]
    return GhostFaceSet(faces=faces, minus=minus[faces], plus=plus[faces], axis=axis[faces],
                        start=start[faces], end=end[faces])


def build_volume_quadrature(grid: FluidGrid, classification: CutClassification, order: int) -> VolumeQuadrature:
    ref, w_ref = quad_gauss_rule(2)
    fluid = np.nonzero(classification.labels == FLUID)[0]
    boxes = grid.element_boxes[fluid]
    centers = 0.5 * (boxes[:, :2] + boxes[:, 2:])
    half = np.array([0.5 * grid.hx, 0.5 * grid.hy])
    points = [(centers[:, None, :] + ref[None, :, :] * half).reshape(-1, 2)]
    weights = [np.tile(w_ref * half[0] * half[1], len(fluid))]
    elements = [np.repeat(fluid, len(w_ref))]
    for e in sorted(classification.polygons):
        for poly in classification.polygons[e]:
            p, w = volume_quadrature(poly, order)
            points.append(p)
            weights.append(w)
            elements.append(np.full(len(w), e, dtype=int))
    elements = np.concatenate(elements)
    order_index = np.argsort(elements, kind='stable')
    return VolumeQuadrature(elements=elements[order_index], points=np.vstack(points)[order_index],
                            weights=np.concatenate(weights)[order_index])


def boundary_portions(grid: FluidGrid, region):
    """Physical parts of each grid side: side -> (elements, starts, ends)."""
    portions = {}
    for side in ('bottom', 'right', 'top', 'left'):
        elements, starts, ends = grid.side_edges(side)
        lines = shapely.linestrings(np.stack([starts, ends], axis=1))
        clipped = shapely.intersection(lines, region)
        out_e, out_a, out_b = [], [], []
        for e, geometry in zip(elements, clipped):
            for part in shapely.get_parts(geometry):
                if part.geom_type != 'LineString' or part.length <= 0.0:
                    continue
                coords = np.array(part.coords)
                for a, b in zip(coords[:-1], coords[1:]):
                    out_e.append(e)
                    out_a.append(a)
                    out_b.append(b)
        portions[side] = (np.array(out_e, dtype=int), np.array(out_a).reshape(-1, 2), np.array(out_b).reshape(-1, 2))
    return portions


def locate_sub_segments(grid: FluidGrid, resolved: ResolvedInterface, classification: CutClassification, tol):
    """Grid element of each FS sub-segment: the containing element with the largest physical area."""
    elements = np.full(len(resolved), -1, dtype=int)
    for k in np.nonzero(resolved.sides == SIDE_FS)[0]:
        mid = 0.5 * (resolved.start[k] + resolved.end[k])
        boxes = grid.element_boxes
        inside = np.nonzero((boxes[:, 0] - tol <= mid[0]) & (mid[0] <= boxes[:, 2] + tol)
                            & (boxes[:, 1] - tol <= mid[1]) & (mid[1] <= boxes[:, 3] + tol))[0]
        if len(inside) == 0:
            continue
        best = inside[np.argmax(classification.areas[inside])]
        if classification.areas[best] <= 0.0:
            raise GeometryError("Fluid-structure interface borders no active fluid element", element=int(best))
        elements[k] = best
    return elements


def build_cut_state(grid: FluidGrid, solid_mesh: SolidMesh, displacements, interface: InterfaceMesh,
                    cutting_bodies, island_ratio: float = 2.0, tolerance_factor: float = 1e-10,
                    volume_order: int = 4, retained_elements=None) -> CutState:
    """Intersect the current interface with the grid.

    :param grid: fixed fluid grid.
    :param solid_mesh: merged solid mesh.
    :param displacements: (n_nodes, 2) current solid displacements.
    :param interface: coupling segments in the current configuration.
    :param cutting_bodies: ids of bodies that displace fluid.
    :param retained_elements: optional mask of elements kept active by solution-space growth.
    """
    h = element_size(grid)
    tol = tolerance_factor * h
    positions = solid_mesh.nodes + np.asarray(displacements).reshape(-1, 2)
    all_bodies = [int(b) for b in solid_mesh.body_ids]
    polygons, loops = body_polygons(solid_mesh, positions, all_bodies)
    cutting_polygons = {body: polygons[body] for body in cutting_bodies}

    stage_one = resolve_contact_overlap(interface, loops, grid, tol)
    region = candidate_fluid_region(grid, cutting_polygons)
    fluid, resolved = remove_islands(region, stage_one, interface, grid, cutting_bodies, island_ratio, tol)

    classification = classify_elements(grid, fluid, tol)
    if retained_elements is None:
        retained_elements = np.zeros(grid.n_elements, dtype=bool)
    retained_elements = retained_elements & (classification.labels == VOID)
    if np.any(retained_elements):
        classification.active_nodes[grid.element_nodes[retained_elements].ravel()] = True
    sub_elements = locate_sub_segments(grid, resolved, classification, tol)
    ghost = select_ghost_faces(grid, classification.labels, retained_elements)
    volume = build_volume_quadrature(grid, classification, volume_order)
    portions = boundary_portions(grid, fluid)
    counts = {side: int(np.sum(resolved.sides == side)) for side in (SIDE_FS, SIDE_SC, SIDE_DRY)}
    logger.debug(f"Cut state: {int(np.sum(classification.labels == CUT))} cut, "
                 f"{int(np.sum(classification.labels == FLUID))} fluid elements, "
                 f"{len(ghost)} ghost faces, sub-segments {counts}")
    return CutState(grid=grid, h=h, tol=tol, classification=classification, resolved=resolved,
                    sub_elements=sub_elements, ghost_faces=ghost, volume=volume, fluid_region=fluid,
                    boundary_portions=portions, retained_elements=retained_elements)


def dry_cut_state(interface: InterfaceMesh, h: float = None) -> CutState:
    """Cut state of a problem without fluid: every interface segment is dry.

    :param h: reference length of the interface, the mean segment length by default.
    """
    k = len(interface)
    if h is None:
        h = float(np.mean(interface.lengths)) if k else 1.0
    resolved = ResolvedInterface(start=interface.start.copy(), end=interface.end.copy(),
                                 parents=np.arange(k), t0=np.zeros(k), t1=np.ones(k),
                                 sides=np.full(k, SIDE_DRY, dtype=object), overlap=np.zeros(k, dtype=bool))
    return CutState(grid=None, h=h, tol=1e-10 * h, classification=None, resolved=resolved,
                    sub_elements=np.full(k, -1, dtype=int), ghost_faces=None, volume=None, fluid_region=None,
                    boundary_portions={}, retained_elements=np.zeros(0, dtype=bool))
