# -*- coding: utf-8 -*-
"""Quadrature rules and bilinear shape functions."""
import numpy as np

# Reference corners of the bilinear quadrilateral, counter-clockwise.
Q1_CORNERS = np.array([[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]])

# Local edges (a, b) of a counter-clockwise quadrilateral.
Q1_EDGES = np.array([[0, 1], [1, 2], [2, 3], [3, 0]])

# Symmetric triangle rules: (barycentric points, weights summing to one).
_TRIANGLE_RULES = {}


def _orbit(a, w):
    b = 1.0 - 2.0 * a
    points = [[a, a, b], [a, b, a], [b, a, a]]
    return points, [w] * 3


def _build_triangle_rules():
    _TRIANGLE_RULES[1] = (np.array([[1 / 3, 1 / 3, 1 / 3]]), np.array([1.0]))

    points, weights = _orbit(1 / 6, 1 / 3)
    _TRIANGLE_RULES[2] = (np.array(points), np.array(weights))

    p1, w1 = _orbit(0.445948490915965, 0.223381589678011)
    p2, w2 = _orbit(0.091576213509771, 0.109951743655322)
    _TRIANGLE_RULES[4] = (np.array(p1 + p2), np.array(w1 + w2))

    p1, w1 = _orbit(0.470142064105115, 0.132394152788506)
    p2, w2 = _orbit(0.101286507323456, 0.125939180544827)
    _TRIANGLE_RULES[5] = (np.array([[1 / 3, 1 / 3, 1 / 3]] + p1 + p2),
                          np.array([0.225] + w1 + w2))


_build_triangle_rules()


def triangle_rule(order: int):
    """Returns (barycentric points (n, 3), weights (n,)) exact for polynomials of `order`.

    Weights sum to one; multiply by the triangle area.
    """
    for available in sorted(_TRIANGLE_RULES):
        if available >= order:
            return _TRIANGLE_RULES[available]
    raise ValueError(f"No triangle rule of order {order}, maximum is {max(_TRIANGLE_RULES)}.")


def gauss_legendre(n_points: int):
    """Gauss-Legendre points and weights on [0, 1]."""
    if n_points < 1:
        raise ValueError("At least one Gauss point is required.")
    x, w = np.polynomial.legendre.leggauss(n_points)
    return 0.5 * (x + 1.0), 0.5 * w


def gauss_points_for_order(order: int) -> int:
    """Number of 1D Gauss points integrating polynomials of `order` exactly."""
    return max(1, (order + 2) // 2)


def quad_gauss_rule(n_points: int = 2):
    """Tensor Gauss rule on the reference square [-1, 1]^2."""
    x, w = np.polynomial.legendre.leggauss(n_points)
    xi, eta = np.meshgrid(x, x, indexing='xy')
    weights = np.outer(w, w)
    return np.column_stack([xi.ravel(), eta.ravel()]), weights.ravel()


def q1_shape(ref_points):
    """Bilinear shape functions and reference gradients.

    :param ref_points: array (..., 2) of reference coordinates.
    :return: N (..., 4) and dN/dxi (..., 4, 2).
    """
    ref_points = np.asarray(ref_points, dtype=float)
    xi = ref_points[..., 0, None]
    eta = ref_points[..., 1, None]
    cx = Q1_CORNERS[:, 0]
    cy = Q1_CORNERS[:, 1]
    n = 0.25 * (1.0 + cx * xi) * (1.0 + cy * eta)
    dn = np.stack([0.25 * cx * (1.0 + cy * eta),
                   0.25 * cy * (1.0 + cx * xi)], axis=-1)
    return n, dn


def edge_reference_points(local_edge, s):
    """Reference coordinates of parameter s in [0, 1] along a local edge."""
    s = np.asarray(s, dtype=float)
    a, b = Q1_EDGES[local_edge]
    start = Q1_CORNERS[a]
    end = Q1_CORNERS[b]
    return start + s[..., None] * (end - start)
