# -*- coding: utf-8 -*-
"""Ordered accumulation of residual vectors and sparse tangents."""
import numpy as np
import scipy.sparse as sp


class SystemAccumulator(object):
    """Collects element and sample contributions into one residual and one COO tangent.

    Contributions are summed in call order, so a fixed assembly order gives
    bitwise-identical results. Negative dof indices (inactive fluid nodes)
    are dropped.
    """

    def __init__(self, n_dofs: int):
        self.n_dofs = n_dofs
        self.residual = np.zeros(n_dofs)
        self._rows = []
        self._cols = []
        self._vals = []
        self.groups = {}

    def add_residual(self, dofs, values, group: str = None):
        dofs = np.asarray(dofs).ravel()
        values = np.asarray(values, dtype=float).ravel()
        keep = dofs >= 0
        np.add.at(self.residual, dofs[keep], values[keep])
        if group is not None:
            target = self.groups.setdefault(group, np.zeros(self.n_dofs))
            np.add.at(target, dofs[keep], values[keep])

    def add_matrix(self, row_dofs, col_dofs, values):
        """Add blocks values[k, i, j] at (row_dofs[k, i], col_dofs[k, j])."""
        row_dofs = np.asarray(row_dofs)
        col_dofs = np.asarray(col_dofs)
        values = np.asarray(values, dtype=float)
        rows = np.broadcast_to(row_dofs[:, :, None], values.shape).ravel()
        cols = np.broadcast_to(col_dofs[:, None, :], values.shape).ravel()
        vals = values.ravel()
        keep = (rows >= 0) & (cols >= 0) & (vals != 0.0)
        self._rows.append(rows[keep])
        self._cols.append(cols[keep])
        self._vals.append(vals[keep])

    def matrix(self) -> sp.csr_matrix:
        if self._rows:
            rows = np.concatenate(self._rows)
            cols = np.concatenate(self._cols)
            vals = np.concatenate(self._vals)
        else:
            rows = cols = np.zeros(0, dtype=int)
            vals = np.zeros(0)
        coo = sp.coo_matrix((vals, (rows, cols)), shape=(self.n_dofs, self.n_dofs))
        return coo.tocsr()
