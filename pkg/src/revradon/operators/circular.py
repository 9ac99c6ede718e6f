"""Circular-mean transform on a planar grid and its matched adjoint."""
from __future__ import annotations

import functools

import numpy as np
import scipy.sparse as sp

from ..errors import ConfigurationError, DomainError

MIN_ANGLES = 64


def _angle_count(t, dx):
    n = max(MIN_ANGLES, int(np.ceil(2.0 * np.pi * t / dx)))
    # multiple of 4 keeps the sample set invariant under quarter turns
    return 4 * ((n + 3) // 4)


def bilinear_weights(p1, p2, x):
    """Rows/weights of bilinear interpolation at points ``(p1, p2)``.

    Returns ``(point_index, flat_node_index, weight)`` for all points inside
    the node square ``[x[0], x[-1]]**2``; points outside are dropped.
    """
    n = x.size
    dx = x[1] - x[0]
    u = (p1 - x[0]) / dx
    v = (p2 - x[0]) / dx
    inside = (u >= 0) & (u <= n - 1) & (v >= 0) & (v <= n - 1)
    pts = np.nonzero(inside)[0]
    u, v = u[inside], v[inside]
    i = np.minimum(np.floor(u).astype(np.int64), n - 2)
    j = np.minimum(np.floor(v).astype(np.int64), n - 2)
    fu, fv = u - i, v - j
    rows = np.repeat(pts, 4)
    cols = np.stack([i * n + j, (i + 1) * n + j, i * n + j + 1, (i + 1) * n + j + 1], axis=1).ravel()
    w = np.stack([(1 - fu) * (1 - fv), fu * (1 - fv), (1 - fu) * fv, fu * fv], axis=1).ravel()
    return rows, cols, w


class CircularMeanOperator:
    """Discrete map ``slice(x1, x2) -> t * integral over circle(center_j, t_i)``.

    Circle centers are ``radius * (cos theta_j, sin theta_j)``.  Each circle
    is sampled at ``max(64, ceil(2 pi t / dx))`` equispaced absolute angles
    (rounded up to a multiple of 4) with bilinear interpolation; samples
    outside the grid read zero.  The matrix is real and stored sparse, so
    :meth:`adjoint` is its exact transpose.
    """

    def __init__(self, x, t, theta, radius=1.0):
        self.x = np.asarray(x, dtype=float)
        self.t = np.asarray(t, dtype=float)
        self.theta = np.asarray(theta, dtype=float)
        self.radius = float(radius)
        if np.any(self.t <= 0):
            raise DomainError("circle radii must be positive")
        if self.x.size < 2:
            raise ConfigurationError("need at least two grid nodes per axis")
        self.slice_shape = (self.x.size, self.x.size)
        self.data_shape = (self.t.size, self.theta.size)
        self.matrix = self._assemble()

    def _assemble(self):
        dx = self.x[1] - self.x[0]
        c1 = self.radius * np.cos(self.theta)
        c2 = self.radius * np.sin(self.theta)
        n_theta = self.theta.size
        rows, cols, vals = [], [], []
        for i, t in enumerate(self.t):
            n_phi = _angle_count(t, dx)
            phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
            p1 = (c1[:, None] + t * np.cos(phi)[None, :]).ravel()
            p2 = (c2[:, None] + t * np.sin(phi)[None, :]).ravel()
            pt, col, w = bilinear_weights(p1, p2, self.x)
            rows.append(i * n_theta + pt // n_phi)
            cols.append(col)
            vals.append(w * (t * 2.0 * np.pi / n_phi))
        shape = (self.t.size * n_theta, self.x.size**2)
        m = sp.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=shape)
        return m.tocsr()

    def forward(self, slices):
        """Apply to ``(n, n)`` or stacked ``(n, n, k)`` arrays (real or complex)."""
        slices = np.asarray(slices)
        if slices.shape[:2] != self.slice_shape:
            raise ConfigurationError(f"slice shape {slices.shape[:2]} != {self.slice_shape}")
        extra = slices.shape[2:]
        out = self.matrix @ slices.reshape(self.x.size**2, -1)
        return out.reshape(self.data_shape + extra)

    def adjoint(self, data):
        data = np.asarray(data)
        if data.shape[:2] != self.data_shape:
            raise ConfigurationError(f"data shape {data.shape[:2]} != {self.data_shape}")
        extra = data.shape[2:]
        out = self.matrix.T @ data.reshape(self.t.size * self.theta.size, -1)
        return out.reshape(self.slice_shape + extra)

    def norm_estimate(self, iterations=20, seed=0):
        """Power-method estimate of the spectral norm."""
        rng = np.random.default_rng(seed)
        v = rng.standard_normal(self.x.size**2)
        sigma = 0.0
        for _ in range(iterations):
            w = self.matrix.T @ (self.matrix @ v)
            nw = np.linalg.norm(w)
            if nw == 0:
                return 0.0
            sigma = np.sqrt(nw / np.linalg.norm(v))
            v = w / nw
        return float(sigma)


@functools.lru_cache(maxsize=8)
def _cached(x_key, t_key, theta_key, radius):
    return CircularMeanOperator(np.array(x_key), np.array(t_key), np.array(theta_key), radius)


def circular_mean_operator(grid):
    """Operator for a :class:`ScanGrid`, cached per grid."""
    return _cached(tuple(grid.x), tuple(grid.t), tuple(grid.theta), grid.radius)


def circular_mean_forward(slice_, t_grid, theta_grid, x, radius=1.0):
    if np.any(np.asarray(t_grid) <= 0):
        raise DomainError("circle radii must be positive")
    op = _cached(tuple(np.asarray(x, float)), tuple(np.asarray(t_grid, float)),
                 tuple(np.asarray(theta_grid, float)), float(radius))
    return op.forward(slice_)


def circular_mean_adjoint(data, t_grid, theta_grid, x, radius=1.0):
    op = _cached(tuple(np.asarray(x, float)), tuple(np.asarray(t_grid, float)),
                 tuple(np.asarray(theta_grid, float)), float(radius))
    return op.adjoint(data)
