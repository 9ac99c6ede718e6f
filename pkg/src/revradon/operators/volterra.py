"""Per-frequency Volterra operator with weakly singular kernel.

For each axial frequency ``xi`` the circular means ``u(t)`` and the data
``b(s)`` are related by

    b(s) = integral_a^s  K_xi(s, t) / sqrt(s - t) * u(t) dt,
    K_xi(s, t) = kappa(s, t) * cos(xi * mu(s, t)).

Discretization (product-midpoint rule): ``u`` is piecewise constant on the
cells ``[s_{k-1}, s_k]`` with value taken at the cell midpoint
``t_k = s_k - ds/2``; ``1/sqrt(s - t)`` is integrated exactly over each
cell and ``K`` is frozen at the cell midpoint, except on the diagonal cell
where ``K(s_i, s_i) = |tau(s_i, s_i)| / 2`` is used.  Row 0 (``s = a``,
empty interval) gets the ghost cell ``[a - ds, a]`` so the matrix is
nonsingular; circular means vanish there for admissible data.

With ``refine=r > 1`` the same rule runs on cells ``r`` times narrower and
``u`` is read off a cubic spline through the midpoint samples.  The matrix
stays square (``n x n``) but the phase of ``cos(xi * mu)``, which varies
like ``sqrt(s - t)`` near the diagonal, is resolved far better.
Refined matrices are much closer to the continuous operator and also much
worse conditioned at high ``xi``.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from ..errors import ConfigurationError
from ..geometry import MuSpec


@dataclass(frozen=True)
class VolterraMatrix:
    entries: np.ndarray
    xi: float
    mu: MuSpec
    s: np.ndarray
    t: np.ndarray
    quadrature: str = "product-midpoint, exact (s-t)^-1/2 weights"

    def __matmul__(self, other):
        return self.entries @ other


def _uniform(s):
    s = np.asarray(s, dtype=float)
    if s.size < 2:
        raise ConfigurationError("need at least two radii")
    ds = s[1] - s[0]
    if ds <= 0 or not np.allclose(np.diff(s), ds, rtol=1e-9, atol=1e-12):
        raise ConfigurationError("Volterra assembly needs a uniform increasing s grid")
    if s[0] <= 0:
        raise ConfigurationError("s grid must start at a > 0")
    return s, ds


def _product_midpoint(mu, xi, s, left, right):
    """Entries for cells ``[left_k, right_k]`` sampled at their midpoints."""
    si = s[:, None]
    mid = 0.5 * (left + right)
    hi = np.sqrt(np.clip(si - right[None, :], 0.0, None))
    lo = np.sqrt(np.clip(si - left[None, :], 0.0, None))
    weights = 2.0 * (lo - hi)
    tt = np.minimum(mid[None, :], si)
    kern = mu.kappa(si, tt) * np.cos(xi * mu.mu(si, tt))
    # cell whose right edge is s_i: freeze at the diagonal value
    on_diag = np.isclose(right[None, :], si, rtol=0, atol=1e-12 * max(1.0, s[-1]))
    kern = np.where(on_diag, mu.kappa(s, s)[:, None], kern)
    return weights * kern


@functools.lru_cache(maxsize=16)
def _row_bases(t_key, fine_key, s_key):
    """Per-row causal interpolation: row ``i`` sees only nodes ``t_0..t_i``."""
    t = np.array(t_key)
    fine = np.array(fine_key)
    s = np.array(s_key)
    bases = [None]
    for i in range(1, s.size):
        pts = fine[fine < s[i]]
        spline = CubicSpline(t[: i + 1], np.eye(i + 1), axis=0, bc_type="not-a-knot")
        bases.append(spline(pts))
    return bases


def volterra_matrix(mu: MuSpec, xi: float, s_grid, refine: int = 1) -> VolterraMatrix:
    s, ds = _uniform(s_grid)
    n = s.size
    t = s - 0.5 * ds
    xi = float(xi)
    if refine < 1:
        raise ConfigurationError("refine must be >= 1")
    if refine == 1:
        entries = np.tril(_product_midpoint(mu, xi, s, s - ds, s))
        quad = VolterraMatrix.quadrature
    else:
        h = ds / refine
        left = s[0] + h * np.arange(refine * (n - 1))
        fine = _product_midpoint(mu, xi, s, left, left + h)
        bases = _row_bases(tuple(t), tuple(left + 0.5 * h), tuple(s))
        entries = np.zeros((n, n))
        for i in range(1, n):
            b = bases[i]
            entries[i, : i + 1] = fine[i, : b.shape[0]] @ b
        quad = f"product-midpoint on {refine}x sub-cells, cubic-spline u"
    # ghost cell closes the s = a row only
    entries[0] = 0.0
    entries[0, 0] = 2.0 * np.sqrt(ds) * mu.kappa(s[0], s[0])
    if refine == 1:
        entries[1:, 0] = 0.0
    return VolterraMatrix(entries, xi, mu, s, t, quad)
