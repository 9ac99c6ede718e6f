"""Cone transform (``h = s x``) and its Fourier-slice link to circular means."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import ConfigurationError, DomainError
from .circular import CircularMeanOperator
from .fourier import axial_fft
from .grids import Sinogram, Volume


@dataclass
class SpectralSinogram:
    """Complex data over ``(s, theta, xi)`` after the axial transform."""

    values: np.ndarray
    s: np.ndarray
    theta: np.ndarray
    xi: np.ndarray

    @classmethod
    def from_sinogram(cls, sino: Sinogram):
        spec, xi = axial_fft(sino.values, sino.y3, axis=2)
        return cls(spec, sino.s, sino.theta, xi)

    def index_of(self, xi, rtol=1e-9):
        k = int(np.argmin(np.abs(self.xi - xi)))
        if not np.isclose(self.xi[k], xi, rtol=rtol, atol=1e-12):
            raise ConfigurationError(f"xi={xi:g} is not on the frequency grid")
        return k


def cone_forward(vol: Volume, s_grid, theta, y3, radius=1.0, n_t=None, t_max=None) -> Sinogram:
    """Integrals over cones with vertex ``(radius * e_theta, y3)`` and slope ``s``.

    ``sqrt(1 + s**2) * integral_0^inf M f(t, y', y3 - s t) dt`` where
    ``M f(t, y', z)`` is the circular mean (times ``t``) of the slice at
    height ``z``; heights between axial nodes interpolate linearly, so the
    quadrature is trilinear in ``f``.  ``t`` uses the midpoint rule up to
    the farthest volume point from the axis.
    """
    s_grid = np.asarray(s_grid, dtype=float)
    theta = np.asarray(theta, dtype=float)
    y3 = np.asarray(y3, dtype=float)
    x = vol.axis(0)
    if not np.allclose(vol.axis(1), x):
        raise ConfigurationError("cone_forward needs equal transverse axes")
    if t_max is None:
        t_max = radius + np.sqrt(2.0) * vol.extent[0]
    if n_t is None:
        n_t = int(np.ceil(t_max / vol.spacing(0))) * 2
    dt = t_max / n_t
    t = dt * (np.arange(n_t) + 0.5)
    m_op = CircularMeanOperator(x, t, theta, radius)
    circ = m_op.forward(vol.values)  # (n_t, n_theta, n_z)
    z = vol.axis(2)
    dz = vol.spacing(2)
    nz = z.size

    out = np.zeros((s_grid.size, theta.size, y3.size))
    for i, s in enumerate(s_grid):
        zq = (y3[None, :] - s * t[:, None] - z[0]) / dz  # (n_t, n_y)
        k0 = np.floor(zq).astype(int)
        frac = zq - k0
        acc = np.zeros((theta.size, y3.size))
        for k, wk in ((k0, 1.0 - frac), (k0 + 1, frac)):
            ok = (k >= 0) & (k < nz)
            kk = np.clip(k, 0, nz - 1)
            # circ[t, theta, z] gathered at (t_i, :, kk[t_i, y])
            vals = np.take_along_axis(circ, kk[:, None, :].repeat(theta.size, axis=1), axis=2)
            acc += np.einsum("tay,ty->ay", vals, np.where(ok, wk, 0.0))
        out[i] = np.sqrt(1.0 + s * s) * acc * dt
    return Sinogram(out, s_grid, theta, y3, {"family": {"family": "cone"}, "model": "cone"})


def _window(name, u):
    """Taper on ``u in [-1, 1]``."""
    if name == "hann":
        return np.cos(0.5 * np.pi * u) ** 2
    if name in (None, "none", "boxcar"):
        return np.ones_like(u)
    raise ConfigurationError(f"unknown window {name!r}")


def cone_slice_recover(spectral: SpectralSinogram, xi: float, t_grid, window="hann"):
    """Circular means of the axial slice at ``xi`` from cone data.

    Evaluates ``|xi| / (2 pi) * integral R^(s, xi) / sqrt(1 + s**2)
    * exp(1j * xi * s * t) * w(s) ds`` with the trapezoid rule on the data's
    ``s`` grid; ``w`` tapers to zero at ``max |s|``.  Returns an array of
    shape ``(len(t_grid), n_theta)``.
    """
    if xi == 0:
        raise DomainError("cone slice recovery is undefined at xi = 0")
    k = spectral.index_of(xi)
    s = np.asarray(spectral.s, dtype=float)
    t = np.asarray(t_grid, dtype=float)
    col = spectral.values[:, :, k]  # (n_s, n_theta)
    span = np.max(np.abs(s))
    w = _window(window, s / span) / np.sqrt(1.0 + s**2)
    w = w * np.gradient(s)
    w[0] *= 0.5 if s.size > 1 else 1.0
    w[-1] *= 0.5 if s.size > 1 else 1.0
    kernel = np.exp(1j * xi * np.outer(t, s)) * w[None, :]  # (n_t, n_s)
    return abs(xi) / (2.0 * np.pi) * (kernel @ col)
