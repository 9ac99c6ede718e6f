"""Axial Fourier transform.

Frequency convention (used everywhere in the package): angular frequency
``xi`` and the continuous-transform approximation

    F(xi_m) = dz * sum_k f(z_k) exp(-1j * xi_m * z_k),
    f(z_k)  = 1 / (n * dz) * sum_m F(xi_m) exp(+1j * xi_m * z_k),

with ``xi_m = 2*pi*m / (n*dz)`` in numpy FFT order.  The inverse carries the
``1/(2*pi)`` of the continuous inversion formula as ``d_xi / (2*pi)``.
Phases refer to absolute coordinates ``z_k``, so spectra of data on
different axial windows are comparable.
"""
from __future__ import annotations

import numpy as np

from .grids import axial_frequencies


def axial_fft(values, z, axis=-1):
    """Forward axial transform; returns ``(spectrum, xi)``."""
    values = np.asarray(values)
    z = np.asarray(z, dtype=float)
    n = values.shape[axis]
    dz = z[1] - z[0]
    xi = axial_frequencies(n, dz)
    phase = _along(np.exp(-1j * xi * z[0]), values.ndim, axis)
    return dz * phase * np.fft.fft(values, axis=axis), xi


def axial_ifft(spectrum, z, axis=-1):
    """Inverse of :func:`axial_fft` (complex output)."""
    spectrum = np.asarray(spectrum)
    z = np.asarray(z, dtype=float)
    n = spectrum.shape[axis]
    dz = z[1] - z[0]
    xi = axial_frequencies(n, dz)
    phase = _along(np.exp(1j * xi * z[0]), spectrum.ndim, axis)
    return np.fft.ifft(spectrum * phase, axis=axis) / dz


def axial_transform_at(values, z, xi, axis=-1):
    """Direct evaluation of the forward sum at arbitrary frequencies ``xi``."""
    values = np.moveaxis(np.asarray(values, dtype=float), axis, -1)
    z = np.asarray(z, dtype=float)
    xi = np.atleast_1d(np.asarray(xi, dtype=float))
    kernel = np.exp(-1j * np.outer(z, xi)) * (z[1] - z[0])
    return values @ kernel


def _along(vec, ndim, axis):
    shape = [1] * ndim
    shape[axis] = -1
    return vec.reshape(shape)
