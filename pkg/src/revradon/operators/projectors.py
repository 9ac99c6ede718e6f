"""Forward models: the factored Fourier pipeline and a direct surface quadrature."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from scipy.ndimage import map_coordinates, spline_filter

from ..errors import ConfigurationError, NumericalError
from ..geometry import Lemon, MuSpec, lemon_p_from_s
from .circular import circular_mean_operator
from .fourier import axial_fft, axial_ifft
from .grids import ScanGrid, Sinogram, Volume, check_axial_room, check_support
from .volterra import volterra_matrix

log = logging.getLogger(__name__)

# the surface has two halves (x3 above and below the center), each
# contributing cos(xi * mu) after the axial transform
HALVES = 2.0
# sub-cell refinement at which the factored model matches direct quadrature
# to about 1% on 33**3 grids
ACCURATE_REFINE = 16


def _map_parallel(func, items, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, items))
    return [func(i) for i in items]


def unique_frequency_matrices(mu: MuSpec, grid: ScanGrid, refine=1):
    """Volterra matrices for every axial frequency of ``grid`` keyed by index.

    ``V`` depends on ``|xi|`` only, so each pair ``+-xi`` shares one matrix.
    """
    xi = grid.xi
    cache = {}
    out = []
    for k, x in enumerate(xi):
        key = round(abs(float(x)), 12)
        if key not in cache:
            cache[key] = volterra_matrix(mu, abs(float(x)), grid.s, refine).entries
        out.append(cache[key])
    return out


def validate_volume(vol: Volume, mu: MuSpec, grid: ScanGrid):
    if not vol.matches(grid):
        raise ConfigurationError(f"volume shape {vol.shape} / extent {vol.extent} do not match the scan grid")
    margin = max(vol.support_margin, grid.s_range[0])
    check_support(vol, margin, grid.radius)
    check_axial_room(vol, float(mu.max_height(grid.s_range[1])), grid.y_half)


def forward_project(vol: Volume, mu: MuSpec, grid: ScanGrid, workers=None, check=True,
                    refine=1) -> Sinogram:
    """Simulate data by axial FFT, circular means, Volterra sums and inverse FFT.

    ``refine`` sets the sub-cell refinement of the Volterra quadrature.
    The default 1 uses the assembled product-midpoint matrices, so data and
    inversion share one discrete model; ``ACCURATE_REFINE`` resolves the
    phase of ``cos(xi * mu)`` near the diagonal and tracks the continuous
    transform closely (pair it with the same ``volterra_refine`` when
    inverting).
    """
    if check:
        validate_volume(vol, mu, grid)
    spectrum, xi = axial_fft(vol.values, grid.z, axis=2)
    m_op = circular_mean_operator(grid)
    means = m_op.forward(spectrum)  # (n_t, n_theta, n_xi)
    mats = unique_frequency_matrices(mu, grid, refine)

    out = np.empty((grid.n, grid.n_theta, xi.size), dtype=complex)

    def one(k):
        out[:, :, k] = HALVES * (mats[k] @ means[:, :, k])

    _map_parallel(one, range(xi.size), workers)
    data = axial_ifft(out, grid.z, axis=2)
    scale = np.linalg.norm(data)
    resid = np.linalg.norm(data.imag)
    if scale > 0 and resid > 1e-8 * scale:
        raise NumericalError(f"imaginary residue {resid / scale:.2e} of forward projection")
    meta = {"family": mu.to_dict(), "model": "factored", "volterra_refine": refine}
    return Sinogram.on_grid(data.real, grid, meta)


def _generating_curve(surface, s, n_x):
    """Quadrature nodes on the generating curve of the surface with radius ``s``.

    Returns ``(rho, x, arc_weight)``: horizontal radius, axial offset and
    arc-length quadrature weight.  Graph profiles integrate in ``x`` with
    the weight ``sqrt(1 + h_x**2 / (4 h)) * sqrt(h) = sqrt(h + h_x**2 / 4)``
    (radius factor included); lemons with ``s > alpha`` are not graphs over
    ``x`` and are integrated along the circle arc instead.
    """
    profile = surface.profile() if isinstance(surface, MuSpec) else surface
    gx, gw = np.polynomial.legendre.leggauss(n_x)
    if isinstance(profile, Lemon):
        p = float(lemon_p_from_s(s, profile.alpha))
        if p < 0:
            big_r = np.hypot(profile.alpha, p)
            beta0 = np.arccos(p / big_r)
            beta = beta0 * gx
            rho = big_r * np.cos(beta) - p
            x = big_r * np.sin(beta)
            return rho, x, rho * big_r * beta0 * gw
        param = p
    else:
        param = float(s)
    lo, hi = (float(v) for v in profile.x_interval(param))
    x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx
    h = profile.h(param, x)
    _, h_x = profile.grad(param, x)
    return np.sqrt(h), x, np.sqrt(h + 0.25 * h_x**2) * 0.5 * (hi - lo) * gw


def forward_project_direct(vol: Volume, surface, grid: ScanGrid, n_x=48, n_phi=None, order=3,
                           check=True) -> Sinogram:
    """Brute-force surface integrals of the spline-interpolated volume.

    Integrates ``sqrt(h + h_x**2 / 4) * f(sqrt(h) Theta + y', y3 + x)`` over
    ``x`` (Gauss-Legendre on ``Omega_{h,s}``) and the azimuth (uniform).
    ``surface`` is a profile or a :class:`MuSpec`; sinogram radii are
    maximal horizontal radii, converted to the lemon's arc parameter when
    needed.  Independent of the Fourier pipeline and its interpolation.
    """
    if check and isinstance(surface, MuSpec):
        validate_volume(vol, surface, grid)
    coeffs = spline_filter(vol.values, order=order, mode="constant") if order > 1 else vol.values
    origin = np.array([-e for e in vol.extent])
    step = np.array([vol.spacing(i) for i in range(3)])
    if n_phi is None:
        rmax = grid.s_range[1]
        n_phi = max(64, int(np.ceil(2 * np.pi * rmax / step[0])) + 1)
    phi = 2 * np.pi * np.arange(n_phi) / n_phi
    y3 = grid.z
    out = np.zeros((grid.n, grid.n_theta, y3.size))
    for i, s in enumerate(grid.s):
        rho, x, arc = _generating_curve(surface, s, n_x)
        arc = arc * (2 * np.pi / n_phi)
        for j, th in enumerate(grid.theta):
            c1 = grid.radius * np.cos(th)
            c2 = grid.radius * np.sin(th)
            p1 = c1 + rho[:, None] * np.cos(phi)[None, :]  # (n_x, n_phi)
            p2 = c2 + rho[:, None] * np.sin(phi)[None, :]
            p3 = y3[:, None] + x[None, :]  # (n_y, n_x)
            coords = np.empty((3, y3.size, n_x, n_phi))
            coords[0] = ((p1 - origin[0]) / step[0])[None]
            coords[1] = ((p2 - origin[1]) / step[1])[None]
            coords[2] = ((p3 - origin[2]) / step[2])[:, :, None]
            samples = map_coordinates(coeffs, coords.reshape(3, -1), order=order, mode="constant", cval=0.0,
                                      prefilter=False)
            samples = samples.reshape(y3.size, n_x, n_phi)
            out[i, j] = np.einsum("yxp,x->y", samples, arc)
    meta = {"family": getattr(surface, "to_dict", lambda: {})(), "model": "direct"}
    return Sinogram.on_grid(out, grid, meta)
