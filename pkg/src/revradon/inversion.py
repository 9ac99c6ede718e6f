"""Inversion of the factored pipeline.

Per axial frequency the Volterra system is solved with Tikhonov
regularization (all ``theta`` columns at once), then the circular-mean
operator is inverted by Landweber or by CGLS interleaved with TV
denoising.  All frequency slices are processed as one batch: ``M`` is
real, so a sparse product with ``k`` columns handles ``k`` slices, and the
iteration scalars are kept per column.  Only ``xi >= 0`` is solved; the
negative half follows from conjugate symmetry of real data.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from typing import Optional, Sequence

import numpy as np
import scipy.linalg as sla

from .errors import ConfigurationError, IllConditionedError, StepSizeError
from .geometry import MuSpec
from .operators.circular import CircularMeanOperator, circular_mean_operator
from .operators.fourier import axial_fft, axial_ifft
from .operators.grids import ScanGrid, Sinogram, Volume
from .operators.projectors import HALVES
from .operators.volterra import VolterraMatrix, volterra_matrix

log = logging.getLogger(__name__)

SOLVERS = ("landweber", "cgls_tv")


@dataclass
class InversionConfig:
    """Regularization and solver settings.

    ``relaxation=None`` means ``1 / ||M||**2`` from a 20-step power method.
    ``alpha_schedule``, if given, overrides ``volterra_alpha`` per
    non-negative frequency index.
    """

    volterra_alpha: float = 1e-3
    m_solver: str = "cgls_tv"
    iterations: int = 200
    relaxation: Optional[float] = None
    cg_iterations: int = 30
    tv_weight: float = 0.05
    denoise_interval: int = 5
    tv_inner_iterations: int = 20
    volterra_refine: int = 1
    alpha_schedule: Optional[Sequence[float]] = field(default=None)

    def __post_init__(self):
        if self.volterra_alpha < 0:
            raise ConfigurationError("volterra_alpha must be >= 0")
        if self.m_solver not in SOLVERS:
            raise ConfigurationError(f"m_solver must be one of {SOLVERS}")
        if self.iterations < 1 or self.cg_iterations < 1:
            raise ConfigurationError("iteration counts must be >= 1")
        if self.tv_weight < 0:
            raise ConfigurationError("tv_weight must be >= 0")
        if self.denoise_interval < 1 or self.tv_inner_iterations < 1:
            raise ConfigurationError("denoise_interval and tv_inner_iterations must be >= 1")
        if self.relaxation is not None and self.relaxation <= 0:
            raise ConfigurationError("relaxation must be positive")

    def to_dict(self):
        d = asdict(self)
        if d["alpha_schedule"] is not None:
            d["alpha_schedule"] = [float(a) for a in d["alpha_schedule"]]
        return d

    @classmethod
    def from_dict(cls, d):
        known = set(cls.__dataclass_fields__)
        extra = set(d) - known
        if extra:
            raise ConfigurationError(f"unknown inversion settings: {sorted(extra)}")
        return cls(**d)


# --------------------------------------------------------------------- Volterra


def tikhonov_solve(V, rhs, alpha):
    """Minimize ``||V x - rhs||**2 + alpha ||x||**2`` via the normal equations.

    ``rhs`` may be a vector or a matrix of right-hand sides (one per
    column).  At ``alpha = 0`` a numerically singular ``V`` raises
    :class:`IllConditionedError` carrying the condition estimate.
    """
    A = V.entries if isinstance(V, VolterraMatrix) else np.asarray(V, dtype=float)
    rhs = np.asarray(rhs)
    if alpha < 0:
        raise ConfigurationError("alpha must be >= 0")
    n = A.shape[0]
    if alpha == 0:
        diag = np.abs(np.diag(A))
        cond = np.linalg.cond(A)
        if not np.isfinite(cond) or cond > 1e12 or diag.min() <= 1e-14 * max(diag.max(), 1e-300):
            raise IllConditionedError(f"Volterra matrix is singular at alpha=0 (cond ~ {cond:.2e})", cond)
    normal = A.T @ A + alpha * np.eye(n)
    return sla.solve(normal, A.T @ rhs, assume_a="pos")


# ------------------------------------------------------------ circular means


def _cnorm(a):
    """Column norms of a batch ``(n1, n2, k)`` (or the total norm for 2-D)."""
    if a.ndim == 2:
        return np.linalg.norm(a)
    return np.sqrt(np.sum(np.abs(a) ** 2, axis=(0, 1)))


def _relaxation(op: CircularMeanOperator, relaxation):
    sigma = op.norm_estimate(iterations=20)
    if sigma == 0:
        raise ConfigurationError("circular-mean operator is zero")
    limit = 2.0 / sigma**2
    if relaxation is None:
        return 1.0 / sigma**2
    if not 0 < relaxation < limit:
        raise ConfigurationError(f"relaxation must lie in (0, {limit:.4g})")
    return float(relaxation)


def landweber(op: CircularMeanOperator, data, iterations=200, relaxation=None, history=None):
    """Landweber iteration ``x <- x + lam M^T (b - M x)`` from ``x = 0``.

    ``data`` has shape ``(n_t, n_theta)`` or ``(n_t, n_theta, k)``.  The
    residual is tracked per column; growth at two consecutive steps raises
    :class:`StepSizeError`.  If ``history`` is a list the residual norms
    are appended to it.
    """
    lam = _relaxation(op, relaxation)
    b = np.asarray(data)
    x = np.zeros(op.slice_shape + b.shape[2:], dtype=np.result_type(b, float))
    r = b.copy()
    prev = _cnorm(r)
    grown = np.zeros_like(prev, dtype=int)
    if history is not None:
        history.append(prev)
    for _ in range(iterations):
        x = x + lam * op.adjoint(r)
        r = b - op.forward(x)
        cur = _cnorm(r)
        grown = np.where(cur > prev * (1 + 1e-12) + 1e-300, grown + 1, 0)
        if np.any(grown >= 2):
            raise StepSizeError(f"Landweber residual grew twice in a row (relaxation {lam:.3g})")
        prev = cur
        if history is not None:
            history.append(cur)
    return x


def _cgls(op, b, x, iterations, history=None):
    """Batched CGLS on ``||M x - b||``, columns independent."""
    r = b - op.forward(x)
    s = op.adjoint(r)
    p = s.copy()
    gamma = _cnorm(s) ** 2
    for _ in range(iterations):
        q = op.forward(p)
        qq = _cnorm(q) ** 2
        active = qq > 0
        a = np.where(active, gamma / np.where(active, qq, 1.0), 0.0)
        x = x + a * p
        r = r - a * q
        if history is not None:
            history.append(_cnorm(r))
        s = op.adjoint(r)
        gamma_new = _cnorm(s) ** 2
        ok = gamma > 0
        beta = np.where(ok, gamma_new / np.where(ok, gamma, 1.0), 0.0)
        p = s + beta * p
        gamma = gamma_new
        if np.all(gamma == 0):
            break
    return x


def _grad(u):
    gx = np.zeros_like(u)
    gy = np.zeros_like(u)
    gx[:-1] = u[1:] - u[:-1]
    gy[:, :-1] = u[:, 1:] - u[:, :-1]
    return gx, gy


def _div(px, py):
    d = np.zeros_like(px)
    d[0] = px[0]
    d[1:-1] = px[1:-1] - px[:-2]
    d[-1] = -px[-2]
    d[:, 0] += py[:, 0]
    d[:, 1:-1] += py[:, 1:-1] - py[:, :-2]
    d[:, -1] += -py[:, -2]
    return d


def tv_denoise(u, weight, iterations=20, step=0.125):
    """Isotropic TV denoising by the dual projection iteration.

    Minimizes ``0.5 ||v - u||**2 + weight * TV(v)`` over the first two axes
    of a real array; trailing axes are independent images.  ``step <= 1/8``
    guarantees convergence.
    """
    u = np.asarray(u, dtype=float)
    if weight == 0:
        return u.copy()
    px = np.zeros_like(u)
    py = np.zeros_like(u)
    for _ in range(iterations):
        gx, gy = _grad(_div(px, py) - u / weight)
        norm = 1.0 + step * np.sqrt(gx**2 + gy**2)
        px = (px + step * gx) / norm
        py = (py + step * gy) / norm
    return u - weight * _div(px, py)


def total_variation(u):
    """Discrete isotropic TV summed over the first two axes."""
    gx, gy = _grad(np.asarray(u, dtype=float))
    return np.sum(np.sqrt(gx**2 + gy**2), axis=(0, 1))


def cgls_tv(op: CircularMeanOperator, data, cg_iterations=30, tv_weight=0.0, denoise_interval=5,
            tv_inner_iterations=20, history=None):
    """CGLS interleaved with TV denoising of the iterate.

    Every ``denoise_interval`` CG steps the iterate is TV-denoised (real
    and imaginary parts separately) and CGLS restarts from it.  With
    ``tv_weight == 0`` this is plain CGLS.
    """
    b = np.asarray(data)
    x = np.zeros(op.slice_shape + b.shape[2:], dtype=np.result_type(b, float))
    done = 0
    while done < cg_iterations:
        steps = cg_iterations - done if tv_weight == 0 else min(denoise_interval, cg_iterations - done)
        x = _cgls(op, b, x, steps, history)
        done += steps
        if tv_weight > 0 and steps == denoise_interval:
            if np.iscomplexobj(x):
                x = tv_denoise(x.real, tv_weight, tv_inner_iterations) + 1j * tv_denoise(
                    x.imag, tv_weight, tv_inner_iterations)
            else:
                x = tv_denoise(x, tv_weight, tv_inner_iterations)
    return x


# -------------------------------------------------------------- full pipeline


@dataclass
class Reconstruction:
    volume: Volume
    imag_norm: float
    config: InversionConfig


def _check_sinogram(sino: Sinogram, grid: ScanGrid):
    ok = (
        sino.shape == (grid.n, grid.n_theta, grid.n)
        and np.allclose(sino.s, grid.s)
        and np.allclose(sino.theta, grid.theta)
        and np.allclose(sino.y3, grid.z)
    )
    if not ok:
        raise ConfigurationError("sinogram grids do not match the reconstruction grid")


def reconstruct(sino: Sinogram, mu: MuSpec, config: InversionConfig, grid: ScanGrid,
                support_margin=0.0) -> Reconstruction:
    """Invert ``R_mu`` on ``grid``: axial FFT, Volterra, circular means, inverse FFT."""
    _check_sinogram(sino, grid)
    spectrum, xi = axial_fft(sino.values, grid.z, axis=2)
    n = grid.n
    half = n // 2 + 1  # xi >= 0 in numpy order
    if config.alpha_schedule is not None and len(config.alpha_schedule) != half:
        raise ConfigurationError(f"alpha_schedule needs {half} entries (one per xi >= 0)")

    means = np.empty((n, grid.n_theta, half), dtype=complex)
    for k in range(half):
        alpha = config.volterra_alpha if config.alpha_schedule is None else config.alpha_schedule[k]
        V = volterra_matrix(mu, xi[k], grid.s, config.volterra_refine).entries
        means[:, :, k] = tikhonov_solve(HALVES * V, spectrum[:, :, k], alpha)

    op = circular_mean_operator(grid)
    if config.m_solver == "landweber":
        slices = landweber(op, means, config.iterations, config.relaxation)
    else:
        slices = cgls_tv(op, means, config.cg_iterations, config.tv_weight, config.denoise_interval,
                         config.tv_inner_iterations)

    full = np.empty((n, n, n), dtype=complex)
    full[:, :, :half] = slices
    full[:, :, half:] = np.conj(slices[:, :, 1 : n - half + 1][:, :, ::-1])
    # the xi = 0 slice of real data is real
    full[:, :, 0] = full[:, :, 0].real
    vol = axial_ifft(full, grid.z, axis=2)
    imag = float(np.linalg.norm(vol.imag))
    out = Volume(np.ascontiguousarray(vol.real), grid.extent, support_margin)
    return Reconstruction(out, imag, config)
