"""Phantoms, noise, error metrics, condition curves and artifact matching."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ConfigurationError, PreconditionError, UndefinedMetricError
from .geometry import MuSpec
from .microlocal import ArtifactCurve
from .operators.grids import ScanGrid, Sinogram, Volume, check_support
from .operators.volterra import volterra_matrix


# ------------------------------------------------------------------ phantoms


@dataclass(frozen=True)
class PhantomSpec:
    """``kind`` is ``"delta"`` (uses ``position``) or ``"hollow_cuboid"``."""

    kind: str = "hollow_cuboid"
    position: Sequence[float] = (0.0, 0.0, 0.0)
    half_widths: Sequence[float] = (0.45, 0.45, 0.9)
    wall: float = 0.15
    center: Sequence[float] = (0.0, 0.0, 0.0)
    support_margin: float = 0.0

    def __post_init__(self):
        if self.kind not in ("delta", "hollow_cuboid"):
            raise ConfigurationError(f"unknown phantom kind {self.kind!r}")
        if self.kind == "hollow_cuboid" and (min(self.half_widths) <= 0 or self.wall <= 0):
            raise ConfigurationError("cuboid half-widths and wall must be positive")

    def to_dict(self):
        return {
            "kind": self.kind,
            "position": [float(v) for v in self.position],
            "half_widths": [float(v) for v in self.half_widths],
            "wall": float(self.wall),
            "center": [float(v) for v in self.center],
            "support_margin": float(self.support_margin),
        }

    @classmethod
    def from_dict(cls, d):
        extra = set(d) - set(cls.__dataclass_fields__)
        if extra:
            raise ConfigurationError(f"unknown phantom settings: {sorted(extra)}")
        d = dict(d)
        for key in ("position", "half_widths", "center"):
            if key in d:
                d[key] = tuple(float(v) for v in d[key])
        return cls(**d)


def nearest_voxel(vol_or_grid, point):
    """Index of the voxel center closest to ``point``."""
    axes = [vol_or_grid.axis(i) for i in range(3)] if isinstance(vol_or_grid, Volume) else \
        [vol_or_grid.x, vol_or_grid.x, vol_or_grid.z]
    return tuple(int(np.argmin(np.abs(a - p))) for a, p in zip(axes, point))


def make_phantom(spec: PhantomSpec, grid: ScanGrid) -> Volume:
    """Voxelize ``spec`` on ``grid``; deltas snap to the nearest voxel center."""
    vol = Volume.zeros(grid, spec.support_margin)
    if spec.kind == "delta":
        idx = nearest_voxel(grid, spec.position)
        vol.values[idx] = 1.0 / vol.voxel_volume
    else:
        X, Y, Z = np.meshgrid(grid.x, grid.x, grid.z, indexing="ij")
        d = [np.abs(X - spec.center[0]), np.abs(Y - spec.center[1]), np.abs(Z - spec.center[2])]
        eps = 1e-9
        outer = np.all([d[i] <= spec.half_widths[i] + eps for i in range(3)], axis=0)
        inner_hw = [h - spec.wall for h in spec.half_widths]
        if min(inner_hw) > 0:
            inner = np.all([d[i] < inner_hw[i] - eps for i in range(3)], axis=0)
        else:
            inner = np.zeros_like(outer)
        vol.values[outer & ~inner] = 1.0
    if spec.support_margin > 0:
        check_support(vol, spec.support_margin, grid.radius)
    elif np.any(vol.values != 0):
        X, Y = np.meshgrid(grid.x, grid.x, indexing="ij")
        if np.hypot(X, Y)[np.any(vol.values != 0, axis=2)].max() >= grid.radius:
            raise PreconditionError("phantom support reaches the cylinder of centers")
    return vol


# ------------------------------------------------------------ noise, metrics


def add_noise(sino: Sinogram, gamma: float, seed: int = 0) -> Sinogram:
    """Add white Gaussian noise scaled so ``||noise|| / ||sino|| = gamma / 100``."""
    if gamma < 0:
        raise ConfigurationError("noise level must be >= 0")
    if gamma == 0:
        return sino.replace(sino.values.copy())
    rng = np.random.default_rng(seed)
    w = rng.standard_normal(sino.values.shape)
    scale = gamma / 100.0 * np.linalg.norm(sino.values) / np.linalg.norm(w)
    return sino.replace(sino.values + scale * w)


def rel_error(rec, truth) -> float:
    rec = rec.values if isinstance(rec, Volume) else np.asarray(rec)
    truth = truth.values if isinstance(truth, Volume) else np.asarray(truth)
    if rec.shape != truth.shape:
        raise ConfigurationError(f"shape mismatch {rec.shape} vs {truth.shape}")
    ref = np.linalg.norm(truth)
    if ref == 0:
        raise UndefinedMetricError("relative error against a zero reference")
    return float(np.linalg.norm(rec - truth) / ref)


# -------------------------------------------------------- condition numbers


@dataclass
class ConditionCurve:
    xi: np.ndarray
    cond: np.ndarray
    family: dict = field(default_factory=dict)

    @property
    def peak(self) -> float:
        return float(np.max(self.cond))

    @property
    def peak_xi(self) -> float:
        return float(self.xi[int(np.argmax(self.cond))])

    @property
    def area(self) -> float:
        """Trapezoid area over the sorted ``xi`` grid."""
        order = np.argsort(self.xi)
        return float(np.trapezoid(self.cond[order], self.xi[order]))

    def rows(self):
        return [(float(x), float(c)) for x, c in zip(self.xi, self.cond)]


def condition_number(entries) -> float:
    sv = np.linalg.svd(entries, compute_uv=False)
    if sv[-1] == 0 or not np.isfinite(sv[-1]) or sv[0] / sv[-1] > 1e16:
        return float("inf")
    return float(sv[0] / sv[-1])


def condition_curve(mu: MuSpec, s_grid, xi_grid) -> ConditionCurve:
    """``cond_2(V_xi)`` for every ``xi`` (``V`` depends on ``|xi|`` only)."""
    xi_grid = np.asarray(xi_grid, dtype=float)
    cache = {}
    cond = np.empty(xi_grid.size)
    for k, xv in enumerate(xi_grid):
        key = round(abs(xv), 12)
        if key not in cache:
            cache[key] = condition_number(volterra_matrix(mu, abs(xv), s_grid).entries)
        cond[k] = cache[key]
    return ConditionCurve(xi_grid, cond, mu.to_dict())


# ---------------------------------------------------------- artifact match


def ridge_maxima(values, exclude=None, exclude_radius=0.0, threshold=0.0):
    """Voxels that are 1-D local maxima of ``values`` along some lattice line.

    Lines run along the two axes and the two diagonals of each ``x3``
    slice (thin curves are maxima across the curve, not along it).  Points
    within ``exclude_radius`` voxels of ``exclude`` and below ``threshold``
    are dropped.  Returns an ``(m, 3)`` integer array.
    """
    a = np.asarray(values, dtype=float)
    pad = np.pad(a, ((1, 1), (1, 1), (0, 0)), constant_values=-np.inf)
    c = pad[1:-1, 1:-1]
    peak = np.zeros(a.shape, dtype=bool)
    for di, dj in ((1, 0), (0, 1), (1, 1), (1, -1)):
        fwd = pad[1 + di: pad.shape[0] - 1 + di, 1 + dj: pad.shape[1] - 1 + dj]
        bwd = pad[1 - di: pad.shape[0] - 1 - di, 1 - dj: pad.shape[1] - 1 - dj]
        peak |= (c >= fwd) & (c >= bwd) & (c > np.minimum(fwd, bwd))
    peak &= a > threshold
    idx = np.argwhere(peak)
    if exclude is not None and exclude_radius > 0:
        far = np.linalg.norm(idx - np.asarray(exclude)[None, :], axis=1) > exclude_radius
        idx = idx[far]
    return idx


@dataclass
class MatchReport:
    fraction: float
    matched: int
    samples: int
    off_curve: int
    artifact_amplitude: float
    threshold: float
    maxima: int

    def to_dict(self):
        return {k: (float(v) if isinstance(v, (float, np.floating)) else int(v)) for k, v in self.__dict__.items()}

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def _voxel_coords(vol: Volume, pts):
    """Continuous voxel index of physical points."""
    origin = np.array([-e for e in vol.extent])
    step = np.array([vol.spacing(i) for i in range(3)])
    return (np.asarray(pts) - origin) / step


def artifact_match(rec: Volume, curve: ArtifactCurve, threshold=0.25, exclude_radius=2.0,
                   off_tolerance=2.0) -> MatchReport:
    """Compare local maxima of ``|rec|`` with a predicted mirror curve.

    Maxima are ridge points (see :func:`ridge_maxima`) of ``|rec|`` above
    ``threshold * max|rec|`` (the maximum taken outside the exclusion
    ball) more than ``exclude_radius`` voxels from the source.  A curve
    sample inside the volume matches if some maximum lies within one voxel
    (Chebyshev distance).  ``off_curve`` counts maxima above half the
    artifact amplitude (the largest value on the matched maxima) that are
    more than ``off_tolerance`` voxels from both the curve and the source.
    """
    a = np.abs(rec.values)
    src = _voxel_coords(rec, curve.source)
    mirrors = _voxel_coords(rec, curve.points)
    inside = np.all((mirrors >= -0.5) & (mirrors <= np.array(a.shape) - 0.5), axis=1)
    mirrors = mirrors[inside]
    if mirrors.shape[0] == 0:
        raise ConfigurationError("no predicted curve sample lies inside the volume")
    grid_idx = np.indices(a.shape).reshape(3, -1).T
    far = np.linalg.norm(grid_idx - src[None, :], axis=1) > exclude_radius
    ref = a.reshape(-1)[far].max() if np.any(far) else 0.0
    if ref == 0:
        return MatchReport(0.0, 0, int(mirrors.shape[0]), 0, 0.0, float(threshold), 0)
    idx = ridge_maxima(a, src, exclude_radius, threshold * ref)
    if idx.shape[0] == 0:
        return MatchReport(0.0, 0, int(mirrors.shape[0]), 0, 0.0, float(threshold * ref), 0)
    cheb = np.max(np.abs(mirrors[:, None, :] - idx[None, :, :]), axis=2)  # (samples, maxima)
    hit = cheb <= 1.0 + 1e-9
    matched = int(np.sum(np.any(hit, axis=1)))
    used = np.any(hit, axis=0)
    amp = float(a[tuple(idx[used].T)].max()) if np.any(used) else 0.0
    # distance of each maximum to the densely sampled curve and to the source
    d_curve = np.min(np.linalg.norm(idx[:, None, :] - mirrors[None, :, :], axis=2), axis=1)
    d_src = np.linalg.norm(idx - src[None, :], axis=1)
    strong = a[tuple(idx.T)] > 0.5 * amp
    off = int(np.sum(strong & (d_curve > off_tolerance) & (d_src > off_tolerance)))
    return MatchReport(matched / mirrors.shape[0], matched, int(mirrors.shape[0]), off, amp,
                       float(threshold * ref), int(idx.shape[0]))


# ---------------------------------------------------------------- CSV output


def write_csv(path, header: Sequence[str], rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) for v in row])


def read_csv(path):
    with open(path, newline="") as fh:
        r = csv.reader(fh)
        header = next(r)
        return header, np.array([[float(v) for v in row] for row in r])
