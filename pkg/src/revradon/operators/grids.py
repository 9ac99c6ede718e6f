"""Sampling grids and the two data containers (volumes and sinograms)."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigurationError, PreconditionError


@dataclass(frozen=True)
class ScanGrid:
    """Discretization shared by a volume and its sinogram.

    The volume has ``n**3`` nodes: transverse coordinates span
    ``[-half_width, half_width]`` and the axial coordinate spans
    ``[-y_half, y_half]`` (endpoints included).  The sinogram uses the same
    axial nodes for ``y3``, ``n`` radii ``s`` uniform on ``s_range`` and
    ``n_theta`` center angles uniform on ``[0, 2*pi)``.
    """

    n: int = 33
    half_width: float = 1.0
    y_half: float = 5.0
    s_range: tuple[float, float] = (0.2, 2.2)
    n_theta: int = 64
    radius: float = 1.0

    def __post_init__(self):
        if self.n < 3 or self.n % 2 == 0:
            raise ConfigurationError(f"grid size must be odd and >= 3, got {self.n}")
        if self.n_theta < 4:
            raise ConfigurationError("need at least 4 center angles")
        a, b = self.s_range
        if not 0 < a < b:
            raise ConfigurationError(f"s_range must satisfy 0 < a < b, got {self.s_range}")
        if self.half_width <= 0 or self.y_half <= 0 or self.radius <= 0:
            raise ConfigurationError("grid extents and cylinder radius must be positive")
        object.__setattr__(self, "s_range", (float(a), float(b)))

    @property
    def x(self):
        return np.linspace(-self.half_width, self.half_width, self.n)

    @property
    def z(self):
        return np.linspace(-self.y_half, self.y_half, self.n)

    @property
    def dx(self):
        return 2.0 * self.half_width / (self.n - 1)

    @property
    def dz(self):
        return 2.0 * self.y_half / (self.n - 1)

    @property
    def s(self):
        return np.linspace(*self.s_range, self.n)

    @property
    def ds(self):
        return (self.s_range[1] - self.s_range[0]) / (self.n - 1)

    @property
    def t(self):
        """Circle radii at which circular means are sampled (cell midpoints)."""
        return self.s - 0.5 * self.ds

    @property
    def theta(self):
        return 2.0 * np.pi * np.arange(self.n_theta) / self.n_theta

    @property
    def xi(self):
        return axial_frequencies(self.n, self.dz)

    @property
    def extent(self):
        return (self.half_width, self.half_width, self.y_half)

    def to_dict(self):
        return {
            "n": self.n,
            "half_width": self.half_width,
            "y_half": self.y_half,
            "s_range": list(self.s_range),
            "n_theta": self.n_theta,
            "radius": self.radius,
        }

    @classmethod
    def from_dict(cls, d):
        d = dict(d)
        if "s_range" in d:
            d["s_range"] = tuple(d["s_range"])
        return cls(**d)


def axial_frequencies(n, dz):
    """Angular frequencies ``2*pi*k / (n*dz)`` in numpy FFT order."""
    return 2.0 * np.pi * np.fft.fftfreq(n, d=dz)


@dataclass
class Volume:
    """Real ``n1 x n2 x n3`` field sampled on a node grid centered at 0.

    ``extent`` holds the half-widths per axis; nodes on axis ``i`` are
    ``linspace(-extent[i], extent[i], n_i)``.
    """

    values: np.ndarray
    extent: tuple[float, float, float] = (1.0, 1.0, 5.0)
    support_margin: float = 0.0

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if self.values.ndim != 3:
            raise ConfigurationError("volume values must be 3-D")
        if not np.all(np.isfinite(self.values)):
            raise PreconditionError("volume contains non-finite values")
        self.extent = tuple(float(e) for e in self.extent)

    @classmethod
    def zeros(cls, grid: ScanGrid, support_margin=0.0):
        return cls(np.zeros((grid.n,) * 3), grid.extent, support_margin)

    @property
    def shape(self):
        return self.values.shape

    def axis(self, i):
        return np.linspace(-self.extent[i], self.extent[i], self.values.shape[i])

    def spacing(self, i):
        return 2.0 * self.extent[i] / (self.values.shape[i] - 1)

    @property
    def voxel_volume(self):
        return self.spacing(0) * self.spacing(1) * self.spacing(2)

    def matches(self, grid: ScanGrid):
        return self.values.shape == (grid.n,) * 3 and np.allclose(self.extent, grid.extent)


@dataclass
class Sinogram:
    """Real data over ``(s, theta, y3)``."""

    values: np.ndarray
    s: np.ndarray
    theta: np.ndarray
    y3: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        self.s = np.asarray(self.s, dtype=float)
        self.theta = np.asarray(self.theta, dtype=float)
        self.y3 = np.asarray(self.y3, dtype=float)
        expected = (self.s.size, self.theta.size, self.y3.size)
        if self.values.shape != expected:
            raise ConfigurationError(f"sinogram values have shape {self.values.shape}, grids imply {expected}")
        for name in ("s", "theta", "y3"):
            g = getattr(self, name)
            if g.size > 1 and np.any(np.diff(g) <= 0):
                raise ConfigurationError(f"sinogram {name} grid must be strictly increasing")

    @property
    def shape(self):
        return self.values.shape

    @classmethod
    def on_grid(cls, values, grid: ScanGrid, meta=None):
        return cls(values, grid.s, grid.theta, grid.z, dict(meta or {}))

    def replace(self, values):
        return Sinogram(values, self.s, self.theta, self.y3, dict(self.meta))


def check_support(vol: Volume, margin: float, radius: float = 1.0):
    """Raise if ``vol`` is nonzero within ``margin`` of the cylinder ``|x'| = radius``."""
    x1 = vol.axis(0)[:, None]
    x2 = vol.axis(1)[None, :]
    dist = np.abs(np.hypot(x1, x2) - radius)
    near = dist < margin
    bad = near[:, :, None] & (vol.values != 0)
    if np.any(bad):
        idx = np.argwhere(bad)
        raise PreconditionError(
            f"{len(idx)} nonzero voxels lie within {margin:g} of the cylinder, e.g. index {tuple(idx[0])}"
        )


def check_axial_room(vol: Volume, max_height: float, y_half: float):
    """Raise if surfaces of half-height ``max_height`` through the support leave ``[-y_half, y_half]``."""
    nz = np.nonzero(np.any(vol.values != 0, axis=(0, 1)))[0]
    if nz.size == 0:
        return
    z = vol.axis(2)
    lo, hi = z[nz[0]] - max_height, z[nz[-1]] + max_height
    if lo < -y_half - 1e-12 or hi > y_half + 1e-12:
        raise PreconditionError(
            f"data band [{lo:.3g}, {hi:.3g}] exceeds the y3 window +-{y_half:g}; enlarge y_half"
        )
