"""Surfaces of revolution with axes on a cylinder.

A surface is fixed by a profile ``h(s, x)``: the point at axial offset
``x`` from the center lies at horizontal distance ``sqrt(h(s, x))`` from
the rotation axis.  Four closed-form families are provided (sphere,
spheroid, lemon, cone) plus :class:`TabulatedProfile` for auditing
arbitrary sampled profiles.

For the even families the surface is equivalently described by the
half-height curve ``mu(s, t)`` (axial offset at which the surface has
horizontal radius ``t``), see :class:`MuSpec`.  Here ``s`` is the maximal
horizontal radius ``sqrt(h(s, 0))``; for the lemon this differs from the
profile parameter ``p`` and :func:`lemon_s_from_p` converts.

All evaluators broadcast over numpy arrays.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.interpolate import RectBivariateSpline

from .errors import ConfigurationError, DomainError, SingularRatioError

__all__ = [
    "CenterSurface",
    "Sphere",
    "Spheroid",
    "Lemon",
    "Cone",
    "TabulatedProfile",
    "MuSpec",
    "MuValues",
    "h_eval",
    "h_grad",
    "ratio_deriv",
    "mu_eval",
    "surface_point",
    "psi",
    "lemon_s_from_p",
    "lemon_p_from_s",
    "profile_from_dict",
    "mu_from_dict",
]


@dataclass(frozen=True)
class CenterSurface:
    """The cylinder ``{|x'| = radius}`` carrying the rotation axes."""

    radius: float = 1.0
    axial_extent: tuple[float, float] = (-5.0, 5.0)

    def __post_init__(self):
        if not self.radius > 0:
            raise ConfigurationError(f"cylinder radius must be positive, got {self.radius}")

    def center(self, theta, y3=0.0):
        theta = np.asarray(theta, dtype=float)
        y3 = np.broadcast_to(np.asarray(y3, dtype=float), theta.shape)
        return np.stack([self.radius * np.cos(theta), self.radius * np.sin(theta), y3], axis=-1)

    def normal(self, theta):
        """Outward unit normal of the tangent plane at angle ``theta``."""
        theta = np.asarray(theta, dtype=float)
        return np.stack([np.cos(theta), np.sin(theta), np.zeros_like(theta)], axis=-1)


def _first_bad(mask, *arrays):
    idx = np.unravel_index(np.argmax(mask), mask.shape) if mask.ndim else ()
    return tuple(float(np.broadcast_to(a, mask.shape)[idx]) for a in arrays)


class _Profile:
    family: str = ""

    def x_interval(self, s):
        """Open interval ``Omega_{h,s}`` of admissible axial offsets."""
        raise NotImplementedError

    def _check(self, s, x, closed=True):
        s, x = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(x, dtype=float))
        bad = ~self._param_ok(s)
        lo, hi = self.x_interval(np.where(bad, 1.0, s))
        if closed:
            bad |= (x < lo) | (x > hi)
        else:
            bad |= (x <= lo) | (x >= hi)
        if np.any(bad):
            ss, xx = _first_bad(bad, s, x)
            raise DomainError(f"{self.family}: (s={ss:g}, x={xx:g}) is outside the profile domain")
        return s, x

    def _param_ok(self, s):
        return s > 0

    def to_dict(self) -> dict:
        return {"family": self.family}

    def mu_spec(self) -> "MuSpec":
        raise ConfigurationError(f"{self.family} profile has no symmetric-curve form")


@dataclass(frozen=True)
class Sphere(_Profile):
    """``h = s**2 - x**2``: spheres of radius ``s``."""

    family = "sphere"

    def x_interval(self, s):
        s = np.asarray(s, dtype=float)
        return -s, s

    def h(self, s, x):
        s, x = self._check(s, x)
        return np.maximum(s**2 - x**2, 0.0)

    def grad(self, s, x):
        s, x = self._check(s, x)
        return 2.0 * s, -2.0 * x

    def ratio_deriv(self, s, x):
        s, x = self._check(s, x)
        return -1.0 / s + 0.0 * x

    def mu_spec(self):
        return MuSpec("sphere")


@dataclass(frozen=True)
class Spheroid(_Profile):
    """Spheroids with minor radius ``s`` and fixed linear eccentricity ``c``."""

    c: float = 2.0
    family = "spheroid"

    def __post_init__(self):
        if not self.c > 0:
            raise ConfigurationError(f"spheroid eccentricity must be positive, got {self.c}")

    def x_interval(self, s):
        b = np.sqrt(np.asarray(s, dtype=float) ** 2 + self.c**2)
        return -b, b

    def h(self, s, x):
        s, x = self._check(s, x)
        q = s**2 + self.c**2
        return s**2 / q * np.maximum(q - x**2, 0.0)

    def _denominator(self, s, x):
        c2 = self.c**2
        return c2**2 - c2 * (x**2 - 2.0 * s**2) + s**4

    def grad(self, s, x):
        s, x = self._check(s, x)
        q = s**2 + self.c**2
        h_s = 2.0 * s * self._denominator(s, x) / q**2
        h_x = -2.0 * x * s**2 / q
        return h_s, h_x

    def ratio_deriv(self, s, x):
        s, x = self._check(s, x)
        c2 = self.c**2
        num = c2**2 + c2 * (x**2 + 2.0 * s**2) + s**4
        return -s * (s**2 + c2) * num / self._denominator(s, x) ** 2

    def to_dict(self):
        return {"family": self.family, "c": self.c}

    def mu_spec(self):
        return MuSpec("spheroid", c=self.c)


@dataclass(frozen=True)
class Lemon(_Profile):
    """Surfaces of revolution of circular arcs with tips ``alpha`` apart.

    The profile is parametrized by ``p >= 0`` (distance of the arc's circle
    center from the axis); the surface's maximal radius is
    ``s = sqrt(alpha**2 + p**2) - p``.
    """

    alpha: float = 2.0
    family = "lemon"

    def __post_init__(self):
        if not self.alpha > 0:
            raise ConfigurationError(f"lemon tip distance must be positive, got {self.alpha}")

    def _param_ok(self, p):
        return p >= 0

    def x_interval(self, p):
        p = np.asarray(p, dtype=float)
        return np.full_like(p, -self.alpha), np.full_like(p, self.alpha)

    def _root(self, p, x):
        return np.sqrt(np.maximum(self.alpha**2 + p**2 - x**2, 0.0))

    def h(self, p, x):
        p, x = self._check(p, x)
        return (self._root(p, x) - p) ** 2

    def grad(self, p, x):
        p, x = self._check(p, x)
        r = self._root(p, x)
        h_p = 2.0 * (p / r - 1.0) * (r - p)
        h_x = -2.0 * x * (r - p) / r
        return h_p, h_x

    def ratio_deriv(self, p, x):
        p, x = self._check(p, x)
        r = self._root(p, x)
        return (p**2 + self.alpha**2 - p * r) / (r * (r - p) ** 2)

    def to_dict(self):
        return {"family": self.family, "alpha": self.alpha}

    def mu_spec(self):
        return MuSpec("lemon", alpha=self.alpha)


@dataclass(frozen=True)
class Cone(_Profile):
    """``h = s * x``: cones with vertex on the cylinder and slope ``s``."""

    family = "cone"

    def _param_ok(self, s):
        return np.isfinite(s)

    def x_interval(self, s):
        s = np.asarray(s, dtype=float)
        return np.zeros_like(s), np.full_like(s, np.inf)

    def h(self, s, x):
        s, x = self._check(s, x)
        return s * x

    def grad(self, s, x):
        s, x = self._check(s, x)
        return x + 0.0 * s, s + 0.0 * x

    def ratio_deriv(self, s, x):
        s, x = self._check(s, x)
        if np.any(x == 0):
            raise SingularRatioError("cone: h_s = x vanishes at x = 0")
        return -s / x**2


class TabulatedProfile(_Profile):
    """Profile sampled on a rectangular ``(s, x)`` grid.

    A bicubic spline supplies values and partial derivatives, so the Bolker
    audit can be run on profiles without a closed form.  ``Omega_{h,s}`` is
    the full tabulated ``x`` range for every ``s``.
    """

    family = "tabulated"

    def __init__(self, s, x, values):
        s = np.asarray(s, dtype=float)
        x = np.asarray(x, dtype=float)
        values = np.asarray(values, dtype=float)
        if values.shape != (s.size, x.size) or s.size < 4 or x.size < 4:
            raise ConfigurationError("tabulated profile needs values of shape (len(s), len(x)), at least 4x4")
        self.s_nodes, self.x_nodes, self.values = s, x, values
        self._spline = RectBivariateSpline(s, x, values, kx=3, ky=3)

    @classmethod
    def from_function(cls, func, s_range, x_range, shape=(201, 201)):
        s = np.linspace(*s_range, shape[0])
        x = np.linspace(*x_range, shape[1])
        ss, xx = np.meshgrid(s, x, indexing="ij")
        return cls(s, x, func(ss, xx))

    def _param_ok(self, s):
        return (s >= self.s_nodes[0]) & (s <= self.s_nodes[-1])

    def x_interval(self, s):
        s = np.asarray(s, dtype=float)
        return np.full_like(s, self.x_nodes[0]), np.full_like(s, self.x_nodes[-1])

    def _ev(self, s, x, ds=0, dx=0):
        s, x = self._check(s, x)
        return self._spline.ev(s, x, dx=ds, dy=dx)

    def h(self, s, x):
        return self._ev(s, x)

    def grad(self, s, x):
        return self._ev(s, x, ds=1), self._ev(s, x, dx=1)

    def ratio_deriv(self, s, x):
        h_s = self._ev(s, x, ds=1)
        h_x = self._ev(s, x, dx=1)
        h_xx = self._ev(s, x, dx=2)
        h_sx = self._ev(s, x, ds=1, dx=1)
        with np.errstate(divide="ignore", invalid="ignore"):
            return (h_xx * h_s - h_x * h_sx) / h_s**2

    def to_dict(self):
        return {
            "family": self.family,
            "s": self.s_nodes.tolist(),
            "x": self.x_nodes.tolist(),
            "values": self.values.tolist(),
        }


def h_eval(profile, s, x):
    """Evaluate ``h(s, x)``; raises :class:`DomainError` outside the closure of the domain."""
    return profile.h(s, x)


def h_grad(profile, s, x):
    """Return ``(h_s, h_x)``.  For the lemon ``h_s`` is the derivative in ``p``."""
    return profile.grad(s, x)


def ratio_deriv(profile, s, x):
    """``d/dx (h_x / h_s)``, the quantity that must not vanish for artifact-free imaging.

    Raises
    ------
    SingularRatioError
        If ``h_s`` is zero at a requested point.
    """
    h_s, _ = profile.grad(s, x)
    if np.any(np.asarray(h_s) == 0):
        raise SingularRatioError(f"{profile.family}: h_s vanishes, d/dx(h_x/h_s) undefined")
    return profile.ratio_deriv(s, x)


def lemon_s_from_p(p, alpha):
    """Maximal radius of the lemon with arc parameter ``p``; strictly decreasing in ``p``."""
    p = np.asarray(p, dtype=float)
    return np.sqrt(alpha**2 + p**2) - p


def lemon_p_from_s(s, alpha):
    s = np.asarray(s, dtype=float)
    return (alpha**2 - s**2) / (2.0 * s)


def surface_point(profile, s, center, phi, x3, radius=1.0):
    """Point of the surface ``R(s, y)`` at azimuth ``phi`` and height ``x3``.

    ``center`` is ``(theta, y3)``; the axis passes through
    ``radius * (cos theta, sin theta)``.
    """
    theta, y3 = center
    rho = np.sqrt(profile.h(s, np.asarray(x3, dtype=float) - y3))
    phi = np.asarray(phi, dtype=float)
    x1 = radius * np.cos(theta) + rho * np.cos(phi)
    x2 = radius * np.sin(theta) + rho * np.sin(phi)
    x1, x2, x3 = np.broadcast_arrays(x1, x2, np.asarray(x3, dtype=float))
    return np.stack([x1, x2, x3], axis=-1)


def psi(profile, s, center, point, radius=1.0):
    """Defining function ``|x' - y'|**2 - h(s, x3 - y3)``; zero on the surface."""
    theta, y3 = center
    point = np.asarray(point, dtype=float)
    d1 = point[..., 0] - radius * np.cos(theta)
    d2 = point[..., 1] - radius * np.sin(theta)
    return d1**2 + d2**2 - profile.h(s, point[..., 2] - y3)


class MuValues(NamedTuple):
    mu: np.ndarray
    tau: np.ndarray
    mu_t: np.ndarray
    g: np.ndarray
    kappa: np.ndarray


@dataclass(frozen=True)
class MuSpec:
    """Half-height curve ``mu(s, t) = sqrt(s - t) * tau(s, t)``.

    ``s`` is the maximal horizontal radius of the surface and ``t`` the
    radius of a horizontal circle on it; ``mu`` is the axial offset of that
    circle from the center.  The arc-length weight
    ``g = sqrt(1 + mu_t**2)`` factors as ``kappa / sqrt(s - t)`` with
    ``kappa`` smooth and positive, ``kappa(s, s) = |tau(s, s)| / 2``.
    """

    family: str
    c: float | None = None
    alpha: float | None = None

    def __post_init__(self):
        if self.family not in ("sphere", "spheroid", "lemon"):
            raise ConfigurationError(f"no symmetric-curve form for family {self.family!r}")
        if self.family == "spheroid" and not (self.c and self.c > 0):
            raise ConfigurationError("spheroid requires c > 0")
        if self.family == "lemon" and not (self.alpha and self.alpha > 0):
            raise ConfigurationError("lemon requires alpha > 0")

    def _scale(self, s):
        # spheroid stretch factor sqrt(1 + (c/s)^2); 1 for spheres
        if self.family == "spheroid":
            return np.sqrt(1.0 + (self.c / s) ** 2)
        return 1.0

    def tau(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.family == "lemon":
            return np.sqrt(t + self.alpha**2 / s)
        return self._scale(s) * np.sqrt(s + t)

    def tau_t(self, s, t):
        s = np.asarray(s, dtype=float)
        t = np.asarray(t, dtype=float)
        if self.family == "lemon":
            return 0.5 / np.sqrt(t + self.alpha**2 / s)
        return 0.5 * self._scale(s) / np.sqrt(s + t)

    def mu(self, s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        return np.sqrt(np.maximum(s - t, 0.0)) * self.tau(s, t)

    def kappa(self, s, t):
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        d = np.maximum(s - t, 0.0)
        return np.sqrt(d + (d * self.tau_t(s, t) - 0.5 * self.tau(s, t)) ** 2)

    def max_height(self, s):
        """Axial half-height of the surface, ``mu(s, 0)``."""
        return self.mu(s, 0.0)

    def profile(self):
        if self.family == "sphere":
            return Sphere()
        if self.family == "spheroid":
            return Spheroid(self.c)
        return Lemon(self.alpha)

    def profile_parameter(self, s):
        """Profile parameter describing the same surface as radius ``s``."""
        if self.family == "lemon":
            return lemon_p_from_s(s, self.alpha)
        return np.asarray(s, dtype=float)

    def evaluate(self, s, t) -> MuValues:
        s, t = np.broadcast_arrays(np.asarray(s, dtype=float), np.asarray(t, dtype=float))
        if np.any(t > s):
            ss, tt = _first_bad(t > s, s, t)
            raise DomainError(f"mu({self.family}): need t <= s, got (s={ss:g}, t={tt:g})")
        d = s - t
        tau = self.tau(s, t)
        lead = d * self.tau_t(s, t) - 0.5 * tau
        kappa = np.sqrt(d + lead**2)
        root = np.sqrt(d)
        at_diag = d == 0
        safe = np.where(at_diag, 1.0, root)
        mu_t = np.where(at_diag, -np.inf, lead / safe)
        g = np.where(at_diag, np.inf, kappa / safe)
        return MuValues(root * tau, tau, mu_t, g, kappa)

    def to_dict(self):
        out = {"family": self.family}
        if self.family == "spheroid":
            out["c"] = self.c
        if self.family == "lemon":
            out["alpha"] = self.alpha
        return out


def mu_eval(mu: MuSpec, s, t) -> MuValues:
    """Evaluate ``(mu, tau, mu_t, g, kappa)``.  On the diagonal ``t == s``
    ``g`` and ``mu_t`` are reported as infinite."""
    return mu.evaluate(s, t)


def profile_from_dict(cfg: dict):
    family = str(cfg.get("family", "")).lower()
    if family == "sphere":
        return Sphere()
    if family == "spheroid":
        return Spheroid(float(cfg.get("c", 2.0)))
    if family == "lemon":
        return Lemon(float(cfg.get("alpha", 2.0)))
    if family == "cone":
        return Cone()
    if family == "tabulated":
        return TabulatedProfile(cfg["s"], cfg["x"], cfg["values"])
    raise ConfigurationError(f"unknown profile family {cfg.get('family')!r}")


def mu_from_dict(cfg: dict) -> MuSpec:
    family = str(cfg.get("family", "")).lower()
    if family == "spheroid":
        return MuSpec("spheroid", c=float(cfg.get("c", 2.0)))
    if family == "lemon":
        return MuSpec("lemon", alpha=float(cfg.get("alpha", 2.0)))
    return MuSpec(family)
