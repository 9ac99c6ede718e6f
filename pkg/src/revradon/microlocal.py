"""Numerical audit of the Bolker hypotheses and mirror-artifact prediction.

For a profile ``h`` the transform satisfies the Bolker condition when

1. ``h(s, x) -> 0`` as ``x`` approaches the boundary of ``Omega_{h,s}``,
3. ``h_s != 0``,
4. ``x -> h_x / h_s`` is injective,
5. ``d/dx (h_x / h_s) != 0``,

on the whole parameter range (the remaining hypothesis concerns the
support of ``f`` and is handled by the phantom checks).  Each condition is
audited on a grid: nonvanishing via the grid minimum plus sign changes
between neighbours, injectivity via strict monotonicity along each row,
and the boundary limit by comparing boundary cells at two refinements.

Artifacts appear at reflections of a singularity in the planes tangent to
the cylinder of centers; :func:`predict_artifact_curve` traces them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError
from .geometry import CenterSurface, Cone

CONDITIONS = ("boundary_limit", "h_s_nonzero", "ratio_injective", "ratio_deriv_nonzero")


@dataclass
class Verdict:
    passed: bool
    worst_s: float
    worst_x: float
    worst_value: float
    detail: str = ""

    def to_dict(self):
        return {
            "passed": bool(self.passed),
            "worst_s": float(self.worst_s),
            "worst_x": float(self.worst_x),
            "worst_value": float(self.worst_value),
            "detail": self.detail,
        }


@dataclass
class BolkerReport:
    family: str
    verdicts: dict
    grid: dict
    tol: float
    notes: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts.values())

    def to_dict(self):
        return {
            "family": self.family,
            "passed": self.passed,
            "conditions": {k: v.to_dict() for k, v in self.verdicts.items()},
            "grid": self.grid,
            "tol": self.tol,
            "notes": list(self.notes),
        }

    def to_json(self):
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)

    def table(self) -> str:
        lines = [f"Bolker audit: {self.family}", f"{'condition':<22}{'verdict':<9}{'worst (s, x)':<28}value"]
        for name, v in self.verdicts.items():
            where = f"({v.worst_s:.6g}, {v.worst_x:.6g})"
            lines.append(f"{name:<22}{'pass' if v.passed else 'FAIL':<9}{where:<28}{v.worst_value:.3e}")
        lines.append(f"overall: {'pass' if self.passed else 'FAIL'}")
        return "\n".join(lines)


def _x_cells(profile, s, n, x_max):
    """Cell centers of ``n`` equal cells across ``Omega_{h,s}`` (clipped to ``x_max``)."""
    lo, hi = profile.x_interval(s)
    lo = np.maximum(lo, -x_max)
    hi = np.minimum(hi, x_max)
    u = (np.arange(n) + 0.5) / n
    return lo[:, None] + (hi - lo)[:, None] * u[None, :]


def _nonzero(values, S, X, tol):
    """Minimum of ``|values|`` and sign changes between grid neighbours."""
    scale = float(np.max(np.abs(values)))
    thresh = tol * max(scale, 1e-300)
    a = np.abs(values)
    k = np.unravel_index(np.argmin(a), a.shape)
    worst = Verdict(bool(a[k] > thresh), S[k], X[k], float(values[k]))
    sg = np.sign(values)
    for axis in (0, 1):
        flip = np.diff(sg, axis=axis) != 0
        if np.any(flip):
            i = np.argwhere(flip)[0]
            j = i.copy()
            j[axis] += 1
            i, j = tuple(i), tuple(j)
            w = i if a[i] <= a[j] else j
            return Verdict(False, S[w], X[w], float(values[w]), "sign change between grid neighbours")
    if not worst.passed:
        worst.detail = f"|value| <= {thresh:.2e}"
    return worst


def _monotone(ratio, S, X, tol):
    d = np.diff(ratio, axis=1)
    scale = max(float(np.max(np.abs(d))), 1e-300)
    bad = None
    for row in range(d.shape[0]):
        sg = np.sign(d[row])
        if np.all(sg > 0) or np.all(sg < 0):
            if np.min(np.abs(d[row])) > tol * scale:
                continue
        k = int(np.argmin(np.abs(d[row]))) if np.all(sg == sg[0]) else int(np.argmax(sg != sg[0]))
        bad = (row, k)
        break
    if bad is None:
        k = np.unravel_index(np.argmin(np.abs(d)), d.shape)
        return Verdict(True, S[k], X[k], float(d[k]), "strict monotonicity on every row (implies injective)")
    return Verdict(False, S[bad], X[bad], float(d[bad]), "ratio not strictly monotone in x")


def _boundary(profile, s, n, x_max):
    """Max of ``h`` on boundary-adjacent cells at cell widths ``w`` and ``w/4``."""
    out = []
    for m in (n, 4 * n):
        X = _x_cells(profile, s, m, x_max)
        S = np.broadcast_to(s[:, None], X.shape)
        lo, hi = profile.x_interval(s)
        edge = np.zeros(X.shape, dtype=bool)
        if np.all(np.isfinite(lo)) and np.all(lo > -x_max):
            edge[:, 0] = True
        if np.all(np.isfinite(hi)) and np.all(hi < x_max):
            edge[:, -1] = True
        if not np.any(edge):
            raise ConfigurationError("profile domain has no finite boundary inside the audit window")
        h = np.abs(profile.h(S, X))
        hmax = np.where(edge, h, -np.inf)
        k = np.unravel_index(np.argmax(hmax), h.shape)
        out.append((float(h[k]), float(S[k]), float(X[k])))
    (coarse, s0, x0), (fine, s1, x1) = out
    ok = fine <= 0.5 * coarse or coarse == 0.0
    return Verdict(bool(ok), s1, x1, fine, f"boundary max of h {coarse:.3e} -> {fine:.3e} under 4x refinement")


def check_bolker(profile, s_range, x_resolution=64, tol=1e-9, s_resolution=None, x_max=None) -> BolkerReport:
    """Audit the Bolker hypotheses of ``profile`` over ``s_range``.

    ``s`` is sampled at ``s_resolution`` (default ``x_resolution``) points
    including both ends; ``x`` at cell centers of ``Omega_{h,s}``.
    ``x_max`` truncates unbounded domains (cone, default 2).  ``tol`` is
    relative to the grid maximum of the audited quantity.
    """
    if x_resolution < 16:
        raise ConfigurationError("x_resolution must be >= 16")
    n_s = s_resolution or x_resolution
    s0, s1 = (float(v) for v in s_range)
    if not (np.isfinite(s0) and np.isfinite(s1)) or s1 <= s0 or n_s < 2:
        raise ConfigurationError("degenerate s range")
    if x_max is None:
        x_max = 2.0 if isinstance(profile, Cone) else np.inf
    s = np.linspace(s0, s1, n_s)
    X = _x_cells(profile, s, x_resolution, x_max)
    S = np.broadcast_to(s[:, None], X.shape)
    h_s, h_x = profile.grad(S, X)
    h_s = np.broadcast_to(h_s, X.shape)
    verdicts = {"boundary_limit": _boundary(profile, s, x_resolution, x_max)}
    verdicts["h_s_nonzero"] = _nonzero(h_s, S, X, tol)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.broadcast_to(h_x, X.shape) / h_s
        rd = np.broadcast_to(profile.ratio_deriv(S, X), X.shape)
    if verdicts["h_s_nonzero"].passed:
        verdicts["ratio_injective"] = _monotone(ratio, S, X, tol)
        verdicts["ratio_deriv_nonzero"] = _nonzero(rd, S, X, tol)
    else:
        v = verdicts["h_s_nonzero"]
        for key in ("ratio_injective", "ratio_deriv_nonzero"):
            verdicts[key] = Verdict(False, v.worst_s, v.worst_x, float("nan"), "ratio undefined where h_s = 0")
    grid = {
        "s_range": [s0, s1],
        "s_resolution": int(n_s),
        "x_resolution": int(x_resolution),
        "x_max": None if not np.isfinite(x_max) else float(x_max),
        "x_sampling": "cell centers of Omega_h,s",
    }
    notes = ["injectivity certified by strict monotonicity on each grid row"]
    return BolkerReport(profile.family, verdicts, grid, float(tol), notes)


# ------------------------------------------------------------ mirror curves


def tangent_reflection(point, theta, surface: CenterSurface = CenterSurface()):
    """Reflect ``point`` in the plane tangent to the cylinder at angle ``theta``."""
    x = np.asarray(point, dtype=float)
    n = surface.normal(theta)
    dist = np.sum(x[..., :2] * n[..., :2], axis=-1) - surface.radius
    return x - 2.0 * dist[..., None] * n


@dataclass
class ArtifactCurve:
    source: np.ndarray
    theta: np.ndarray
    points: np.ndarray

    @property
    def samples(self):
        return [(float(t), p.copy()) for t, p in zip(self.theta, self.points)]

    def rows(self):
        return [(float(t), *map(float, p)) for t, p in zip(self.theta, self.points)]


def predict_artifact_curve(point, theta_samples=360, surface: CenterSurface = CenterSurface()) -> ArtifactCurve:
    """Mirror images of ``point`` for ``theta`` sweeping ``[0, 2 pi]`` (both ends included)."""
    if theta_samples < 8:
        raise ConfigurationError("theta_samples must be >= 8")
    src = np.asarray(point, dtype=float)
    theta = np.linspace(0.0, 2.0 * np.pi, int(theta_samples))
    pts = tangent_reflection(np.broadcast_to(src, (theta.size, 3)), theta, surface)
    pts[-1] = pts[0]
    return ArtifactCurve(src, theta, pts)
