"""Run configuration: one self-describing JSON object per run.

Schema (version 1); every section is optional and falls back to the
defaults below::

    {
      "schema_version": 1,
      "family": {"family": "spheroid", "c": 2.0},
      "grid": {"n": 33, "half_width": 1.0, "y_half": 5.0,
               "s_range": [0.2, 2.2], "n_theta": 64, "radius": 1.0},
      "phantom": {"kind": "hollow_cuboid", "half_widths": [0.45, 0.45, 0.9],
                  "wall": 0.15, "center": [0, 0, 0], "position": [0, 0, 0],
                  "support_margin": 0.0},
      "noise": {"gamma": 5.0, "seed": 0},
      "simulation": {"volterra_refine": 1},
      "inversion": {"volterra_alpha": null, "m_solver": "cgls_tv", ...},
      "bolker": {"s_range": null, "x_resolution": 64, "tol": 1e-9},
      "artifacts": {"source": [0, 0, 0], "theta_samples": 361},
      "condnum": {"families": null},
      "output_dir": "out"
    }

``inversion.volterra_alpha = null`` picks the Tikhonov weight from
:data:`ALPHA_BY_NOISE` (nearest tabulated noise level).
"""
from __future__ import annotations

import copy
from dataclasses import dataclass, field

from .errors import ConfigurationError
from .experiments import PhantomSpec
from .geometry import MuSpec, mu_from_dict, profile_from_dict
from .inversion import InversionConfig
from .operators.grids import ScanGrid

SCHEMA_VERSION = 1

# Tikhonov weight per noise level (percent)
ALPHA_BY_NOISE = {0.0: 1e-6, 1.0: 1e-3, 2.0: 1e-3, 5.0: 1e-2, 10.0: 1e-2}

# parameter ranges audited when the config gives none
BOLKER_RANGES = {
    "sphere": (0.2, 2.2),
    "spheroid": (0.2, 2.2),
    "lemon": (0.0, 5.0),
    "cone": (0.2, 2.2),
}

SECTIONS = ("schema_version", "family", "grid", "phantom", "noise", "simulation", "inversion", "bolker",
            "artifacts", "condnum", "output_dir")


def alpha_for_noise(gamma: float) -> float:
    key = min(ALPHA_BY_NOISE, key=lambda g: (abs(g - gamma), g))
    return ALPHA_BY_NOISE[key]


def _check_keys(name, d, allowed):
    if not isinstance(d, dict):
        raise ConfigurationError(f"section {name!r} must be an object")
    extra = set(d) - set(allowed)
    if extra:
        raise ConfigurationError(f"unknown keys in {name!r}: {sorted(extra)}")


@dataclass
class RunConfig:
    family: dict = field(default_factory=lambda: {"family": "spheroid", "c": 2.0})
    grid: ScanGrid = field(default_factory=ScanGrid)
    phantom: PhantomSpec = field(default_factory=PhantomSpec)
    gamma: float = 5.0
    seed: int = 0
    sim_refine: int = 1
    inversion: InversionConfig = field(default_factory=InversionConfig)
    bolker: dict = field(default_factory=lambda: {"s_range": None, "x_resolution": 64, "tol": 1e-9})
    artifacts: dict = field(default_factory=lambda: {"source": [0.0, 0.0, 0.0], "theta_samples": 361})
    condnum_families: list | None = None
    output_dir: str = "out"

    # ------------------------------------------------------------ parsing
    @classmethod
    def from_dict(cls, raw: dict) -> "RunConfig":
        raw = copy.deepcopy(raw)
        _check_keys("config", raw, SECTIONS)
        version = raw.get("schema_version", SCHEMA_VERSION)
        if version != SCHEMA_VERSION:
            raise ConfigurationError(f"unsupported schema_version {version!r}")
        cfg = cls()
        if "family" in raw:
            fam = raw["family"]
            _check_keys("family", fam, ("family", "c", "alpha"))
            profile_from_dict(fam)  # validates the name and parameters
            cfg.family = {k: (float(v) if k != "family" else str(v).lower()) for k, v in fam.items()}
        if "grid" in raw:
            g = raw["grid"]
            _check_keys("grid", g, ScanGrid.__dataclass_fields__)
            cfg.grid = ScanGrid.from_dict(g)
        if "phantom" in raw:
            cfg.phantom = PhantomSpec.from_dict(raw["phantom"])
        noise = raw.get("noise", {})
        _check_keys("noise", noise, ("gamma", "seed"))
        cfg.gamma = float(noise.get("gamma", cfg.gamma))
        cfg.seed = int(noise.get("seed", cfg.seed))
        if cfg.gamma < 0:
            raise ConfigurationError("noise.gamma must be >= 0")
        sim = raw.get("simulation", {})
        _check_keys("simulation", sim, ("volterra_refine",))
        cfg.sim_refine = int(sim.get("volterra_refine", cfg.sim_refine))
        if cfg.sim_refine < 1:
            raise ConfigurationError("simulation.volterra_refine must be >= 1")
        inv = dict(raw.get("inversion", {}))
        if inv.get("volterra_alpha") is None:
            inv["volterra_alpha"] = alpha_for_noise(cfg.gamma)
        cfg.inversion = InversionConfig.from_dict(inv)
        if "bolker" in raw:
            _check_keys("bolker", raw["bolker"], ("s_range", "x_resolution", "tol"))
            cfg.bolker.update(raw["bolker"])
        if "artifacts" in raw:
            _check_keys("artifacts", raw["artifacts"], ("source", "theta_samples"))
            cfg.artifacts.update(raw["artifacts"])
            if len(cfg.artifacts["source"]) != 3:
                raise ConfigurationError("artifacts.source must be a 3-vector")
        if "condnum" in raw:
            _check_keys("condnum", raw["condnum"], ("families",))
            cfg.condnum_families = raw["condnum"].get("families")
        cfg.output_dir = str(raw.get("output_dir", cfg.output_dir))
        return cfg

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "family": dict(self.family),
            "grid": self.grid.to_dict(),
            "phantom": self.phantom.to_dict(),
            "noise": {"gamma": self.gamma, "seed": self.seed},
            "simulation": {"volterra_refine": self.sim_refine},
            "inversion": self.inversion.to_dict(),
            "bolker": {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.bolker.items()},
            "artifacts": {"source": [float(v) for v in self.artifacts["source"]],
                          "theta_samples": int(self.artifacts["theta_samples"])},
            "condnum": {"families": self.condnum_families},
            "output_dir": self.output_dir,
        }

    # ------------------------------------------------------------ helpers
    @property
    def profile(self):
        return profile_from_dict(self.family)

    @property
    def mu(self) -> MuSpec:
        if self.family["family"] == "cone":
            raise ConfigurationError("the cone family has no Volterra pipeline; use cone_forward")
        return mu_from_dict(self.family)

    def bolker_range(self):
        r = self.bolker.get("s_range")
        return tuple(r) if r is not None else BOLKER_RANGES.get(self.family["family"], self.grid.s_range)

    def condnum_mus(self):
        fams = self.condnum_families or [
            {"family": "sphere"}, {"family": "spheroid", "c": 2.0}, {"family": "lemon", "alpha": 2.0}]
        return [mu_from_dict(f) for f in fams]


def default_config() -> dict:
    return RunConfig.from_dict({}).to_dict()
