"""Generalized Radon transforms over surfaces of revolution with centers on a cylinder.

Forward models (factored Fourier pipeline and direct quadrature), inversion
by per-frequency Volterra solves plus circular-mean inversion, Bolker
audits, mirror-artifact prediction and experiment tooling.
"""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .geometry import (CenterSurface, Cone, Lemon, MuSpec, Sphere, Spheroid, TabulatedProfile, h_eval, h_grad,
                       mu_eval, ratio_deriv, surface_point)
from .inversion import InversionConfig, reconstruct
from .microlocal import check_bolker, predict_artifact_curve, tangent_reflection
from .operators import ScanGrid, Sinogram, Volume, forward_project, forward_project_direct

__all__ = [
    "CenterSurface", "Cone", "Lemon", "MuSpec", "Sphere", "Spheroid", "TabulatedProfile", "h_eval", "h_grad",
    "mu_eval", "ratio_deriv", "surface_point", "InversionConfig", "reconstruct", "check_bolker",
    "predict_artifact_curve", "tangent_reflection", "ScanGrid", "Sinogram", "Volume", "forward_project",
    "forward_project_direct",
]
