"""Discretized operators of the factored forward model and its oracles."""
from .circular import CircularMeanOperator, circular_mean_adjoint, circular_mean_forward, circular_mean_operator
from .cone import SpectralSinogram, cone_forward, cone_slice_recover
from .fourier import axial_fft, axial_ifft, axial_transform_at
from .grids import ScanGrid, Sinogram, Volume, axial_frequencies, check_axial_room, check_support
from .projectors import (ACCURATE_REFINE, HALVES, forward_project, forward_project_direct,
                         unique_frequency_matrices, validate_volume)
from .volterra import VolterraMatrix, volterra_matrix
