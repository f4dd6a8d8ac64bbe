"""Tomography of wave-equation initial data from null-ray integrals.

A 2-D acoustic field evolves from an unknown initial image under the
leapfrog wave scheme; observations are integrals of the field along
unit-speed rays joining the initial and final time planes.  The package
provides the forward model, its adjoint, reconstruction solvers and
spectral diagnostics.
"""
from .analysis import masked_relative_error, picard_data, singular_spectrum, visible_mask
from .grid import GridError, GridSpec, make_grid
from .model import ForwardModel, NoiseSpec, PhantomSpec, add_noise, make_phantom, relative_error
from .raytrace import DetectorMask, build_ray_system, enumerate_rays
from .wave import WavePropagator

__version__ = "0.1.0"

__all__ = [
    "DetectorMask",
    "ForwardModel",
    "GridError",
    "GridSpec",
    "NoiseSpec",
    "PhantomSpec",
    "WavePropagator",
    "add_noise",
    "build_ray_system",
    "enumerate_rays",
    "make_grid",
    "make_phantom",
    "masked_relative_error",
    "picard_data",
    "relative_error",
    "singular_spectrum",
    "visible_mask",
]
