"""Holographic wavefront control for intelligent reflecting surfaces."""

from .geometry import (
    AngularGrid,
    ApertureGrid,
    DirectionAngles,
    Point3,
    PointGrid,
    PropagationContext,
    direction_to_unit_vector,
    element_positions,
    fresnel_bounds,
)
from .propagation import (
    ComplexField,
    SourceModel,
    array_factor,
    greens_kernel,
    incident_field,
    radiate,
    reflect_and_radiate,
)
from .synthesis import (
    FocalSpec,
    PhaseProfile,
    SteeringSpec,
    focusing_profile,
    quantize_profile,
    randomized_profile,
    steering_profile,
)

__version__ = "0.1.0"

__all__ = [
    "AngularGrid", "ApertureGrid", "DirectionAngles", "Point3", "PointGrid", "PropagationContext",
    "direction_to_unit_vector", "element_positions", "fresnel_bounds",
    "ComplexField", "SourceModel", "array_factor", "greens_kernel", "incident_field", "radiate",
    "reflect_and_radiate",
    "FocalSpec", "PhaseProfile", "SteeringSpec", "focusing_profile", "quantize_profile",
    "randomized_profile", "steering_profile",
]
