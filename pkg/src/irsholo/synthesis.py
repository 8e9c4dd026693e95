"""Phase-hologram synthesis for beam steering, near-field focusing and defocusing."""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from .geometry import (
    ApertureGrid,
    DirectionAngles,
    FresnelRegionError,
    Point3,
    PropagationContext,
    direction_to_unit_vector,
    fresnel_bounds,
    vector_to_direction,
)
from .propagation import ComplexField


def wrap_phase(phase):
    """Wrap radians into ``[-pi, pi)``."""
    wrapped = np.mod(np.asarray(phase, dtype=float) + math.pi, 2.0 * math.pi) - math.pi
    # mod can round up to exactly 2*pi for tiny negative inputs
    return np.where(wrapped >= math.pi, wrapped - 2.0 * math.pi, wrapped)


@dataclass(frozen=True)
class PhaseProfile:
    """Per-element reflection phases as an ``(M, N)`` array, radians in [-pi, pi)."""

    phases: np.ndarray
    quantization_bits: Optional[int] = None

    def __post_init__(self):
        ph = np.asarray(self.phases, dtype=float)
        if ph.ndim != 2:
            raise ValueError("phases must be a 2-D (M, N) array")
        object.__setattr__(self, "phases", wrap_phase(ph))

    @property
    def shape(self) -> tuple[int, int]:
        return self.phases.shape

    def flat(self) -> np.ndarray:
        return self.phases.ravel()

    def shifted(self, offset: float) -> "PhaseProfile":
        return PhaseProfile(self.phases + offset, self.quantization_bits)


@dataclass(frozen=True)
class SteeringSpec:
    direction: DirectionAngles


@dataclass(frozen=True)
class FocalSpec:
    direction: DirectionAngles
    distance: float

    def __post_init__(self):
        if not self.distance > 0:
            raise ValueError("focal distance must be > 0")

    @classmethod
    def from_point(cls, point, origin: Point3 = Point3(0.0, 0.0, 0.0)) -> "FocalSpec":
        rel = np.asarray(point, dtype=float) - np.asarray(origin, dtype=float)
        return cls(vector_to_direction(rel), float(np.linalg.norm(rel)))

    def focal_point(self, origin: Point3 = Point3(0.0, 0.0, 0.0)) -> np.ndarray:
        return np.asarray(origin, dtype=float) + self.distance * direction_to_unit_vector(self.direction)

    def fresnel_warning(self, aperture: ApertureGrid, ctx: PropagationContext) -> Optional[str]:
        """Message when the focal range is outside the radiative near field, else None."""
        try:
            lower, upper = fresnel_bounds(aperture, ctx)
        except FresnelRegionError as exc:
            return str(exc)
        if lower < self.distance < upper:
            return None
        return (
            f"focal distance {self.distance:g} m is outside the radiative near field "
            f"({lower:.4g} m, {upper:.4g} m)"
        )


def _reference_values(aperture: ApertureGrid, reference: ComplexField) -> np.ndarray:
    values = np.asarray(reference.values, dtype=complex).ravel()
    if values.size != aperture.size:
        raise ValueError(f"reference has {values.size} samples for {aperture.size} elements")
    return values


def steering_profile(
    aperture: ApertureGrid,
    reference: ComplexField,
    spec: SteeringSpec | DirectionAngles,
    ctx: PropagationContext,
) -> PhaseProfile:
    """Conjugate-phase hologram that co-phases every element toward ``spec``.

    xi_i = -angle(E_i * exp(+j k r_i . u)); with the far-field kernel
    exp(+j k r_i . u) each re-radiated term then has phase zero at ``u``.
    """
    direction = spec.direction if isinstance(spec, SteeringSpec) else spec
    e = _reference_values(aperture, reference)
    rel = aperture.positions() - np.asarray(aperture.origin, dtype=float)
    u = direction_to_unit_vector(direction)
    progressive = ctx.wavenumber * (rel[:, 0] * u[0] + rel[:, 1] * u[1])
    xi = -np.angle(e * np.exp(1j * progressive))
    return PhaseProfile(xi.reshape(aperture.shape))


def focusing_profile(
    aperture: ApertureGrid,
    reference: ComplexField,
    spec: FocalSpec,
    ctx: PropagationContext,
) -> PhaseProfile:
    """Hologram that co-phases every element at the focal point.

    The virtual source at the focus back-propagates
    ``E_ap = exp(+j k R) / (4 pi R)`` onto the aperture; the interference phase
    ``angle(E * conj(E_ap))`` is conjugated before it is applied.
    """
    e = _reference_values(aperture, reference)
    focus = spec.focal_point(aperture.origin)
    r = np.linalg.norm(aperture.positions() - focus, axis=1)
    if np.any(r == 0.0):
        raise ValueError("focal point coincides with an aperture element")
    if abs(focus[2] - aperture.origin.z) <= 1e-12 * spec.distance:
        raise ValueError("focal point lies in the aperture plane")
    e_ap = np.exp(1j * ctx.wavenumber * r) / (4.0 * math.pi * r)
    xi = -np.angle(e * np.conj(e_ap))
    return PhaseProfile(xi.reshape(aperture.shape))


def randomized_profile(aperture: ApertureGrid, seed: int) -> PhaseProfile:
    """Uniform phases in [-pi, pi) from a counter-based generator keyed on ``seed``.

    Element ``i`` always takes the ``i``-th draw, so the profile does not depend
    on evaluation order.
    """
    gen = np.random.Generator(np.random.Philox(key=int(seed) & ((1 << 128) - 1)))
    phases = gen.uniform(-math.pi, math.pi, size=aperture.size)
    return PhaseProfile(phases.reshape(aperture.shape))


def quantization_levels(bits: int) -> np.ndarray:
    if bits < 1:
        raise ValueError(f"bits must be >= 1, got {bits}")
    n = 1 << bits
    return -math.pi + 2.0 * math.pi * np.arange(n) / n


def quantize_profile(profile: PhaseProfile, bits: int) -> PhaseProfile:
    """Snap each phase to the nearest of ``2**bits`` uniform levels on the
    circle; exact ties go to the lower level."""
    levels = quantization_levels(bits)
    n = levels.size
    step = 2.0 * math.pi / n
    q = (profile.phases + math.pi) / step
    idx = np.ceil(q - 0.5).astype(np.int64) % n
    return PhaseProfile(levels[idx], quantization_bits=bits)


def save_profile(profile: PhaseProfile, path) -> Path:
    """Write one row per aperture row (fixed m), radians, 9 significant digits."""
    path = Path(path)
    lines = [" ".join(f"{v:.9g}" for v in row) for row in profile.phases + 0.0]
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def load_profile(path) -> PhaseProfile:
    data = np.loadtxt(path, ndmin=2)
    return PhaseProfile(data)
