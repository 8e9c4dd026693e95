"""Aperture and observation geometry, angular conventions and Fresnel limits.

Angles follow the usual reflecting-surface convention: ``theta`` is measured
from broadside (+z), ``phi`` in the xy-plane from +x. The aperture lies in the
plane ``z = origin.z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

SPEED_OF_LIGHT = 299_792_458.0


class FresnelRegionError(ValueError):
    """Raised when an aperture is too small to have a radiative near field."""


class Point3(NamedTuple):
    x: float
    y: float
    z: float


class DirectionAngles(NamedTuple):
    """Direction in radians; negative ``theta`` is allowed (mirror of ``phi + pi``)."""

    theta: float
    phi: float

    @classmethod
    def from_degrees(cls, theta_deg: float, phi_deg: float) -> "DirectionAngles":
        return cls(math.radians(theta_deg), math.radians(phi_deg))

    def degrees(self) -> tuple[float, float]:
        return math.degrees(self.theta), math.degrees(self.phi)


@dataclass(frozen=True)
class PropagationContext:
    frequency: float
    wave_speed: float = SPEED_OF_LIGHT

    def __post_init__(self):
        if not self.frequency > 0:
            raise ValueError(f"frequency must be > 0, got {self.frequency}")
        if not self.wave_speed > 0:
            raise ValueError(f"wave_speed must be > 0, got {self.wave_speed}")

    @property
    def wavelength(self) -> float:
        return self.wave_speed / self.frequency

    @property
    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength


@dataclass(frozen=True)
class ApertureGrid:
    """Regular M x N lattice of reflecting elements centered on ``origin``.

    Element order is row-major over ``(m, n)``: ``m`` indexes x (rows), ``n``
    indexes y (columns), so ``positions().reshape(M, N, 3)`` recovers the grid.
    """

    count_x: int
    count_y: int
    spacing_x: float
    spacing_y: float
    origin: Point3 = Point3(0.0, 0.0, 0.0)

    def __post_init__(self):
        if self.count_x < 1 or self.count_y < 1:
            raise ValueError("aperture needs at least one element along each axis")
        if not (self.spacing_x > 0 and self.spacing_y > 0):
            raise ValueError("element spacings must be > 0")
        object.__setattr__(self, "origin", Point3(*map(float, self.origin)))

    @classmethod
    def square(cls, count: int, spacing: float) -> "ApertureGrid":
        return cls(count, count, spacing, spacing)

    @property
    def shape(self) -> tuple[int, int]:
        return self.count_x, self.count_y

    @property
    def size(self) -> int:
        return self.count_x * self.count_y

    def local_offsets(self) -> tuple[np.ndarray, np.ndarray]:
        """Centered x and y offsets of the grid lines."""
        xs = (np.arange(self.count_x) - (self.count_x - 1) / 2.0) * self.spacing_x
        ys = (np.arange(self.count_y) - (self.count_y - 1) / 2.0) * self.spacing_y
        return xs, ys

    def positions(self) -> np.ndarray:
        xs, ys = self.local_offsets()
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        pts = np.empty((self.size, 3))
        pts[:, 0] = gx.ravel() + self.origin.x
        pts[:, 1] = gy.ravel() + self.origin.y
        pts[:, 2] = self.origin.z
        return pts

    @property
    def extent(self) -> float:
        """Aperture size D: the largest distance between two elements."""
        return math.hypot((self.count_x - 1) * self.spacing_x, (self.count_y - 1) * self.spacing_y)


def element_positions(aperture: ApertureGrid) -> np.ndarray:
    """(M*N, 3) array of element centres in row-major order."""
    return aperture.positions()


def fresnel_bounds(aperture: ApertureGrid | float, ctx: PropagationContext) -> tuple[float, float]:
    """Radiative near-field interval ``(0.62 sqrt(D^3/lambda), 2 D^2/lambda)``.

    ``aperture`` may be an :class:`ApertureGrid` or the size D in meters.
    """
    size = aperture.extent if isinstance(aperture, ApertureGrid) else float(aperture)
    if not size > 0:
        raise FresnelRegionError("aperture size is zero; a single element has no Fresnel region")
    lam = ctx.wavelength
    return 0.62 * math.sqrt(size**3 / lam), 2.0 * size**2 / lam


def direction_to_unit_vector(direction: DirectionAngles) -> np.ndarray:
    theta, phi = direction
    st = math.sin(theta)
    return np.array([st * math.cos(phi), st * math.sin(phi), math.cos(theta)])


def unit_vectors(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Vectorised :func:`direction_to_unit_vector`; returns shape ``theta.shape + (3,)``."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    st = np.sin(theta)
    return np.stack([st * np.cos(phi), st * np.sin(phi), np.cos(theta) + 0.0 * phi], axis=-1)


def vector_to_direction(vec) -> DirectionAngles:
    x, y, z = np.asarray(vec, dtype=float)
    r = math.sqrt(x * x + y * y + z * z)
    if r == 0:
        raise ValueError("zero vector has no direction")
    return DirectionAngles(math.acos(max(-1.0, min(1.0, z / r))), math.atan2(y, x))


def angular_separation(a: DirectionAngles, b: DirectionAngles) -> float:
    """Great-circle angle between two directions, radians."""
    cosang = float(np.dot(direction_to_unit_vector(a), direction_to_unit_vector(b)))
    return math.acos(max(-1.0, min(1.0, cosang)))


def _check_axis(name: str, values: np.ndarray) -> np.ndarray:
    values = np.atleast_1d(np.asarray(values, dtype=float))
    if values.ndim != 1 or values.size == 0:
        raise ValueError(f"{name} axis must be a non-empty 1-D sequence")
    if values.size > 1 and not np.all(np.diff(values) > 0):
        raise ValueError(f"{name} axis must be strictly increasing")
    return values


@dataclass(frozen=True)
class PointGrid:
    """Observation points. ``axes`` is set when the points come from a box."""

    points: np.ndarray
    axes: Optional[tuple[np.ndarray, np.ndarray, np.ndarray]] = None

    def __post_init__(self):
        pts = np.atleast_2d(np.asarray(self.points, dtype=float))
        if pts.shape[-1] != 3 or pts.shape[0] == 0:
            raise ValueError("points must have shape (n, 3) with n >= 1")
        object.__setattr__(self, "points", pts)

    @classmethod
    def box(cls, xs, ys, zs) -> "PointGrid":
        xs, ys, zs = _check_axis("x", xs), _check_axis("y", ys), _check_axis("z", zs)
        gx, gy, gz = np.meshgrid(xs, ys, zs, indexing="ij")
        return cls(np.stack([gx.ravel(), gy.ravel(), gz.ravel()], axis=1), (xs, ys, zs))

    @classmethod
    def along(cls, direction: DirectionAngles, distances, origin: Point3 = Point3(0, 0, 0)) -> "PointGrid":
        d = _check_axis("distance", distances)
        return cls(np.asarray(origin, dtype=float) + d[:, None] * direction_to_unit_vector(direction))

    def __len__(self):
        return self.points.shape[0]


@dataclass(frozen=True)
class AngularGrid:
    """(theta, phi) lattice in radians. With ``distance`` set, samples are
    points at that range from ``origin``; otherwise they are far-field
    directions."""

    theta: np.ndarray
    phi: np.ndarray
    distance: Optional[float] = None
    origin: Point3 = Point3(0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "theta", _check_axis("theta", self.theta))
        object.__setattr__(self, "phi", _check_axis("phi", self.phi))
        if self.distance is not None and not self.distance > 0:
            raise ValueError("distance must be > 0")

    @classmethod
    def from_degrees(cls, theta_deg, phi_deg, distance: Optional[float] = None) -> "AngularGrid":
        return cls(np.radians(theta_deg), np.radians(phi_deg), distance)

    @property
    def shape(self) -> tuple[int, int]:
        return self.theta.size, self.phi.size

    def __len__(self):
        return self.theta.size * self.phi.size

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Flattened theta and phi, theta-major."""
        t, p = np.meshgrid(self.theta, self.phi, indexing="ij")
        return t.ravel(), p.ravel()

    def directions(self) -> np.ndarray:
        return unit_vectors(*self.mesh())

    def points(self) -> np.ndarray:
        if self.distance is None:
            raise ValueError("far-field grid has no finite points")
        return np.asarray(self.origin, dtype=float) + self.distance * self.directions()


def degree_axis(start: float, stop: float, step: float) -> np.ndarray:
    """Inclusive degree axis, robust to float accumulation."""
    n = int(round((stop - start) / step))
    return start + step * np.arange(n + 1)
