"""Scalar free-space propagation by Green's-function superposition.

Phasor convention is ``exp(+j w t)``, so an outgoing spherical wave is
``exp(-j k R) / (4 pi R)`` and the far-field phase of an element at ``r_i``
seen from direction ``u`` is ``exp(+j k r_i . u)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .geometry import (
    AngularGrid,
    ApertureGrid,
    DirectionAngles,
    Point3,
    PointGrid,
    PropagationContext,
    unit_vectors,
)

# complex entries per evaluation block; keeps peak memory near 64 MB
BLOCK_ENTRIES = 1 << 22
DB_FLOOR = -300.0

ElementPattern = Callable[[np.ndarray, np.ndarray], np.ndarray]


class SingularityError(ValueError):
    """Observation point coincides with a radiating point."""


def isotropic(theta, phi):
    return np.ones(np.broadcast(np.asarray(theta), np.asarray(phi)).shape)


def cosine_pattern(q: float) -> ElementPattern:
    """``cos(theta)**q`` in the forward half-space, zero behind the aperture."""

    def pattern(theta, phi):
        c = np.cos(np.asarray(theta, dtype=float)) + 0.0 * np.asarray(phi, dtype=float)
        return np.clip(c, 0.0, None) ** q

    return pattern


@dataclass(frozen=True)
class SourceModel:
    """Point-source discretisation of the tag's surface current."""

    positions: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        pos = np.atleast_2d(np.asarray(self.positions, dtype=float))
        w = np.atleast_1d(np.asarray(self.weights, dtype=complex))
        if pos.shape[-1] != 3 or pos.shape[0] == 0:
            raise ValueError("source positions must have shape (n, 3), n >= 1")
        if w.shape != (pos.shape[0],):
            raise ValueError("one weight per source element is required")
        if not np.any(w != 0):
            raise ValueError("source needs at least one nonzero weight")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "weights", w)

    @classmethod
    def point(cls, position, weight: complex = 1.0) -> "SourceModel":
        return cls(np.asarray(position, dtype=float)[None, :], [weight])

    @classmethod
    def at_incidence(
        cls,
        direction: DirectionAngles,
        distance: float,
        center: Point3 = Point3(0.0, 0.0, 0.0),
        weight: complex = 1.0,
    ) -> "SourceModel":
        """Unit point tag seen from ``center`` along ``direction`` at ``distance``."""
        from .geometry import direction_to_unit_vector

        if not distance > 0:
            raise ValueError("tag distance must be > 0")
        pos = np.asarray(center, dtype=float) + distance * direction_to_unit_vector(direction)
        return cls.point(pos, weight)


@dataclass(frozen=True)
class ComplexField:
    """Complex samples over a point or angular grid (flattened, grid order)."""

    grid: Union[PointGrid, AngularGrid]
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex).ravel()
        if v.size != len(self.grid):
            raise ValueError(f"{v.size} values for a grid of {len(self.grid)} samples")
        if not np.all(np.isfinite(v)):
            raise ValueError("field values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def far_field(self) -> bool:
        return isinstance(self.grid, AngularGrid) and self.grid.distance is None

    @property
    def positions(self) -> np.ndarray:
        if isinstance(self.grid, PointGrid):
            return self.grid.points
        return self.grid.points()

    def normalized(self) -> "ComplexField":
        peak = np.max(np.abs(self.values))
        return self if peak == 0 else ComplexField(self.grid, self.values / peak)

    def magnitude_db(self, reference: Optional[float] = None) -> np.ndarray:
        return magnitude_db(self.values, reference)

    def __len__(self):
        return self.values.size


def magnitude_db(values, reference: Optional[float] = None) -> np.ndarray:
    """``20 log10(|v| / reference)``; reference defaults to the peak of ``values``.

    Zeros map to ``DB_FLOOR`` rather than ``-inf``.
    """
    mag = np.abs(np.asarray(values))
    ref = float(np.max(mag)) if reference is None else float(reference)
    if ref <= 0:
        return np.full(mag.shape, DB_FLOOR)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / ref)
    return np.maximum(db, DB_FLOOR)


def greens_kernel(src, obs, ctx: PropagationContext) -> complex:
    """``exp(-j k R) / (4 pi R)`` between two points."""
    r = float(np.linalg.norm(np.asarray(obs, dtype=float) - np.asarray(src, dtype=float)))
    if r == 0.0:
        raise SingularityError(f"source and observation coincide at {tuple(np.asarray(src, float))}")
    return complex(np.exp(-1j * ctx.wavenumber * r) / (4.0 * math.pi * r))


def _blocks(n_targets: int, n_sources: int):
    step = max(1, BLOCK_ENTRIES // max(1, n_sources))
    for start in range(0, n_targets, step):
        yield slice(start, min(start + step, n_targets))


def _superpose(
    sources: np.ndarray,
    weights: np.ndarray,
    targets: np.ndarray,
    k: float,
    pattern: Optional[ElementPattern] = None,
) -> np.ndarray:
    """Sum of weighted Green's kernels from every source to every target."""
    out = np.empty(targets.shape[0], dtype=complex)
    sx, sy, sz = (sources[None, :, i] for i in range(3))
    for sl in _blocks(targets.shape[0], sources.shape[0]):
        t = targets[sl]
        dx = t[:, 0, None] - sx
        dy = t[:, 1, None] - sy
        dz = t[:, 2, None] - sz
        r = np.sqrt(dx * dx + dy * dy + dz * dz)
        if not np.all(r > 0.0):
            ti, si = np.argwhere(r == 0.0)[0]
            raise SingularityError(
                f"target {tuple(t[ti])} coincides with source element {si} at {tuple(sources[si])}"
            )
        g = np.exp(-1j * k * r)
        g /= 4.0 * math.pi * r
        if pattern is not None:
            g *= pattern(np.arccos(np.clip(dz / r, -1.0, 1.0)), np.arctan2(dy, dx))
        # row-wise sums keep each target independent of how the grid is partitioned
        g *= weights
        out[sl] = g.sum(axis=1)
    return out


def _as_points(targets) -> PointGrid:
    if isinstance(targets, PointGrid):
        return targets
    return PointGrid(np.asarray(targets, dtype=float))


def radiate(source: SourceModel, targets, ctx: PropagationContext) -> ComplexField:
    """Field of a point-source cluster at ``targets`` (points or a PointGrid)."""
    grid = _as_points(targets)
    values = _superpose(source.positions, source.weights, grid.points, ctx.wavenumber)
    return ComplexField(grid, values)


def incident_field(aperture: ApertureGrid, source: SourceModel, ctx: PropagationContext) -> ComplexField:
    """Reference wave sampled at the aperture elements."""
    return radiate(source, PointGrid(aperture.positions()), ctx)


def _grid_far_field(aperture: ApertureGrid, weights: np.ndarray, directions: np.ndarray, k: float) -> np.ndarray:
    """Far-field sum over a rectangular lattice, factored into x and y phase
    terms so only ``M + N`` exponentials are needed per direction."""
    xs, ys = aperture.local_offsets()
    a = weights.reshape(aperture.shape)
    out = np.empty(directions.shape[0], dtype=complex)
    for sl in _blocks(directions.shape[0], max(aperture.count_x, aperture.count_y) * 4):
        ex = np.exp(1j * k * np.outer(directions[sl, 0], xs))
        ey = np.exp(1j * k * np.outer(directions[sl, 1], ys))
        out[sl] = np.einsum("dm,dm->d", ex, np.einsum("dn,mn->dm", ey, a))
    return out


def array_factor(
    aperture: ApertureGrid,
    excitations,
    dirs: Sequence[DirectionAngles] | np.ndarray,
    ctx: PropagationContext,
) -> np.ndarray:
    """``sum_i a_i exp(+j k (x_i sin t cos p + y_i sin t sin p))`` per direction.

    ``dirs`` is a sequence of :class:`DirectionAngles` or an ``(n, 2)`` array of
    radians.
    """
    a = np.asarray(excitations, dtype=complex).ravel()
    if a.size != aperture.size:
        raise ValueError(f"{a.size} excitations for {aperture.size} elements")
    angles = np.atleast_2d(np.asarray(dirs, dtype=float))
    u = unit_vectors(angles[:, 0], angles[:, 1])
    # positions relative to the aperture centre; the z offset is constant
    return _grid_far_field(aperture, a, u, ctx.wavenumber)


def reflected_excitations(
    incident: ComplexField, phases, reflection_magnitude: float = 1.0
) -> np.ndarray:
    """Per-element re-radiated amplitude ``|Gamma| * E_inc * exp(j xi)``."""
    ph = np.asarray(getattr(phases, "phases", phases), dtype=float).ravel()
    if ph.size != incident.values.size:
        raise ValueError(f"{ph.size} phases for {incident.values.size} elements")
    return reflection_magnitude * incident.values * np.exp(1j * ph)


def reflect_and_radiate(
    aperture: ApertureGrid,
    incident: ComplexField,
    phases,
    targets,
    ctx: PropagationContext,
    pattern: ElementPattern = isotropic,
    normalize: bool = False,
    reflection_magnitude: float = 1.0,
) -> ComplexField:
    """Field re-radiated by the aperture under a phase profile.

    ``targets`` may be a :class:`PointGrid`, an ``(n, 3)`` array, or an
    :class:`AngularGrid`. A far-field angular grid (no distance) returns the
    asymptotic pattern: the array factor of the excitations times the element
    pattern, without the common ``exp(-j k R) / (4 pi R)`` factor.
    """
    pos = aperture.positions()
    if incident.values.size != aperture.size:
        raise ValueError(f"incident field has {incident.values.size} samples for {aperture.size} elements")
    if isinstance(incident.grid, PointGrid) and not np.allclose(incident.grid.points, pos, rtol=0, atol=1e-12):
        raise ValueError("incident field must be sampled at the aperture element positions")
    a = reflected_excitations(incident, phases, reflection_magnitude)
    k = ctx.wavenumber
    pat = None if pattern is isotropic else pattern

    if isinstance(targets, AngularGrid) and targets.distance is None:
        theta, phi = targets.mesh()
        values = _grid_far_field(aperture, a, targets.directions(), k)
        if pat is not None:
            values = values * pat(theta, phi)
        field = ComplexField(targets, values)
    else:
        if isinstance(targets, AngularGrid):
            grid = targets
            pts = targets.points()
        else:
            grid = _as_points(targets)
            pts = grid.points
        field = ComplexField(grid, _superpose(pos, a, pts, k, pat))
    return field.normalized() if normalize else field


def contribution_magnitudes(
    aperture: ApertureGrid, incident: ComplexField, phases, point, ctx: PropagationContext
) -> np.ndarray:
    """Magnitudes of the individual element terms at ``point``; their sum
    bounds the field magnitude there."""
    a = reflected_excitations(incident, phases)
    r = np.linalg.norm(aperture.positions() - np.asarray(point, dtype=float), axis=1)
    return np.abs(a) / (4.0 * math.pi * r)


def locate_peak(
    evaluate: Callable[[np.ndarray], np.ndarray],
    lower,
    upper,
    samples: int = 25,
    refinements: int = 4,
    shrink: float = 0.25,
) -> np.ndarray:
    """Coarse-to-fine grid search for the maximum of ``evaluate`` over a box.

    ``evaluate`` maps an ``(n, 3)`` point array to magnitudes. Each refinement
    re-centres a box ``shrink`` times the previous width on the best sample.
    """
    lo = np.asarray(lower, dtype=float)
    hi = np.asarray(upper, dtype=float)
    best = None
    for _ in range(refinements + 1):
        axes = [np.linspace(lo[i], hi[i], samples) for i in range(3)]
        grid = PointGrid.box(*axes)
        mags = evaluate(grid.points)
        best = grid.points[int(np.argmax(mags))]
        half = (hi - lo) * shrink / 2.0
        lo, hi = best - half, best + half
    return best
