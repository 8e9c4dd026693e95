"""Focus/defocus spatial modulation at a receiver.

A '1' is sent by focusing the surface on the receiver, a '0' by a random
(chaotic) phase profile. The receiver thresholds the field magnitude
normalised to the focused frame.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .geometry import (
    ApertureGrid,
    DirectionAngles,
    Point3,
    PointGrid,
    PropagationContext,
)
from .propagation import (
    ElementPattern,
    SourceModel,
    incident_field,
    isotropic,
    magnitude_db,
    reflect_and_radiate,
)
from .synthesis import FocalSpec, PhaseProfile, focusing_profile, randomized_profile


@dataclass(frozen=True)
class ReceiverSpec:
    position: Point3
    threshold_db: float = -10.0

    def __post_init__(self):
        if not self.threshold_db < 0:
            raise ValueError("threshold_db must be negative (relative to the focused peak)")
        object.__setattr__(self, "position", Point3(*map(float, self.position)))


@dataclass(frozen=True)
class FramePlan:
    bits: tuple[int, ...]
    master_seed: int = 0

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if not bits:
            raise ValueError("frame plan needs at least one bit")
        if any(b not in (0, 1) for b in bits):
            raise ValueError("bits must be 0 or 1")
        object.__setattr__(self, "bits", bits)

    @classmethod
    def random(cls, count: int, master_seed: int = 0) -> "FramePlan":
        rng = np.random.default_rng(np.random.SeedSequence([int(master_seed), 0xB175]))
        return cls(tuple(int(b) for b in rng.integers(0, 2, size=count)), master_seed)

    def frame_seed(self, index: int) -> int:
        """Seed of the random profile used if frame ``index`` carries a 0."""
        return int(np.random.SeedSequence([int(self.master_seed), int(index)]).generate_state(1, np.uint64)[0])


@dataclass
class LinkReport:
    """Per-frame results. ``contrast_db`` is the median focused level minus the
    median defocused level (None if one symbol is absent)."""

    bits: tuple[int, ...]
    magnitudes_db: np.ndarray
    decoded: tuple[int, ...]
    threshold_db: float
    contrast_db: Optional[float] = None
    reference: float = 1.0
    frame_seeds: tuple[Optional[int], ...] = field(default_factory=tuple)

    @property
    def bit_errors(self) -> int:
        return sum(int(a != b) for a, b in zip(self.bits, self.decoded))


def _receiver_field(aperture, incident, profile, position, ctx, pattern) -> complex:
    f = reflect_and_radiate(aperture, incident, profile, PointGrid(np.asarray(position)[None, :]), ctx, pattern)
    return complex(f.values[0])


def run_link(
    aperture: ApertureGrid,
    tag: SourceModel,
    receiver: ReceiverSpec,
    plan: FramePlan,
    ctx: PropagationContext,
    pattern: ElementPattern = isotropic,
) -> LinkReport:
    """Send ``plan`` frame by frame and decode at the receiver.

    Levels are normalised to the focused-frame magnitude at the receiver, which
    the focusing hologram maximises.
    """
    rx = np.asarray(receiver.position, dtype=float)
    if rx[2] <= aperture.origin.z:
        raise ValueError("receiver must be in front of the aperture (z > aperture plane)")
    spec = FocalSpec.from_point(rx, aperture.origin)
    msg = spec.fresnel_warning(aperture, ctx)
    if msg:
        warnings.warn(f"receiver: {msg}", stacklevel=2)

    incident = incident_field(aperture, tag, ctx)
    focused = focusing_profile(aperture, incident, spec, ctx)
    reference = abs(_receiver_field(aperture, incident, focused, rx, ctx, pattern))

    mags = np.empty(len(plan.bits))
    seeds: list[Optional[int]] = []
    for i, bit in enumerate(plan.bits):
        if bit == 1:
            mags[i] = reference
            seeds.append(None)
        else:
            seed = plan.frame_seed(i)
            seeds.append(seed)
            mags[i] = abs(_receiver_field(aperture, incident, randomized_profile(aperture, seed), rx, ctx, pattern))
    levels = magnitude_db(mags, reference)
    decoded = tuple(int(v >= receiver.threshold_db) for v in levels)

    ones = levels[np.asarray(plan.bits) == 1]
    zeros = levels[np.asarray(plan.bits) == 0]
    median_contrast = float(np.median(ones) - np.median(zeros)) if ones.size and zeros.size else None
    return LinkReport(
        plan.bits, levels, decoded, receiver.threshold_db, median_contrast, reference, tuple(seeds)
    )


def contrast(report: LinkReport) -> float:
    """Worst-case separation: weakest focused frame minus strongest defocused frame, dB."""
    bits = np.asarray(report.bits)
    levels = np.asarray(report.magnitudes_db, dtype=float)
    if not np.any(bits == 1) or not np.any(bits == 0):
        raise ValueError("contrast needs at least one focused (1) and one defocused (0) frame")
    return float(levels[bits == 1].min() - levels[bits == 0].max())


def depth_profile(
    aperture: ApertureGrid,
    tag: SourceModel,
    profile: PhaseProfile,
    axis_samples: Sequence[float],
    ctx: PropagationContext,
    direction: DirectionAngles = DirectionAngles(0.0, 0.0),
    pattern: ElementPattern = isotropic,
    reference: Optional[float] = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Reflected field along a ray from the aperture centre.

    Returns ``(distances, magnitude_db, complex_values)``; dB values are
    relative to ``reference`` or, by default, to the maximum along the ray.
    """
    d = np.asarray(axis_samples, dtype=float)
    if np.any(d <= 0):
        raise ValueError("sample distances must be > 0")
    incident = incident_field(aperture, tag, ctx)
    grid = PointGrid.along(direction, d, aperture.origin)
    values = reflect_and_radiate(aperture, incident, profile, grid, ctx, pattern).values
    return d, magnitude_db(values, reference), values


def write_link_report(report: LinkReport, path) -> Path:
    """Comma-delimited: frame, bit_sent, magnitude_db, bit_decoded."""
    path = Path(path)
    lines = [
        "# kind=link_report",
        f"# threshold_db={report.threshold_db:.6f}",
        f"# reference_magnitude={report.reference:.9e}",
        "# columns=frame,bit_sent,magnitude_db,bit_decoded",
    ]
    for i, (b, m, d) in enumerate(zip(report.bits, report.magnitudes_db, report.decoded)):
        lines.append(f"{i},{b},{float(m) + 0.0:.6f},{d}")
    path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    return path


def read_link_report(path) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """``(bits_sent, magnitude_db, bits_decoded)`` from a written report."""
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return data[:, 1].astype(int), data[:, 2], data[:, 3].astype(int)
