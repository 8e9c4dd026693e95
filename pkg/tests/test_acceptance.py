"""Acceptance criteria, one test per criterion.

Each test prints a ``[PASS]``/``[FAIL]`` line through the ``criterion``
fixture; the lines are repeated in the terminal summary.
"""

import math
import time
from pathlib import Path

import numpy as np
import pytest

from irsholo.config import parse_config
from irsholo.geometry import (
    AngularGrid,
    ApertureGrid,
    DirectionAngles,
    PointGrid,
    PropagationContext,
    angular_separation,
    degree_axis,
    fresnel_bounds,
    vector_to_direction,
)
from irsholo.modulation import FramePlan, ReceiverSpec, contrast, depth_profile, run_link
from irsholo.propagation import (
    ComplexField,
    SourceModel,
    array_factor,
    incident_field,
    locate_peak,
    reflect_and_radiate,
    reflected_excitations,
)
from irsholo.scenarios import run_scenario
from irsholo.synthesis import FocalSpec, focusing_profile, steering_profile
from irsholo.timevarying import (
    SquareWaveProfile,
    coefficient,
    gamma_waveform,
    harmonic_excitation_phases,
    harmonic_pattern,
    invariant_pattern,
    spectrum_at_direction,
    steering_delays,
)

pytestmark = pytest.mark.acceptance

SCENARIOS = Path(__file__).resolve().parents[1] / "scenarios"
TAG = SourceModel.at_incidence(DirectionAngles.from_degrees(10, 10), 0.5)


@pytest.mark.parametrize("target", [(30, 30), (30, -30), (-30, 30), (-30, -30), (0, 0)], ids=str)
def test_c1_steering_fidelity(criterion, target):
    ctx = PropagationContext(30e9)
    ap = ApertureGrid.square(20, ctx.wavelength / 2)
    grid = AngularGrid.from_degrees(degree_axis(-90, 90, 0.5), degree_axis(-90, 90, 0.5))
    want = DirectionAngles.from_degrees(*target)

    start = time.perf_counter()
    incident = incident_field(ap, TAG, ctx)
    profile = steering_profile(ap, incident, want, ctx)
    mags = np.abs(reflect_and_radiate(ap, incident, profile, grid, ctx).values)
    elapsed = time.perf_counter() - start

    theta, phi = grid.mesh()
    i = int(np.argmax(mags))
    error = math.degrees(angular_separation(DirectionAngles(theta[i], phi[i]), want))
    bound = float(np.sum(np.abs(reflected_excitations(incident, profile))))
    rel = abs(mags[i] - bound) / bound
    criterion(
        f"C1 steering {target}",
        error <= 1.0 and rel <= 1e-9 and elapsed < 5.0,
        f"peak error {error:.3f} deg, |peak - bound|/bound {rel:.1e}, {elapsed:.2f} s",
    )


def test_c2_focusing_depth(criterion):
    # 250x250 at 1 THz: D = 0.106 m and the radiative near field starts at 0.434 m
    ctx = PropagationContext(1e12)
    ap = ApertureGrid.square(250, ctx.wavelength / 2)
    tag = SourceModel.at_incidence(DirectionAngles.from_degrees(10, 10), 1.0)
    lower, upper = fresnel_bounds(ap, ctx)
    z = np.round(np.arange(100, 1501) * 1e-3, 12)

    start = time.perf_counter()
    profile = focusing_profile(ap, incident_field(ap, tag, ctx), FocalSpec(DirectionAngles(0, 0), 0.45), ctx)
    d, db, _ = depth_profile(ap, tag, profile, z, ctx)
    elapsed = time.perf_counter() - start

    peak = float(d[np.argmax(db)])
    err = abs(peak - 0.45) / 0.45
    criterion(
        "C2 focusing depth",
        lower < 0.45 < upper and err <= 0.10 and elapsed < 10.0,
        f"Fresnel ({lower:.3f}, {upper:.2f}) m, argmax {peak:.3f} m ({100 * err:.1f}%), {elapsed:.2f} s",
    )


def test_c3_modulation_contrast(criterion):
    # 40x40 at 60 GHz places the 0.6 m receiver inside (0.449 m, 7.6 m)
    ctx = PropagationContext(60e9)
    ap = ApertureGrid.square(40, ctx.wavelength / 2)
    tag = SourceModel.at_incidence(DirectionAngles.from_degrees(10, 10), 1.0)
    receiver = ReceiverSpec((0.0, 0.0, 0.6))
    report = run_link(ap, tag, receiver, FramePlan((1,) + (0,) * 32, master_seed=2024), ctx)
    zeros = report.magnitudes_db[1:]
    worst = contrast(report)
    criterion(
        "C3 modulation contrast",
        worst >= 20.0,
        f"32 seeds: worst {worst:.1f} dB, median {-np.median(zeros):.1f} dB, best {-zeros.min():.1f} dB",
    )


def test_c4_receiver_repositioning(criterion):
    ctx = PropagationContext(30e9)
    ap = ApertureGrid.square(64, ctx.wavelength / 2)
    tag = SourceModel.at_incidence(DirectionAngles.from_degrees(10, 10), 1.0)
    incident = incident_field(ap, tag, ctx)
    first = FocalSpec(DirectionAngles(0, 0), 0.6)
    second = FocalSpec(DirectionAngles.from_degrees(15, 15), 0.4)

    def argmax_3d(spec):
        profile = focusing_profile(ap, incident, spec, ctx)

        def evaluate(points):
            return np.abs(reflect_and_radiate(ap, incident, profile, points, ctx).values)

        # region of interest holding both focal points, 2 cm laterally and 4 cm in depth
        box = PointGrid.box(np.arange(-0.10, 0.2501, 0.02), np.arange(-0.10, 0.1501, 0.02), np.arange(0.2, 0.8001, 0.04))
        coarse = box.points[int(np.argmax(evaluate(box.points)))]
        span = np.array([0.03, 0.03, 0.06])
        return locate_peak(evaluate, coarse - span, coarse + span, samples=9, refinements=4)

    before = argmax_3d(first)
    after = argmax_3d(second)
    rng = float(np.linalg.norm(after))
    range_err = abs(rng - second.distance) / second.distance
    ang_err = math.degrees(angular_separation(vector_to_direction(after), second.direction))
    moved = np.linalg.norm(after - before)
    criterion(
        "C4 receiver repositioning",
        range_err <= 0.10 and ang_err <= 2.0,
        f"peak moved {100 * moved:.1f} cm; range {rng:.3f} m ({100 * range_err:.1f}%), angle error {ang_err:.2f} deg",
    )


def _quadrature(k, delay, f0, points=10_000):
    period = 1.0 / f0
    prof = SquareWaveProfile(f0, np.array([[delay]]))
    edges = sorted({0.0, period, math.fmod(delay, period), math.fmod(delay + period / 2, period)})
    total = 0j
    for a, b in zip(edges, edges[1:]):
        sign = gamma_waveform(prof, (0, 0), [(a + b) / 2])[0]
        t = np.linspace(a, b, max(2, int(points * (b - a) / period)))
        total += sign * np.trapezoid(np.exp(-2j * math.pi * k * f0 * t), t)
    return total / period


def test_c5_fourier_coefficients(criterion):
    f0 = 1e6
    delays = np.random.default_rng(5).uniform(0, 1 / f0, 16)
    start = time.perf_counter()
    worst = max(
        abs(complex(coefficient(k, tau, f0)) - _quadrature(k, tau, f0)) for k in range(-15, 16) for tau in delays
    )
    even_zero = all(np.all(coefficient(k, delays, f0) == 0) for k in range(-14, 15, 2))
    elapsed = time.perf_counter() - start
    criterion(
        "C5 Fourier coefficients",
        worst < 1e-6 and even_zero and elapsed < 1.0,
        f"max |closed form - quadrature| {worst:.2e}, even k zero: {even_zero}, {elapsed:.2f} s",
    )


def test_c6_harmonic_magnitude_law(criterion):
    ctx = PropagationContext(10e9)
    lattice = ApertureGrid.square(10, ctx.wavelength / 2)
    prof = SquareWaveProfile.synchronized(lattice, 1e6)
    broadside = AngularGrid(np.array([0.0]), np.array([0.0]))
    inv = abs(invariant_pattern(lattice, broadside, ctx)[0])
    errors = {}
    for k in (1, 3):
        ratio = abs(harmonic_pattern(lattice, prof, k, broadside, ctx).values[0]) / inv
        errors[k] = abs(ratio - 2 / (k * math.pi)) / (2 / (k * math.pi))
    criterion(
        "C6 harmonic magnitude law",
        max(errors.values()) <= 1e-9,
        ", ".join(f"k={k} rel error {e:.1e}" for k, e in errors.items()),
    )


def test_c7_delay_steering(criterion):
    ctx = PropagationContext(10e9)
    f0 = 1e6
    lattice = ApertureGrid.square(10, ctx.wavelength / 2)
    grid = AngularGrid.from_degrees(degree_axis(0, 90, 1), degree_axis(-179, 180, 1))
    rng = np.random.default_rng(7)
    targets = [(30.0, 45.0)] + [(rng.uniform(0, 60), rng.uniform(-180, 180)) for _ in range(20)]
    errors = []
    for t in targets:
        want = DirectionAngles.from_degrees(*t)
        prof = SquareWaveProfile(f0, steering_delays(lattice, want, 1, ctx.frequency, f0, ctx.wave_speed))
        peak, _ = harmonic_pattern(lattice, prof, 1, grid, ctx).peak()
        errors.append(math.degrees(angular_separation(peak, want)))
    design = DirectionAngles.from_degrees(30, 45)
    prof = SquareWaveProfile(f0, steering_delays(lattice, design, 1, ctx.frequency, f0, ctx.wave_speed))
    spectrum = {k: v for k, _, v in spectrum_at_direction(lattice, prof, design, 3, ctx)}
    criterion(
        "C7 delay steering",
        max(errors) <= 1.0,
        f"(30, 45) error {errors[0]:.3f} deg, worst of 20 random {max(errors[1:]):.3f} deg, "
        f"|E1| {abs(spectrum[1]):.6f}, |E3| {abs(spectrum[3]):.6f} at target",
    )


def test_c8_cross_formulation(criterion):
    ctx = PropagationContext(10e9)
    f0 = 1e6
    lattice = ApertureGrid.square(10, ctx.wavelength / 2)
    plane = ComplexField(PointGrid(lattice.positions()), np.ones(lattice.size))
    rng = np.random.default_rng(8)
    worst = 0.0
    for t in [(30.0, 45.0)] + [(rng.uniform(0, 80), rng.uniform(-180, 180)) for _ in range(10)]:
        want = DirectionAngles.from_degrees(*t)
        prof = SquareWaveProfile(f0, steering_delays(lattice, want, 1, ctx.frequency, f0, ctx.wave_speed))
        diff = harmonic_excitation_phases(prof, 1).ravel() - steering_profile(lattice, plane, want, ctx).flat()
        spread = np.angle(np.exp(1j * (diff - diff[0])))
        worst = max(worst, float(np.max(np.abs(spread))))
    criterion("C8 cross-formulation equivalence", worst <= 1e-9, f"max phase-difference spread {worst:.1e} rad")


def test_c9_far_near_consistency(criterion):
    ctx = PropagationContext(30e9)
    ap = ApertureGrid.square(20, ctx.wavelength / 2)
    incident = incident_field(ap, TAG, ctx)
    profile = steering_profile(ap, incident, DirectionAngles.from_degrees(30, 30), ctx)
    distance = 100 * fresnel_bounds(ap, ctx)[1]
    grid = AngularGrid.from_degrees(degree_axis(0, 90, 1), degree_axis(-180, 179, 1), distance=distance)
    near = np.abs(reflect_and_radiate(ap, incident, profile, grid, ctx).values)
    far = np.abs(array_factor(ap, reflected_excitations(incident, profile), np.stack(grid.mesh(), 1), ctx))
    worst = float(np.max(np.abs(near / near.max() - far / far.max())))
    criterion(
        "C9 far/near consistency",
        worst <= 0.01,
        f"range {distance:.1f} m, max |normalized difference| {worst:.2e} of peak",
    )


def test_c10_determinism(criterion, tmp_path):
    mismatched = []
    files = 0
    for path in sorted(SCENARIOS.glob("*.yaml")):
        outputs = []
        for run in ("a", "b"):
            cfg = parse_config(path.read_text())
            out = tmp_path / path.stem / run
            run_scenario(cfg, out)
            outputs.append({p.name: p.read_bytes() for p in sorted(out.iterdir())})
        files += len(outputs[0])
        if outputs[0] != outputs[1]:
            mismatched.append(path.stem)
    criterion(
        "C10 determinism",
        not mismatched and files > 0,
        f"{len(list(SCENARIOS.glob('*.yaml')))} scenarios, {files} files, mismatched: {mismatched or 'none'}",
    )
