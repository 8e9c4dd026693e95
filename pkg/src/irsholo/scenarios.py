"""Scenario runners: one per experiment family, each writing plain-text results."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .config import ScenarioConfig
from .fieldio import emit_field_map, emit_spectrum
from .geometry import DirectionAngles, FresnelRegionError, PointGrid, angular_separation, fresnel_bounds
from .modulation import FramePlan, ReceiverSpec, contrast, depth_profile, run_link, write_link_report
from .propagation import ComplexField, incident_field, reflect_and_radiate, reflected_excitations
from .synthesis import (
    FocalSpec,
    focusing_profile,
    quantize_profile,
    randomized_profile,
    save_profile,
    steering_profile,
)
from .timevarying import (
    SquareWaveProfile,
    harmonic_pattern,
    invariant_pattern,
    spectrum_at_direction,
    steering_delays,
)


@dataclass
class ScenarioResult:
    files: list[Path]
    summary: dict[str, object] = field(default_factory=dict)

    def summary_text(self) -> str:
        return "".join(f"{k}={_fmt_value(v)}\n" for k, v in self.summary.items())


def _fmt_value(v) -> str:
    if isinstance(v, float):
        return f"{v + 0.0:.6f}"
    return str(v)


def _fresnel(cfg: ScenarioConfig) -> dict[str, object]:
    try:
        lower, upper = fresnel_bounds(cfg.aperture, cfg.ctx)
    except FresnelRegionError:
        return {"fresnel_lower_m": "none", "fresnel_upper_m": "none"}
    return {"fresnel_lower_m": lower, "fresnel_upper_m": upper}


def run_steer(cfg: ScenarioConfig, out: Path) -> ScenarioResult:
    p = cfg.params
    ctx = cfg.ctx
    incident = incident_field(cfg.aperture, cfg.tag(), ctx)
    profile = steering_profile(cfg.aperture, incident, p.direction, ctx)
    if p.quantization_bits:
        profile = quantize_profile(profile, p.quantization_bits)
    grid = p.grid()
    field_ = reflect_and_radiate(cfg.aperture, incident, profile, grid, ctx)
    mags = np.abs(field_.values)
    i = int(np.argmax(mags))
    theta, phi = grid.mesh()
    peak = DirectionAngles(float(theta[i]), float(phi[i]))
    bound = float(np.sum(np.abs(reflected_excitations(incident, profile))))
    files = [
        emit_field_map(field_, out / "steer_pattern.csv", "peak"),
        save_profile(profile, out / "steer_profile.txt"),
    ]
    summary = {
        "scenario": "steer",
        "target_theta_deg": math.degrees(p.direction.theta),
        "target_phi_deg": math.degrees(p.direction.phi),
        "peak_theta_deg": math.degrees(peak.theta),
        "peak_phi_deg": math.degrees(peak.phi),
        "peak_error_deg": math.degrees(angular_separation(peak, p.direction)),
        "peak_magnitude": float(mags[i]),
        "cophased_bound": bound,
        **_fresnel(cfg),
    }
    return ScenarioResult(files, summary)


def run_focus(cfg: ScenarioConfig, out: Path) -> ScenarioResult:
    p = cfg.params
    ctx = cfg.ctx
    tag = cfg.tag()
    incident = incident_field(cfg.aperture, tag, ctx)
    spec = FocalSpec(p.direction, p.distance)
    profile = focusing_profile(cfg.aperture, incident, spec, ctx)
    if p.quantization_bits:
        profile = quantize_profile(profile, p.quantization_bits)
    d, db, values = depth_profile(cfg.aperture, tag, profile, p.depth.values(), ctx, p.direction)
    grid = PointGrid.along(p.direction, d, cfg.aperture.origin)
    focal_depth = float(d[int(np.argmax(db))])
    files = [
        emit_field_map(ComplexField(grid, values), out / "focus_depth.csv", "peak"),
        save_profile(profile, out / "focus_profile.txt"),
    ]
    summary = {
        "scenario": "focus",
        "target_distance_m": p.distance,
        "focal_depth_m": focal_depth,
        "focal_depth_error_pct": 100.0 * abs(focal_depth - p.distance) / p.distance,
        **_fresnel(cfg),
    }
    return ScenarioResult(files, summary)


def run_modulate(cfg: ScenarioConfig, out: Path) -> ScenarioResult:
    p = cfg.params
    ctx = cfg.ctx
    tag = cfg.tag()
    spec = FocalSpec(p.receiver_direction, p.receiver_distance)
    rx_point = spec.focal_point(cfg.aperture.origin)
    receiver = ReceiverSpec(tuple(rx_point), p.threshold_db)
    if p.bits is not None:
        plan = FramePlan(p.bits, cfg.seed)
    else:
        plan = FramePlan.random(p.random_bits, cfg.seed)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        report = run_link(cfg.aperture, tag, receiver, plan, ctx)
    files = [write_link_report(report, out / "link_report.csv")]

    incident = incident_field(cfg.aperture, tag, ctx)
    focused = focusing_profile(cfg.aperture, incident, spec, ctx)
    zero_frames = [i for i, b in enumerate(plan.bits) if b == 0]
    chaos_seed = plan.frame_seed(zero_frames[0] if zero_frames else 0)
    chaotic = randomized_profile(cfg.aperture, chaos_seed)
    depths = p.depth.values()
    grid = PointGrid.along(p.receiver_direction, depths, cfg.aperture.origin)
    _, _, v_focus = depth_profile(cfg.aperture, tag, focused, depths, ctx, p.receiver_direction)
    _, _, v_chaos = depth_profile(cfg.aperture, tag, chaotic, depths, ctx, p.receiver_direction)
    # both cuts share the focused-frame reference so they overlay on one axis
    files.append(emit_field_map(ComplexField(grid, v_focus), out / "modulate_depth_focused.csv", report.reference))
    files.append(emit_field_map(ComplexField(grid, v_chaos), out / "modulate_depth_defocused.csv", report.reference,
                                extra={"seed": chaos_seed}))

    summary: dict[str, object] = {
        "scenario": "modulate",
        "frames": len(plan.bits),
        "bit_errors": report.bit_errors,
        "threshold_db": p.threshold_db,
        "contrast_db": report.contrast_db if report.contrast_db is not None else "n/a",
    }
    try:
        summary["worst_case_contrast_db"] = contrast(report)
    except ValueError:
        summary["worst_case_contrast_db"] = "n/a"
    summary.update(_fresnel(cfg))
    return ScenarioResult(files, summary)


def run_timevary(cfg: ScenarioConfig, out: Path) -> ScenarioResult:
    p = cfg.params
    ctx = cfg.ctx
    lattice = cfg.aperture
    if p.target is None:
        profile = SquareWaveProfile.synchronized(lattice, p.mod_frequency)
        look = DirectionAngles(0.0, 0.0)
    else:
        delays = steering_delays(lattice, p.target, p.design_harmonic, cfg.frequency, p.mod_frequency, cfg.wave_speed)
        profile = SquareWaveProfile(p.mod_frequency, delays)
        look = p.target
    grid = p.grid()
    invariant = invariant_pattern(lattice, grid, ctx)
    inv_peak = float(np.max(np.abs(invariant)))
    files = [emit_field_map(ComplexField(grid, invariant), out / "timevary_invariant.csv", inv_peak)]
    theta, phi = grid.mesh()
    summary: dict[str, object] = {
        "scenario": "timevary",
        "mod_frequency_hz": p.mod_frequency,
        "invariant_peak": inv_peak,
        "look_theta_deg": math.degrees(look.theta),
        "look_phi_deg": math.degrees(look.phi),
    }
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k in p.harmonics:
            hp = harmonic_pattern(lattice, profile, k, grid, ctx)
            mags = np.abs(hp.values)
            ref = inv_peak if p.normalization == "invariant" or mags.max() == 0 else float(mags.max())
            files.append(emit_field_map(hp, out / f"timevary_harmonic_k{k}.csv", ref))
            i = int(np.argmax(mags))
            summary[f"k{k}_peak_theta_deg"] = math.degrees(theta[i])
            summary[f"k{k}_peak_phi_deg"] = math.degrees(phi[i])
            summary[f"k{k}_peak_relative"] = float(mags[i]) / inv_peak
        spectrum = spectrum_at_direction(lattice, profile, look, p.k_max, ctx)
    files.append(emit_spectrum(spectrum, out / "timevary_spectrum.csv", 1.0, look.degrees()))
    for k, _, val in spectrum:
        if k > 0:
            summary[f"spectrum_k{k}_magnitude"] = abs(val)
    return ScenarioResult(files, summary)


def run_bounds(cfg: ScenarioConfig, out: Path) -> ScenarioResult:
    lower, upper = fresnel_bounds(cfg.aperture, cfg.ctx)
    return ScenarioResult([], {
        "scenario": "bounds",
        "aperture_size_m": cfg.aperture.extent,
        "wavelength_m": cfg.ctx.wavelength,
        "fresnel_lower_m": lower,
        "fresnel_upper_m": upper,
    })


RUNNERS = {
    "steer": run_steer,
    "focus": run_focus,
    "modulate": run_modulate,
    "timevary": run_timevary,
    "bounds": run_bounds,
}


def run_scenario(cfg: ScenarioConfig, out_dir=".") -> ScenarioResult:
    """Run ``cfg`` and write its files plus ``summary.txt`` into ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    try:
        result = RUNNERS[cfg.kind](cfg, out)
    except Exception as exc:
        raise RuntimeError(f"{cfg.kind} scenario failed: {exc}") from exc
    if cfg.kind != "bounds":
        path = out / "summary.txt"
        path.write_bytes(result.summary_text().encode("ascii"))
        result.files.append(path)
    return result
