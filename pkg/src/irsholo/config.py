"""Scenario configuration: YAML (or JSON) text -> validated :class:`ScenarioConfig`.

Every violation is collected before raising, each tagged with its field path.
Angles are degrees in configuration files and radians everywhere else.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np
import yaml

from .geometry import (
    SPEED_OF_LIGHT,
    AngularGrid,
    ApertureGrid,
    DirectionAngles,
    FresnelRegionError,
    PropagationContext,
    degree_axis,
    fresnel_bounds,
)
from .propagation import SourceModel

KINDS = ("steer", "focus", "modulate", "timevary", "bounds")

DEFAULT_TAG = {"theta": 10.0, "phi": 10.0, "distance": 1.0}
DEFAULT_FAR_GRID = {"theta": [-90.0, 90.0, 0.5], "phi": [-90.0, 90.0, 0.5]}
DEFAULT_HARMONIC_GRID = {"theta": [0.0, 90.0, 1.0], "phi": [-179.0, 180.0, 1.0]}
DEFAULT_DEPTH = [0.1, 1.5, 0.001]


class ConfigError(ValueError):
    def __init__(self, errors: list[str]):
        self.errors = list(errors)
        super().__init__("invalid configuration:\n" + "\n".join(f"  - {e}" for e in self.errors))


@dataclass(frozen=True)
class AxisSpec:
    start: float
    stop: float
    step: float

    def values(self) -> np.ndarray:
        return degree_axis(self.start, self.stop, self.step)


@dataclass(frozen=True)
class SteerParams:
    direction: DirectionAngles
    quantization_bits: Optional[int]
    theta: AxisSpec
    phi: AxisSpec

    def grid(self) -> AngularGrid:
        return AngularGrid.from_degrees(self.theta.values(), self.phi.values())


@dataclass(frozen=True)
class FocusParams:
    direction: DirectionAngles
    distance: float
    quantization_bits: Optional[int]
    depth: AxisSpec


@dataclass(frozen=True)
class ModulateParams:
    receiver_direction: DirectionAngles
    receiver_distance: float
    threshold_db: float
    bits: Optional[tuple[int, ...]]
    random_bits: Optional[int]
    depth: AxisSpec


@dataclass(frozen=True)
class TimevaryParams:
    mod_frequency: float
    target: Optional[DirectionAngles]
    design_harmonic: int
    harmonics: tuple[int, ...]
    k_max: int
    normalization: str
    theta: AxisSpec
    phi: AxisSpec

    def grid(self) -> AngularGrid:
        return AngularGrid.from_degrees(self.theta.values(), self.phi.values())


@dataclass
class ScenarioConfig:
    kind: str
    frequency: float
    wave_speed: float
    seed: int
    aperture: ApertureGrid
    tag_position: Optional[tuple[float, float, float]]
    tag_direction: Optional[DirectionAngles]
    tag_distance: Optional[float]
    params: Any
    warnings: list[str] = field(default_factory=list)

    @property
    def ctx(self) -> PropagationContext:
        return PropagationContext(self.frequency, self.wave_speed)

    def tag(self) -> SourceModel:
        if self.tag_position is not None:
            return SourceModel.point(self.tag_position)
        return SourceModel.at_incidence(self.tag_direction, self.tag_distance, self.aperture.origin)


class _Reader:
    """Walks a mapping, recording every problem instead of stopping at the first."""

    def __init__(self):
        self.errors: list[str] = []

    def section(self, data, path: str, allowed: set[str]) -> dict:
        if data is None:
            return {}
        if not isinstance(data, dict):
            self.errors.append(f"{path}: expected a mapping")
            return {}
        for key in data:
            if key not in allowed:
                self.errors.append(f"{path}.{key}: unknown key" if path else f"{key}: unknown key")
        return data

    def number(self, data: dict, key: str, path: str, default=None, required=False,
               positive=False, negative=False, minimum=None, maximum=None):
        full = f"{path}.{key}" if path else key
        if key not in data or data[key] is None:
            if required:
                self.errors.append(f"{full}: required")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, (int, float)):
            self.errors.append(f"{full}: expected a number, got {v!r}")
            return default
        v = float(v)
        if not math.isfinite(v):
            self.errors.append(f"{full}: must be finite")
        elif positive and not v > 0:
            self.errors.append(f"{full}: must be > 0, got {v:g}")
        elif negative and not v < 0:
            self.errors.append(f"{full}: must be < 0, got {v:g}")
        elif minimum is not None and v < minimum:
            self.errors.append(f"{full}: must be >= {minimum:g}, got {v:g}")
        elif maximum is not None and v > maximum:
            self.errors.append(f"{full}: must be <= {maximum:g}, got {v:g}")
        else:
            return v
        return default

    def integer(self, data: dict, key: str, path: str, default=None, required=False, minimum=None):
        full = f"{path}.{key}" if path else key
        if key not in data or data[key] is None:
            if required:
                self.errors.append(f"{full}: required")
            return default
        v = data[key]
        if isinstance(v, bool) or not isinstance(v, int):
            self.errors.append(f"{full}: expected an integer, got {v!r}")
            return default
        if minimum is not None and v < minimum:
            self.errors.append(f"{full}: must be >= {minimum}, got {v}")
            return default
        return int(v)

    def axis(self, data: dict, key: str, path: str, default: list[float], positive=False) -> AxisSpec:
        full = f"{path}.{key}" if path else key
        raw = data.get(key, default)
        if (not isinstance(raw, (list, tuple)) or len(raw) != 3
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in raw)):
            self.errors.append(f"{full}: expected [start, stop, step]")
            return AxisSpec(*map(float, default))
        start, stop, step = map(float, raw)
        if not step > 0:
            self.errors.append(f"{full}: step must be > 0")
        elif stop < start:
            self.errors.append(f"{full}: stop must be >= start")
        elif positive and not start > 0:
            self.errors.append(f"{full}: start must be > 0")
        return AxisSpec(start, stop, step)

    def direction(self, data: dict, path: str, default=(0.0, 0.0)) -> DirectionAngles:
        theta = self.number(data, "theta", path, default[0], minimum=-90.0, maximum=90.0)
        phi = self.number(data, "phi", path, default[1], minimum=-180.0, maximum=180.0)
        return DirectionAngles.from_degrees(theta if theta is not None else 0.0, phi if phi is not None else 0.0)


class _Loader(yaml.SafeLoader):
    """Safe loader that also reads YAML 1.2 floats such as ``30e9``."""


_Loader.add_implicit_resolver(
    "tag:yaml.org,2002:float",
    re.compile(
        r"""^(?:[-+]?(?:[0-9][0-9_]*)\.[0-9_]*(?:[eE][-+]?[0-9]+)?
        |[-+]?(?:[0-9][0-9_]*)(?:[eE][-+]?[0-9]+)
        |\.[0-9_]+(?:[eE][-+]?[0-9]+)?
        |[-+]?\.(?:inf|Inf|INF)
        |\.(?:nan|NaN|NAN))$""",
        re.X,
    ),
    list("-+0123456789."),
)


def _load(text: str) -> Any:
    try:
        return yaml.load(text, Loader=_Loader)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        where = f"line {mark.line + 1}, column {mark.column + 1}" if mark else "unknown position"
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError([f"syntax error at {where}: {problem}"]) from None


def parse_config(text: str, kind: Optional[str] = None) -> ScenarioConfig:
    """Parse and validate scenario text.

    ``kind`` (e.g. the CLI subcommand) fills in or must agree with the
    document's own ``kind`` key.
    """
    data = _load(text)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(["top level: expected a mapping"])

    r = _Reader()
    top = r.section(data, "", {"kind", "frequency", "wave_speed", "seed", "aperture", "tag", *KINDS[:4]})
    doc_kind = top.get("kind")
    if doc_kind is not None and doc_kind not in KINDS:
        r.errors.append(f"kind: must be one of {', '.join(KINDS)}, got {doc_kind!r}")
    if kind is not None and doc_kind is not None and doc_kind != kind:
        r.errors.append(f"kind: config is for {doc_kind!r} but {kind!r} was requested")
    kind = kind or doc_kind
    if kind is None:
        r.errors.append("kind: required (set it in the file or pick a subcommand)")
    elif kind not in KINDS:
        r.errors.append(f"kind: must be one of {', '.join(KINDS)}")

    frequency = r.number(top, "frequency", "", required=True, positive=True)
    wave_speed = r.number(top, "wave_speed", "", SPEED_OF_LIGHT, positive=True)
    seed = r.integer(top, "seed", "", 0, minimum=0)
    if seed is not None and seed >= 2**64:
        r.errors.append(f"seed: must be < 2^64, got {seed}")

    ap = r.section(top.get("aperture"), "aperture",
                   {"count_x", "count_y", "spacing_x", "spacing_y", "spacing_wavelengths"})
    if "aperture" not in top:
        r.errors.append("aperture: required")
    count_x = r.integer(ap, "count_x", "aperture", required=bool(ap), minimum=1)
    count_y = r.integer(ap, "count_y", "aperture", count_x, minimum=1)
    lam = (wave_speed or SPEED_OF_LIGHT) / frequency if frequency else None
    spacing_wl = r.number(ap, "spacing_wavelengths", "aperture", None, positive=True)
    if spacing_wl is not None and ("spacing_x" in ap or "spacing_y" in ap):
        r.errors.append("aperture: give either spacing_wavelengths or spacing_x/spacing_y, not both")
    default_spacing = spacing_wl * lam if (spacing_wl and lam) else (0.5 * lam if lam else None)
    spacing_x = r.number(ap, "spacing_x", "aperture", default_spacing, positive=True)
    spacing_y = r.number(ap, "spacing_y", "aperture", spacing_x, positive=True)

    tg = r.section(top.get("tag", DEFAULT_TAG), "tag", {"theta", "phi", "distance", "position"})
    tag_position = tag_direction = tag_distance = None
    if "position" in tg:
        pos = tg["position"]
        if (not isinstance(pos, (list, tuple)) or len(pos) != 3
                or any(isinstance(x, bool) or not isinstance(x, (int, float)) for x in pos)):
            r.errors.append("tag.position: expected [x, y, z] in meters")
        else:
            tag_position = tuple(float(x) for x in pos)
        if any(k in tg for k in ("theta", "phi", "distance")):
            r.errors.append("tag: give either position or theta/phi/distance, not both")
    else:
        tag_direction = r.direction(tg, "tag", (DEFAULT_TAG["theta"], DEFAULT_TAG["phi"]))
        tag_distance = r.number(tg, "distance", "tag", DEFAULT_TAG["distance"], positive=True)

    params = None
    warnings: list[str] = []
    aperture = None
    if not r.errors or (count_x and spacing_x and spacing_y):
        try:
            aperture = ApertureGrid(count_x or 1, count_y or 1, spacing_x or 1.0, spacing_y or 1.0)
        except ValueError as exc:
            r.errors.append(f"aperture: {exc}")

    if kind == "steer":
        params = _steer(r, top)
    elif kind == "focus":
        params = _focus(r, top)
    elif kind == "modulate":
        params = _modulate(r, top)
    elif kind == "timevary":
        params = _timevary(r, top)
    for other in KINDS[:4]:
        if other != kind and other in top:
            r.errors.append(f"{other}: section does not apply to a {kind!r} scenario")

    if r.errors:
        raise ConfigError(r.errors)

    ctx = PropagationContext(frequency, wave_speed)
    if tag_position is not None and tag_position[2] <= 0:
        warnings.append("tag is not in front of the aperture (z <= 0)")
    if kind in ("focus", "modulate"):
        dist = params.distance if kind == "focus" else params.receiver_distance
        label = "focus.distance" if kind == "focus" else "modulate.receiver.distance"
        try:
            lower, upper = fresnel_bounds(aperture, ctx)
            if not lower < dist < upper:
                warnings.append(
                    f"{label}: {dist:g} m is outside the radiative near field ({lower:.4g} m, {upper:.4g} m)"
                )
        except FresnelRegionError as exc:
            warnings.append(f"{label}: {exc}")
    if kind == "timevary" and frequency / params.mod_frequency < 100:
        warnings.append("timevary.mod_frequency: carrier is not >> modulation frequency (ratio < 100)")

    return ScenarioConfig(
        kind, frequency, wave_speed, seed, aperture,
        tag_position, tag_direction, tag_distance, params, warnings,
    )


def _bits_option(r: _Reader, d: dict, path: str):
    bits = random_bits = None
    if "bits" in d and "random_bits" in d:
        r.errors.append(f"{path}: give either bits or random_bits, not both")
    if "bits" in d:
        raw = d["bits"]
        if isinstance(raw, str):
            raw = [c for c in raw if not c.isspace()]
        if not isinstance(raw, (list, tuple)) or not raw or any(str(b) not in ("0", "1") for b in raw):
            r.errors.append(f"{path}.bits: expected a non-empty list of 0/1")
        else:
            bits = tuple(int(str(b)) for b in raw)
    else:
        random_bits = r.integer(d, "random_bits", path, 64, minimum=1)
    return bits, random_bits


def _steer(r: _Reader, top: dict) -> SteerParams:
    d = r.section(top.get("steer"), "steer", {"theta", "phi", "quantization_bits", "grid"})
    direction = r.direction(d, "steer", (0.0, 0.0))
    bits = r.integer(d, "quantization_bits", "steer", None, minimum=1)
    g = r.section(d.get("grid"), "steer.grid", {"theta", "phi"})
    return SteerParams(
        direction, bits,
        r.axis(g, "theta", "steer.grid", DEFAULT_FAR_GRID["theta"]),
        r.axis(g, "phi", "steer.grid", DEFAULT_FAR_GRID["phi"]),
    )


def _focus(r: _Reader, top: dict) -> FocusParams:
    d = r.section(top.get("focus"), "focus", {"theta", "phi", "distance", "quantization_bits", "depth"})
    if "focus" not in top:
        r.errors.append("focus: required")
    direction = r.direction(d, "focus", (0.0, 0.0))
    distance = r.number(d, "distance", "focus", None, required=True, positive=True)
    bits = r.integer(d, "quantization_bits", "focus", None, minimum=1)
    return FocusParams(direction, distance, bits, r.axis(d, "depth", "focus", DEFAULT_DEPTH, positive=True))


def _modulate(r: _Reader, top: dict) -> ModulateParams:
    d = r.section(top.get("modulate"), "modulate",
                  {"receiver", "threshold_db", "bits", "random_bits", "depth"})
    if "modulate" not in top:
        r.errors.append("modulate: required")
    rx = r.section(d.get("receiver"), "modulate.receiver", {"theta", "phi", "distance"})
    if "receiver" not in d:
        r.errors.append("modulate.receiver: required")
    direction = r.direction(rx, "modulate.receiver", (0.0, 0.0))
    distance = r.number(rx, "distance", "modulate.receiver", None, required=bool(rx), positive=True)
    threshold = r.number(d, "threshold_db", "modulate", -10.0, negative=True)
    bits, random_bits = _bits_option(r, d, "modulate")
    depth = r.axis(d, "depth", "modulate", DEFAULT_DEPTH, positive=True)
    return ModulateParams(direction, distance, threshold, bits, random_bits, depth)


def _timevary(r: _Reader, top: dict) -> TimevaryParams:
    d = r.section(top.get("timevary"), "timevary",
                  {"mod_frequency", "target", "design_harmonic", "harmonics", "k_max", "normalization", "grid"})
    if "timevary" not in top:
        r.errors.append("timevary: required")
    f0 = r.number(d, "mod_frequency", "timevary", None, required=True, positive=True)
    target = None
    if d.get("target") is not None:
        t = r.section(d["target"], "timevary.target", {"theta", "phi"})
        target = r.direction(t, "timevary.target", (0.0, 0.0))
    k = r.integer(d, "design_harmonic", "timevary", 1)
    if k is not None and k % 2 == 0:
        r.errors.append("timevary.design_harmonic: must be odd")
    harmonics = d.get("harmonics", [1, 3])
    if (not isinstance(harmonics, (list, tuple)) or not harmonics
            or any(isinstance(h, bool) or not isinstance(h, int) for h in harmonics)):
        r.errors.append("timevary.harmonics: expected a non-empty list of integers")
        harmonics = [1, 3]
    k_max = r.integer(d, "k_max", "timevary", 5, minimum=1)
    norm = d.get("normalization", "invariant")
    if norm not in ("invariant", "harmonic"):
        r.errors.append("timevary.normalization: must be 'invariant' or 'harmonic'")
    g = r.section(d.get("grid"), "timevary.grid", {"theta", "phi"})
    return TimevaryParams(
        f0 or 1.0, target, k or 1, tuple(int(h) for h in harmonics), k_max or 1, norm,
        r.axis(g, "theta", "timevary.grid", DEFAULT_HARMONIC_GRID["theta"]),
        r.axis(g, "phi", "timevary.grid", DEFAULT_HARMONIC_GRID["phi"]),
    )
