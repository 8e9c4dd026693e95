"""Plain-text field maps: ``#`` key=value header lines, then comma-delimited rows
with six decimals. Output is byte-stable for identical inputs."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Optional, Union

import numpy as np

from .geometry import AngularGrid
from .propagation import ComplexField, magnitude_db
from .timevarying import HarmonicPattern

Normalization = Union[str, float, None]


def _fmt(v: float) -> str:
    # +0.0 folds -0.0 so equal fields give equal bytes
    return f"{float(v) + 0.0:.6f}"


def _reference(values: np.ndarray, normalization: Normalization) -> tuple[Optional[float], str]:
    if normalization in (None, "absolute"):
        return 1.0, "absolute"
    if normalization == "peak":
        return float(np.max(np.abs(values))), "peak"
    ref = float(normalization)
    if not ref > 0:
        raise ValueError("normalization reference must be > 0")
    return ref, "reference"


def _write(path, header: Mapping[str, object], rows: list[str]) -> Path:
    path = Path(path)
    lines = [f"# {k}={v}" for k, v in header.items()] + rows
    try:
        path.write_bytes(("\n".join(lines) + "\n").encode("ascii"))
    except OSError as exc:
        raise OSError(f"cannot write field map to {path}: {exc}") from exc
    return path


def emit_field_map(
    field: Union[ComplexField, HarmonicPattern],
    path,
    normalization: Normalization = "peak",
    extra: Optional[Mapping[str, object]] = None,
) -> Path:
    """Write ``field`` to ``path``.

    ``normalization`` is ``"peak"`` (0 dB at the field maximum), a positive
    float reference magnitude, or ``"absolute"``/None (dB re 1).
    """
    values = np.asarray(field.values)
    if values.size == 0:
        raise ValueError("cannot emit an empty field")
    ref, mode = _reference(values, normalization)
    db = magnitude_db(values, ref)
    phase = np.angle(values)
    header: dict[str, object] = {"normalization": mode, "reference_magnitude": f"{ref:.9e}"}

    if isinstance(field, HarmonicPattern):
        theta, phi = field.grid.mesh()
        header = {"kind": "harmonic_pattern", "k": field.k, "frequency_hz": _fmt(field.frequency), **header}
        header["rows"] = values.size
        header["columns"] = "k,frequency_hz,theta_deg,phi_deg,magnitude_db,phase_rad"
        prefix = f"{field.k},{_fmt(field.frequency)},"
        rows = [
            prefix + ",".join(map(_fmt, r))
            for r in zip(np.degrees(theta), np.degrees(phi), db, phase)
        ]
    elif isinstance(field.grid, AngularGrid):
        theta, phi = field.grid.mesh()
        header = {"kind": "angular_field", **header}
        if field.grid.distance is not None:
            header["distance_m"] = _fmt(field.grid.distance)
        header["rows"] = values.size
        header["columns"] = "theta_deg,phi_deg,magnitude_db,phase_rad"
        rows = [",".join(map(_fmt, r)) for r in zip(np.degrees(theta), np.degrees(phi), db, phase)]
    else:
        pts = field.grid.points
        header = {"kind": "point_field", **header}
        header["rows"] = values.size
        header["columns"] = "x_m,y_m,z_m,magnitude_db,phase_rad"
        rows = [",".join(map(_fmt, r)) for r in zip(pts[:, 0], pts[:, 1], pts[:, 2], db, phase)]
    if extra:
        header.update(extra)
    return _write(path, header, rows)


def emit_spectrum(rows, path, reference: float = 1.0, direction_deg=(0.0, 0.0)) -> Path:
    """Spectrum rows ``(k, frequency, value)`` at one direction."""
    out = []
    ref = float(reference)
    for k, freq, val in rows:
        mag = abs(val)
        db = 20.0 * math.log10(mag / ref) if mag > 0 else -300.0
        out.append(
            f"{k},{_fmt(freq)},{_fmt(direction_deg[0])},{_fmt(direction_deg[1])},"
            f"{_fmt(max(db, -300.0))},{_fmt(np.angle(val))}"
        )
    header = {
        "kind": "spectrum",
        "reference_magnitude": f"{ref:.9e}",
        "rows": len(out),
        "columns": "k,frequency_hz,theta_deg,phi_deg,magnitude_db,phase_rad",
    }
    return _write(path, header, out)


def read_field_map(path) -> tuple[dict[str, str], np.ndarray]:
    """Header dict and numeric rows of a field map."""
    header: dict[str, str] = {}
    with open(path, encoding="ascii") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            key, _, value = line[1:].strip().partition("=")
            header[key] = value
    data = np.loadtxt(path, delimiter=",", comments="#", ndmin=2)
    return header, data
