"""Time-varying reflecting surface with square-wave (+1/-1) lattice reflection.

Each lattice ``(m, n)`` toggles between the open-circuit (+1) and
short-circuit (-1) states at ``f0`` with its own delay ``tau_mn``. The field
scattered at ``f_c + k f0`` is the array sum of the k-th Fourier coefficients
``D^k_mn`` weighted by the lattice phase terms ``F_mn``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .geometry import AngularGrid, ApertureGrid, DirectionAngles, PropagationContext, unit_vectors
from .propagation import ElementPattern, isotropic

OPEN_CIRCUIT = 1.0
SHORT_CIRCUIT = -1.0
MIN_CARRIER_RATIO = 100.0


@dataclass(frozen=True)
class ModulationStates:
    high: float = OPEN_CIRCUIT
    low: float = SHORT_CIRCUIT

    @property
    def separation(self) -> float:
        return abs(self.high - self.low)


@dataclass(frozen=True)
class SquareWaveProfile:
    """Modulation frequency ``f0`` (Hz) and per-lattice delays (s), shape (M, N).

    Delays are kept as given; they are reduced modulo the period only when a
    waveform is generated.
    """

    mod_frequency: float
    delays: np.ndarray

    def __post_init__(self):
        if not self.mod_frequency > 0:
            raise ValueError("mod_frequency must be > 0")
        d = np.asarray(self.delays, dtype=float)
        if d.ndim != 2:
            raise ValueError("delays must be an (M, N) matrix")
        object.__setattr__(self, "delays", d)

    @classmethod
    def synchronized(cls, aperture: ApertureGrid, mod_frequency: float) -> "SquareWaveProfile":
        return cls(mod_frequency, np.zeros(aperture.shape))

    @property
    def period(self) -> float:
        return 1.0 / self.mod_frequency

    def check_carrier(self, ctx: PropagationContext) -> Optional[str]:
        ratio = ctx.frequency / self.mod_frequency
        if ratio < MIN_CARRIER_RATIO:
            return (
                f"carrier/modulation ratio {ratio:.3g} is below {MIN_CARRIER_RATIO:g}; "
                "the harmonic model assumes f_c >> f0"
            )
        return None


def gamma_waveform(profile: SquareWaveProfile, lattice: tuple[int, int], times) -> np.ndarray:
    """Reflection coefficient of one lattice at ``times``: +1 on the first half
    of each (delayed) period, -1 on the second."""
    m, n = lattice
    rows, cols = profile.delays.shape
    if not (0 <= m < rows and 0 <= n < cols):
        raise IndexError(f"lattice {lattice} outside a {rows}x{cols} surface")
    period = profile.period
    phase = np.mod(np.asarray(times, dtype=float) - profile.delays[m, n], period)
    return np.where(phase < period / 2.0, OPEN_CIRCUIT, SHORT_CIRCUIT)


@dataclass(frozen=True)
class HarmonicCoefficients:
    """``values[i]`` holds the (M, N) coefficients for ``harmonics[i]``."""

    harmonics: tuple[int, ...]
    values: np.ndarray

    def __getitem__(self, k: int) -> np.ndarray:
        return self.values[self.harmonics.index(k)]


def coefficient(k: int, delay, mod_frequency: float):
    """Closed-form Fourier coefficient of the delayed square wave.

    ``(2 / (pi k)) exp(-j (2 pi k f0 tau + pi/2))`` for odd k, zero otherwise.
    The signed ``k`` in the prefactor yields ``D^{-k} = conj(D^k)``.
    """
    delay = np.asarray(delay, dtype=float)
    if k % 2 == 0:
        return np.zeros(delay.shape, dtype=complex)
    # reduce k*f0*tau to one cycle before scaling by 2*pi to keep the phase exact
    cycles = np.mod(k * mod_frequency * delay, 1.0)
    return (2.0 / (math.pi * k)) * np.exp(-1j * (2.0 * math.pi * cycles + math.pi / 2.0))


def fourier_coefficients(profile: SquareWaveProfile, harmonics: Iterable[int]) -> HarmonicCoefficients:
    ks = tuple(int(k) for k in harmonics)
    values = np.zeros((len(ks),) + profile.delays.shape, dtype=complex)
    for i, k in enumerate(ks):
        values[i] = coefficient(k, profile.delays, profile.mod_frequency)
    return HarmonicCoefficients(ks, values)


def lattice_phase_terms(aperture: ApertureGrid, directions: np.ndarray, ctx: PropagationContext) -> np.ndarray:
    """``F_mn`` for each direction: shape (n_dirs, M*N), lattice (1, 1) as reference."""
    m = np.arange(aperture.count_x) * aperture.spacing_x
    n = np.arange(aperture.count_y) * aperture.spacing_y
    gm, gn = np.meshgrid(m, n, indexing="ij")
    ux = directions[..., 0].reshape(-1, 1)
    uy = directions[..., 1].reshape(-1, 1)
    return np.exp(1j * ctx.wavenumber * (ux * gm.ravel()[None, :] + uy * gn.ravel()[None, :]))


def _lattice_sum(aperture: ApertureGrid, weights: np.ndarray, directions: np.ndarray, k: float) -> np.ndarray:
    """``sum_mn w_mn F_mn`` per direction, factored along the two lattice axes."""
    m = np.arange(aperture.count_x) * aperture.spacing_x
    n = np.arange(aperture.count_y) * aperture.spacing_y
    w = weights.reshape(aperture.shape)
    out = np.empty(directions.shape[0], dtype=complex)
    step = max(1, (1 << 20) // max(aperture.count_x, aperture.count_y))
    for start in range(0, directions.shape[0], step):
        sl = slice(start, start + step)
        fx = np.exp(1j * k * np.outer(directions[sl, 0], m))
        fy = np.exp(1j * k * np.outer(directions[sl, 1], n))
        out[sl] = np.einsum("dm,dm->d", fx, np.einsum("dn,mn->dm", fy, w))
    return out


@dataclass(frozen=True)
class HarmonicPattern:
    """Complex far-field pattern of harmonic ``k`` at ``frequency`` (Hz)."""

    k: int
    frequency: float
    grid: AngularGrid
    values: np.ndarray

    def magnitude(self) -> np.ndarray:
        return np.abs(self.values)

    def peak(self) -> tuple[DirectionAngles, float]:
        mags = np.abs(self.values)
        i = int(np.argmax(mags))
        theta, phi = self.grid.mesh()
        return DirectionAngles(float(theta[i]), float(phi[i])), float(mags[i])


def _pattern_sum(
    lattice: ApertureGrid,
    weights: np.ndarray,
    grid: AngularGrid,
    ctx: PropagationContext,
    pattern: ElementPattern,
) -> np.ndarray:
    theta, phi = grid.mesh()
    out = _lattice_sum(lattice, np.asarray(weights, dtype=complex), unit_vectors(theta, phi), ctx.wavenumber)
    gain = 1.0 if pattern is isotropic else pattern(theta, phi)
    return gain * out / lattice.size


def invariant_pattern(
    lattice: ApertureGrid, grid: AngularGrid, ctx: PropagationContext, pattern: ElementPattern = isotropic
) -> np.ndarray:
    """Normalised pattern with every reflection coefficient fixed at +1."""
    return _pattern_sum(lattice, np.ones(lattice.size), grid, ctx, pattern)


def harmonic_pattern(
    lattice: ApertureGrid,
    profile: SquareWaveProfile,
    k: int,
    grid: AngularGrid,
    ctx: PropagationContext,
    pattern: ElementPattern = isotropic,
) -> HarmonicPattern:
    if profile.delays.shape != lattice.shape:
        raise ValueError(f"delays {profile.delays.shape} do not match lattice {lattice.shape}")
    msg = profile.check_carrier(ctx)
    if msg:
        warnings.warn(msg, stacklevel=2)
    freq = ctx.frequency + k * profile.mod_frequency
    if k % 2 == 0:
        return HarmonicPattern(k, freq, grid, np.zeros(len(grid), dtype=complex))
    d = coefficient(k, profile.delays, profile.mod_frequency)
    return HarmonicPattern(k, freq, grid, _pattern_sum(lattice, d, grid, ctx, pattern))


def steering_delays(
    lattice: ApertureGrid,
    target: DirectionAngles,
    k: int,
    carrier_frequency: float,
    mod_frequency: float,
    wave_speed: float = 299_792_458.0,
) -> np.ndarray:
    """Per-lattice delays that steer harmonic ``k`` toward ``target``."""
    if k % 2 == 0:
        raise ValueError(f"harmonic {k} carries no energy; only odd harmonics can be steered")
    if not mod_frequency > 0:
        raise ValueError("mod_frequency must be > 0")
    theta, phi = target
    m = np.arange(lattice.count_x)[:, None] * lattice.spacing_x
    n = np.arange(lattice.count_y)[None, :] * lattice.spacing_y
    path = m * math.sin(theta) * math.cos(phi) + n * math.sin(theta) * math.sin(phi)
    return carrier_frequency / (wave_speed * k * mod_frequency) * path


def spectrum_at_direction(
    lattice: ApertureGrid,
    profile: SquareWaveProfile,
    direction: DirectionAngles,
    k_max: int,
    ctx: PropagationContext,
    pattern: ElementPattern = isotropic,
) -> list[tuple[int, float, complex]]:
    """``(k, f_c + k f0, E^k)`` for every k in ``-k_max..k_max``."""
    if k_max < 1:
        raise ValueError("k_max must be >= 1")
    grid = AngularGrid(np.array([direction.theta]), np.array([direction.phi]))
    msg = profile.check_carrier(ctx)
    if msg:
        warnings.warn(msg, stacklevel=2)
    rows = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        for k in range(-k_max, k_max + 1):
            hp = harmonic_pattern(lattice, profile, k, grid, ctx, pattern)
            rows.append((k, hp.frequency, complex(hp.values[0])))
    return rows


def harmonic_excitation_phases(profile: SquareWaveProfile, k: int = 1) -> np.ndarray:
    """Phase of ``D^k_mn`` per lattice; the effective excitation at harmonic k."""
    return np.angle(coefficient(k, profile.delays, profile.mod_frequency))


def parseval_partial_sum(k_max: int) -> float:
    """``sum |D^k|^2`` over odd ``|k| <= k_max`` (tends to 1, the square wave's power)."""
    ks = np.arange(1, k_max + 1, 2, dtype=float)
    return float(2.0 * np.sum((2.0 / (math.pi * ks)) ** 2))
