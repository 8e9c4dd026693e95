import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from irsholo.geometry import (
    AngularGrid,
    ApertureGrid,
    DirectionAngles,
    PointGrid,
    PropagationContext,
    angular_separation,
    degree_axis,
)
from irsholo.propagation import ComplexField
from irsholo.synthesis import steering_profile
from irsholo.timevarying import (
    ModulationStates,
    SquareWaveProfile,
    coefficient,
    fourier_coefficients,
    gamma_waveform,
    harmonic_excitation_phases,
    harmonic_pattern,
    invariant_pattern,
    parseval_partial_sum,
    spectrum_at_direction,
    steering_delays,
)

FC = 10e9
F0 = 1e6
CTX = PropagationContext(FC)
LAM = CTX.wavelength
LATTICE = ApertureGrid.square(10, LAM / 2)
FULL = AngularGrid.from_degrees(degree_axis(0, 90, 1), degree_axis(-179, 180, 1))


def quadrature(k, delay, f0, points=10_000):
    """Trapezoid rule for (1/T) int_0^T gamma(t) exp(-j 2 pi k f0 t) dt.

    The period is split at the two switching instants so every panel sees a
    constant sign, taken from the waveform at the panel midpoint.
    """
    period = 1.0 / f0
    prof = SquareWaveProfile(f0, np.array([[delay]]))
    edges = sorted({0.0, period, math.fmod(delay, period) % period, math.fmod(delay + period / 2, period) % period})
    total = 0j
    for a, b in zip(edges, edges[1:]):
        if b <= a:
            continue
        sign = gamma_waveform(prof, (0, 0), [(a + b) / 2])[0]
        t = np.linspace(a, b, max(2, int(points * (b - a) / period)))
        total += sign * np.trapezoid(np.exp(-2j * math.pi * k * f0 * t), t)
    return total / period


def test_states_are_maximally_separated():
    assert ModulationStates().separation == 2.0


def test_waveform_examples():
    prof = SquareWaveProfile(F0, np.zeros((2, 2)))
    t0 = prof.period
    np.testing.assert_array_equal(gamma_waveform(prof, (0, 0), [0.0, t0 / 2, 0.25 * t0, 0.75 * t0]), [1, -1, 1, -1])


def test_waveform_half_period_shift_negates():
    t = np.linspace(0, 3 / F0, 1001)[:-1] + 0.1e-9
    base = SquareWaveProfile(F0, np.zeros((1, 1)))
    half = SquareWaveProfile(F0, np.full((1, 1), 0.5 / F0))
    full = SquareWaveProfile(F0, np.full((1, 1), 1.0 / F0))
    g = gamma_waveform(base, (0, 0), t)
    np.testing.assert_array_equal(gamma_waveform(half, (0, 0), t), -g)
    np.testing.assert_array_equal(gamma_waveform(full, (0, 0), t), g)


def test_waveform_index_checked():
    prof = SquareWaveProfile(F0, np.zeros((2, 3)))
    with pytest.raises(IndexError):
        gamma_waveform(prof, (2, 0), [0.0])
    with pytest.raises(IndexError):
        gamma_waveform(prof, (0, -1), [0.0])


def test_profile_validation():
    with pytest.raises(ValueError):
        SquareWaveProfile(0.0, np.zeros((1, 1)))
    with pytest.raises(ValueError):
        SquareWaveProfile(F0, np.zeros(3))


def test_carrier_ratio_warning():
    prof = SquareWaveProfile(F0, np.zeros(LATTICE.shape))
    assert prof.check_carrier(CTX) is None
    assert prof.check_carrier(PropagationContext(50 * F0)) is not None
    with pytest.warns(UserWarning, match="ratio"):
        harmonic_pattern(LATTICE, prof, 1, FULL, PropagationContext(50 * F0))


def test_first_harmonic_at_zero_delay():
    d = coefficient(1, 0.0, F0)
    assert abs(d) == pytest.approx(0.63662, abs=1e-5)
    assert np.angle(d) == pytest.approx(-math.pi / 2, abs=1e-12)


@pytest.mark.parametrize("k", [0, 2, -2, 4, 10])
def test_even_harmonics_vanish(k):
    assert np.all(coefficient(k, np.array([0.0, 1e-7, 3e-7]), F0) == 0)


def test_third_harmonic_matches_quadrature():
    d = coefficient(3, 0.0, F0)
    assert abs(d) == pytest.approx(2 / (3 * math.pi), abs=1e-12)
    assert np.angle(d) == pytest.approx(-math.pi / 2, abs=1e-12)
    assert abs(d - quadrature(3, 0.0, F0)) < 1e-6


def test_closed_form_matches_quadrature_sweep():
    delays = np.random.default_rng(15).uniform(0, 2 / F0, 16)
    worst = max(abs(coefficient(k, tau, F0) - quadrature(k, tau, F0)) for k in range(-15, 16) for tau in delays)
    assert worst < 1e-6


def test_negative_harmonics_are_conjugates():
    tau = np.random.default_rng(1).uniform(0, 1 / F0, 20)
    for k in (1, 3, 7):
        np.testing.assert_allclose(coefficient(-k, tau, F0), np.conj(coefficient(k, tau, F0)), atol=1e-15)
    assert np.angle(coefficient(-1, 0.0, F0)) == pytest.approx(math.pi / 2)


@given(st.integers(-31, 31).filter(lambda k: k % 2), st.floats(0, 1e-5))
def test_delay_phase_linearity(k, tau):
    shift = np.angle(coefficient(k, tau, F0) / coefficient(k, 0.0, F0))
    expected = -2 * math.pi * k * F0 * tau
    assert abs(np.angle(np.exp(1j * (shift - expected)))) < 1e-9


def test_coefficient_magnitudes():
    for k in range(1, 40, 2):
        assert abs(coefficient(k, 3.7e-7, F0)) == pytest.approx(2 / (math.pi * k))


def test_parseval_partial_sums():
    # odd harmonics to |k| <= 99 carry about 99.6% of the unit power; 99.9% needs |k| near 405
    assert parseval_partial_sum(99) == pytest.approx(0.995947, abs=1e-6)
    assert parseval_partial_sum(403) < 0.999 <= parseval_partial_sum(405)
    assert parseval_partial_sum(999) >= 0.999
    assert parseval_partial_sum(99) < parseval_partial_sum(101) < 1.0
    ks = [k for k in range(-99, 100) if k % 2]
    direct = sum(abs(coefficient(k, 1.3e-7, F0)) ** 2 for k in ks)
    assert direct == pytest.approx(parseval_partial_sum(99), rel=1e-12)


def test_fourier_coefficients_container():
    prof = SquareWaveProfile(F0, np.full((2, 3), 1e-7))
    hc = fourier_coefficients(prof, [-1, 1, 2, 3])
    assert hc.values.shape == (4, 2, 3)
    np.testing.assert_array_equal(hc[2], 0)
    np.testing.assert_allclose(hc[-1], np.conj(hc[1]))


def test_synchronized_first_harmonic_broadside():
    prof = SquareWaveProfile.synchronized(LATTICE, F0)
    hp = harmonic_pattern(LATTICE, prof, 1, FULL, CTX)
    peak_dir, peak = hp.peak()
    inv = np.abs(invariant_pattern(LATTICE, FULL, CTX))
    assert peak_dir.theta == 0.0
    assert peak / inv.max() == pytest.approx(2 / math.pi, rel=1e-12)
    assert hp.frequency == FC + F0


def test_even_harmonic_pattern_is_zero():
    prof = SquareWaveProfile(F0, np.random.default_rng(0).uniform(0, 1e-6, LATTICE.shape))
    hp = harmonic_pattern(LATTICE, prof, 2, FULL, CTX)
    assert not np.any(hp.values)


@pytest.mark.parametrize("k", [1, 3, -5])
def test_synchronized_pattern_factorizes(k):
    prof = SquareWaveProfile.synchronized(LATTICE, F0)
    hp = harmonic_pattern(LATTICE, prof, k, FULL, CTX)
    np.testing.assert_allclose(hp.values, coefficient(k, 0.0, F0) * invariant_pattern(LATTICE, FULL, CTX), atol=1e-14)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([1, 3, 5]))
def test_pattern_bounded(seed, k):
    prof = SquareWaveProfile(F0, np.random.default_rng(seed).uniform(0, 2e-6, LATTICE.shape))
    hp = harmonic_pattern(LATTICE, prof, k, FULL, CTX)
    assert hp.magnitude().max() <= 2 / (math.pi * k) + 1e-12


def test_pattern_shape_mismatch():
    with pytest.raises(ValueError):
        harmonic_pattern(LATTICE, SquareWaveProfile(F0, np.zeros((3, 3))), 1, FULL, CTX)


def test_delay_examples():
    assert steering_delays(LATTICE, DirectionAngles.from_degrees(40, 70), 1, FC, F0)[0, 0] == 0.0
    assert not np.any(steering_delays(LATTICE, DirectionAngles(0.0, 1.0), 3, FC, F0))
    with pytest.raises(ValueError):
        steering_delays(LATTICE, DirectionAngles(0.2, 0.0), 2, FC, F0)


def test_delays_steer_first_harmonic_to_30_45():
    target = DirectionAngles.from_degrees(30, 45)
    prof = SquareWaveProfile(F0, steering_delays(LATTICE, target, 1, FC, F0, CTX.wave_speed))
    peak_dir, _ = harmonic_pattern(LATTICE, prof, 1, FULL, CTX).peak()
    assert peak_dir.degrees() == pytest.approx((30.0, 45.0))


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 60), st.floats(-180, 180, exclude_min=True))
def test_delays_steer_random_targets(t_deg, p_deg):
    target = DirectionAngles.from_degrees(t_deg, p_deg)
    prof = SquareWaveProfile(F0, steering_delays(LATTICE, target, 1, FC, F0, CTX.wave_speed))
    peak_dir, _ = harmonic_pattern(LATTICE, prof, 1, FULL, CTX).peak()
    assert math.degrees(angular_separation(peak_dir, target)) <= 1.0


def test_delays_reduced_modulo_period_keep_pattern():
    target = DirectionAngles.from_degrees(50, -120)
    delays = steering_delays(ApertureGrid.square(10, 3 * LAM), target, 1, FC, F0, CTX.wave_speed)
    lat = ApertureGrid.square(10, 3 * LAM)
    assert delays.max() > 0 or delays.min() < 0
    a = harmonic_pattern(lat, SquareWaveProfile(F0, delays), 1, FULL, CTX).values
    b = harmonic_pattern(lat, SquareWaveProfile(F0, np.mod(delays, 1 / F0)), 1, FULL, CTX).values
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_spectrum_synchronized_broadside():
    prof = SquareWaveProfile.synchronized(LATTICE, F0)
    rows = spectrum_at_direction(LATTICE, prof, DirectionAngles(0, 0), 7, CTX)
    assert [k for k, _, _ in rows] == list(range(-7, 8))
    by_k = {k: v for k, _, v in rows}
    for k, freq, v in rows:
        assert freq == FC + k * F0
        expected = 2 / (math.pi * abs(k)) if k % 2 else 0.0
        assert abs(v) == pytest.approx(expected, abs=1e-12)
    for k in range(1, 8):
        assert by_k[-k] == pytest.approx(np.conj(by_k[k]), abs=1e-14)


def test_spectrum_first_harmonic_design_missteers_third():
    target = DirectionAngles.from_degrees(30, 45)
    prof = SquareWaveProfile(F0, steering_delays(LATTICE, target, 1, FC, F0, CTX.wave_speed))
    by_k = {k: v for k, _, v in spectrum_at_direction(LATTICE, prof, target, 3, CTX)}
    assert abs(by_k[1]) == pytest.approx(2 / math.pi, rel=1e-9)
    assert abs(by_k[3]) < 2 / (3 * math.pi)


def test_spectrum_requires_positive_kmax():
    with pytest.raises(ValueError):
        spectrum_at_direction(LATTICE, SquareWaveProfile.synchronized(LATTICE, F0), DirectionAngles(0, 0), 0, CTX)


@settings(max_examples=20, deadline=None)
@given(st.floats(0, 80), st.floats(-180, 180))
def test_first_harmonic_phases_match_steering_profile(t_deg, p_deg):
    target = DirectionAngles.from_degrees(t_deg, p_deg)
    prof = SquareWaveProfile(F0, steering_delays(LATTICE, target, 1, FC, F0, CTX.wave_speed))
    harmonic = harmonic_excitation_phases(prof, 1).ravel()
    plane = ComplexField(PointGrid(LATTICE.positions()), np.ones(LATTICE.size))
    steer = steering_profile(LATTICE, plane, target, CTX).flat()
    diff = np.angle(np.exp(1j * (harmonic - steer)))
    assert np.max(np.abs(np.angle(np.exp(1j * (diff - diff[0]))))) < 1e-9


def test_synchronized_pattern_has_no_warning_at_high_ratio():
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        harmonic_pattern(LATTICE, SquareWaveProfile.synchronized(LATTICE, F0), 1, FULL, CTX)
