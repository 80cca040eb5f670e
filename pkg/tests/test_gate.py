"""Mirror response, controlled-phase overlap, and gate fidelity."""

import math
import warnings

import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate import quad
from scipy.special import erfcx

from quadwg import (
    GateReport,
    InvalidOverlapError,
    PulseShape,
    TruncationError,
    gate_overlap,
    gate_report,
    infidelity_sweep,
    truth_table,
    worst_case_fidelity,
)
from quadwg.gate import mirror_bracket, mirror_reflection

GAMMA = 1.0
OMEGA0 = 1.0


def pulse_power(pulse):
    lo, hi = pulse.support()
    mass, _ = quad(lambda w: abs(pulse(w)) ** 2, lo, hi, limit=200)
    return mass


@pytest.mark.parametrize("kind", ["gaussian", "lorentzian"])
@pytest.mark.parametrize("fwhm_on_power", [False, True])
def test_pulse_normalization_and_width(kind, fwhm_on_power):
    fwhm = 0.37
    pulse = getattr(PulseShape, kind)(OMEGA0, fwhm, fwhm_on_power=fwhm_on_power)
    assert pulse_power(pulse) == pytest.approx(1.0, rel=1e-8)
    peak = abs(pulse(OMEGA0))
    edge = abs(pulse(OMEGA0 + fwhm / 2))
    if fwhm_on_power:
        assert edge ** 2 / peak ** 2 == pytest.approx(0.5, rel=1e-12)
    else:
        assert edge / peak == pytest.approx(0.5, rel=1e-12)
    assert abs(pulse(OMEGA0 - fwhm / 2)) == pytest.approx(edge, rel=1e-12)


def test_tabulated_pulse_sampling_and_support():
    pulse = PulseShape.tabulated([0.0, 1.0, 2.0], [0.0, 1.0, 0.0])
    # Normalization uses the trapezoid mass of the samples themselves.
    freqs = np.array([0.0, 1.0, 2.0])
    sampled = np.abs(pulse(freqs)) ** 2
    assert np.trapezoid(sampled, freqs) == pytest.approx(1.0, rel=1e-12)
    assert pulse(1.0) == pytest.approx(1.0)
    assert pulse(0.5) == pytest.approx(0.5)
    assert pulse(-0.5) == 0.0
    assert pulse(2.5) == 0.0
    assert pulse.support() == (0.0, 2.0)


def test_tabulated_pulse_validation():
    with pytest.raises(ValueError):
        PulseShape.tabulated([0.0], [1.0])
    with pytest.raises(ValueError):
        PulseShape.tabulated([0.0, 1.0, 0.5], [0.0, 1.0, 0.0])
    with pytest.raises(ValueError):
        PulseShape.tabulated([0.0, 1.0, 2.0], [0.0, -1.0, 0.0])
    with pytest.raises(ValueError):
        PulseShape.tabulated([0.0, 1.0, 2.0], [0.0, 0.0, 0.0])


def test_undersampled_spikes_raise_truncation_error():
    eps = 1e-9
    freqs = [0.0, 0.7 - eps, 0.7, 0.7 + eps, 1.3 - eps, 1.3, 1.3 + eps, 2.0]
    vals = [0.0, 0.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0]
    pulse = PulseShape.tabulated(freqs, vals)
    with pytest.raises(TruncationError):
        gate_overlap(pulse, 0.5, omega0=1.0)


def test_mirror_bracket_on_and_off_resonance():
    assert mirror_bracket(GAMMA, OMEGA0, OMEGA0) == -1.0
    above = mirror_bracket(GAMMA, OMEGA0, OMEGA0 + 10 * GAMMA)
    below = mirror_bracket(GAMMA, OMEGA0, OMEGA0 - 10 * GAMMA)
    assert above == np.conj(below)
    # Ten linewidths out the response has mostly recovered transmission.
    assert above.real == pytest.approx(1.0, rel=5e-3)
    assert 0.09 < abs(above - 1.0) < 0.11


@given(st.floats(min_value=-50.0, max_value=50.0, allow_nan=False))
def test_mirror_bracket_is_unimodular(detuning):
    value = mirror_bracket(GAMMA, OMEGA0, OMEGA0 + detuning * GAMMA)
    assert abs(value) == pytest.approx(1.0, abs=1e-12)


def test_mirror_reflection_is_pulse_times_bracket():
    pulse = PulseShape.gaussian(OMEGA0, 0.2)
    reflected = mirror_reflection(pulse, GAMMA)
    omegabar = OMEGA0 + np.linspace(-0.5, 0.5, 11)
    expected = pulse(omegabar) * mirror_bracket(GAMMA, OMEGA0, omegabar)
    np.testing.assert_allclose(reflected(omegabar), expected, rtol=1e-12)
    assert reflected(OMEGA0) == pytest.approx(-pulse(OMEGA0))


@pytest.mark.parametrize("ratio", [3.0, 100.0])
def test_gaussian_overlap_closed_form(ratio):
    pulse = PulseShape.gaussian(OMEGA0, GAMMA / ratio)
    overlap = gate_overlap(pulse, GAMMA)
    x = (GAMMA / 2) / pulse.scale
    expected = 1.0 - 2.0 * x * math.sqrt(math.pi) * erfcx(x)
    assert overlap.real == pytest.approx(expected, rel=1e-12)
    assert abs(overlap.imag) < 1e-12


@pytest.mark.parametrize("ratio", [3.0, 100.0])
def test_lorentzian_overlap_closed_form(ratio):
    fwhm = GAMMA / ratio
    pulse = PulseShape.lorentzian(OMEGA0, fwhm)
    overlap = gate_overlap(pulse, GAMMA)
    g, a = fwhm / 2, GAMMA / 2
    expected = (g * g - 2 * a * g - a * a) / (g + a) ** 2
    assert overlap.real == pytest.approx(expected, rel=1e-12)
    assert abs(overlap.imag) < 1e-12


def test_narrow_gaussian_reference_point():
    pulse = PulseShape.gaussian(OMEGA0, GAMMA / 100)
    overlap = gate_overlap(pulse, GAMMA)
    assert overlap.real == pytest.approx(-0.9999278730516818, rel=1e-12)
    fidelity, occupation = worst_case_fidelity(overlap)
    assert fidelity == pytest.approx(0.9998557513056604, rel=1e-12)
    assert occupation == pytest.approx(1.0)


def test_tabulated_pulse_matches_analytic_overlap():
    fwhm = GAMMA / 3
    grid = OMEGA0 + np.linspace(-6 * fwhm, 6 * fwhm, 4001)
    analytic = PulseShape.gaussian(OMEGA0, fwhm)
    sampled = PulseShape.tabulated(grid, np.abs(analytic(grid)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")  # interp kinks upset the quad estimate
        overlap = gate_overlap(sampled, GAMMA)
    assert overlap == pytest.approx(gate_overlap(analytic, GAMMA), rel=1e-5)


def test_worst_case_reference_points():
    assert worst_case_fidelity(-1.0) == (1.0, 1.0)
    fidelity, occupation = worst_case_fidelity(1.0)
    assert fidelity == pytest.approx(0.0, abs=1e-15)
    assert occupation == pytest.approx(0.5)
    fidelity, occupation = worst_case_fidelity(-0.9 + 0.1j)
    assert fidelity == pytest.approx(0.82, rel=1e-12)
    assert occupation == pytest.approx(1.0)


def test_worst_case_rejects_unphysical_overlap():
    with pytest.raises(InvalidOverlapError):
        worst_case_fidelity(1.2)
    with pytest.raises(InvalidOverlapError):
        worst_case_fidelity(-(1.0 + 1e-5))
    # Round-off just past the unit circle is tolerated.
    fidelity, _ = worst_case_fidelity(1.0 + 1e-9)
    assert fidelity == pytest.approx(0.0, abs=1e-8)


@given(st.complex_numbers(max_magnitude=0.999, allow_nan=False,
                          allow_infinity=False))
def test_worst_case_agrees_with_grid_search(overlap):
    fidelity, occupation = worst_case_fidelity(overlap)
    grid = np.linspace(0.0, 1.0, 100001)
    values = np.abs(1.0 - grid * (1.0 + overlap)) ** 2
    index = int(np.argmin(values))
    assert fidelity <= values[index] + 1e-12
    assert abs(fidelity - values[index]) < 1e-9
    assert abs(occupation - grid[index]) < 2e-5
    assert 0.0 <= occupation <= 1.0


def test_truth_table_entries():
    pulse = PulseShape.gaussian(OMEGA0, GAMMA / 100)
    overlap = gate_overlap(pulse, GAMMA)
    table = truth_table(pulse, GAMMA)
    assert set(table) == {"00", "01", "10", "11"}
    assert table["00"] == 1.0
    assert table["01"] == 1.0
    assert table["10"] == 1.0
    assert table["11"] == overlap
    for t in (0.0, 0.3, 1.0):
        entry = truth_table(pulse, GAMMA, transmission=t)["11"]
        expected = (2 * t - 1) ** 2 + 4 * t * (1 - t) * overlap
        assert entry == pytest.approx(expected, rel=1e-12)
    with pytest.raises(ValueError):
        truth_table(pulse, GAMMA, transmission=1.5)
    with pytest.raises(ValueError):
        truth_table(pulse, GAMMA, transmission=-0.1)


def test_infidelity_sweep_trends():
    ratios = np.geomspace(1.0, 1e4, 9)
    sweep = infidelity_sweep(ratios)
    assert sweep.shapes == ("gaussian", "lorentzian")
    assert sweep.fidelity.shape == (2, 9)
    for row in sweep.fidelity:
        assert np.all(np.diff(row) > 0)
    gaussian = sweep.curve("gaussian")
    lorentzian = sweep.curve("lorentzian")
    np.testing.assert_array_equal(gaussian, sweep.log10_infidelity[0])
    mask = ratios >= 10.0
    assert np.all(gaussian[mask] < lorentzian[mask])
    assert sweep.fidelity[:, -1].min() > 1 - 1e-3
    np.testing.assert_allclose(sweep.log10_infidelity,
                               np.log10(1.0 - sweep.fidelity))


def test_infidelity_sweep_validation():
    with pytest.raises(ValueError):
        infidelity_sweep([1.0], shapes=("triangle",))
    with pytest.raises(ValueError):
        infidelity_sweep([-1.0])
    with pytest.raises(ValueError):
        infidelity_sweep([1.0]).curve("box")


def test_fwhm_convention_changes_the_sweep():
    amplitude = infidelity_sweep([10.0], shapes=("gaussian",))
    power = infidelity_sweep([10.0], shapes=("gaussian",), fwhm_on_power=True)
    # Power fwhm means a wider amplitude profile, hence lower fidelity.
    assert power.fidelity[0, 0] < amplitude.fidelity[0, 0]


def test_gate_report_is_consistent():
    pulse = PulseShape.lorentzian(OMEGA0, GAMMA / 40)
    report = gate_report(pulse, GAMMA)
    assert isinstance(report, GateReport)
    assert report.overlap == gate_overlap(pulse, GAMMA)
    fidelity, occupation = worst_case_fidelity(report.overlap)
    assert report.worst_case_fidelity == fidelity
    assert report.minimizing_occupation == occupation
