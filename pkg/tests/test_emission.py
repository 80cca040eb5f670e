"""Spontaneous pair emission spectra and their correlation structure."""

import math

import numpy as np
import pytest

from quadwg import (
    CouplingSpec,
    DirectionPair,
    Envelope,
    FrequencyGrid,
    UndefinedCorrelationError,
    emitted_amplitude,
    excited_amplitude,
    joint_spectrum,
)
from quadwg.emission import pearson_correlation

GAMMA = 0.004


def coupling(ratio, kind="gaussian", total=GAMMA):
    """Coupling whose envelope FWHM is ``ratio`` times the linewidth."""
    if kind == "gaussian":
        width = ratio * total / (2.0 * math.sqrt(2.0 * math.log(2.0)))
        env = Envelope.gaussian(width)
    else:
        env = Envelope.lorentzian(ratio * total)
    return CouplingSpec.isotropic(total, env, 1.0)


def test_excited_amplitude_decay_markers():
    cpl = coupling(1.0)
    assert excited_amplitude(cpl, 0.0) == pytest.approx(1.0)
    assert abs(excited_amplitude(cpl, 2.0 / GAMMA)) == pytest.approx(
        math.exp(-1.0), rel=1e-12)
    assert excited_amplitude(cpl, -1.0) == 0.0
    t = np.array([-1.0, 0.0, 1.0 / GAMMA])
    mags = np.abs(excited_amplitude(cpl, t))
    np.testing.assert_allclose(mags, [0.0, 1.0, math.exp(-0.5)], atol=1e-12)


def test_emitted_amplitude_peak_value():
    beta = 0.02
    env = Envelope.gaussian(beta)
    cpl = CouplingSpec.isotropic(GAMMA, env, 1.0)
    value = emitted_amplitude(cpl, DirectionPair.PM, 1.0, 0.0)
    rate = cpl.rate(DirectionPair.PM)
    target = (1.0 / (2.0 * math.pi)) * rate \
        * math.sqrt(2.0 / (math.pi * beta * beta)) / (GAMMA ** 2 / 4.0)
    assert abs(value) ** 2 == pytest.approx(target, rel=1e-12)


def test_emitted_amplitude_linewidth():
    cpl = coupling(1.0)
    peak = abs(emitted_amplitude(cpl, DirectionPair.PP, 1.0, 0.0)) ** 2
    for sign in (-1.0, 1.0):
        half = abs(emitted_amplitude(cpl, DirectionPair.PP,
                                     1.0 + sign * GAMMA / 2.0, 0.0)) ** 2
        assert half == pytest.approx(peak / 2.0, rel=1e-12)


def test_joint_spectrum_total_probability():
    for kind in ("gaussian", "lorentzian"):
        spec = joint_spectrum(coupling(1.0, kind))
        assert spec.total_probability() == pytest.approx(1.0, abs=1e-4)


def test_default_grid_window():
    cpl = coupling(1.0)
    spec = joint_spectrum(cpl)
    assert spec.grid.omegabar[0] == pytest.approx(1.0 - 10 * GAMMA)
    assert spec.grid.omegabar[-1] == pytest.approx(1.0 + 10 * GAMMA)
    assert spec.grid.delta[-1] == pytest.approx(10 * cpl.envelope.width)


def test_density_is_rank_one():
    spec = joint_spectrum(coupling(2.0))
    singular = np.linalg.svd(spec.channel(DirectionPair.PP),
                             compute_uv=False)
    assert singular[1] / singular[0] < 1e-12


def test_channel_densities_scale_with_rates():
    env = Envelope.gaussian(0.002)
    cpl = CouplingSpec(1.0, {DirectionPair.PP: 0.002, DirectionPair.MM: 0.001,
                             DirectionPair.PM: 0.0005}, env)
    spec = joint_spectrum(cpl)
    dpp = spec.density(DirectionPair.PP)
    dmm = spec.density(DirectionPair.MM)
    dpm = spec.density(DirectionPair.PM)
    dmp = spec.density(DirectionPair.MP)
    np.testing.assert_array_equal(dpm, dmp)
    mask = dpp > dpp.max() * 1e-12
    np.testing.assert_allclose(dmm[mask] / dpp[mask], 0.5, rtol=1e-10)
    np.testing.assert_allclose(dpm[mask] / dpp[mask], 0.25, rtol=1e-10)


def test_lorentzian_envelope_correlation_closed_form():
    # On the default self-scaled window the correlation reduces to
    # (1 - x^2) / (1 + x^2) in the width ratio x.
    for ratio in (0.2, 1.0, 5.0):
        corr = joint_spectrum(coupling(ratio, "lorentzian")) \
            .spectrum_correlation()
        target = (1.0 - ratio ** 2) / (1.0 + ratio ** 2)
        assert corr == pytest.approx(target, abs=1e-6)


def test_gaussian_envelope_correlation_signs():
    narrow = joint_spectrum(coupling(0.2)).spectrum_correlation()
    wide = joint_spectrum(coupling(5.0)).spectrum_correlation()
    assert narrow > 0.9
    assert wide < -0.1


def test_correlation_crosses_zero_once():
    for kind in ("gaussian", "lorentzian"):
        ratios = np.geomspace(0.2, 5.0, 8)
        corr = np.array([joint_spectrum(coupling(r, kind))
                        .spectrum_correlation() for r in ratios])
        assert np.all(np.diff(corr) < 0.0)
        signs = np.sign(corr)
        assert np.count_nonzero(np.diff(signs)) == 1


def test_isotropic_density_has_zero_correlation():
    grid = FrequencyGrid.regular(1.0, 0.05, 0.05, 256, 129)
    # Equal spreads along the sum and difference axes: an isotropic blob
    # in (omega, omega') coordinates, so no correlation either way.
    density = np.exp(-((grid.omegabar[:, None] - 1.0) ** 2
                       + grid.delta[None, :] ** 2) / (2 * 0.01 ** 2))
    assert pearson_correlation(grid, density) == pytest.approx(0.0, abs=1e-8)


def test_correlation_error_paths():
    grid = FrequencyGrid.regular(0.0, 1.0, 1.0, 33, 17)
    with pytest.raises(UndefinedCorrelationError):
        pearson_correlation(grid, np.zeros(grid.shape))
    point = np.zeros(grid.shape)
    # All mass at the exactly representable node (0, 0): zero spread.
    point[16, 0] = 1.0
    with pytest.raises(UndefinedCorrelationError):
        pearson_correlation(grid, point)


def test_emission_state_norm_and_marginals():
    spec = joint_spectrum(coupling(1.0))
    state = spec.state()
    # The raw grid norm carries the window fraction of the Lorentzian line;
    # ten half widths keep (2/pi) atan(20) of it.
    window_fraction = (2.0 / math.pi) * math.atan(20.0)
    assert state.norm_squared() == pytest.approx(window_fraction, abs=5e-4)
    line = spec.sum_marginal()
    assert line.shape == spec.grid.omegabar.shape
    peak_at = spec.grid.omegabar[np.argmax(line)]
    assert peak_at == pytest.approx(1.0, abs=spec.grid.d_omegabar)
    profile = spec.difference_marginal()
    assert profile.shape == spec.grid.delta.shape
    assert np.argmax(profile) == 0
