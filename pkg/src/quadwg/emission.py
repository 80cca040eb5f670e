"""Spontaneous pair emission from the initially excited emitter.

An excited emitter decays by releasing one photon pair.  The long-time pair
amplitude factorizes into a Lorentzian line in the sum frequency and the
coupling envelope in the difference frequency:

    A[pair](obar, delta) = i sqrt(rate(pair) / (2 pi)) conj(u)(delta)
                           / (total_rate / 2 - i (obar - omega0)).

Summed over the four direction channels and integrated over the half plane
this carries unit probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import UndefinedCorrelationError
from .spectral import (
    PAIRS,
    CouplingSpec,
    DirectionPair,
    FrequencyGrid,
    GridState,
)

__all__ = [
    "excited_amplitude",
    "emitted_amplitude",
    "default_emission_grid",
    "EmissionSpectrum",
    "joint_spectrum",
    "pearson_correlation",
]


def excited_amplitude(coupling: CouplingSpec, times):
    """Excited-state amplitude ``exp(-i omega0 t) exp(-total_rate t / 2)``.

    Valid for ``t >= 0`` with the emitter excited at ``t = 0``; earlier
    times return zero.
    """
    t = np.asarray(times, dtype=float)
    out = np.exp(-1j * coupling.omega0 * t - 0.5 * coupling.total_rate * t)
    return np.where(t >= 0, out, 0.0)


def emitted_amplitude(coupling: CouplingSpec, pair: DirectionPair,
                      omegabar, delta):
    """Long-time emitted pair amplitude on one direction channel."""
    omegabar = np.asarray(omegabar, dtype=float)
    delta = np.asarray(delta, dtype=float)
    line = 1.0 / (0.5 * coupling.total_rate
                  - 1j * (omegabar - coupling.omega0))
    u = np.conj(coupling.envelope(delta))
    return 1j * math.sqrt(coupling.rate(pair) / (2.0 * math.pi)) * line * u


def default_emission_grid(coupling: CouplingSpec,
                          n_omegabar: int = 1024,
                          n_delta: int = 512) -> FrequencyGrid:
    """Standard emission window.

    Sum axis: ten linewidths around resonance.  Difference axis: ten
    envelope widths (sampled extent for tabulated envelopes).  Kept
    deliberately tight so that window-defined quantities like the
    frequency correlation have a fixed, documented meaning.
    """
    g = coupling.total_rate
    env = coupling.envelope
    span = 10.0 * env.width if env.width > 0 else float(env.deltas[-1])
    return FrequencyGrid.regular(coupling.omega0, 10.0 * g, span,
                                 n_omegabar, n_delta)


def pearson_correlation(grid: FrequencyGrid, density: np.ndarray) -> float:
    """Pearson correlation of the two photon frequencies under ``density``.

    ``density`` is a joint intensity on the half-plane grid.  With
    ``omega = (obar - delta) / 2`` and ``omega' = (obar + delta) / 2`` the
    exchange-symmetrized correlation reduces to

        r = (Var(obar) - Var(delta)) / (Var(obar) + Var(delta)),

    because evenness in ``delta`` kills the cross covariance.  Moments are
    taken over the stored window; for heavy-tailed spectra the window is
    part of the reported quantity.
    """
    density = np.asarray(density, dtype=float)
    mass = float(grid.integrate(density))
    if not mass > 0:
        raise UndefinedCorrelationError("density carries no weight")
    ob = grid.omegabar
    mean_ob = float(grid.integrate(density * ob[:, None])) / mass
    var_ob = float(grid.integrate(density * (ob[:, None] - mean_ob) ** 2)) / mass
    # Half-line moments of an even density equal the full-line ones.
    var_dd = float(grid.integrate(density * grid.delta[None, :] ** 2)) / mass
    denom = var_ob + var_dd
    if not denom > 0:
        raise UndefinedCorrelationError("density has no spread")
    return (var_ob - var_dd) / denom


@dataclass(frozen=True)
class EmissionSpectrum:
    """Channel-resolved emission amplitudes on a half-plane grid."""

    coupling: CouplingSpec
    grid: FrequencyGrid
    data: np.ndarray  # (4, n_omegabar, n_delta) complex

    def channel(self, pair: DirectionPair) -> np.ndarray:
        return self.data[pair.index]

    def density(self, pair: DirectionPair) -> np.ndarray:
        return np.abs(self.data[pair.index]) ** 2

    def total_density(self) -> np.ndarray:
        return np.sum(np.abs(self.data) ** 2, axis=0)

    def state(self) -> GridState:
        return GridState(self.grid, self.data, validate=False)

    def sum_marginal(self) -> np.ndarray:
        """Channel-summed density integrated over the difference axis."""
        return self.grid.integrate_delta(self.total_density())

    def difference_marginal(self) -> np.ndarray:
        """Channel-summed density integrated over the sum axis."""
        return np.trapezoid(self.total_density(), self.grid.omegabar, axis=0)

    def total_probability(self) -> float:
        """Window integral rescaled by the analytically known tail mass.

        The emitted density is an exact product of a Lorentzian line and
        the envelope intensity, so the fraction of it inside the stored
        window is the product of two one-dimensional masses.  Dividing the
        trapezoid result by that fraction recovers the full-plane value,
        which is one for a complete emission record.
        """
        window = float(self.grid.integrate(self.total_density()))
        g = self.coupling.total_rate
        half = min(self.coupling.omega0 - self.grid.omegabar[0],
                   self.grid.omegabar[-1] - self.coupling.omega0)
        line_frac = (2.0 / math.pi) * math.atan(2.0 * half / g)
        env_frac = self.coupling.envelope.half_line_mass(float(self.grid.delta[-1]))
        return window / (line_frac * env_frac)

    def spectrum_correlation(self) -> float:
        """Pearson correlation of the two photon frequencies.

        Positive when the sum-frequency line is broad compared to the
        envelope (frequencies move together), negative when the envelope
        dominates (frequencies anticorrelate about the fixed sum).
        """
        return pearson_correlation(self.grid, self.total_density())


def joint_spectrum(coupling: CouplingSpec,
                   grid: FrequencyGrid | None = None) -> EmissionSpectrum:
    """Tabulate the emitted pair amplitudes.

    The default window spans ten linewidths around resonance and ten
    envelope widths in the difference frequency; pass an explicit grid to
    override.  Heavy-tailed envelopes put real weight outside any finite
    window, so window-dependent quantities are quoted on the stored grid
    while ``total_probability`` removes the truncation analytically.
    """
    if grid is None:
        grid = default_emission_grid(coupling)
    ob, dd = grid.omegabar, grid.delta
    data = np.empty((4, ob.size, dd.size), dtype=complex)
    for pair in PAIRS:
        data[pair.index] = emitted_amplitude(
            coupling, pair, ob[:, None], dd[None, :])
    return EmissionSpectrum(coupling, grid, data)
