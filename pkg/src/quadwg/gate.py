"""Dual-rail controlled-phase gate built on two-photon mirror reflection.

A semi-infinite waveguide terminated by the emitter reflects single photons
with a trivial phase but reflects matched photon pairs with the all-pass
factor

    bracket(obar) = 1 - total_rate / (total_rate / 2 + i (omega0 - obar)),

which equals -1 on resonance and +1 far away.  Interfering a logical
``|1,1>`` state through a balanced splitter so that both double-occupancy
branches see such a mirror turns that conditional pi into a controlled-phase
gate.  The gate quality reduces to a single number, the overlap of the
reflected pair pulse with the incoming one, and from it a worst-case
fidelity over all logical inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import quad

from .errors import InvalidOverlapError, TruncationError
from .spectral import QUAD_EPSABS, QUAD_EPSREL, EnvelopeKind

__all__ = [
    "PulseShape",
    "mirror_bracket",
    "mirror_reflection",
    "gate_overlap",
    "worst_case_fidelity",
    "truth_table",
    "GateReport",
    "gate_report",
    "InfidelitySweep",
    "infidelity_sweep",
]


@dataclass(frozen=True)
class PulseShape:
    """Real, nonnegative, unit-norm sum-frequency pulse amplitude.

    ``fwhm`` is measured on the amplitude ``f`` itself; construct with
    ``fwhm_on_power=True`` to measure it on the intensity ``|f|^2`` instead.
    Tabulated pulses interpolate linearly and vanish outside their samples.
    """

    kind: EnvelopeKind
    center: float
    fwhm: float
    scale: float = 0.0        # Gaussian std dev or Lorentzian half width of f
    freqs: np.ndarray | None = None
    vals: np.ndarray | None = None

    @classmethod
    def gaussian(cls, center: float, fwhm: float,
                 fwhm_on_power: bool = False) -> "PulseShape":
        if not fwhm > 0:
            raise ValueError("fwhm must be positive")
        s = fwhm / (2.0 * math.sqrt(math.log(2.0)))
        if not fwhm_on_power:
            s /= math.sqrt(2.0)
        return cls(EnvelopeKind.GAUSSIAN, float(center), float(fwhm), s)

    @classmethod
    def lorentzian(cls, center: float, fwhm: float,
                   fwhm_on_power: bool = False) -> "PulseShape":
        if not fwhm > 0:
            raise ValueError("fwhm must be positive")
        if fwhm_on_power:
            g = fwhm / (2.0 * math.sqrt(math.sqrt(2.0) - 1.0))
        else:
            g = fwhm / 2.0
        return cls(EnvelopeKind.LORENTZIAN, float(center), float(fwhm), g)

    @classmethod
    def tabulated(cls, freqs: Sequence[float],
                  vals: Sequence[float]) -> "PulseShape":
        w = np.asarray(freqs, dtype=float)
        v = np.asarray(vals, dtype=float)
        if w.ndim != 1 or w.size < 2 or v.shape != w.shape:
            raise ValueError("need at least two matching pulse samples")
        if np.any(np.diff(w) <= 0):
            raise ValueError("pulse frequencies must be increasing")
        if np.any(v < 0):
            raise ValueError("pulse amplitude must be nonnegative")
        mass = float(np.trapezoid(v * v, w))
        if not mass > 0:
            raise ValueError("pulse has zero norm")
        v = v / math.sqrt(mass)
        center = float(np.trapezoid(w * v * v, w))
        peak = float(v.max())
        above = w[v >= peak / 2.0]
        fwhm = float(above[-1] - above[0]) if above.size else 0.0
        return cls(EnvelopeKind.TABULATED, center, fwhm, 0.0, w, v)

    def __call__(self, omegabar):
        nu = np.asarray(omegabar, dtype=float) - self.center
        if self.kind is EnvelopeKind.GAUSSIAN:
            s = self.scale
            amp = (s * math.sqrt(math.pi)) ** -0.5
            return amp * np.exp(-(nu * nu) / (2.0 * s * s))
        if self.kind is EnvelopeKind.LORENTZIAN:
            g = self.scale
            amp = math.sqrt(2.0 * g ** 3 / math.pi)
            return amp / (nu * nu + g * g)
        return np.interp(np.asarray(omegabar, dtype=float), self.freqs,
                         self.vals, left=0.0, right=0.0)

    def support(self) -> tuple[float, float]:
        """Interval outside which the amplitude is zero or negligible."""
        if self.kind is EnvelopeKind.TABULATED:
            return float(self.freqs[0]), float(self.freqs[-1])
        if self.kind is EnvelopeKind.GAUSSIAN:
            half = 40.0 * self.scale
        else:
            half = 1e4 * self.scale
        return self.center - half, self.center + half


def mirror_bracket(gamma: float, omega0: float, omegabar):
    """Two-photon reflection factor of the emitter-terminated mirror.

    Unit modulus for every real ``obar``; -1 on resonance, +1 far away.
    """
    omegabar = np.asarray(omegabar, dtype=float)
    return 1.0 - gamma / (gamma / 2.0 + 1j * (omega0 - omegabar))


def mirror_reflection(f: PulseShape, gamma: float,
                      omega0: float | None = None) -> Callable:
    """Reflected pair pulse: the incoming ``f`` times the mirror factor.

    ``omega0`` defaults to the pulse center (resonant drive).
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    w0 = f.center if omega0 is None else float(omega0)

    def reflected(omegabar):
        return np.asarray(f(omegabar), dtype=complex) \
            * mirror_bracket(gamma, w0, omegabar)

    return reflected


def _complex_pulse_quad(fn, segments, points=None):
    total = 0.0 + 0.0j
    for a, b in segments:
        kw = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=400)
        if points is not None and math.isfinite(a) and math.isfinite(b):
            inner = [p for p in points if a < p < b]
            if inner:
                kw["points"] = inner
        re, _ = quad(lambda x: fn(x).real, a, b, **kw)
        im, _ = quad(lambda x: fn(x).imag, a, b, **kw)
        total += re + 1j * im
    return total


def gate_overlap(f: PulseShape, gamma: float,
                 omega0: float | None = None) -> complex:
    """Overlap of the reflected pair pulse with the incoming one.

    ``Int |f(obar)|^2 bracket(obar) d obar`` by adaptive quadrature over the
    pulse support plus analytic-decay tails.  Magnitude never exceeds one;
    the narrow-pulse limit is -1 (ideal conditional pi), the broad-pulse
    limit is +1 (emitter transparent).  Raises a truncation error when the
    quadrature fails to capture the pulse mass, e.g. for a tabulated pulse
    sampled too coarsely or far off center.
    """
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    w0 = f.center if omega0 is None else float(omega0)
    lo, hi = f.support()
    lo = min(lo, w0 - 40.0 * gamma)
    hi = max(hi, w0 + 40.0 * gamma)
    pts = [f.center - f.fwhm, f.center, f.center + f.fwhm,
           w0 - gamma, w0, w0 + gamma]
    if f.kind is EnvelopeKind.TABULATED:
        segments = [(float(f.freqs[0]), float(f.freqs[-1]))]
    else:
        segments = [(lo, hi), (-np.inf, lo), (hi, np.inf)]

    mass = _complex_pulse_quad(
        lambda x: complex(float(f(x)) ** 2), segments, points=pts).real
    if abs(mass - 1.0) > 1e-3:
        raise TruncationError(
            f"quadrature captured pulse mass {mass:.6f} instead of 1; "
            "pulse is off center or undersampled")

    def integrand(x):
        amp = float(f(x))
        return amp * amp * complex(mirror_bracket(gamma, w0, x))

    val = _complex_pulse_quad(integrand, segments, points=pts)
    return complex(val) / mass


def worst_case_fidelity(overlap: complex) -> tuple[float, float]:
    """Worst-case gate fidelity over logical inputs, with its minimizer.

    The fidelity of an input with pair-term weight ``x = |d|^2`` is
    ``|1 - x (1 + overlap)|^2``; the worst case minimizes over
    ``x in [0, 1]``.  Returns ``(fidelity, x_star)``.  Only the pair-term
    weight matters, not the relative phases of the logical amplitudes.
    """
    o = complex(overlap)
    if abs(o) > 1.0 + 1e-6:
        raise InvalidOverlapError(
            f"overlap magnitude {abs(o):.6f} exceeds 1; quadrature failed")
    z = 1.0 + o
    if abs(z) < 1e-15:
        return 1.0, 1.0
    x_star = min(max(z.real / (abs(z) ** 2), 0.0), 1.0)
    fid = abs(1.0 - x_star * z) ** 2
    return float(min(fid, 1.0)), float(x_star)


def truth_table(f: PulseShape, gamma: float, omega0: float | None = None,
                transmission: float = 0.5) -> Mapping[str, complex]:
    """Output amplitude of each logical basis state.

    Logical zeroes bypass the mirrors and single photons reflect
    transparently, so every basis state except ``|1,1>`` returns with
    amplitude exactly one.  The pair state splits on a beam splitter of
    intensity transmission ``transmission``, the double-occupancy branches
    pick up the two-photon reflection, and recombination leaves

        (2 t - 1)^2 + 4 t (1 - t) * overlap

    on the ``|1,1>`` component, which is the overlap itself for a balanced
    splitter.
    """
    if not 0.0 <= transmission <= 1.0:
        raise ValueError("transmission must lie in [0, 1]")
    o = gate_overlap(f, gamma, omega0)
    t = transmission
    pair = (2.0 * t - 1.0) ** 2 + 4.0 * t * (1.0 - t) * o
    return {
        "00": 1.0 + 0.0j,
        "01": 1.0 + 0.0j,
        "10": 1.0 + 0.0j,
        "11": complex(pair),
    }


@dataclass(frozen=True)
class GateReport:
    """Overlap and worst-case fidelity of one gate configuration."""

    overlap: complex
    worst_case_fidelity: float
    minimizing_occupation: float


def gate_report(f: PulseShape, gamma: float,
                omega0: float | None = None) -> GateReport:
    o = gate_overlap(f, gamma, omega0)
    fid, x_star = worst_case_fidelity(o)
    return GateReport(o, fid, x_star)


@dataclass(frozen=True)
class InfidelitySweep:
    """Worst-case infidelity versus rate-to-bandwidth ratio per pulse kind."""

    gamma_over_fwhm: np.ndarray
    shapes: tuple[str, ...]
    fidelity: np.ndarray           # (n_shapes, n_ratios)
    log10_infidelity: np.ndarray   # (n_shapes, n_ratios)

    def curve(self, shape: str) -> np.ndarray:
        return self.log10_infidelity[self.shapes.index(shape)]


def infidelity_sweep(gamma_over_fwhm: Sequence[float],
                     shapes: Sequence[str] = ("gaussian", "lorentzian"),
                     fwhm_on_power: bool = False) -> InfidelitySweep:
    """Sweep the worst-case infidelity against ``gamma / fwhm``.

    All quantities are scale free, so the pulse is centered at zero with
    unit width and the rate carries the ratio.  Narrow pulses (large ratio)
    approach the ideal gate; the Gaussian curve falls faster than the
    Lorentzian one because its spectral tails carry less weight off
    resonance.
    """
    ratios = np.asarray(gamma_over_fwhm, dtype=float)
    if np.any(ratios <= 0):
        raise ValueError("ratios must be positive")
    builders = {
        "gaussian": PulseShape.gaussian,
        "lorentzian": PulseShape.lorentzian,
    }
    fid = np.empty((len(shapes), ratios.size))
    for i, name in enumerate(shapes):
        try:
            build = builders[name]
        except KeyError:
            raise ValueError(f"unknown pulse shape {name!r}") from None
        pulse = build(0.0, 1.0, fwhm_on_power=fwhm_on_power)
        for j, ratio in enumerate(ratios):
            fid[i, j] = worst_case_fidelity(gate_overlap(pulse, ratio))[0]
    infid = np.clip(1.0 - fid, 1e-300, None)
    return InfidelitySweep(ratios, tuple(shapes), fid, np.log10(infid))
