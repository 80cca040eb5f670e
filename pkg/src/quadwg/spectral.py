"""Spectral building blocks: directions, envelopes, couplings, grids, states.

Conventions used throughout the package
---------------------------------------
A single two-level emitter of frequency ``omega0`` exchanges photon *pairs*
with a one-dimensional waveguide.  Pair amplitudes are stored as functions of
the sum frequency ``obar = omega + omega_prime`` and the difference frequency
``delta = omega_prime - omega``.  Amplitudes are kept on the half plane
``delta >= 0``; the ``delta < 0`` content follows from the evenness of the
coupling, ``C(obar, -delta) = C(obar, delta)``, and cross channels satisfy
``C[+-] == C[-+]`` pointwise in this representation.

With the Jacobian ``d omega d omega_prime = (1/2) d obar d delta`` over the
full difference line, folding onto ``delta >= 0`` cancels the 1/2, so the
squared norm of a state is

    sum_channels  Int d obar  Int_0^inf d delta  |C(obar, delta)|^2  =  1.

The coupling factorizes as ``g(pair, delta) = sqrt(rate(pair) / 2 pi) *
u(delta)`` where the envelope ``u`` is even and carries unit mass on the half
line, ``Int_0^inf |u|^2 d delta = 1`` (hence 2 on the full line).  The total
emission rate is the plain sum of the four directional rates.

All frequencies are quoted in units of ``omega0`` unless stated otherwise.
"""

from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import RegularGridInterpolator

from .errors import (
    InvalidEnvelopeError,
    InvalidStateError,
    MarkovValidityWarning,
    TruncationWarning,
)

__all__ = [
    "DirectionPair",
    "Envelope",
    "CouplingSpec",
    "FrequencyGrid",
    "BiphotonState",
    "SeparableState",
    "GridState",
    "gaussian_sum_spectrum",
    "gaussian_difference_profile",
    "project_on_envelope",
    "decompose",
]

# Adaptive quadrature targets used for every one-dimensional integral.
QUAD_EPSABS = 1.0e-12
QUAD_EPSREL = 1.0e-10

# Fraction of half-line envelope mass a grid must keep before a
# TruncationWarning is issued.
ENVELOPE_COVER_FRACTION = 0.999


class DirectionPair(enum.Enum):
    """Ordered pair of propagation directions for the two photons."""

    PP = "++"
    PM = "+-"
    MP = "-+"
    MM = "--"

    @property
    def index(self) -> int:
        return _PAIR_INDEX[self]

    @property
    def first(self) -> str:
        return self.value[0]

    @property
    def second(self) -> str:
        return self.value[1]

    @property
    def swapped(self) -> "DirectionPair":
        return DirectionPair(self.value[::-1])

    @classmethod
    def from_string(cls, text: str) -> "DirectionPair":
        try:
            return cls(text)
        except ValueError:
            raise ValueError(f"unknown direction pair {text!r}") from None


_PAIR_INDEX = {
    DirectionPair.PP: 0,
    DirectionPair.PM: 1,
    DirectionPair.MP: 2,
    DirectionPair.MM: 3,
}

PAIRS: tuple[DirectionPair, ...] = (
    DirectionPair.PP,
    DirectionPair.PM,
    DirectionPair.MP,
    DirectionPair.MM,
)


class EnvelopeKind(enum.Enum):
    GAUSSIAN = "gaussian"
    LORENTZIAN = "lorentzian"
    TABULATED = "tabulated"


@dataclass(frozen=True)
class Envelope:
    """Even difference-frequency envelope with half-line mass one.

    Analytic kinds:

    * gaussian:   ``u(delta) = (2 / (pi width^2))^{1/4} exp(-delta^2 / (4 width^2))``,
      so ``|u|^2`` is a Gaussian of variance ``width^2`` and mass 2 on the
      full line.  Its full width at half maximum is ``2 width sqrt(2 ln 2)``.
    * lorentzian: ``|u(delta)|^2 = (width / pi) / (width^2 / 4 + delta^2)``,
      a Lorentzian of full width ``width`` at half maximum, mass 2.

    Tabulated envelopes interpolate linearly between samples on
    ``delta >= 0``, are zero outside the sampled range, and are renormalized
    at construction so the half-line mass is one.
    """

    kind: EnvelopeKind
    width: float = 0.0
    deltas: np.ndarray | None = None
    values: np.ndarray | None = None

    def __post_init__(self) -> None:
        if self.kind is EnvelopeKind.TABULATED:
            if self.deltas is None or self.values is None:
                raise InvalidEnvelopeError("tabulated envelope needs samples")
            d = np.asarray(self.deltas, dtype=float)
            v = np.asarray(self.values, dtype=complex)
            if d.ndim != 1 or d.size < 2 or v.shape != d.shape:
                raise InvalidEnvelopeError(
                    "tabulated envelope needs at least two matching samples"
                )
            if np.any(np.diff(d) <= 0) or d[0] < 0:
                raise InvalidEnvelopeError(
                    "tabulated deltas must be increasing and nonnegative"
                )
            mass = np.trapezoid(np.abs(v) ** 2, d)
            if not mass > 0:
                raise InvalidEnvelopeError("tabulated envelope has zero mass")
            object.__setattr__(self, "deltas", d)
            object.__setattr__(self, "values", v / math.sqrt(mass))
        else:
            if not self.width > 0:
                raise InvalidEnvelopeError("envelope width must be positive")

    @classmethod
    def gaussian(cls, width: float) -> "Envelope":
        return cls(EnvelopeKind.GAUSSIAN, width=float(width))

    @classmethod
    def lorentzian(cls, width: float) -> "Envelope":
        return cls(EnvelopeKind.LORENTZIAN, width=float(width))

    @classmethod
    def tabulated(cls, deltas: Sequence[float], values: Sequence[complex]) -> "Envelope":
        return cls(EnvelopeKind.TABULATED, deltas=np.asarray(deltas, float),
                   values=np.asarray(values, complex))

    def __call__(self, delta):
        """Evaluate ``u`` at ``delta``; even in ``delta``, vectorized."""
        delta = np.abs(np.asarray(delta, dtype=float))
        if self.kind is EnvelopeKind.GAUSSIAN:
            b = self.width
            out = (2.0 / (math.pi * b * b)) ** 0.25 * np.exp(-(delta * delta) / (4 * b * b))
            return out.astype(complex)
        if self.kind is EnvelopeKind.LORENTZIAN:
            b = self.width
            out = np.sqrt((b / math.pi) / (b * b / 4 + delta * delta))
            return out.astype(complex)
        re = np.interp(delta, self.deltas, self.values.real, left=0.0, right=0.0)
        im = np.interp(delta, self.deltas, self.values.imag, left=0.0, right=0.0)
        return re + 1j * im

    def squared_norm(self) -> float:
        """Full-line mass ``Int |u|^2 d delta``; equals 2 by construction."""
        if self.kind is EnvelopeKind.TABULATED:
            return 2.0 * float(np.trapezoid(np.abs(self.values) ** 2, self.deltas))
        val, _ = quad(lambda d: abs(self(d)) ** 2, 0.0, np.inf,
                      epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL)
        return 2.0 * val

    def half_line_mass(self, delta_max: float) -> float:
        """Envelope mass ``Int_0^X |u|^2 d delta`` kept below ``delta_max``."""
        if self.kind is EnvelopeKind.GAUSSIAN:
            return math.erf(delta_max / (self.width * math.sqrt(2.0)))
        if self.kind is EnvelopeKind.LORENTZIAN:
            return (2.0 / math.pi) * math.atan(2.0 * delta_max / self.width)
        d = self.deltas
        v = np.abs(self.values) ** 2
        if delta_max >= d[-1]:
            return 1.0
        grid = np.linspace(d[0], delta_max, 4097)
        vv = np.interp(grid, d, v)
        return float(np.trapezoid(vv, grid))

    def fwhm(self) -> float:
        """Full width at half maximum of ``|u|^2``."""
        if self.kind is EnvelopeKind.GAUSSIAN:
            return 2.0 * self.width * math.sqrt(2.0 * math.log(2.0))
        if self.kind is EnvelopeKind.LORENTZIAN:
            return self.width
        v = np.abs(self.values) ** 2
        peak = float(v.max())
        half = peak / 2.0
        below = np.nonzero(v < half)[0]
        if below.size == 0:
            return 2.0 * float(self.deltas[-1])
        j = below[0]
        if j == 0:
            return 0.0
        d0, d1 = self.deltas[j - 1], self.deltas[j]
        v0, v1 = v[j - 1], v[j]
        cross = d0 + (v0 - half) / (v0 - v1) * (d1 - d0)
        return 2.0 * float(cross)


@dataclass(frozen=True)
class CouplingSpec:
    """Emitter frequency, directional pair rates, and shared envelope.

    ``rates`` maps each ordered direction pair to its nonnegative emission
    rate; the two cross pairs must carry equal rates.  The total rate is the
    plain sum of the four entries.  A warning is issued when the total rate
    exceeds 5 percent of the emitter frequency, where the flat-band treatment
    degrades.
    """

    omega0: float
    rates: Mapping[DirectionPair, float]
    envelope: Envelope

    def __post_init__(self) -> None:
        if not self.omega0 > 0:
            raise ValueError("emitter frequency must be positive")
        table = dict(self.rates)
        pm = table.get(DirectionPair.PM)
        mp = table.get(DirectionPair.MP)
        if pm is None and mp is not None:
            table[DirectionPair.PM] = mp
        if mp is None and pm is not None:
            table[DirectionPair.MP] = pm
        for pair in PAIRS:
            table.setdefault(pair, 0.0)
        if table[DirectionPair.PM] != table[DirectionPair.MP]:
            raise ValueError("cross-direction rates must be equal")
        if any(v < 0 for v in table.values()):
            raise ValueError("rates must be nonnegative")
        total = sum(table.values())
        if not total > 0:
            raise ValueError("at least one rate must be positive")
        object.__setattr__(self, "rates", table)
        if total > 0.05 * self.omega0:
            warnings.warn(
                "total rate exceeds 5% of the emitter frequency; the "
                "flat-band approximation may be inaccurate",
                MarkovValidityWarning,
                stacklevel=2,
            )

    @classmethod
    def isotropic(cls, total_rate: float, envelope: Envelope,
                  omega0: float = 1.0) -> "CouplingSpec":
        r = total_rate / 4.0
        return cls(omega0, {p: r for p in PAIRS}, envelope)

    @classmethod
    def mirror(cls, total_rate: float, envelope: Envelope,
               omega0: float = 1.0) -> "CouplingSpec":
        """Semi-infinite (chiral) coupling: all weight on the ++ pair."""
        return cls(omega0, {DirectionPair.PP: total_rate}, envelope)

    @property
    def total_rate(self) -> float:
        return float(sum(self.rates.values()))

    def rate(self, pair: DirectionPair) -> float:
        return float(self.rates[pair])

    def sqrt_rates(self) -> np.ndarray:
        """Vector ``sqrt(rate(pair))`` ordered by pair index."""
        return np.array([math.sqrt(self.rates[p]) for p in PAIRS])


@dataclass(frozen=True)
class FrequencyGrid:
    """Uniform rectangular grid over ``(obar, delta)`` with ``delta[0] = 0``."""

    omegabar: np.ndarray
    delta: np.ndarray

    def __post_init__(self) -> None:
        ob = np.asarray(self.omegabar, dtype=float)
        dd = np.asarray(self.delta, dtype=float)
        for name, axis in (("omegabar", ob), ("delta", dd)):
            if axis.ndim != 1 or axis.size < 2:
                raise ValueError(f"{name} axis needs at least two points")
            steps = np.diff(axis)
            if np.any(steps <= 0):
                raise ValueError(f"{name} axis must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=1e-9, atol=0.0):
                raise ValueError(f"{name} axis must be uniform")
        if abs(dd[0]) > 1e-15 * max(1.0, dd[-1]):
            raise ValueError("delta axis must start at zero")
        object.__setattr__(self, "omegabar", ob)
        object.__setattr__(self, "delta", dd)

    @classmethod
    def regular(cls, center: float, halfwidth: float, delta_max: float,
                n_omegabar: int = 2048, n_delta: int = 1024) -> "FrequencyGrid":
        return cls(
            np.linspace(center - halfwidth, center + halfwidth, n_omegabar),
            np.linspace(0.0, delta_max, n_delta),
        )

    @classmethod
    def for_scattering(cls, coupling: CouplingSpec, input_width: float = 0.0,
                       n_omegabar: int = 2048, n_delta: int = 1024,
                       halfwidth_rates: float = 20.0) -> "FrequencyGrid":
        """Default scattering window: 20 total rates around resonance, and a
        difference axis spanning ten times the larger of the envelope width
        and the input width."""
        g = coupling.total_rate
        span = 10.0 * max(coupling.envelope.width, input_width)
        if span <= 0:
            span = 10.0 * coupling.envelope.deltas[-1]
        return cls.regular(coupling.omega0, halfwidth_rates * g, span,
                           n_omegabar, n_delta)

    @property
    def d_omegabar(self) -> float:
        return float(self.omegabar[1] - self.omegabar[0])

    @property
    def d_delta(self) -> float:
        return float(self.delta[1] - self.delta[0])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.omegabar.size, self.delta.size)

    def integrate_delta(self, values: np.ndarray) -> np.ndarray:
        """Trapezoid over the difference axis (last axis)."""
        return np.trapezoid(values, self.delta, axis=-1)

    def integrate(self, values: np.ndarray) -> float | np.ndarray:
        """Trapezoid over both axes (last two axes)."""
        inner = np.trapezoid(values, self.delta, axis=-1)
        return np.trapezoid(inner, self.omegabar, axis=-1)

    def same_axes(self, other: "FrequencyGrid") -> bool:
        return (self.omegabar.shape == other.omegabar.shape
                and self.delta.shape == other.delta.shape
                and np.array_equal(self.omegabar, other.omegabar)
                and np.array_equal(self.delta, other.delta))


def _complex_quad(fn: Callable[[float], complex], a: float, b: float,
                  points: Sequence[float] | None = None) -> complex:
    kw = dict(epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
    if points is not None and np.isfinite(a) and np.isfinite(b):
        pts = [p for p in points if a < p < b]
        if pts:
            kw["points"] = pts
    re, _ = quad(lambda x: np.real(fn(x)), a, b, **kw)
    im, _ = quad(lambda x: np.imag(fn(x)), a, b, **kw)
    return re + 1j * im


class BiphotonState:
    """Common interface of separable and grid pair states."""

    def norm_squared(self) -> float:
        raise NotImplementedError

    def amplitude(self, pair: DirectionPair, omegabar, delta) -> np.ndarray:
        raise NotImplementedError

    def on_grid(self, grid: FrequencyGrid) -> "GridState":
        raise NotImplementedError


@dataclass
class SeparableState(BiphotonState):
    """Single-channel product state ``C(obar, delta) = f(obar) h(delta)``.

    ``f`` and ``h`` are vectorized callables; ``h`` lives on the half line
    ``delta >= 0``.  ``f_window`` and ``h_window`` are finite intervals that
    contain essentially all of the respective mass and serve as quadrature
    windows.  With ``normalize=True`` the factors are rescaled at
    construction so that ``Int |f|^2 = 1`` and ``Int_0^inf |h|^2 = 1``.
    """

    channel: DirectionPair
    f: Callable[[np.ndarray], np.ndarray]
    h: Callable[[np.ndarray], np.ndarray]
    f_window: tuple[float, float]
    h_window: tuple[float, float]
    normalize: bool = True
    _scale: complex = field(default=1.0 + 0.0j, repr=False)

    def __post_init__(self) -> None:
        lo, hi = self.h_window
        self.h_window = (max(0.0, lo), hi)
        if self.normalize:
            nf = self._factor_mass(self.f, self.f_window)
            nh = self._factor_mass(self.h, self.h_window)
            if nf <= 0 or nh <= 0:
                raise InvalidStateError("separable state has zero norm")
            self._scale = 1.0 / math.sqrt(nf * nh * self.channel_count)

    @property
    def channel_count(self) -> int:
        """Populated channel tables: 1 on ++ or --, 2 on the cross pair."""
        return 1 if self.channel.swapped is self.channel else 2

    @staticmethod
    def _factor_mass(fn, window) -> float:
        lo, hi = window
        mid = 0.5 * (lo + hi)
        val, _ = quad(lambda x: abs(fn(x)) ** 2, lo, hi, points=[mid],
                      epsabs=QUAD_EPSABS, epsrel=QUAD_EPSREL, limit=200)
        return val

    def norm_squared(self) -> float:
        nf = self._factor_mass(self.f, self.f_window)
        nh = self._factor_mass(self.h, self.h_window)
        return abs(self._scale) ** 2 * nf * nh * self.channel_count

    def amplitude(self, pair: DirectionPair, omegabar, delta) -> np.ndarray:
        omegabar = np.asarray(omegabar, dtype=float)
        delta = np.asarray(delta, dtype=float)
        out = self._scale * np.asarray(self.f(omegabar), dtype=complex) \
            * np.asarray(self.h(delta), dtype=complex)
        # Exchange symmetry in the half-plane representation: the swapped
        # channel carries the same amplitude; other channels are empty.
        if pair is not self.channel and pair is not self.channel.swapped:
            return np.zeros_like(out)
        return out

    def on_grid(self, grid: FrequencyGrid) -> "GridState":
        data = np.zeros((4, grid.omegabar.size, grid.delta.size), dtype=complex)
        fvals = self._scale * np.asarray(self.f(grid.omegabar), dtype=complex)
        hvals = np.asarray(self.h(grid.delta), dtype=complex)
        block = fvals[:, None] * hvals[None, :]
        data[self.channel.index] = block
        if self.channel.swapped is not self.channel:
            data[self.channel.swapped.index] = block
        return GridState(grid, data, validate=False)

    def overlap_with_envelope(self, envelope: Envelope) -> complex:
        """Half-line overlap ``Int_0^inf u(delta) C_h(delta) d delta`` where
        ``C_h`` is the scaled difference factor of this state."""
        lo, hi = self.h_window
        if envelope.kind is EnvelopeKind.TABULATED:
            hi = min(hi, float(envelope.deltas[-1]))
        if hi <= lo:
            return 0.0 + 0.0j
        mid = 0.5 * (lo + hi)
        val = _complex_quad(lambda d: envelope(d) * self.h(d), lo, hi, points=[mid])
        return self._scale * val


@dataclass
class GridState(BiphotonState):
    """Grid state holding all four channel amplitude tables.

    ``data`` has shape ``(4, n_omegabar, n_delta)`` indexed by
    ``DirectionPair.index``.  The half-plane exchange symmetry requires the
    two cross-channel tables to agree.
    """

    grid: FrequencyGrid
    data: np.ndarray
    validate: bool = True

    def __post_init__(self) -> None:
        data = np.asarray(self.data, dtype=complex)
        expect = (4, self.grid.omegabar.size, self.grid.delta.size)
        if data.shape != expect:
            raise InvalidStateError(f"grid data must have shape {expect}")
        self.data = data
        if self.validate:
            pm = data[DirectionPair.PM.index]
            mp = data[DirectionPair.MP.index]
            scale = float(np.max(np.abs(data))) or 1.0
            if np.max(np.abs(pm - mp)) > 1e-8 * scale:
                raise InvalidStateError(
                    "cross channels must agree in the half-plane representation"
                )

    @classmethod
    def from_channel(cls, grid: FrequencyGrid, pair: DirectionPair,
                     values: np.ndarray) -> "GridState":
        data = np.zeros((4, grid.omegabar.size, grid.delta.size), dtype=complex)
        data[pair.index] = values
        if pair.swapped is not pair:
            data[pair.swapped.index] = values
        return cls(grid, data, validate=False)

    def channel(self, pair: DirectionPair) -> np.ndarray:
        return self.data[pair.index]

    def norm_squared(self) -> float:
        return float(sum(self.grid.integrate(np.abs(self.data[i]) ** 2)
                         for i in range(4)))

    def amplitude(self, pair: DirectionPair, omegabar, delta) -> np.ndarray:
        interp_re = RegularGridInterpolator(
            (self.grid.omegabar, self.grid.delta), self.data[pair.index].real,
            bounds_error=False, fill_value=0.0)
        interp_im = RegularGridInterpolator(
            (self.grid.omegabar, self.grid.delta), self.data[pair.index].imag,
            bounds_error=False, fill_value=0.0)
        omegabar = np.asarray(omegabar, dtype=float)
        delta = np.asarray(delta, dtype=float)
        pts = np.broadcast_arrays(omegabar, delta)
        stack = np.stack([p.ravel() for p in pts], axis=-1)
        vals = interp_re(stack) + 1j * interp_im(stack)
        return vals.reshape(pts[0].shape)

    def on_grid(self, grid: FrequencyGrid) -> "GridState":
        if self.grid.same_axes(grid):
            return self
        data = np.empty((4, grid.omegabar.size, grid.delta.size), dtype=complex)
        ob, dd = np.meshgrid(grid.omegabar, grid.delta, indexing="ij")
        for pair in PAIRS:
            data[pair.index] = self.amplitude(pair, ob, dd)
        return GridState(grid, data, validate=False)


def gaussian_sum_spectrum(center: float, sigma: float):
    """Normalized Gaussian sum-frequency factor.

    ``f(obar) = (2 pi sigma^2)^{-1/4} exp(-(obar - center)^2 / (4 sigma^2))``
    with ``Int |f|^2 d obar = 1``; the intensity ``|f|^2`` has standard
    deviation ``sigma``.  Returns ``(callable, window)``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    amp = (2.0 * math.pi * sigma * sigma) ** -0.25

    def f(obar):
        obar = np.asarray(obar, dtype=float)
        return amp * np.exp(-((obar - center) ** 2) / (4.0 * sigma * sigma))

    return f, (center - 12.0 * sigma, center + 12.0 * sigma)


def gaussian_difference_profile(sigma: float, center: float = 0.0):
    """Normalized, folded Gaussian difference-frequency factor.

    The raw profile ``exp(-(delta - center)^2 / (4 sigma^2))`` is symmetrized
    onto the half line, ``h(delta) = A (raw(delta) + raw(-delta))``, and ``A``
    is chosen so that ``Int_0^inf |h|^2 d delta = 1``.  For ``center = 0``
    this reduces to ``(2/(pi sigma^2))^{1/4} exp(-delta^2/(4 sigma^2))``.
    Returns ``(callable, window)``.
    """
    if not sigma > 0:
        raise ValueError("sigma must be positive")
    s2 = sigma * sigma
    # Half-line mass of raw(d) + raw(-d):
    #   Int_R |raw|^2 + Int_R raw(d) raw(-d) = sigma sqrt(2 pi) (1 + e^{-c^2/2s^2})
    mass = sigma * math.sqrt(2.0 * math.pi) * (1.0 + math.exp(-center * center / (2.0 * s2)))
    amp = 1.0 / math.sqrt(mass)

    def h(delta):
        delta = np.asarray(delta, dtype=float)
        return amp * (np.exp(-((delta - center) ** 2) / (4.0 * s2))
                      + np.exp(-((delta + center) ** 2) / (4.0 * s2)))

    hi = abs(center) + 12.0 * sigma
    return h, (0.0, hi)


def gaussian_biphoton(channel: DirectionPair, sum_center: float, sigma: float,
                      diff_center: float = 0.0) -> SeparableState:
    """Product of Gaussian sum and folded Gaussian difference factors."""
    f, fw = gaussian_sum_spectrum(sum_center, sigma)
    h, hw = gaussian_difference_profile(sigma, diff_center)
    return SeparableState(channel, f, h, fw, hw)


def _check_delta_cover(envelope: Envelope, delta_max: float) -> None:
    kept = envelope.half_line_mass(delta_max)
    if kept < ENVELOPE_COVER_FRACTION:
        warnings.warn(
            f"difference-frequency grid keeps only {kept:.4%} of the envelope "
            "mass; results on this grid are truncated",
            TruncationWarning,
            stacklevel=3,
        )


def project_on_envelope(state: BiphotonState, envelope: Envelope,
                        pair: DirectionPair, omegabar=None):
    """Envelope overlap ``p(obar) = Int_0^inf u(delta) C(obar, delta) d delta``.

    For a separable state this is ``f(obar)`` times the scalar half-line
    overlap of ``u`` with ``h``; pass ``omegabar`` to evaluate, or omit it to
    receive a callable.  For a grid state the integral is taken by trapezoid
    along the stored difference axis and returned on the grid's sum axis.
    """
    if isinstance(state, SeparableState):
        kappa = state.overlap_with_envelope(envelope) if pair in (
            state.channel, state.channel.swapped) else 0.0

        def p(ob):
            return kappa * np.asarray(state.f(ob), dtype=complex)

        if omegabar is None:
            return p
        return p(np.asarray(omegabar, dtype=float))
    if isinstance(state, GridState):
        _check_delta_cover(envelope, float(state.grid.delta[-1]))
        u = envelope(state.grid.delta)
        return state.grid.integrate_delta(u[None, :] * state.channel(pair))
    raise TypeError("state must be SeparableState or GridState")


def decompose(state: BiphotonState, envelope: Envelope):
    """Split a state into envelope-parallel and orthogonal parts.

    The parallel part of each channel is ``conj(u)(delta) p(obar)`` with
    ``p`` the envelope overlap; the orthogonal part is the remainder and has
    vanishing overlap with the envelope.  The two parts add back to the
    input, and their squared norms add to the input squared norm.
    """
    if isinstance(state, SeparableState):
        # kappa already carries the state's normalization scale, so the
        # parallel amplitude is kappa * f_raw(obar) * conj(u)(delta).
        # Dividing by the envelope mass inside the integration window keeps
        # the split orthogonal under the windowed inner product even for
        # slowly decaying envelopes whose tails the window cuts.
        kappa = state.overlap_with_envelope(envelope)
        scale = state._scale
        lo, hi = state.h_window
        if envelope.kind is not EnvelopeKind.TABULATED:
            hi = max(hi, 12.0 * envelope.width)
        mass = envelope.half_line_mass(hi)
        coeff = kappa / mass if mass > 0 else 0.0 + 0.0j

        def h_par(delta):
            return np.conj(envelope(delta))

        def h_orth(delta, _h=state.h, _k=coeff, _s=scale):
            return _s * np.asarray(_h(delta), dtype=complex) \
                - _k * np.conj(envelope(delta))

        parallel = SeparableState(state.channel, state.f, h_par,
                                  state.f_window, (0.0, hi), normalize=False)
        orthogonal = SeparableState(state.channel, state.f, h_orth,
                                    state.f_window, (0.0, hi), normalize=False)
        parallel._scale = coeff
        orthogonal._scale = 1.0 + 0.0j
        return parallel, orthogonal
    if isinstance(state, GridState):
        _check_delta_cover(envelope, float(state.grid.delta[-1]))
        u = envelope(state.grid.delta)
        unorm = float(state.grid.integrate_delta(
            np.abs(u)[None, :] ** 2)[0])
        par = np.empty_like(state.data)
        for pair in PAIRS:
            p = state.grid.integrate_delta(u[None, :] * state.channel(pair))
            if unorm > 0:
                p = p / unorm
            par[pair.index] = p[:, None] * np.conj(u)[None, :]
        return (GridState(state.grid, par, validate=False),
                GridState(state.grid, state.data - par, validate=False))
    raise TypeError("state must be SeparableState or GridState")
