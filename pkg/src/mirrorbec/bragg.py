"""Classical Bragg-stack model of a condensate patterned into quarter-wave slabs."""
from dataclasses import dataclass

import numpy as np
from scipy import constants

from .errors import EmptyBandError, SingularityError
from .species import RUBIDIUM_87, AtomSpecies

EPSILON_VARIANTS = ("as_written", "dispersive")

#: absorption-to-reflection linewidth ratio; a quoted figure, not derived here
ABSORBED_FRACTION = 1e-3


@dataclass(frozen=True)
class BraggStack:
    """``2 * layer_pairs`` alternating quarter-wave layers of condensate and vacuum."""

    layer_pairs: int = 200
    epsilon_variant: str = "as_written"
    species: AtomSpecies = RUBIDIUM_87

    def __post_init__(self):
        if int(self.layer_pairs) != self.layer_pairs or self.layer_pairs < 1:
            raise ValueError(f"layer_pairs must be an integer >= 1, got {self.layer_pairs!r}")
        _check_variant(self.epsilon_variant)


@dataclass(frozen=True)
class ReflectivitySpectrum:
    detunings: np.ndarray
    epsilon: np.ndarray
    n_b: np.ndarray
    reflectivity: np.ndarray
    variant: str
    layer_pairs: int


def _check_variant(variant):
    if variant not in EPSILON_VARIANTS:
        raise ValueError(f"epsilon variant must be one of {EPSILON_VARIANTS}, got {variant!r}")


def epsilon_contrast(species, detuning, variant="as_written"):
    """Refractive-index contrast of the condensate layers at ``detuning`` (Hz).

    ``as_written`` evaluates ``(3 pi / 2) M 4 (G / D) / (1 + (2 D / G)^2)``
    literally and diverges at resonance; ``dispersive`` swaps ``G / D`` for
    ``D / G``, giving the finite dispersive profile that peaks at ``D = G / 2``.
    """
    _check_variant(variant)
    d = np.asarray(detuning, dtype=float)
    gamma = species.linewidth
    if variant == "as_written":
        zero = np.flatnonzero(np.atleast_1d(d) == 0)
        if zero.size:
            raise SingularityError("as_written contrast diverges at zero detuning",
                                   index=int(zero[0]) if d.ndim else None)
        ratio = gamma / d
    else:
        ratio = d / gamma
    eps = 1.5 * np.pi * species.rescaled_density * 4 * ratio / (1 + (2 * d / gamma) ** 2)
    return eps if eps.ndim else float(eps)


def stack_reflectivity(n_b, layer_pairs):
    """Reflectivity ``((n^(2N) - 1) / (n^(2N) + 1))^2`` of the layered stack.

    Evaluated as ``tanh(N ln n)^2``, which is the same expression without ever
    forming ``n^(2N)``.
    """
    n_b = np.asarray(n_b, dtype=float)
    if np.any(~np.isfinite(n_b)) or np.any(n_b < 1):
        raise ValueError("n_b must be finite and >= 1")
    if np.any(np.asarray(layer_pairs) < 1):
        raise ValueError("layer_pairs must be >= 1")
    r = np.tanh(layer_pairs * np.log(n_b)) ** 2
    return r if r.ndim else float(r)


def reflectivity_spectrum(stack, detunings):
    """Reflectivity of ``stack`` over a detuning grid (Hz).

    Negative contrast gives ``n_b < 1``; the stack then has index ratio
    ``1 / n_b`` and the same reflectivity as a stack of index ``1 / n_b``.
    """
    d = np.atleast_1d(np.asarray(detunings, dtype=float))
    if d.size == 0:
        raise ValueError("detuning grid is empty")
    eps = np.atleast_1d(epsilon_contrast(stack.species, d, stack.epsilon_variant))
    n_b = 1 + eps
    bad = np.flatnonzero(n_b <= 0)
    if bad.size:
        raise SingularityError(f"non-positive layer index {n_b[bad[0]]!r}", index=int(bad[0]))
    ratio = np.where(n_b >= 1, n_b, 1 / n_b)
    r = np.atleast_1d(stack_reflectivity(ratio, stack.layer_pairs))
    return ReflectivitySpectrum(d, eps, n_b, r, stack.epsilon_variant, stack.layer_pairs)


def band_intervals(spectrum, threshold):
    """Detuning intervals where ``R >= threshold``, edges linearly interpolated."""
    if not 0 < threshold < 1:
        raise ValueError(f"threshold must lie in (0, 1), got {threshold!r}")
    order = np.argsort(spectrum.detunings)
    x = spectrum.detunings[order]
    r = spectrum.reflectivity[order]
    above = r >= threshold
    if not above.any():
        raise EmptyBandError(f"no point reaches reflectivity {threshold!r} (max {r.max()!r})")
    if above[0] or above[-1]:
        raise ValueError("spectrum does not bracket the reflective band; widen the detuning grid")

    def crossing(k):
        # threshold crossing between samples k and k + 1
        return x[k] + (threshold - r[k]) * (x[k + 1] - x[k]) / (r[k + 1] - r[k])

    edges = np.flatnonzero(np.diff(above.astype(int)))
    starts, stops = edges[::2], edges[1::2]
    return [(crossing(a), crossing(b)) for a, b in zip(starts, stops)]


def reflective_bandwidth(spectrum, threshold=0.5):
    """Total detuning width (Hz) over which ``R >= threshold``.

    The dispersive contrast vanishes exactly on resonance, splitting the band
    into two lobes around a notch a few kHz wide; the lobes are summed.
    """
    return float(sum(hi - lo for lo, hi in band_intervals(spectrum, threshold)))


def active_photon_count(n_total, band_hz, source_width_hz):
    """Photons inside the mirror band: ``(band / source_width) * n_total``."""
    if n_total < 0 or band_hz <= 0 or source_width_hz <= 0:
        raise ValueError("photon count must be >= 0 and widths > 0")
    if band_hz > source_width_hz:
        raise ValueError(f"band {band_hz!r} Hz is wider than the source {source_width_hz!r} Hz")
    return band_hz / source_width_hz * n_total


def absorbed_photons(n_active):
    """Mean absorbed photons per pulse, from the quoted 0.1% linewidth ratio."""
    return ABSORBED_FRACTION * n_active


def detuning_from_wavelength(wavelength, resonance_wavelength):
    """Optical detuning ``c / wavelength - c / resonance_wavelength`` in Hz."""
    return constants.c / np.asarray(wavelength, dtype=float) - constants.c / resonance_wavelength


def wavelength_from_detuning(detuning, resonance_wavelength):
    return constants.c / (np.asarray(detuning, dtype=float) + constants.c / resonance_wavelength)
