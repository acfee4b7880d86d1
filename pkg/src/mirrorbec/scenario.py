"""Bookkeeping of the heralded momentum transfer to the mirror condensate.

Conventions: the pi_+ component is routed to spatial mode U and pi_- to D;
a photon incident on U is reflected into D and kicks the condensate along U.
A kick along U populates the ``+2 hbar k`` momentum peak.
"""
from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from . import opa
from .errors import DepletionError

DIRECTIONS = ("U", "D", "superposed", "none")
BRANCH_AMPLITUDE = 2**-0.5


@dataclass(frozen=True)
class PolarizationMacrostate:
    label: str
    phase: float
    n_plus: float
    n_minus: float
    active_plus: float
    active_minus: float

    @property
    def dominant(self):
        if self.n_plus > self.n_minus:
            return "+"
        if self.n_minus > self.n_plus:
            return "-"
        return None


def macrostate(gain, phase, band_fraction, label=None):
    """Mean and in-band photon numbers of the macro-qubit injected with ``phase``.

    ``band_fraction`` is the mirror band over the source linewidth.
    """
    if not 0 <= band_fraction <= 1:
        raise ValueError(f"band_fraction must lie in [0, 1], got {band_fraction!r}")
    n_plus, n_minus = opa.mean_photon_numbers(opa.OpaParams(gain), phase)
    if label is None:
        label = f"Phi^{phase:.6g}"
    return PolarizationMacrostate(
        label, float(phase), float(n_plus), float(n_minus),
        band_fraction * float(n_plus), band_fraction * float(n_minus),
    )


@dataclass(frozen=True)
class ModeComponent:
    mode: str
    polarization: str
    role: str
    photons: float
    active: float


def _role(mine, other):
    if mine > other:
        return "phi"
    if mine < other:
        return "xi"
    return "balanced"


def split_macrostate(state):
    """Waveplate and PBS: pi_+ onto mode U, pi_- onto mode D."""
    up = ModeComponent("U", "+", _role(state.n_plus, state.n_minus), state.n_plus, state.active_plus)
    down = ModeComponent("D", "-", _role(state.n_minus, state.n_plus), state.n_minus, state.active_minus)
    return up, down


@dataclass(frozen=True)
class ScenarioOutcome:
    """Result of reflecting both spatial modes off the mirror condensate.

    Kicks are in units of ``2 hbar k`` (one per reflected photon). A photon
    incident on U leaves on D, so ``reflected_into_d`` equals the U kick.
    """

    recoil_direction: str
    kick_u: float
    kick_d: float
    reflected_into_d: float
    reflected_into_u: float
    transmitted_u: float
    transmitted_d: float
    output_label: str
    drift_velocity: float
    branch_amplitudes: Dict[str, float] = field(default_factory=dict)

    @property
    def net_kick(self):
        """Kick along U minus kick along D."""
        return self.kick_u - self.kick_d


def interact(components, mirror_reflectivity, atom_count, v_r, label=None):
    """Reflect the U and D components off the mirror and book the recoil."""
    if not 0 <= mirror_reflectivity <= 1:
        raise ValueError(f"mirror_reflectivity must lie in [0, 1], got {mirror_reflectivity!r}")
    if atom_count <= 0:
        raise ValueError("atom_count must be positive")
    by_mode = {c.mode: c for c in components}
    up, down = by_mode["U"], by_mode["D"]
    r = mirror_reflectivity
    kick_u, kick_d = r * up.active, r * down.active
    if r == 0 or kick_u == kick_d == 0:
        direction, branches = "none", {}
    elif kick_u > kick_d:
        direction, branches = "U", {"U": 1.0}
    elif kick_d > kick_u:
        direction, branches = "D", {"D": 1.0}
    else:
        direction, branches = "superposed", {"U": BRANCH_AMPLITUDE, "D": BRANCH_AMPLITUDE}
    return ScenarioOutcome(
        recoil_direction=direction,
        kick_u=kick_u,
        kick_d=kick_d,
        reflected_into_d=kick_u,
        reflected_into_u=kick_d,
        transmitted_u=up.active - kick_u,
        transmitted_d=down.active - kick_d,
        output_label=label or "",
        drift_velocity=abs(kick_u - kick_d) / atom_count * v_r,
        branch_amplitudes=branches,
    )


@dataclass(frozen=True)
class MomentumPeakModel:
    """Momentum peaks at ``n * 2 hbar k`` with Gaussian velocity widths."""

    orders: np.ndarray
    fractions: np.ndarray
    widths: np.ndarray
    peak_spacing: float

    def __post_init__(self):
        for name in ("orders", "fractions", "widths"):
            arr = np.array(getattr(self, name), dtype=int if name == "orders" else float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not np.isclose(self.fractions.sum(), 1.0, rtol=0, atol=1e-12):
            raise ValueError(f"peak fractions must sum to 1, got {self.fractions.sum()!r}")
        if np.any(self.fractions < 0) or np.any(self.widths <= 0):
            raise ValueError("fractions must be >= 0 and widths > 0")

    @property
    def centres(self):
        return self.orders * self.peak_spacing

    def fraction(self, order):
        return float(self.fractions[list(self.orders).index(order)])

    def profile(self, velocities):
        """Population density over ``velocities`` (m/s), a sum of normalised Gaussians."""
        v = np.asarray(velocities, dtype=float)[:, None]
        g = np.exp(-0.5 * ((v - self.centres) / self.widths) ** 2) / (np.sqrt(2 * np.pi) * self.widths)
        return g @ self.fractions


def default_peak_model(v_r, first_order_fraction=0.01, width_fraction=0.1):
    """Condensate peak plus two first-order peaks holding ``first_order_fraction`` each.

    Widths default to ``width_fraction`` of the peak spacing ``2 v_r``.
    """
    spacing = 2 * v_r
    fractions = [first_order_fraction, 1 - 2 * first_order_fraction, first_order_fraction]
    return MomentumPeakModel([-1, 0, 1], fractions, [width_fraction * spacing] * 3, spacing)


def momentum_transfer_profile(state, model, mirror_reflectivity, atom_count):
    """Move ``R N'_+ / N_at`` from the n=0 peak to n=+1 and ``R N'_- / N_at`` to n=-1.

    Returns ``(before, after)``; widths are unchanged.
    """
    up = mirror_reflectivity * state.active_plus / atom_count
    down = mirror_reflectivity * state.active_minus / atom_count
    orders = list(model.orders)
    for n in (-1, 0, 1):
        if n not in orders:
            raise ValueError(f"peak model lacks order {n}")
    fractions = np.array(model.fractions)
    source = orders.index(0)
    if up + down > fractions[source]:
        raise DepletionError("n=0 peak cannot supply the transferred atoms", up + down, float(fractions[source]))
    fractions[source] -= up + down
    fractions[orders.index(1)] += up
    fractions[orders.index(-1)] += down
    after = MomentumPeakModel(model.orders, fractions, model.widths, model.peak_spacing)
    return model, after


def peak_asymmetry(model):
    return model.fraction(1) - model.fraction(-1)


@dataclass(frozen=True)
class CorrelationRow:
    basis: str
    outcome: str
    macrostate: str
    phase: float
    active_plus: float
    active_minus: float
    recoil_direction: str
    net_kick: float
    drift_velocity: float


def correlation_table(gain, bases, mirror_reflectivity, atom_count, band_fraction, v_r) -> List[CorrelationRow]:
    """Alice's outcome, the macro-qubit it heralds, and the condensate recoil, per row."""
    rows = []
    for basis in bases:
        hmap = opa.SingletHeraldMap(basis)
        for outcome in hmap.outcomes:
            h = opa.herald(outcome, hmap)
            state = macrostate(gain, h.phase, band_fraction, label=h.label)
            result = interact(split_macrostate(state), mirror_reflectivity, atom_count, v_r, label=h.label)
            rows.append(CorrelationRow(
                basis, outcome, h.label, h.phase, state.active_plus, state.active_minus,
                result.recoil_direction, result.net_kick, result.drift_velocity,
            ))
    return rows


@dataclass(frozen=True)
class CoherenceWindow:
    rate: float

    @property
    def window(self):
        return 1.0 / self.rate

    def fraction(self, t):
        """Coherence remaining after time ``t``: ``exp(-rate t)``."""
        return np.exp(-self.rate * np.asarray(t, dtype=float))


def decoherence_window(rate) -> CoherenceWindow:
    if not rate > 0:
        raise ValueError(f"decoherence rate must be positive, got {rate!r}")
    return CoherenceWindow(float(rate))


def kick_difference(gain, phase, band_fraction, mirror_reflectivity) -> Tuple[float, float]:
    """Net kick from the bookkeeping and from the fringe formula, for cross-checking."""
    state = macrostate(gain, phase, band_fraction)
    outcome = interact(split_macrostate(state), mirror_reflectivity, 1.0, 0.0)
    closed = mirror_reflectivity * band_fraction * opa.photon_number_difference(opa.OpaParams(gain), phase)
    return outcome.net_kick, float(closed)
