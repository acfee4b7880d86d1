"""Quantum-injected parametric amplifier: macro-qubit amplitudes and photon statistics.

A single photon injected with polarization ``pi_phi`` is amplified into

    |Phi> = sum_ij gamma_ij |2i+1>_phi |2j>_phi_perp

with ``gamma_ij = sqrt((2i+1)!(2j)!) / (i! j!) * C^-2 * (-T/2)^j * (T/2)^i``,
``C = cosh g`` and ``T = tanh g``. The squared amplitudes factor into two
marginal distributions,

    p_i = (2i+1)! / (i!)^2 (T/2)^(2i) / C^3,    q_j = (2j)! / (j!)^2 (T/2)^(2j) / C,

each summing to one, which is what the truncation logic exploits.
"""
from dataclasses import dataclass, field
from typing import Tuple

import numpy as np
from scipy.special import gammaln, xlogy

from .errors import BasisMismatchError, TruncationError, UnsupportedBasisError

#: eigenphases of the injected qubit for each measurement basis, ordered as the mode labels
BASIS_PHASES = {
    "plus_minus": (0.0, np.pi),
    "LR": (np.pi / 2, 3 * np.pi / 2),
    "HV": (),
}
BASIS_MODES = {
    "plus_minus": ("+", "-"),
    "LR": ("L", "R"),
    "HV": ("H", "V"),
}
FRINGE_BASES = ("plus_minus", "LR")

_PHASE_ATOL = 1e-12


def _check_basis(basis_label):
    if basis_label not in BASIS_PHASES:
        raise ValueError(f"unknown basis {basis_label!r}; expected one of {sorted(BASIS_PHASES)}")


def _wrap_phase(phase):
    return float(np.mod(phase, 2 * np.pi))


def _same_phase(a, b):
    d = np.mod(a - b + np.pi, 2 * np.pi) - np.pi
    return abs(d) < _PHASE_ATOL


def _cos(phase):
    # cos(pi/2) is 6e-17 in floating point; equatorial phases must give exactly zero
    c = np.cos(phase)
    return np.where(np.abs(c) < 1e-15, 0.0, c)


def log_cosh(x):
    return np.logaddexp(x, -x) - np.log(2.0)


@dataclass(frozen=True)
class OpaParams:
    """Amplifier gain and Fock truncation settings.

    ``cutoff_i`` and ``cutoff_j`` are starting cutoffs; :func:`build_macrostate`
    grows them (up to ``max_cutoff``) until the retained probability mass is at
    least ``1 - tail_tolerance``.
    """

    gain: float
    cutoff_i: int = 8
    cutoff_j: int = 8
    tail_tolerance: float = 1e-9
    max_cutoff: int = 4096

    def __post_init__(self):
        if not np.isfinite(self.gain) or self.gain < 0:
            raise ValueError(f"gain must be finite and >= 0, got {self.gain!r}")
        for name in ("cutoff_i", "cutoff_j", "max_cutoff"):
            value = getattr(self, name)
            if int(value) != value or value < 0:
                raise ValueError(f"{name} must be a non-negative integer, got {value!r}")
        if not 0 < self.tail_tolerance < 1:
            raise ValueError(f"tail_tolerance must lie in (0, 1), got {self.tail_tolerance!r}")
        if self.max_cutoff < max(self.cutoff_i, self.cutoff_j):
            raise ValueError("max_cutoff must be at least the starting cutoffs")

    @property
    def cosh_gain(self):
        return float(np.cosh(self.gain))

    @property
    def tanh_gain(self):
        return float(np.tanh(self.gain))

    @property
    def mean_squeezed_photons(self):
        """Mean photon number of the uninjected amplifier, sinh^2 g."""
        return float(np.sinh(self.gain) ** 2)


@dataclass(frozen=True)
class FockAmplitudeTable:
    """Truncated two-mode Fock expansion of a macro-qubit.

    ``amplitudes[i, j]`` multiplies ``|2i+1>`` in the dominant mode ``pi_phase``
    and ``|2j>`` in the orthogonal one. ``basis_label`` names the measurement
    basis the table is tied to; the table is expressed in that basis' own modes
    only when ``phase`` is one of its eigenphases.
    """

    basis_label: str
    phase: float
    gain: float
    amplitudes: np.ndarray = field(repr=False)
    tail_tolerance: float = 1e-9

    def __post_init__(self):
        _check_basis(self.basis_label)
        amps = np.array(self.amplitudes, dtype=float)
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "phase", _wrap_phase(self.phase))

    @property
    def cutoff_i(self):
        return self.amplitudes.shape[0] - 1

    @property
    def cutoff_j(self):
        return self.amplitudes.shape[1] - 1

    @property
    def mass(self):
        """Retained probability mass, the truncation certificate."""
        return float(np.sum(self.amplitudes**2))

    @property
    def certified(self):
        return self.mass >= 1.0 - self.tail_tolerance

    def occupations(self):
        """Photon numbers ``(p, q)`` in the (first, second) mode of the table's mode pair.

        The mode pair is ``(pi_phase, pi_phase_perp)``; for eigenphase tables this is
        the basis' own label order when ``phase`` is the first eigenphase.
        """
        i = np.arange(self.cutoff_i + 1)[:, None]
        j = np.arange(self.cutoff_j + 1)[None, :]
        odd = np.broadcast_to(2 * i + 1, self.amplitudes.shape)
        even = np.broadcast_to(2 * j, self.amplitudes.shape)
        return odd, even


def _validate_index(name, value):
    if int(value) != value:
        raise ValueError(f"{name} must be an integer, got {value!r}")
    if value < 0:
        raise ValueError(f"{name} must be non-negative, got {value!r}")
    return int(value)


def _log_factors(n, gain):
    """Log-magnitudes of the i- and j-dependent parts of gamma_ij for 0..n."""
    k = np.arange(n + 1, dtype=float)
    # xlogy keeps the k = 0 term finite at zero gain
    power = xlogy(k, np.tanh(gain) / 2)
    a = 0.5 * gammaln(2 * k + 2) - gammaln(k + 1) + power
    b = 0.5 * gammaln(2 * k + 1) - gammaln(k + 1) + power
    return a, b


def gamma_coefficient(i, j, params):
    """Signed amplitude gamma_ij, assembled in log-magnitude form.

    Overflow-free for indices far beyond where ``(2j)!`` leaves the float range.
    """
    i = _validate_index("i", i)
    j = _validate_index("j", j)
    g = params.gain
    if g == 0:
        return 1.0 if i == j == 0 else 0.0
    log_half_tanh = np.log(np.tanh(g) / 2)
    log_mag = (
        0.5 * (gammaln(2 * i + 2) + gammaln(2 * j + 1))
        - gammaln(i + 1)
        - gammaln(j + 1)
        - 2 * log_cosh(g)
        + (i + j) * log_half_tanh
    )
    sign = -1.0 if j % 2 else 1.0
    return float(sign * np.exp(log_mag))


def marginal_masses(params, n):
    """Marginal probability arrays ``(p, q)`` over indices ``0..n``."""
    a, b = _log_factors(n, params.gain)
    lc = log_cosh(params.gain)
    return np.exp(2 * a - 3 * lc), np.exp(2 * b - lc)


def _grow_cutoffs(params):
    """Smallest cutoffs (not below the starting ones) meeting the tail tolerance.

    Each marginal is allowed 45% of the tolerance, so the product of the two
    retained masses clears ``1 - tail_tolerance`` with room for round-off.
    """
    cap = params.max_cutoff
    p, q = marginal_masses(params, cap)
    cp, cq = np.cumsum(p), np.cumsum(q)
    half = 1.0 - 0.45 * params.tail_tolerance
    ci = max(params.cutoff_i, min(cap, int(np.searchsorted(cp, half))))
    cj = max(params.cutoff_j, min(cap, int(np.searchsorted(cq, half))))
    if cp[ci] * cq[cj] < 1.0 - params.tail_tolerance:
        raise TruncationError(
            "cutoff growth cap reached before the tail tolerance was met",
            achieved_mass=float(cp[ci] * cq[cj]),
            cutoffs=(ci, cj),
        )
    return ci, cj


def build_macrostate(params, basis_label="plus_minus", phase=0.0):
    """Tabulate the macro-qubit amplified from the qubit of injected ``phase``.

    Cutoffs start from ``params`` and are doubled until the certificate
    ``sum |gamma_ij|^2 >= 1 - tail_tolerance`` holds.

    Raises
    ------
    TruncationError
        If ``max_cutoff`` is reached first; carries the achieved mass.
    """
    _check_basis(basis_label)
    if params.gain == 0:
        amps = np.zeros((params.cutoff_i + 1, params.cutoff_j + 1))
        amps[0, 0] = 1.0
    else:
        ci, cj = _grow_cutoffs(params)
        a, b = _log_factors(max(ci, cj), params.gain)
        log_mag = a[: ci + 1, None] + b[None, : cj + 1] - 2 * log_cosh(params.gain)
        signs = np.where(np.arange(cj + 1) % 2, -1.0, 1.0)
        amps = np.exp(log_mag) * signs[None, :]
    table = FockAmplitudeTable(basis_label, phase, params.gain, amps, params.tail_tolerance)
    if not table.certified:
        # summation round-off only; the marginal cumsums already cleared the target
        raise TruncationError("table mass below tolerance", table.mass, (table.cutoff_i, table.cutoff_j))
    return table


def state_overlap(a, b):
    """Inner product of two macro-qubit tables over their common occupations.

    Both tables must share a mode pair: the same basis label and injected
    phases equal or differing by pi. Tables on orthogonal injected qubits
    occupy disjoint parity sectors and overlap to exactly zero.
    """
    if a.basis_label != b.basis_label:
        raise BasisMismatchError(f"tables are in different bases: {a.basis_label!r} vs {b.basis_label!r}")
    if _same_phase(a.phase, b.phase):
        ni = min(a.cutoff_i, b.cutoff_i) + 1
        nj = min(a.cutoff_j, b.cutoff_j) + 1
        return float(np.sum(a.amplitudes[:ni, :nj] * b.amplitudes[:ni, :nj]))
    if _same_phase(a.phase, b.phase + np.pi):
        # a has odd counts where b has even ones, so no occupation is shared
        return 0.0
    raise BasisMismatchError(
        f"injected phases {a.phase!r} and {b.phase!r} define different mode pairs; "
        "no implicit basis change is performed"
    )


def mean_photon_numbers(params, phase):
    """Closed-form mean photon numbers ``(N_plus, N_minus)`` in the {+,-} basis.

    ``N_pm = m + (m + 1/2)(1 +- cos phase)`` with ``m = sinh^2 g``. ``phase``
    may be an array.
    """
    m = params.mean_squeezed_photons
    c = _cos(phase)
    return m + (m + 0.5) * (1 + c), m + (m + 0.5) * (1 - c)


def photon_number_difference(params, phase):
    """Fringe function ``N(phase) = (2 m + 1) cos(phase)``."""
    return (2 * params.mean_squeezed_photons + 1) * _cos(phase)


def photon_totals(params):
    """The two total-photon figures used in the literature, kept apart.

    ``fringe_sum`` is ``N_plus + N_minus = 4 m + 1`` from the closed forms;
    ``three_mbar`` is the ``3 m`` estimate quoted for the beam pair.
    """
    m = params.mean_squeezed_photons
    return {"fringe_sum": 4 * m + 1, "three_mbar": 3 * m}


def mean_photons_numeric(table):
    """Series estimate of the mean photon numbers from a tabulated macro-qubit.

    Returns the counts in the order of the table basis' mode labels. Only
    defined when the table's injected phase is an eigenphase of its basis.
    """
    phases = BASIS_PHASES[table.basis_label]
    weights = table.amplitudes**2
    odd, even = table.occupations()
    dominant = float(np.sum(weights * odd))
    minor = float(np.sum(weights * even))
    if phases and _same_phase(table.phase, phases[0]):
        return dominant, minor
    if phases and _same_phase(table.phase, phases[1]):
        return minor, dominant
    raise UnsupportedBasisError(
        f"phase {table.phase!r} is not an eigenphase of basis {table.basis_label!r}; "
        "the numeric estimate is only defined in the table's own basis"
    )


@dataclass(frozen=True)
class FringeCurve:
    phases: np.ndarray
    n_plus: np.ndarray
    n_minus: np.ndarray
    difference: np.ndarray
    basis: str = "plus_minus"


def fringe_pattern(params, phases, basis="plus_minus"):
    """Mean photon numbers versus injected phase as measured in ``basis``.

    Measuring in {L, R} shifts the fringe by pi/2 with respect to {+, -}.
    """
    if basis not in FRINGE_BASES:
        raise ValueError(f"fringes are defined for bases {FRINGE_BASES}, got {basis!r}")
    phases = np.atleast_1d(np.asarray(phases, dtype=float))
    if phases.size == 0:
        raise ValueError("phase grid is empty")
    shifted = phases - BASIS_PHASES[basis][0]
    n_plus, n_minus = mean_photon_numbers(params, shifted)
    return FringeCurve(phases, n_plus, n_minus, photon_number_difference(params, shifted), basis)


def fringe_visibility(params):
    """Visibility of N_plus(phase): (2m + 1) / (4m + 1)."""
    m = params.mean_squeezed_photons
    return (2 * m + 1) / (4 * m + 1)


@dataclass(frozen=True)
class HeraldedState:
    label: str
    phase: float
    basis: str


_HERALD_LABELS = {
    "plus_minus": {"+": "Phi+", "-": "Phi-"},
    "LR": {"L": "PhiL", "R": "PhiR"},
}


@dataclass(frozen=True)
class SingletHeraldMap:
    """Alice's outcome to macro-qubit association for the micro-macro singlet.

    Each outcome of a basis picks the injected eigenphase of the same name, so
    the two outcomes herald macro-qubits whose injected qubits are orthogonal.
    """

    alice_basis: str = "plus_minus"

    def __post_init__(self):
        if self.alice_basis not in _HERALD_LABELS:
            raise ValueError(f"Alice measures in {sorted(_HERALD_LABELS)}, got {self.alice_basis!r}")

    @property
    def outcomes(self) -> Tuple[str, str]:
        return BASIS_MODES[self.alice_basis]

    def mapping(self):
        phases = BASIS_PHASES[self.alice_basis]
        labels = _HERALD_LABELS[self.alice_basis]
        return {
            out: HeraldedState(labels[out], phase, self.alice_basis)
            for out, phase in zip(self.outcomes, phases)
        }


def herald(alice_outcome, herald_map):
    mapping = herald_map.mapping()
    if alice_outcome not in mapping:
        raise BasisMismatchError(
            f"outcome {alice_outcome!r} does not belong to basis {herald_map.alice_basis!r}"
        )
    return mapping[alice_outcome]
