"""1-D CARL-BEC dynamics: a condensate grating coupled to its reflected field.

The matter wave obeys

    i dPsi/dt = -(hbar / 2m) d^2 Psi / dx^2 + V(x, t) Psi,
    V(x, t) = -2 g Im(a* exp(i(2kx - delta t))),

and the reflected amplitude

    da/dt = g N B(t) - kappa a,    B(t) = int |Psi|^2 exp(i(2kx - delta t)) dx.

Internally the phase coordinate is ``theta = 2kx`` and time is measured in
units of ``1 / omega_r`` with ``omega_r = 2 hbar k^2 / m``, so the kinetic
operator is ``-d^2/dtheta^2`` and momentum order ``n`` (in units of
``2 hbar k``) has energy ``n^2``.

Stepping is a Strang splitting: a spectral kinetic half-step, a full step of
the potential flow, a second kinetic half-step. During the potential flow
``|Psi|^2`` is frozen, so the bunching is fixed and the field ODE together
with the accumulated phase is advanced by one classical RK4 step.
"""
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
from scipy import constants

from .errors import NumericalError

MODES = ("coupled", "adiabatic")

#: allowed norm drift per 10^4 steps before a run is aborted
NORM_DRIFT_LIMIT = 1e-6


@dataclass(frozen=True)
class CarlParams:
    """Physical and numerical parameters of a CARL-BEC run (SI units).

    ``coupling`` and ``kappa`` are rates in s^-1, ``detuning`` is the angular
    frequency offset ``omega - omega_s`` in s^-1, ``wavenumber`` the optical
    ``k`` in m^-1. The grid holds ``n_periods`` grating periods of ``lambda/2``
    with ``points_per_period`` samples each.
    """

    coupling: float
    kappa: float
    atom_count: float
    wavenumber: float
    atom_mass: float
    dt: float
    total_time: float
    detuning: float = 0.0
    points_per_period: int = 64
    n_periods: int = 1
    mode: str = "coupled"
    sample_stride: int = 1
    n_max: int = 2

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.points_per_period < 16:
            raise ValueError("points_per_period must be >= 16")
        if self.n_periods < 1:
            raise ValueError("n_periods must be >= 1")
        if not self.dt > 0 or not self.total_time > 0:
            raise ValueError("dt and total_time must be positive")
        if self.kappa < 0 or self.coupling < 0 or self.atom_count <= 0:
            raise ValueError("kappa and coupling must be >= 0 and atom_count > 0")
        if self.wavenumber <= 0 or self.atom_mass <= 0:
            raise ValueError("wavenumber and atom_mass must be positive")
        if self.mode == "adiabatic" and self.kappa <= 0:
            raise ValueError("adiabatic elimination needs kappa > 0")
        if self.sample_stride < 1:
            raise ValueError("sample_stride must be >= 1")
        if self.n_max < 0 or self.n_max >= self.points_per_period / 2:
            raise ValueError("n_max must lie below the grid Nyquist order points_per_period / 2")

    @property
    def recoil_frequency(self):
        """Two-photon recoil frequency ``2 hbar k^2 / m`` in s^-1."""
        return 2 * constants.hbar * self.wavenumber**2 / self.atom_mass

    @property
    def n_steps(self):
        return int(round(self.total_time / self.dt))


@dataclass(frozen=True)
class CondensateField:
    """Matter-wave amplitude on a periodic grid with nodes at ``x_j = j * dx``.

    Normalised so that ``sum |psi|^2 dx = 1``.
    """

    psi: np.ndarray = field(repr=False)
    dx: float
    points_per_period: int

    def __post_init__(self):
        psi = np.array(self.psi, dtype=complex)
        if psi.ndim != 1 or psi.size % self.points_per_period:
            raise ValueError("psi must be 1-D and hold a whole number of periods")
        psi.setflags(write=False)
        object.__setattr__(self, "psi", psi)

    @property
    def n_periods(self):
        return self.psi.size // self.points_per_period

    @property
    def length(self):
        return self.psi.size * self.dx

    @property
    def wavenumber(self):
        return np.pi / (self.points_per_period * self.dx)

    @property
    def x(self):
        return np.arange(self.psi.size) * self.dx

    @property
    def norm(self):
        return float(np.sum(np.abs(self.psi) ** 2) * self.dx)


@dataclass(frozen=True)
class FieldAmplitude:
    a: complex = 0j


@dataclass(frozen=True)
class MomentumSpectrum:
    orders: np.ndarray
    populations: np.ndarray
    unbinned: float


@dataclass(frozen=True)
class EvolutionTrace:
    times: np.ndarray
    intensity: np.ndarray
    normalized_intensity: np.ndarray
    bunching: np.ndarray
    momentum_orders: np.ndarray
    momentum_populations: np.ndarray
    unbinned: np.ndarray
    reference_time: float
    mode: str
    final_field: CondensateField = field(repr=False)
    final_amplitude: complex = 0j
    field_amplitude: Optional[np.ndarray] = field(default=None, repr=False)

    def crossing_time(self, level):
        """First time the normalised intensity falls below ``level`` after the reference."""
        after = self.times >= self.reference_time
        below = np.flatnonzero(after & (self.normalized_intensity < level))
        if below.size == 0:
            return None
        k = below[0]
        if k == 0:
            return float(self.times[0])
        t0, t1 = self.times[k - 1], self.times[k]
        y0, y1 = self.normalized_intensity[k - 1], self.normalized_intensity[k]
        return float(t0 + (level - y0) * (t1 - t0) / (y1 - y0))


def _trapezoid_cdf(u, edge, width):
    """Integral from -inf to ``u`` of a unit up-ramp of ``width`` centred on ``edge``."""
    s = u - edge
    if width == 0:
        return np.maximum(s, 0.0)
    h = width / 2
    return np.where(s <= -h, 0.0, np.where(s >= h, s, (s + h) ** 2 / (2 * width)))


def init_grating(points_per_period, n_periods, wavenumber, smoothing_width=0.0):
    """Slab-comb condensate: density uniform over lambda/4 in each lambda/2 period.

    ``smoothing_width`` (a fraction of lambda, at most 1/8) replaces each slab
    edge by a linear ramp of that width, keeping the slab area fixed. Grid
    values are exact cell averages of the profile; the slab is centred so its
    nominal edges sit on cell boundaries, which makes the unsmoothed comb exact
    on the grid.
    """
    if not 0 <= smoothing_width <= 0.125:
        raise ValueError(f"smoothing_width must lie in [0, 1/8], got {smoothing_width!r}")
    if points_per_period < 4 or n_periods < 1:
        raise ValueError("need at least 4 points per period and one period")
    h = 2 * np.pi / points_per_period
    w = 4 * np.pi * smoothing_width  # ramp width in theta
    if 0 < w < 2 * h:
        raise ValueError(
            f"grid too coarse: smoothing of {smoothing_width} lambda needs >= "
            f"{int(np.ceil(4 * np.pi / w))} points per period"
        )
    centre = h * (((points_per_period / 4 + 0.5) % 1.0))
    theta = np.arange(points_per_period * n_periods) * h
    u = np.mod(theta - centre + np.pi, 2 * np.pi) - np.pi

    def slab_integral(v):
        return _trapezoid_cdf(v, -np.pi / 2, w) - _trapezoid_cdf(v, np.pi / 2, w)

    density = (slab_integral(u + h / 2) - slab_integral(u - h / 2)) / h
    dx = (np.pi / wavenumber) / points_per_period
    # slab edges leave round-off of order 1e-16 in cells that should be empty
    density = np.where(density < 1e-12 * density.max(), 0.0, density)
    psi = np.sqrt(density)
    psi = psi / np.sqrt(np.sum(psi**2) * dx)
    return CondensateField(psi.astype(complex), dx, points_per_period)


def _cell_factor(k, dx):
    # exact integral of exp(2ikx) over one grid cell, relative to the cell width
    return np.sinc(k * dx / np.pi)


def bunching_factor(field, k, t=0.0, delta=0.0):
    """Bunching ``B = int |Psi|^2 exp(i(2kx - delta t)) dx``.

    The density is treated as constant on each grid cell and the phase factor
    is integrated exactly across the cell.
    """
    density = np.abs(field.psi) ** 2
    phase = np.exp(1j * (2 * k * field.x - delta * t))
    return complex(np.sum(density * phase) * field.dx * _cell_factor(k, field.dx))


def momentum_spectrum(field, n_max=2):
    """Populations of momentum orders ``-n_max..n_max`` in units of ``2 hbar k``.

    Every discrete Fourier component is assigned to its nearest order; the
    weight of orders beyond ``n_max`` is returned as ``unbinned``.
    """
    ppp = field.points_per_period
    if n_max < 0 or n_max >= ppp / 2:
        raise ValueError(f"n_max={n_max} aliases on a grid with {ppp} points per period")
    p = field.n_periods
    weights = np.abs(np.fft.fft(field.psi)) ** 2
    weights = weights / weights.sum()
    m = np.fft.fftfreq(field.psi.size, d=1.0 / field.psi.size)
    order = np.floor(m / p + 0.5).astype(int)
    orders = np.arange(-n_max, n_max + 1)
    pops = np.array([weights[order == n].sum() for n in orders])
    return MomentumSpectrum(orders, pops, float(max(0.0, 1.0 - pops.sum())))


def recoil_velocity(species):
    """Single-photon recoil velocity ``h / (lambda m)`` in m/s."""
    return constants.h / (species.resonance_wavelength * species.mass)


def two_photon_recoil_velocity(species):
    return 2 * recoil_velocity(species)


def drift_velocity(active_photons, atom_count, v_r):
    """Velocity ``(N' / N_at) v_r`` acquired by the mirror condensate."""
    if atom_count <= 0:
        raise ValueError("atom_count must be positive")
    return active_photons / atom_count * v_r


def steady_amplitude(params, field, t=0.0):
    """Quasi-steady reflected amplitude ``g N B(t) / (kappa - i delta)``."""
    if params.kappa == 0 and params.detuning == 0:
        raise ValueError("no quasi-steady amplitude without damping or detuning")
    b = bunching_factor(field, params.wavenumber, t, params.detuning)
    return params.coupling * params.atom_count * b / (params.kappa - 1j * params.detuning)


class _Stepper:
    """Dimensionless Strang-split integrator shared by both modes."""

    def __init__(self, params, field):
        self.p = params
        self.w_r = params.recoil_frequency
        self.g = params.coupling / self.w_r
        self.gn = params.coupling * params.atom_count / self.w_r
        self.kappa = params.kappa / self.w_r
        self.delta = params.detuning / self.w_r
        self.k = params.wavenumber
        self.dx = field.dx
        n = field.psi.size
        self.theta = 2 * params.wavenumber * field.x
        self.e_theta = np.exp(1j * self.theta)
        q = np.fft.fftfreq(n, d=1.0 / n) / field.n_periods
        self.q2 = q**2
        self.cell = _cell_factor(params.wavenumber, field.dx)

    def bunching_tilde(self, psi):
        # bunching without the exp(-i delta t) factor
        return np.sum(np.abs(psi) ** 2 * self.e_theta) * self.dx * self.cell

    def kinetic(self, psi, h):
        return np.fft.ifft(np.exp(-1j * self.q2 * h) * np.fft.fft(psi))

    def potential(self, psi, a, tau, h):
        """Advance the potential flow over ``h`` from time ``tau``; returns (psi, a)."""
        bt = self.bunching_tilde(psi)
        if self.p.mode == "adiabatic":
            amp = self.gn * bt / (self.kappa - 1j * self.delta)
            phase_integral = np.conj(amp) * h
            a_new = amp * np.exp(-1j * self.delta * (tau + h))
        else:
            # augmented state (a, Q) with dQ/dtau = conj(a) exp(-i delta tau)
            def rhs(s, a_):
                rot = np.exp(-1j * self.delta * s)
                return self.gn * bt * rot - self.kappa * a_, np.conj(a_) * rot

            k1 = rhs(tau, a)
            k2 = rhs(tau + h / 2, a + h / 2 * k1[0])
            k3 = rhs(tau + h / 2, a + h / 2 * k2[0])
            k4 = rhs(tau + h, a + h * k3[0])
            a_new = a + h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0])
            phase_integral = h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1])
        # exp(-i int V) with int V dtau = -2 g Im(exp(i theta) Q)
        psi = psi * np.exp(2j * self.g * np.imag(self.e_theta * phase_integral))
        return psi, a_new

    def adiabatic_amplitude(self, psi, tau):
        amp = self.gn * self.bunching_tilde(psi) / (self.kappa - 1j * self.delta)
        return amp * np.exp(-1j * self.delta * tau)

    def step(self, psi, a, tau, h):
        psi = self.kinetic(psi, h / 2)
        psi, a = self.potential(psi, a, tau, h)
        psi = self.kinetic(psi, h / 2)
        return psi, a


def evolve(params, psi0, a0=None):
    """Integrate the coupled grating/field system and sample an :class:`EvolutionTrace`.

    In ``adiabatic`` mode the field follows ``g N B / (kappa - i delta)`` and
    ``a0`` is ignored. The intensity reference is ``t = 0``, except for a
    coupled run seeded with ``a0 = 0``, where it is the first local maximum of
    ``|a|^2`` (the plateau after the build-up transient).

    Raises
    ------
    NumericalError
        On non-finite values or norm drift above 1e-6 per 10^4 steps.
    """
    if a0 is None:
        a0 = FieldAmplitude(0j)
    if not np.isclose(psi0.norm, 1.0, rtol=0, atol=1e-8):
        raise ValueError(f"initial field must be unit-normalised, norm is {psi0.norm!r}")
    expected_dx = (np.pi / params.wavenumber) / params.points_per_period
    if psi0.points_per_period != params.points_per_period or not np.isclose(psi0.dx, expected_dx):
        raise ValueError("initial field grid does not match the run parameters")

    stepper = _Stepper(params, psi0)
    h = params.dt * stepper.w_r
    n_steps = params.n_steps
    psi = np.array(psi0.psi)
    norm0 = psi0.norm
    if params.mode == "adiabatic":
        a = stepper.adiabatic_amplitude(psi, 0.0)
    else:
        a = complex(a0.a)

    samples = []

    def record(step, psi, a):
        t = step * params.dt
        norm = float(np.sum(np.abs(psi) ** 2) * stepper.dx)
        if not (np.isfinite(norm) and np.isfinite(a)):
            raise NumericalError(f"non-finite state at step {step} (t = {t!r} s)")
        allowed = NORM_DRIFT_LIMIT * max(1.0, step / 1e4)
        if abs(norm - norm0) > allowed:
            raise NumericalError(
                f"norm drift {abs(norm - norm0):.3e} exceeds {allowed:.1e} at step {step} "
                f"(t = {t!r} s, dt = {params.dt!r} s)"
            )
        fld = CondensateField(psi, stepper.dx, params.points_per_period)
        spec = momentum_spectrum(fld, params.n_max)
        b = bunching_factor(fld, params.wavenumber, t, params.detuning)
        samples.append((t, a, abs(b), spec.populations, spec.unbinned))

    record(0, psi, a)
    # overflow surfaces as a non-finite sample and is raised by record()
    with np.errstate(over="ignore", invalid="ignore"):
        for step in range(1, n_steps + 1):
            psi, a = stepper.step(psi, a, (step - 1) * h, h)
            if params.mode == "adiabatic":
                a = stepper.adiabatic_amplitude(psi, step * h)
            if step % params.sample_stride == 0 or step == n_steps:
                record(step, psi, a)

    times = np.array([s[0] for s in samples])
    amps = np.array([s[1] for s in samples], dtype=complex)
    intensity = np.abs(amps) ** 2
    ref = 0
    if params.mode == "coupled" and a0.a == 0:
        rising = np.flatnonzero((intensity[1:-1] >= intensity[:-2]) & (intensity[1:-1] > intensity[2:]))
        ref = int(rising[0]) + 1 if rising.size else int(np.argmax(intensity))
    with np.errstate(divide="ignore", invalid="ignore"):
        normalized = intensity / intensity[ref] if intensity[ref] > 0 else np.zeros_like(intensity)

    return EvolutionTrace(
        times=times,
        intensity=intensity,
        normalized_intensity=normalized,
        bunching=np.array([s[2] for s in samples]),
        momentum_orders=np.arange(-params.n_max, params.n_max + 1),
        momentum_populations=np.array([s[3] for s in samples]),
        unbinned=np.array([s[4] for s in samples]),
        reference_time=float(times[ref]),
        mode=params.mode,
        final_field=CondensateField(psi, stepper.dx, params.points_per_period),
        final_amplitude=complex(a),
        field_amplitude=amps,
    )


def convergence_ratio(params, psi0, a0=None):
    """Terminal-error ratio between steps ``dt`` and ``dt/2``, measured against ``dt/4``.

    Returns ``(ratio, err_dt, err_half)``. Second-order splitting gives a ratio
    of 5 under this reference choice (4 against an exact solution).
    """
    runs = []
    for div in (1, 2, 4):
        p = replace(params, dt=params.dt / div, sample_stride=10**9)
        runs.append(evolve(p, psi0, a0))

    def err(tr):
        ref = runs[2]
        d_psi = np.sqrt(np.sum(np.abs(tr.final_field.psi - ref.final_field.psi) ** 2) * psi0.dx)
        return float(d_psi)

    e1, e2 = err(runs[0]), err(runs[1])
    return e1 / e2, e1, e2
