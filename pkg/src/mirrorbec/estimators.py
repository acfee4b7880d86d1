"""scikit-learn style front ends.

Each estimator holds its physical parameters as constructor arguments (so
``get_params`` / ``set_params`` / ``clone`` work and parameter sweeps are
``set_params`` calls), derives everything in ``fit`` and maps a 1-D grid
(phases, detunings, times) to observables in ``transform`` / ``predict``.
"""
from dataclasses import replace

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from . import bragg, carl, opa, scenario
from .species import RUBIDIUM_87, AtomSpecies
from .validation import check_choice, check_grid, check_positive

SEEDS = ("steady", "zero")


class QIOPAmplifier(TransformerMixin, BaseEstimator):
    """Macro-qubit photon statistics of the quantum-injected amplifier.

    ``transform`` maps injected phases to columns ``[N_first, N_second, N]``
    measured in ``basis``.
    """

    def __init__(self, gain=1.0, basis="plus_minus", tail_tolerance=1e-9, max_cutoff=4096):
        self.gain = gain
        self.basis = basis
        self.tail_tolerance = tail_tolerance
        self.max_cutoff = max_cutoff

    def fit(self, X=None, y=None):
        check_choice(self.basis, opa.FRINGE_BASES, "basis")
        self.params_ = opa.OpaParams(
            float(self.gain), tail_tolerance=float(self.tail_tolerance), max_cutoff=int(self.max_cutoff)
        )
        self.mean_squeezed_photons_ = self.params_.mean_squeezed_photons
        self.fringe_amplitude_ = 2 * self.mean_squeezed_photons_ + 1
        self.visibility_ = opa.fringe_visibility(self.params_)
        self.photon_totals_ = opa.photon_totals(self.params_)
        return self

    def fringe(self, X):
        check_is_fitted(self)
        return opa.fringe_pattern(self.params_, check_grid(X, "phases"), self.basis)

    def transform(self, X):
        curve = self.fringe(X)
        return np.column_stack([curve.n_plus, curve.n_minus, curve.difference])

    def macrostate(self, phase=0.0, basis_label=None):
        """Tabulated Fock expansion of the macro-qubit injected with ``phase``."""
        check_is_fitted(self)
        return opa.build_macrostate(self.params_, basis_label or self.basis, phase)


class BraggMirror(BaseEstimator):
    """Reflectivity of a patterned condensate versus detuning (Hz)."""

    def __init__(
        self,
        layer_pairs=200,
        epsilon_variant="as_written",
        resonance_wavelength=RUBIDIUM_87.resonance_wavelength,
        linewidth=RUBIDIUM_87.linewidth,
        atom_mass=RUBIDIUM_87.mass,
        number_density=RUBIDIUM_87.number_density,
    ):
        self.layer_pairs = layer_pairs
        self.epsilon_variant = epsilon_variant
        self.resonance_wavelength = resonance_wavelength
        self.linewidth = linewidth
        self.atom_mass = atom_mass
        self.number_density = number_density

    def fit(self, X=None, y=None):
        self.species_ = AtomSpecies(
            float(self.resonance_wavelength), float(self.linewidth),
            float(self.atom_mass), float(self.number_density),
        )
        self.stack_ = bragg.BraggStack(int(self.layer_pairs), self.epsilon_variant, self.species_)
        self.rescaled_density_ = self.species_.rescaled_density
        return self

    def spectrum(self, X):
        check_is_fitted(self)
        return bragg.reflectivity_spectrum(self.stack_, check_grid(X, "detunings"))

    def transform(self, X):
        """Columns ``[epsilon, n_b, R]``."""
        s = self.spectrum(X)
        return np.column_stack([s.epsilon, s.n_b, s.reflectivity])

    def predict(self, X):
        return self.spectrum(X).reflectivity

    def bandwidth(self, X, threshold=0.5):
        return bragg.reflective_bandwidth(self.spectrum(X), threshold)


class CarlSimulator(BaseEstimator):
    """CARL-BEC evolution of a slab-comb grating; ``predict`` interpolates I(t)/I_ref.

    ``seed`` chooses the initial reflected amplitude: ``"steady"`` starts at the
    quasi-steady value ``g N B(0) / (kappa - i delta)``, ``"zero"`` starts empty,
    and a number is used as a real amplitude directly.
    """

    def __init__(
        self,
        coupling=1.0,
        kappa=1e4,
        atom_count=1e6,
        wavelength=RUBIDIUM_87.resonance_wavelength,
        atom_mass=RUBIDIUM_87.mass,
        detuning=0.0,
        dt=2e-8,
        total_time=80e-6,
        points_per_period=64,
        n_periods=1,
        mode="coupled",
        sample_stride=50,
        n_max=2,
        smoothing_width=0.0,
        seed="steady",
    ):
        self.coupling = coupling
        self.kappa = kappa
        self.atom_count = atom_count
        self.wavelength = wavelength
        self.atom_mass = atom_mass
        self.detuning = detuning
        self.dt = dt
        self.total_time = total_time
        self.points_per_period = points_per_period
        self.n_periods = n_periods
        self.mode = mode
        self.sample_stride = sample_stride
        self.n_max = n_max
        self.smoothing_width = smoothing_width
        self.seed = seed

    def _params(self):
        return carl.CarlParams(
            coupling=float(self.coupling),
            kappa=float(self.kappa),
            atom_count=float(self.atom_count),
            wavenumber=2 * np.pi / check_positive(self.wavelength, "wavelength"),
            atom_mass=float(self.atom_mass),
            dt=float(self.dt),
            total_time=float(self.total_time),
            detuning=float(self.detuning),
            points_per_period=int(self.points_per_period),
            n_periods=int(self.n_periods),
            mode=self.mode,
            sample_stride=int(self.sample_stride),
            n_max=int(self.n_max),
        )

    def _seed_amplitude(self, params, field):
        if isinstance(self.seed, str):
            check_choice(self.seed, SEEDS, "seed")
            if self.seed == "zero" or params.mode == "adiabatic":
                return carl.FieldAmplitude(0j)
            return carl.FieldAmplitude(carl.steady_amplitude(params, field))
        return carl.FieldAmplitude(complex(float(self.seed)))

    def fit(self, X=None, y=None):
        self.params_ = self._params()
        self.initial_field_ = carl.init_grating(
            self.params_.points_per_period, self.params_.n_periods,
            self.params_.wavenumber, float(self.smoothing_width),
        )
        self.initial_amplitude_ = self._seed_amplitude(self.params_, self.initial_field_)
        self.trace_ = carl.evolve(self.params_, self.initial_field_, self.initial_amplitude_)
        return self

    def predict(self, X):
        """Normalised intensity at times ``X`` (s), linearly interpolated between samples."""
        check_is_fitted(self)
        t = check_grid(X, "times")
        tr = self.trace_
        if t.min() < tr.times[0] or t.max() > tr.times[-1]:
            raise ValueError("requested times lie outside the simulated interval")
        return np.interp(t, tr.times, tr.normalized_intensity)

    def convergence_ratio(self, total_time=None):
        check_is_fitted(self)
        params = self.params_ if total_time is None else replace(self.params_, total_time=float(total_time))
        return carl.convergence_ratio(params, self.initial_field_, self.initial_amplitude_)


class RecoilScenario(TransformerMixin, BaseEstimator):
    """Heralded momentum transfer from the macro-qubit to the mirror condensate.

    ``transform`` maps injected phases to ``[N'_+, N'_-, net_kick, drift_velocity]``.
    """

    def __init__(
        self,
        gain=6.0,
        band_hz=8e9,
        source_width_hz=350e9,
        mirror_reflectivity=1.0,
        atom_count=1e6,
        wavelength=RUBIDIUM_87.resonance_wavelength,
        atom_mass=RUBIDIUM_87.mass,
        first_order_fraction=0.01,
        width_fraction=0.1,
        decoherence_rate=6.4e3,
    ):
        self.gain = gain
        self.band_hz = band_hz
        self.source_width_hz = source_width_hz
        self.mirror_reflectivity = mirror_reflectivity
        self.atom_count = atom_count
        self.wavelength = wavelength
        self.atom_mass = atom_mass
        self.first_order_fraction = first_order_fraction
        self.width_fraction = width_fraction
        self.decoherence_rate = decoherence_rate

    def fit(self, X=None, y=None):
        check_positive(self.gain, "gain", strict=False)
        check_positive(self.atom_count, "atom_count")
        species = AtomSpecies(float(self.wavelength), 1.0, float(self.atom_mass), 1.0)
        self.recoil_velocity_ = carl.recoil_velocity(species)
        # photons inside the band per photon emitted
        self.band_fraction_ = bragg.active_photon_count(1.0, float(self.band_hz), float(self.source_width_hz))
        if not 0 <= self.mirror_reflectivity <= 1:
            raise ValueError(f"mirror_reflectivity must lie in [0, 1], got {self.mirror_reflectivity!r}")
        self.peak_model_ = scenario.default_peak_model(
            self.recoil_velocity_, float(self.first_order_fraction), float(self.width_fraction)
        )
        self.coherence_ = scenario.decoherence_window(float(self.decoherence_rate))
        return self

    def macrostate(self, phase, label=None):
        check_is_fitted(self)
        return scenario.macrostate(float(self.gain), phase, self.band_fraction_, label)

    def outcome(self, phase, label=None):
        state = self.macrostate(phase, label)
        return scenario.interact(
            scenario.split_macrostate(state), float(self.mirror_reflectivity),
            float(self.atom_count), self.recoil_velocity_, label=state.label,
        )

    def transform(self, X):
        rows = []
        for phase in check_grid(X, "phases"):
            state = self.macrostate(phase)
            out = self.outcome(phase)
            rows.append([state.active_plus, state.active_minus, out.net_kick, out.drift_velocity])
        return np.array(rows)

    def correlation_table(self, bases=("plus_minus", "LR")):
        check_is_fitted(self)
        return scenario.correlation_table(
            float(self.gain), bases, float(self.mirror_reflectivity),
            float(self.atom_count), self.band_fraction_, self.recoil_velocity_,
        )

    def profiles(self, phase=0.0):
        """Momentum-peak models ``(before, after)`` for the macro-qubit of ``phase``."""
        return scenario.momentum_transfer_profile(
            self.macrostate(phase), self.peak_model_,
            float(self.mirror_reflectivity), float(self.atom_count),
        )
