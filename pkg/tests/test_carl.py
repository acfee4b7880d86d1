from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mirrorbec import carl
from mirrorbec.errors import NumericalError
from mirrorbec.species import RUBIDIUM_87, recoil_energy

K = RUBIDIUM_87.wavenumber
M = RUBIDIUM_87.mass


def make_params(**kw):
    base = dict(coupling=1.0, kappa=1e4, atom_count=1e6, wavenumber=K, atom_mass=M,
                dt=2e-8, total_time=2e-6, points_per_period=64)
    base.update(kw)
    return carl.CarlParams(**base)


@pytest.mark.parametrize("ppp", [64, 128, 256, 100])
def test_slab_comb_bunching(ppp):
    f = carl.init_grating(ppp, 1, K)
    assert abs(carl.bunching_factor(f, K)) == pytest.approx(2 / np.pi, abs=1e-12)
    assert f.norm == pytest.approx(1.0, abs=1e-14)


def test_bunching_periodic_in_periods():
    f1 = carl.init_grating(64, 1, K)
    f3 = carl.init_grating(64, 3, K)
    assert carl.bunching_factor(f3, K) == pytest.approx(carl.bunching_factor(f1, K), abs=1e-12)


def test_uniform_condensate_has_no_bunching():
    psi = np.ones(64, dtype=complex)
    dx = (np.pi / K) / 64
    f = carl.CondensateField(psi / np.sqrt(np.sum(np.abs(psi) ** 2) * dx), dx, 64)
    assert abs(carl.bunching_factor(f, K)) < 1e-14


@pytest.mark.parametrize("ppp,rtol", [(64, 1e-3), (128, 3e-4), (512, 2e-5)])
def test_smoothed_grating_bunching(ppp, rtol):
    sharp = abs(carl.bunching_factor(carl.init_grating(ppp, 1, K), K))
    smooth = abs(carl.bunching_factor(carl.init_grating(ppp, 1, K, 0.0625), K))
    # a ramp of width w multiplies the first harmonic by sinc(k w); the cell
    # quadrature is exact only for piecewise-constant density, hence rtol
    w = 0.0625 * RUBIDIUM_87.resonance_wavelength
    assert smooth == pytest.approx(sharp * np.sinc(K * w / np.pi), rel=rtol)


def test_grating_too_coarse_for_smoothing():
    with pytest.raises(ValueError, match="coarse"):
        carl.init_grating(16, 1, K, 0.01)


def test_slab_comb_momentum_spectrum():
    spec = carl.momentum_spectrum(carl.init_grating(64, 1, K), 2)
    # |c_n|^2 of a half-duty square root comb
    assert spec.populations[2] == pytest.approx(0.5, abs=1e-12)
    assert spec.populations[1] == pytest.approx(spec.populations[3])
    assert spec.populations.sum() + spec.unbinned == pytest.approx(1.0)


def test_momentum_orders_must_not_alias():
    with pytest.raises(ValueError):
        carl.momentum_spectrum(carl.init_grating(16, 1, K), 8)


def test_norm_conserved_over_ten_thousand_steps():
    p = make_params(coupling=50.0, kappa=5e4, dt=1e-9, total_time=1e-5, sample_stride=1000)
    f = carl.init_grating(64, 1, K)
    tr = carl.evolve(p, f, carl.FieldAmplitude(carl.steady_amplitude(p, f)))
    assert p.n_steps == 10_000
    assert abs(tr.final_field.norm - 1.0) < 1e-8


def test_uncoupled_field_decays_exponentially():
    p = make_params(coupling=0.0, kappa=2e5, dt=1e-8, total_time=1e-5, sample_stride=10)
    tr = carl.evolve(p, carl.init_grating(64, 1, K), carl.FieldAmplitude(1.0))
    np.testing.assert_allclose(np.abs(tr.field_amplitude), np.exp(-2e5 * tr.times), rtol=0, atol=1e-6)


def test_free_evolution_preserves_momentum():
    p = make_params(coupling=0.0, dt=1e-7, total_time=2e-5, sample_stride=20)
    tr = carl.evolve(p, carl.init_grating(64, 1, K, 0.0625), carl.FieldAmplitude(0j))
    drift = np.max(np.abs(tr.momentum_populations - tr.momentum_populations[0]))
    assert drift < 1e-10


def test_free_evolution_dephases_grating():
    p = make_params(coupling=0.0, dt=1e-7, total_time=2e-5, sample_stride=20)
    tr = carl.evolve(p, carl.init_grating(64, 1, K), carl.FieldAmplitude(0j))
    assert tr.bunching[-1] < tr.bunching[0]


def test_second_order_convergence():
    p = make_params(coupling=200.0, kappa=5e5, dt=1e-6, total_time=2e-5, points_per_period=32)
    f = carl.init_grating(32, 1, K, 0.125)
    ratio, e1, e2 = carl.convergence_ratio(p, f, carl.FieldAmplitude(carl.steady_amplitude(p, f)))
    # 5 rather than 4 because dt/4 stands in for the exact solution
    assert 4 / 1.5 <= ratio <= 4 * 1.5
    assert e1 > e2 > 0


def test_adiabatic_tracks_stiff_coupled_run():
    p = make_params(kappa=2e7, dt=2e-9, total_time=1e-5, sample_stride=100)
    f = carl.init_grating(64, 1, K)
    coupled = carl.evolve(p, f, carl.FieldAmplitude(carl.steady_amplitude(p, f)))
    adiabatic = carl.evolve(replace(p, mode="adiabatic"), f)
    diff = np.max(np.abs(coupled.normalized_intensity - adiabatic.normalized_intensity))
    assert diff < 0.02


def test_zero_seed_reference_is_plateau():
    p = make_params(kappa=1e6, dt=1e-8, total_time=1e-5, sample_stride=5)
    tr = carl.evolve(p, carl.init_grating(64, 1, K), carl.FieldAmplitude(0j))
    assert tr.reference_time > 0
    assert tr.intensity[0] == 0


def test_detuned_steady_amplitude():
    p = make_params(kappa=0.0, detuning=1e5)
    f = carl.init_grating(64, 1, K)
    a = carl.steady_amplitude(p, f)
    assert a == pytest.approx(1j * p.coupling * p.atom_count * carl.bunching_factor(f, K) / 1e5)
    with pytest.raises(ValueError):
        carl.steady_amplitude(make_params(kappa=0.0), f)


def test_numerical_failure_is_reported():
    # a wildly large coupling drives the field to overflow
    p = make_params(coupling=1e200, kappa=0.0, dt=1e-6, total_time=1e-4)
    with pytest.raises(NumericalError):
        carl.evolve(p, carl.init_grating(64, 1, K), carl.FieldAmplitude(1.0))


def test_grid_mismatch_rejected():
    with pytest.raises(ValueError, match="grid"):
        carl.evolve(make_params(), carl.init_grating(32, 1, K))


@pytest.mark.parametrize("kw", [
    dict(mode="exact"), dict(points_per_period=8), dict(dt=0.0), dict(kappa=-1.0),
    dict(mode="adiabatic", kappa=0.0), dict(n_max=32),
])
def test_params_validation(kw):
    with pytest.raises(ValueError):
        make_params(**kw)


@given(level=st.floats(0.01, 0.99))
def test_crossing_interpolates(level):
    t = np.linspace(0, 1, 11)
    y = 1 - t
    tr = carl.EvolutionTrace(t, y, y, y, np.arange(1), y[:, None], 0 * y, 0.0, "coupled",
                             carl.init_grating(16, 1, K))
    assert tr.crossing_time(level) == pytest.approx(1 - level, abs=1e-12)


def test_recoil_numbers():
    assert carl.recoil_velocity(RUBIDIUM_87) == pytest.approx(5.886358035e-3, rel=1e-8)
    assert carl.two_photon_recoil_velocity(RUBIDIUM_87) == pytest.approx(2 * 5.886358035e-3, rel=1e-8)
    assert recoil_energy(RUBIDIUM_87) == pytest.approx(2.5002193120e-30, rel=1e-8)


def test_drift_velocity():
    v = carl.drift_velocity(2742.857142857143, 1e6, carl.recoil_velocity(RUBIDIUM_87))
    assert v == pytest.approx(1.6145e-5, rel=1e-3)
    with pytest.raises(ValueError):
        carl.drift_velocity(1.0, 0.0, 1.0)
