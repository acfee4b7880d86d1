import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mirrorbec import bragg
from mirrorbec.errors import EmptyBandError, SingularityError
from mirrorbec.species import AtomSpecies

# frozen from ((n^2N - 1) / (n^2N + 1))^2 evaluated with mpmath at 40 digits
FROZEN_R = [
    (1.001, 200, 0.038919113549527884),
    (1 + 1e-5, 200, 3.9999493339899125e-6),
    (1.05, 10, 0.20480096455882718),
]


@pytest.mark.parametrize("n_b,n_d,expected", FROZEN_R)
def test_reflectivity_frozen(n_b, n_d, expected):
    assert bragg.stack_reflectivity(n_b, n_d) == pytest.approx(expected, rel=1e-10)


def test_unit_index_is_transparent():
    assert bragg.stack_reflectivity(1.0, 200) == 0.0


@pytest.mark.parametrize("n_d", [2, 5, 10, 30, 100])
def test_small_contrast_law(n_d):
    eps = 0.03 / n_d
    r = bragg.stack_reflectivity(1 + eps, n_d)
    assert abs(r - (n_d * eps) ** 2) / r < 0.02


def test_huge_exponent_saturates():
    assert bragg.stack_reflectivity(2.0, 10**6) == 1.0


@given(n_b=st.floats(1.0, 1e6), n_d=st.integers(1, 10**5))
def test_reflectivity_bounded(n_b, n_d):
    r = bragg.stack_reflectivity(n_b, n_d)
    assert 0.0 <= r <= 1.0


@given(n_b=st.floats(1.0001, 3.0), n_d=st.integers(1, 400))
def test_reflectivity_grows_with_layers(n_b, n_d):
    assert bragg.stack_reflectivity(n_b, n_d + 1) >= bragg.stack_reflectivity(n_b, n_d)


def test_vectorised_sweep_in_unit_interval():
    rng = np.random.default_rng(7)
    n_b = 1 + rng.exponential(0.05, 100_000)
    n_d = rng.integers(1, 1000, 100_000)
    r = bragg.stack_reflectivity(n_b, n_d)
    assert np.all((r >= 0) & (r <= 1))


@pytest.mark.parametrize("bad", [0.5, np.nan, np.inf])
def test_reflectivity_rejects_bad_index(bad):
    with pytest.raises(ValueError):
        bragg.stack_reflectivity(bad, 10)


def test_as_written_singular_at_resonance(rb):
    with pytest.raises(SingularityError) as info:
        bragg.epsilon_contrast(rb, np.array([-1e6, 0.0, 1e6]))
    assert info.value.index == 1


def test_dispersive_peaks_at_half_linewidth(rb):
    d = np.linspace(0, 3 * rb.linewidth, 30001)
    eps = bragg.epsilon_contrast(rb, d, "dispersive")
    assert d[np.argmax(eps)] == pytest.approx(rb.linewidth / 2, rel=1e-3)
    assert bragg.epsilon_contrast(rb, 0.0, "dispersive") == 0.0


def test_variants_agree_at_linewidth(rb):
    # G / D and D / G coincide at D = G
    a = bragg.epsilon_contrast(rb, rb.linewidth, "as_written")
    b = bragg.epsilon_contrast(rb, rb.linewidth, "dispersive")
    assert a == pytest.approx(b)


def test_rescaled_density(rb):
    assert rb.rescaled_density == pytest.approx((780e-9 / (2 * np.pi)) ** 3 * 1e20)


def test_negative_contrast_uses_inverse_index(rb):
    stack = bragg.BraggStack(50, "dispersive", rb)
    s = bragg.reflectivity_spectrum(stack, np.array([-2e8, 2e8]))
    assert s.epsilon[0] < 0 < s.epsilon[1]
    assert s.reflectivity[0] == pytest.approx(bragg.stack_reflectivity(1 / s.n_b[0], 50))


def test_nonpositive_index_reported(rb):
    dense = AtomSpecies(rb.resonance_wavelength, rb.linewidth, rb.mass, 1e22)
    with pytest.raises(SingularityError) as info:
        bragg.reflectivity_spectrum(bragg.BraggStack(10, "dispersive", dense), np.array([1e9, -3e6]))
    assert info.value.index == 1


def _dispersive(n_d, rb, n=40001):
    return bragg.reflectivity_spectrum(bragg.BraggStack(n_d, "dispersive", rb), np.linspace(-2e10, 2e10, n))


def test_bandwidth_frozen(rb):
    # measured on a 40001-point grid; linear in the number of layer pairs
    assert bragg.reflective_bandwidth(_dispersive(200, rb)) == pytest.approx(2.4539e9, rel=1e-3)


def test_bandwidth_monotone_in_layers(rb):
    widths = [bragg.reflective_bandwidth(_dispersive(n, rb, 20001)) for n in (50, 100, 200)]
    assert widths[0] < widths[1] < widths[2]
    assert widths[2] / widths[0] == pytest.approx(4.0, rel=0.02)


def test_band_has_resonance_notch(rb):
    intervals = bragg.band_intervals(_dispersive(200, rb), 0.5)
    assert len(intervals) == 2
    assert intervals[0][1] < 0 < intervals[1][0]


def test_empty_band(rb):
    s = bragg.reflectivity_spectrum(bragg.BraggStack(1, "dispersive", rb), np.linspace(-1e10, 1e10, 101))
    with pytest.raises(EmptyBandError):
        bragg.reflective_bandwidth(s, 0.5)


def test_band_must_be_bracketed(rb):
    with pytest.raises(ValueError, match="bracket"):
        bragg.reflective_bandwidth(bragg.ReflectivitySpectrum(
            np.linspace(-1e8, 1e8, 5), np.ones(5), np.ones(5), np.full(5, 0.9), "dispersive", 200
        ))


def test_far_detuned_transparent(rb):
    s = bragg.reflectivity_spectrum(bragg.BraggStack(200, "dispersive", rb), np.array([-1e13, 1e13]))
    # R falls as 1 / detuning^2; 1e12 Hz still gives about 1.2e-6
    assert np.all(s.reflectivity < 1e-6)


@pytest.mark.parametrize("threshold", [0.0, 1.0, -0.1])
def test_threshold_bounds(rb, threshold):
    with pytest.raises(ValueError):
        bragg.band_intervals(_dispersive(50, rb, 1001), threshold)


def test_active_photons():
    assert bragg.active_photon_count(1.2e5, 8e9, 350e9) == pytest.approx(2742.857142857143, rel=1e-14)
    with pytest.raises(ValueError):
        bragg.active_photon_count(1.0, 400e9, 350e9)


def test_absorbed_photons_about_one():
    assert bragg.absorbed_photons(2742.857) == pytest.approx(2.742857)


@given(d=st.floats(-1e11, 1e11))
def test_wavelength_round_trip(d):
    lam = bragg.wavelength_from_detuning(d, 780e-9)
    assert bragg.detuning_from_wavelength(lam, 780e-9) == pytest.approx(d, abs=1e3)
