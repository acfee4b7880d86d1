import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from mirrorbec import carl, scenario
from mirrorbec.errors import DepletionError
from mirrorbec.species import RUBIDIUM_87

V_R = carl.recoil_velocity(RUBIDIUM_87)
BAND = 8e9 / 350e9


def table(r=1.0, gain=6.0):
    rows = scenario.correlation_table(gain, ("plus_minus", "LR"), r, 1e6, BAND, V_R)
    return {row.outcome: row for row in rows}


def test_heralded_directions():
    rows = table()
    assert (rows["+"].macrostate, rows["+"].recoil_direction) == ("Phi+", "U")
    assert (rows["-"].macrostate, rows["-"].recoil_direction) == ("Phi-", "D")
    assert rows["L"].recoil_direction == rows["R"].recoil_direction == "superposed"
    assert rows["L"].net_kick == rows["R"].net_kick == 0.0


def test_swap_symmetry():
    rows = table()
    assert rows["+"].net_kick == -rows["-"].net_kick
    assert rows["+"].drift_velocity == rows["-"].drift_velocity


def test_frozen_active_photons():
    # N'_+ = (3m + 1) 8/350 and N'_- = m 8/350 with m = sinh^2 6
    m = np.sinh(6.0) ** 2
    state = scenario.macrostate(6.0, 0.0, BAND)
    assert state.active_plus == pytest.approx((3 * m + 1) * BAND, rel=1e-14)
    assert state.active_minus == pytest.approx(m * BAND, rel=1e-14)
    assert state.active_plus == pytest.approx(2790.07, rel=1e-6)
    assert table()["+"].drift_velocity == pytest.approx(1.0949e-5, rel=1e-4)


def test_zero_reflectivity_gives_no_kick():
    out = table(r=0.0)["+"]
    assert out.recoil_direction == "none" and out.net_kick == 0.0


@given(phase=st.floats(-7, 7), r=st.floats(0, 1), gain=st.floats(0, 6))
def test_photon_conservation(phase, r, gain):
    state = scenario.macrostate(gain, phase, BAND)
    out = scenario.interact(scenario.split_macrostate(state), r, 1e6, V_R)
    assert out.kick_u + out.transmitted_u == pytest.approx(state.active_plus, rel=1e-12, abs=1e-12)
    assert out.kick_d + out.transmitted_d == pytest.approx(state.active_minus, rel=1e-12, abs=1e-12)


@given(phase=st.floats(-7, 7), r=st.floats(0, 1), gain=st.floats(0, 6))
def test_kick_is_linear_in_fringe(phase, r, gain):
    book, closed = scenario.kick_difference(gain, phase, BAND, r)
    assert book == pytest.approx(closed, rel=1e-9, abs=1e-9 * (1 + np.sinh(gain) ** 2))


def test_kick_maximal_at_zero_phase():
    phases = np.linspace(-np.pi, np.pi, 721)
    kicks = [scenario.kick_difference(6.0, p, BAND, 1.0)[0] for p in phases]
    assert phases[int(np.argmax(kicks))] == 0.0


def test_split_roles():
    up, down = scenario.split_macrostate(scenario.macrostate(2.0, 0.0, 1.0))
    assert (up.mode, up.role, down.mode, down.role) == ("U", "phi", "D", "xi")
    up, down = scenario.split_macrostate(scenario.macrostate(2.0, np.pi / 2, 1.0))
    assert up.role == down.role == "balanced"


@pytest.mark.parametrize("phase", [0.0, np.pi / 3, np.pi / 2, np.pi])
def test_profile_population_conserved(phase):
    model = scenario.default_peak_model(V_R)
    before, after = scenario.momentum_transfer_profile(scenario.macrostate(6.0, phase, BAND), model, 1.0, 1e6)
    assert before.fractions.sum() == pytest.approx(1.0, abs=1e-12)
    assert after.fractions.sum() == pytest.approx(1.0, abs=1e-12)
    v = np.linspace(-4 * V_R, 4 * V_R, 8001)
    assert trapezoid(after.profile(v), v) == pytest.approx(1.0, abs=1e-9)


def test_asymmetry_exact():
    state = scenario.macrostate(6.0, 0.0, BAND)
    before, after = scenario.momentum_transfer_profile(state, scenario.default_peak_model(V_R), 0.8, 1e6)
    assert before.fraction(1) == before.fraction(-1) == 0.01
    want = 0.8 * (state.active_plus - state.active_minus) / 1e6
    # equal up to the round-off of adding transfers to the 1% peaks
    assert scenario.peak_asymmetry(after) == pytest.approx(want, rel=0, abs=4 * np.spacing(0.01))


def test_equatorial_profile_symmetric():
    _, after = scenario.momentum_transfer_profile(
        scenario.macrostate(6.0, np.pi / 2, BAND), scenario.default_peak_model(V_R), 1.0, 1e6
    )
    assert scenario.peak_asymmetry(after) == 0.0
    v = np.linspace(0, 3 * V_R, 101)
    np.testing.assert_allclose(after.profile(v), after.profile(-v), rtol=1e-12)


def test_depletion():
    with pytest.raises(DepletionError) as info:
        scenario.momentum_transfer_profile(
            scenario.macrostate(6.0, 0.0, BAND), scenario.default_peak_model(V_R), 1.0, 1e3
        )
    assert info.value.required > info.value.available


def test_peak_model_validation():
    with pytest.raises(ValueError):
        scenario.MomentumPeakModel([-1, 0, 1], [0.2, 0.2, 0.2], [1, 1, 1], 1.0)


def test_decoherence_window():
    w = scenario.decoherence_window(6.4e3)
    assert w.window == pytest.approx(156.25e-6)
    assert w.fraction(0.0) == 1.0
    assert w.fraction(w.window) == pytest.approx(np.exp(-1))
    with pytest.raises(ValueError):
        scenario.decoherence_window(0.0)


def test_band_fraction_bounds():
    with pytest.raises(ValueError):
        scenario.macrostate(1.0, 0.0, 1.5)
