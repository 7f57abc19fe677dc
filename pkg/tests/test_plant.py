import math

import numpy as np
import pytest

from maglev.controllers.base import OpenLoopSpec
from maglev.core.plant import (
    MaglevParams,
    MaglevState,
    equilibrium_current,
    inductance,
    linearize,
    linearize_statespace,
    linearized_gains,
    magnetic_force,
    maglev_derivatives,
    open_loop_unstable_pole,
    resolve_params,
    sensor_output,
)
from maglev.core.scenario import ConstantReference, LinearizedPlantSpec, NonlinearPlantSpec, Scenario
from maglev.core.sim import simulate
from maglev.exceptions import DomainError, GapCollapseError


def test_force_is_zero_without_current(nominal):
    assert magnetic_force(0.0, 0.06, nominal) == 0.0


def test_force_balances_weight_at_nominal_point(nominal):
    assert magnetic_force(1.0, 0.06, nominal) == pytest.approx(9.81, rel=1e-12)


def test_force_is_quadratic_in_current(nominal):
    assert magnetic_force(2.0, 0.06, nominal) / magnetic_force(1.0, 0.06, nominal) == pytest.approx(4.0)


@pytest.mark.parametrize("z", [0.0, -0.01])
def test_collapsed_gap_is_rejected(nominal, z):
    with pytest.raises(GapCollapseError):
        magnetic_force(1.0, z, nominal)
    with pytest.raises(GapCollapseError):
        maglev_derivatives(MaglevState(z, 0.0, 1.0), 0.0, nominal)


def test_force_monotone_in_current_and_gap(nominal):
    currents = np.linspace(0.1, 3.0, 30)
    gaps = np.linspace(0.01, 0.1, 30)
    assert np.all(np.diff([magnetic_force(i, 0.06, nominal) for i in currents]) > 0)
    assert np.all(np.diff([magnetic_force(1.0, z, nominal) for z in gaps]) < 0)


def test_equilibrium_current(nominal):
    assert equilibrium_current(nominal, 0.06) == pytest.approx(1.0, rel=1e-12)
    assert equilibrium_current(nominal, 0.12) == pytest.approx(2.0 * equilibrium_current(nominal, 0.06))
    stiffer = nominal.model_copy(update={"C": 4 * nominal.C})
    assert equilibrium_current(stiffer, 0.06) == pytest.approx(0.5 * equilibrium_current(nominal, 0.06))
    with pytest.raises(DomainError):
        equilibrium_current(nominal, 0.0)


def test_equilibrium_is_a_fixed_point(nominal):
    i_eq = equilibrium_current(nominal, 0.06)
    d = maglev_derivatives(MaglevState(0.06, 0.0, i_eq), nominal.R * i_eq, nominal)
    assert abs(d.z) < 1e-12 and abs(d.zdot) < 1e-12 and abs(d.i) < 1e-12


def test_free_fall_without_current(nominal):
    d = maglev_derivatives(MaglevState(0.06, 0.0, 0.0), 0.0, nominal)
    assert d.zdot == pytest.approx(nominal.g)


def test_voltage_above_equilibrium_raises_current(nominal):
    i_eq = equilibrium_current(nominal, 0.06)
    d = maglev_derivatives(MaglevState(0.06, 0.0, i_eq), 1.01 * nominal.R * i_eq, nominal)
    assert d.i > 0


def test_coil_uses_gap_dependent_inductance(nominal):
    assert inductance(0.06, nominal) == pytest.approx(nominal.L1 + 2 * nominal.C / 0.06)
    i_eq = equilibrium_current(nominal, 0.06)
    d = maglev_derivatives(MaglevState(0.06, 0.0, i_eq), nominal.R * i_eq + 1.0, nominal)
    assert d.i == pytest.approx(1.0 / inductance(0.06, nominal))


def test_motional_emf_only_acts_while_moving(nominal):
    p = nominal.model_copy(update={"motional_emf": True})
    i_eq = equilibrium_current(p, 0.06)
    still = maglev_derivatives(MaglevState(0.06, 0.0, i_eq), p.R * i_eq, p)
    moving = maglev_derivatives(MaglevState(0.06, 0.5, i_eq), p.R * i_eq, p)
    assert still.i == pytest.approx(0.0, abs=1e-12)
    assert moving.i > 0


def test_sensor_output():
    assert sensor_output(0.06, 100.0) == pytest.approx(6.0)
    assert sensor_output(0.0, 100.0) == 0.0
    assert sensor_output(0.042, 1.0) == 0.042


def test_matched_preset_reproduces_reference_plant(matched):
    gains, g = linearize(matched, matched.z0)
    np.testing.assert_allclose(g.denominator.descending(), [1.0, 29.0, -3136.0, -90944.0], rtol=1e-9)
    np.testing.assert_allclose(g.numerator.descending(), [-280.0], rtol=1e-9)
    np.testing.assert_allclose(g.poles(), [-56.0, -29.0, 56.0], atol=1e-6)
    assert equilibrium_current(matched, matched.z0) == pytest.approx(1.0)
    assert gains.Kz == pytest.approx(3136.0)


def test_nominal_preset_is_the_default():
    assert resolve_params() == MaglevParams()
    assert resolve_params("nominal", z0=0.061).z0 == 0.061
    with pytest.raises(ValueError):
        resolve_params("nominal", mass=2.0)


def test_params_must_be_positive():
    with pytest.raises(ValueError):
        MaglevParams(m=-1.0)


def test_sensor_gain_only_scales_numerator(nominal):
    _, g1 = linearize(nominal, 0.06)
    _, g2 = linearize(nominal.model_copy(update={"beta": 2 * nominal.beta}), 0.06)
    np.testing.assert_allclose(g2.numerator.coefficients, 2 * g1.numerator.coefficients)
    np.testing.assert_allclose(g2.poles(), g1.poles())


def test_gains_match_finite_differences(nominal):
    i_eq = equilibrium_current(nominal, 0.06)
    h = 1e-6
    k = linearized_gains(nominal, 0.06)
    dfdi = (magnetic_force(i_eq + h, 0.06, nominal) - magnetic_force(i_eq - h, 0.06, nominal)) / (2 * h)
    dfdz = (magnetic_force(i_eq, 0.06 + h, nominal) - magnetic_force(i_eq, 0.06 - h, nominal)) / (2 * h)
    assert dfdi == pytest.approx(k.Ki, rel=1e-6)
    assert -dfdz == pytest.approx(k.Kz, rel=1e-6)


def test_exactly_one_unstable_pole_for_random_params():
    rng = np.random.default_rng(5)
    for _ in range(25):
        p = MaglevParams(
            m=rng.uniform(0.5, 5), R=rng.uniform(1, 50), L1=rng.uniform(0.1, 2),
            C=rng.uniform(0.005, 0.1), beta=rng.uniform(10, 200), z0=rng.uniform(0.005, 0.1),
        )
        _, g = linearize(p, p.z0)
        poles = g.poles()
        unstable = poles[poles.real > 0]
        assert len(unstable) == 1
        assert unstable[0].real == pytest.approx(open_loop_unstable_pole(p, p.z0), rel=1e-8)
        assert unstable[0].real == pytest.approx(math.sqrt(linearized_gains(p, p.z0).Kz / p.m), rel=1e-8)


def test_statespace_model_matches_transfer_function(nominal):
    _, g = linearize(nominal, 0.06)
    back = linearize_statespace(nominal, 0.06).to_transfer_function()
    lead = g.denominator.leading
    np.testing.assert_allclose(back.denominator.coefficients, g.denominator.coefficients / lead, rtol=1e-7)
    np.testing.assert_allclose(back.numerator.coefficients[:1], g.numerator.coefficients[:1] / lead, rtol=1e-7)
    np.testing.assert_allclose(back.numerator.coefficients[1:], 0.0, atol=1e-6)


def _open_loop(plant, initial_state, horizon):
    return Scenario(plant=plant, controller=OpenLoopSpec(), reference=ConstantReference(),
                    dt=1e-4, horizon=horizon, initial_state=initial_state)


def test_nonlinear_and_linearized_models_agree_near_equilibrium():
    x0 = [1e-4, 0.0, 0.0]
    nonlinear = simulate(_open_loop(NonlinearPlantSpec(), x0, 0.05))
    linear = simulate(_open_loop(LinearizedPlantSpec(), x0, 0.05))
    scale = np.max(np.abs(linear.y))
    assert np.max(np.abs(nonlinear.y - linear.y)) < 0.02 * scale


def test_open_loop_equilibrium_holds_still():
    trace = simulate(_open_loop(NonlinearPlantSpec(), None, 0.5))
    assert np.max(np.abs(trace.aux["z"] - 0.06)) < 1e-9
