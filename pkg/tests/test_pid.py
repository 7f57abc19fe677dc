import math

import numpy as np
import pytest

from maglev.controllers.pid import (
    PidControllerSpec,
    PidController,
    PidGains,
    PidState,
    pid_step,
    zn_pid_gains,
    zn_ultimate_gain,
)
from maglev.core.numcore import Polynomial, TransferFunction, poly_roots
from maglev.exceptions import DomainError, NotTunableError

CUBIC = TransferFunction(Polynomial([1.0]), Polynomial.from_roots([-1.0, -1.0, -1.0]))


def _run(gains, errors, dt):
    state, out = PidState(), []
    for e in errors:
        u, state = pid_step(gains, state, e, dt)
        out.append(u)
    return np.array(out)


def test_pure_proportional():
    u, _ = pid_step(PidGains(Kp=2.0), PidState(), 0.5, 0.01)
    assert u == 1.0


def test_zero_error_gives_zero_output():
    assert np.all(_run(PidGains(Kp=3.0, Ki=2.0, Kd=1.0), np.zeros(50), 0.01) == 0.0)


def test_trapezoid_integrates_constant_exactly():
    u = _run(PidGains(Ki=1.0), np.ones(10), 0.1)
    assert u[-1] == pytest.approx(1.0, abs=1e-9)


def test_linear_below_saturation():
    gains = PidGains(Kp=1.5, Ki=0.7, Kd=0.2, N=50.0)
    t = np.arange(200) * 0.01
    e = np.sin(3 * t) + 0.3 * np.cos(7 * t)
    np.testing.assert_allclose(_run(gains, 2.5 * e, 0.01), 2.5 * _run(gains, e, 0.01), atol=1e-9)


def test_derivative_is_filtered():
    gains = PidGains(Kd=1.0, N=10.0)
    u = _run(gains, [0.0, 1.0, 1.0, 1.0], 0.01)
    assert u[1] == pytest.approx(10.0 / 1.1)
    assert 0 < u[3] < u[2] < u[1]


def test_output_is_saturated_and_integral_frozen():
    gains = PidGains(Kp=1.0, Ki=10.0, u_max=2.0)
    state = PidState()
    for _ in range(100):
        u, state = pid_step(gains, state, 5.0, 0.01)
    assert u == 2.0
    assert state.integral == 0.0
    # integration resumes as soon as the error turns around
    u, state = pid_step(gains, state, -1.0, 0.01)
    assert u == pytest.approx(-1.0 + 10.0 * 0.01 * 0.5 * (-1.0 + 5.0))


def test_bounds_and_dt_validated():
    with pytest.raises(ValueError):
        PidGains(u_min=1.0, u_max=1.0)
    with pytest.raises(DomainError):
        pid_step(PidGains(), PidState(), 1.0, 0.0)


def test_controller_applies_output_sign():
    ctrl = PidController(PidControllerSpec(Kp=2.0, output_sign=-1))
    u, _ = ctrl.step(ctrl.initial_state(), 1.0, 0.25, 0.01)
    assert u == pytest.approx(-1.5)


def test_ultimate_gain_of_triple_pole():
    ku, tu = zn_ultimate_gain(CUBIC)
    assert ku == pytest.approx(8.0, abs=1e-4)
    assert tu == pytest.approx(2 * math.pi / math.sqrt(3), abs=1e-3)
    roots = poly_roots(CUBIC.closed_loop_characteristic(ku))
    crossing = roots[np.argmax(roots.real)]
    assert abs(crossing.real) < 1e-8
    assert abs(crossing.imag) == pytest.approx(math.sqrt(3), rel=1e-6)


def test_first_order_plant_is_not_tunable():
    with pytest.raises(NotTunableError):
        zn_ultimate_gain(TransferFunction.from_descending([1.0], [1.0, 1.0]))


def test_maglev_plant_is_not_tunable_with_proportional_gain():
    g = TransferFunction.from_descending([280.0], [1.0, 29.0, -3136.0, -90944.0])
    with pytest.raises(NotTunableError):
        zn_ultimate_gain(g)


def test_ultimate_gain_needs_strictly_proper_plant():
    with pytest.raises(DomainError):
        zn_ultimate_gain(TransferFunction.from_descending([1.0, 0.0], [1.0, 1.0]))


def test_classic_table():
    g = zn_pid_gains(8.0, 2.0)
    assert (g.Kp, g.Ki, g.Kd) == pytest.approx((4.8, 4.8, 1.2))
