import numpy as np
import pytest

from maglev.core.trace import SimTrace
from maglev.exceptions import DomainError


def make(t, **aux):
    t = np.asarray(t, dtype=float)
    zeros = np.zeros_like(t)
    return SimTrace(t, zeros, zeros, zeros, zeros, {k: np.asarray(v, dtype=float) for k, v in aux.items()})


def test_dt_is_taken_from_the_time_axis():
    assert make(np.arange(11) * 0.01).dt == pytest.approx(0.01)


def test_non_uniform_time_axis_rejected():
    with pytest.raises(DomainError, match="uniformly spaced"):
        make([0.0, 0.1, 0.2, 0.35, 0.4])


def test_explicit_dt_must_match_time_axis():
    t = np.arange(5) * 0.1
    zeros = np.zeros_like(t)
    with pytest.raises(DomainError, match="uniformly spaced"):
        SimTrace(t, zeros, zeros, zeros, zeros, dt=0.2)


def test_decreasing_time_axis_rejected():
    with pytest.raises(DomainError, match="strictly increasing"):
        make([0.0, 0.1, 0.1])


def test_channel_length_mismatch_rejected():
    with pytest.raises(DomainError, match="'z'"):
        make([0.0, 0.1, 0.2], z=[1.0, 2.0])


def test_truncated_keeps_aux_and_dt():
    t = np.arange(10) * 0.5
    part = make(t, z=t ** 2).truncated(4)
    assert len(part) == 4
    assert part.dt == 0.5
    assert part.channel_names() == ["t", "r", "e", "u", "y", "z"]
    np.testing.assert_array_equal(part.aux["z"], (t ** 2)[:4])


def test_unknown_channel():
    with pytest.raises(DomainError, match="no channel 'ym'"):
        make([0.0, 1.0]).channel("ym")
