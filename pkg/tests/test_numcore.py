import numpy as np
import pytest

from maglev.core.numcore import (
    Polynomial,
    StateSpace,
    TransferFunction,
    format_complex,
    poly_mul,
    poly_roots,
    tf_to_statespace,
)
from maglev.exceptions import DomainError

PLANT_DEN = [1.0, 29.0, -3136.0, -90944.0]


def test_trailing_zeros_are_normalized():
    p = Polynomial([1.0, 2.0, 0.0, 0.0])
    assert p.degree == 1
    assert p.coefficients.tolist() == [1.0, 2.0]
    assert Polynomial([0.0, 0.0]).is_zero
    assert Polynomial.from_descending([0.0, 0.0, 3.0, 1.0]).descending().tolist() == [3.0, 1.0]


def test_coefficients_are_read_only():
    p = Polynomial([1.0, 2.0])
    with pytest.raises(ValueError):
        p.coefficients[0] = 5.0


def test_poly_mul_difference_of_squares():
    assert poly_mul(Polynomial([56.0, 1.0]), Polynomial([-56.0, 1.0])) == Polynomial([-3136.0, 0.0, 1.0])


def test_poly_mul_identity_factor():
    assert poly_mul(Polynomial([29.0, 1.0]), Polynomial([1.0])) == Polynomial([29.0, 1.0])


def test_poly_mul_plant_denominator():
    p = poly_mul(Polynomial([29.0, 1.0]), Polynomial([-3136.0, 0.0, 1.0]))
    assert p.descending().tolist() == PLANT_DEN


def test_poly_mul_commutative_and_associative():
    rng = np.random.default_rng(3)
    for _ in range(20):
        a, b, c = (Polynomial(rng.normal(size=rng.integers(1, 5))) for _ in range(3))
        np.testing.assert_allclose((a * b).coefficients, (b * a).coefficients, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(((a * b) * c).coefficients, (a * (b * c)).coefficients, rtol=1e-12, atol=1e-12)


def test_roots_of_difference_of_squares():
    np.testing.assert_allclose(poly_roots(Polynomial([-3136.0, 0.0, 1.0])), [-56.0, 56.0], atol=1e-9)


def test_roots_of_plant_denominator():
    roots = poly_roots(Polynomial.from_descending(PLANT_DEN))
    np.testing.assert_allclose(roots, [-56.0, -29.0, 56.0], atol=1e-9)
    assert np.all(roots.imag == 0.0)


def test_roots_of_s2_plus_1():
    roots = poly_roots(Polynomial([1.0, 0.0, 1.0]))
    np.testing.assert_allclose(roots, [-1j, 1j], atol=1e-12)


@pytest.mark.parametrize("coefficients", [[0.0], [3.0]])
def test_roots_reject_zero_and_constants(coefficients):
    with pytest.raises(DomainError):
        poly_roots(Polynomial(coefficients))


def test_planted_roots_are_recovered():
    rng = np.random.default_rng(11)
    for _ in range(50):
        n_real = int(rng.integers(0, 3))
        n_pairs = int(rng.integers(0, 3))
        if n_real + n_pairs == 0:
            n_real = 1
        planted = list(rng.uniform(-5, 5, n_real))
        for _ in range(n_pairs):
            z = complex(rng.uniform(-5, 5), rng.uniform(0.5, 5))
            planted += [z, z.conjugate()]
        p = Polynomial.from_roots(planted)
        got = poly_roots(p)
        want = np.sort_complex(np.asarray(planted, dtype=complex))
        np.testing.assert_allclose(np.sort_complex(got), want, atol=1e-6)


def test_format_complex_reports_reals_as_reals():
    assert format_complex(56.0 + 1e-12j) == "56"
    assert format_complex(-1.0 + 2.0j) == "-1+2j"
    assert format_complex(-1.0 - 2.0j) == "-1-2j"


def test_transfer_function_poles_and_closed_loop():
    g = TransferFunction.from_descending([1.0], [1.0, 1.0])
    np.testing.assert_allclose(g.poles(), [-1.0])
    assert g.closed_loop_characteristic(1.0).descending().tolist() == [1.0, 2.0]
    assert g.dc_gain() == pytest.approx(1.0)
    assert g.is_strictly_proper


def test_zero_denominator_rejected():
    with pytest.raises(DomainError):
        TransferFunction.from_descending([1.0], [0.0])


def test_realization_of_surrogate_plant():
    ss = tf_to_statespace(TransferFunction.from_descending([1.0], [1.0, 0.65]))
    assert ss.A.tolist() == [[-0.65]]
    assert ss.B.tolist() == [[1.0]]
    assert ss.C.tolist() == [[1.0]]
    assert ss.D.tolist() == [[0.0]]


def test_realization_of_reference_model():
    ss = tf_to_statespace(TransferFunction.from_descending([5.0], [1.0, 2.0]))
    assert ss.A.tolist() == [[-2.0]]
    assert float(ss.C @ ss.B) == pytest.approx(5.0)
    assert ss.D.tolist() == [[0.0]]


def test_realization_of_static_gain():
    ss = tf_to_statespace(TransferFunction.from_descending([4.0], [2.0]))
    assert ss.order == 0
    assert ss.D.tolist() == [[2.0]]


def test_improper_transfer_function_rejected():
    with pytest.raises(DomainError):
        tf_to_statespace(TransferFunction.from_descending([1.0, 0.0, 0.0], [1.0, 1.0]))


@pytest.mark.parametrize("num, den", [
    ([-280.0], PLANT_DEN),
    ([2.0, 3.0], [4.0, 1.0, 5.0]),
    ([1.0, 2.0, 3.0], [1.0, 4.0, 6.0]),
])
def test_realization_reads_back(num, den):
    g = TransferFunction.from_descending(num, den)
    ss = tf_to_statespace(g)
    lead = g.denominator.leading
    np.testing.assert_allclose(ss.characteristic_polynomial().coefficients,
                               g.denominator.coefficients / lead, atol=1e-9)
    back = ss.to_transfer_function()
    assert back.numerator.degree == g.numerator.degree
    np.testing.assert_allclose(back.numerator.coefficients, g.numerator.coefficients / lead, atol=1e-9)


def test_maglev_read_back_has_no_spurious_zeros():
    back = tf_to_statespace(TransferFunction.from_descending([-280.0], PLANT_DEN)).to_transfer_function()
    assert back.numerator.degree == 0
    assert back.zeros().size == 0
    assert back.numerator.coefficients[0] == pytest.approx(-280.0, rel=1e-9)


def test_trimmed_drops_only_small_leading_terms():
    p = Polynomial([-280.0, 0.0, 5.7e-14])
    assert p.trimmed(1e-6) == Polynomial([-280.0])
    assert p.trimmed(0.0) == p
    assert Polynomial([1e-12, 1e-13]).trimmed(1e-9).is_zero


def test_statespace_shape_checks():
    with pytest.raises(DomainError):
        StateSpace(np.eye(2), np.ones((3, 1)), np.ones((1, 2)), np.zeros((1, 1)))
