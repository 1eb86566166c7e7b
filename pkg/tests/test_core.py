from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from backreaction.core import (DegenerateDirectionError, ElasticParams, FieldParams,
                               GaussianRational, I_EXACT, Polynomial, cross_map, is_integral,
                               perpendicular_projector, project_parallel_perp, relative_close,
                               to_fraction, vec3)

finite = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
vectors = st.tuples(finite, finite, finite)
nonzero_vectors = vectors.filter(lambda v: np.linalg.norm(v) > 1e-3)
ints = st.integers(min_value=-50, max_value=50)
int_polys = st.lists(ints, max_size=8).map(Polynomial)


def test_vec3_rejects_bad_input():
    with pytest.raises(ValueError):
        vec3((1.0, 2.0))
    with pytest.raises(ValueError):
        vec3((1.0, float("nan"), 0.0))
    v = vec3([1, 2, 3])
    assert not v.flags.writeable


def test_cross_map_right_hand_rule():
    B = cross_map((0, 0, 1))
    np.testing.assert_array_equal(B @ [1, 0, 0], [0, -1, 0])
    np.testing.assert_array_equal(cross_map((0, 0, 0)), np.zeros((3, 3)))


@given(vectors, vectors)
def test_cross_map_is_cross_product(b, v):
    B = cross_map(b)
    np.testing.assert_allclose(B @ np.array(v), np.cross(v, b), rtol=1e-12, atol=1e-9)
    np.testing.assert_array_equal(B, -B.T)


@given(nonzero_vectors, vectors)
def test_projector_identities(b, v):
    B, P = cross_map(b), perpendicular_projector(b)
    b2 = float(np.dot(b, b))
    v = np.array(v)
    scale = (1 + np.linalg.norm(v)) * (1 + b2)
    Q = np.eye(3) - P
    assert np.linalg.norm(P @ P @ v - P @ v) <= 1e-12 * scale
    assert np.linalg.norm(Q @ B @ v) <= 1e-12 * scale
    assert np.linalg.norm(B @ P @ v - B @ v) <= 1e-12 * scale
    assert np.linalg.norm(P @ B @ v - B @ v) <= 1e-12 * scale
    assert np.linalg.norm(B @ B @ v + b2 * P @ v) <= 1e-12 * scale


def test_zero_field_projector_keeps_square_identity():
    assert np.all(perpendicular_projector((0, 0, 0)) == 0)


def test_linear_maps_compose_associatively():
    rng = np.random.default_rng(0)
    A, B, C = (rng.normal(size=(3, 3)) for _ in range(3))
    for v in rng.normal(size=(5, 3)):
        np.testing.assert_allclose((A @ B) @ C @ v, A @ (B @ (C @ v)), rtol=1e-12, atol=1e-12)
        np.testing.assert_array_equal(np.eye(3) @ A @ v, A @ v)


def test_project_parallel_perp_examples():
    par, perp = project_parallel_perp((1, 2, 3), (0, 0, 1))
    np.testing.assert_array_equal(par, [0, 0, 3])
    np.testing.assert_array_equal(perp, [1, 2, 0])
    par, perp = project_parallel_perp((0, 0, 2), (0, 0, 5))
    np.testing.assert_array_equal(perp, 0)
    par, perp = project_parallel_perp((1, 1, 0), (0, 0, 5))
    np.testing.assert_array_equal(par, 0)


@given(vectors, nonzero_vectors)
def test_projection_sums_back(v, b):
    par, perp = project_parallel_perp(v, b)
    np.testing.assert_allclose(par + perp, v, atol=1e-9)
    assert abs(np.dot(perp, b)) <= 1e-9 * (1 + np.linalg.norm(v)) * np.linalg.norm(b)
    assert np.linalg.norm(np.cross(par, b)) <= 1e-9 * (1 + np.linalg.norm(v)) * np.linalg.norm(b)


def test_project_zero_direction():
    with pytest.raises(DegenerateDirectionError, match="degenerate magnetic direction"):
        project_parallel_perp((1, 0, 0), (0, 0, 0))


def test_params_validation():
    with pytest.raises(ValueError):
        FieldParams(eta=0.0)
    with pytest.raises(ValueError):
        ElasticParams(omega=-1.0)
    p = FieldParams(e_vec=(1, 0, 0), b_vec=(0, 3, 4), eta=0.5)
    assert p.b == 5.0 and p.coupling == 2.5
    np.testing.assert_allclose(p.force((1, 0, 0)), [1, -4, 3])


def test_to_fraction_uses_decimal_value():
    assert to_fraction(0.1) == Fraction(1, 10)
    assert to_fraction(3) == 3


def test_gaussian_rational_arithmetic():
    z = GaussianRational(1, 2)
    assert z * I_EXACT == GaussianRational(-2, 1)
    assert (z / z) == 1
    assert z - z == 0
    assert complex(z.conjugate()) == 1 - 2j
    assert isinstance(z * 0.5, complex)


@given(int_polys, int_polys)
def test_integer_polynomials_stay_integral(p, q):
    for r in (p + q, p * q, p - q, p.deriv(), q.deriv(2)):
        assert is_integral(r)


@given(int_polys, ints)
def test_derivative_inverts_antiderivative(p, c):
    assert p.integ(c).deriv() == p
    assert p.integ(c)(0) == c


@given(int_polys, int_polys, st.integers(-5, 5))
def test_polynomial_evaluation_is_a_ring_map(p, q, t):
    assert (p * q)(t) == p(t) * q(t)
    assert (p + q)(t) == p(t) + q(t)


def test_polynomial_normal_form():
    assert Polynomial([1, 2, 0, 0]).degree == 1
    assert Polynomial([0, 0]).degree == -1
    assert Polynomial([1, 2])[5] == 0
    p = Polynomial([GaussianRational(1, 1), 2])
    np.testing.assert_allclose(p.evaluate_float(np.array([0.0, 1.0])), [1 + 1j, 3 + 1j])


def test_relative_close():
    assert relative_close(1.0, 1.0 + 1e-13, 1e-12)
    assert not relative_close(1.0, 1.1, 1e-3)
    assert relative_close(0.0, 0.0, 1e-12)
