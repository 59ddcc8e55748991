import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ibepair.curve import (
    INFINITY,
    AffinePoint,
    CurveParams,
    enumerate_points,
    from_jacobian,
    is_on_curve,
    jacobian_add,
    jacobian_double,
    jacobian_equal,
    jacobian_scalar_mul,
    lift_x,
    map_to_point,
    mul,
    point_add,
    point_byte_len,
    point_double,
    point_from_bytes,
    point_to_bytes,
    random_generator,
    scalar_mul,
    to_jacobian,
)
from ibepair.entropy import SeededEntropy
from ibepair.errors import DegenerateHashError, ParameterError, PointError
from ibepair.field import Fp2Field, PrimeField

F11 = PrimeField(11)


def pt(x, y, F=F11):
    return AffinePoint(F(x), F(y))


def as_tuple(P):
    return None if P.is_infinity else (P.x.value, P.y.value)


def test_toy_point_count_is_twelve():
    pts = enumerate_points(F11)
    assert len(pts) == 12
    assert len(oracles.curve_points(11)) == 12


@pytest.mark.parametrize("p", [11, 59, 131])
def test_group_law_matches_brute_force_table(p):
    F = PrimeField(p)
    pts = enumerate_points(F)
    _, table = oracles.group_table(p)
    for P in pts:
        for Q in pts:
            assert as_tuple(point_add(P, Q)) == table[(as_tuple(P), as_tuple(Q))]


def test_toy_group_by_hand():
    assert point_add(pt(0, 1), pt(10, 0)) == pt(2, 8)
    assert point_double(pt(0, 1)) == pt(0, 10)
    assert scalar_mul(3, pt(0, 1)) is INFINITY
    assert point_double(pt(10, 0)) is INFINITY


def test_toy_point_orders():
    expected = {0: 3, 2: 6, 5: 4, 7: 12, 9: 12, 10: 2}
    for P in enumerate_points(F11)[1:]:
        n = next(k for k in range(1, 13) if scalar_mul(k, P).is_infinity)
        assert n == expected[P.x.value]


def test_toy_group_is_cyclic():
    assert any(all(not scalar_mul(k, P).is_infinity for k in range(1, 12))
               for P in enumerate_points(F11)[1:])


def test_add_rejects_points_off_curve():
    with pytest.raises(PointError):
        point_add(pt(1, 1), pt(0, 1))


def test_curve_params_validation():
    with pytest.raises(ParameterError):
        CurveParams(13, 7)
    with pytest.raises(ParameterError):
        CurveParams(11, 5)
    assert CurveParams(59, 5).cofactor == 12


@pytest.mark.parametrize("p", [11, 59])
def test_jacobian_matches_affine_exhaustively(p):
    F = PrimeField(p)
    pts = enumerate_points(F)
    for P in pts:
        assert from_jacobian(jacobian_double(to_jacobian(P))) == point_double(P)
        for Q in pts:
            assert from_jacobian(jacobian_add(to_jacobian(P), to_jacobian(Q))) == point_add(P, Q)


def test_mul_fast_path_matches_ladder_on_toy_curves():
    for p in (11, 59, 131):
        for P in enumerate_points(PrimeField(p)):
            for n in range(-2 * p, 2 * p):
                assert mul(n, P) == scalar_mul(n, P)


def test_mul_on_fp2_points_uses_generic_path():
    K = Fp2Field(F11)
    P = AffinePoint(K(0), K(1))
    assert mul(3, P).is_infinity
    assert mul(2, P) == AffinePoint(K(0), K(10))


def test_lift_and_map_to_point():
    params = CurveParams(11, 3)
    for y in F11.elements():
        assert is_on_curve(lift_x(y))
    # y = 1 lifts to (0, 1) of order 3; the cofactor 4 acts as 1 on it
    assert map_to_point(F11(1), params) == pt(0, 1)
    assert map_to_point(F11(10), params) == pt(0, 10)
    # y = 0 lifts to (10, 0) of order 2, killed by the cofactor
    with pytest.raises(DegenerateHashError):
        map_to_point(F11(0), params)


def test_random_generator_has_order_q(pkg512):
    params, _ = pkg512
    P = random_generator(params.curve, SeededEntropy(5))
    assert not P.is_infinity and mul(params.q, P).is_infinity
    assert random_generator(params.curve, SeededEntropy(5)) == P


def test_point_serialization_round_trip():
    for P in enumerate_points(F11):
        data = point_to_bytes(P)
        assert point_from_bytes(data, F11) == P
    assert point_to_bytes(pt(0, 10)) == bytes.fromhex("04000a")
    assert point_byte_len(F11) == 3


@pytest.mark.parametrize("data", [b"", b"\x04\x00", b"\x05\x00\x01", b"\x04\x00\x02", b"\x04\x0b\x00"])
def test_bad_point_encodings_rejected(data):
    with pytest.raises(PointError):
        point_from_bytes(data, F11)


def test_fp2_point_serialization():
    K = Fp2Field(F11)
    P = AffinePoint(K(3, 4), K(5, 6))
    data = point_to_bytes(P)
    assert len(data) == point_byte_len(K) == 5
    assert point_from_bytes(data, K, validate=False) == P


scalars = st.integers(min_value=-(2**170), max_value=2**170)


@given(scalars, scalars)
@settings(max_examples=15, deadline=None)
def test_scalar_mul_is_a_homomorphism(pkg256, a, b):
    params, _ = pkg256
    P = params.P
    assert point_add(mul(a, P), mul(b, P)) == mul(a + b, P)
    assert mul(a, mul(b, P)) == mul(a * b % params.q, P)


@given(scalars)
@settings(max_examples=10, deadline=None)
def test_jacobian_ladder_agrees_with_fast_mul(pkg256, n):
    params, _ = pkg256
    J = jacobian_scalar_mul(n, to_jacobian(params.P))
    assert jacobian_equal(J, to_jacobian(mul(n, params.P)))
