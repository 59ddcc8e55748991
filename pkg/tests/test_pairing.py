import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from ibepair.curve import AffinePoint, CurveParams, enumerate_points, is_on_curve, mul
from ibepair.errors import MillerCollisionError, PointError
from ibepair.field import Fp2Field, PrimeField
from ibepair.pairing import (
    GtElement,
    PairingContext,
    apply_precomputed,
    distortion_map,
    final_exponentiation,
    miller_loop,
    precompute,
    tate_pairing,
)

TOYS = {11: 3, 59: 5, 131: 11}


def subgroup(p, q):
    F = PrimeField(p)
    return [P for P in enumerate_points(F) if mul(q, P).is_infinity]


def gt_tuple(g):
    return (g.value.a, g.value.b)


def tup(P):
    return None if P.is_infinity else (P.x.value, P.y.value)


@pytest.mark.parametrize("p", sorted(TOYS))
def test_pairing_matches_divisor_oracle_on_whole_subgroup(p):
    q = TOYS[p]
    ctx = PairingContext(CurveParams(p, q))
    for P in subgroup(p, q):
        for Q in subgroup(p, q):
            assert gt_tuple(tate_pairing(P, Q, ctx)) == oracles.pairing(tup(P), tup(Q), p, q)


def test_toy_11_pairing_is_degenerate():
    # the order-3 subgroup is {O, (0, 1), (0, 10)}; phi fixes x = 0 points,
    # so every self-pairing lands on 1 and so does every cross pairing
    ctx = PairingContext(CurveParams(11, 3))
    for P in subgroup(11, 3):
        for Q in subgroup(11, 3):
            assert tate_pairing(P, Q, ctx).is_one()


def test_toy_11_miller_value_vanishes_at_distorted_point():
    ctx = PairingContext(CurveParams(11, 3))
    F = PrimeField(11)
    P = AffinePoint(F(0), F(1))
    assert distortion_map(P, ctx) == AffinePoint(ctx.fp2(0), ctx.fp2(1))
    with pytest.raises(MillerCollisionError):
        miller_loop(P, distortion_map(P, ctx), 3)


@pytest.mark.parametrize("p", [59, 131])
def test_toy_pairing_is_non_degenerate_and_bilinear(p):
    q = TOYS[p]
    ctx = PairingContext(CurveParams(p, q))
    P = next(P for P in subgroup(p, q) if not P.is_infinity)
    g = tate_pairing(P, P, ctx)
    assert not g.is_one() and (g ** q).is_one()
    for a in range(q):
        for b in range(q):
            assert tate_pairing(mul(a, P), mul(b, P), ctx) == g ** (a * b % q)


def test_toy_59_self_pairing_value():
    ctx = PairingContext(CurveParams(59, 5))
    F = PrimeField(59)
    P = AffinePoint(F(18), F(13))
    assert gt_tuple(tate_pairing(P, P, ctx)) == (0x2A, 0x13)


@pytest.mark.parametrize("p", sorted(TOYS))
def test_variants_agree_exhaustively_on_toys(p):
    q = TOYS[p]
    ctx = PairingContext(CurveParams(p, q))
    for P in subgroup(p, q):
        table = precompute(P, ctx)
        for Q in subgroup(p, q):
            ref = tate_pairing(P, Q, ctx, coords="affine")
            assert tate_pairing(P, Q, ctx, coords="jacobian") == ref
            assert apply_precomputed(table, Q, ctx) == ref


def test_raw_miller_values_differ_only_by_fp_factor():
    ctx = PairingContext(CurveParams(131, 11))
    P, Q = [R for R in subgroup(131, 11) if not R.is_infinity][:2]
    Qd = distortion_map(Q, ctx)
    fa = miller_loop(P, Qd, 11, "affine")
    fj = miller_loop(P, Qd, 11, "jacobian")
    ratio = fa / fj
    assert ratio.b == 0
    assert final_exponentiation(fa, ctx) == final_exponentiation(fj, ctx)


def test_miller_loop_input_checks():
    ctx = PairingContext(CurveParams(59, 5))
    F = PrimeField(59)
    P = AffinePoint(F(18), F(13))
    with pytest.raises(ValueError):
        miller_loop(AffinePoint(), distortion_map(P, ctx), 5)
    with pytest.raises(TypeError):
        miller_loop(P, P, 5)
    with pytest.raises(ValueError):
        miller_loop(P, distortion_map(P, ctx), 5, coords="polar")
    with pytest.raises(ValueError):
        final_exponentiation(ctx.fp2.zero, ctx)


def test_pairing_with_infinity_is_one():
    ctx = PairingContext(CurveParams(59, 5))
    F = PrimeField(59)
    P = AffinePoint(F(18), F(13))
    assert tate_pairing(P, AffinePoint(), ctx).is_one()
    assert tate_pairing(AffinePoint(), P, ctx).is_one()


def test_pairing_rejects_off_curve_input():
    ctx = PairingContext(CurveParams(59, 5))
    F = PrimeField(59)
    with pytest.raises(PointError):
        tate_pairing(AffinePoint(F(1), F(1)), AffinePoint(F(18), F(13)), ctx)


def test_distortion_map_leaves_base_field(pkg256):
    params, _ = pkg256
    ctx = params.pairing
    Qd = distortion_map(params.P, ctx)
    assert is_on_curve(Qd)
    assert Qd.x.b != 0
    assert mul(params.q, Qd).is_infinity


def test_gt_inverse_is_conjugate(pkg256):
    params, _ = pkg256
    g = tate_pairing(params.P, params.P, params.pairing)
    assert (g * g.inverse()).is_one()
    assert g ** params.q == params.pairing.one


def test_gt_element_value_type():
    K = Fp2Field(PrimeField(11))
    assert GtElement(K.one).is_one()


@given(st.integers(min_value=1, max_value=2**160), st.integers(min_value=1, max_value=2**160))
@settings(max_examples=6, deadline=None)
def test_bilinearity_256(pkg256, a, b):
    params, _ = pkg256
    ctx, P = params.pairing, params.P
    g = tate_pairing(P, P, ctx)
    assert tate_pairing(mul(a, P), mul(b, P), ctx) == g ** (a * b % params.q)


@given(st.integers(min_value=1, max_value=2**160), st.integers(min_value=1, max_value=2**160))
@settings(max_examples=6, deadline=None)
def test_symmetry_and_variant_agreement_256(pkg256, a, b):
    params, _ = pkg256
    ctx = params.pairing
    P, Q = mul(a, params.P), mul(b, params.P)
    ref = tate_pairing(P, Q, ctx, coords="affine")
    assert ref == tate_pairing(Q, P, ctx)
    assert ref == tate_pairing(P, Q, ctx, coords="jacobian")
    assert ref == apply_precomputed(precompute(P, ctx), Q, ctx)
