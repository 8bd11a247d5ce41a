import pytest
from hypothesis import given, settings, strategies as st

from pmconn.arith import RingCtx
from pmconn.laurent import (LaurentPoly, FrobLift, frob_substitute,
                            parse_poly, format_poly, ContextMismatch,
                            NotAUnit)

ctxs = st.builds(RingCtx,
                 st.sampled_from([2, 3, 5]),
                 st.integers(min_value=1, max_value=4))


def polys(ctx, d, max_terms=4, deg=3):
    exp = st.tuples(*[st.integers(min_value=-deg, max_value=deg)
                      for _ in range(d)])
    return st.dictionaries(exp, st.integers(), max_size=max_terms).map(
        lambda t: LaurentPoly.from_dict(ctx, d, t))


@st.composite
def ctx_and_polys(draw, k=2, d=1):
    ctx = draw(ctxs)
    return (ctx,) + tuple(draw(polys(ctx, d)) for _ in range(k))


@given(ctx_and_polys(k=3))
def test_ring_laws(args):
    ctx, f, g, h = args
    assert f + g == g + f
    assert f * g == g * f
    assert (f + g) + h == f + (g + h)
    assert (f * g) * h == f * (g * h)
    assert f * (g + h) == f * g + f * h
    assert f - f == LaurentPoly.zero(ctx, 1)
    assert f * LaurentPoly.one(ctx, 1) == f


@given(ctx_and_polys(k=1))
def test_no_zero_terms_stored(args):
    ctx, f = args
    assert all(c != 0 for c in f.as_dict().values())
    assert (f * ctx.modulus).is_zero()


@given(ctx_and_polys(k=2))
def test_partial_leibniz(args):
    ctx, f, g = args
    # log derivative t d/dt is a derivation
    lhs = (f * g).log_partial(1)
    rhs = f.log_partial(1) * g + f * g.log_partial(1)
    assert lhs == rhs
    assert f.partial(1) * LaurentPoly.var(ctx, 1, 1) == f.log_partial(1)


@given(ctx_and_polys(k=1))
def test_unit_inversion(args):
    ctx, f = args
    u = f * ctx.p + LaurentPoly.monomial(ctx, 1, (2,), 1)
    assert u.is_unit()
    assert u * u.invert() == LaurentPoly.one(ctx, 1)


def test_non_unit_raises():
    ctx = RingCtx(3, 2)
    f = parse_poly("1+1*t1^1", ctx, 1)
    assert not f.is_unit()
    with pytest.raises(NotAUnit):
        f.invert()


@given(ctx_and_polys(k=1))
def test_parse_format_round_trip(args):
    ctx, f = args
    assert parse_poly(format_poly(f), ctx, 1) == f


def test_parse_examples():
    ctx = RingCtx(5, 2)
    f = parse_poly("3*t1^-1+5", ctx, 1)
    assert f.coeff((-1,)) == 3
    assert f.coeff((0,)) == 5
    assert format_poly(LaurentPoly.zero(ctx, 1)) == "0"


def test_context_mismatch_guard():
    a = LaurentPoly.one(RingCtx(3, 2), 1)
    b = LaurentPoly.one(RingCtx(3, 3), 1)
    with pytest.raises(ContextMismatch):
        a + b


@given(ctx_and_polys(k=1))
@settings(max_examples=40)
def test_substitute_composes_with_frobenius(args):
    ctx, f = args
    F = FrobLift.pure(ctx, 1)
    g = frob_substitute(f, F)
    # a=0 lift acts on exponents: t |-> t^p
    assert g.as_dict() == {(p_e[0] * ctx.p,): c
                           for p_e, c in f.as_dict().items()}


def test_frob_lift_images():
    ctx = RingCtx(3, 2)
    a = parse_poly("2*t1^-1", ctx, 1)
    F = FrobLift(ctx, 1, (a,))
    img = F.images()[0]
    assert img == parse_poly("1*t1^3+6*t1^-1", ctx, 1)
    assert not F.is_pure()
    assert FrobLift.pure(ctx, 1).is_pure()


def test_two_variable_substitute():
    ctx = RingCtx(2, 3)
    f = parse_poly("1*t1^1*t2^-2+3*t2^1", ctx, 2)
    t1 = LaurentPoly.var(ctx, 2, 1)
    t2 = LaurentPoly.var(ctx, 2, 2)
    swapped = f.substitute([t2, t1])
    assert swapped == parse_poly("1*t2^1*t1^-2+3*t1^1", ctx, 2)
