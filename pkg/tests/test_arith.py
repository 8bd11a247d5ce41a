import math

import pytest
from hypothesis import given, strategies as st

from pmconn.arith import (RingCtx, ModularInt, val_p, int_val_p,
                          factorial_val, binom_int, binom,
                          pd_product_coeff, multi_factorial,
                          multi_binom_int, is_prime)

primes = st.sampled_from([2, 3, 5, 7])
ctxs = st.builds(RingCtx, primes, st.integers(min_value=1, max_value=5))


def test_ring_ctx_rejects_composite():
    with pytest.raises(ValueError):
        RingCtx(6, 2)
    with pytest.raises(ValueError):
        RingCtx(3, 0)


@given(ctxs, st.integers(), st.integers())
def test_modular_ring_laws(ctx, a, b):
    x, y = ctx.elt(a), ctx.elt(b)
    assert x + y == y + x
    assert x * y == y * x
    assert (x + y).lift() == (a + b) % ctx.modulus
    assert (x * y).lift() == (a * b) % ctx.modulus
    assert x + (-x) == ctx.zero()


@given(ctxs, st.integers())
def test_unit_inverse(ctx, a):
    x = ctx.elt(a)
    if x.is_unit():
        assert x * x.inverse() == ctx.one()
    else:
        assert a % ctx.p == 0


@given(ctxs, st.integers())
def test_val_p_matches_int_val(ctx, a):
    x = ctx.elt(a)
    v = val_p(x)
    if x.lift() == 0:
        assert v == ctx.n
    else:
        assert v == int_val_p(x.lift(), ctx.p)
        assert x.lift() % ctx.p ** v == 0
        assert x.lift() % ctx.p ** (v + 1) != 0


@given(primes, st.integers(min_value=0, max_value=400))
def test_factorial_val_legendre(p, k):
    # oracle: count factors of p in k! directly
    want = int_val_p(math.factorial(k), p) if k > 1 else 0
    assert factorial_val(p, k) == want


@given(st.integers(min_value=-30, max_value=30),
       st.integers(min_value=0, max_value=10))
def test_binom_int_is_integral_and_matches_product(i, l):
    got = binom_int(i, l)
    num = 1
    for j in range(l):
        num *= i - j
    assert got * math.factorial(l) == num


def test_binom_reduces_mod_ctx():
    ctx = RingCtx(3, 2)
    assert binom(-1, 2, ctx) == ctx.elt(1)
    assert binom(7, 3, ctx) == ctx.elt(35)


@given(st.integers(min_value=0, max_value=8),
       st.integers(min_value=0, max_value=8))
def test_pd_product_coeff_is_binomial(a, b):
    # x^[a] x^[b] = C(a+b, a) x^[a+b]
    ctx = RingCtx(5, 4)
    assert pd_product_coeff((a,), (b,), ctx) == \
        ctx.elt(math.comb(a + b, a))


def test_multi_index_helpers():
    assert multi_factorial((2, 3)) == 2 * 6
    assert multi_binom_int((3, 2), (1, 2)) == 3 * 1
    assert is_prime(2) and is_prime(97) and not is_prime(91)
