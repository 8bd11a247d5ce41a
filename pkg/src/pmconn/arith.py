"""Exact arithmetic in Z/p^nZ with integer lifts and p-adic valuations.

Everything downstream (Laurent coefficients, connection matrices, divided
power coefficients) is built on the two types here.  Values are immutable
and carry their ring context, so mixing moduli is a hard error instead of
a silent wrap-around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


def is_prime(p):
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class RingCtx:
    """The coefficient ring Z/p^nZ."""

    p: int
    n: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p = {self.p} is not prime")
        if self.n < 1:
            raise ValueError(f"n = {self.n} must be >= 1")

    @property
    def modulus(self):
        return self.p ** self.n

    def elt(self, value):
        return ModularInt(value % self.modulus, self)

    def zero(self):
        return self.elt(0)

    def one(self):
        return self.elt(1)


def _check_ctx(a, b):
    if a.ctx != b.ctx:
        raise ValueError(f"ring context mismatch: {a.ctx} vs {b.ctx}")


@dataclass(frozen=True)
class ModularInt:
    """Canonical representative in [0, p^n) of a residue mod p^n."""

    value: int
    ctx: RingCtx

    def __post_init__(self):
        if not 0 <= self.value < self.ctx.modulus:
            raise ValueError("representative out of range")

    def lift(self):
        """The canonical integer lift in [0, p^n)."""
        return self.value

    def __add__(self, other):
        _check_ctx(self, other)
        return self.ctx.elt(self.value + other.value)

    def __sub__(self, other):
        _check_ctx(self, other)
        return self.ctx.elt(self.value - other.value)

    def __neg__(self):
        return self.ctx.elt(-self.value)

    def __mul__(self, other):
        if isinstance(other, int):
            return self.ctx.elt(self.value * other)
        _check_ctx(self, other)
        return self.ctx.elt(self.value * other.value)

    __rmul__ = __mul__

    def __bool__(self):
        return self.value != 0

    def is_unit(self):
        return self.value % self.ctx.p != 0

    def inverse(self):
        if not self.is_unit():
            raise ZeroDivisionError(f"{self.value} is not a unit mod {self.ctx.p}^{self.ctx.n}")
        return self.ctx.elt(pow(self.value, -1, self.ctx.modulus))


def val_p(x):
    """Largest e <= n with p^e | lift(x); returns n for x = 0 by convention."""
    if isinstance(x, ModularInt):
        p, n, v = x.ctx.p, x.ctx.n, x.value
    else:
        raise TypeError("val_p expects a ModularInt")
    if v == 0:
        return n
    e = 0
    while v % p == 0:
        v //= p
        e += 1
    return min(e, n)


def int_val_p(v, p):
    """p-adic valuation of a nonzero integer (unbounded)."""
    if v == 0:
        raise ValueError("int_val_p(0) is infinite")
    e = 0
    while v % p == 0:
        v //= p
        e += 1
    return e


def factorial_val(p, k):
    """val_p(k!) by Legendre's formula: sum of floor(k/p^i)."""
    total = 0
    q = p
    while q <= k:
        total += k // q
        q *= p
    return total


def binom_int(i, l):
    """Integer value of the generalized binomial C(i, l) for i in Z, l >= 0.

    C(i, l) = i(i-1)...(i-l+1)/l!, which is an integer for every integer i.
    """
    if l < 0:
        raise ValueError("lower index must be a natural number")
    num = 1
    for j in range(l):
        num *= i - j
    return num // math.factorial(l)


def binom(i, l, ctx):
    """C(i, l) reduced mod p^n; i may be negative."""
    return ctx.elt(binom_int(i, l))


def pd_product_coeff(a, b, ctx):
    """Coefficient in x^[a] * x^[b] = C(a+b, a) x^[a+b], componentwise.

    a and b are multi-indices of equal length; the result is the product of
    the componentwise binomials C(a_i + b_i, a_i) mod p^n.
    """
    if len(a) != len(b):
        raise ValueError("multi-index length mismatch")
    c = 1
    for ai, bi in zip(a, b):
        c *= binom_int(ai + bi, ai)
    return ctx.elt(c)


@lru_cache(maxsize=None)
def multi_factorial(k):
    """k! for a multi-index: the product of componentwise factorials."""
    out = 1
    for ki in k:
        out *= math.factorial(ki)
    return out


def multi_binom_int(k, kp):
    """Componentwise product of binomials C(k_i, kp_i) as an integer."""
    out = 1
    for a, b in zip(k, kp):
        out *= binom_int(a, b)
    return out
