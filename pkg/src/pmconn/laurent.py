"""Sparse multivariate Laurent polynomials over Z/p^nZ.

This is the coordinate ring of the d-dimensional torus chart that the whole
package lives on.  Terms are a dict from exponent vectors (tuples in Z^d) to
nonzero coefficients stored as canonical integers in [0, p^n).  The dlog
basis convention for 1-forms lives in the connection module; here we provide
the two derivations (ordinary and logarithmic), unit inversion by a finite
geometric series, and substitution along a Frobenius lift t_i -> t_i^p + p a_i.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .arith import RingCtx, ModularInt


class ContextMismatch(ValueError):
    pass


class NotAUnit(ZeroDivisionError):
    pass


def _zero_exp(d):
    return (0,) * d


@dataclass(frozen=True)
class LaurentPoly:
    ctx: RingCtx
    d: int
    terms: tuple  # sorted tuple of (exponent tuple, int coefficient)

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_dict(ctx, d, mapping):
        mod = ctx.modulus
        items = []
        for e, c in mapping.items():
            c = int(c.value if isinstance(c, ModularInt) else c) % mod
            if c:
                if len(e) != d:
                    raise ValueError(f"exponent {e} has wrong arity for d={d}")
                items.append((tuple(e), c))
        items.sort()
        return LaurentPoly(ctx, d, tuple(items))

    @staticmethod
    def zero(ctx, d):
        return LaurentPoly(ctx, d, ())

    @staticmethod
    def const(ctx, d, c):
        return LaurentPoly.from_dict(ctx, d, {_zero_exp(d): c})

    @staticmethod
    def one(ctx, d):
        return LaurentPoly.const(ctx, d, 1)

    @staticmethod
    def monomial(ctx, d, e, c=1):
        return LaurentPoly.from_dict(ctx, d, {tuple(e): c})

    @staticmethod
    def var(ctx, d, i, power=1):
        """t_i^power with 1-based axis index i."""
        e = [0] * d
        e[i - 1] = power
        return LaurentPoly.monomial(ctx, d, e)

    # -- basic structure ---------------------------------------------------

    def as_dict(self):
        return dict(self.terms)

    def is_zero(self):
        return not self.terms

    def coeff(self, e):
        for ee, c in self.terms:
            if ee == tuple(e):
                return c
        return 0

    def support(self):
        return [e for e, _ in self.terms]

    def log_degree(self):
        """Max over terms of sum of |exponent| entries; 0 for the zero poly."""
        return max((sum(abs(x) for x in e) for e, _ in self.terms), default=0)

    def _chk(self, other):
        if self.ctx != other.ctx or self.d != other.d:
            raise ContextMismatch(
                f"({self.ctx}, d={self.d}) vs ({other.ctx}, d={other.d})")

    # -- ring operations ---------------------------------------------------

    def __add__(self, other):
        self._chk(other)
        acc = dict(self.terms)
        for e, c in other.terms:
            acc[e] = acc.get(e, 0) + c
        return LaurentPoly.from_dict(self.ctx, self.d, acc)

    def __neg__(self):
        return LaurentPoly.from_dict(
            self.ctx, self.d, {e: -c for e, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, ModularInt)):
            c = other.value if isinstance(other, ModularInt) else other
            return LaurentPoly.from_dict(
                self.ctx, self.d, {e: cc * c for e, cc in self.terms})
        self._chk(other)
        acc = {}
        for e1, c1 in self.terms:
            for e2, c2 in other.terms:
                e = tuple(a + b for a, b in zip(e1, e2))
                acc[e] = acc.get(e, 0) + c1 * c2
        return LaurentPoly.from_dict(self.ctx, self.d, acc)

    __rmul__ = __mul__

    def __pow__(self, k):
        if k < 0:
            return self.invert() ** (-k)
        out = LaurentPoly.one(self.ctx, self.d)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def is_unit(self):
        """Units of the Laurent ring mod p^n are c*t^e*(1 + p*u), c a unit."""
        red = [(e, c % self.ctx.p) for e, c in self.terms]
        red = [(e, c) for e, c in red if c]
        return len(red) == 1

    def invert(self):
        """Exact inverse of a unit, via geometric series truncated at n terms."""
        red = [(e, c) for e, c in self.terms if c % self.ctx.p]
        if len(red) != 1:
            raise NotAUnit(f"not a unit mod p: {self}")
        e0, c0 = red[0]
        lead_inv = LaurentPoly.monomial(
            self.ctx, self.d, tuple(-x for x in e0),
            pow(c0, -1, self.ctx.modulus))
        # self * lead_inv = 1 + u with u = 0 mod p, so the series stops at n.
        u = self * lead_inv - LaurentPoly.one(self.ctx, self.d)
        acc = LaurentPoly.one(self.ctx, self.d)
        pw = LaurentPoly.one(self.ctx, self.d)
        for _ in range(1, self.ctx.n):
            pw = pw * (-u)
            if pw.is_zero():
                break
            acc = acc + pw
        return lead_inv * acc

    # -- derivations -------------------------------------------------------

    def partial(self, i):
        """d/dt_i, 1-based axis: t^k -> k_i t^(k - e_i)."""
        if not 1 <= i <= self.d:
            raise ValueError(f"axis {i} out of range for d={self.d}")
        acc = {}
        for e, c in self.terms:
            if e[i - 1]:
                e2 = list(e)
                e2[i - 1] -= 1
                acc[tuple(e2)] = c * e[i - 1]
        return LaurentPoly.from_dict(self.ctx, self.d, acc)

    def log_partial(self, i):
        """t_i * d/dt_i: exponent-preserving, t^k -> k_i t^k."""
        if not 1 <= i <= self.d:
            raise ValueError(f"axis {i} out of range for d={self.d}")
        return LaurentPoly.from_dict(
            self.ctx, self.d, {e: c * e[i - 1] for e, c in self.terms})

    # -- context changes ---------------------------------------------------

    def reduce_to(self, new_ctx):
        """Reduce coefficients into Z/p^n' (n' <= n), or lift canonically."""
        if new_ctx.p != self.ctx.p:
            raise ContextMismatch("different primes")
        return LaurentPoly.from_dict(new_ctx, self.d, dict(self.terms))

    def int_terms(self):
        """Canonical integer-lift dict, for exact integer work."""
        return {e: c for e, c in self.terms}

    # -- substitution ------------------------------------------------------

    def substitute(self, images):
        """Ring map sending t_i to images[i-1]; images must be units when a
        negative exponent of t_i occurs."""
        if len(images) != self.d:
            raise ValueError("need one image per variable")
        cache = {}

        def ipow(i, k):
            key = (i, k)
            if key not in cache:
                if k >= 0:
                    cache[key] = images[i] ** k
                else:
                    cache[key] = images[i].invert() ** (-k)
            return cache[key]

        out = LaurentPoly.zero(self.ctx, self.d)
        for e, c in self.terms:
            term = LaurentPoly.const(self.ctx, self.d, c)
            for i, k in enumerate(e):
                if k:
                    term = term * ipow(i, k)
            out = out + term
        return out

    # -- text form ---------------------------------------------------------

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            factors = [str(c)]
            for i, k in enumerate(e):
                if k:
                    factors.append(f"t{i + 1}^{k}")
            parts.append("*".join(factors))
        return "+".join(parts)

    def __repr__(self):
        return f"LaurentPoly({self.ctx.p}^{self.ctx.n}, {self})"


@dataclass(frozen=True)
class FrobLift:
    """The ring endomorphism t_i -> t_i^p + p*a_i of the torus chart."""

    ctx: RingCtx
    d: int
    a: tuple  # d LaurentPoly correction terms

    def __post_init__(self):
        if len(self.a) != self.d:
            raise ValueError("need one correction term per variable")
        for ai in self.a:
            if ai.ctx != self.ctx or ai.d != self.d:
                raise ContextMismatch("correction term in wrong ring")

    @staticmethod
    def pure(ctx, d):
        """The coordinatewise p-th power lift (all a_i = 0)."""
        return FrobLift(ctx, d, tuple(LaurentPoly.zero(ctx, d) for _ in range(d)))

    def is_pure(self):
        return all(ai.is_zero() for ai in self.a)

    def images(self):
        p = self.ctx.p
        return [LaurentPoly.var(self.ctx, self.d, i + 1, p) + self.a[i] * p
                for i in range(self.d)]


def frob_substitute(f, F):
    """Image of f under the Frobenius lift endomorphism."""
    if f.ctx != F.ctx or f.d != F.d:
        raise ContextMismatch("poly and lift in different rings")
    return f.substitute(F.images())


# -- text grammar ------------------------------------------------------------

_TOKEN = re.compile(r"t\d+|\d+|[*^+-]")


def parse_poly(text, ctx, d):
    """Parse the CLI grammar: sum of terms c*t1^e1*...*td^ed.

    Whitespace is insignificant.  Coefficients and exponents are integers;
    both may be omitted (`t1` means 1*t1^1).  Example: `2*t1^-1+3`.
    """
    s = re.sub(r"\s+", "", text)
    if not s:
        raise ValueError("empty polynomial text")
    toks = _TOKEN.findall(s)
    if "".join(toks) != s:
        raise ValueError(f"cannot tokenize polynomial text: {text!r}")
    pos = 0

    def peek():
        return toks[pos] if pos < len(toks) else None

    acc = {}

    def read_int():
        nonlocal pos
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if toks[pos] == "-" else 1
            pos += 1
        if peek() is None or not peek().isdigit():
            raise ValueError(f"expected integer in {text!r}")
        v = sign * int(toks[pos])
        pos += 1
        return v

    while pos < len(toks):
        sign = 1
        if peek() in ("+", "-"):
            sign = -1 if toks[pos] == "-" else 1
            pos += 1
        coeff = 1
        exps = [0] * d
        saw_factor = False
        expect_factor = True
        while expect_factor:
            tok = peek()
            if tok is None:
                break
            if tok.isdigit():
                coeff *= int(tok)
                pos += 1
                saw_factor = True
            elif tok.startswith("t"):
                idx = int(tok[1:])
                if not 1 <= idx <= d:
                    raise ValueError(f"variable {tok} out of range for d={d}")
                pos += 1
                power = 1
                if peek() == "^":
                    pos += 1
                    power = read_int()
                exps[idx - 1] += power
                saw_factor = True
            else:
                raise ValueError(f"unexpected token {tok!r} in {text!r}")
            if peek() == "*":
                pos += 1
                expect_factor = True
            else:
                expect_factor = False
        if not saw_factor:
            raise ValueError(f"empty term in {text!r}")
        e = tuple(exps)
        acc[e] = acc.get(e, 0) + sign * coeff
    return LaurentPoly.from_dict(ctx, d, acc)


def format_poly(f):
    return str(f)
