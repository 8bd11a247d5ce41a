"""Negative-level differential operators, divided-power elements, Taylor
series, two-lift transition matrices, and the divided Frobenius on the PD
algebra.

Operators are kept in normal form: a dict from multi-indices l to Laurent
coefficients, meaning sum of c_l * D^<l> with coefficients on the left.
The single rewriting rule D^<k> f = sum_{k'+k''=k} C(k,k') D^<k'>(f) D^<k''>
makes products canonical.  A PDElement is a truncated divided-power series
sum of c_k * (tau/p^m)^[k].
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .arith import (RingCtx, factorial_val, int_val_p, multi_binom_int,
                    multi_factorial, pd_product_coeff)
from .laurent import ContextMismatch, FrobLift, LaurentPoly, frob_substitute


class TruncationOverflow(ValueError):
    pass


def _zero_idx(d):
    return (0,) * d


def multi_indices(d, degree):
    """All multi-indices in d variables with |l| = degree."""
    if d == 1:
        return [(degree,)]
    out = []
    for first in range(degree + 1):
        for rest in multi_indices(d - 1, degree - first):
            out.append((first,) + rest)
    return out


def multi_indices_upto(d, bound):
    out = []
    for s in range(bound + 1):
        out.extend(multi_indices(d, s))
    return out


@dataclass(frozen=True)
class DiffOp:
    """Normal-ordered element sum c_l * D^<l> of the level -m operator ring."""

    ctx: RingCtx
    d: int
    m: int
    terms: tuple  # sorted tuple of (multi-index, LaurentPoly), coeffs nonzero

    @staticmethod
    def from_dict(ctx, d, m, mapping):
        items = []
        for l, c in mapping.items():
            if c.ctx != ctx or c.d != d:
                raise ContextMismatch("operator coefficient in wrong ring")
            if not c.is_zero():
                items.append((tuple(l), c))
        items.sort(key=lambda t: t[0])
        return DiffOp(ctx, d, m, tuple(items))

    @staticmethod
    def zero(ctx, d, m):
        return DiffOp(ctx, d, m, ())

    @staticmethod
    def identity(ctx, d, m):
        return DiffOp.from_dict(ctx, d, m, {_zero_idx(d): LaurentPoly.one(ctx, d)})

    @staticmethod
    def partial(ctx, d, m, l, coeff=None):
        """The single operator c * D^<l>."""
        c = coeff if coeff is not None else LaurentPoly.one(ctx, d)
        return DiffOp.from_dict(ctx, d, m, {tuple(l): c})

    def as_dict(self):
        return dict(self.terms)

    def _chk(self, other):
        if (self.ctx, self.d, self.m) != (other.ctx, other.d, other.m):
            raise ContextMismatch("operators live in different rings")

    def __add__(self, other):
        self._chk(other)
        acc = dict(self.terms)
        for l, c in other.terms:
            acc[l] = acc[l] + c if l in acc else c
        return DiffOp.from_dict(self.ctx, self.d, self.m, acc)

    def __neg__(self):
        return DiffOp.from_dict(
            self.ctx, self.d, self.m, {l: -c for l, c in self.terms})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        return DiffOp.from_dict(
            self.ctx, self.d, self.m, {l: c * f for l, c in self.terms})


def _apply_single(l, f, m):
    """Action of the bare operator D^<l> at level -m on a Laurent polynomial:
    D^<l>(t^e) = l! * C(e,l) * p^{m|l|} * t^{e-l}, componentwise."""
    scale = multi_factorial(l) * f.ctx.p ** (m * sum(l))
    acc = {}
    for e, c in f.terms:
        coeff = c * scale * multi_binom_int(e, l)
        if coeff:
            e2 = tuple(a - b for a, b in zip(e, l))
            acc[e2] = acc.get(e2, 0) + coeff
    return LaurentPoly.from_dict(f.ctx, f.d, acc)


def op_apply(P, f):
    if P.ctx != f.ctx or P.d != f.d:
        raise ContextMismatch("operator and argument in different rings")
    out = LaurentPoly.zero(f.ctx, f.d)
    for l, c in P.terms:
        out = out + c * _apply_single(l, f, P.m)
    return out


def _sub_indices(l):
    """All multi-indices l' <= l componentwise."""
    ranges = [range(x + 1) for x in l]
    return list(itertools.product(*ranges))


def op_mul(P, Q):
    """Normal-ordered product, by the commutation rule
    D^<l> f = sum_{l'+l''=l} C(l,l') D^<l'>(f) D^<l''>."""
    P._chk(Q)
    acc = {}
    for l, c in P.terms:
        for k, c2 in Q.terms:
            for lp in _sub_indices(l):
                moved = _apply_single(lp, c2, P.m) * multi_binom_int(l, lp)
                if moved.is_zero():
                    continue
                idx = tuple(a - b + kk for a, b, kk in zip(l, lp, k))
                contrib = c * moved
                acc[idx] = acc[idx] + contrib if idx in acc else contrib
    return DiffOp.from_dict(P.ctx, P.d, P.m, acc)


def level_change(P, m_new):
    """rho_{-m',-m}: D^<l> at level -m maps to p^{(m-m')|l|} D^<l> at -m'."""
    if m_new > P.m:
        raise ValueError("level change only lowers m")
    p = P.ctx.p
    return DiffOp.from_dict(
        P.ctx, P.d, m_new,
        {l: c * p ** ((P.m - m_new) * sum(l)) for l, c in P.terms})


# -- divided-power elements ---------------------------------------------------


@dataclass(frozen=True)
class PDElement:
    """Truncated divided-power series sum c_k * (tau/p^m)^[k], |k| <= K."""

    ctx: RingCtx
    d: int
    m: int
    K: int
    terms: tuple  # sorted tuple of (multi-index, LaurentPoly)

    @staticmethod
    def from_dict(ctx, d, m, K, mapping, strict=True):
        items = []
        for k, c in mapping.items():
            if c.is_zero():
                continue
            if sum(k) > K:
                if strict:
                    raise TruncationOverflow(
                        f"index {k} exceeds truncation order {K}")
                continue
            items.append((tuple(k), c))
        items.sort(key=lambda t: t[0])
        return PDElement(ctx, d, m, K, tuple(items))

    @staticmethod
    def zero(ctx, d, m, K):
        return PDElement(ctx, d, m, K, ())

    @staticmethod
    def const(ctx, d, m, K, f):
        return PDElement.from_dict(ctx, d, m, K, {_zero_idx(d): f})

    @staticmethod
    def monomial(ctx, d, m, K, k, c=None):
        coeff = c if c is not None else LaurentPoly.one(ctx, d)
        return PDElement.from_dict(ctx, d, m, K, {tuple(k): coeff})

    def as_dict(self):
        return dict(self.terms)

    def coeff(self, k):
        for kk, c in self.terms:
            if kk == tuple(k):
                return c
        return LaurentPoly.zero(self.ctx, self.d)

    def is_zero(self):
        return not self.terms

    def order_zero_part(self):
        return self.coeff(_zero_idx(self.d))

    def _chk(self, other):
        if (self.ctx, self.d, self.m) != (other.ctx, other.d, other.m):
            raise ContextMismatch("PD elements live in different algebras")

    def __add__(self, other):
        self._chk(other)
        K = min(self.K, other.K)
        acc = {}
        for k, c in self.terms + other.terms:
            acc[k] = acc[k] + c if k in acc else c
        return PDElement.from_dict(self.ctx, self.d, self.m, K, acc)

    def __neg__(self):
        return PDElement(self.ctx, self.d, self.m, self.K,
                         tuple((k, -c) for k, c in self.terms))

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        acc = {k: c * f for k, c in self.terms}
        return PDElement.from_dict(self.ctx, self.d, self.m, self.K, acc,
                                   strict=False)

    def mul(self, other, strict=True):
        """PD product: x^[a] x^[b] = C(a+b,a) x^[a+b] on the generators."""
        self._chk(other)
        K = min(self.K, other.K)
        acc = {}
        for a, c1 in self.terms:
            for b, c2 in other.terms:
                k = tuple(x + y for x, y in zip(a, b))
                c = c1 * c2 * pd_product_coeff(a, b, self.ctx).value
                if c.is_zero():
                    continue
                if sum(k) > K:
                    if strict:
                        raise TruncationOverflow(
                            f"product index {k} exceeds order {K}")
                    continue
                acc[k] = acc[k] + c if k in acc else c
        return PDElement.from_dict(self.ctx, self.d, self.m, K, acc)


def _gamma_mono_coeff(k, q):
    """Integer c with gamma_q(x^[k]) = c * x^[kq], for a nonzero multi-index k:
    c = prod_i (k_i q)! / (k_i!)^q, divided by q!."""
    num = 1
    for ki in k:
        num *= math.factorial(ki * q) // (math.factorial(ki) ** q)
    c, r = divmod(num, math.factorial(q))
    if r:
        raise ArithmeticError("divided power coefficient is not integral")
    return c


def pd_gamma(x, q, strict=True):
    """The q-th divided power gamma_q(x) of a PD element with no order-0 term.

    Expands gamma_q of a sum by the composition rule
    gamma_q(u + v) = sum_{a+b=q} gamma_a(u) gamma_b(v).
    """
    if not x.order_zero_part().is_zero():
        raise ValueError("divided powers require a zero order-0 part")
    one = PDElement.const(x.ctx, x.d, x.m, x.K, LaurentPoly.one(x.ctx, x.d))

    def rec(terms, q):
        if q == 0:
            return one
        if not terms:
            return PDElement.zero(x.ctx, x.d, x.m, x.K)
        (k, c), rest = terms[0], terms[1:]
        out = PDElement.zero(x.ctx, x.d, x.m, x.K)
        for j in range(q + 1):
            tail = rec(rest, q - j)
            if tail.is_zero():
                continue
            kq = tuple(ki * j for ki in k)
            if sum(kq) > x.K:
                continue
            head = PDElement.monomial(
                x.ctx, x.d, x.m, x.K, kq, (c ** j) * _gamma_mono_coeff(k, j))
            out = out + head.mul(tail, strict=strict)
        return out

    return rec(list(x.terms), q)


# -- Taylor / stratification --------------------------------------------------


def taylor_series(C, e, K):
    """Order-K stratification of the vector e: the list, indexed by module
    basis, of PD coefficients of sum_k D^<k>(e) (x) (tau/p^m)^[k]."""
    if not C.is_integrable():
        raise ValueError("Taylor series requires an integrable connection")
    coeffs = [{} for _ in range(C.rank)]
    values = {_zero_idx(C.d): tuple(e)}
    for s in range(K + 1):
        if s:
            new = {}
            for k in multi_indices(C.d, s):
                i = next(ax for ax in range(C.d) if k[ax])
                prev = tuple(kk - (1 if ax == i else 0)
                             for ax, kk in enumerate(k))
                new[k] = C.theta_apply_dt(i + 1, values[prev])
            values = new
        for k, v in values.items():
            for b in range(C.rank):
                if not v[b].is_zero():
                    coeffs[b][k] = v[b]
    return [PDElement.from_dict(C.ctx, C.d, C.m, K, mp) for mp in coeffs]


def check_taylor_cocycle(C, e, K):
    """Comultiplication compatibility of the stratification: the coefficient
    of (tau)^[a] (x) (tau')^[b] computed by iterating the series must equal
    the delta-expansion coefficient D^<a+b>(e), for all |a|+|b| <= K."""
    for a in multi_indices_upto(C.d, K):
        va = C.theta_power_apply_dt(a, tuple(e))
        for b in multi_indices_upto(C.d, K - sum(a)):
            lhs = C.theta_power_apply_dt(b, va)
            ab = tuple(x + y for x, y in zip(a, b))
            rhs = C.theta_power_apply_dt(ab, tuple(e))
            if any(not (x - y).is_zero() for x, y in zip(lhs, rhs)):
                return False
    return True


def check_taylor_inverse(C, e, K):
    """The closed-form inverse e (x) 1 -> sum (-1)^{|l|} (tau)^[l] (x) D^<l>(e)
    composed with the series itself must give back e at order 0 and zero in
    every higher PD degree."""
    zero_vec = tuple(LaurentPoly.zero(C.ctx, C.d) for _ in range(C.rank))
    for k in multi_indices_upto(C.d, K):
        total = list(zero_vec)
        for a in _sub_indices(k):
            b = tuple(x - y for x, y in zip(k, a))
            sign = -1 if sum(a) % 2 else 1
            c = sign * pd_product_coeff(a, b, C.ctx).value
            v = C.theta_power_apply_dt(k, tuple(e))
            total = [tt + vv * c for tt, vv in zip(total, v)]
        target = list(e) if sum(k) == 0 else list(zero_vec)
        if any(not (x - y).is_zero() for x, y in zip(total, target)):
            return False
    return True


# -- two-lift transition isomorphism ------------------------------------------


def _gamma_int_poly(h, q, modulus, p, d):
    """gamma_q of an integer-coefficient Laurent dict h (inside the PD ideal),
    as an integer dict reduced mod modulus.  Exact: computes h^q then divides
    by q!, which must be exact for admissible h."""
    acc = {(0,) * d: 1}
    for _ in range(q):
        nxt = {}
        for e1, c1 in acc.items():
            for e2, c2 in h.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                nxt[e] = nxt.get(e, 0) + c1 * c2
        acc = nxt
    # divide by q!: only its p-part must divide exactly (the coefficients are
    # canonical representatives, so true integrality shows up mod p^n only in
    # the p-part); the unit part is inverted modulo p^n
    a = factorial_val(p, q)
    pa = p ** a
    unit = math.factorial(q) // pa
    uinv = pow(unit % modulus, -1, modulus)
    out = {}
    for e, c in acc.items():
        v, r = divmod(c, pa)
        if r:
            raise ArithmeticError(
                "transition series coefficient is not integral; lifts are "
                "too far apart for the divided-power evaluation")
        v = v * uinv % modulus
        if v:
            out[e] = v
    return out


def tau_transition(C, f, f_prime, max_degree=512):
    """Transition matrix T between the two level-raised pullbacks of C along
    the Frobenius lifts f and f_prime (which must agree mod p^n).

    The lifts are given at truncation p^{n+m} (one PD thickening per level),
    and T satisfies gauge(pullback_{f'}(C), T) = pullback_f(C).  The series is
    sum_k ((f*(t) - f'*(t))/p^m)^[k] * f'-substitution of D^<k>(e_j).
    """
    ctx, d, m, p = C.ctx, C.d, C.m, C.ctx.p
    n = ctx.n
    ctx_ext = RingCtx(p, n + m) if m else ctx
    for F in (f, f_prime):
        if F.ctx != ctx_ext or F.d != d:
            raise ContextMismatch(
                f"lifts must be given at truncation p^{n + m}")
    # h = (f*(t) - f'*(t)) / p^m on canonical integer lifts, reduced mod p^n
    pm = p ** m
    pn = p ** n
    hs = []
    for i in range(d):
        diff_poly = f.images()[i] - f_prime.images()[i]
        h = {}
        for e, c in diff_poly.int_terms().items():
            q, r = divmod(c, pm)
            if r:
                raise ValueError("lifts do not agree mod p^m")
            if c % pn:
                raise ValueError("lifts do not agree mod p^n")
            if q % pn:
                h[e] = q % pn
        hs.append(h)
    h_val = min((min(int_val_p(c, p) for c in h.values()) if h else n)
                for h in hs)
    images_n = [g.reduce_to(ctx) for g in f_prime.images()]
    basis = [C.basis_vector(j) for j in range(C.rank)]
    T = [[LaurentPoly.zero(ctx, d) for _ in range(C.rank)]
         for _ in range(C.rank)]
    values = {(0,) * d: basis}
    s = 0
    while True:
        alive = False
        for k, vecs in values.items():
            if all(x.is_zero() for v in vecs for x in v):
                continue
            alive = True
            # h^[k] = prod_i gamma_{k_i}(h_i), assembled exactly mod p^n
            hk = {(0,) * d: 1}
            for i, ki in enumerate(k):
                if ki:
                    gi = _gamma_int_poly(hs[i], ki, pn, p, d)
                    nxt = {}
                    for e1, c1 in hk.items():
                        for e2, c2 in gi.items():
                            e = tuple(a + b for a, b in zip(e1, e2))
                            nxt[e] = (nxt.get(e, 0) + c1 * c2) % pn
                    hk = {e: c for e, c in nxt.items() if c}
            hk_poly = LaurentPoly.from_dict(ctx, d, hk)
            for j, v in enumerate(vecs):
                if hk_poly.is_zero():
                    continue
                for b in range(C.rank):
                    if not v[b].is_zero():
                        T[b][j] = T[b][j] + hk_poly * v[b].substitute(images_n)
        # certified stopping: all degree-s operator values vanished, or the
        # valuation of every later divided power already exceeds n
        if not alive:
            break
        if h_val >= 1 and (p > 2 or h_val > 1):
            s_next = s + 1
            if h_val * s_next - (s_next - 1) // (p - 1) >= n:
                break
        s += 1
        if s > max_degree:
            raise ArithmeticError(
                "transition series did not terminate within the bound")
        new = {}
        for k in multi_indices(d, s):
            i = next(ax for ax in range(d) if k[ax])
            prev = tuple(kk - (1 if ax == i else 0) for ax, kk in enumerate(k))
            new[k] = [C.theta_apply_dt(i + 1, v) for v in values[prev]]
        values = new
    return T


def verify_tau(C, f, f_prime, T, level_raise_fn):
    """Check the gauge relation gauge(pullback_{f'}(C), T) = pullback_f(C)."""
    from .connection import gauge, mat_det
    ctx = C.ctx
    Ff = FrobLift(ctx, C.d, tuple(a.reduce_to(ctx) for a in f.a)) \
        if f.ctx != ctx else f
    Fp = FrobLift(ctx, C.d, tuple(a.reduce_to(ctx) for a in f_prime.a)) \
        if f_prime.ctx != ctx else f_prime
    Cf = level_raise_fn(C, Ff)
    Cfp = level_raise_fn(C, Fp)
    if not mat_det(T).is_unit():
        return False
    G = gauge(Cfp, T)
    return all((a - b).is_zero()
               for ga, gb in zip(G.theta, Cf.theta)
               for ra, rb in zip(ga, gb) for a, b in zip(ra, rb))


# -- divided Frobenius on the PD algebra --------------------------------------


def phi_star(x, F, K_out=None, a_order=None):
    """Image of a level -m PD element on the target chart under the divided
    Frobenius of the lift F, as a level -(m-1) PD element on the source.

    The generator image, obtained by expanding (t+tau)^p + p a(t+tau) minus
    the lift of t', is

      tau'_i/p^m  |->  (p-1)! p^{(m-1)(p-1)} (tau_i/p^{m-1})^[p]
                     + sum_{k=1}^{p-1} (C(p,k)/p) k! p^{(m-1)(k-1)} t_i^{p-k}
                                                   (tau_i/p^{m-1})^[k]
                     + sum_{k != 0} (k! del^[k] a_i) p^{(m-1)(|k|-1)}
                                                   (tau/p^{m-1})^[k].

    Order-0 coefficients pass through the lift substitution.
    """
    if x.m < 1:
        raise ValueError("divided Frobenius needs level m >= 1")
    ctx, d, p = x.ctx, x.d, x.ctx.p
    if F.ctx != ctx or F.d != d:
        raise ContextMismatch("lift in wrong ring")
    m = x.m
    K = K_out if K_out is not None else p * x.K
    a_bound = a_order if a_order is not None else K
    gen_images = []
    for i in range(d):
        mapping = {}
        ei = lambda k: tuple(k if ax == i else 0 for ax in range(d))
        top = math.factorial(p - 1) * p ** ((m - 1) * (p - 1))
        mapping[ei(p)] = LaurentPoly.const(ctx, d, top)
        for k in range(1, p):
            c = (math.comb(p, k) // p) * math.factorial(k) \
                * p ** ((m - 1) * (k - 1))
            mono = LaurentPoly.var(ctx, d, i + 1, p - k) * c
            mapping[ei(k)] = mapping.get(
                ei(k), LaurentPoly.zero(ctx, d)) + mono
        if not F.a[i].is_zero():
            for k in multi_indices_upto(d, a_bound):
                if sum(k) == 0:
                    continue
                der = F.a[i]
                for ax in range(d):
                    for _ in range(k[ax]):
                        der = der.partial(ax + 1)
                if der.is_zero():
                    continue
                c = p ** ((m - 1) * (sum(k) - 1))
                mapping[k] = mapping.get(
                    k, LaurentPoly.zero(ctx, d)) + der * c
        gen_images.append(
            PDElement.from_dict(ctx, d, m - 1, K, mapping, strict=False))
    out = PDElement.zero(ctx, d, m - 1, K)
    for k, c in x.terms:
        term = PDElement.const(ctx, d, m - 1, K, frob_substitute(c, F))
        for i, ki in enumerate(k):
            if ki:
                term = term.mul(pd_gamma(gen_images[i], ki, strict=False),
                                strict=False)
        out = out + term
    return out


# -- mod-p rank check for the divided Frobenius --------------------------------


def _poly1_mul(a, b, p):
    out = {}
    for e1, c1 in a.items():
        for e2, c2 in b.items():
            e = e1 + e2
            out[e] = (out.get(e, 0) + c1 * c2) % p
    return {e: c for e, c in out.items() if c}


def _poly1_sub(a, b, p):
    out = dict(a)
    for e, c in b.items():
        out[e] = (out.get(e, 0) - c) % p
    return {e: c for e, c in out.items() if c}


def _poly1_divexact(a, b, p):
    """Exact division in F_p[s]; raises if the remainder is nonzero."""
    if not a:
        return {}
    if not b:
        raise ZeroDivisionError("division by zero polynomial")
    db = max(b)
    lb_inv = pow(b[db], -1, p)
    rem = dict(a)
    quo = {}
    while rem:
        da = max(rem)
        if da < db:
            raise ArithmeticError("inexact polynomial division")
        e = da - db
        c = rem[da] * lb_inv % p
        quo[e] = c
        for eb, cb in b.items():
            k = eb + e
            rem[k] = (rem.get(k, 0) - c * cb) % p
            if not rem[k]:
                del rem[k]
    return quo


def _bareiss_det(M, p):
    """Fraction-free determinant of a matrix over F_p[s]."""
    k = len(M)
    M = [row[:] for row in M]
    sign = 1
    prev = {0: 1}
    for t in range(k - 1):
        if not M[t][t]:
            swap = next((i for i in range(t + 1, k) if M[i][t]), None)
            if swap is None:
                return {}
            M[t], M[swap] = M[swap], M[t]
            sign = -sign
        for i in range(t + 1, k):
            for j in range(t + 1, k):
                num = _poly1_sub(_poly1_mul(M[i][j], M[t][t], p),
                                 _poly1_mul(M[i][t], M[t][j], p), p)
                M[i][j] = _poly1_divexact(num, prev, p)
            M[i][t] = {}
        prev = M[t][t]
    det = M[k - 1][k - 1]
    if sign < 0:
        det = {e: (-c) % p for e, c in det.items()}
    return det


def phi_rank_check(p, d=1, L=1, a=None):
    """Freeness check for the mod-p divided Frobenius at PD truncation L.

    Target tiers are the divided generators y_l = tau^[p^l], l <= L; the
    images x_l of the source generators are gamma_{p^l} of the generator
    image, truncated to the same tiers.  Verifies that the p^{L+2} candidate
    monomials t^i * prod_l x_l^{e_l} (0 <= i, e_l < p) form a basis of the
    target over F_p[t^{p}, t^{-p}], by a fraction-free determinant: the map
    is then finite free of relative rank p per coordinate direction.
    """
    if d != 1:
        raise ValueError("rank check implemented on the 1-dimensional chart")
    ctx1 = RingCtx(p, 1)
    K = p ** (L + 1) - 1
    report = {"p": p, "d": d, "L": L, "matrix_size": p ** (L + 2),
              "relative_rank": p ** d}
    # generator image mod p at level 1 -> 0 (a-corrections optional)
    F = FrobLift(ctx1, 1, (a if a is not None else LaurentPoly.zero(ctx1, 1),))
    gen = PDElement.monomial(ctx1, 1, 1, 1, (1,))
    X = phi_star(gen, F, K_out=K, a_order=K)
    images = [pd_gamma(X, p ** l, strict=False) for l in range(L + 1)]
    # candidates t^i * prod x_l^{e_l}, expanded over the basis t^r tau^[c]
    size = p ** (L + 2)
    cols = []
    for idx in range(size):
        rem, i = divmod(idx, p)
        elt = PDElement.const(ctx1, 1, 0, K,
                              LaurentPoly.var(ctx1, 1, 1, i) if i
                              else LaurentPoly.one(ctx1, 1))
        for l in range(L + 1):
            rem, e = divmod(rem, p)
            for _ in range(e):
                elt = elt.mul(images[l], strict=False)
        cols.append(elt)
    # matrix over F_p[s], s = t^p; row index (r, c) with r in [0,p), c <= K
    rows = {}
    for j, elt in enumerate(cols):
        for (c,), poly in elt.terms:
            for (e,), coeff in poly.terms:
                r = e % p
                s_exp = (e - r) // p
                rows.setdefault((r, c), [{} for _ in range(size)])
                rows[(r, c)][j][s_exp] = coeff
    keys = sorted(rows)
    if len(keys) != size:
        report["det_is_unit_monomial"] = False
        report["pass"] = False
        return report
    M = [rows[key] for key in keys]
    # shift every column to polynomial support (changes det by a monomial)
    for j in range(size):
        exps = [e for i in range(size) for e in M[i][j]]
        shift = min(exps) if exps else 0
        if shift:
            for i in range(size):
                M[i][j] = {e - shift: c for e, c in M[i][j].items()}
    det = _bareiss_det(M, p)
    report["det_is_unit_monomial"] = len(det) == 1
    report["pass"] = len(det) == 1
    return report
