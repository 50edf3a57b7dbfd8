"""Closed-form moments of the jump-Gaussian weight e^(-x^2) (A + B theta(x^2 - a^2)).

The weight equals A e^(-x^2) on (-a, a) and (A+B) e^(-x^2) outside.  All odd
moments vanish by symmetry and are never stored.  Even moments are assembled
from two nonnegative building blocks so that no catastrophic cancellation can
occur for either sign of B:

    B >= 0:  mu_{2m} = A Gamma(m+1/2) + 2 B I_m(a)
    B <  0:  mu_{2m} = (A+B) Gamma(m+1/2) - 2 B J_m(a)

with I_m(a) the Gaussian tail integral over (a, inf) and J_m(a) its bulk
complement over (0, a).
"""

from __future__ import annotations

from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr

from . import hp
from .hp import HPReal, _ctx

DEFAULT_PREC = 256

#: guard bits used for internal moment arithmetic
_GUARD = 64


@dataclass(frozen=True)
class WeightParams:
    """The triple (A, B, a) plus precision policy defining the weight.

    ``A >= 0`` and ``A + B >= 0`` keep the weight nonnegative; a weight that
    vanishes identically (``A + B == 0`` together with ``A == 0`` or
    ``a == 0``) is rejected.  ``a == 0`` itself is accepted as the degenerate
    limit in which the jump collapses and the weight is (A+B) e^(-x^2).
    """

    A: HPReal
    B: HPReal
    a: HPReal
    prec: int = DEFAULT_PREC

    def __post_init__(self):
        if self.prec < hp.MIN_PREC:
            raise ValueError(f"prec must be at least {hp.MIN_PREC} bits")
        for name in ("A", "B", "a"):
            object.__setattr__(self, name, hp.hp(getattr(self, name), self.prec))
        if self.A < 0:
            raise ValueError("A must be nonnegative")
        if self.A + self.B < 0:
            raise ValueError("A + B must be nonnegative")
        if self.a < 0:
            raise ValueError("a must be nonnegative")
        zero_outside = self.A + self.B == 0
        if zero_outside and (self.A == 0 or self.a == 0):
            raise ValueError("weight is identically zero for these (A, B, a)")

    def replace(self, **kw) -> "WeightParams":
        fields = {"A": self.A, "B": self.B, "a": self.a, "prec": self.prec}
        fields.update(kw)
        return WeightParams(**fields)


@dataclass(frozen=True)
class MomentTable:
    """Even moments mu_{2m}, m = 0..max_order, of a weight configuration."""

    params: WeightParams
    max_order: int
    mu_even: tuple[HPReal, ...]

    def mu(self, k: int) -> HPReal:
        """Moment of order ``k``; odd orders are exactly zero."""
        if k < 0:
            raise ValueError("moment order must be nonnegative")
        if k % 2 == 1:
            return HPReal(0, self.params.prec)
        if k // 2 > self.max_order:
            raise ValueError(f"moment order {k} exceeds table range {2 * self.max_order}")
        return self.mu_even[k // 2]


def _tail_integrals(m_max: int, a: mpfr, prec: int) -> list[mpfr]:
    """I_m(a) = int_a^inf x^(2m) e^(-x^2) dx for m = 0..m_max.

    Upward recursion I_m = a^(2m-1) e^(-a^2)/2 + (2m-1)/2 I_{m-1}; every term
    is nonnegative, so the relative error stays at rounding level.
    """
    c = _ctx(prec)
    a = mpfr(a, prec)
    out = [c.div_2exp(c.mul(c.sqrt(gmpy2.const_pi(prec)),
                            hp.erfc_hp(HPReal(a), prec).value), 1)]
    if m_max == 0:
        return out
    ea2 = c.exp(c.minus(c.mul(a, a)))
    # a^(2m-1): start at a^1, multiply by a^2 each step
    apow = a
    asq = c.mul(a, a)
    for m in range(1, m_max + 1):
        t = c.div_2exp(c.mul(apow, ea2), 1)
        out.append(c.add(t, c.div_2exp(c.mul(out[-1], 2 * m - 1), 1)))
        apow = c.mul(apow, asq)
    return out


def _bulk_integral(m: int, a: mpfr, prec: int) -> mpfr:
    """J_m(a) = int_0^a x^(2m) e^(-x^2) dx, all-positive Kummer-type series.

    J_m = (a^(2m+1) e^(-a^2) / 2) * sum_k a^(2k) / ((m+1/2)(m+3/2)...(m+k+1/2)).
    """
    c = _ctx(prec)
    a = mpfr(a, prec)
    if a == 0:
        return mpfr(0, prec)
    z = c.mul(a, a)
    s = c.add(mpfr(m, prec), mpfr("0.5", prec))
    term = c.div(mpfr(1, prec), s)
    total = term
    tiny = c.div_2exp(mpfr(1, prec), prec + 4)
    k = 0
    while True:
        k += 1
        term = c.div(c.mul(term, z), c.add(s, k))
        total = c.add(total, term)
        if term < c.mul(total, tiny):
            break
    pref = c.mul(c.exp(c.minus(z)), c.pow(z, s))
    return c.div_2exp(c.mul(pref, total), 1)


def tail_integral(m: int, a, prec: int) -> HPReal:
    """I_m(a) = int_a^inf x^(2m) e^(-x^2) dx at ``prec`` bits."""
    if m < 0:
        raise ValueError("m must be nonnegative")
    a = hp.hp(a, prec) if isinstance(a, str) else hp.hp(a)
    work = prec + _GUARD
    return HPReal(_tail_integrals(m, a.value, work)[m], prec)


def _mu_even_raw(params: WeightParams, max_order: int, prec: int) -> list[mpfr]:
    c = _ctx(prec)
    A = mpfr(params.A.value, prec)
    B = mpfr(params.B.value, prec)
    a = mpfr(params.a.value, prec)
    gam = [c.sqrt(gmpy2.const_pi(prec))]
    for m in range(1, max_order + 1):
        gam.append(c.mul(gam[-1], c.sub(mpfr(m, prec), mpfr("0.5", prec))))
    out = []
    if B >= 0:
        tails = _tail_integrals(max_order, a, prec)
        for m in range(max_order + 1):
            out.append(c.add(c.mul(A, gam[m]), c.mul(c.mul_2exp(B, 1), tails[m])))
    else:
        AB = c.add(A, B)
        for m in range(max_order + 1):
            bulk = _bulk_integral(m, a, prec)
            out.append(c.sub(c.mul(AB, gam[m]), c.mul(c.mul_2exp(B, 1), bulk)))
    return out


def moment(k: int, params: WeightParams) -> HPReal:
    """Moment int x^k w(x; a) dx; exact zero for odd ``k``."""
    if k < 0:
        raise ValueError("moment order must be nonnegative")
    if k % 2 == 1:
        return HPReal(0, params.prec)
    m = k // 2
    return HPReal(_mu_even_raw(params, m, params.prec + _GUARD)[m], params.prec)


def build_table(params: WeightParams, max_order: int) -> MomentTable:
    """Tabulate mu_{2m} for m = 0..max_order at the params' precision."""
    if max_order < 1:
        raise ValueError("max_order must be at least 1")
    raw = _mu_even_raw(params, max_order, params.prec + _GUARD)
    mu = tuple(HPReal(v, params.prec) for v in raw)
    if not mu[0] > 0:
        raise ValueError("mu_0 must be positive for a valid weight")
    return MomentTable(params=params, max_order=max_order, mu_even=mu)
