"""Arbitrary-precision real scalars and the special functions the pipeline needs.

Values are MPFR binary floats (via gmpy2) wrapped in :class:`HPReal`, which
carries its mantissa size in bits explicitly.  Every operation is performed
through a cached context at an explicit precision -- there is no dependence on
gmpy2's thread-local default context.  The rounding mode is MPFR's default,
round-to-nearest with ties to even.

Binary operations between two ``HPReal`` values run at the larger of the two
precisions; plain ``int``/``float`` operands are treated as exact.
"""

from __future__ import annotations

import math

import gmpy2
from gmpy2 import mpfr

MIN_PREC = 64

# Relative-error guard of erfc_hp: result is within 2**(ERFC_GUARD - prec).
ERFC_GUARD = 8

_CTX_CACHE: dict[int, gmpy2.context] = {}


def _ctx(prec: int) -> gmpy2.context:
    ctx = _CTX_CACHE.get(prec)
    if ctx is None:
        ctx = gmpy2.context(precision=prec)
        _CTX_CACHE[prec] = ctx
    return ctx


def _default_prec(value) -> int:
    if isinstance(value, mpfr):
        return value.precision
    if isinstance(value, int):
        return max(MIN_PREC, value.bit_length() + 1)
    if isinstance(value, float):
        return MIN_PREC
    raise TypeError(f"cannot infer a precision for {type(value).__name__}")


class HPReal:
    """An arbitrary-precision binary float with an explicit precision in bits.

    Parameters
    ----------
    value : HPReal, mpfr, int, float or str
        Initial value.  Decimal strings are parsed directly at the target
        precision (one correctly-rounded conversion, no float round-trip),
        and therefore require ``prec``.
    prec : int, optional
        Mantissa size in bits, at least 64.  Defaults to the precision of
        ``value`` (mpfr/HPReal) or to a size that represents int/float
        operands exactly.
    """

    __slots__ = ("_v",)

    def __init__(self, value, prec: int | None = None):
        if isinstance(value, HPReal):
            value = value._v
        if isinstance(value, str):
            if prec is None:
                raise ValueError("parsing a decimal string requires an explicit prec")
            self._v = mpfr(value, prec)
            return
        if prec is None:
            prec = _default_prec(value)
        if prec < MIN_PREC:
            raise ValueError(f"precision must be >= {MIN_PREC} bits, got {prec}")
        self._v = mpfr(value, prec) if not isinstance(value, mpfr) or value.precision != prec \
            else value

    @property
    def value(self) -> mpfr:
        """The underlying MPFR float."""
        return self._v

    @property
    def precision(self) -> int:
        """Mantissa size in bits."""
        return self._v.precision

    # -- arithmetic ---------------------------------------------------------

    @staticmethod
    def _operand(other):
        """Return (raw operand, its precision contribution) or None."""
        if isinstance(other, HPReal):
            return other._v, other._v.precision
        if isinstance(other, (int, float)):
            return other, 0
        return None

    def _binary(self, other, name, reflected=False):
        op = self._operand(other)
        if op is None:
            return NotImplemented
        raw, oprec = op
        c = _ctx(max(self._v.precision, oprec))
        fn = getattr(c, name)
        res = fn(raw, self._v) if reflected else fn(self._v, raw)
        return HPReal(res)

    def __add__(self, other):
        return self._binary(other, "add")

    __radd__ = __add__

    def __sub__(self, other):
        return self._binary(other, "sub")

    def __rsub__(self, other):
        return self._binary(other, "sub", reflected=True)

    def __mul__(self, other):
        return self._binary(other, "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self._binary(other, "div")

    def __rtruediv__(self, other):
        return self._binary(other, "div", reflected=True)

    def __pow__(self, other):
        return self._binary(other, "pow")

    def __rpow__(self, other):
        return self._binary(other, "pow", reflected=True)

    def __neg__(self):
        return HPReal(_ctx(self._v.precision).minus(self._v))

    def __pos__(self):
        return self

    def __abs__(self):
        return HPReal(_ctx(self._v.precision).abs(self._v))

    # -- comparisons (exact, precision-independent) --------------------------

    def _cmp_other(self, other):
        if isinstance(other, HPReal):
            return other._v
        if isinstance(other, (int, float, mpfr)):
            return other
        return None

    def __eq__(self, other):
        o = self._cmp_other(other)
        return NotImplemented if o is None else self._v == o

    def __lt__(self, other):
        o = self._cmp_other(other)
        return NotImplemented if o is None else self._v < o

    def __le__(self, other):
        o = self._cmp_other(other)
        return NotImplemented if o is None else self._v <= o

    def __gt__(self, other):
        o = self._cmp_other(other)
        return NotImplemented if o is None else self._v > o

    def __ge__(self, other):
        o = self._cmp_other(other)
        return NotImplemented if o is None else self._v >= o

    def __hash__(self):
        return hash(self._v)

    def __bool__(self):
        return bool(self._v)

    def __float__(self):
        return float(self._v)

    def __int__(self):
        # Python convention: truncate toward zero (gmpy2's int() rounds)
        return int(_ctx(self._v.precision).trunc(self._v))

    def is_nan(self) -> bool:
        return gmpy2.is_nan(self._v)

    def is_finite(self) -> bool:
        return gmpy2.is_finite(self._v)

    def __str__(self):
        return to_decimal(self)

    def __repr__(self):
        digits = min(24, decimal_digits(self._v.precision))
        return f"HPReal({to_decimal(self, digits)!r}, prec={self._v.precision})"

    def __reduce__(self):
        # pickle via the lossless decimal form
        return (HPReal, (to_decimal(self), self._v.precision))


def hp(value, prec: int | None = None) -> HPReal:
    """Coerce ``value`` to :class:`HPReal` (shorthand constructor)."""
    if isinstance(value, HPReal) and (prec is None or value.precision == prec):
        return value
    return HPReal(value, prec)


def with_precision(x, prec: int) -> HPReal:
    """Round (or zero-pad) ``x`` to exactly ``prec`` bits."""
    return HPReal(hp(x).value, prec)


# -- elementary functions ----------------------------------------------------


def _unary(x, name, prec=None):
    x = hp(x)
    c = _ctx(prec if prec is not None else x.precision)
    return HPReal(getattr(c, name)(x.value))


def sqrt(x, prec: int | None = None) -> HPReal:
    return _unary(x, "sqrt", prec)


def exp(x, prec: int | None = None) -> HPReal:
    return _unary(x, "exp", prec)


def log(x, prec: int | None = None) -> HPReal:
    return _unary(x, "log", prec)


def pi(prec: int) -> HPReal:
    return HPReal(gmpy2.const_pi(prec))


def sqrt_pi(prec: int) -> HPReal:
    return HPReal(_ctx(prec).sqrt(gmpy2.const_pi(prec + 8)), prec)


# -- decimal serialisation ---------------------------------------------------


def decimal_digits(prec: int) -> int:
    """Number of decimal digits guaranteeing a bit-exact round trip."""
    return math.ceil(prec * math.log10(2)) + 2


def to_decimal(x, digits: int | None = None) -> str:
    """Serialise to a decimal string that re-parses to identical bits.

    The default digit count is ``ceil(prec * log10(2)) + 2``, enough for a
    lossless binary -> decimal -> binary round trip at the same precision.
    """
    x = hp(x)
    v = x.value
    if gmpy2.is_nan(v):
        return "nan"
    if gmpy2.is_infinite(v):
        return "-inf" if v < 0 else "inf"
    if digits is None:
        digits = decimal_digits(v.precision)
    mant, expo, _ = v.digits(10, digits)
    neg = mant.startswith("-")
    if neg:
        mant = mant[1:]
    return f"{'-' if neg else ''}0.{mant}e{expo}"


def from_decimal(s: str, prec: int) -> HPReal:
    """Parse a decimal string at the target precision (single rounding)."""
    return HPReal(s, prec)


# -- special functions -------------------------------------------------------


def erfc_hp(x, prec: int) -> HPReal:
    """Complementary error function with relative error below 2**(8 - prec).

    A Maclaurin series (with enough guard bits to absorb the cancellation,
    which costs about ``2.9 * x**2`` bits) is used for small ``|x|``; above
    the switch point ``x**2 >= ln(2) * (prec + 16)`` the divergent asymptotic
    expansion truncated at its smallest term already meets the bound.
    """
    if prec < MIN_PREC:
        raise ValueError(f"prec must be >= {MIN_PREC}")
    x = hp(x, prec) if isinstance(x, str) else hp(x)
    v = x.value
    if gmpy2.is_nan(v):
        return HPReal(v, prec)
    if v == 0:
        return HPReal(1, prec)
    if v < 0:
        c = _ctx(prec + 8)
        pos = erfc_hp(HPReal(c.minus(v)), prec + 8)
        return HPReal(_ctx(prec).sub(2, pos.value), prec)

    xx_f = float(gmpy2.log2(v)) * 2.0  # log2(x^2), overflow-safe
    if xx_f >= math.log2(math.log(2) * (prec + 16)):
        return _erfc_asymptotic(v, prec)
    return _erfc_maclaurin(v, prec)


def _erfc_maclaurin(v: mpfr, prec: int) -> HPReal:
    # erf(x) = (2/sqrt(pi)) * sum_k (-1)^k x^(2k+1) / (k! (2k+1))
    xsq = float(v) * float(v)
    work = prec + int(2.9 * xsq) + 64
    c = _ctx(work)
    x = mpfr(v, work)
    xx = c.mul(x, x)
    tiny = c.div_2exp(mpfr(1, work), work + 2)
    u = x  # x^(2k+1) / k!
    total = x
    k = 0
    while True:
        k += 1
        u = c.div(c.mul(u, xx), k)
        term = c.div(u, 2 * k + 1)
        total = c.add(total, term) if k % 2 == 0 else c.sub(total, term)
        if k >= xsq and term < tiny:
            break
    erf = c.div(c.mul(2, total), c.sqrt(gmpy2.const_pi(work)))
    return HPReal(_ctx(prec).sub(1, erf), prec)


def _erfc_asymptotic(v: mpfr, prec: int) -> HPReal:
    # erfc(x) = e^(-x^2)/(x sqrt(pi)) * sum_k (-1)^k (2k-1)!!/(2x^2)^k,
    # truncated before the terms stop decreasing; the remainder is bounded
    # by the first omitted term.
    work = prec + 32
    c = _ctx(work)
    x = mpfr(v, work)
    xx2 = c.mul(c.mul(x, x), 2)
    tiny = c.div_2exp(mpfr(1, work), prec + 12)
    term = mpfr(1, work)
    total = mpfr(1, work)
    k = 0
    while True:
        k += 1
        nxt = c.div(c.mul(term, 2 * k - 1), xx2)
        if nxt >= term or term < tiny:
            break
        term = nxt
        total = c.add(total, term) if k % 2 == 0 else c.sub(total, term)
    pref = c.div(c.exp(c.minus(c.mul(x, x))), c.mul(x, c.sqrt(gmpy2.const_pi(work))))
    return HPReal(_ctx(prec).mul(pref, total), prec)


def gamma_half(m: int, prec: int) -> HPReal:
    """Gamma(m + 1/2) = (2m-1)!! sqrt(pi) / 2**m, exact up to two roundings."""
    if m < 0:
        raise ValueError("m must be a nonnegative integer")
    dfac = gmpy2.double_fac(2 * m - 1) if m > 0 else 1
    c = _ctx(prec + 8)
    r = c.mul(c.sqrt(gmpy2.const_pi(prec + 8)), dfac)
    r = c.div_2exp(r, m)
    return HPReal(r, prec)


def barnes_g(n: int, prec: int) -> HPReal:
    """Barnes G at a positive integer, by the recursion G(n+1) = Gamma(n) G(n).

    Intended for small n (the normalisation constants use n <= 16); the
    product of factorials is carried exactly and rounded once.
    """
    if not isinstance(n, int) or n < 1:
        raise ValueError("barnes_g requires an integer n >= 1")
    g = gmpy2.mpz(1)
    for k in range(1, n - 1):
        g *= gmpy2.fac(k)
    return HPReal(_ctx(prec).add(mpfr(0, prec), g), prec)
