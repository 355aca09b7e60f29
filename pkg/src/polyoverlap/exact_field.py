"""Exact ordered field Q(e0, e1, ...) of rational functions in nested infinitesimals.

Each generator e_s is a positive infinitesimal smaller than every positive
expression built from rationals and e_0, ..., e_{s-1}.  An element is a
fraction of two sparse multivariate polynomials with gmpy2.mpq coefficients:

  Poly = dict mapping exponent tuples to nonzero mpq
  Exponent = tuple[int, ...], trailing zeros trimmed; () is the constant term

The zero polynomial is the empty dict.  Values that happen to be rational are
stored as a bare mpq fast path (`_r` slot) so pure-rational geometry pays
almost nothing for living in the extension field.

Monomial magnitude order: compare exponent vectors from the HIGHEST variable
index downward; at the first differing index the smaller exponent gives the
larger monomial.  This makes 1 > e0 > e0^2 > ... and puts every monomial
containing e_{s+1} below every e_s-only monomial, which is exactly the nested
infinitesimal ordering.  The dominant (largest) monomial of the numerator,
with the denominator normalized positive, decides the sign of a value.
"""

from __future__ import annotations

from gmpy2 import mpq, mpz, gcd, lcm

Q = mpq
Exponent = tuple
Poly = dict

__all__ = [
    "EpsNum",
    "DivisionByZero",
    "UndefinedStandardPart",
    "E",
    "eps",
    "ZERO",
    "ONE",
]


class DivisionByZero(ZeroDivisionError):
    pass


class UndefinedStandardPart(ArithmeticError):
    """Denominator vanishes when every infinitesimal is set to zero."""


# ---------------------------------------------------------------------------
# polynomial layer (module-private free functions on dicts)
# ---------------------------------------------------------------------------

_MPQ_ZERO = mpq(0)
_MPQ_ONE = mpq(1)


def _trim(e):
    n = len(e)
    while n and e[n - 1] == 0:
        n -= 1
    return e[:n]


def _mono_mul(a, b):
    if len(a) < len(b):
        a, b = b, a
    if not b:
        return a
    return _trim(tuple(x + y for x, y in zip(a, b + (0,) * (len(a) - len(b)))))


def _rev_key(e, width):
    # Reversed, zero-padded exponent tuple; min under this key = dominant monomial.
    return tuple(reversed(e + (0,) * (width - len(e))))


def _dominant(p):
    width = max(len(e) for e in p)
    best = None
    best_key = None
    for e in p:
        k = _rev_key(e, width)
        if best_key is None or k < best_key:
            best_key = k
            best = e
    return best


def _p_add(a, b):
    if not a:
        return dict(b)
    if not b:
        return dict(a)
    out = dict(a)
    for e, c in b.items():
        s = out.get(e)
        if s is None:
            out[e] = c
        else:
            s = s + c
            if s:
                out[e] = s
            else:
                del out[e]
    return out


def _p_neg(a):
    return {e: -c for e, c in a.items()}

def _p_scale(a, q):
    if not q:
        return {}
    return {e: c * q for e, c in a.items()}


def _p_mul(a, b):
    if not a or not b:
        return {}
    if len(a) > len(b):
        a, b = b, a
    out = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = _mono_mul(ea, eb)
            s = out.get(e)
            if s is None:
                out[e] = ca * cb
            else:
                s = s + ca * cb
                if s:
                    out[e] = s
                else:
                    del out[e]
    return out


def _p_eval_zero(p):
    """Constant term (value with every eps set to 0)."""
    return p.get((), _MPQ_ZERO)


def _content(polys):
    """Positive rational c with coefficients/c integer and collectively coprime."""
    g = mpz(0)
    l = mpz(1)
    for p in polys:
        for c in p.values():
            g = gcd(g, c.numerator)
            l = lcm(l, c.denominator)
    if g == 0:
        return _MPQ_ONE
    return mpq(g, l)


# ---------------------------------------------------------------------------
# field elements
# ---------------------------------------------------------------------------


class EpsNum:
    """An element of the ordered field Q(e0, e1, ...).

    Immutable.  `_r` holds the value as an mpq when it is rational (the hot
    path); otherwise `_n`/`_d` hold the canonical numerator/denominator
    polynomials: content-reduced, common monomial factors divided out, and
    the denominator's dominant coefficient positive.
    """

    __slots__ = ("_r", "_n", "_d")

    def __init__(self, r=None, n=None, d=None):
        self._r = r
        self._n = n
        self._d = d

    # -- constructors ------------------------------------------------------

    @staticmethod
    def from_rational(x):
        return EpsNum(r=mpq(x))

    @staticmethod
    def from_ratio(p, q):
        if q == 0:
            raise DivisionByZero("rational denominator is zero")
        return EpsNum(r=mpq(p, q))

    @staticmethod
    def eps(i):
        """The i-th infinitesimal generator."""
        if i < 0:
            raise ValueError("eps index must be nonnegative")
        e = (0,) * i + (1,)
        return EpsNum(n={e: _MPQ_ONE}, d={(): _MPQ_ONE})

    @staticmethod
    def _make(num, den):
        """Normalize a raw polynomial fraction into canonical form."""
        if not den:
            raise DivisionByZero("denominator polynomial is zero")
        if not num:
            return ZERO
        # rational collapse
        if len(num) == 1 and () in num and len(den) == 1 and () in den:
            return EpsNum(r=num[()] / den[()])
        # divide out common monomial factor
        width = max(max(len(e) for e in num), max(len(e) for e in den))
        mins = [None] * width
        for p in (num, den):
            for e in p:
                ee = e + (0,) * (width - len(e))
                for i in range(width):
                    v = ee[i]
                    if mins[i] is None or v < mins[i]:
                        mins[i] = v
        if any(m > 0 for m in mins):
            shift = tuple(mins)

            def unshift(p):
                out = {}
                for e, c in p.items():
                    ee = e + (0,) * (width - len(e))
                    out[_trim(tuple(x - m for x, m in zip(ee, shift)))] = c
                return out

            num = unshift(num)
            den = unshift(den)
            if len(num) == 1 and () in num and len(den) == 1 and () in den:
                return EpsNum(r=num[()] / den[()])
        # scalar content
        c = _content((num, den))
        if c != 1:
            inv = 1 / c
            num = _p_scale(num, inv)
            den = _p_scale(den, inv)
        # positive dominant denominator coefficient
        if den[_dominant(den)] < 0:
            num = _p_neg(num)
            den = _p_neg(den)
        return EpsNum(n=num, d=den)

    # -- views -------------------------------------------------------------

    @property
    def is_rational(self):
        return self._r is not None

    @property
    def rational(self):
        """The mpq value; only valid when is_rational."""
        if self._r is None:
            raise ValueError("not a rational value")
        return self._r

    def _nd(self):
        if self._r is not None:
            if self._r:
                return {(): self._r}, {(): _MPQ_ONE}
            return {}, {(): _MPQ_ONE}
        return self._n, self._d

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other):
        if not isinstance(other, EpsNum):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self._r is not None and other._r is not None:
            return EpsNum(r=self._r + other._r)
        n1, d1 = self._nd()
        n2, d2 = other._nd()
        return EpsNum._make(_p_add(_p_mul(n1, d2), _p_mul(n2, d1)), _p_mul(d1, d2))

    __radd__ = __add__

    def __neg__(self):
        if self._r is not None:
            return EpsNum(r=-self._r)
        return EpsNum(n=_p_neg(self._n), d=self._d)

    def __sub__(self, other):
        if not isinstance(other, EpsNum):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self._r is not None and other._r is not None:
            return EpsNum(r=self._r - other._r)
        return self.__add__(other.__neg__())

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__sub__(self)

    def __mul__(self, other):
        if not isinstance(other, EpsNum):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self._r is not None and other._r is not None:
            return EpsNum(r=self._r * other._r)
        if self._r is not None and not self._r:
            return ZERO
        if other._r is not None and not other._r:
            return ZERO
        n1, d1 = self._nd()
        n2, d2 = other._nd()
        return EpsNum._make(_p_mul(n1, n2), _p_mul(d1, d2))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, EpsNum):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if other.sign() == 0:
            raise DivisionByZero("division by zero field element")
        if self._r is not None and other._r is not None:
            return EpsNum(r=self._r / other._r)
        n1, d1 = self._nd()
        n2, d2 = other._nd()
        return EpsNum._make(_p_mul(n1, d2), _p_mul(d1, n2))

    def __rtruediv__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other.__truediv__(self)

    def inverse(self):
        return ONE / self

    # -- order --------------------------------------------------------------

    def sign(self):
        if self._r is not None:
            if self._r > 0:
                return 1
            if self._r < 0:
                return -1
            return 0
        # denominator dominant coefficient is positive by canonical form
        return 1 if self._n[_dominant(self._n)] > 0 else -1

    def __bool__(self):
        return self.sign() != 0

    def _cmp(self, other):
        if not isinstance(other, EpsNum):
            other = _coerce(other)
            if other is NotImplemented:
                return NotImplemented
        if self._r is not None and other._r is not None:
            a, b = self._r, other._r
            return -1 if a < b else (1 if a > b else 0)
        return (self - other).sign()

    def __eq__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c == 0

    def __ne__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c != 0

    def __lt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c < 0

    def __le__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c <= 0

    def __gt__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c > 0

    def __ge__(self, other):
        c = self._cmp(other)
        return NotImplemented if c is NotImplemented else c >= 0

    def __hash__(self):
        if self._r is not None:
            return hash(self._r)
        return hash((tuple(sorted(self._n.items())), tuple(sorted(self._d.items()))))

    # -- other queries -------------------------------------------------------

    def standard_part(self):
        """The rational value with every infinitesimal set to zero."""
        if self._r is not None:
            return self._r
        d0 = _p_eval_zero(self._d)
        if d0 == 0:
            raise UndefinedStandardPart("denominator vanishes at eps = 0")
        return _p_eval_zero(self._n) / d0

    def linear_profile(self):
        """(constant, {var index: coefficient}) when the value lies in the
        linear span of 1, e0, e1, ...; None otherwise."""
        if self._r is not None:
            return self._r, {}
        if len(self._d) != 1 or () not in self._d:
            return None
        d0 = self._d[()]
        coeffs = {}
        const = _MPQ_ZERO
        for e, c in self._n.items():
            if not e:
                const = c / d0
            elif sum(e) == 1:
                coeffs[len(e) - 1] = c / d0
            else:
                return None
        return const, coeffs

    def max_eps_index(self):
        """Highest infinitesimal index appearing, or -1 for rationals."""
        if self._r is not None:
            return -1
        w = 0
        for p in (self._n, self._d):
            for e in p:
                if len(e) > w:
                    w = len(e)
        return w - 1

    def complexity(self):
        """Term count of numerator plus denominator (degree-growth logging)."""
        if self._r is not None:
            return 1
        return len(self._n) + len(self._d)

    # -- serialization --------------------------------------------------------

    def __repr__(self):
        return f"EpsNum({self})"

    def __str__(self):
        n, d = self._nd()
        s = _poly_str(n)
        if len(d) == 1 and () in d and d[()] == 1:
            return s
        return f"({s}) / ({_poly_str(d)})"


def _poly_str(p):
    if not p:
        return "0"
    parts = []
    for e in sorted(p, key=lambda t: (len(t), t)):
        c = p[e]
        factors = [f"{c.numerator}/{c.denominator}" if c.denominator != 1 else f"{c.numerator}"]
        for i, k in enumerate(e):
            if k == 1:
                factors.append(f"e{i}")
            elif k > 1:
                factors.append(f"e{i}^{k}")
        parts.append(" * ".join(factors))
    return " + ".join(parts)


def parse_eps(text):
    """Inverse of str() for the sum-of-terms form (test fixtures, debug I/O)."""
    text = text.strip()
    if text.startswith("(") and ") / (" in text:
        ntext, dtext = text[1:-1].split(") / (")
        return parse_eps(ntext) / parse_eps(dtext)
    total = ZERO
    for term in text.split("+"):
        factors = term.split("*")
        val = EpsNum.from_rational(mpq(factors[0].strip()))
        for f in factors[1:]:
            f = f.strip()
            if "^" in f:
                base, k = f.split("^")
                val = val * EpsNum.eps(int(base[1:])) ** int(k)
            else:
                val = val * EpsNum.eps(int(f[1:]))
        total = total + val
    return total


def _coerce(x):
    if isinstance(x, (int, type(mpq(0)), type(mpz(0)))):
        return EpsNum(r=mpq(x))
    return NotImplemented


def _pow(self, k):
    if not isinstance(k, int) or k < 0:
        raise ValueError("only nonnegative integer powers")
    out = ONE
    base = self
    while k:
        if k & 1:
            out = out * base
        base = base * base
        k >>= 1
    return out


EpsNum.__pow__ = _pow

ZERO = EpsNum(r=_MPQ_ZERO)
ONE = EpsNum(r=_MPQ_ONE)


def E(x):
    """Shorthand: coerce an int/mpq/EpsNum into the field."""
    if isinstance(x, EpsNum):
        return x
    return EpsNum(r=mpq(x))


def eps(i):
    return EpsNum.eps(i)
