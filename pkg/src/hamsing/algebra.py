"""Exact arithmetic: complex rationals, univariate polynomials over Q(i),
the quotient ring Q(i)[c]/(c^R - kappa), and sparse multivariate
polynomials in derivative symbols.

Rationals are ``gmpy2.mpq`` when available, ``fractions.Fraction`` otherwise.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import total_ordering

from .errors import NotInvertible

try:  # pragma: no cover - exercised implicitly
    from gmpy2 import mpq as Q
except ImportError:  # pragma: no cover
    Q = Fraction

ZERO = Q(0)
ONE = Q(1)


def as_rational(x):
    """Convert int, Fraction, mpq, ``[num, den]`` or a decimal string to Q."""
    if isinstance(x, (list, tuple)):
        num, den = x
        return Q(int(num), int(den))
    if isinstance(x, str):
        f = Fraction(x)
        return Q(f.numerator, f.denominator)
    if isinstance(x, float):
        f = Fraction(x)
        return Q(f.numerator, f.denominator)
    if isinstance(x, Fraction):
        return Q(x.numerator, x.denominator)
    return Q(x)


def rational_pair(x):
    x = as_rational(x)
    return [int(x.numerator), int(x.denominator)]


# ---------------------------------------------------------------------------
# complex rationals


@total_ordering
class CQ:
    """Exact complex rational ``re + i*im``."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = as_rational(re)
        self.im = as_rational(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, CQ):
            return x
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        return cls(x, 0)

    def __add__(self, other):
        o = CQ.coerce(other)
        return CQ(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return CQ(-self.re, -self.im)

    def __sub__(self, other):
        o = CQ.coerce(other)
        return CQ(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return CQ.coerce(other) - self

    def __mul__(self, other):
        o = CQ.coerce(other)
        return CQ(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * CQ.coerce(other).inverse()

    def __rtruediv__(self, other):
        return CQ.coerce(other) * self.inverse()

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = CQ(1), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        nrm = self.re * self.re + self.im * self.im
        if nrm == 0:
            raise ZeroDivisionError("inverse of zero")
        return CQ(self.re / nrm, -self.im / nrm)

    def conjugate(self):
        return CQ(self.re, -self.im)

    def __bool__(self):
        return self.re != 0 or self.im != 0

    def __eq__(self, other):
        try:
            o = CQ.coerce(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __lt__(self, other):
        o = CQ.coerce(other)
        return (self.re, self.im) < (o.re, o.im)

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def is_real(self):
        return self.im == 0

    def __repr__(self):
        return f"CQ({self.re}, {self.im})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}*I"
        return f"({self.re}{'+' if self.im > 0 else '-'}{abs(self.im)}*I)"

    def to_json(self):
        return {"re": rational_pair(self.re), "im": rational_pair(self.im)}

    @classmethod
    def from_json(cls, obj):
        if isinstance(obj, dict):
            return cls(as_rational(obj.get("re", 0)), as_rational(obj.get("im", 0)))
        return cls(as_rational(obj), 0)


def exact_root(x: CQ, n: int):
    """Return an exact n-th root of ``x`` in Q(i) if one exists, else None."""
    if not x:
        return CQ(0)
    if n == 1:
        return x
    if x.im == 0:
        r = _rational_root(x.re, n)
        if r is not None:
            return CQ(r)
        if x.re < 0 and n % 2 == 0:
            # (i*s)^n = i^n s^n
            if n % 4 == 2:
                s = _rational_root(-x.re, n)
                if s is not None:
                    return CQ(0, s)
    # general Gaussian case: search small candidates from the float root
    approx = complex(x) ** (1.0 / n)
    for k in range(n):
        cand = approx * complex(math.cos(2 * math.pi * k / n), math.sin(2 * math.pi * k / n))
        for limit in (64, 10**4, 10**6):
            guess = CQ(Fraction(cand.real).limit_denominator(limit), Fraction(cand.imag).limit_denominator(limit))
            if guess ** n == x:
                return guess
    return None


def _rational_root(x, n):
    neg = x < 0
    if neg and n % 2 == 0:
        return None
    x = abs(x)
    num, den = int(x.numerator), int(x.denominator)
    rn, rd = _int_root(num, n), _int_root(den, n)
    if rn is None or rd is None:
        return None
    r = Q(rn, rd)
    return -r if neg else r


def _int_root(a, n):
    if a < 2:
        return a
    r = round(a ** (1.0 / n))
    for cand in (r - 1, r, r + 1):
        if cand >= 0 and cand ** n == a:
            return cand
    return None


# ---------------------------------------------------------------------------
# univariate polynomials over Q(i)


def poly_trim(coeffs):
    out = list(coeffs)
    while out and not out[-1]:
        out.pop()
    return out


def poly_add(a, b):
    n = max(len(a), len(b))
    return poly_trim([(a[k] if k < len(a) else CQ(0)) + (b[k] if k < len(b) else CQ(0)) for k in range(n)])


def poly_mul(a, b):
    if not a or not b:
        return []
    out = [CQ(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            out[i + j] = out[i + j] + x * y
    return poly_trim(out)


def poly_divmod(a, b):
    b = poly_trim(b)
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = poly_trim(a)
    quot = [CQ(0)] * max(len(a) - len(b) + 1, 0)
    rem = list(a)
    lead_inv = b[-1].inverse()
    while len(rem) >= len(b) and rem:
        shift = len(rem) - len(b)
        f = rem[-1] * lead_inv
        quot[shift] = f
        for k, y in enumerate(b):
            rem[shift + k] = rem[shift + k] - f * y
        rem = poly_trim(rem[:-1] if not rem[-1] else rem)
    return poly_trim(quot), poly_trim(rem)


def poly_egcd(a, b):
    """Return (g, s, t) with s*a + t*b = g, g monic."""
    r0, r1 = poly_trim(a), poly_trim(b)
    s0, s1 = [CQ(1)], []
    t0, t1 = [], [CQ(1)]
    while r1:
        q, r = poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, poly_add(s0, [-x for x in poly_mul(q, s1)])
        t0, t1 = t1, poly_add(t0, [-x for x in poly_mul(q, t1)])
    if not r0:
        return [], s0, t0
    inv = r0[-1].inverse()
    return [x * inv for x in r0], [x * inv for x in s0], [x * inv for x in t0]


# ---------------------------------------------------------------------------
# the extension Q(i)[c] / (c^R - kappa)


class AlgebraicScalar:
    """Element of Q(i)[c]/(c^R - kappa), always stored reduced (degree < R)."""

    __slots__ = ("coeffs", "R", "kappa")

    def __init__(self, coeffs, R: int, kappa: CQ):
        self.R = R
        self.kappa = CQ.coerce(kappa)
        self.coeffs = self._reduce([CQ.coerce(x) for x in coeffs])

    def _reduce(self, coeffs):
        coeffs = list(coeffs)
        for k in range(len(coeffs) - 1, self.R - 1, -1):
            if coeffs[k]:
                coeffs[k - self.R] = coeffs[k - self.R] + coeffs[k] * self.kappa
        coeffs = coeffs[: self.R]
        coeffs += [CQ(0)] * (self.R - len(coeffs))
        return tuple(coeffs)

    @classmethod
    def generator(cls, R, kappa):
        return cls([0, 1] if R > 1 else [kappa], R, kappa)

    def _wrap(self, coeffs):
        return AlgebraicScalar(coeffs, self.R, self.kappa)

    def modulus(self):
        return [-self.kappa] + [CQ(0)] * (self.R - 1) + [CQ(1)]

    def __add__(self, other):
        if not isinstance(other, AlgebraicScalar):
            other = self._wrap([other])
        return self._wrap([a + b for a, b in zip(self.coeffs, other.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return self._wrap([-a for a in self.coeffs])

    def __sub__(self, other):
        return self + (-other if isinstance(other, AlgebraicScalar) else -CQ.coerce(other))

    def __mul__(self, other):
        if not isinstance(other, AlgebraicScalar):
            o = CQ.coerce(other)
            return self._wrap([a * o for a in self.coeffs])
        return self._wrap(poly_mul(list(self.coeffs), list(other.coeffs)) or [0])

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = self._wrap([1]), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def inverse(self):
        """Inverse by extended gcd against the modulus.

        Raises NotInvertible (carrying the common factor) when the element is
        a zero divisor of the (possibly reducible) modulus.
        """
        g, s, _ = poly_egcd(list(self.coeffs), self.modulus())
        if not g:
            raise ZeroDivisionError("inverse of zero")
        if len(g) > 1:
            err = NotInvertible(f"zero divisor; common factor of degree {len(g) - 1}")
            err.factor = g
            raise err
        return self._wrap(s or [0])

    def __truediv__(self, other):
        if not isinstance(other, AlgebraicScalar):
            return self * CQ.coerce(other).inverse()
        return self * other.inverse()

    def is_zero(self):
        return not any(self.coeffs)

    def is_rational(self):
        """True when the element is a constant of Q(i)."""
        return not any(self.coeffs[1:])

    def __eq__(self, other):
        if not isinstance(other, AlgebraicScalar):
            other = self._wrap([other])
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def evaluate(self, c: complex) -> complex:
        out = 0j
        for a in reversed(self.coeffs):
            out = out * c + complex(a)
        return out

    def __repr__(self):
        terms = [f"{a}*c^{k}" for k, a in enumerate(self.coeffs) if a]
        return "AlgebraicScalar(" + (" + ".join(terms) or "0") + f" mod c^{self.R} = {self.kappa})"

    def __str__(self):
        terms = [str(a) if k == 0 else (f"{a}*c^{k}" if a != 1 else f"c^{k}") for k, a in enumerate(self.coeffs) if a]
        return " + ".join(terms) or "0"


# ---------------------------------------------------------------------------
# symbols and sparse multivariate polynomials

_SYMBOLS: list = []
_SYMBOL_ID: dict = {}


def symbol(*key) -> int:
    """Intern a symbol key such as ``('a', i, j, r)`` and return its id."""
    sid = _SYMBOL_ID.get(key)
    if sid is None:
        sid = len(_SYMBOLS)
        _SYMBOLS.append(key)
        _SYMBOL_ID[key] = sid
    return sid


def symbol_key(sid: int):
    return _SYMBOLS[sid]


def symbol_name(sid: int) -> str:
    key = _SYMBOLS[sid]
    return f"{key[0]}[{','.join(str(x) for x in key[1:])}]"


def derivative_symbol(sid: int):
    """Formal z-derivative of a symbol, or None for constants."""
    key = _SYMBOLS[sid]
    if key[0] in ("a", "b"):
        return symbol(*key[:-1], key[-1] + 1)
    return None


class PolyRing:
    """Context for :class:`DPoly`: the degree R and constant kappa of the
    relation c^R = kappa (``R=None`` means c is not adjoined)."""

    def __init__(self, R=None, kappa=None):
        self.R = R
        self.kappa = CQ.coerce(kappa) if kappa is not None else None

    def __eq__(self, other):
        return isinstance(other, PolyRing) and (self.R, self.kappa) == (other.R, other.kappa)

    def __hash__(self):
        return hash((self.R, self.kappa))

    def __repr__(self):
        return f"PolyRing(R={self.R}, kappa={self.kappa})"


PLAIN = PolyRing()


def _merge(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    return tuple(sorted(m1 + m2))


class DPoly:
    """Sparse polynomial over Q in interned symbols, the imaginary unit I and
    the adjoined root c.

    Terms map ``(c_exp, i_exp, monomial) -> rational`` where ``monomial`` is a
    sorted tuple of symbol ids (with repetition).  Products are reduced by
    I^2 = -1 and c^R = kappa.
    """

    __slots__ = ("terms", "ring")

    def __init__(self, terms=None, ring: PolyRing = PLAIN):
        self.terms = terms if terms is not None else {}
        self.ring = ring

    # construction -----------------------------------------------------
    @classmethod
    def const(cls, value, ring=PLAIN):
        value = CQ.coerce(value)
        terms = {}
        if value.re:
            terms[(0, 0, ())] = value.re
        if value.im:
            terms[(0, 1, ())] = value.im
        return cls(terms, ring)

    @classmethod
    def sym(cls, sid, ring=PLAIN):
        return cls({(0, 0, (sid,)): ONE}, ring)

    @classmethod
    def c_power(cls, k, ring):
        out = cls({(0, 0, ()): ONE}, ring)
        gen = cls({(1, 0, ()): ONE}, ring) if ring.R > 1 else cls.const(ring.kappa, ring)
        for _ in range(k):
            out = out * gen
        return out

    def zero(self):
        return DPoly({}, self.ring)

    # arithmetic -------------------------------------------------------
    def _add_term(self, terms, key, val):
        ce, ie, mono = key
        if ie >= 2:
            ie -= 2
            val = -val
        R = self.ring.R
        if R is not None and ce >= R:
            ce -= R
            kr, ki = self.ring.kappa.re, self.ring.kappa.im
            if kr:
                self._acc(terms, (ce, ie, mono), val * kr)
            if ki:
                self._add_term(terms, (ce, ie + 1, mono), val * ki)
            return
        self._acc(terms, (ce, ie, mono), val)

    @staticmethod
    def _acc(terms, key, val):
        v = terms.get(key)
        if v is None:
            terms[key] = val
        else:
            v = v + val
            if v:
                terms[key] = v
            else:
                del terms[key]

    def __add__(self, other):
        if not isinstance(other, DPoly):
            other = DPoly.const(other, self.ring)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            self._acc(terms, k, v)
        return DPoly(terms, self.ring)

    __radd__ = __add__

    def __neg__(self):
        return DPoly({k: -v for k, v in self.terms.items()}, self.ring)

    def __sub__(self, other):
        if not isinstance(other, DPoly):
            other = DPoly.const(other, self.ring)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            self._acc(terms, k, -v)
        return DPoly(terms, self.ring)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        """Multiply by a rational (fast path)."""
        q = as_rational(q)
        if not q:
            return DPoly({}, self.ring)
        return DPoly({k: v * q for k, v in self.terms.items()}, self.ring)

    def __mul__(self, other):
        if not isinstance(other, DPoly):
            other = CQ.coerce(other)
            if other.im == 0:
                return self.scale(other.re)
            other = DPoly.const(other, self.ring)
        if not self.terms or not other.terms:
            return DPoly({}, self.ring)
        terms = {}
        add = self._add_term
        R = self.ring.R
        for (c1, i1, m1), v1 in self.terms.items():
            for (c2, i2, m2), v2 in other.terms.items():
                ce = c1 + c2
                ie = i1 + i2
                if ie < 2 and (R is None or ce < R):
                    key = (ce, ie, _merge(m1, m2))
                    val = v1 * v2
                    v = terms.get(key)
                    if v is None:
                        terms[key] = val
                    else:
                        v = v + val
                        if v:
                            terms[key] = v
                        else:
                            del terms[key]
                else:
                    add(terms, (ce, ie, _merge(m1, m2)), v1 * v2)
        return DPoly(terms, self.ring)

    __rmul__ = __mul__

    def __pow__(self, n):
        out = DPoly.const(1, self.ring)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __truediv__(self, other):
        other = CQ.coerce(other)
        if other.im == 0:
            return self.scale(1 / other.re)
        return self * DPoly.const(other.inverse(), self.ring)

    # inspection -------------------------------------------------------
    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if not isinstance(other, DPoly):
            other = DPoly.const(other, self.ring)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def symbols(self):
        out = set()
        for _, _, mono in self.terms:
            out.update(mono)
        return out

    def c_exponents(self):
        return sorted({k[0] for k in self.terms})

    def c_coefficient(self, e):
        """Coefficient of c^e as a DPoly without c."""
        return DPoly({(0, ie, m): v for (ce, ie, m), v in self.terms.items() if ce == e}, PLAIN)

    def without_c(self):
        if any(k[0] for k in self.terms):
            raise ValueError("polynomial still depends on c")
        return DPoly(dict(self.terms), PLAIN)

    def in_ring(self, ring):
        return DPoly(dict(self.terms), ring)

    def constant_value(self):
        """The value as CQ when the polynomial is a constant of Q(i)."""
        re = im = ZERO
        for (ce, ie, mono), v in self.terms.items():
            if ce or mono:
                raise ValueError("not a constant")
            if ie:
                im += v
            else:
                re += v
        return CQ(re, im)

    def linear_coefficient(self, sid):
        """Split self = coeff * sym + rest where rest is free of ``sid`` at
        degree one.  Returns (coeff, rest); raises if sid occurs non-linearly."""
        coeff, rest = {}, {}
        for (ce, ie, mono), v in self.terms.items():
            n = mono.count(sid)
            if n == 0:
                rest[(ce, ie, mono)] = v
            elif n == 1:
                m = list(mono)
                m.remove(sid)
                coeff[(ce, ie, tuple(m))] = v
            else:
                raise ValueError(f"{symbol_name(sid)} occurs non-linearly")
        return DPoly(coeff, self.ring), DPoly(rest, self.ring)

    # calculus / substitution -----------------------------------------
    def derivative(self):
        """Formal total z-derivative (a[i,j,r]' = a[i,j,r+1])."""
        terms = {}
        for (ce, ie, mono), v in self.terms.items():
            seen = set()
            for pos, sid in enumerate(mono):
                if sid in seen:
                    continue
                seen.add(sid)
                dsid = derivative_symbol(sid)
                if dsid is None:
                    continue
                mult = mono.count(sid)
                m = list(mono)
                m.remove(sid)
                m.append(dsid)
                self._acc(terms, (ce, ie, tuple(sorted(m))), v * mult)
        return DPoly(terms, self.ring)

    def substitute(self, mapping):
        """Replace symbols by DPoly values (same ring or plain)."""
        out = DPoly({}, self.ring)
        cache = {}
        for (ce, ie, mono), v in self.terms.items():
            term = DPoly({(ce, ie, tuple(s for s in mono if s not in mapping)): v}, self.ring)
            for sid in mono:
                if sid in mapping:
                    rep = mapping[sid]
                    if not isinstance(rep, DPoly):
                        rep = DPoly.const(rep, self.ring)
                    elif rep.ring != self.ring:
                        rep = rep.in_ring(self.ring)
                    term = term * rep
            for k, val in term.terms.items():
                self._acc(out.terms, k, val)
        del cache
        return out

    def evaluate(self, values, c=None, convert=complex):
        """Numeric value; ``values`` maps symbol id -> number (missing -> 0)."""
        total = convert(0)
        imag = convert(1j)
        for (ce, ie, mono), v in self.terms.items():
            term = convert(v.numerator) / convert(v.denominator)
            if ie:
                term = term * imag
            if ce:
                term = term * c ** ce
            for sid in mono:
                val = values.get(sid, 0)
                if not val:
                    term = 0
                    break
                term = term * val
            total = total + term
        return total

    # canonical forms --------------------------------------------------
    def _sorted_keys(self):
        def sort_key(k):
            ce, ie, mono = k
            return (-len(mono), tuple(symbol_key(s) for s in sorted(mono, key=symbol_key)), ce, ie)

        return sorted(self.terms, key=sort_key)

    def leading_key(self):
        return self._sorted_keys()[0]

    def canonical(self):
        """Primitive representative up to a nonzero Q(i) multiple: leading
        coefficient a positive integer, integer coefficients with gcd 1."""
        if not self.terms:
            return self
        lead = self.leading_key()
        ce, ie, mono = lead
        lead_val = CQ(0)
        for k, v in self.terms.items():
            if k[0] == ce and k[2] == mono:
                lead_val = lead_val + (CQ(0, v) if k[1] else CQ(v))
        scaled = self * DPoly.const(lead_val.inverse(), self.ring)
        dens = [int(v.denominator) for v in scaled.terms.values()]
        lcm = 1
        for d in dens:
            lcm = lcm * d // math.gcd(lcm, d)
        scaled = scaled.scale(lcm)
        g = 0
        for v in scaled.terms.values():
            g = math.gcd(g, int(v.numerator))
        return scaled.scale(Q(1, g))

    def to_text(self):
        if not self.terms:
            return "0"
        parts = []
        for key in self._sorted_keys():
            ce, ie, mono = key
            v = self.terms[key]
            coeff = f"{v}" if not ie else f"{v}*I"
            factors = []
            if ce:
                factors.append("c" if ce == 1 else f"c^{ce}")
            names = sorted(mono, key=symbol_key)
            seen = []
            for sid in names:
                if sid in seen:
                    continue
                seen.append(sid)
                e = mono.count(sid)
                factors.append(symbol_name(sid) + (f"^{e}" if e > 1 else ""))
            if factors:
                if coeff == "1":
                    body = "*".join(factors)
                elif coeff == "-1":
                    body = "-" + "*".join(factors)
                else:
                    body = coeff + "*" + "*".join(factors)
            else:
                body = coeff
            parts.append(body)
        text = parts[0]
        for p in parts[1:]:
            text += " - " + p[1:] if p.startswith("-") else " + " + p
        return text

    def monomial_list(self):
        """Machine form: list of {coeff, c, I, factors} dicts."""
        out = []
        for key in self._sorted_keys():
            ce, ie, mono = key
            v = self.terms[key]
            out.append(
                {
                    "coeff": rational_pair(v),
                    "c": ce,
                    "I": ie,
                    "factors": [list(symbol_key(s)) for s in sorted(mono, key=symbol_key)],
                }
            )
        return out

    def __repr__(self):
        return f"DPoly({self.to_text()})"


def alpha_symbol(i, j, r=0):
    return symbol("a", i, j, r)


def beta_symbol(k, l, r=0):
    return symbol("b", k, l, r)


def free_symbol(n):
    return symbol("f", n)


def to_number(x, convert=None):
    """Numeric value of an exact scalar; ``convert`` None/complex gives a
    Python complex, anything else (e.g. mpmath.mpc) an mpmath complex at the
    working precision."""
    x = CQ.coerce(x)
    if convert is None or convert is complex:
        return complex(x)
    import mpmath

    re = mpmath.mpf(int(x.re.numerator)) / int(x.re.denominator)
    im = mpmath.mpf(int(x.im.numerator)) / int(x.im.denominator)
    return mpmath.mpc(re, im)
