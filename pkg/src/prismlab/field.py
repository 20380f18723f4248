"""Exact arithmetic in an Eisenstein extension K = Q_p[u]/(E(u)).

Elements are stored as exact rational coordinate vectors in the basis
1, pi, ..., pi^(e-1), where pi is the class of u. The valuation is
normalized so that v(p) = 1, hence v(pi) = 1/e.
"""
from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

from .errors import ZeroInversion

Rat = Union[int, Fraction]


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def vp_rational(r: Fraction, p: int):
    """p-adic valuation of a rational; None stands for +infinity (r = 0)."""
    if r == 0:
        return None
    v = 0
    num, den = r.numerator, r.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


class Valuation:
    """A rational valuation value, or +infinity."""

    def __init__(self, value=None):
        # value None encodes +infinity
        self._v = None if value is None else Fraction(value)

    @classmethod
    def infinity(cls) -> "Valuation":
        return cls(None)

    @property
    def is_infinite(self) -> bool:
        return self._v is None

    @property
    def value(self) -> Fraction:
        if self._v is None:
            raise ValueError("infinite valuation has no finite value")
        return self._v

    def _coerce(self, other):
        if isinstance(other, Valuation):
            return other
        return Valuation(other)

    def __eq__(self, other):
        other = self._coerce(other)
        return self._v == other._v

    def __lt__(self, other):
        other = self._coerce(other)
        if self._v is None:
            return False
        if other._v is None:
            return True
        return self._v < other._v

    def __le__(self, other):
        return self == other or self < other

    def __gt__(self, other):
        return not self <= other

    def __ge__(self, other):
        return not self < other

    def __add__(self, other):
        other = self._coerce(other)
        if self._v is None or other._v is None:
            return Valuation.infinity()
        return Valuation(self._v + other._v)

    __radd__ = __add__

    def __hash__(self):
        return hash(self._v)

    def __repr__(self):
        return "Valuation(+inf)" if self._v is None else f"Valuation({self._v})"

    def __str__(self):
        return "+inf" if self._v is None else str(self._v)


# rational helpers for polynomial arithmetic over Q, used by invert()

def _poly_trim(c):
    c = list(c)
    while c and c[-1] == 0:
        c.pop()
    return c


def _poly_divmod(a, b):
    a = _poly_trim(a)
    b = _poly_trim(b)
    q = [Fraction(0)] * max(0, len(a) - len(b) + 1)
    r = list(a)
    while len(r) >= len(b) and _poly_trim(r):
        shift = len(r) - len(b)
        factor = r[-1] / b[-1]
        q[shift] = factor
        for i, bc in enumerate(b):
            r[shift + i] -= factor * bc
        r = _poly_trim(r)
    return _poly_trim(q), r


def _poly_ext_gcd(a, b):
    # returns (g, s, t) with s*a + t*b = g
    r0, r1 = _poly_trim(a), _poly_trim(b)
    s0, s1 = [Fraction(1)], []
    t0, t1 = [], [Fraction(1)]
    while r1:
        q, r = _poly_divmod(r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, _poly_sub(s0, _poly_mul(q, s1))
        t0, t1 = t1, _poly_sub(t0, _poly_mul(q, t1))
    return r0, s0, t0


def _poly_mul(a, b):
    if not a or not b:
        return []
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return _poly_trim(out)


def _poly_sub(a, b):
    n = max(len(a), len(b))
    out = [Fraction(0)] * n
    for i, x in enumerate(a):
        out[i] += x
    for i, y in enumerate(b):
        out[i] -= y
    return _poly_trim(out)


class FieldSpec:
    """The field K = Q_p[u]/(E(u)) with E monic Eisenstein at p."""

    def __init__(self, p: int, ecoeffs: Sequence[int]):
        coeffs = [int(c) for c in ecoeffs]
        if not _is_prime(p):
            raise ValueError(f"p = {p} is not prime")
        if len(coeffs) < 2 or coeffs[-1] != 1:
            raise ValueError("E must be monic of degree >= 1, low-to-high coefficients")
        e = len(coeffs) - 1
        for c in coeffs[:-1]:
            if c % p != 0:
                raise ValueError("Eisenstein condition fails: coefficient not divisible by p")
        if coeffs[0] % (p * p) == 0:
            raise ValueError("Eisenstein condition fails: constant term divisible by p^2")
        self.p = p
        self.e = e
        self.ecoeffs = tuple(coeffs)

    def __eq__(self, other):
        return (isinstance(other, FieldSpec)
                and self.p == other.p and self.ecoeffs == other.ecoeffs)

    def __hash__(self):
        return hash((self.p, self.ecoeffs))

    def __repr__(self):
        return f"FieldSpec(p={self.p}, E={list(self.ecoeffs)})"

    def element(self, coords: Iterable[Rat]) -> "FieldElement":
        cs = [Fraction(c) for c in coords]
        if len(cs) > self.e:
            raise ValueError(f"at most {self.e} coordinates expected")
        cs += [Fraction(0)] * (self.e - len(cs))
        return FieldElement(self, tuple(cs))

    def zero(self) -> "FieldElement":
        return self.element([])

    def one(self) -> "FieldElement":
        return self.element([1])

    def from_rational(self, r: Rat) -> "FieldElement":
        return self.element([Fraction(r)])

    def pi(self) -> "FieldElement":
        if self.e == 1:
            # u = pi is rational here: pi = -c0
            return self.element([-self.ecoeffs[0]])
        return self.element([0, 1])

    def eval_deriv_at_pi(self) -> "FieldElement":
        """E'(pi), evaluated exactly in the pi-power basis."""
        deriv = [i * c for i, c in enumerate(self.ecoeffs)][1:]
        acc = self.zero()
        pw = self.one()
        for c in deriv:
            acc = acc + pw * c
            pw = pw * self.pi()
        return acc

    def a_prism(self) -> "FieldElement":
        """The nilpotency scalar -E'(pi)."""
        return -self.eval_deriv_at_pi()

    def a_log(self) -> "FieldElement":
        """The nilpotency scalar -pi * E'(pi)."""
        return -(self.pi() * self.eval_deriv_at_pi())


class FieldElement:
    """An element of K with exact rational pi-power coordinates."""

    def __init__(self, spec: FieldSpec, coords):
        self.spec = spec
        self.coords = tuple(Fraction(c) for c in coords)
        assert len(self.coords) == spec.e

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            if other.spec != self.spec:
                raise ValueError("elements of different fields")
            return other
        if isinstance(other, (int, Fraction)):
            return self.spec.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return FieldElement(self.spec, [a + b for a, b in zip(self.coords, other.coords)])

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(self.spec, [-a for a in self.coords])

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        e = self.spec.e
        prod = [Fraction(0)] * (2 * e - 1)
        for i, a in enumerate(self.coords):
            if a == 0:
                continue
            for j, b in enumerate(other.coords):
                if b == 0:
                    continue
                prod[i + j] += a * b
        # fold down powers pi^k, k >= e, using pi^e = -(c_{e-1} pi^{e-1} + ... + c_0)
        for k in range(2 * e - 2, e - 1, -1):
            c = prod[k]
            if c == 0:
                continue
            prod[k] = Fraction(0)
            for i in range(e):
                prod[k - e + i] -= c * self.spec.ecoeffs[i]
        return FieldElement(self.spec, prod[:e])

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self * other.invert()

    def __rtruediv__(self, other):
        return self.spec.from_rational(other) / self

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        out = self.spec.one()
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.spec.from_rational(other)
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.spec == other.spec and self.coords == other.coords

    def __hash__(self):
        return hash((self.spec, self.coords))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def is_rational(self) -> bool:
        return all(c == 0 for c in self.coords[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("element has nonzero higher coordinates")
        return self.coords[0]

    def invert(self) -> "FieldElement":
        if self.is_zero():
            raise ZeroInversion("cannot invert zero")
        epoly = [Fraction(c) for c in self.spec.ecoeffs]
        g, s, _ = _poly_ext_gcd(list(self.coords), epoly)
        # g is a nonzero constant since E is irreducible
        assert len(g) == 1 and g[0] != 0
        inv = [c / g[0] for c in s]
        _, rem = _poly_divmod(inv, epoly)
        rem += [Fraction(0)] * (self.spec.e - len(rem))
        return FieldElement(self.spec, rem[:self.spec.e])

    def val(self) -> Valuation:
        """min over nonzero coordinates of v_p(a_i) + i/e, +inf for zero.

        Exact because distinct i give distinct fractional parts i/e, so no
        two terms of the minimum can collide.
        """
        best = None
        for i, c in enumerate(self.coords):
            v = vp_rational(c, self.spec.p)
            if v is None:
                continue
            cand = Fraction(v) + Fraction(i, self.spec.e)
            if best is None or cand < best:
                best = cand
        return Valuation.infinity() if best is None else Valuation(best)

    def dist_to_integers(self) -> Valuation:
        """sup over integers k of val(self - k).

        With a_0 the rational coordinate and m1 the min over i >= 1 of
        v_p(a_i) + i/e: the sup is min(v_p(a_0), m1) when v_p(a_0) < 0
        (no integer can repair a pole), and m1 otherwise (integers are
        dense in Z_p, so the a_0 part can be matched arbitrarily well).
        """
        p = self.spec.p
        m1 = None
        for i in range(1, self.spec.e):
            v = vp_rational(self.coords[i], p)
            if v is None:
                continue
            cand = Fraction(v) + Fraction(i, self.spec.e)
            if m1 is None or cand < m1:
                m1 = cand
        v0 = vp_rational(self.coords[0], p)
        if v0 is not None and v0 < 0:
            if m1 is None or Fraction(v0) < m1:
                return Valuation(v0)
            return Valuation(m1)
        return Valuation.infinity() if m1 is None else Valuation(m1)

    def __repr__(self):
        return f"FieldElement({list(self.coords)})"

    def __str__(self):
        terms = []
        for i, c in enumerate(self.coords):
            if c == 0:
                continue
            if i == 0:
                terms.append(str(c))
            elif i == 1:
                terms.append(f"{c}*pi")
            else:
                terms.append(f"{c}*pi^{i}")
        return " + ".join(terms) if terms else "0"


def val(alpha: FieldElement) -> Valuation:
    return alpha.val()


def invert(alpha: FieldElement) -> FieldElement:
    return alpha.invert()


def dist_to_integers(alpha: FieldElement) -> Valuation:
    return alpha.dist_to_integers()
