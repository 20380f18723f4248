"""The truncated power series ring K[[T]]/T^m.

Dense exact coefficient vectors tagged with a uniformizer label. The label
is bookkeeping only; arithmetic never inspects it.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Sequence, Union

from .errors import NotAUnit, NotAUniformizer
from .field import FieldElement, FieldSpec

Scalar = Union[int, Fraction, FieldElement]


class TruncSeries:
    def __init__(self, spec: FieldSpec, m: int, coeffs: Sequence, unif: str = "T"):
        assert m >= 1
        self.spec = spec
        self.m = m
        self.unif = unif
        cs: List[FieldElement] = []
        for c in list(coeffs)[:m]:
            if isinstance(c, FieldElement):
                cs.append(c)
            else:
                cs.append(spec.from_rational(Fraction(c)))
        while len(cs) < m:
            cs.append(spec.zero())
        self.coeffs = tuple(cs)

    @classmethod
    def zero(cls, spec, m, unif="T"):
        return cls(spec, m, [], unif)

    @classmethod
    def one(cls, spec, m, unif="T"):
        return cls(spec, m, [1], unif)

    @classmethod
    def variable(cls, spec, m, unif="T"):
        return cls(spec, m, [0, 1], unif)

    @classmethod
    def constant(cls, spec, m, c, unif="T"):
        return cls(spec, m, [c], unif)

    def with_unif(self, unif: str) -> "TruncSeries":
        return TruncSeries(self.spec, self.m, self.coeffs, unif)

    def _coerce(self, other):
        if isinstance(other, TruncSeries):
            assert other.spec == self.spec and other.m == self.m
            return other
        if isinstance(other, (int, Fraction, FieldElement)):
            return TruncSeries.constant(self.spec, self.m, other, self.unif)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return TruncSeries(self.spec, self.m,
                           [a + b for a, b in zip(self.coeffs, other.coeffs)], self.unif)

    __radd__ = __add__

    def __neg__(self):
        return TruncSeries(self.spec, self.m, [-a for a in self.coeffs], self.unif)

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
        out = [self.spec.zero() for _ in range(self.m)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j in range(self.m - i):
                b = other.coeffs[j]
                if not b.is_zero():
                    out[i + j] = out[i + j] + a * b
        return TruncSeries(self.spec, self.m, out, self.unif)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        assert n >= 0
        out = TruncSeries.one(self.spec, self.m, self.unif)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, other):
        if not isinstance(other, TruncSeries):
            return NotImplemented
        return (self.spec == other.spec and self.m == other.m
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.spec, self.m, self.coeffs))

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_unit(self) -> bool:
        return not self.coeffs[0].is_zero()

    def is_uniformizer(self) -> bool:
        return self.coeffs[0].is_zero() and self.m >= 2 and not self.coeffs[1].is_zero()

    def truncate(self, new_m: int) -> "TruncSeries":
        assert 1 <= new_m <= self.m
        return TruncSeries(self.spec, new_m, self.coeffs[:new_m], self.unif)

    def invert_unit(self) -> "TruncSeries":
        if not self.is_unit():
            raise NotAUnit("constant term vanishes")
        c0inv = self.coeffs[0].invert()
        out = [c0inv]
        for k in range(1, self.m):
            acc = self.spec.zero()
            for i in range(1, k + 1):
                acc = acc + self.coeffs[i] * out[k - i]
            out.append(-(c0inv * acc))
        return TruncSeries(self.spec, self.m, out, self.unif)

    def derivative(self) -> "TruncSeries":
        # only trustworthy through degree m - 2: the dropped T^m term
        # would contribute at degree m - 1
        out = [(k + 1) * self.coeffs[k + 1] for k in range(self.m - 1)]
        return TruncSeries(self.spec, self.m, out, self.unif)

    def t_log_derivative(self) -> "TruncSeries":
        return TruncSeries(self.spec, self.m,
                           [k * c for k, c in enumerate(self.coeffs)], self.unif)

    def shift_down(self) -> "TruncSeries":
        """Divide by T; requires vanishing constant term. Top degree is lost."""
        assert self.coeffs[0].is_zero()
        return TruncSeries(self.spec, self.m, list(self.coeffs[1:]) + [0], self.unif)

    def compose(self, inner: "TruncSeries") -> "TruncSeries":
        """self(inner(T)), requiring inner(0) = 0 so truncation is stable."""
        assert inner.spec == self.spec and inner.m == self.m
        assert inner.coeffs[0].is_zero()
        acc = TruncSeries.zero(self.spec, self.m, inner.unif)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def reversion(self) -> "TruncSeries":
        """Compositional inverse g with self(g) = g(self) = T mod T^m."""
        if not self.is_uniformizer():
            raise NotAUniformizer("series must vanish to exact order one")
        c1inv = self.coeffs[1].invert()
        d = [self.spec.zero(), c1inv]
        for k in range(2, self.m):
            partial = TruncSeries(self.spec, self.m, d + [0] * (self.m - len(d)), self.unif)
            err = self.compose(partial).coeffs[k]
            d.append(-(err * c1inv))
        return TruncSeries(self.spec, self.m, d, self.unif)


def rewrite_in_uniformizer(f: TruncSeries, y: TruncSeries) -> TruncSeries:
    """g with g(y(T)) = f(T) mod T^m, tagged with y's label."""
    if not y.is_uniformizer():
        raise NotAUniformizer("substitution target must vanish to exact order one")
    g = f.compose(y.reversion())
    return g.with_unif(y.unif)


def lambda_approx(spec: FieldSpec, F: int, m: int) -> TruncSeries:
    """The finite product prod_{n=0}^{F} E(u^(p^n))/E(0) as a series in u - pi.

    A genuine uniformizer for every F >= 0: only the n = 0 factor vanishes
    at u = pi. Versus the infinite product, each omitted factor n > F
    differs from 1 by coefficients of valuation at least
    p^n/e - (m-1)/e - 1 through the retained degrees, so the coefficients
    of this approximation converge rapidly in F.
    """
    assert F >= 0
    u = TruncSeries(spec, m, [spec.pi(), spec.one()], unif=f"lambda{F}")
    e0inv = Fraction(1, spec.ecoeffs[0])
    out = TruncSeries.one(spec, m, unif=f"lambda{F}")
    for n in range(F + 1):
        upow = u ** (spec.p ** n)
        acc = TruncSeries.zero(spec, m, unif=f"lambda{F}")
        for c in reversed(spec.ecoeffs):
            acc = acc * upow + c
        out = out * (acc * e0inv)
    return out
