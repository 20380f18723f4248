from fractions import Fraction

import pytest

from prismlab.errors import ZeroInversion
from prismlab.field import FieldSpec, Valuation, vp_rational

from conftest import random_element, random_rational


def window_dist_oracle(alpha, window=200):
    """Independent lower-bound oracle: max of val(alpha - k) over a window."""
    best = Valuation(None)
    best = None
    for k in range(-window, window + 1):
        v = (alpha - k).val()
        if best is None or best < v:
            best = v
    return best


class TestFieldSpec:
    def test_rejects_non_prime(self):
        with pytest.raises(ValueError):
            FieldSpec(4, [-4, 1])

    def test_rejects_non_eisenstein_coefficient(self):
        with pytest.raises(ValueError):
            FieldSpec(3, [-3, 1, 1])

    def test_rejects_p_squared_constant(self):
        with pytest.raises(ValueError):
            FieldSpec(3, [-9, 0, 1])

    def test_rejects_non_monic(self):
        with pytest.raises(ValueError):
            FieldSpec(3, [-3, 2])

    def test_accepts_examples(self, q3, q3s, q2s, cubic3):
        assert q3.e == 1
        assert q3s.e == 2
        assert q2s.e == 2
        assert cubic3.e == 3


class TestValuation:
    def test_val_of_p(self, q3):
        assert q3.from_rational(3).val() == Valuation(1)

    def test_val_of_pi_quadratic(self, q3s):
        assert q3s.pi().val() == Valuation(Fraction(1, 2))

    def test_val_mixed(self, q3s):
        # min(v3(1/2) + 0, v3(1) + 1/2) = min(0, 1/2)
        alpha = q3s.element([Fraction(1, 2), 1])
        assert alpha.val() == Valuation(0)

    def test_val_zero_is_infinite(self, q3s):
        assert q3s.zero().val().is_infinite

    def test_val_ordering(self):
        assert Valuation(1) < Valuation.infinity()
        assert not (Valuation.infinity() < Valuation(100))
        assert Valuation.infinity() + Valuation(-5) == Valuation.infinity()
        assert Valuation(Fraction(1, 2)) + Valuation(1) == Valuation(Fraction(3, 2))

    def test_val_multiplicative_random(self, q3s, q2s, rng):
        for spec in (q3s, q2s):
            for _ in range(500):
                a = random_element(rng, spec)
                b = random_element(rng, spec)
                assert (a * b).val() == a.val() + b.val()

    def test_ultrametric(self, q3s, rng):
        for _ in range(300):
            a = random_element(rng, q3s)
            b = random_element(rng, q3s)
            va, vb, vs = a.val(), b.val(), (a + b).val()
            lo = va if va < vb else vb
            assert vs >= lo
            if va != vb:
                assert vs == lo


class TestInvert:
    def test_identity(self, q3s):
        assert q3s.one().invert() == q3s.one()

    def test_pi_inverse(self, q3s):
        # pi * (pi/3) = pi^2 / 3 = 1
        assert q3s.pi().invert() == q3s.element([0, Fraction(1, 3)])

    def test_zero_raises(self, q3s):
        with pytest.raises(ZeroInversion):
            q3s.zero().invert()

    def test_random_inverses(self, q3s, q2s, cubic3, rng):
        for spec in (q3s, q2s, cubic3):
            for _ in range(50):
                a = random_element(rng, spec)
                if a.is_zero():
                    continue
                assert a * a.invert() == spec.one()


class TestRingAxioms:
    def test_axioms_random_triples(self, q3s, cubic3, rng):
        for spec in (q3s, cubic3):
            for _ in range(500):
                a = random_element(rng, spec, span=5)
                b = random_element(rng, spec, span=5)
                c = random_element(rng, spec, span=5)
                assert (a * b) * c == a * (b * c)
                assert (a + b) * c == a * c + b * c
                assert a * b == b * a
                assert a + b == b + a
                assert (a + b) + c == a + (b + c)

    def test_minimal_polynomial_kills_pi(self, q3s, q2s, cubic3):
        for spec in (q3s, q2s, cubic3):
            pi = spec.pi()
            acc = spec.zero()
            pw = spec.one()
            for c in spec.ecoeffs:
                acc = acc + pw * c
                pw = pw * pi
            assert acc.is_zero()


class TestDerivAtPi:
    def test_linear(self, q3):
        assert q3.eval_deriv_at_pi() == q3.one()

    def test_quadratic(self, q3s):
        assert q3s.eval_deriv_at_pi() == q3s.element([0, 2])

    def test_cubic_with_valuation(self, cubic3):
        d = cubic3.eval_deriv_at_pi()
        assert d == cubic3.element([3, 0, 3])
        assert d.val() == Valuation(1)

    def test_scalars(self, q3s):
        assert q3s.a_prism() == q3s.element([0, -2])
        assert q3s.a_log() == q3s.from_rational(-6)


class TestDistToIntegers:
    def test_half_is_three_adic_integer(self, q3):
        alpha = q3.from_rational(Fraction(1, 2))
        assert alpha.dist_to_integers().is_infinite
        # window oracle only ever certifies lower bounds here; it must keep growing
        assert window_dist_oracle(alpha, 50) >= Valuation(3)
        assert window_dist_oracle(alpha, 200) >= Valuation(4)

    def test_third_has_pole(self, q3):
        alpha = q3.from_rational(Fraction(1, 3))
        assert alpha.dist_to_integers() == Valuation(-1)
        assert window_dist_oracle(alpha) == Valuation(-1)

    def test_pi_over_three(self, q3s):
        alpha = q3s.element([0, Fraction(1, 3)])
        assert alpha.dist_to_integers() == Valuation(Fraction(-1, 2))
        assert window_dist_oracle(alpha) == Valuation(Fraction(-1, 2))

    def test_translation_invariance(self, q3s, q2s, rng):
        for spec in (q3s, q2s):
            for _ in range(60):
                a = random_element(rng, spec)
                d = a.dist_to_integers()
                for k in range(-10, 11):
                    assert (a - k).dist_to_integers() == d

    def test_infinite_iff_unramified_integral(self, q3, q3s, rng):
        for _ in range(200):
            r = random_rational(rng)
            a = q3.from_rational(r)
            got = a.dist_to_integers().is_infinite
            expect = (vp_rational(r, 3) is None) or vp_rational(r, 3) >= 0
            assert got == expect
        for _ in range(200):
            a = random_element(rng, q3s)
            if a.dist_to_integers().is_infinite:
                assert all(c == 0 for c in a.coords[1:])
