"""Stratification <-> log connection equivalence, cocycle and descent checks."""
from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from prismlab.errors import LeibnizViolation, NotAStratification
from prismlab.linalg import Matrix
from prismlab.pdalg import CosimpConfig, PDElement, one_plus_a_x_pow
from prismlab.series import TruncSeries
from prismlab.strat import (LogConnection, Stratification, check_cocycle,
                            check_leibniz, flat_index, from_connection,
                            multiplication_by_t_power, operator_family,
                            to_connection, verify_key_lemma)

from conftest import random_element


def random_connection(rng, spec, l, m, unif="T"):
    N = [[TruncSeries(spec, m, [random_element(rng, spec, 4) for _ in range(m)], unif)
          for _ in range(l)] for _ in range(l)]
    return LogConnection(spec, unif, l, m, N)


def falling(x, k):
    out = Fraction(1)
    for i in range(k):
        out *= x - i
    return out


class TestOperatorFamily:
    def test_recurrence(self, rng, q3s):
        a = q3s.a_prism()
        conn = random_connection(rng, q3s, 2, 2)
        phi = operator_family(conn.operator().scale(a), a, 5)
        n = conn.size()
        assert phi[0] == Matrix.identity(q3s, n)
        for k in range(4):
            step = phi[1] - Matrix.identity(q3s, n).scale(a * k)
            assert phi[k + 1] == step * phi[k]

    def test_flat_connection_has_constant_family(self, q3):
        conn = LogConnection.trivial(q3, 2, 1)
        a = q3.a_prism()
        strat = from_connection(conn, a, 4)
        for n in range(1, 5):
            assert strat.phi[n].is_zero()

    def test_scalar_degree_two(self, q3):
        c = q3.from_rational(Fraction(5))
        conn = LogConnection.from_constant(q3, 1, c)
        a = q3.a_prism()
        strat = from_connection(conn, a, 2)
        assert strat.phi[1][0, 0] == a * c
        assert strat.phi[2][0, 0] == a * a * c * (c - 1)

    def test_twist_family_is_diagonal_falling_factorial(self, q3s):
        # N = n * id on a rank one module: the degree-j operator acts on
        # T^k by a^j * (n + k)(n + k - 1)...(n + k - j + 1)
        n, m, D = 3, 3, 4
        conn = LogConnection.from_constant(q3s, m, q3s.from_rational(Fraction(n)))
        a = q3s.a_prism()
        strat = from_connection(conn, a, D)
        for j in range(D + 1):
            for k in range(m):
                expect = (a ** j) * q3s.from_rational(falling(Fraction(n + k), j))
                for k2 in range(m):
                    got = strat.phi[j][k2, k]
                    assert got == (expect if k2 == k else q3s.zero())


class TestRoundTrip:
    def test_exact_round_trip_small(self, rng, q3):
        conn = random_connection(rng, q3, 2, 3)
        a = q3.a_prism()
        back = to_connection(from_connection(conn, a, 8))
        assert back == conn
        assert back.unif == "T"

    @pytest.mark.parametrize("l,m", [(1, 1), (2, 2), (3, 4), (2, 4)])
    def test_round_trip_sizes(self, rng, q3s, l, m):
        conn = random_connection(rng, q3s, l, m)
        a = q3s.a_prism()
        assert to_connection(from_connection(conn, a, 2 * m + 2)) == conn

    def test_round_trip_ramified_two(self, rng, q2s):
        conn = random_connection(rng, q2s, 2, 3)
        assert to_connection(from_connection(conn, q2s.a_prism(), 8)) == conn

    def test_round_trip_with_log_constant(self, rng, q3s):
        conn = random_connection(rng, q3s, 2, 2)
        assert to_connection(from_connection(conn, q3s.a_log(), 6)) == conn


class TestLeibnizGate:
    def test_valid_family_passes(self, rng, q3s):
        strat = from_connection(random_connection(rng, q3s, 2, 3), q3s.a_prism(), 6)
        assert check_leibniz(strat)["ok"]

    def test_multiplication_by_t_violates(self, q3):
        l, m = 1, 3
        a = q3.one()
        phi1 = multiplication_by_t_power(q3, l, m, 1)
        phi = [Matrix.identity(q3, l * m), phi1]
        strat = Stratification(q3, l, m, 1, a, phi)
        rep = check_leibniz(strat)
        assert not rep["ok"]
        assert rep["witness"]["power"] == 1
        with pytest.raises(LeibnizViolation):
            to_connection(strat)

    def test_non_unit_degree_zero_rejected(self, rng, q3):
        strat = from_connection(random_connection(rng, q3, 1, 2), q3.a_prism(), 4)
        bad = Stratification(q3, 1, 2, 4, strat.a,
                             [strat.phi[0].scale(2)] + strat.phi[1:])
        with pytest.raises(NotAStratification):
            to_connection(bad)


def cocycle_sides_closed_form(strat):
    """Both sides of the gluing identity by direct triple-sum expansion.

    Only valid on modules with m = 1, where no T-rescaling enters.
    Serves as an independent cross-check of check_cocycle's staged
    composite: returns ([[lhs]], [[rhs]]) indexed [component][generator].
    """
    assert strat.m == 1
    spec, l, D, a = strat.spec, strat.l, strat.D, strat.a
    cfg = CosimpConfig(spec, a, D, 1)
    lhs = [[PDElement.zero(cfg, 2) for _ in range(l)] for _ in range(l)]
    rhs = [[PDElement.zero(cfg, 2) for _ in range(l)] for _ in range(l)]
    for l2 in range(D + 1):
        for mm in range(D + 1 - l2):
            for n in range(D + 1 - l2 - mm):
                mat = strat.phi[l2] * strat.phi[mm + n]
                sign = -1 if mm % 2 else 1
                mono = PDElement.monomial(cfg, 2, (l2 + mm, n), 0,
                                          sign * comb(l2 + mm, l2))
                w = mono * one_plus_a_x_pow(cfg, 2, 1, -(mm + n))
                for i2 in range(l):
                    for j0 in range(l):
                        c = mat[i2, j0]
                        if not c.is_zero():
                            lhs[i2][j0] = lhs[i2][j0] + w.scale(c)
    for n in range(D + 1):
        x2n = PDElement.monomial(cfg, 2, (0, n), 0, 1)
        for i2 in range(l):
            for j0 in range(l):
                c = strat.phi[n][i2, j0]
                if not c.is_zero():
                    rhs[i2][j0] = rhs[i2][j0] + x2n.scale(c)
    return lhs, rhs


class TestCocycle:
    def test_identity_datum_passes(self, q3):
        # at m=1 the identity gluing datum literally has zero higher terms
        phi = [Matrix.identity(q3, 2)] + [Matrix.zero(q3, 2, 2) for _ in range(4)]
        strat = Stratification(q3, 2, 1, 4, q3.one(), phi)
        rep = check_cocycle(strat)
        assert rep["ok"] and rep["degeneracy_ok"]

    def test_identity_datum_higher_modulus(self, q3):
        # for m > 1 the identity datum is the product family of N = 0,
        # whose degree-n operator is a^n * diag(falling factorial of k)
        strat = from_connection(LogConnection.trivial(q3, 2, 3), q3.a_prism(), 6)
        assert check_cocycle(strat)["ok"]

    def test_from_connection_passes_unramified(self, rng, q3):
        strat = from_connection(random_connection(rng, q3, 1, 2), q3.a_prism(), 5)
        assert check_cocycle(strat)["ok"]

    def test_from_connection_passes_ramified(self, rng, q3s):
        strat = from_connection(random_connection(rng, q3s, 2, 3), q3s.a_prism(), 6)
        rep = check_cocycle(strat)
        assert rep["ok"] and rep["witness"] is None

    def test_single_entry_perturbation_fails_in_degree_two(self, rng, q3s):
        strat = from_connection(random_connection(rng, q3s, 2, 2), q3s.a_prism(), 5)
        n = strat.l * strat.m
        delta = Matrix(q3s, [[1 if (r, c) == (1, 2) else 0 for c in range(n)]
                             for r in range(n)])
        rep = check_cocycle(strat.perturbed(2, delta))
        assert not rep["ok"]
        mono = rep["witness"]["monomial"]
        assert mono["x1"] + mono["x2"] == 2

    def test_t_shift_perturbation_fails_in_degree_two(self, rng, q3):
        strat = from_connection(random_connection(rng, q3, 2, 3), q3.a_prism(), 6)
        delta = multiplication_by_t_power(q3, 2, 3, 1)
        rep = check_cocycle(strat.perturbed(2, delta))
        assert not rep["ok"]
        mono = rep["witness"]["monomial"]
        assert mono["x1"] + mono["x2"] == 2
        assert rep["degeneracy_ok"]

    def test_degree_zero_perturbation_breaks_degeneracy(self, rng, q3):
        strat = from_connection(random_connection(rng, q3, 1, 2), q3.a_prism(), 4)
        rep = check_cocycle(strat.perturbed(0, Matrix.identity(q3, 2)))
        assert not rep["ok"]
        assert not rep["degeneracy_ok"]

    def test_closed_form_cross_check(self, rng, q3s):
        strat = from_connection(random_connection(rng, q3s, 2, 1), q3s.a_prism(), 6)
        lhs, rhs = cocycle_sides_closed_form(strat)
        assert all(lhs[i][j] == rhs[i][j] for i in range(2) for j in range(2))
        assert check_cocycle(strat)["ok"]
        bad = strat.perturbed(2, Matrix.identity(q3s, 2))
        lhs2, rhs2 = cocycle_sides_closed_form(bad)
        assert any(lhs2[i][j] != rhs2[i][j] for i in range(2) for j in range(2))
        assert not check_cocycle(bad)["ok"]


class TestKeyLemma:
    def test_scalar_family_passes(self, q3):
        a = q3.a_prism()
        c = q3.from_rational(Fraction(2, 3))
        phi1 = Matrix(q3, [[a * c]])
        phi = operator_family(phi1, a, 10)
        assert verify_key_lemma(phi, a, 3, 6)["ok"]

    def test_random_two_by_two_passes(self, rng, q3s):
        a = q3s.a_prism()
        phi1 = Matrix(q3s, [[random_element(rng, q3s, 4) for _ in range(2)]
                            for _ in range(2)])
        phi = operator_family(phi1, a, 10)
        assert verify_key_lemma(phi, a, 3, 6)["ok"]

    def test_squared_operator_fails_at_first_twist(self, rng, q3s):
        a = q3s.a_prism()
        phi1 = Matrix(q3s, [[random_element(rng, q3s, 4) for _ in range(2)]
                            for _ in range(2)])
        phi = operator_family(phi1, a, 10)
        phi[2] = phi[1] * phi[1]
        rep = verify_key_lemma(phi, a, 3, 6)
        assert not rep["ok"]
        assert rep["witness"]["n"] == 1
        assert rep["witness"]["pd_degree"] == 1

    def test_requires_long_enough_family(self, q3):
        phi = operator_family(Matrix(q3, [[1]]), q3.one(), 4)
        with pytest.raises(AssertionError):
            verify_key_lemma(phi, q3.one(), 3, 6)


@settings(max_examples=20, deadline=None)
@given(l=st.integers(1, 2), m=st.integers(1, 3), seed=st.integers(0, 10 ** 6))
def test_round_trip_property(l, m, seed):
    import random

    from prismlab.field import FieldSpec
    spec = FieldSpec(3, [-3, 0, 1])
    rng = random.Random(seed)
    conn = random_connection(rng, spec, l, m)
    assert to_connection(from_connection(conn, spec.a_prism(), 2 * m + 2)) == conn


@settings(max_examples=10, deadline=None)
@given(m=st.integers(1, 2), seed=st.integers(0, 10 ** 6))
def test_cocycle_property(m, seed):
    import random

    from prismlab.field import FieldSpec
    spec = FieldSpec(3, [-3, 1])
    rng = random.Random(seed)
    strat = from_connection(random_connection(rng, spec, 2, m), spec.a_prism(),
                            2 * m + 1)
    assert check_cocycle(strat)["ok"]
