"""Stratifications on free K[[T]]/T^m-modules and log connections.

A log connection is an l x l matrix N of truncated series: the operator
x -> T dx/dT + N x on column vectors. A stratification is the family
phi_0..phi_D of K-linear operators on the flattened K-basis
{T^k e_j : 0 <= k < m, 1 <= j <= l}; the two are equivalent via
phi_1 = a * nabla and the descending product family.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb
from typing import List

from .errors import (LeibnizViolation, NotAStratification, RingMismatch)
from .field import FieldElement, FieldSpec
from .linalg import Matrix
from .pdalg import CosimpConfig, PDElement, face, one_plus_a_x_pow
from .series import TruncSeries


def flat_index(k: int, j: int, l: int) -> int:
    """Position of T^k e_j in the flattened basis, T-degree major."""
    return k * l + j


class LogConnection:
    def __init__(self, spec: FieldSpec, unif: str, l: int, m: int, N: List[List[TruncSeries]]):
        assert l >= 1 and m >= 1
        self.spec = spec
        self.unif = unif
        self.l = l
        self.m = m
        if len(N) != l or any(len(row) != l for row in N):
            raise RingMismatch(f"matrix must be {l}x{l}")
        for row in N:
            for s in row:
                if s.spec != spec or s.m != m:
                    raise RingMismatch("matrix entry over a different ring")
        self.N = [list(row) for row in N]

    @classmethod
    def trivial(cls, spec, l, m, unif="T"):
        z = TruncSeries.zero(spec, m, unif)
        return cls(spec, unif, l, m, [[z for _ in range(l)] for _ in range(l)])

    @classmethod
    def from_constant(cls, spec, m, c, unif="T"):
        """Rank 1 with constant matrix entry c."""
        return cls(spec, unif, 1, m, [[TruncSeries.constant(spec, m, c, unif)]])

    def size(self) -> int:
        return self.l * self.m

    def operator(self) -> Matrix:
        """The l*m x l*m matrix of x -> T dx/dT + N x on the flattened basis."""
        n = self.size()
        rows = [[self.spec.zero() for _ in range(n)] for _ in range(n)]
        for k in range(self.m):
            for j in range(self.l):
                col = flat_index(k, j, self.l)
                rows[col][col] = rows[col][col] + k
                for i in range(self.l):
                    s = self.N[i][j]
                    for d in range(self.m - k):
                        c = s.coeffs[d]
                        if not c.is_zero():
                            row = flat_index(k + d, i, self.l)
                            rows[row][col] = rows[row][col] + c
        return Matrix(self.spec, rows)

    def residual_matrix(self) -> Matrix:
        """N mod T, the l x l matrix whose eigenvalues are the residual weights."""
        return Matrix(self.spec, [[self.N[i][j].coeffs[0] for j in range(self.l)]
                                  for i in range(self.l)])

    def __eq__(self, other):
        if not isinstance(other, LogConnection):
            return NotImplemented
        return (self.spec == other.spec and self.l == other.l and self.m == other.m
                and all(self.N[i][j] == other.N[i][j]
                        for i in range(self.l) for j in range(self.l)))

    def __repr__(self):
        return f"LogConnection(l={self.l}, m={self.m}, unif={self.unif!r})"


def multiplication_by_t_power(spec: FieldSpec, l: int, m: int, d: int) -> Matrix:
    n = l * m
    rows = [[spec.zero() for _ in range(n)] for _ in range(n)]
    for k in range(m - d):
        for j in range(l):
            rows[flat_index(k + d, j, l)][flat_index(k, j, l)] = spec.one()
    return Matrix(spec, rows)


def operator_family(phi1: Matrix, a: FieldElement, count: int) -> List[Matrix]:
    """[phi_0, ..., phi_{count-1}] with phi_{n+1} = (phi_1 - n*a) o phi_n."""
    n = len(phi1.rows)
    out = [Matrix.identity(phi1.spec, n)]
    for k in range(count - 1):
        shifted = phi1 - Matrix.identity(phi1.spec, n).scale(a * k)
        out.append(shifted * out[-1])
    return out


class Stratification:
    def __init__(self, spec: FieldSpec, l: int, m: int, D: int, a: FieldElement,
                 phi: List[Matrix]):
        assert D >= 0
        if len(phi) != D + 1:
            raise NotAStratification(f"need operators up to pd-degree {D}")
        n = l * m
        for op in phi:
            if len(op.rows) != n:
                raise NotAStratification(f"operators must be {n}x{n}")
        self.spec = spec
        self.l = l
        self.m = m
        self.D = D
        self.a = a if isinstance(a, FieldElement) else spec.from_rational(Fraction(a))
        self.phi = list(phi)

    def __eq__(self, other):
        if not isinstance(other, Stratification):
            return NotImplemented
        return (self.spec == other.spec and self.l == other.l and self.m == other.m
                and self.D == other.D and self.a == other.a and self.phi == other.phi)

    def perturbed(self, n: int, delta: Matrix) -> "Stratification":
        phi = list(self.phi)
        phi[n] = phi[n] + delta
        return Stratification(self.spec, self.l, self.m, self.D, self.a, phi)


def from_connection(conn: LogConnection, a, D: int) -> Stratification:
    if not isinstance(a, FieldElement):
        a = conn.spec.from_rational(Fraction(a))
    phi1 = conn.operator().scale(a)
    phi = operator_family(phi1, a, D + 1)
    return Stratification(conn.spec, conn.l, conn.m, D, a, phi)


def check_leibniz(strat: Stratification) -> dict:
    """phi_1(T^d x) = T^d phi_1(x) + a*d*T^d x for d = 0..m-1, as matrices."""
    spec, l, m, a = strat.spec, strat.l, strat.m, strat.a
    if strat.D < 1:
        return {"ok": True, "witness": None}
    phi1 = strat.phi[1]
    for d in range(m):
        md = multiplication_by_t_power(spec, l, m, d)
        gap = phi1 * md - md * phi1 - md.scale(a * d)
        if not gap.is_zero():
            where = next((r, c) for r in range(l * m) for c in range(l * m)
                         if not gap[r, c].is_zero())
            return {"ok": False, "witness": {"power": d, "entry": where}}
    return {"ok": True, "witness": None}


def to_connection(strat: Stratification, unif: str = "T") -> LogConnection:
    spec, l, m = strat.spec, strat.l, strat.m
    if not strat.phi[0] == Matrix.identity(spec, l * m):
        raise NotAStratification("operator of pd-degree zero is not the identity")
    leib = check_leibniz(strat)
    if not leib["ok"]:
        raise LeibnizViolation(f"twisted Leibniz law fails at T^{leib['witness']['power']}")
    if strat.D < 1:
        return LogConnection.trivial(spec, l, m, unif)
    op = strat.phi[1].scale(strat.a.invert())
    N = []
    for i in range(l):
        row = []
        for j in range(l):
            coeffs = [op[flat_index(k, i, l), flat_index(0, j, l)] for k in range(m)]
            row.append(TruncSeries(spec, m, coeffs, unif))
        N.append(row)
    return LogConnection(spec, unif, l, m, N)


def _unflatten(spec, column, l, m) -> List[TruncSeries]:
    return [TruncSeries(spec, m, [column[flat_index(k, j, l)] for k in range(m)])
            for j in range(l)]


def _column(mat: Matrix, col: int) -> list:
    return [mat[r, col] for r in range(len(mat.rows))]


def check_cocycle(strat: Stratification) -> dict:
    """Compare both composites of the gluing datum on the level-2 ring.

    For each flattened basis vector T^k e_j, the inner-then-outer composite
    is expanded through the twisted face maps and compared against the
    direct outer expansion, coefficient by coefficient on monomials
    X1^[k1] X2^[k2] T^j. Running over the whole flattened basis (not just
    the T^0 generators) makes the check sensitive to every matrix entry of
    the family. Also checks that the degeneracy pullback is the identity.
    """
    spec, l, m, D, a = strat.spec, strat.l, strat.m, strat.D, strat.a
    cfg = CosimpConfig(spec, a, D, m)
    report = {"ok": True, "degeneracy_ok": True, "witness": None}
    if not strat.phi[0] == Matrix.identity(spec, l * m):
        report["ok"] = False
        report["degeneracy_ok"] = False
        return report

    q = face(0, PDElement.variable(cfg, 1, 1))
    gam_q = [q.gamma(n) for n in range(D + 1)]
    tw_pow = [one_plus_a_x_pow(cfg, 2, 1, k) for k in range(m)]
    t_mono = [PDElement.monomial(cfg, 2, (0, 0), k, 1) for k in range(m)]

    def embed_plain(f: TruncSeries) -> PDElement:
        out = PDElement.zero(cfg, 2)
        for k, c in enumerate(f.coeffs):
            if not c.is_zero():
                out = out + t_mono[k].scale(c)
        return out

    def embed_twisted(f: TruncSeries) -> PDElement:
        out = PDElement.zero(cfg, 2)
        for k, c in enumerate(f.coeffs):
            if not c.is_zero():
                out = out + (t_mono[k] * tw_pow[k]).scale(c)
        return out

    cols = {}

    def phi_col(n, c):
        # column c of phi_n as an l-vector of truncated series; the module
        # generators occupy columns 0..l-1 (flat index of T^0 e_j is j)
        if (n, c) not in cols:
            cols[(n, c)] = _unflatten(spec, _column(strat.phi[n], c), l, m)
        return cols[(n, c)]

    x1 = [PDElement.monomial(cfg, 2, (mm, 0), 0, 1) for mm in range(D + 1)]
    x2 = [PDElement.monomial(cfg, 2, (0, n), 0, 1) for n in range(D + 1)]

    for x0 in range(l * m):
        inner = [PDElement.zero(cfg, 2) for _ in range(l)]
        for n in range(D + 1):
            v = phi_col(n, x0)
            for i in range(l):
                if not v[i].is_zero():
                    inner[i] = inner[i] + embed_twisted(v[i]) * gam_q[n]
        lhs = [PDElement.zero(cfg, 2) for _ in range(l)]
        for i in range(l):
            if inner[i].is_zero():
                continue
            for mm in range(D + 1):
                w = phi_col(mm, i)
                factor = x1[mm] * inner[i]
                for i2 in range(l):
                    if not w[i2].is_zero():
                        lhs[i2] = lhs[i2] + embed_plain(w[i2]) * factor
        rhs = [PDElement.zero(cfg, 2) for _ in range(l)]
        for n in range(D + 1):
            v = phi_col(n, x0)
            for i2 in range(l):
                if not v[i2].is_zero():
                    rhs[i2] = rhs[i2] + embed_plain(v[i2]) * x2[n]
        best = None
        for i2 in range(l):
            diff = lhs[i2] - rhs[i2]
            for (ks, j) in diff.terms:
                key = (ks[0] + ks[1], ks[0], j, i2)
                if best is None or key < best[0]:
                    best = (key, i2, ks, j)
        if best is not None:
            _, i2, (k1, k2), j = best
            report["ok"] = False
            report["witness"] = {"generator": x0, "component": i2,
                                 "monomial": {"x1": k1, "x2": k2, "t": j}}
            return report
    return report


def verify_key_lemma(phi: List[Matrix], a: FieldElement, n_max: int, D: int) -> dict:
    """Check the one-variable expansion identity for the operator family.

    For each n <= n_max, the double sum over (i, mm) of
    phi_i o phi_{mm+n} * (1+aX)^(-mm-n) * (-1)^mm * C(i+mm, i) * X^[i+mm]
    must reduce to the constant phi_n, coefficient by coefficient in X^[k]
    for k <= D. Requires the family up to index n_max + D.
    """
    assert len(phi) >= n_max + D + 1, "operator family too short for this check"
    spec = phi[0].spec
    size = len(phi[0].rows)
    cfg = CosimpConfig(spec, a, D, 1)
    prod_cache = {}

    def pp(i, k):
        if (i, k) not in prod_cache:
            prod_cache[(i, k)] = phi[i] * phi[k]
        return prod_cache[(i, k)]

    scal = {}
    for n in range(n_max + 1):
        for i in range(D + 1):
            for mm in range(D + 1 - i):
                s = one_plus_a_x_pow(cfg, 1, 1, -(mm + n))
                sign = -1 if mm % 2 else 1
                coef = sign * comb(i + mm, i)
                scal[(n, i, mm)] = (PDElement.monomial(cfg, 1, (i + mm,), 0, coef) * s)

    zero = Matrix.zero(spec, size, size)
    for k in range(D + 1):
        for n in range(n_max + 1):
            acc = zero
            for i in range(k + 1):
                for mm in range(k + 1 - i):
                    c = scal[(n, i, mm)].coeff((k,))
                    if not c.is_zero():
                        acc = acc + pp(i, mm + n).scale(c)
            target = phi[n] if k == 0 else zero
            if not acc == target:
                gap = acc - target
                where = next((r, cc) for r in range(size) for cc in range(size)
                             if not gap[r, cc].is_zero())
                return {"ok": False,
                        "witness": {"n": n, "pd_degree": k, "entry": where}}
    return {"ok": True, "witness": None}
