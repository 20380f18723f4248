"""Algebra of log connections: tensor, dual, twists, change of uniformizer,
residual weight analysis, nilpotency tests, cohomology, reduction sequences.
"""
from __future__ import annotations

from fractions import Fraction
from typing import List, Optional, Sequence

from .errors import BadTruncationIndex, NotAUniformizer, RingMismatch
from .field import FieldElement, FieldSpec, Valuation, vp_rational
from .linalg import Matrix, eval_poly, poly_deflate
from .series import TruncSeries, lambda_approx, rewrite_in_uniformizer
from .strat import LogConnection, flat_index, multiplication_by_t_power


def _require_same_ring(M1: LogConnection, M2: LogConnection):
    if M1.spec != M2.spec:
        raise RingMismatch("different base fields")
    if M1.unif != M2.unif:
        raise RingMismatch(f"different uniformizers: {M1.unif!r} vs {M2.unif!r}")
    if M1.m != M2.m:
        raise RingMismatch("different truncation moduli")


def tensor(M1: LogConnection, M2: LogConnection) -> LogConnection:
    """Tensor product connection, matrix N1 (x) I + I (x) N2."""
    _require_same_ring(M1, M2)
    spec, m = M1.spec, M1.m
    l1, l2 = M1.l, M2.l
    zero = TruncSeries.zero(spec, m, M1.unif)
    N = [[zero for _ in range(l1 * l2)] for _ in range(l1 * l2)]
    for i1 in range(l1):
        for j1 in range(l1):
            for i2 in range(l2):
                for j2 in range(l2):
                    s = zero
                    if i2 == j2:
                        s = s + M1.N[i1][j1]
                    if i1 == j1:
                        s = s + M2.N[i2][j2]
                    N[i1 * l2 + i2][j1 * l2 + j2] = s
    return LogConnection(spec, M1.unif, l1 * l2, m, N)


def dual(M: LogConnection) -> LogConnection:
    N = [[-M.N[j][i] for j in range(M.l)] for i in range(M.l)]
    return LogConnection(M.spec, M.unif, M.l, M.m, N)


def bk_twist(M: LogConnection, n) -> LogConnection:
    """Twist by the rank-1 module with connection shift n: matrix N + n*id."""
    shift = TruncSeries.constant(M.spec, M.m, n, M.unif)
    N = [[M.N[i][j] + shift if i == j else M.N[i][j] for j in range(M.l)]
         for i in range(M.l)]
    return LogConnection(M.spec, M.unif, M.l, M.m, N)


def _log_multiplier(y: TruncSeries) -> TruncSeries:
    """The unit series c with c * T * y' = y, normalized for exact round trips.

    The quotient (y/T) / y' only determines c below its top coefficient,
    because the T^(m-1) coefficient of y' would need the dropped degree-m
    term of y; that slot is a free gauge. Composing the naive forward and
    backward multipliers yields 1 + (m-1) * r * y1^m * T^(m-1), where r is
    the degree-m coefficient of the reversion of y and y1 its slope, so
    splitting the defect evenly - a factor 1 + ((1-m)/2) r y1^m T^(m-1)
    on each leg - makes the rewrite along y and the rewrite back along the
    reversion of y compose to the identity exactly. (The splitting is
    consistent both ways because the reversion's own defect coefficient is
    r * y1^(m+1).)
    """
    spec, m = y.spec, y.m
    base = y.shift_down()
    c = base * y.derivative().invert_unit()
    if m >= 2:
        lift = TruncSeries(spec, m + 1, list(y.coeffs), y.unif)
        r = lift.reversion().coeffs[m]
        if not r.is_zero():
            y1 = y.coeffs[1]
            top = r * y1 ** m * Fraction(1 - m, 2)
            corr = [spec.one()] + [spec.zero()] * (m - 2) + [top]
            c = c * TruncSeries(spec, m, corr, y.unif)
    return c


def change_uniformizer(M: LogConnection, y: TruncSeries) -> LogConnection:
    """Transport the connection to the coordinate y; matrix c*N rewritten in y."""
    if y.spec != M.spec or y.m != M.m:
        raise RingMismatch("substitution series lives over a different ring")
    if M.m == 1:
        # nothing to transport at modulus 1: constants, multiplier 1
        return LogConnection(M.spec, y.unif, M.l, 1,
                             [[s.with_unif(y.unif) for s in row] for row in M.N])
    if not y.is_uniformizer():
        raise NotAUniformizer("substitution series must vanish to exact order one")
    c = _log_multiplier(y)
    N = [[rewrite_in_uniformizer(c * M.N[i][j], y) for j in range(M.l)]
         for i in range(M.l)]
    return LogConnection(M.spec, y.unif, M.l, M.m, N)


def kummer_sen_operator(M: LogConnection, F: int) -> LogConnection:
    """Express the connection in the cyclotomic-free coordinate lambda_F.

    Requires the module to be presented in the coordinate u - pi. Also
    verifies, exactly in the truncated ring, that clearing the unit u from
    numerator and denominator of the transport multiplier is legitimate:
    (1/(u l'))(u l/T) = (1/l')(l/T) with T = u - pi.
    """
    if M.unif != "u-pi":
        raise RingMismatch("module must be presented in the coordinate u-pi")
    spec, m = M.spec, M.m
    lam = lambda_approx(spec, F, m)
    if m >= 2:
        u = TruncSeries(spec, m, [spec.pi(), spec.one()], "u-pi")
        lhs = (u * lam.derivative()).invert_unit() * (u * lam.shift_down())
        rhs = lam.derivative().invert_unit() * lam.shift_down()
        assert lhs == rhs
    return change_uniformizer(M, lam)


def _divisors(n: int) -> List[int]:
    n = abs(n)
    out = [d for d in range(1, n + 1) if n % d == 0]
    return out or [1]


def _root_candidates(spec: FieldSpec, chi: Sequence[FieldElement],
                     extra: Sequence[FieldElement]) -> List[FieldElement]:
    cands: List[FieldElement] = []
    seen = set()

    def push(x: FieldElement):
        if x not in seen:
            seen.add(x)
            cands.append(x)

    for x in extra:
        push(x)
    for n in range(0, 11):
        push(spec.from_rational(Fraction(n)))
        push(spec.from_rational(Fraction(-n)))
    # every elementary symmetric function of the roots shows up in chi, so
    # harvest numerator/denominator divisors from all coefficients
    nums, dens = set(), set()
    for coef in chi[:-1]:
        for c in coef.coords:
            if c != 0:
                nums.update(_divisors(c.numerator))
                dens.update(_divisors(c.denominator))
    if not nums:
        nums, dens = {1}, {1}
    dens.add(1)
    for num in sorted(nums):
        for den in sorted(dens):
            f = Fraction(num, den)
            for j in range(spec.e):
                scaled = spec.from_rational(f) * spec.pi() ** j
                for shift in range(-2, 3):
                    push(scaled + shift)
                    push(-scaled + shift)
    return cands


def split_eigenvalues(mat: Matrix, candidates: Sequence[FieldElement] = ()):
    """(charpoly, eigenvalues with multiplicity) - eigenvalues None if the
    polynomial does not fully split over the candidate search."""
    spec = mat.spec
    chi = mat.charpoly()
    roots: List[FieldElement] = []
    work = list(chi)
    cands = _root_candidates(spec, chi, candidates)
    progress = True
    while len(work) > 1 and progress:
        progress = False
        for r in cands:
            if eval_poly(work, r).is_zero():
                roots.append(r)
                work = poly_deflate(work, r)
                progress = True
                break
    return chi, (roots if len(roots) == len(mat.rows) else None)


def residual_sen(M: LogConnection, candidates: Sequence[FieldElement] = ()) -> dict:
    """Residual weight report: exact charpoly of N(0) and exact roots in K.

    Roots are searched by trial evaluation over a deterministic candidate
    list (supplied hints, small integers, and divisor-scaled pi-power
    shifts read off the coefficients) with synthetic deflation; the split flag
    is set only when all l roots are found, with multiplicity.
    """
    spec = M.spec
    chi, weights = split_eigenvalues(M.residual_matrix(), candidates)
    split = weights is not None
    report = {"chi": chi, "split": split,
              "weights": weights if split else None, "per_weight": None}
    if split:
        vp = spec.a_prism().val()
        vl = spec.a_log().val()
        per = []
        for w in weights:
            d = w.dist_to_integers()
            per.append({"weight": w, "dist": d,
                        "margin_prism": vp + d, "margin_log": vl + d,
                        "nearest_integer_certificate": _nearest_integer(w)})
        report["per_weight"] = per
    return report


def _nearest_integer(w: FieldElement) -> Optional[int]:
    """An integer witnessing the distance to Z when that distance is finite.

    If the rational coordinate has a pole (negative p-adic valuation) no
    integer can improve on 0. Otherwise the distance is carried by the
    higher coordinates and is realized by matching the rational coordinate
    modulo a sufficiently high power of p.
    """
    d = w.dist_to_integers()
    if d.is_infinite:
        return None
    p = w.spec.p
    a0 = w.coords[0]
    v0 = vp_rational(a0, p)
    if a0 == 0 or (v0 is not None and v0 < 0):
        return 0
    t = max(1, int(d.value) + 2)
    mod = p ** t
    return (a0.numerator * pow(a0.denominator, -1, mod)) % mod


def matrix_gauss_val(mat: Matrix) -> Valuation:
    best = Valuation.infinity()
    for row in mat.rows:
        for x in row:
            v = x.val()
            if v < best:
                best = v
    return best


def probe_nilpotency(M: LogConnection, a, n_max: int = 200,
                     threshold: int = 50, window: int = 20) -> dict:
    """Valuation trace of a^n * (residual - 0)(residual - 1)...(residual - n + 1).

    Semi-decision procedure: the verdict is driven by the tail behaviour
    of the Gauss valuations and by exact vanishing, never by rounding.
    """
    spec = M.spec
    if not isinstance(a, FieldElement):
        a = spec.from_rational(Fraction(a))
    res = M.residual_matrix()
    va = a.val()
    P = Matrix.identity(spec, M.l)
    trace = [matrix_gauss_val(P)]
    status = "Unknown"
    for n in range(1, n_max + 1):
        P = (res - Matrix.identity(spec, M.l).scale(n - 1)) * P
        if P.is_zero():
            trace.append(Valuation.infinity())
            status = "ProbeConvergent"
            break
        if va.is_infinite:
            trace.append(Valuation.infinity())
            status = "ProbeConvergent"
            break
        trace.append(Valuation(n * va.value) + matrix_gauss_val(P))
    else:
        tail = trace[-(window + 1):]
        if trace[-1] >= threshold and trace[-1] > tail[0]:
            status = "ProbeConvergent"
        elif all(tail[i + 1] < tail[i] for i in range(len(tail) - 1)):
            status = "ProbeDivergent"
    return {"status": status, "trace": trace}


def check_nilpotent(M: LogConnection, a, n_max: int = 200,
                    threshold: int = 50, window: int = 20) -> dict:
    """Decide a-nilpotency: exactly via residual weights when they split
    over K, by the valuation probe otherwise."""
    spec = M.spec
    if not isinstance(a, FieldElement):
        a = spec.from_rational(Fraction(a))
    sen = residual_sen(M)
    if sen["split"]:
        va = a.val()
        margins = [va + w.dist_to_integers() for w in sen["weights"]]
        ok = all(mg > 0 for mg in margins)
        return {"status": "ProvenNilpotent" if ok else "ProvenNotNilpotent",
                "evidence": {"weights": sen["weights"], "margins": margins}}
    probe = probe_nilpotency(M, a, n_max, threshold, window)
    return {"status": probe["status"], "evidence": {"trace": probe["trace"]}}


def classify_ndR(M: LogConnection, n_max: int = 200, threshold: int = 50,
                 window: int = 20) -> dict:
    """Nearly and log-nearly de Rham flags via the two canonical scalars."""
    spec = M.spec
    sen = residual_sen(M)
    if sen["split"]:
        near = all(pw["margin_prism"] > 0 for pw in sen["per_weight"])
        log_near = all(pw["margin_log"] > 0 for pw in sen["per_weight"])
        return {"status": "proven", "nearly_dR": near, "log_nearly_dR": log_near,
                "weights": sen["weights"], "per_weight": sen["per_weight"]}
    return {"status": "Unknown", "nearly_dR": None, "log_nearly_dR": None,
            "probe_prism": probe_nilpotency(M, spec.a_prism(), n_max, threshold, window),
            "probe_log": probe_nilpotency(M, spec.a_log(), n_max, threshold, window)}


def cohomology(M: LogConnection) -> dict:
    """Kernel and cokernel of the connection operator on the flattened basis.

    h1 representatives follow the echelon convention: standard basis
    vectors at the non-pivot coordinates of the column space.
    """
    op = M.operator()
    n = M.size()
    ker = op.kernel_basis()
    pivots = op.column_pivots()
    reps = [i for i in range(n) if i not in pivots]
    return {"h0": len(ker), "h1": n - len(pivots),
            "h0_basis": ker, "h1_representatives": reps}


def reduction_ses(M: LogConnection, k: int) -> dict:
    """The exact sequence 0 -> (M mod T^(m-k), grade shift k) -> M -> M mod T^k -> 0.

    The inclusion is multiplication by T^k; it intertwines the sub
    connection (shifted by k) with the ambient one. Exactness is verified
    by an exact rank count.
    """
    if not 0 < k < M.m:
        raise BadTruncationIndex(f"need 0 < k < {M.m}, got {k}")
    spec, l, m = M.spec, M.l, M.m
    msub = m - k
    sub_N = [[M.N[i][j].truncate(msub) + (k if i == j else 0) for j in range(l)]
             for i in range(l)]
    sub = LogConnection(spec, M.unif, l, msub, sub_N)
    quot_N = [[M.N[i][j].truncate(k) for j in range(l)] for i in range(l)]
    quotient = LogConnection(spec, M.unif, l, k, quot_N)
    # inclusion T^j e_i -> T^(j+k) e_i, projection = truncation
    incl = Matrix(spec, [[1 if r == c + l * k else 0 for c in range(l * msub)]
                         for r in range(l * m)])
    proj = Matrix(spec, [[1 if r == c else 0 for c in range(l * m)]
                         for r in range(l * k)])
    intertwines = (M.operator() * incl) == (incl * sub.operator())
    composes_to_zero = (proj * incl).is_zero()
    exact = (incl.rank() == l * msub and proj.rank() == l * k
             and composes_to_zero and incl.rank() + proj.rank() == l * m)
    return {"sub": sub, "quotient": quotient, "inclusion": incl,
            "projection": proj, "intertwines": intertwines, "exact": exact}
