"""The acceptance suite: every gate criterion as a callable check.

Each criterion returns a CriterionResult with a pass/fail verdict, the
measured wall time (the stated budgets are enforced), and a detail string.
`run_all` prints one line per criterion and reports overall success; the
CLI command `verify all` and tests/test_acceptance.py both run these.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass

from . import binom, em, homalg, homotopy, witt
from .homalg import FgAb, SparseIntMatrix
from .rings import RingSpec, poly_gen, ring_from_int


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float
    budget: float
    detail: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.number}: {self.title} "
                f"({self.seconds:.2f}s / budget {self.budget:.0f}s) {self.detail}")


def _result(number, title, budget, started, ok, detail="") -> CriterionResult:
    elapsed = time.time() - started
    return CriterionResult(number, title, ok and elapsed < budget, elapsed,
                           budget, detail or ("ok" if ok else "FAILED"))


def criterion_1() -> CriterionResult:
    """Degree-one cohomology is the circle: Z in (d,w) = (0,0) and (1,1)."""
    t0 = time.time()
    rep = em.cohomology_KH1(8, 9)
    ok = True
    bad = []
    for d in range(10):
        for w in range(9):
            got = rep.weights.get(w, {}).get(d, FgAb.zero())
            expect = FgAb(1) if (d, w) in ((0, 0), (1, 1)) else FgAb.zero()
            if got != expect:
                ok = False
                bad.append((d, w, str(got)))
    detail = f"totals match circle; offenders={bad}" if bad else \
        "H^0 = Z at w=0, H^1 = Z at w=1, all other (d,w) vanish"
    return _result(1, "degree-1 stack cohomology = H*(S^1)", 10.0, t0, ok, detail)


def criterion_2() -> CriterionResult:
    """Degree-two table through degree 6 is Z,0,Z,0,Z,0,Z."""
    t0 = time.time()
    rep = em.cohomology_KHn(2, 6, 6, normalized=True)
    expect = {d: (FgAb(1) if d % 2 == 0 else FgAb.zero()) for d in range(7)}
    ok = all(rep.totals[d] == expect[d] for d in range(7)) and rep.all_match()
    detail = "; ".join(f"H^{d}={rep.totals[d]}" for d in range(7))
    return _result(2, "degree-2 stack cohomology = Z[x], |x| = 2", 600.0, t0, ok, detail)


def criterion_3() -> CriterionResult:
    """Bar homology over the circle cochains is one line in total degree 0."""
    t0 = time.time()
    res = em.bar_tor_S1(10)
    ok = all(res.get(s, {}) == {0: FgAb(1)} for s in range(11))
    return _result(3, "two-sided bar over C*(S^1) concentrated in degree 0",
                   5.0, t0, ok, "rank one in total degree 0 for every s <= 10")


def criterion_4() -> CriterionResult:
    """Embedded integer points are fixed; F_n on lines; F_n F_m = F_nm."""
    t0 = time.time()
    spec = RingSpec.integers()
    ok = True
    notes = []
    for a in range(-20, 21):
        point = witt.embed_H(binom.point_from_integer(a, 14))
        fixed, report = witt.is_partial_fixed(point, [2, 3, 5, 7])
        if not fixed:
            ok = False
            notes.append(f"a={a}: {report}")
    for n in range(1, 7):
        for a in range(-20, 21):
            fx = witt.frobenius(n, witt.line(spec, a, 14))
            expect = witt.line(spec, a ** n, 14 // n)
            if fx != expect:
                ok = False
                notes.append(f"F_{n}(1-{a}T) wrong")
    rng = random.Random(4)
    for n, m in ((2, 2), (2, 3), (3, 2)):
        for _ in range(5):
            x = witt.from_int_list(spec, [rng.randint(-9, 9) for _ in range(12)])
            lhs = witt.frobenius(n, witt.frobenius(m, x))
            rhs = witt.truncate(witt.frobenius(n * m, x), 12 // (n * m))
            if lhs != rhs:
                ok = False
                notes.append(f"F_{n}F_{m} != F_{n*m}")
    return _result(4, "integer points are simultaneous Frobenius fixed points",
                   5.0, t0, ok, "; ".join(notes) or
                   "|a| <= 20 at N=14, primes <= 7; lines for n <= 6; F_n F_m = F_nm")


def criterion_5() -> CriterionResult:
    """ghost_m(F_n x) = ghost_nm(x) identically in Z[a1..a12]."""
    t0 = time.time()
    spec = RingSpec.poly_over_z(*(f"a{i}" for i in range(1, 13)))
    generic = witt.WittVec(spec, tuple(poly_gen(spec, f"a{i}") for i in range(1, 13)))
    full = witt.ghost(generic).values
    ok = True
    notes = []
    for n in range(1, 5):
        table = witt.frobenius_table(n, 12)
        for k in range(1, 12 // n + 1):
            if any(not isinstance(c, int) for c in table.polys[k - 1].values()):
                ok = False
                notes.append(f"Phi_{n},{k} has a non-integer coefficient")
        fx = witt.frobenius(n, generic)
        gh = witt.ghost(fx).values
        for m in range(1, 12 // n + 1):
            if gh[m - 1] != full[n * m - 1]:
                ok = False
                notes.append(f"ghost_{m}(F_{n}) != ghost_{n*m}")
    return _result(5, "ghost/Frobenius universal identity in Z[a1..a12]",
                   30.0, t0, ok, "; ".join(notes) or
                   "n <= 4, nm <= 12, identically; all table coefficients integral")


def criterion_6() -> CriterionResult:
    """Finite-field fixed-point enumeration and the mod-reduction comparison.

    The second half asserts, as stated, that reducing coefficients mod 2
    maps the Mod(4) partial fixed set bijectively onto the Mod(2) one at the
    same truncation for N <= 3.  The enumeration shows the Mod(4) fixed sets
    are strictly larger (the fixed-point equations gain spurious solutions
    mod 4), so this check reports its honest failure with the counts.
    """
    t0 = time.time()
    spec2 = RingSpec.mod(2)
    fixed = witt.enumerate_partial_fixed(spec2, 2, [2])
    expected = {witt.embed_H(binom.point_from_integer(a, 2, spec2)) for a in range(4)}
    first = len(fixed) == 4 and set(fixed) == expected
    notes = [f"Mod(2) N=2: {len(fixed)} vectors, equal to embeds of Z/4: {first}"]
    second = True
    for n in (1, 2, 3):
        rep = witt.reduction_fixed_report(4, 2, n, [2])
        notes.append(f"N={n}: counts {rep['count_big']}->{rep['count_small']}, "
                     f"bijective={rep['bijective']}")
        if not rep["bijective"]:
            second = False
    return _result(6, "constant-sheaf desk experiment over Mod(2)/Mod(4)",
                   10.0, t0, first and second, "; ".join(notes))


def criterion_7() -> CriterionResult:
    """Witt group laws over Mod(m) and ring laws over Z, randomized."""
    t0 = time.time()
    rng = random.Random(7)
    ok = True
    for _ in range(800):  # group laws, cheap
        m = rng.randint(2, 16)
        n = rng.randint(1, 8)
        spec = RingSpec.mod(m)
        def rv():
            return witt.from_int_list(spec, [rng.randrange(m) for _ in range(n)])
        x, y, z = rv(), rv(), rv()
        zero = witt.zero_vec(spec, n)
        if witt.witt_add(x, y) != witt.witt_add(y, x):
            ok = False
        if witt.witt_add(witt.witt_add(x, y), z) != witt.witt_add(x, witt.witt_add(y, z)):
            ok = False
        if witt.witt_add(x, witt.witt_neg(x)) != zero or witt.witt_add(x, zero) != x:
            ok = False
        if witt.witt_neg(witt.witt_neg(x)) != x:
            ok = False
    spec = RingSpec.integers()
    for _ in range(200):  # ring laws
        n = rng.randint(1, 6)
        def rz():
            return witt.from_int_list(spec, [rng.randint(-4, 4) for _ in range(n)])
        x, y, z = rz(), rz(), rz()
        unit = witt.mult_unit(spec, n)
        if witt.witt_mul(witt.witt_mul(x, y), z) != witt.witt_mul(x, witt.witt_mul(y, z)):
            ok = False
        lhs = witt.witt_mul(x, witt.witt_add(y, z))
        rhs = witt.witt_add(witt.witt_mul(x, y), witt.witt_mul(x, z))
        if lhs != rhs:
            ok = False
        if witt.witt_mul(x, unit) != x or witt.witt_mul(x, y) != witt.witt_mul(y, x):
            ok = False
    return _result(7, "Witt group and ring axioms on 1000 randomized instances",
                   30.0, t0, ok, "800 group-law + 200 ring-law instances")


def criterion_8() -> CriterionResult:
    """Hopf axioms for the binomial ring through weight 10."""
    t0 = time.time()
    ok = True
    notes = []
    for n in range(11):
        b = binom.BinPoly.basis(n)
        d = binom.comul(b)
        left = d.apply_comul(0)
        right = d.apply_comul(1)
        if left != right:
            ok = False
            notes.append(f"coassociativity fails at b{n}")
        # counit both sides
        from_left = binom.BinPoly({k[1]: v for k, v in d.terms.items() if k[0] == 0})
        from_right = binom.BinPoly({k[0]: v for k, v in d.terms.items() if k[1] == 0})
        if from_left != b or from_right != b:
            ok = False
            notes.append(f"counit law fails at b{n}")
        if any(sum(k) != n for k in d.terms):
            ok = False
            notes.append(f"comultiplication not weight-homogeneous at b{n}")
        # antipode: multiply S (x) id then collapse
        collapsed = binom.BinPoly.zero()
        for (i, j), v in d.terms.items():
            collapsed = collapsed + binom.mul(binom.antipode(binom.BinPoly.basis(i)),
                                              binom.BinPoly.basis(j)).scale(v)
        expect = binom.BinPoly.const(1) if n == 0 else binom.BinPoly.zero()
        if collapsed != expect:
            ok = False
            notes.append(f"antipode law fails at b{n}")
    # bialgebra compatibility on generator pairs
    for i in range(9):
        for j in range(9 - i):
            lhs = binom.comul(binom.mul(binom.BinPoly.basis(i), binom.BinPoly.basis(j)))
            rhs_terms: dict[tuple[int, int], int] = {}
            di = binom.comul(binom.BinPoly.basis(i))
            dj = binom.comul(binom.BinPoly.basis(j))
            for (a1, a2), v1 in di.terms.items():
                for (b1, b2), v2 in dj.terms.items():
                    left = binom.mul(binom.BinPoly.basis(a1), binom.BinPoly.basis(b1))
                    right = binom.mul(binom.BinPoly.basis(a2), binom.BinPoly.basis(b2))
                    for k1, c1 in left.coeffs.items():
                        for k2, c2 in right.coeffs.items():
                            key = (k1, k2)
                            rhs_terms[key] = rhs_terms.get(key, 0) + v1 * v2 * c1 * c2
            rhs = binom.TensorElem(2, rhs_terms)
            if lhs != rhs:
                ok = False
                notes.append(f"bialgebra axiom fails at ({i},{j})")
    return _result(8, "Hopf axioms for the binomial ring", 5.0, t0, ok,
                   "; ".join(notes) or
                   "coassociativity, counit, antipode, compatibility, weight grading")


def criterion_9() -> CriterionResult:
    """Calculator formulas and the adelic cross-check."""
    t0 = time.time()
    rng = random.Random(9)
    ok = True
    notes = []

    def random_fgab():
        return FgAb.from_cyclic(rng.randint(0, 3),
                                [rng.choice([2, 3, 4, 5, 7, 8, 9, 12])
                                 for _ in range(rng.randint(0, 3))])

    for _ in range(100):
        m = random_fgab()
        h0 = homotopy.fpqc_cohomology(m, 0)
        h1 = homotopy.fpqc_cohomology(m, 1)
        expect0 = homotopy.GroupExpr(
            [homotopy.Atom(homotopy.FREE)] * m.rank
            + [homotopy.Atom(homotopy.CYCLIC, d=d) for d in m.torsion])
        expect1 = homotopy.GroupExpr(
            [homotopy.Atom(homotopy.PROFINITE_FREE)] * m.rank
            + [homotopy.Atom(homotopy.CYCLIC, d=d) for d in m.torsion])
        if h0 != expect0 or h1 != expect1:
            ok = False
            notes.append(f"fpqc mismatch for {m}")
        if not homotopy.fpqc_cohomology(m, rng.randint(2, 9)).is_zero():
            ok = False
            notes.append("fpqc above degree 1 not zero")

    for _ in range(200):
        tower = {}
        for i in range(2, 8):
            g = random_fgab()
            if not g.is_zero():
                tower[i] = g
        pi = homotopy.PiTower.of(tower)
        for i in (2, 3, 4):
            if not homotopy.adelic_report(pi, i).consistent:
                ok = False
                notes.append(f"adelic inconsistency at {tower}, i={i}")
            good, _ = homotopy.retraction_check(pi, i)
            if not good:
                ok = False
                notes.append(f"retraction fails at {tower}, i={i}")

    s3 = homotopy.PiTower.of({3: FgAb(1), 4: FgAb(0, (2,))})
    got = homotopy.pi_global_points(s3, 3).canonical().render()
    if got != "Z + Z/2":
        ok = False
        notes.append(f"sphere fixture gave {got}")
    return _result(9, "homotopy calculator formulas and adelic cross-check",
                   5.0, t0, ok, "; ".join(notes) or
                   "100 coefficient groups, 200 towers, sphere fixture Z + Z/2")


def criterion_10() -> CriterionResult:
    """Smith normal form against the minor-gcd oracle, with witnesses."""
    t0 = time.time()
    rng = random.Random(10)
    ok = True
    notes = []
    for trial in range(500):
        n = rng.randint(1, 6)
        m = rng.randint(1, 6)
        mat = SparseIntMatrix.from_dense(
            [[rng.randint(-10, 10) for _ in range(m)] for _ in range(n)])
        res = homalg.snf(mat, witnesses=(trial % 5 == 0))
        oracle = homalg.minor_gcd_invariant_factors(mat)
        if res.factors != oracle:
            ok = False
            notes.append(f"factors {res.factors} != oracle {oracle}")
        if res.U is not None and (res.U @ mat @ res.V != res.D):
            ok = False
            notes.append("witnesses do not reconstruct D")
    return _result(10, "Smith normal form vs minor-gcd oracle on 500 matrices",
                   10.0, t0, ok, "; ".join(notes) or
                   "factors agree; witnesses unimodular and reconstruct D")


ALL_CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
                criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


def run_all(numbers: list[int] | None = None, echo=print) -> list[CriterionResult]:
    chosen = numbers or list(range(1, len(ALL_CRITERIA) + 1))
    results = []
    for num in chosen:
        res = ALL_CRITERIA[num - 1]()
        results.append(res)
        echo(res.line())
    passed = sum(1 for r in results if r.passed)
    echo(f"{passed}/{len(results)} criteria passed")
    return results
