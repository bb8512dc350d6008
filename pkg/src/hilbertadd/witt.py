"""Truncated big Witt vectors over generic coefficient rings.

A Witt vector is represented by the unit power series it is, truncated at
degree N:

    x = 1 + a_1 T + ... + a_N T^N.

Addition is series multiplication, negation is the series reciprocal.  Ghost
coordinates are defined by -T f'(T)/f(T) = sum w_n T^n, which over a
torsion-free ring turns addition into pointwise addition; for a line 1 - aT
the ghosts are (a, a^2, a^3, ...).

Frobenius F_n and the ring product are computed through universal integer
polynomials, derived once per shape by inverting the triangular ghost
system over Q and asserting that every coefficient comes out integral.
F_n is characterised by ghost_m(F_n x) = ghost_{nm}(x); the product by
ghost(x * y) = ghost(x) * ghost(y) pointwise.

The Hilbert additive group embeds via a binomial sequence (a_1, a_2, ...)
|-> sum_i (-1)^i a_i T^i; its image consists of simultaneous fixed points
of all F_n, which at finite truncation we can test partially: F_p(x) must
agree with x wherever both sides are defined.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass
from fractions import Fraction

from .binom import BinSeq
from .errors import ResourceError, StructuralError, UnsupportedRingError
from .rings import (MOD, RATIONALS, RingElem, RingSpec, poly_add, poly_mul,
                    poly_scale, ring_from_int, ring_mul, ring_neg, ring_one,
                    ring_pow, ring_zero)


@dataclass(frozen=True)
class WittVec:
    """1 + a_1 T + ... + a_N T^N; the leading 1 is implicit."""

    spec: RingSpec
    coeffs: tuple[RingElem, ...]

    @property
    def trunc(self) -> int:
        return len(self.coeffs)

    def coeff(self, i: int) -> RingElem:
        """Coefficient of T^i, 0 <= i <= N."""
        if i == 0:
            return ring_one(self.spec)
        return self.coeffs[i - 1]

    def __str__(self):
        return render_witt(self)


def from_int_list(spec: RingSpec, values: list[int], trunc: int | None = None) -> WittVec:
    vals = [ring_from_int(spec, v) for v in values]
    if trunc is not None:
        if len(vals) > trunc:
            raise StructuralError("more coefficients than the truncation allows")
        vals += [ring_zero(spec)] * (trunc - len(vals))
    if not vals:
        raise StructuralError("truncation must be >= 1")
    return WittVec(spec, tuple(vals))


def zero_vec(spec: RingSpec, trunc: int) -> WittVec:
    """The additive zero, i.e. the series 1."""
    return from_int_list(spec, [], trunc)


def mult_unit(spec: RingSpec, trunc: int) -> WittVec:
    """The ring unit 1 - T (ghost coordinates all 1)."""
    return from_int_list(spec, [-1], trunc)


def line(spec: RingSpec, a: int, trunc: int) -> WittVec:
    """The vector 1 - aT."""
    return from_int_list(spec, [-a], trunc)


def truncate(x: WittVec, trunc: int) -> WittVec:
    if not 1 <= trunc <= x.trunc:
        raise StructuralError("bad truncation")
    return WittVec(x.spec, x.coeffs[:trunc])


def _same_shape(x: WittVec, y: WittVec) -> None:
    if x.spec != y.spec or x.trunc != y.trunc:
        raise StructuralError("Witt vectors with mismatched ring or truncation")


def witt_add(x: WittVec, y: WittVec) -> WittVec:
    """Group law: the series product mod T^(N+1)."""
    _same_shape(x, y)
    spec = x.spec
    out = []
    for n in range(1, x.trunc + 1):
        acc = ring_zero(spec)
        for i in range(n + 1):
            acc = acc + ring_mul(spec, x.coeff(i), y.coeff(n - i))
        out.append(acc)
    return WittVec(spec, tuple(out))


def witt_neg(x: WittVec) -> WittVec:
    """Additive inverse: the series reciprocal mod T^(N+1)."""
    spec = x.spec
    rec: list[RingElem] = []

    def r(i):
        return ring_one(spec) if i == 0 else rec[i - 1]

    for n in range(1, x.trunc + 1):
        acc = ring_zero(spec)
        for k in range(1, n + 1):
            acc = acc + ring_mul(spec, x.coeff(k), r(n - k))
        rec.append(ring_neg(spec, acc))
    return WittVec(spec, tuple(rec))


def witt_sub(x: WittVec, y: WittVec) -> WittVec:
    return witt_add(x, witt_neg(y))


# ---------------------------------------------------------------------------
# ghost coordinates


@dataclass(frozen=True)
class GhostVec:
    spec: RingSpec
    values: tuple[RingElem, ...]


def ghost(x: WittVec) -> GhostVec:
    """Ghost coordinates w_n with -T f'/f = sum w_n T^n.

    Expanding the defining identity gives the integral recurrence
    w_n = -n a_n - sum_{k<n} a_{n-k} w_k, valid over any ring, but the
    coordinates only faithfully linearise the group law over torsion-free
    rings, so anything else is refused.
    """
    spec = x.spec
    if not spec.is_torsion_free:
        raise UnsupportedRingError(f"ghost coordinates need a torsion-free ring, got {spec.short()}")
    w: list[RingElem] = []
    for n in range(1, x.trunc + 1):
        acc = ring_mul(spec, ring_from_int(spec, -n), x.coeff(n))
        for k in range(1, n):
            acc = acc - ring_mul(spec, x.coeff(n - k), w[k - 1])
        w.append(acc)
    return GhostVec(spec, tuple(w))


def from_ghost(w: GhostVec) -> WittVec:
    """Inverse of `ghost`; needs division by n, hence a Q-algebra."""
    spec = w.spec
    if spec.kind != RATIONALS:
        raise UnsupportedRingError("from_ghost needs rational coefficients")
    coeffs: list[RingElem] = []

    def a(i):
        return ring_one(spec) if i == 0 else coeffs[i - 1]

    for n in range(1, len(w.values) + 1):
        acc = ring_neg(spec, w.values[n - 1])
        for k in range(1, n):
            acc = acc - ring_mul(spec, a(n - k), w.values[k - 1])
        coeffs.append(ring_mul(spec, RingElem(spec, Fraction(1, n)), acc))
    return WittVec(spec, tuple(coeffs))


# ---------------------------------------------------------------------------
# universal polynomials by symbolic ghost inversion
#
# Polynomials here are dicts {exponent tuple: coefficient}; during the
# derivation coefficients are Fractions and at the end integrality is
# asserted.  The tuple length is the number of symbols in play.


def _sym_ghosts(nv: int, upto: int) -> list[dict]:
    """Ghost polynomials w_1..w_upto of a generic vector with nv symbols."""
    def var(i):  # a_i, 1-based
        e = [0] * nv
        e[i - 1] = 1
        return {tuple(e): 1}

    w: list[dict] = []
    for n in range(1, upto + 1):
        acc = poly_scale(var(n), -n)
        for k in range(1, n):
            acc = poly_add(acc, poly_scale(poly_mul(var(n - k), w[k - 1]), -1))
        w.append(acc)
    return w


def _sym_from_ghost(targets: list[dict], nv: int) -> list[dict]:
    """Solve the triangular ghost system for coefficients, exactly over Q."""
    coeffs: list[dict] = []
    one = {(0,) * nv: Fraction(1)}

    def a(i):
        return one if i == 0 else coeffs[i - 1]

    for n in range(1, len(targets) + 1):
        acc = poly_scale(targets[n - 1], Fraction(-1))
        for k in range(1, n):
            acc = poly_add(acc, poly_scale(poly_mul(a(n - k), targets[k - 1]), -1))
        coeffs.append(poly_scale(acc, Fraction(1, n)))
    return coeffs


def _assert_integral(p: dict, what: str) -> dict:
    out = {}
    for e, c in p.items():
        c = Fraction(c)
        assert c.denominator == 1, f"{what}: non-integer coefficient {c} at {e}"
        out[e] = int(c)
    return out


_table_lock = threading.Lock()
_frobenius_cache: dict[tuple[int, int], dict] = {}
_mul_cache: dict[int, dict] = {}


def _frobenius_poly(n: int, k: int) -> dict:
    """Phi_{n,k} in Z[a_1..a_{nk}]: coefficient k of F_n on a generic vector.

    Derived from ghost_m(F_n x) = ghost_{nm}(x) for m <= k.  Cached; the
    cache is write-once per key (compute-if-absent).
    """
    key = (n, k)
    got = _frobenius_cache.get(key)
    if got is not None:
        return got
    nv = n * k
    ghosts = _sym_ghosts(nv, nv)
    targets = [ghosts[n * m - 1] for m in range(1, k + 1)]
    solved = _sym_from_ghost(targets, nv)
    with _table_lock:
        for m in range(1, k + 1):
            _frobenius_cache.setdefault(
                (n, m), _assert_integral(_trim_vars(solved[m - 1], n * m), f"Phi_{n},{m}"))
    return _frobenius_cache[key]


def _trim_vars(p: dict, nv: int) -> dict:
    out = {}
    for e, c in p.items():
        assert not any(e[nv:]), "polynomial involves unexpected high symbols"
        out[e[:nv]] = c
    return out


@dataclass(frozen=True)
class FrobeniusTable:
    """Universal polynomials Phi_{n,k} for k <= floor(N/n), all integral."""

    n: int
    trunc: int
    polys: tuple  # polys[k-1] is a dict over symbols a_1..a_{nk}

    def poly_elem(self, k: int) -> RingElem:
        """Phi_{n,k} as an element of Z[a1..a_{nk}], for display and tests."""
        from .rings import poly_from_dict
        nv = self.n * k
        spec = RingSpec.poly_over_z(*(f"a{i}" for i in range(1, nv + 1)))
        return poly_from_dict(spec, self.polys[k - 1])


def frobenius_table(n: int, trunc: int) -> FrobeniusTable:
    if n < 1:
        raise StructuralError("Frobenius index must be >= 1")
    m = trunc // n
    if m >= 1:
        _frobenius_poly(n, m)  # fills the cache for every k <= m in one pass
    return FrobeniusTable(n, trunc, tuple(_frobenius_poly(n, k) for k in range(1, m + 1)))


def _eval_poly(p: dict, values: list[RingElem], spec: RingSpec) -> RingElem:
    acc = ring_zero(spec)
    for e, c in p.items():
        term = ring_from_int(spec, c)
        for i, k in enumerate(e):
            if k:
                term = ring_mul(spec, term, ring_pow(spec, values[i], k))
        acc = acc + term
    return acc


def frobenius(n: int, x: WittVec) -> WittVec:
    """F_n; the result lives at truncation floor(N/n)."""
    m = x.trunc // n
    if m < 1:
        raise StructuralError(f"truncation {x.trunc} too small for F_{n}")
    table = frobenius_table(n, x.trunc)
    vals = list(x.coeffs)
    return WittVec(x.spec, tuple(
        _eval_poly(table.polys[k - 1], vals, x.spec) for k in range(1, m + 1)))


def verschiebung(n: int, x: WittVec, trunc: int | None = None) -> WittVec:
    """V_n(f)(T) = f(T^n), at truncation n*N unless capped by the caller."""
    if n < 1:
        raise StructuralError("Verschiebung index must be >= 1")
    out_trunc = n * x.trunc if trunc is None else trunc
    spec = x.spec
    out = []
    for i in range(1, out_trunc + 1):
        if i % n == 0 and i // n <= x.trunc:
            out.append(x.coeff(i // n))
        else:
            out.append(ring_zero(spec))
    return WittVec(spec, tuple(out))


def _mul_poly(k: int) -> dict:
    """mu_k in Z[a_1..a_k, b_1..b_k]: coefficient k of the Witt product."""
    got = _mul_cache.get(k)
    if got is not None:
        return got
    nv = 2 * k
    ghosts = _sym_ghosts(k, k)  # over k symbols

    def embed(p, offset):
        return {tuple(([0] * offset + list(e) + [0] * (nv - k - offset))): c
                for e, c in p.items()}

    targets = [poly_mul(embed(ghosts[i], 0), embed(ghosts[i], k)) for i in range(k)]
    solved = _sym_from_ghost(targets, nv)
    with _table_lock:
        for i in range(1, k + 1):
            # mu_i uses a_1..a_i, b_1..b_i: reorder symbols from the ambient 2k
            p = solved[i - 1]
            trimmed = {}
            for e, c in p.items():
                ae, be = e[:k], e[k:]
                assert not any(ae[i:]) and not any(be[i:])
                trimmed[ae[:i] + be[:i]] = c
            _mul_cache.setdefault(i, _assert_integral(trimmed, f"mu_{i}"))
    return _mul_cache[k]


def witt_mul(x: WittVec, y: WittVec) -> WittVec:
    """The natural ring product: pointwise on ghost coordinates."""
    _same_shape(x, y)
    spec = x.spec
    _mul_poly(x.trunc)
    out = []
    for k in range(1, x.trunc + 1):
        vals = list(x.coeffs[:k]) + list(y.coeffs[:k])
        out.append(_eval_poly(_mul_cache[k], vals, spec))
    return WittVec(spec, tuple(out))


# ---------------------------------------------------------------------------
# the embedded Hilbert group and partial fixed points


def embed_H(s: BinSeq) -> WittVec:
    """(a_1, a_2, ...) |-> sum_i (-1)^i a_i T^i."""
    coeffs = []
    for i in range(1, s.trunc + 1):
        v = s.values[i - 1]
        coeffs.append(v if i % 2 == 0 else ring_neg(s.spec, v))
    return WittVec(s.spec, tuple(coeffs))


def is_partial_fixed(x: WittVec, primes: list[int]) -> tuple[bool, list[tuple[int, int]]]:
    """Is F_p(x) = x wherever both sides are defined, for each listed prime?

    Fixedness under composite F_n follows from F_n F_m = F_{nm}.  Primes p
    with floor(N/p) = 0 impose no testable condition at this truncation and
    are vacuously satisfied.  Returns (ok, failures) where failures lists
    (p, k) with coefficient k of F_p(x) differing from a_k.
    """
    bad = []
    for p in primes:
        m = x.trunc // p
        if m < 1:
            continue
        fx = frobenius(p, x)
        for k in range(1, m + 1):
            if fx.coeffs[k - 1] != x.coeffs[k - 1]:
                bad.append((p, k))
    return (not bad, bad)


def enumerate_partial_fixed(spec: RingSpec, trunc: int, primes: list[int],
                            cap: int = 2 * 10**5, verify_subgroup: bool = True) -> list[WittVec]:
    """All vectors over a finite ring Mod(m) passing is_partial_fixed.

    The search space has m^N elements; exceeding `cap` is a ResourceError.
    The result is checked to be a subgroup of the truncated Witt group.
    """
    if spec.kind != MOD:
        raise UnsupportedRingError("enumeration needs a finite ring Mod(m)")
    m = spec.modulus
    total = m ** trunc
    if total > cap:
        raise ResourceError(f"search space {m}^{trunc} = {total} exceeds cap {cap}")
    found = []
    for tup in itertools.product(range(m), repeat=trunc):
        x = WittVec(spec, tuple(RingElem(spec, v) for v in tup))
        ok, _ = is_partial_fixed(x, primes)
        if ok:
            found.append(x)
    if verify_subgroup:
        members = set(found)
        assert zero_vec(spec, trunc) in members, "fixed set misses the zero vector"
        for x in found:
            assert witt_neg(x) in members, "fixed set not closed under negation"
            for y in found:
                assert witt_add(x, y) in members, "fixed set not closed under addition"
    return found


def reduction_fixed_report(m_big: int, m_small: int, trunc: int, primes: list[int],
                           cap: int = 2 * 10**5) -> dict:
    """Compare partial fixed points over Mod(m_big) and Mod(m_small).

    m_small must divide m_big; the comparison map reduces every series
    coefficient mod m_small.  Reports counts and whether the reduction is
    injective / surjective / bijective on the fixed sets.
    """
    if m_big % m_small:
        raise StructuralError("m_small must divide m_big")
    big_spec, small_spec = RingSpec.mod(m_big), RingSpec.mod(m_small)
    big = enumerate_partial_fixed(big_spec, trunc, primes, cap=cap)
    small = enumerate_partial_fixed(small_spec, trunc, primes, cap=cap)

    def reduce_vec(x: WittVec) -> WittVec:
        return WittVec(small_spec, tuple(RingElem(small_spec, c.value % m_small)
                                         for c in x.coeffs))

    images = [reduce_vec(x) for x in big]
    image_set = set(images)
    small_set = set(small)
    assert image_set <= small_set, "reduction left the small fixed set"
    injective = len(image_set) == len(big)
    surjective = image_set == small_set
    return {
        "trunc": trunc,
        "primes": list(primes),
        "count_big": len(big),
        "count_small": len(small),
        "injective": injective,
        "surjective": surjective,
        "bijective": injective and surjective,
    }


# ---------------------------------------------------------------------------
# text format


def render_witt(x: WittVec) -> str:
    from .rings import render_elem
    parts = ["1"]
    for i in range(1, x.trunc + 1):
        c = x.coeff(i)
        if c.is_zero():
            continue
        t = "T" if i == 1 else f"T^{i}"
        body = str(c.value) if x.spec.kind == MOD else render_elem(c)
        sign = "- " if body.startswith("-") else "+ "
        body = body.lstrip("-")
        if body == "1":
            parts.append(sign + t)
        elif any(ch in body for ch in " /"):
            parts.append(sign + f"({body}){t}")
        else:
            parts.append(sign + f"{body}{t}")
    return " ".join(parts)


def parse_witt(spec: RingSpec, text: str, trunc: int | None = None) -> WittVec:
    """Parse the comma-separated coefficient format "a1,a2,...,aN"."""
    from .rings import parse_elem
    parts = [p for p in text.split(",") if p.strip()]
    vals = [parse_elem(spec, p) for p in parts]
    if trunc is not None:
        if len(vals) > trunc:
            raise StructuralError("more coefficients than the truncation allows")
        vals += [ring_zero(spec)] * (trunc - len(vals))
    if not vals:
        raise StructuralError("empty coefficient list")
    return WittVec(spec, tuple(vals))
