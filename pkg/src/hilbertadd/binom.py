"""The binomial ring B of integer-valued polynomials, in the Hilbert basis.

B is the subring of Q[X] of polynomials P with P(Z) contained in Z; it is a
free Z-module on the Hilbert polynomials binom(X, n), written b_n here, and
carries a Hopf algebra structure dual to the additive group law:

    Delta(b_n) = sum_{i+j=n} b_i (x) b_j        (Vandermonde identity)
    eps(b_n)   = [n == 0]
    S(b_n)     = Hilbert expansion of binom(-X, n)

Multiplication is implemented by evaluation at 0..deg followed by the Newton
forward-difference transform, so every product is checked integer-valued by
construction; the closed-form structure constants are derived from it.
"""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass
from functools import lru_cache

from .errors import StructuralError
from .rings import RingElem, RingSpec, ring_from_int, ring_mul, ring_one

def binom_int(a: int, k: int) -> int:
    """Binomial coefficient C(a, k) for arbitrary integer a and k >= 0.

    Negative upper argument follows C(a, k) = (-1)^k C(k - a - 1, k), so for
    example C(-1, k) = (-1)^k.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if a >= 0:
        return math.comb(a, k)
    return (-1) ** k * math.comb(k - a - 1, k)


class BinPoly:
    """Element of B as a sparse map weight -> integer coefficient of b_n."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: dict[int, int] | None = None):
        c = {int(n): int(v) for n, v in (coeffs or {}).items() if v}
        if any(n < 0 for n in c):
            raise StructuralError("negative weight in BinPoly")
        self.coeffs = c

    @staticmethod
    def basis(n: int) -> "BinPoly":
        return BinPoly({n: 1})

    @staticmethod
    def const(c: int) -> "BinPoly":
        return BinPoly({0: c})

    @staticmethod
    def zero() -> "BinPoly":
        return BinPoly()

    def weight(self) -> int:
        """Polynomial degree; -1 for the zero polynomial."""
        return max(self.coeffs, default=-1)

    def __eq__(self, other):
        return isinstance(other, BinPoly) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(tuple(sorted(self.coeffs.items())))

    def __add__(self, other):
        out = dict(self.coeffs)
        for n, v in other.coeffs.items():
            nv = out.get(n, 0) + v
            if nv:
                out[n] = nv
            else:
                del out[n]
        return BinPoly(out)

    def __neg__(self):
        return BinPoly({n: -v for n, v in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a: int) -> "BinPoly":
        return BinPoly({n: a * v for n, v in self.coeffs.items()})

    def __mul__(self, other):
        return mul(self, other)

    def __repr__(self):
        return f"BinPoly({self.coeffs!r})"

    def __str__(self):
        return render_binpoly(self)


def from_values(values: list[int]) -> BinPoly:
    """The unique BinPoly of weight <= d with the given values at 0..d.

    Newton forward differences: the coefficient of b_n is
    a_n = sum_k (-1)^(n-k) C(n, k) P(k), i.e. the n-th difference at 0.

    >>> from_values([0, 1, 4]).coeffs   # X^2 = b1 + 2*b2
    {1: 1, 2: 2}
    """
    if not values:
        raise StructuralError("from_values needs at least one value")
    row = [int(v) for v in values]
    coeffs = {}
    for n in range(len(values)):
        if row[0]:
            coeffs[n] = row[0]
        row = [row[i + 1] - row[i] for i in range(len(row) - 1)]
    return BinPoly(coeffs)


def to_values(p: BinPoly, d: int) -> list[int]:
    """Values P(0), ..., P(d)."""
    return [sum(c * binom_int(x, n) for n, c in p.coeffs.items())
            for x in range(d + 1)]


def mul(p: BinPoly, q: BinPoly) -> BinPoly:
    """Exact product in B, via evaluation and the difference transform."""
    if not p.coeffs or not q.coeffs:
        return BinPoly.zero()
    d = p.weight() + q.weight()
    pv = to_values(p, d)
    qv = to_values(q, d)
    return from_values([a * b for a, b in zip(pv, qv)])


@lru_cache(maxsize=None)
def structure_constants(i: int, j: int) -> dict[int, int]:
    """c_{ij}^k with b_i b_j = sum_k c_{ij}^k b_k, max(i,j) <= k <= i+j."""
    if i < 0 or j < 0:
        raise StructuralError("weights must be non-negative")
    prod = mul(BinPoly.basis(i), BinPoly.basis(j))
    assert all(max(i, j) <= k <= i + j for k in prod.coeffs)
    return dict(prod.coeffs)


class TensorElem:
    """Element of B^(x)N: sparse integer combination of pure tensors of b's.

    Terms are keyed by weight tuples (n_1, ..., n_N); the tuple entry n_s is
    the Hilbert weight sitting in slot s.
    """

    __slots__ = ("slots", "terms")

    def __init__(self, slots: int, terms: dict[tuple[int, ...], int] | None = None):
        if slots < 1:
            raise StructuralError("TensorElem needs at least one slot")
        self.slots = slots
        t = {}
        for key, v in (terms or {}).items():
            if not v:
                continue
            key = tuple(int(n) for n in key)
            if len(key) != slots or any(n < 0 for n in key):
                raise StructuralError(f"bad weight tuple {key!r} for {slots} slots")
            t[key] = int(v)
        self.terms = t

    @staticmethod
    def from_binpoly(p: BinPoly) -> "TensorElem":
        return TensorElem(1, {(n,): c for n, c in p.coeffs.items()})

    def __eq__(self, other):
        return (isinstance(other, TensorElem) and self.slots == other.slots
                and self.terms == other.terms)

    def __hash__(self):
        return hash((self.slots, tuple(sorted(self.terms.items()))))

    def __add__(self, other):
        if self.slots != other.slots:
            raise StructuralError("tensor slot mismatch")
        out = dict(self.terms)
        for k, v in other.terms.items():
            nv = out.get(k, 0) + v
            if nv:
                out[k] = nv
            else:
                del out[k]
        return TensorElem(self.slots, out)

    def __neg__(self):
        return TensorElem(self.slots, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, a: int) -> "TensorElem":
        return TensorElem(self.slots, {k: a * v for k, v in self.terms.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def weights(self) -> set[int]:
        """Total weights occurring among the terms."""
        return {sum(k) for k in self.terms}

    def insert_unit(self, pos: int) -> "TensorElem":
        """Insert a b_0 = 1 factor at slot index pos (slots grow by one)."""
        out = {}
        for key, v in self.terms.items():
            nk = key[:pos] + (0,) + key[pos:]
            out[nk] = out.get(nk, 0) + v
        return TensorElem(self.slots + 1, out)

    def apply_comul(self, slot: int) -> "TensorElem":
        """Apply Delta at the given slot (0-based); slots grow by one."""
        if not 0 <= slot < self.slots:
            raise StructuralError(f"slot {slot} out of range")
        out: dict[tuple[int, ...], int] = {}
        for key, v in self.terms.items():
            n = key[slot]
            for i in range(n + 1):
                nk = key[:slot] + (i, n - i) + key[slot + 1:]
                nv = out.get(nk, 0) + v
                if nv:
                    out[nk] = nv
                else:
                    del out[nk]
        return TensorElem(self.slots + 1, out)

    def __repr__(self):
        return f"TensorElem({self.slots}, {self.terms!r})"

    def __str__(self):
        if not self.terms:
            return "0"
        def tname(key):
            return "(x)".join("1" if n == 0 else f"b{n}" for n in key)
        parts = []
        for key in sorted(self.terms):
            v = self.terms[key]
            body = tname(key) if abs(v) == 1 else f"{abs(v)}*{tname(key)}"
            if not parts:
                parts.append(body if v > 0 else f"-{body}")
            else:
                parts.append(("+ " if v > 0 else "- ") + body)
        return " ".join(parts)


def comul(p: BinPoly) -> TensorElem:
    """Comultiplication Delta(b_n) = sum_{i+j=n} b_i (x) b_j, linearly."""
    return TensorElem.from_binpoly(p).apply_comul(0)


def counit(p: BinPoly) -> int:
    """eps: the coefficient of b_0, i.e. P(0)."""
    return p.coeffs.get(0, 0)


@lru_cache(maxsize=None)
def _antipode_basis(n: int) -> BinPoly:
    # S(b_n) = binom(-X, n) expanded in the Hilbert basis
    return from_values([binom_int(-x, n) for x in range(n + 1)])


def antipode(p: BinPoly) -> BinPoly:
    out = BinPoly.zero()
    for n, c in p.coeffs.items():
        out = out + _antipode_basis(n).scale(c)
    return out


def tensor_apply_comul(t: TensorElem, slot: int) -> TensorElem:
    return t.apply_comul(slot)


def tensor_mul_all(t: TensorElem) -> BinPoly:
    """Collapse all slots by multiplying them together in B."""
    out = BinPoly.zero()
    for key, v in t.terms.items():
        prod = BinPoly.const(1)
        for n in key:
            prod = mul(prod, BinPoly.basis(n))
        out = out + prod.scale(v)
    return out


# ---------------------------------------------------------------------------
# points of the group scheme: sequences satisfying the binomial relations


@dataclass(frozen=True)
class BinSeq:
    """Truncated point a_1..a_N over a coefficient ring, with a_0 = 1 implied.

    A full point is a sequence satisfying every relation
    a_i a_j = sum_k c_{ij}^k a_k; at truncation N only relations with
    i + j <= N are testable, so this is a partial point.
    """

    spec: RingSpec
    values: tuple[RingElem, ...]

    @property
    def trunc(self) -> int:
        return len(self.values)

    def value(self, n: int) -> RingElem:
        """a_n, with a_0 = 1."""
        if n == 0:
            return ring_one(self.spec)
        return self.values[n - 1]


def point_from_integer(a: int, trunc: int, spec: RingSpec | None = None) -> BinSeq:
    """The image of the integer point a: the sequence a_n = C(a, n)."""
    spec = spec or RingSpec.integers()
    vals = tuple(ring_from_int(spec, binom_int(a, n)) for n in range(1, trunc + 1))
    return BinSeq(spec, vals)


def binseq_add(s: BinSeq, t: BinSeq) -> BinSeq:
    """Group law dual to Delta: Vandermonde convolution of sequences."""
    if s.spec != t.spec or s.trunc != t.trunc:
        raise StructuralError("binseq mismatch")
    spec = s.spec
    vals = []
    for n in range(1, s.trunc + 1):
        acc = ring_from_int(spec, 0)
        for i in range(n + 1):
            acc = acc + ring_mul(spec, s.value(i), t.value(n - i))
        vals.append(acc)
    return BinSeq(spec, tuple(vals))


def binseq_check(s: BinSeq) -> tuple[bool, list[tuple[int, int]]]:
    """Check all binomial relations testable at this truncation.

    Returns (ok, violations) where violations lists the failing (i, j).
    """
    spec = s.spec
    bad = []
    for i in range(1, s.trunc + 1):
        for j in range(i, s.trunc + 1 - i):
            lhs = ring_mul(spec, s.value(i), s.value(j))
            rhs = ring_from_int(spec, 0)
            for k, c in structure_constants(i, j).items():
                rhs = rhs + s.value(k) * ring_from_int(spec, c)
            if lhs != rhs:
                bad.append((i, j))
    return (not bad, bad)


# ---------------------------------------------------------------------------
# text and JSON formats

_TERM_RE = re.compile(r"^(-?[0-9]+)?\*?(?:b([0-9]+))?$")


def render_binpoly(p: BinPoly) -> str:
    if not p.coeffs:
        return "0"
    parts = []
    for n in sorted(p.coeffs):
        c = p.coeffs[n]
        if n == 0:
            body = str(abs(c))
        else:
            body = f"b{n}" if abs(c) == 1 else f"{abs(c)}*b{n}"
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


def parse_binpoly(text: str) -> BinPoly:
    s = text.replace("-", "+-").replace(" ", "")
    coeffs: dict[int, int] = {}
    for chunk in s.split("+"):
        if not chunk:
            continue
        sign = 1
        if chunk.startswith("-"):
            sign, chunk = -1, chunk[1:]
        m = _TERM_RE.match(chunk)
        if not m or (m.group(1) is None and m.group(2) is None):
            raise StructuralError(f"cannot parse term {chunk!r}")
        c = int(m.group(1)) if m.group(1) is not None else 1
        n = int(m.group(2)) if m.group(2) else 0
        coeffs[n] = coeffs.get(n, 0) + sign * c
    return BinPoly(coeffs)


def binpoly_to_json(p: BinPoly) -> str:
    return json.dumps({"coeffs": {str(n): str(c) for n, c in sorted(p.coeffs.items())}},
                      sort_keys=True)


def binpoly_from_json(s: str) -> BinPoly:
    data = json.loads(s)
    return BinPoly({int(n): int(c) for n, c in data["coeffs"].items()})
