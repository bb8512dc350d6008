"""Exact coefficient rings: Z, Z/m, Q, and multivariate polynomials over Z.

All arithmetic is arbitrary precision and exact; there is no floating point
anywhere in this package.  An element is an immutable value tagged with the
ring it lives in, so mixing rings is a structural error, never a silent
coercion.

Normal forms: Mod(m) values live in [0, m); rationals are Fractions (always
in lowest terms); polynomials store no zero coefficients and keep their
monomials in a fixed graded-lexicographic order.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DegreeCapError, InvertibilityError, StructuralError

INTEGERS = "int"
MOD = "mod"
RATIONALS = "rat"
POLY_OVER_Z = "polyz"


@dataclass(frozen=True)
class RingSpec:
    kind: str
    modulus: int | None = None
    variables: tuple[str, ...] = ()
    degree_cap: int | None = None

    def __post_init__(self):
        if self.kind not in (INTEGERS, MOD, RATIONALS, POLY_OVER_Z):
            raise StructuralError(f"unknown ring kind {self.kind!r}")
        if self.kind == MOD:
            if self.modulus is None or self.modulus < 2:
                raise StructuralError("Mod(m) requires m >= 2")
        elif self.modulus is not None:
            raise StructuralError("modulus only makes sense for Mod(m)")
        if self.kind == POLY_OVER_Z:
            if not self.variables:
                raise StructuralError("polynomial ring needs at least one variable")
            if len(set(self.variables)) != len(self.variables):
                raise StructuralError("variable names must be distinct")
        elif self.variables:
            raise StructuralError("variables only make sense for PolyOverZ")

    @staticmethod
    def integers() -> "RingSpec":
        return RingSpec(INTEGERS)

    @staticmethod
    def mod(m: int) -> "RingSpec":
        return RingSpec(MOD, modulus=m)

    @staticmethod
    def rationals() -> "RingSpec":
        return RingSpec(RATIONALS)

    @staticmethod
    def poly_over_z(*names: str, degree_cap: int | None = None) -> "RingSpec":
        return RingSpec(POLY_OVER_Z, variables=tuple(names), degree_cap=degree_cap)

    @property
    def is_torsion_free(self) -> bool:
        return self.kind in (INTEGERS, RATIONALS, POLY_OVER_Z)

    def short(self) -> str:
        if self.kind == INTEGERS:
            return "Z"
        if self.kind == MOD:
            return f"Z/{self.modulus}"
        if self.kind == RATIONALS:
            return "Q"
        return "Z[" + ",".join(self.variables) + "]"


# A polynomial value is a canonical tuple of (exponent tuple, coefficient)
# pairs; dicts are used for in-flight arithmetic.  These helpers are shared
# with the universal-polynomial derivations in witt.py, where coefficients
# are temporarily Fractions.


def poly_add(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        nc = out.get(e, 0) + c
        if nc:
            out[e] = nc
        else:
            out.pop(e, None)
    return out


def poly_neg(p: dict) -> dict:
    return {e: -c for e, c in p.items()}

def poly_scale(p: dict, a) -> dict:
    if not a:
        return {}
    return {e: c * a for e, c in p.items()}


def poly_mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(x + y for x, y in zip(e1, e2))
            nc = out.get(e, 0) + c1 * c2
            if nc:
                out[e] = nc
            else:
                out.pop(e, None)
    return out


def _mono_key(e: tuple) -> tuple:
    # graded lex, largest first when sorted() with reverse=True
    return (sum(e), e)


def _poly_canonical(p: dict) -> tuple:
    return tuple(sorted(((e, c) for e, c in p.items() if c),
                        key=lambda ec: _mono_key(ec[0]), reverse=True))


@dataclass(frozen=True)
class RingElem:
    spec: RingSpec
    value: object = field(compare=True)

    def __add__(self, other):
        return ring_add(self.spec, self, other)

    def __sub__(self, other):
        return ring_sub(self.spec, self, other)

    def __neg__(self):
        return ring_neg(self.spec, self)

    def __mul__(self, other):
        return ring_mul(self.spec, self, other)

    def __pow__(self, n):
        return ring_pow(self.spec, self, n)

    def is_zero(self) -> bool:
        if self.spec.kind == POLY_OVER_Z:
            return not self.value
        return self.value == 0

    def __str__(self):
        return render_elem(self)


def _check(spec: RingSpec, x: RingElem) -> None:
    if not isinstance(x, RingElem) or x.spec != spec:
        raise StructuralError(f"element {x!r} does not belong to {spec.short()}")


def _wrap(spec: RingSpec, raw) -> RingElem:
    if spec.kind == MOD:
        return RingElem(spec, raw % spec.modulus)
    if spec.kind == POLY_OVER_Z:
        if isinstance(raw, dict):
            raw = _poly_canonical(raw)
        if spec.degree_cap is not None:
            for e, _ in raw:
                if sum(e) > spec.degree_cap:
                    raise DegreeCapError(
                        f"total degree {sum(e)} exceeds cap {spec.degree_cap}")
        return RingElem(spec, raw)
    return RingElem(spec, raw)


def ring_zero(spec: RingSpec) -> RingElem:
    return ring_from_int(spec, 0)


def ring_one(spec: RingSpec) -> RingElem:
    return ring_from_int(spec, 1)


def ring_from_int(spec: RingSpec, n: int) -> RingElem:
    """Canonical image of the integer n in the ring."""
    if spec.kind == INTEGERS:
        return RingElem(spec, int(n))
    if spec.kind == MOD:
        return RingElem(spec, n % spec.modulus)
    if spec.kind == RATIONALS:
        return RingElem(spec, Fraction(n))
    zero_exp = (0,) * len(spec.variables)
    return _wrap(spec, {zero_exp: int(n)} if n else {})


def poly_from_dict(spec: RingSpec, d: dict) -> RingElem:
    """Wrap a {exponent tuple: int} dict as a canonical polynomial element."""
    if spec.kind != POLY_OVER_Z:
        raise StructuralError("poly_from_dict needs a polynomial ring")
    return _wrap(spec, dict(d))


def poly_gen(spec: RingSpec, name: str) -> RingElem:
    """The variable `name` as an element of a PolyOverZ ring."""
    if spec.kind != POLY_OVER_Z:
        raise StructuralError("poly_gen needs a polynomial ring")
    i = spec.variables.index(name)
    e = tuple(1 if j == i else 0 for j in range(len(spec.variables)))
    return _wrap(spec, {e: 1})


def _poly_dict(x: RingElem) -> dict:
    return dict(x.value)


def ring_add(spec: RingSpec, x: RingElem, y: RingElem) -> RingElem:
    _check(spec, x)
    _check(spec, y)
    if spec.kind == POLY_OVER_Z:
        return _wrap(spec, poly_add(_poly_dict(x), _poly_dict(y)))
    return _wrap(spec, x.value + y.value)


def ring_neg(spec: RingSpec, x: RingElem) -> RingElem:
    _check(spec, x)
    if spec.kind == POLY_OVER_Z:
        return _wrap(spec, poly_neg(_poly_dict(x)))
    return _wrap(spec, -x.value)


def ring_sub(spec: RingSpec, x: RingElem, y: RingElem) -> RingElem:
    return ring_add(spec, x, ring_neg(spec, y))


def ring_mul(spec: RingSpec, x: RingElem, y: RingElem) -> RingElem:
    _check(spec, x)
    _check(spec, y)
    if spec.kind == POLY_OVER_Z:
        return _wrap(spec, poly_mul(_poly_dict(x), _poly_dict(y)))
    return _wrap(spec, x.value * y.value)


def ring_pow(spec: RingSpec, x: RingElem, n: int) -> RingElem:
    _check(spec, x)
    if n < 0:
        return ring_pow(spec, ring_inv(spec, x), -n)
    out = ring_one(spec)
    base = x
    while n:
        if n & 1:
            out = ring_mul(spec, out, base)
        base = ring_mul(spec, base, base) if n > 1 else base
        n >>= 1
    return out


def ring_inv(spec: RingSpec, x: RingElem) -> RingElem:
    _check(spec, x)
    if spec.kind == INTEGERS:
        if x.value in (1, -1):
            return x
        raise InvertibilityError(x)
    if spec.kind == MOD:
        try:
            return _wrap(spec, pow(x.value, -1, spec.modulus))
        except ValueError:
            raise InvertibilityError(x) from None
    if spec.kind == RATIONALS:
        if x.value == 0:
            raise InvertibilityError(x)
        return RingElem(spec, 1 / x.value)
    # units of Z[x1..xk] are the constants +-1
    if len(x.value) == 1:
        (e, c), = x.value
        if not any(e) and c in (1, -1):
            return x
    raise InvertibilityError(x)


# ---------------------------------------------------------------------------
# text literals


def render_elem(x: RingElem) -> str:
    spec = x.spec
    if spec.kind == INTEGERS:
        return str(x.value)
    if spec.kind == MOD:
        return f"{x.value} mod {spec.modulus}"
    if spec.kind == RATIONALS:
        v = x.value
        return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"
    return render_poly(dict(x.value), spec.variables)


def render_poly(p: dict, variables: tuple[str, ...]) -> str:
    if not p:
        return "0"
    parts = []
    for e, c in sorted(p.items(), key=lambda ec: _mono_key(ec[0]), reverse=True):
        factors = []
        for name, k in zip(variables, e):
            if k == 1:
                factors.append(name)
            elif k > 1:
                factors.append(f"{name}^{k}")
        mono = "*".join(factors)
        coeff = abs(c)
        if mono and coeff == 1:
            body = mono
        elif mono:
            body = f"{coeff}*{mono}"
        else:
            body = str(coeff)
        if not parts:
            parts.append(body if c > 0 else f"-{body}")
        else:
            parts.append(("+ " if c > 0 else "- ") + body)
    return " ".join(parts)


_MONO_RE = re.compile(r"^([0-9]+)?((?:\*?[A-Za-z_][A-Za-z_0-9]*(?:\^[0-9]+)?)*)$")


def parse_elem(spec: RingSpec, text: str) -> RingElem:
    """Parse the text literal format of `render_elem`."""
    s = text.strip()
    if spec.kind == INTEGERS:
        return RingElem(spec, int(s))
    if spec.kind == MOD:
        s = s.split("mod")[0].strip()
        return _wrap(spec, int(s))
    if spec.kind == RATIONALS:
        return RingElem(spec, Fraction(s))
    return _wrap(spec, parse_poly(s, spec.variables))


def parse_poly(text: str, variables: tuple[str, ...]) -> dict:
    s = text.replace("-", "+-").replace(" ", "")
    out: dict = {}
    for chunk in s.split("+"):
        if not chunk:
            continue
        sign = 1
        if chunk.startswith("-"):
            sign, chunk = -1, chunk[1:]
        if chunk == "0":
            continue
        m = _MONO_RE.match(chunk)
        if not m:
            raise StructuralError(f"cannot parse monomial {chunk!r}")
        coeff = int(m.group(1)) if m.group(1) else 1
        exps = [0] * len(variables)
        for piece in re.findall(r"[A-Za-z_][A-Za-z_0-9]*(?:\^[0-9]+)?", m.group(2) or ""):
            if "^" in piece:
                name, k = piece.split("^")
                k = int(k)
            else:
                name, k = piece, 1
            if name not in variables:
                raise StructuralError(f"unknown variable {name!r}")
            exps[variables.index(name)] += k
        e = tuple(exps)
        nc = out.get(e, 0) + sign * coeff
        if nc:
            out[e] = nc
        else:
            out.pop(e, None)
    return out
