"""Exact integral linear algebra.

Sparse arbitrary-precision integer matrices, Smith normal form, cohomology
of cochain complexes of finitely generated free Z-modules, and lim/lim^1
bookkeeping for towers of finitely generated abelian groups.

The Smith normal form works entirely over Z (no modular shortcuts).  Pivots
are chosen to contain fill-in and coefficient growth: unit entries first,
ties broken towards the sparsest row/column, with an xgcd row/column dance
for the non-unit residue.  Matrices here come mostly from alternating sums
of 0/1 coface matrices, so almost all pivots are units and the elimination
stays fast and small.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from heapq import heappush, heappop
from math import gcd, prod

from .errors import StructuralError, UnsupportedTowerError


class SparseIntMatrix:
    """rows x cols integer matrix, stored as {(i, j): value} without zeros.

    Acts on column vectors: it is a map Z^cols -> Z^rows.
    """

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: dict | None = None):
        if rows < 0 or cols < 0:
            raise StructuralError("negative matrix dimensions")
        self.rows = rows
        self.cols = cols
        self.entries = {}
        for (i, j), v in (entries or {}).items():
            if not 0 <= i < rows or not 0 <= j < cols:
                raise StructuralError(f"entry ({i},{j}) out of range")
            v = int(v)
            if v:
                self.entries[(i, j)] = v

    @staticmethod
    def from_dense(rows: list[list[int]]) -> "SparseIntMatrix":
        r = len(rows)
        c = len(rows[0]) if rows else 0
        return SparseIntMatrix(r, c, {(i, j): v for i, row in enumerate(rows)
                                      for j, v in enumerate(row) if v})

    @staticmethod
    def identity(n: int) -> "SparseIntMatrix":
        return SparseIntMatrix(n, n, {(i, i): 1 for i in range(n)})

    @staticmethod
    def zero(rows: int, cols: int) -> "SparseIntMatrix":
        return SparseIntMatrix(rows, cols)

    def to_dense(self) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (i, j), v in self.entries.items():
            out[i][j] = v
        return out

    def transpose(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.cols, self.rows,
                               {(j, i): v for (i, j), v in self.entries.items()})

    def is_zero(self) -> bool:
        return not self.entries

    def __eq__(self, other):
        return (isinstance(other, SparseIntMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(sorted(self.entries.items()))))

    def __matmul__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if self.cols != other.rows:
            raise StructuralError("matmul shape mismatch")
        by_row: dict[int, dict[int, int]] = {}
        for (i, j), v in other.entries.items():
            by_row.setdefault(i, {})[j] = v
        out: dict[tuple[int, int], int] = {}
        for (i, k), v in self.entries.items():
            row = by_row.get(k)
            if not row:
                continue
            for j, w in row.items():
                key = (i, j)
                nv = out.get(key, 0) + v * w
                if nv:
                    out[key] = nv
                else:
                    del out[key]
        return SparseIntMatrix(self.rows, other.cols, out)

    def __add__(self, other: "SparseIntMatrix") -> "SparseIntMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise StructuralError("matrix shape mismatch")
        out = dict(self.entries)
        for key, v in other.entries.items():
            nv = out.get(key, 0) + v
            if nv:
                out[key] = nv
            else:
                del out[key]
        return SparseIntMatrix(self.rows, self.cols, out)

    def __neg__(self) -> "SparseIntMatrix":
        return SparseIntMatrix(self.rows, self.cols,
                               {k: -v for k, v in self.entries.items()})

    def nnz(self) -> int:
        return len(self.entries)

    def to_triplet_text(self) -> str:
        lines = [f"{self.rows} {self.cols} {self.nnz()}"]
        for (i, j), v in sorted(self.entries.items()):
            lines.append(f"{i} {j} {v}")
        return "\n".join(lines) + "\n"

    @staticmethod
    def from_triplet_text(text: str) -> "SparseIntMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        r, c, nnz = map(int, lines[0].split())
        entries = {}
        for ln in lines[1:]:
            i, j, v = ln.split()
            entries[(int(i), int(j))] = int(v)
        if len(entries) != nnz:
            raise StructuralError("triplet header nnz does not match body")
        return SparseIntMatrix(r, c, entries)

    def to_json(self) -> str:
        return json.dumps({"rows": self.rows, "cols": self.cols,
                           "entries": [[i, j, str(v)] for (i, j), v in
                                       sorted(self.entries.items())]},
                          sort_keys=True)

    @staticmethod
    def from_json(s: str) -> "SparseIntMatrix":
        d = json.loads(s)
        return SparseIntMatrix(d["rows"], d["cols"],
                               {(i, j): int(v) for i, j, v in d["entries"]})

    def __repr__(self):
        return f"SparseIntMatrix({self.rows}x{self.cols}, nnz={self.nnz()})"


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x, nx, y, ny, g, ng = 1, 0, 0, 1, a, b
    while ng:
        q = g // ng
        x, nx = nx, x - q * nx
        y, ny = ny, y - q * ny
        g, ng = ng, g - q * ng
    if g < 0:
        x, y, g = -x, -y, -g
    return x, y, g


class _Eliminator:
    """Shared bilateral/unilateral elimination engine.

    Rows live as dicts {col: value}; a column index maps each column to the
    set of rows meeting it.  Pivot rows are served from a lazy heap keyed by
    row fill, rechecked at pop time.  Operations optionally mirror into dense
    witness matrices U (row ops) and V (col ops) so that U @ M_original @ V
    equals the working matrix at every step.
    """

    def __init__(self, mat: SparseIntMatrix, witnesses: bool):
        self.nrows, self.ncols = mat.rows, mat.cols
        self.row: dict[int, dict[int, int]] = {}
        self.colrows: dict[int, set[int]] = {}
        for (i, j), v in mat.entries.items():
            self.row.setdefault(i, {})[j] = v
            self.colrows.setdefault(j, set()).add(i)
        self.retired: set[int] = set()
        self.heap: list[tuple[int, int]] = [(len(r), i) for i, r in self.row.items()]
        self.heap.sort()
        self.U = [[int(i == j) for j in range(self.nrows)]
                  for i in range(self.nrows)] if witnesses else None
        self.V = [[int(i == j) for j in range(self.ncols)]
                  for i in range(self.ncols)] if witnesses else None

    def entry(self, i: int, j: int) -> int:
        return self.row.get(i, {}).get(j, 0)

    def _set(self, i: int, j: int, v: int) -> None:
        r = self.row.setdefault(i, {})
        if v:
            if j not in r:
                self.colrows.setdefault(j, set()).add(i)
            r[j] = v
        elif j in r:
            del r[j]
            self.colrows[j].discard(i)

    def row_combine(self, i1: int, i2: int, x: int, y: int, z: int, w: int) -> None:
        """(r_i1, r_i2) <- (x r_i1 + y r_i2, z r_i1 + w r_i2); det must be +-1."""
        r1 = self.row.get(i1, {})
        r2 = self.row.get(i2, {})
        for j in set(r1) | set(r2):
            a, b = r1.get(j, 0), r2.get(j, 0)
            self._set(i1, j, x * a + y * b)
            self._set(i2, j, z * a + w * b)
        if self.U is not None:
            u1, u2 = self.U[i1], self.U[i2]
            for j in range(self.nrows):
                a, b = u1[j], u2[j]
                u1[j], u2[j] = x * a + y * b, z * a + w * b

    def row_addmul(self, i2: int, i1: int, q: int) -> None:
        """r_i2 += q * r_i1."""
        if not q:
            return
        for j, a in list(self.row.get(i1, {}).items()):
            self._set(i2, j, self.entry(i2, j) + q * a)
        if self.U is not None:
            u1, u2 = self.U[i1], self.U[i2]
            for j in range(self.nrows):
                u2[j] += q * u1[j]

    def col_addmul(self, j2: int, j1: int, q: int) -> None:
        """c_j2 += q * c_j1."""
        if not q:
            return
        for i in list(self.colrows.get(j1, set())):
            self._set(i, j2, self.entry(i, j2) + q * self.entry(i, j1))
        if self.V is not None:
            for r in self.V:
                r[j2] += q * r[j1]

    def col_combine(self, j1: int, j2: int, x: int, y: int, z: int, w: int) -> None:
        """(c_j1, c_j2) <- (x c_j1 + y c_j2, z c_j1 + w c_j2); det must be +-1."""
        for i in list(self.colrows.get(j1, set()) | self.colrows.get(j2, set())):
            a, b = self.entry(i, j1), self.entry(i, j2)
            self._set(i, j1, x * a + y * b)
            self._set(i, j2, z * a + w * b)
        if self.V is not None:
            for r in self.V:
                a, b = r[j1], r[j2]
                r[j1], r[j2] = x * a + y * b, z * a + w * b

    def clear_col_with_pivot(self, i: int, j: int) -> None:
        """Zero out column j away from the pivot row i, via row ops."""
        touched = set()
        while True:
            others = [i2 for i2 in self.colrows.get(j, set()) if i2 != i]
            if not others:
                break
            touched.update(others)
            a = self.entry(i, j)
            for i2 in others:
                b = self.entry(i2, j)
                if b % a == 0:
                    self.row_addmul(i2, i, -(b // a))
                else:
                    x, y, g = _xgcd(a, b)
                    self.row_combine(i, i2, x, y, -(b // g), a // g)
                    a = g
        for i2 in touched:
            if i2 not in self.retired and self.row.get(i2):
                heappush(self.heap, (len(self.row[i2]), i2))

    def clear_row_with_pivot(self, i: int, j: int) -> None:
        """Zero out row i away from the pivot column j, via col ops."""
        while True:
            others = [j2 for j2 in self.row.get(i, {}) if j2 != j]
            if not others:
                return
            a = self.entry(i, j)
            for j2 in others:
                b = self.entry(i, j2)
                if b % a == 0:
                    self.col_addmul(j2, j, -(b // a))
                else:
                    x, y, g = _xgcd(a, b)
                    self.col_combine(j, j2, x, y, -(b // g), a // g)
                    a = g

    def pick_pivot(self) -> tuple[int, int] | None:
        """Entry of a sparsest live row, preferring units and thin columns."""
        while self.heap:
            nnz, i = heappop(self.heap)
            if i in self.retired:
                continue
            r = self.row.get(i)
            if not r:
                continue
            if len(r) != nnz:
                heappush(self.heap, (len(r), i))
                continue
            j, _ = min(r.items(),
                       key=lambda jv: (abs(jv[1]) != 1, len(self.colrows[jv[0]]), abs(jv[1])))
            heappush(self.heap, (nnz, i))  # stays live until retired
            return i, j
        return None

    def retire(self, i: int) -> None:
        self.retired.add(i)

    def requeue_col_rows(self, j: int) -> None:
        """Rows touched through column j get fresh heap entries."""
        for i in self.colrows.get(j, set()):
            if i not in self.retired:
                heappush(self.heap, (len(self.row.get(i, {})), i))


def rank(mat: SparseIntMatrix) -> int:
    """Rank over Z (= over Q), by unilateral column clearing."""
    e = _Eliminator(mat, witnesses=False)
    r = 0
    while True:
        piv = e.pick_pivot()
        if piv is None:
            return r
        i, j = piv
        e.clear_col_with_pivot(i, j)
        # drop the pivot row entirely; its other entries are irrelevant to rank
        for j2 in list(e.row.get(i, {})):
            e._set(i, j2, 0)
        e.retire(i)
        r += 1


@dataclass(frozen=True)
class SNFResult:
    factors: tuple[int, ...]      # invariant factors d_1 | d_2 | ..., all >= 1
    rank: int
    U: SparseIntMatrix | None = None
    V: SparseIntMatrix | None = None
    D: SparseIntMatrix | None = None


def _divisibility_fix(diag: list[int]) -> list[int]:
    d = [abs(x) for x in diag if x]
    changed = True
    while changed:
        changed = False
        for a in range(len(d)):
            for b in range(a + 1, len(d)):
                if d[b] % d[a]:
                    g = gcd(d[a], d[b])
                    d[a], d[b] = g, d[a] * d[b] // g
                    changed = True
    return sorted(d)


def _bilateral_clear(e: _Eliminator, i: int, j: int) -> None:
    """Alternate row and column clearing until both the pivot row and the
    pivot column are singletons.  Terminates because each pass either leaves
    the pivot value fixed (all quotients exact) or strictly shrinks it."""
    while True:
        e.clear_col_with_pivot(i, j)
        if len(e.row.get(i, {})) <= 1:
            break
        e.clear_row_with_pivot(i, j)
        if len(e.colrows.get(j, set())) <= 1:
            break


def snf(mat: SparseIntMatrix, witnesses: bool = False) -> SNFResult:
    """Smith normal form: invariant factors, optionally with U, V, D.

    When witnesses are requested, U and V are unimodular with
    U @ M @ V = D, D diagonal realising the divisibility chain; both facts
    are verified before returning.  Witness tracking is dense and meant for
    modest sizes; the factors-only path is the scalable one.
    """
    e = _Eliminator(mat, witnesses=witnesses)
    pivots: list[tuple[int, int]] = []
    while True:
        piv = e.pick_pivot()
        if piv is None:
            break
        i, j = piv
        _bilateral_clear(e, i, j)
        pivots.append((i, j))
        e.retire(i)

    factors = tuple(_divisibility_fix([e.entry(i, j) for i, j in pivots]))
    if not witnesses:
        return SNFResult(factors, len(factors))

    # Enforce the divisibility chain in place, pair by pair: pulling pivot b
    # into pivot a's column and re-clearing replaces (a, b) with
    # (gcd, +-lcm), all through tracked unimodular operations.
    r = len(pivots)
    changed = True
    while changed:
        changed = False
        for s in range(r):
            for t in range(s + 1, r):
                i_s, j_s = pivots[s]
                i_t, j_t = pivots[t]
                v_s, v_t = e.entry(i_s, j_s), e.entry(i_t, j_t)
                if v_t % v_s:
                    e.col_addmul(j_s, j_t, 1)
                    _bilateral_clear(e, i_s, j_s)
                    changed = True
    for i, j in pivots:
        if e.entry(i, j) < 0:
            e.row_addmul(i, i, -2)

    # Compose row/column permutations so the pivots land on the diagonal in
    # ascending order; permutations are unimodular up to sign.
    order = sorted(range(r), key=lambda t: e.entry(*pivots[t]))
    row_perm = [pivots[t][0] for t in order]
    col_perm = [pivots[t][1] for t in order]
    row_perm += sorted(set(range(mat.rows)) - set(row_perm))
    col_perm += sorted(set(range(mat.cols)) - set(col_perm))
    P = SparseIntMatrix(mat.rows, mat.rows, {(t, i): 1 for t, i in enumerate(row_perm)})
    Q = SparseIntMatrix(mat.cols, mat.cols, {(j, t): 1 for t, j in enumerate(col_perm)})

    U = P @ SparseIntMatrix.from_dense(e.U)
    V = SparseIntMatrix.from_dense(e.V) @ Q
    D = U @ mat @ V
    assert all(i == j for (i, j) in D.entries), "diagonal form has off-diagonal entries"
    got = tuple(D.entries.get((t, t), 0) for t in range(r))
    assert got == factors, "diagonal disagrees with invariant factors"
    assert abs(_det_bareiss(U.to_dense())) == 1 and abs(_det_bareiss(V.to_dense())) == 1, \
        "witnesses are not unimodular"
    return SNFResult(factors, r, U, V, D)


def _det_bareiss(rows: list[list[int]]) -> int:
    """Exact integer determinant (fraction-free Gaussian elimination)."""
    a = [row[:] for row in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
            a[i][k] = 0
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def minor_gcd_invariant_factors(mat: SparseIntMatrix) -> tuple[int, ...]:
    """Slow oracle: d_1 ... d_k from gcds of k x k minors.

    Exponential in the matrix size; meant for cross-checking snf on small
    matrices only.
    """
    from itertools import combinations
    dense = mat.to_dense()
    n, m = mat.rows, mat.cols
    prev = 1
    out = []
    for k in range(1, min(n, m) + 1):
        g = 0
        for rows_sel in combinations(range(n), k):
            for cols_sel in combinations(range(m), k):
                sub = [[dense[i][j] for j in cols_sel] for i in rows_sel]
                g = gcd(g, _det_bareiss(sub))
                if g == 1:
                    break
            if g == 1:
                break
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return tuple(out)


# ---------------------------------------------------------------------------
# finitely generated abelian groups


def _factorint(n: int) -> dict[int, int]:
    out: dict[int, int] = {}
    p = 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1 if p == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


@dataclass(frozen=True)
class FgAb:
    """Finitely generated abelian group: Z^rank + Z/d_1 + ... + Z/d_s.

    The torsion tuple is the canonical invariant-factor chain
    d_1 | d_2 | ... | d_s with every d_i >= 2, sorted ascending.
    """

    rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0:
            raise StructuralError("negative rank")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise StructuralError(f"torsion {self.torsion} is not a divisibility chain")
        if any(d < 2 for d in self.torsion):
            raise StructuralError("torsion factors must be >= 2")

    @staticmethod
    def from_cyclic(rank: int, orders) -> "FgAb":
        """Canonicalize arbitrary cyclic orders into invariant factors."""
        by_prime: dict[int, list[int]] = {}
        for d in orders:
            d = abs(int(d))
            if d == 0:
                rank += 1
                continue
            if d == 1:
                continue
            for p, exp in _factorint(d).items():
                by_prime.setdefault(p, []).append(exp)
        width = max((len(v) for v in by_prime.values()), default=0)
        factors = [1] * width
        for p, exps in by_prime.items():
            exps = sorted(exps, reverse=True)
            for i, exp in enumerate(exps):
                factors[i] *= p ** exp
        return FgAb(rank, tuple(sorted(f for f in factors if f > 1)))

    @staticmethod
    def zero() -> "FgAb":
        return FgAb(0, ())

    def is_zero(self) -> bool:
        return self.rank == 0 and not self.torsion

    def num_gens(self) -> int:
        return self.rank + len(self.torsion)

    def direct_sum(self, other: "FgAb") -> "FgAb":
        return FgAb.from_cyclic(self.rank + other.rank, self.torsion + other.torsion)

    def torsion_order(self) -> int:
        return prod(self.torsion) if self.torsion else 1

    def __str__(self):
        return render_fgab(self)


def render_fgab(g: FgAb) -> str:
    parts = []
    if g.rank == 1:
        parts.append("Z")
    elif g.rank > 1:
        parts.append(f"Z^{g.rank}")
    parts.extend(f"Z/{d}" for d in g.torsion)
    return " + ".join(parts) if parts else "0"


def parse_fgab(text: str) -> FgAb:
    s = text.strip()
    if s in ("0", ""):
        return FgAb.zero()
    rank = 0
    orders = []
    for part in s.split("+"):
        part = part.strip()
        if part.startswith("Z/"):
            orders.append(int(part[2:]))
        elif part.startswith("Z^"):
            rank += int(part[2:])
        elif part == "Z":
            rank += 1
        else:
            raise StructuralError(f"cannot parse group summand {part!r}")
    return FgAb.from_cyclic(rank, orders)


# ---------------------------------------------------------------------------
# cochain complexes


class IntComplex:
    """Cochain complex of free Z-modules on a degree interval.

    `ranks[k]` is the rank in degree k; `diffs[k]` maps degree k to k+1
    (rows = rank_{k+1}, cols = rank_k).  d o d = 0 is verified on
    construction; a failure is a bug in the caller, not user error.
    """

    def __init__(self, d0: int, ranks: dict[int, int], diffs: dict[int, SparseIntMatrix]):
        self.d0 = d0
        self.d1 = max(ranks) if ranks else d0
        self.ranks = dict(ranks)
        self.diffs = dict(diffs)
        for k, m in self.diffs.items():
            if m.cols != self.ranks.get(k, 0) or m.rows != self.ranks.get(k + 1, 0):
                raise StructuralError(f"differential at degree {k} has wrong shape")
        for k in sorted(self.diffs):
            nxt = self.diffs.get(k + 1)
            if nxt is not None:
                assert (nxt @ self.diffs[k]).is_zero(), f"d o d != 0 at degree {k}"

    def rank_in(self, k: int) -> int:
        return self.ranks.get(k, 0)

    def diff(self, k: int) -> SparseIntMatrix:
        return self.diffs.get(k) or SparseIntMatrix.zero(self.rank_in(k + 1), self.rank_in(k))


def cohomology(C: IntComplex, k: int) -> FgAb:
    """H^k(C) = ker(d^k) / im(d^(k-1)), via Smith normal form.

    The free rank is rank C^k - rank d^k - rank d^(k-1); the torsion is the
    set of invariant factors of d^(k-1) exceeding 1 (the image sits inside
    the kernel, so all of the cokernel torsion survives).
    """
    if not (C.d0 <= k <= C.d1):
        raise StructuralError(f"degree {k} outside complex range [{C.d0}, {C.d1}]")
    n_k = C.rank_in(k)
    r_out = rank(C.diff(k))
    below = C.diff(k - 1)
    s = snf(below)
    free = n_k - r_out - s.rank
    torsion = [d for d in s.factors if d > 1]
    return FgAb.from_cyclic(free, torsion)


def cohomology_table(C: IntComplex, kmin: int, kmax: int) -> dict[int, FgAb]:
    """H^k for kmin <= k <= kmax, factoring each differential only once.

    The top differential only contributes a rank, so it skips the full
    Smith normal form.
    """
    ranks: dict[int, int] = {}
    factors: dict[int, tuple[int, ...]] = {}
    for k in range(kmin - 1, kmax + 1):
        m = C.diff(k)
        if k == kmax:
            ranks[k] = rank(m)
        else:
            s = snf(m)
            ranks[k] = s.rank
            factors[k] = s.factors
    out = {}
    for k in range(kmin, kmax + 1):
        free = C.rank_in(k) - ranks[k] - ranks.get(k - 1, 0)
        torsion = [d for d in factors.get(k - 1, ()) if d > 1]
        out[k] = FgAb.from_cyclic(free, torsion)
    return out


def shift(C: IntComplex, by: int) -> IntComplex:
    return IntComplex(C.d0 + by, {k + by: r for k, r in C.ranks.items()},
                      {k + by: m for k, m in C.diffs.items()})


def direct_sum_complex(A: IntComplex, B: IntComplex) -> IntComplex:
    d0 = min(A.d0, B.d0)
    d1 = max(A.d1, B.d1)
    ranks = {}
    diffs = {}
    for k in range(d0, d1 + 1):
        ranks[k] = A.rank_in(k) + B.rank_in(k)
    for k in range(d0, d1):
        ma, mb = A.diff(k), B.diff(k)
        entries = dict(ma.entries)
        for (i, j), v in mb.entries.items():
            entries[(i + ma.rows, j + ma.cols)] = v
        diffs[k] = SparseIntMatrix(ranks[k + 1], ranks[k], entries)
    return IntComplex(d0, ranks, diffs)


# ---------------------------------------------------------------------------
# towers of finitely generated abelian groups


@dataclass(frozen=True)
class TowerResult:
    lim: FgAb
    lim1: FgAb
    criterion: str


def _map_is_well_defined(M: SparseIntMatrix, src: FgAb, dst: FgAb) -> bool:
    # relations of src must land in relations of dst
    for t, d in enumerate(src.torsion):
        j = src.rank + t
        for i in range(dst.num_gens()):
            v = d * M.entries.get((i, j), 0)
            if i < dst.rank:
                if v:
                    return False
            elif v % dst.torsion[i - dst.rank]:
                return False
    return True


def _map_is_surjective(M: SparseIntMatrix, dst: FgAb) -> bool:
    # stack the presentation relations of dst next to the matrix
    b = dst.num_gens()
    entries = dict(M.entries)
    for t, d in enumerate(dst.torsion):
        entries[(dst.rank + t, M.cols + t)] = d
    aug = SparseIntMatrix(b, M.cols + len(dst.torsion), entries)
    s = snf(aug)
    return s.rank == b and all(f == 1 for f in s.factors)


def fgab_map_check(M: SparseIntMatrix, src: FgAb, dst: FgAb) -> dict:
    """Well-definedness / surjectivity / isomorphism of a presented map.

    Generators are ordered free-then-torsion on both sides.  A surjection
    between abstractly isomorphic finitely generated groups is automatically
    injective, which is what the isomorphism test relies on.
    """
    if M.rows != dst.num_gens() or M.cols != src.num_gens():
        raise StructuralError("map matrix shape does not match presentations")
    wd = _map_is_well_defined(M, src, dst)
    surj = wd and _map_is_surjective(M, dst)
    iso = surj and src == dst
    return {"well_defined": wd, "surjective": surj, "iso": iso}


def tower_lim_lim1(groups: list[FgAb], maps: list[SparseIntMatrix],
                   eventually_constant_from: int | None = None) -> TowerResult:
    """lim and lim^1 of a truncated tower ... -> A_1 -> A_0.

    `groups[k]` is A_k and `maps[k-1]` presents f_k : A_k -> A_{k-1}.  Only
    Mittag-Leffler shapes are supported: towers declared eventually constant
    (maps beyond the given stage must verify as isomorphisms) and towers of
    degreewise surjections.  In both cases lim^1 vanishes; the returned lim
    is the finite-stage evaluation A_K.  (An infinite surjective tower may
    have a larger limit, e.g. the p-adics; such limits are represented
    symbolically by the homotopy calculator, not here.)
    """
    if len(maps) != len(groups) - 1:
        raise StructuralError("need exactly one map per adjacent pair")
    checks = [fgab_map_check(M, groups[k + 1], groups[k]) for k, M in enumerate(maps)]
    for k, c in enumerate(checks):
        if not c["well_defined"]:
            raise UnsupportedTowerError(f"map {k + 1} -> {k} is not well defined")
    if eventually_constant_from is not None:
        s = eventually_constant_from
        if all(c["iso"] for c in checks[s:]):
            return TowerResult(groups[-1], FgAb.zero(),
                               f"eventually constant (isomorphisms from stage {s})")
        raise UnsupportedTowerError("declared eventually constant but maps fail to be isomorphisms")
    if all(c["surjective"] for c in checks):
        return TowerResult(groups[-1], FgAb.zero(),
                           "degreewise surjective (Mittag-Leffler); finite-stage evaluation")
    raise UnsupportedTowerError("tower is neither eventually constant nor degreewise surjective")
