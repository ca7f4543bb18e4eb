"""Exact sparse linear algebra and homology of chain complexes.

Ranks are computed by sparse Gaussian elimination over Q (fraction-free,
on integer rows) or over F_p.  Over Z the Smith invariants come from unit
pivot elimination followed by a dense Smith reduction of what remains.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

Scalar = int | Fraction


# ---------------------------------------------------------------------------
# Rings


@dataclass(frozen=True)
class Ring:
    """Coefficient ring: ``q`` (rationals), ``z`` (integers) or ``fp`` with prime ``p``."""

    kind: str
    p: int = 0

    def __post_init__(self) -> None:
        if self.kind not in ("q", "z", "fp"):
            raise ValueError(f"unknown ring {self.kind!r}")
        if self.kind == "fp" and not _is_prime(self.p):
            raise ValueError(f"{self.p} is not prime")

    @property
    def is_field(self) -> bool:
        return self.kind != "z"

    def __str__(self) -> str:
        return f"fp:{self.p}" if self.kind == "fp" else self.kind


QQ = Ring("q")
ZZ = Ring("z")


def GF(p: int) -> Ring:
    return Ring("fp", p)


def parse_ring(text: str) -> Ring:
    """Accepts ``q``, ``z``, ``fp:p`` and ``f:p``."""
    text = text.strip().lower()
    if text in ("q", "z"):
        return Ring(text)
    head, _, tail = text.partition(":")
    if head in ("fp", "f") and tail.isdigit():
        return GF(int(tail))
    raise ValueError(f"unknown ring {text!r}")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, math.isqrt(p) + 1))


# ---------------------------------------------------------------------------
# Sparse matrices


@dataclass
class SparseMatrix:
    """Column-major sparse matrix with exact entries; ``cols[c]`` maps row -> value."""

    rows: int
    ncols: int
    cols: list[dict[int, Scalar]] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.cols:
            self.cols = [{} for _ in range(self.ncols)]
        if len(self.cols) != self.ncols:
            raise ValueError("column count mismatch")

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "SparseMatrix":
        return cls(rows, cols, [{} for _ in range(cols)])

    @classmethod
    def from_triplets(cls, rows: int, cols: int,
                      triplets: Iterable[tuple[int, int, Scalar]]) -> "SparseMatrix":
        m = cls.zeros(rows, cols)
        for r, c, v in triplets:
            if not (0 <= r < rows and 0 <= c < cols):
                raise IndexError(f"entry ({r},{c}) outside a {rows}x{cols} matrix")
            col = m.cols[c]
            total = col.get(r, 0) + v
            if total:
                col[r] = total
            else:
                col.pop(r, None)
        return m

    @classmethod
    def from_columns(cls, rows: int, columns: Sequence[Mapping[int, Scalar]]) -> "SparseMatrix":
        return cls(rows, len(columns), [{r: v for r, v in c.items() if v} for c in columns])

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[Scalar]]) -> "SparseMatrix":
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls.from_triplets(rows, cols, ((r, c, v) for r, row in enumerate(dense)
                                              for c, v in enumerate(row) if v))

    @classmethod
    def identity(cls, k: int) -> "SparseMatrix":
        return cls(k, k, [{i: 1} for i in range(k)])

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.ncols)

    @property
    def nnz(self) -> int:
        return sum(len(c) for c in self.cols)

    def triplets(self) -> list[tuple[int, int, Scalar]]:
        return sorted((r, c, v) for c, col in enumerate(self.cols) for r, v in col.items())

    def to_dense(self) -> list[list[Scalar]]:
        out = [[0] * self.ncols for _ in range(self.rows)]
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                out[r][c] = v
        return out

    def is_zero(self) -> bool:
        return all(not c for c in self.cols)

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.ncols != other.rows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        out = []
        for col in other.cols:
            acc: dict[int, Scalar] = {}
            for k, v in col.items():
                for r, w in self.cols[k].items():
                    acc[r] = acc.get(r, 0) + v * w
            out.append({r: v for r, v in acc.items() if v})
        return SparseMatrix(self.rows, other.ncols, out)

    def __add__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        out = []
        for a, b in zip(self.cols, other.cols):
            acc = dict(a)
            for r, v in b.items():
                total = acc.get(r, 0) + v
                if total:
                    acc[r] = total
                else:
                    acc.pop(r, None)
            out.append(acc)
        return SparseMatrix(self.rows, self.ncols, out)

    def __neg__(self) -> "SparseMatrix":
        return SparseMatrix(self.rows, self.ncols, [{r: -v for r, v in c.items()} for c in self.cols])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return self.shape == other.shape and self.cols == other.cols

    def transpose(self) -> "SparseMatrix":
        out: list[dict[int, Scalar]] = [{} for _ in range(self.rows)]
        for c, col in enumerate(self.cols):
            for r, v in col.items():
                out[r][c] = v
        return SparseMatrix(self.ncols, self.rows, out)

    def row_dicts(self) -> list[dict[int, Scalar]]:
        return self.transpose().cols

    def denominators_cleared(self) -> "SparseMatrix":
        """Scale each column to integer entries (rank and kernel dimension are unchanged)."""
        out = []
        for col in self.cols:
            lcm = 1
            for v in col.values():
                if isinstance(v, Fraction):
                    lcm = lcm * v.denominator // math.gcd(lcm, v.denominator)
            out.append({r: int(v * lcm) for r, v in col.items()})
        return SparseMatrix(self.rows, self.ncols, out)


# ---------------------------------------------------------------------------
# Elimination


def _eliminate_field(vectors: list[dict[int, int]], p: int | None) -> int:
    """Rank of a list of sparse integer vectors, over F_p or (p=None) over Q.

    Pivots are chosen by a Markowitz-style rule: the shortest remaining
    vector, pivoting on its entry in the least populated coordinate.
    Over Q the updates are fraction-free and rows are divided by their
    content to keep entries small.
    """
    work = [v for v in vectors if v]
    if p is not None:
        work = [{k: x % p for k, x in v.items() if x % p} for v in work]
        work = [v for v in work if v]
    # coordinate -> set of vector ids containing it
    where: dict[int, set[int]] = {}
    alive: dict[int, dict[int, int]] = {}
    for idx, v in enumerate(work):
        alive[idx] = v
        for k in v:
            where.setdefault(k, set()).add(idx)
    rank = 0
    heap = [(len(v), idx) for idx, v in alive.items()]
    heapq.heapify(heap)
    while heap:
        size, pid = heapq.heappop(heap)
        pv = alive.get(pid)
        if pv is None:
            continue
        if len(pv) != size:
            heapq.heappush(heap, (len(pv), pid))
            continue
        del alive[pid]
        for k in pv:
            where[k].discard(pid)
        pk = min(pv, key=lambda k: (len(where[k]), k))
        rank += 1
        a = pv[pk]
        if p is not None:
            inv = pow(a, -1, p)
        for other in list(where[pk]):
            ov = alive[other]
            b = ov[pk]
            if p is not None:
                factor = (b * inv) % p
                for k, x in pv.items():
                    nv = (ov.get(k, 0) - factor * x) % p
                    if nv:
                        if k not in ov:
                            where[k].add(other)
                        ov[k] = nv
                    elif k in ov:
                        del ov[k]
                        where[k].discard(other)
            else:
                g = math.gcd(a, b)
                sa, sb = a // g, b // g
                if sa != 1:
                    for k in ov:
                        ov[k] *= sa
                for k, x in pv.items():
                    nv = ov.get(k, 0) - sb * x
                    if nv:
                        if k not in ov:
                            where[k].add(other)
                        ov[k] = nv
                    elif k in ov:
                        del ov[k]
                        where[k].discard(other)
                content = 0
                for x in ov.values():
                    content = math.gcd(content, x)
                    if content == 1:
                        break
                if content > 1:
                    for k in ov:
                        ov[k] //= content
            if not ov:
                del alive[other]
            elif len(ov) < size:
                heapq.heappush(heap, (len(ov), other))
    return rank


def rank(m: SparseMatrix, ring: Ring = QQ) -> int:
    """Exact rank over a field."""
    if not ring.is_field:
        raise ValueError("rank over Z is not a field rank; use snf")
    if ring.kind == "fp":
        m = _reduce_mod(m, ring.p)
    else:
        m = m.denominators_cleared()
    # eliminate along the shorter side
    source = m.transpose() if m.rows < m.ncols else m
    vectors = [dict(c) for c in source.cols]
    return _eliminate_field(vectors, ring.p if ring.kind == "fp" else None)


def _reduce_mod(m: SparseMatrix, p: int) -> SparseMatrix:
    out = []
    for col in m.cols:
        new = {}
        for r, v in col.items():
            if isinstance(v, Fraction):
                if v.denominator % p == 0:
                    raise ValueError(f"entry {v} is not defined modulo {p}")
                x = v.numerator * pow(v.denominator, -1, p) % p
            else:
                x = v % p
            if x:
                new[r] = x
        out.append(new)
    return SparseMatrix(m.rows, m.ncols, out)


def nullity(m: SparseMatrix, ring: Ring = QQ) -> int:
    return m.ncols - rank(m, ring)


def _dense_snf(dense: list[list[int]]) -> list[int]:
    """Non-zero diagonal of the Smith form of a dense integer matrix."""
    a = [row[:] for row in dense]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []

    def move_smallest(t: int, cells) -> bool:
        best = None
        for i, j in cells:
            if a[i][j] and (best is None or abs(a[i][j]) < abs(a[best[0]][best[1]])):
                best = (i, j)
        if best is None:
            return False
        i, j = best
        a[t], a[i] = a[i], a[t]
        if j != t:
            for row in a:
                row[t], row[j] = row[j], row[t]
        return True

    for t in range(min(rows, cols)):
        if not move_smallest(t, ((i, j) for i in range(t, rows) for j in range(t, cols))):
            break
        while True:
            piv = a[t][t]
            for i in range(t + 1, rows):
                if a[i][t]:
                    q = a[i][t] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
            for j in range(t + 1, cols):
                if a[t][j]:
                    q = a[t][j] // piv
                    for row in a:
                        row[j] -= q * row[t]
            rest = [(i, t) for i in range(t + 1, rows)] + [(t, j) for j in range(t + 1, cols)]
            if any(a[i][j] for i, j in rest):
                move_smallest(t, [(t, t)] + rest)
                continue
            bad = next((i for i in range(t + 1, rows)
                        if any(a[i][j] % piv for j in range(t + 1, cols))), None)
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        diag.append(abs(a[t][t]))
    return diag


def snf(m: SparseMatrix) -> list[int]:
    """Non-zero Smith invariants d_1 | d_2 | ... of an integer matrix.

    Unit pivots are eliminated sparsely first (each contributes a 1); the
    remaining block goes through a dense Smith reduction.
    """
    for col in m.cols:
        if any(isinstance(v, Fraction) and v.denominator != 1 for v in col.values()):
            raise ValueError("snf needs integer entries")
    rowsets: dict[int, dict[int, int]] = {}
    for c, col in enumerate(m.cols):
        for r, v in col.items():
            rowsets.setdefault(r, {})[c] = int(v)
    colsets: dict[int, set[int]] = {}
    for r, row in rowsets.items():
        for c in row:
            colsets.setdefault(c, set()).add(r)
    ones = 0
    while True:
        pivot = None
        best = None
        for r, row in rowsets.items():
            for c, v in row.items():
                if v in (1, -1):
                    cost = (len(row) - 1) * (len(colsets[c]) - 1)
                    if best is None or cost < best:
                        best, pivot = cost, (r, c)
                        if cost == 0:
                            break
            if best == 0:
                break
        if pivot is None:
            break
        pr, pc = pivot
        prow = rowsets.pop(pr)
        for c in prow:
            colsets[c].discard(pr)
        u = prow[pc]
        for r in list(colsets[pc]):
            row = rowsets[r]
            factor = row[pc] * u
            for c, x in prow.items():
                nv = row.get(c, 0) - factor * x
                if nv:
                    if c not in row:
                        colsets[c].add(r)
                    row[c] = nv
                else:
                    if c in row:
                        del row[c]
                        colsets[c].discard(r)
            if not row:
                del rowsets[r]
        ones += 1
    rest_rows = sorted(r for r, row in rowsets.items() if row)
    rest_cols = sorted({c for r in rest_rows for c in rowsets[r]})
    cindex = {c: k for k, c in enumerate(rest_cols)}
    dense = [[0] * len(rest_cols) for _ in rest_rows]
    for i, r in enumerate(rest_rows):
        for c, v in rowsets[r].items():
            dense[i][cindex[c]] = v
    rest = _dense_snf(dense) if dense else []
    # restore the divisibility chain
    return [1] * ones + _normalize_invariants(rest)


def _normalize_invariants(values: list[int]) -> list[int]:
    """Rebuild d_1 | d_2 | ... from an arbitrary diagonal."""
    vals = [abs(v) for v in values if v]
    for i in range(len(vals)):
        for j in range(i + 1, len(vals)):
            g = math.gcd(vals[i], vals[j])
            l = vals[i] * vals[j] // g
            vals[i], vals[j] = g, l
    return sorted(vals)


def rank_over(m: SparseMatrix, ring: Ring) -> int:
    if ring.is_field:
        return rank(m, ring)
    return len(snf(m))


# ---------------------------------------------------------------------------
# Chain complexes and homology


class ComplexError(ValueError):
    """Raised when a purported chain complex has non-vanishing d^2."""


@dataclass
class ChainComplex:
    """Finite-rank complex: ``dims[p]`` and ``boundary[p]: C_p -> C_{p-1}``.

    ``certified_max`` is the largest degree whose homology is exact given
    the truncation used to build the complex (None if nothing is truncated).
    """

    dims: dict[int, int]
    boundary: dict[int, SparseMatrix]
    ring: Ring = QQ
    certified_max: int | None = None
    labels: dict[int, list] = field(default_factory=dict)

    def degrees(self) -> list[int]:
        return sorted(p for p, d in self.dims.items() if d)

    def d(self, p: int) -> SparseMatrix:
        if p in self.boundary:
            return self.boundary[p]
        return SparseMatrix.zeros(self.dims.get(p - 1, 0), self.dims.get(p, 0))

    def check_square_zero(self) -> list[int]:
        """Degrees p where d_{p-1} d_p is not zero."""
        bad = []
        for p in sorted(self.boundary):
            if p - 1 in self.boundary:
                prod = self.boundary[p - 1] @ self.boundary[p]
                if not prod.is_zero():
                    bad.append(p)
        return bad

    def euler_characteristic(self, upto: int | None = None) -> int:
        return sum((-1) ** p * d for p, d in self.dims.items() if upto is None or p <= upto)

    def to_json(self) -> dict:
        return {
            "ring": str(self.ring),
            "degree": {str(p): d for p, d in sorted(self.dims.items())},
            "boundary": {str(p): [[r, c, _scalar_str(v)] for r, c, v in m.triplets()]
                         for p, m in sorted(self.boundary.items())},
        }

    def to_matrix_market(self) -> str:
        lines = []
        for p, m in sorted(self.boundary.items()):
            lines.append(f"% boundary degree {p} -> {p - 1}")
            lines.append("%%MatrixMarket matrix coordinate integer general"
                         if all(isinstance(v, int) for _, _, v in m.triplets())
                         else "%%MatrixMarket matrix coordinate rational general")
            lines.append(f"{m.rows} {m.ncols} {m.nnz}")
            lines.extend(f"{r + 1} {c + 1} {_scalar_str(v)}" for r, c, v in m.triplets())
        return "\n".join(lines) + "\n"


def _scalar_str(v: Scalar) -> int | str:
    if isinstance(v, Fraction) and v.denominator != 1:
        return f"{v.numerator}/{v.denominator}"
    return int(v)


@dataclass
class HomologyResult:
    """Betti numbers (and torsion over Z) by degree, with the certified range."""

    betti: dict[int, int]
    ring: Ring
    torsion: dict[int, list[int]] = field(default_factory=dict)
    certified_max: int | None = None
    dims: dict[int, int] = field(default_factory=dict)

    def betti_list(self, upto: int) -> list[int]:
        return [self.betti.get(p, 0) for p in range(upto + 1)]

    @property
    def is_acyclic(self) -> bool:
        return all(b == 0 for b in self.betti.values()) and not any(self.torsion.values())

    def is_certified(self, p: int) -> bool:
        return self.certified_max is None or p <= self.certified_max

    def to_json(self) -> dict:
        out = {
            "ring": str(self.ring),
            "betti": {str(p): b for p, b in sorted(self.betti.items())},
            "certified_max": self.certified_max,
        }
        if self.ring.kind == "z":
            out["torsion"] = {str(p): t for p, t in sorted(self.torsion.items()) if t}
        return out


def homology(c: ChainComplex, ring: Ring | None = None, check: bool = True) -> HomologyResult:
    """Homology of a finite complex; raises ComplexError when d^2 != 0."""
    ring = ring or c.ring
    if check:
        bad = c.check_square_zero()
        if bad:
            raise ComplexError(f"d^2 != 0 starting in degrees {bad}")
    ranks: dict[int, int] = {}
    torsion: dict[int, list[int]] = {}
    for p, m in c.boundary.items():
        if m.nnz == 0:
            ranks[p] = 0
            continue
        if ring.is_field:
            ranks[p] = rank(m, ring)
        else:
            inv = snf(m)
            ranks[p] = len(inv)
            tors = [d for d in inv if d != 1]
            if tors:
                torsion[p - 1] = tors
    betti = {}
    for p, d in c.dims.items():
        b = d - ranks.get(p, 0) - ranks.get(p + 1, 0)
        if c.certified_max is not None and p > c.certified_max:
            continue
        betti[p] = b
    return HomologyResult(dict(sorted(betti.items())), ring, torsion, c.certified_max, dict(c.dims))


# ---------------------------------------------------------------------------
# Subspace tools used by the spectral sequence pages


def column_space_rank(vectors: Sequence[Mapping[int, Scalar]], ring: Ring = QQ) -> int:
    if not vectors:
        return 0
    rows = 1 + max((r for v in vectors for r in v), default=-1)
    return rank(SparseMatrix.from_columns(rows, list(vectors)), ring)


def kernel_basis(m: SparseMatrix) -> list[dict[int, Fraction]]:
    """A basis of the right kernel over Q, by reduced row echelon form."""
    rows = [dict(r) for r in m.row_dicts()]
    pivots: list[tuple[int, dict[int, Fraction]]] = []
    for row in rows:
        vec = {k: Fraction(v) for k, v in row.items()}
        for pc, prow in pivots:
            if pc in vec:
                f = vec[pc]
                for k, v in prow.items():
                    nv = vec.get(k, 0) - f * v
                    if nv:
                        vec[k] = nv
                    else:
                        vec.pop(k, None)
        if not vec:
            continue
        pc = min(vec)
        inv = 1 / vec[pc]
        vec = {k: v * inv for k, v in vec.items()}
        new_pivots = []
        for qc, qrow in pivots:
            if pc in qrow:
                f = qrow[pc]
                for k, v in vec.items():
                    nv = qrow.get(k, 0) - f * v
                    if nv:
                        qrow[k] = nv
                    else:
                        qrow.pop(k, None)
            new_pivots.append((qc, qrow))
        pivots = new_pivots + [(pc, vec)]
    pivot_cols = {pc for pc, _ in pivots}
    basis = []
    for free in range(m.ncols):
        if free in pivot_cols:
            continue
        vec = {free: Fraction(1)}
        for pc, prow in pivots:
            if free in prow:
                vec[pc] = -prow[free]
        basis.append(vec)
    return basis
