"""The spectral sequence of the E_2 bicomplex filtered by r_1.

For a tree [r_2] -> [r_1] write p = r_2 and q = r_1.  The differential d_2
keeps q and d_1 lowers it, so F_s = (spots with q <= s) is a filtration.
Its first page is the d_2-homology, which is predicted to be the sum of
tensor products H^bar_{l_0} (x) ... (x) H^bar_{l_q} over l_0 + ... + l_q = p - q.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

from .bar import algebra_bar_homology
from .encomplex import build_multicomplex, totalize
from .epicat import LevelTree, enumerate_ordered_surjections
from .functors import AlgebraModule, CommutativeAlgebraPresentation
from .linhom import QQ, ChainComplex, Ring, SparseMatrix, homology, kernel_basis, rank

Cell = tuple[int, int]  # (p, q)


def _two_level_trees(p: int, q: int) -> list[LevelTree]:
    return [LevelTree((q, p), (f,)) for f in enumerate_ordered_surjections(p, q)]


@dataclass
class E1Table:
    """Computed first page next to the tensor-product prediction, per weight."""

    computed: dict[int, dict[Cell, int]] = field(default_factory=dict)
    predicted: dict[int, dict[Cell, int]] = field(default_factory=dict)

    def totals(self, table: Mapping[int, Mapping[Cell, int]]) -> dict[Cell, int]:
        out: dict[Cell, int] = {}
        for cells in table.values():
            for cell, v in cells.items():
                out[cell] = out.get(cell, 0) + v
        return dict(sorted(out.items()))

    @property
    def agrees(self) -> bool:
        return self.totals(self.computed) == self.totals(self.predicted) and all(
            {c: v for c, v in self.computed.get(w, {}).items() if v}
            == {c: v for c, v in self.predicted.get(w, {}).items() if v}
            for w in set(self.computed) | set(self.predicted))


def horizontal_homology(A: CommutativeAlgebraPresentation, weight: int, p: int, q: int,
                        ring: Ring = QQ) -> int:
    """dim of the d_2-homology of L^2(A) at spot (p, q) in one weight."""
    F = AlgebraModule(A, 2, weight)
    from .encomplex import partial_j_column

    def spot(pp: int) -> list:
        if pp < q or pp < 0:
            return []
        return [(t, tok) for t in _two_level_trees(pp, q) for tok in F.basis(t)]

    def d2(pp: int) -> SparseMatrix:
        src, tgt = spot(pp), spot(pp - 1)
        index = {pair: k for k, pair in enumerate(tgt)}
        cols = []
        current, cache = None, {}
        for t, tok in src:
            if t is not current:
                cache, current = partial_j_column(F, t, 2), t
            cols.append({index[pair]: c for pair, c in cache[tok].items()})
        return SparseMatrix(len(tgt), len(src), cols)

    dim = len(spot(p))
    if dim == 0:
        return 0
    out_rank = rank(d2(p), ring) if p > q else 0
    in_rank = rank(d2(p + 1), ring)
    return dim - out_rank - in_rank


def _compositions_nonneg(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in _compositions_nonneg(total - first, parts - 1):
            yield (first,) + rest


def predicted_E1(hbar: Mapping[int, Mapping[int, int]], weight: int, p: int, q: int) -> int:
    """sum over l_0+...+l_q = p-q and weights w_0+...+w_q = weight of prod dim H^bar_{l_i}(w_i).

    ``hbar[w][l]`` is dim H^bar_l in weight w.
    """
    if p < q:
        return 0
    total = 0
    for ls in _compositions_nonneg(p - q, q + 1):
        for ws in _positive_compositions(weight, q + 1):
            prod = 1
            for l, w in zip(ls, ws):
                prod *= hbar.get(w, {}).get(l, 0)
                if not prod:
                    break
            total += prod
    return total


def _positive_compositions(total: int, parts: int):
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in _positive_compositions(total - first, parts - 1):
            yield (first,) + rest


def e2_spectral_E1(A: CommutativeAlgebraPresentation, max_total: int, max_weight: int,
                   ring: Ring = QQ) -> E1Table:
    """E^1_{p,q} for p + q <= max_total, computed and predicted, for weights 1..max_weight."""
    table = E1Table()
    hbar: dict[int, dict[int, int]] = {}
    for w in range(1, max_weight + 1):
        h = algebra_bar_homology(A, weight=w, ring=ring)
        hbar[w] = {l: b for l, b in h.betti.items() if b}
    for w in range(1, max_weight + 1):
        comp: dict[Cell, int] = {}
        pred: dict[Cell, int] = {}
        for q in range(0, max_total + 1):
            for p in range(q, max_total - q + 1):
                if p + 1 > w:
                    # r_2 + 1 <= weight, nothing lives here
                    continue
                v = horizontal_homology(A, w, p, q, ring)
                if v:
                    comp[(p, q)] = v
                u = predicted_E1(hbar, w, p, q)
                if u:
                    pred[(p, q)] = u
        table.computed[w] = comp
        table.predicted[w] = pred
    return table


# ---------------------------------------------------------------------------
# Full pages of a filtered complex


def _span_rank(vectors: list[dict[int, Fraction]], size: int, ring: Ring) -> int:
    if not vectors:
        return 0
    return rank(SparseMatrix.from_columns(size, vectors), ring)


def _restrict(m: SparseMatrix, rows: list[int], cols: list[int]) -> SparseMatrix:
    rindex = {r: k for k, r in enumerate(rows)}
    out = []
    for c in cols:
        out.append({rindex[r]: v for r, v in m.cols[c].items() if r in rindex})
    return SparseMatrix(len(rows), len(cols), out)


def _apply(m: SparseMatrix, vec: Mapping[int, Fraction]) -> dict[int, Fraction]:
    out: dict[int, Fraction] = {}
    for c, x in vec.items():
        for r, v in m.cols[c].items():
            out[r] = out.get(r, 0) + x * v
    return {r: v for r, v in out.items() if v}


@dataclass
class FilteredComplex:
    """A finite complex with an increasing coordinate filtration ``level[p][i]``."""

    complex: ChainComplex
    level: dict[int, list[int]]

    def filtration_range(self) -> tuple[int, int]:
        vals = [s for ls in self.level.values() for s in ls]
        return (min(vals), max(vals)) if vals else (0, 0)

    def _Z(self, k: int, s: int, r: int) -> list[dict[int, Fraction]]:
        """F_s C_k intersected with d^{-1}(F_{s-r})."""
        cols = [i for i, v in enumerate(self.level.get(k, [])) if v <= s]
        if not cols:
            return []
        d = self.complex.d(k)
        rows = [i for i, v in enumerate(self.level.get(k - 1, [])) if v > s - r]
        sub = _restrict(d, rows, cols)
        return [{cols[c]: x for c, x in vec.items()} for vec in kernel_basis(sub)]

    def _B(self, k: int, s: int, r: int) -> list[dict[int, Fraction]]:
        """F_s C_k intersected with d(F_{s+r} C_{k+1})."""
        cols = [i for i, v in enumerate(self.level.get(k + 1, [])) if v <= s + r]
        if not cols:
            return []
        d = self.complex.d(k + 1)
        rows = [i for i, v in enumerate(self.level.get(k, [])) if v > s]
        sub = _restrict(d, rows, cols)
        pre = [{cols[c]: x for c, x in vec.items()} for vec in kernel_basis(sub)]
        return [img for img in (_apply(d, v) for v in pre) if img]

    def page_dim(self, r: int, k: int, s: int, ring: Ring = QQ) -> int:
        """dim E^r_s in total degree k: Z^r_s / (Z^{r-1}_{s-1} + B^{r-1}_s)."""
        size = self.complex.dims.get(k, 0)
        if size == 0:
            return 0
        z = self._Z(k, s, r)
        below = self._Z(k, s - 1, r - 1) + self._B(k, s, r - 1)
        return _span_rank(z, size, ring) - _span_rank(below, size, ring)

    def page(self, r: int, ring: Ring = QQ) -> dict[int, dict[int, int]]:
        """E^r as {total degree: {filtration s: dim}}."""
        lo, hi = self.filtration_range()
        out: dict[int, dict[int, int]] = {}
        for k in sorted(self.complex.dims):
            row = {}
            for s in range(lo, hi + 1):
                v = self.page_dim(r, k, s, ring)
                if v:
                    row[s] = v
            out[k] = row
        return out

    def infinity_page(self, ring: Ring = QQ) -> dict[int, dict[int, int]]:
        lo, hi = self.filtration_range()
        return self.page(hi - lo + 2, ring)


def e2_filtered_complex(A: CommutativeAlgebraPresentation, weight: int,
                        ring: Ring = QQ) -> FilteredComplex:
    """The weight piece of Tot C^{E_2}(L^2(A)), filtered by r_1."""
    mc = build_multicomplex(AlgebraModule(A, 2, weight))
    cc = totalize(mc, ring)
    level = {k: [obj.r(1) for obj, _ in labels] for k, labels in cc.labels.items()}
    return FilteredComplex(cc, level)


def abutment_check(A: CommutativeAlgebraPresentation, weight: int, max_degree: int,
                   ring: Ring = QQ) -> tuple[dict[int, int], dict[int, int]]:
    """(sum over s of E^infinity_s, Betti numbers) by total degree up to ``max_degree``."""
    fc = e2_filtered_complex(A, weight, ring)
    inf = fc.infinity_page(ring)
    h = homology(fc.complex, ring)
    lhs = {k: sum(row.values()) for k, row in inf.items() if k <= max_degree}
    rhs = {k: h.betti.get(k, 0) for k in lhs}
    return lhs, rhs
