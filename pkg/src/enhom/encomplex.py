"""The n-fold E_n chain complex of a functor on level trees, and its totalization.

The spot of multidegree ``(r_n, ..., r_1)`` is the sum of F(t) over all trees
with those arities.  The differential ``d_j`` lowers ``r_j`` by one and is a
signed sum of face maps; each face map at level j < n is itself a signed sum
over shuffles of the two fibres being merged.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Hashable, Iterable

from .epicat import (
    LabeledTree,
    LevelTree,
    StructureError,
    TreeMorphism,
    admissible_faces,
    compose_maps,
    extend_face,
    face_admissible,
    top_face,
)
from .functors import EpiModule, Scalar
from .linhom import QQ, ChainComplex, ComplexError, Ring, SparseMatrix
from .signs import Shuffle, edge_label, enumerate_shuffles, shuffle_sign

Obj = LevelTree | LabeledTree
Multidegree = tuple[int, ...]


def _tree(obj: Obj) -> LevelTree:
    return obj.tree if isinstance(obj, LabeledTree) else obj


def _obj_key(obj: Obj) -> tuple:
    t = _tree(obj)
    phi = obj.phi if isinstance(obj, LabeledTree) else ()
    return (t.arities, t.maps, phi)


@lru_cache(maxsize=200_000)
def _tree_face_terms(t: LevelTree, j: int, i: int) -> tuple[tuple[TreeMorphism, LevelTree, tuple[int, ...]], ...]:
    """Morphisms of a face with their shuffle permutations (None-free, unsigned)."""
    if j == t.n:
        m = top_face(t, i)
        return ((m, m.target, ()),)
    a = t.children(j, i)
    b = t.children(j, i + 1)
    out = []
    for sh in enumerate_shuffles(len(a), len(b)):
        m, target = extend_face(t, j, i, sh.perm)
        out.append((m, target, sh.perm))
    return tuple(out)


def _fibre_degrees(obj: Obj, level: int, verts: range) -> list[int]:
    """Degrees of the subtrees above the given vertices, including X-degrees."""
    t = _tree(obj)
    degs = []
    for v in verts:
        d = t.subtree_edges[level - 1][v]
        if isinstance(obj, LabeledTree):
            d += sum(obj.leaf_degrees[leaf] for leaf in t.leaf_range(level, v))
        degs.append(d)
    return degs


def face_terms(obj: Obj, j: int, i: int) -> list[tuple[TreeMorphism, Obj, int]]:
    """The signed terms of the face map d_i^j at ``obj``: (morphism, target, sign).

    The edge-label sign (-1)^{s_{j,i}} is not included.
    """
    t = _tree(obj)
    if not face_admissible(t, j, i):
        raise StructureError(f"face ({j},{i}) is not admissible at {t}")
    terms = []
    if j == t.n:
        ((m, target, _),) = _tree_face_terms(t, j, i)
        sign = 1
        if isinstance(obj, LabeledTree):
            sign = _x_eps(obj, i)
            target = LabeledTree(target, obj.x_degrees, compose_maps(m.sigmas[-1], obj.phi))
        return [(m, target, sign)]
    left = _fibre_degrees(obj, j + 1, t.children(j, i))
    right = _fibre_degrees(obj, j + 1, t.children(j, i + 1))
    for m, target, perm in _tree_face_terms(t, j, i):
        sign = shuffle_sign(Shuffle(len(left), len(right), perm), left, right)
        if isinstance(obj, LabeledTree):
            target = LabeledTree(target, obj.x_degrees, compose_maps(m.sigmas[-1], obj.phi))
        terms.append((m, target, sign))
    return terms


def _x_eps(obj: LabeledTree, i: int) -> int:
    """epsilon(X_{n,i}; X_{n,i+1}) for the elements on leaves i and i+1."""
    exponent = 0
    for x, leaf in enumerate(obj.phi):
        if leaf != i or obj.x_degrees[x] % 2 == 0:
            continue
        for y, other in enumerate(obj.phi):
            if other == i + 1 and y < x:
                exponent += obj.x_degrees[y]
    return -1 if exponent % 2 else 1


def face_map_dij(F: EpiModule, obj: Obj, j: int, i: int) -> dict[Hashable, dict[tuple[Obj, Hashable], Scalar]]:
    """d_i^j on every basis token of F(obj): token -> {(target, token'): coefficient}."""
    out = {}
    terms = face_terms(obj, j, i)
    for tok in F.basis(obj):
        col: dict[tuple[Obj, Hashable], Scalar] = {}
        for m, target, sign in terms:
            for img, c in F.apply(m, target, tok).items():
                key = (target, img)
                total = col.get(key, 0) + sign * c
                if total:
                    col[key] = total
                else:
                    col.pop(key, None)
        out[tok] = col
    return out


def partial_j_column(F: EpiModule, obj: Obj, j: int) -> dict[Hashable, dict[tuple[Obj, Hashable], Scalar]]:
    """d_j = sum over admissible i of (-1)^{s_{j,i}} d_i^j, token by token."""
    out: dict[Hashable, dict] = {tok: {} for tok in F.basis(obj)}
    for i in admissible_faces(_tree(obj), j):
        sign = -1 if edge_label(obj, j, i) % 2 else 1
        for tok, col in face_map_dij(F, obj, j, i).items():
            acc = out[tok]
            for key, c in col.items():
                total = acc.get(key, 0) + sign * c
                if total:
                    acc[key] = total
                else:
                    acc.pop(key, None)
    return out


@dataclass
class MultiComplex:
    """An n-graded module with one differential per level.

    ``spots[(r_n, ..., r_1)]`` is the ordered basis of (object, token) pairs;
    ``partials[(key, j)]`` is the sparse block of d_j out of that spot.
    """

    n: int
    spots: dict[Multidegree, list[tuple[Obj, Hashable]]]
    partials: dict[tuple[Multidegree, int], SparseMatrix] = field(default_factory=dict)
    degree_bound: int | None = None
    complete: bool = False

    def dims(self) -> dict[Multidegree, int]:
        return {k: len(v) for k, v in self.spots.items()}

    @staticmethod
    def lower(key: Multidegree, j: int) -> Multidegree:
        n = len(key)
        k = list(key)
        k[n - j] -= 1
        return tuple(k)

    def block(self, key: Multidegree, j: int) -> SparseMatrix:
        if (key, j) in self.partials:
            return self.partials[(key, j)]
        rows = len(self.spots.get(self.lower(key, j), []))
        return SparseMatrix.zeros(rows, len(self.spots.get(key, [])))

    def check_relations(self) -> list[tuple[Multidegree, int, int]]:
        """Spots and pairs (j, k) where d_j d_k + d_k d_j (or d_j^2) fails to vanish."""
        bad = []
        for key in self.spots:
            for j in range(1, self.n + 1):
                for k in range(j, self.n + 1):
                    kj = self.lower(key, j)
                    kk = self.lower(key, k)
                    target = self.lower(kj, k)
                    if target not in self.spots:
                        continue
                    a = self.block(kj, k) @ self.block(key, j)
                    if j != k:
                        a = a + self.block(kk, j) @ self.block(key, k)
                    if not a.is_zero():
                        bad.append((key, j, k))
        return bad


def _spot_key(t: LevelTree) -> Multidegree:
    return t.multidegree


def build_multicomplex(F: EpiModule, degree_bound: int | None = None,
                       check: bool = False) -> MultiComplex:
    """Populate every spot of tree degree at most ``degree_bound``.

    Finitely supported modules may pass ``None`` to build the whole complex.
    """
    if degree_bound is None and not F.finitely_supported:
        raise StructureError("this module needs a degree bound")
    objs = F.support(degree_bound)
    objs = sorted(objs, key=_obj_key)
    spots: dict[Multidegree, list[tuple[Obj, Hashable]]] = {}
    for obj in objs:
        toks = F.basis(obj)
        if toks:
            spots.setdefault(_spot_key(_tree(obj)), []).extend((obj, tok) for tok in toks)
    spots = dict(sorted(spots.items()))
    index = {key: {pair: k for k, pair in enumerate(basis)} for key, basis in spots.items()}
    complete = F.finitely_supported and (
        degree_bound is None or all(_tree(o).degree <= degree_bound for o in F.support(None)))
    mc = MultiComplex(F.n, spots, degree_bound=degree_bound, complete=complete)
    for key, basis in spots.items():
        for j in range(1, F.n + 1):
            low = MultiComplex.lower(key, j)
            if low[F.n - j] < 0:
                continue
            rows = index.get(low, {})
            cols: list[dict[int, Scalar]] = []
            current = None
            cache: dict = {}
            for obj, tok in basis:
                if obj is not current:
                    cache = partial_j_column(F, obj, j)
                    current = obj
                col = {}
                for pair, c in cache[tok].items():
                    if pair not in rows:
                        raise StructureError(f"face image {pair[0]} lies outside the support")
                    col[rows[pair]] = c
                cols.append(col)
            if any(cols):
                mc.partials[(key, j)] = SparseMatrix(len(rows), len(basis), cols)
    if check:
        bad = mc.check_relations()
        if bad:
            raise ComplexError(f"differentials fail to anticommute at (spot, j, k) = {bad[:5]}")
    return mc


def build_multicomplex_X(F: EpiModule, degree_bound: int | None = None,
                         check: bool = False) -> MultiComplex:
    """The (E_n, X) complex of a functor on labelled trees."""
    if not F.labeled:
        raise StructureError("build_multicomplex_X needs a module on labelled trees")
    return build_multicomplex(F, degree_bound, check)


def totalize(mc: MultiComplex, ring: Ring = QQ, check: bool = True) -> ChainComplex:
    """Total complex: degree sum(r_i), differential sum_j d_j."""
    by_degree: dict[int, list[Multidegree]] = {}
    for key in mc.spots:
        by_degree.setdefault(sum(key), []).append(key)
    offsets: dict[Multidegree, int] = {}
    dims: dict[int, int] = {}
    labels: dict[int, list] = {}
    for p, keys in sorted(by_degree.items()):
        keys.sort()
        total = 0
        labels[p] = []
        for key in keys:
            offsets[key] = total
            total += len(mc.spots[key])
            labels[p].extend(mc.spots[key])
        dims[p] = total
    boundary: dict[int, SparseMatrix] = {}
    for p in dims:
        if p - 1 not in dims:
            continue
        cols: list[dict[int, Scalar]] = [{} for _ in range(dims[p])]
        for key in by_degree[p]:
            base = offsets[key]
            for j in range(1, mc.n + 1):
                blk = mc.partials.get((key, j))
                if blk is None:
                    continue
                roff = offsets[MultiComplex.lower(key, j)]
                for c, col in enumerate(blk.cols):
                    acc = cols[base + c]
                    for r, v in col.items():
                        total = acc.get(roff + r, 0) + v
                        if total:
                            acc[roff + r] = total
                        else:
                            acc.pop(roff + r, None)
        if any(cols):
            boundary[p] = SparseMatrix(dims[p - 1], dims[p], cols)
    certified = None
    if mc.degree_bound is not None and not mc.complete:
        # a degree p needs the spots of total degree p + 1
        certified = mc.degree_bound - mc.n - 1
    cc = ChainComplex(dims, boundary, ring, certified, labels)
    if check:
        bad = cc.check_square_zero()
        if bad:
            raise ComplexError(f"total differential squares to non-zero in degrees {bad}")
    return cc


def total_complex(F: EpiModule, degree_bound: int | None = None, ring: Ring = QQ,
                  check: bool = True) -> ChainComplex:
    return totalize(build_multicomplex(F, degree_bound), ring, check)


def iter_spot_labels(mc: MultiComplex) -> Iterable[tuple[Multidegree, str]]:
    for key, basis in mc.spots.items():
        for obj, tok in basis:
            yield key, f"{obj}|{tok}"
