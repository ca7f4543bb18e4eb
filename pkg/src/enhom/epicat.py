"""Categories of order-preserving surjections and planar level trees.

An n-level tree is a tower ``[r_n] -> ... -> [r_1]`` of order-preserving
surjections.  Level 1 is the row of vertices nearest the root; level n holds
the leaves.  A surjection ``[n] -> [m]`` is stored as its value tuple of
length ``n + 1``.

Everything in here is immutable and enumeration functions are pure, so
results may be cached and shared freely.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Iterator, Sequence

Surjection = tuple[int, ...]


class StructureError(ValueError):
    """Raised for malformed trees, morphisms or mismatched composites."""


# ---------------------------------------------------------------------------
# Delta^epi


def is_surjection(values: Sequence[int], target: int) -> bool:
    return set(values) == set(range(target + 1))


def is_order_preserving_surjection(values: Sequence[int]) -> bool:
    if not values or values[0] != 0:
        return False
    return all(b - a in (0, 1) for a, b in zip(values, values[1:]))


def compositions(total: int, parts: int) -> Iterator[tuple[int, ...]]:
    """Compositions of ``total`` into ``parts`` positive integers, lex order."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        if total >= 1:
            yield (total,)
        return
    for first in range(1, total - parts + 2):
        for rest in compositions(total - first, parts - 1):
            yield (first,) + rest


def from_fibre_sizes(sizes: Sequence[int]) -> Surjection:
    return tuple(v for v, c in enumerate(sizes) for _ in range(c))


def fibre_sizes(values: Sequence[int], target: int) -> tuple[int, ...]:
    sizes = [0] * (target + 1)
    for v in values:
        sizes[v] += 1
    return tuple(sizes)


@lru_cache(maxsize=None)
def enumerate_ordered_surjections(n: int, m: int) -> tuple[Surjection, ...]:
    """All order-preserving surjections ``[n] -> [m]``.

    Ordered lexicographically by their fibre-cardinality compositions.
    """
    if n < 0 or m < 0 or m > n:
        return ()
    return tuple(from_fibre_sizes(c) for c in compositions(n + 1, m + 1))


def face(n: int, i: int) -> Surjection:
    """The elementary surjection d_i: [n] -> [n-1] identifying i and i+1."""
    if not 0 <= i < n:
        raise StructureError(f"d_{i} is not defined on [{n}]")
    return tuple(j if j <= i else j - 1 for j in range(n + 1))


def identity(n: int) -> Surjection:
    return tuple(range(n + 1))


def constant(n: int) -> Surjection:
    return (0,) * (n + 1)


def compose_maps(g: Sequence[int], f: Sequence[int]) -> Surjection:
    """``g o f`` for maps given as value tuples."""
    return tuple(g[v] for v in f)


# ---------------------------------------------------------------------------
# Trees


@dataclass(frozen=True)
class LevelTree:
    """An object of Epi_n.

    ``arities`` is ``(r_1, ..., r_n)`` and ``maps`` is ``(f_2, ..., f_n)`` with
    ``f_i: [r_i] -> [r_{i-1}]``.  Equality is equality of these tuples.
    """

    arities: tuple[int, ...]
    maps: tuple[Surjection, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "arities", tuple(self.arities))
        object.__setattr__(self, "maps", tuple(tuple(f) for f in self.maps))
        if not self.arities:
            raise StructureError("a level tree needs at least one level")
        if len(self.maps) != len(self.arities) - 1:
            raise StructureError("need exactly n - 1 maps")
        if any(r < 0 for r in self.arities):
            raise StructureError("arities must be non-negative")
        for k, f in enumerate(self.maps):
            src, tgt = self.arities[k + 1], self.arities[k]
            if len(f) != src + 1 or not is_order_preserving_surjection(f) or f[-1] != tgt:
                raise StructureError(f"f_{k + 2}={list(f)} is not a surjection [{src}] -> [{tgt}]")

    # -- basic data -------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.arities)

    def r(self, level: int) -> int:
        return self.arities[level - 1]

    def f(self, level: int) -> Surjection:
        """The map f_level out of ``[r_level]``; f_1 is the constant map to [0]."""
        if level == 1:
            return constant(self.arities[0])
        return self.maps[level - 2]

    @property
    def degree(self) -> int:
        return sum(r + 1 for r in self.arities)

    @property
    def total_degree(self) -> int:
        return sum(self.arities)

    @property
    def multidegree(self) -> tuple[int, ...]:
        """``(r_n, ..., r_1)``."""
        return tuple(reversed(self.arities))

    @property
    def is_trivial(self) -> bool:
        return all(r == 0 for r in self.arities)

    @property
    def is_fork(self) -> bool:
        return self.n >= 2 and self.maps[-1] == identity(self.arities[-1])

    @property
    def leaves(self) -> int:
        return self.arities[-1] + 1

    # -- planar structure -------------------------------------------------

    @cached_property
    def _children(self) -> tuple[tuple[range, ...], ...]:
        # _children[l][v]: vertices of level l+2 above vertex v of level l+1
        out = []
        for k, f in enumerate(self.maps):
            starts = [0] * (self.arities[k] + 2)
            for v in f:
                starts[v + 1] += 1
            for v in range(1, len(starts)):
                starts[v] += starts[v - 1]
            out.append(tuple(range(starts[v], starts[v + 1]) for v in range(self.arities[k] + 1)))
        return tuple(out)

    def children(self, level: int, v: int) -> range:
        """Vertices of ``level + 1`` sitting over vertex ``v`` of ``level``."""
        if level == 0:
            return range(self.arities[0] + 1)
        return self._children[level - 1][v]

    def leaf_range(self, level: int, v: int) -> range:
        """Leaves lying above vertex ``v`` of ``level`` (v itself for level n)."""
        lo = hi = v
        for lev in range(level, self.n):
            lo = self._children[lev - 1][lo].start
            hi = self._children[lev - 1][hi].stop - 1
        return range(lo, hi + 1)

    @cached_property
    def edge_labels(self) -> tuple[tuple[int, ...], ...]:
        """Planar labels 1..degree, bottom to top and left to right.

        ``edge_labels[l-1][v]`` labels the edge ending at vertex ``v`` of level
        ``l``.  The traversal is depth-first (preorder), which reproduces the
        labelled 14-edge example tree.
        """
        labels = [[0] * (r + 1) for r in self.arities]
        counter = 0
        stack = [(1, v) for v in reversed(range(self.arities[0] + 1))]
        while stack:
            level, v = stack.pop()
            counter += 1
            labels[level - 1][v] = counter
            if level < self.n:
                stack.extend((level + 1, c) for c in reversed(self.children(level, v)))
        return tuple(tuple(row) for row in labels)

    @cached_property
    def subtree_edges(self) -> tuple[tuple[int, ...], ...]:
        """Number of edges strictly above each vertex (the degree of t_{l,v})."""
        counts: list[list[int]] = [[0] * (r + 1) for r in self.arities]
        for level in range(self.n - 1, 0, -1):
            for v in range(self.arities[level - 1] + 1):
                counts[level - 1][v] = sum(1 + counts[level][c] for c in self.children(level, v))
        return tuple(tuple(row) for row in counts)

    def __str__(self) -> str:
        return serialize_tree(self)


def trivial_tree(n: int) -> LevelTree:
    return LevelTree((0,) * n, tuple((0,) for _ in range(n - 1)))


def palm_tree(n: int, m: int) -> LevelTree:
    """iota_n([m]): m + 1 leaves on a single trunk."""
    return iota(1, n, LevelTree((m,)))


def fork_tree(top: LevelTree) -> LevelTree:
    """Prepend an identity on top of ``top``: [r_n] -id-> [r_n] -> ..."""
    r = top.arities[-1]
    return LevelTree(top.arities + (r,), top.maps + (identity(r),))


def tree_from_maps(*maps: Sequence[int], r1: int | None = None) -> LevelTree:
    """Build a tree from ``f_2, ..., f_n``; ``r1`` is needed only when n = 1."""
    if not maps:
        if r1 is None:
            raise StructureError("a one-level tree needs r1")
        return LevelTree((r1,))
    arities = [max(maps[0])] + [len(f) - 1 for f in maps]
    return LevelTree(tuple(arities), tuple(tuple(f) for f in maps))


def iota(k: int, n: int, t: LevelTree) -> LevelTree:
    """Embed a k-level tree as an n-level tree by adding [0]s below its root."""
    if t.n != k or not 1 <= k <= n:
        raise StructureError("iota needs a k-level tree and 1 <= k <= n")
    extra = n - k
    arities = (0,) * extra + t.arities
    maps = tuple((0,) for _ in range(extra - 1))
    if extra:
        maps = maps + (constant(t.arities[0]),)
    return LevelTree(arities, maps + t.maps)


def fiber_subtree(t: LevelTree, j: int, i: int) -> LevelTree:
    """The (n - j)-level tree t_{j,i} above vertex ``i`` of level ``j``."""
    if not 1 <= j <= t.n - 1:
        raise StructureError(f"fibre level {j} out of range for an {t.n}-level tree")
    if not 0 <= i <= t.r(j):
        raise StructureError(f"vertex {i} out of range at level {j}")
    verts = [t.children(j, i)]
    for level in range(j + 1, t.n):
        verts.append(range(t.children(level, verts[-1][0]).start,
                           t.children(level, verts[-1][-1]).stop))
    arities = tuple(len(vs) - 1 for vs in verts)
    maps = []
    for k in range(1, len(verts)):
        f = t.f(j + k + 1)
        base = verts[k - 1].start
        maps.append(tuple(f[v] - base for v in verts[k]))
    return LevelTree(arities, tuple(maps))


def graft(subtrees: Sequence[LevelTree]) -> LevelTree:
    """Rebuild ``[t_0, ..., t_r]`` from its level-1 fibres (each of level n - 1)."""
    if not subtrees:
        raise StructureError("need at least one fibre")
    m = subtrees[0].n
    if any(s.n != m for s in subtrees):
        raise StructureError("fibres must have equal level count")
    arities = [len(subtrees) - 1]
    maps = []
    for level in range(1, m + 1):
        f: list[int] = []
        offset = 0
        for idx, s in enumerate(subtrees):
            if level == 1:
                f.extend([idx] * (s.r(1) + 1))
            else:
                f.extend(offset + v for v in s.f(level))
                offset += s.r(level - 1) + 1
        arities.append(len(f) - 1)
        maps.append(tuple(f))
    return LevelTree(tuple(arities), tuple(maps))


def enumerate_trees(n: int, max_degree: int, *, max_top: int | None = None) -> list[LevelTree]:
    """All n-level trees of degree at most ``max_degree``, each once.

    Sorted by arity tuple ``(r_1, ..., r_n)`` and then by maps.  ``max_top``
    optionally caps every arity (all arities are bounded by r_n).
    """
    out: list[LevelTree] = []
    cap = max_degree if max_top is None else max_top

    def extend(arities: tuple[int, ...], maps: tuple[Surjection, ...], budget: int) -> None:
        if len(arities) == n:
            out.append(LevelTree(arities, maps))
            return
        prev = arities[-1]
        remaining_levels = n - len(arities)
        for r in range(prev, cap + 1):
            # each later level costs at least r + 1
            if (r + 1) * remaining_levels > budget:
                break
            for f in enumerate_ordered_surjections(r, prev):
                extend(arities + (r,), maps + (f,), budget - r - 1)

    for r1 in range(0, cap + 1):
        if (r1 + 1) * n > max_degree:
            break
        extend((r1,), (), max_degree - r1 - 1)
    out.sort(key=lambda t: (t.arities, t.maps))
    return out


def trees_below(t0: LevelTree) -> list[LevelTree]:
    """Trees t with r_i(t) <= r_i(t0) for all levels: the support of Hom(t0, -)."""
    out: list[LevelTree] = []
    n = t0.n

    def extend(arities: tuple[int, ...], maps: tuple[Surjection, ...]) -> None:
        if len(arities) == n:
            out.append(LevelTree(arities, maps))
            return
        prev = arities[-1]
        for r in range(prev, t0.arities[len(arities)] + 1):
            for f in enumerate_ordered_surjections(r, prev):
                extend(arities + (r,), maps + (f,))

    for r1 in range(t0.arities[0] + 1):
        extend((r1,), ())
    out.sort(key=lambda t: (t.arities, t.maps))
    return out


# ---------------------------------------------------------------------------
# Labelled trees


@dataclass(frozen=True)
class LabeledTree:
    """An (X, n)-level tree: a tree plus a surjection phi from graded X to its leaves."""

    tree: LevelTree
    x_degrees: tuple[int, ...]
    phi: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "x_degrees", tuple(self.x_degrees))
        object.__setattr__(self, "phi", tuple(self.phi))
        if len(self.phi) != len(self.x_degrees):
            raise StructureError("phi must be defined on every element of X")
        if any(d < 0 for d in self.x_degrees):
            raise StructureError("degrees must be non-negative")
        if not is_surjection(self.phi, self.tree.arities[-1]):
            raise StructureError("phi must be surjective onto the leaves")

    @property
    def n(self) -> int:
        return self.tree.n

    @property
    def degree(self) -> int:
        return self.tree.degree + sum(self.x_degrees)

    @cached_property
    def leaf_degrees(self) -> tuple[int, ...]:
        out = [0] * self.tree.leaves
        for x, leaf in enumerate(self.phi):
            out[leaf] += self.x_degrees[x]
        return tuple(out)


def standard_labeling(t: LevelTree, x_degrees: Sequence[int]) -> LabeledTree:
    """Label the leaves of ``t`` by X = {x_0 < ... < x_{r_n}} with x_i -> i."""
    if len(x_degrees) != t.leaves:
        raise StructureError("standard labelling needs |X| = r_n + 1")
    return LabeledTree(t, tuple(x_degrees), tuple(range(t.leaves)))


def labeled_fiber(lt: LabeledTree, j: int, i: int) -> LabeledTree | tuple[int, ...]:
    """The labelled fibre t_{j,i}; for j = n this is the graded set X_{n,i}."""
    t = lt.tree
    if j == t.n:
        if not 0 <= i <= t.r(j):
            raise StructureError(f"leaf {i} out of range")
        return tuple(lt.x_degrees[x] for x, leaf in enumerate(lt.phi) if leaf == i)
    sub = fiber_subtree(t, j, i)
    leaves = t.leaf_range(j, i)
    xs = [x for x, leaf in enumerate(lt.phi) if leaf in leaves]
    return LabeledTree(sub, tuple(lt.x_degrees[x] for x in xs),
                       tuple(lt.phi[x] - leaves.start for x in xs))


# ---------------------------------------------------------------------------
# Morphisms


@dataclass(frozen=True)
class TreeMorphism:
    """A morphism of Epi_n given level-wise by surjections sigma_1, ..., sigma_n."""

    source: LevelTree
    target: LevelTree
    sigmas: tuple[Surjection, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "sigmas", tuple(tuple(s) for s in self.sigmas))

    @property
    def n(self) -> int:
        return self.source.n

    def check(self) -> None:
        """Raise StructureError unless this is a valid morphism of Epi_n."""
        s, t = self.source, self.target
        if s.n != t.n or len(self.sigmas) != s.n:
            raise StructureError("level count mismatch")
        for level, sig in enumerate(self.sigmas, start=1):
            if len(sig) != s.r(level) + 1 or not is_surjection(sig, t.r(level)):
                raise StructureError(f"sigma_{level} is not a surjection")
        if not is_order_preserving_surjection(self.sigmas[0]):
            raise StructureError("sigma_1 must be order preserving")
        for level in range(2, s.n + 1):
            sig, prev = self.sigmas[level - 1], self.sigmas[level - 2]
            f, g = s.f(level), t.f(level)
            for a in range(len(sig)):
                if g[sig[a]] != prev[f[a]]:
                    raise StructureError(f"square at level {level} does not commute")
            for u in range(s.r(level - 1) + 1):
                vals = [sig[a] for a in s.children(level - 1, u)]
                if any(x > y for x, y in zip(vals, vals[1:])):
                    raise StructureError(f"sigma_{level} is not order preserving on a fibre")

    @property
    def is_valid(self) -> bool:
        try:
            self.check()
        except StructureError:
            return False
        return True


def identity_morphism(t: LevelTree) -> TreeMorphism:
    return TreeMorphism(t, t, tuple(identity(r) for r in t.arities))


def compose(g: TreeMorphism, f: TreeMorphism) -> TreeMorphism:
    """``g o f``, level by level."""
    if f.target != g.source:
        raise StructureError("cannot compose: target of f is not the source of g")
    return TreeMorphism(f.source, g.target,
                        tuple(compose_maps(b, a) for a, b in zip(f.sigmas, g.sigmas)))


def _monotone_maps(size: int, lo: int, hi: int) -> Iterator[tuple[int, ...]]:
    return itertools.combinations_with_replacement(range(lo, hi), size)


@lru_cache(maxsize=200_000)
def hom_set(s: LevelTree, t: LevelTree) -> tuple[TreeMorphism, ...]:
    """All morphisms ``s -> t`` in Epi_n, in a fixed deterministic order.

    sigma_1 runs over Delta^epi; each higher sigma_i is assembled target-fibre
    by target-fibre from weakly monotone maps of the source fibres and kept
    when it covers the target fibre.
    """
    if s.n != t.n:
        raise StructureError("trees have different level counts")
    if any(b > a for a, b in zip(s.arities, t.arities)):
        return ()
    results: list[tuple[Surjection, ...]] = []

    def level_choices(level: int, prev: Surjection) -> list[Surjection]:
        # options for sigma_level given sigma_{level-1}
        groups: dict[int, list[int]] = {}
        for u in range(s.r(level - 1) + 1):
            groups.setdefault(prev[u], []).append(u)
        blocks = []
        for w in range(t.r(level - 1) + 1):
            tgt = t.children(level - 1, w)
            srcs = groups.get(w, [])
            options = []
            for combo in itertools.product(*(
                    _monotone_maps(len(s.children(level - 1, u)), tgt.start, tgt.stop) for u in srcs)):
                covered = set()
                for part in combo:
                    covered.update(part)
                if len(covered) == len(tgt):
                    options.append(tuple(zip(srcs, combo)))
            if not options:
                return []
            blocks.append(options)
        out = []
        size = s.r(level) + 1
        for choice in itertools.product(*blocks):
            sig = [0] * size
            for assignment in choice:
                for u, vals in assignment:
                    for a, v in zip(s.children(level - 1, u), vals):
                        sig[a] = v
            out.append(tuple(sig))
        return out

    def extend(prefix: tuple[Surjection, ...]) -> None:
        level = len(prefix) + 1
        if level > s.n:
            results.append(prefix)
            return
        for sig in level_choices(level, prefix[-1]):
            extend(prefix + (sig,))

    for sig1 in enumerate_ordered_surjections(s.r(1), t.r(1)):
        extend((sig1,))
    return tuple(TreeMorphism(s, t, sig) for sig in results)


# ---------------------------------------------------------------------------
# Faces


def face_admissible(t: LevelTree, j: int, i: int) -> bool:
    """Whether d_i at level j extends to a morphism out of ``t``."""
    if not 1 <= j <= t.n or not 0 <= i < t.r(j):
        return False
    if j == 1:
        return True
    f = t.f(j)
    return f[i] == f[i + 1]


def admissible_faces(t: LevelTree, j: int) -> list[int]:
    return [i for i in range(t.r(j)) if face_admissible(t, j, i)]


def merged_map(f: Surjection, i: int) -> Surjection:
    """f|_{i=i+1}: the factorisation of f through d_i (requires f(i) = f(i+1))."""
    return f[: i + 1] + f[i + 2:]


def top_face(t: LevelTree, i: int) -> TreeMorphism:
    """The morphism (d_i, id, ..., id) at the leaf level."""
    n = t.n
    if not face_admissible(t, n, i):
        raise StructureError(f"face ({n},{i}) is not admissible")
    d = face(t.r(n), i)
    arities = t.arities[:-1] + (t.r(n) - 1,)
    maps = t.maps[:-1] + ((merged_map(t.f(n), i),) if n >= 2 else ())
    target = LevelTree(arities, maps)
    sigmas = tuple(identity(r) for r in t.arities[:-1]) + (d,)
    return TreeMorphism(t, target, sigmas)


def extend_face(t: LevelTree, j: int, i: int, tau: Sequence[int]) -> tuple[TreeMorphism, LevelTree]:
    """Extend d_i at level j < n along the shuffle ``tau`` of the fibres over i, i+1.

    ``tau`` is in image notation on positions ``0..p+q-1`` of the concatenated
    fibres.  Higher levels are forced: each g_k is the monotone map with the
    permuted fibre sizes and tau_k carries each fibre, in order, onto its image.
    """
    n = t.n
    if j >= n:
        raise StructureError("extend_face needs j < n")
    if not face_admissible(t, j, i):
        raise StructureError(f"face ({j},{i}) is not admissible")
    lo = t.children(j, i).start
    hi = t.children(j, i + 1).stop
    if sorted(tau) != list(range(hi - lo)):
        raise StructureError("tau must permute the merged fibre")
    p = len(t.children(j, i))
    if any(x > y for x, y in zip(tau[:p], tau[1:p])) or any(
            x > y for x, y in zip(tau[p:], tau[p + 1:])):
        raise StructureError("tau must be a shuffle")

    arities = list(t.arities)
    arities[j - 1] -= 1
    maps = list(t.maps)
    sigmas = [identity(r) for r in t.arities]
    sigmas[j - 1] = face(t.r(j), i)
    if j >= 2:
        maps[j - 2] = merged_map(t.f(j), i)
    # level j + 1
    perm = list(range(t.r(j + 1) + 1))
    for k, v in enumerate(tau):
        perm[lo + k] = lo + v
    sigmas[j] = tuple(perm)
    maps[j - 1] = compose_maps(sigmas[j - 1], t.f(j + 1))
    # forced levels above
    for level in range(j + 2, n + 1):
        f = t.f(level)
        prev = sigmas[level - 2]
        inv = [0] * len(prev)
        for a, b in enumerate(prev):
            inv[b] = a
        sizes = [len(t.children(level - 1, inv[m])) for m in range(len(prev))]
        g = from_fibre_sizes(sizes)
        starts = [0] * len(sizes)
        for m in range(1, len(sizes)):
            starts[m] = starts[m - 1] + sizes[m - 1]
        sig = [0] * len(f)
        for u in range(len(prev)):
            base = starts[prev[u]]
            for k, a in enumerate(t.children(level - 1, u)):
                sig[a] = base + k
        sigmas[level - 1] = tuple(sig)
        maps[level - 2] = g
    target = LevelTree(tuple(arities), tuple(maps))
    return TreeMorphism(t, target, tuple(sigmas)), target


# ---------------------------------------------------------------------------
# Text format


def serialize_tree(t: LevelTree) -> str:
    """``n; r_1,...,r_n; f_2=[...]; ...; f_n=[...]``."""
    parts = [str(t.n), ",".join(map(str, t.arities))]
    for level in range(2, t.n + 1):
        parts.append(f"f_{level}=[{','.join(map(str, t.f(level)))}]")
    return "; ".join(parts)


def parse_tree(text: str) -> LevelTree:
    fields = [p.strip() for p in text.strip().split(";") if p.strip()]
    try:
        n = int(fields[0])
        arities = tuple(int(x) for x in fields[1].split(","))
        maps = []
        for level, chunk in enumerate(fields[2:], start=2):
            name, _, body = chunk.partition("=")
            if name.strip() != f"f_{level}":
                raise StructureError(f"expected f_{level}, got {name.strip()!r}")
            body = body.strip()
            if not (body.startswith("[") and body.endswith("]")):
                raise StructureError(f"malformed map {chunk!r}")
            inner = body[1:-1].strip()
            maps.append(tuple(int(x) for x in inner.split(",")) if inner else ())
    except (IndexError, ValueError) as exc:
        raise StructureError(f"cannot parse tree {text!r}") from exc
    if len(arities) != n:
        raise StructureError("arity count does not match n")
    return LevelTree(arities, tuple(maps))
