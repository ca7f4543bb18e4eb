"""Functors on Epi_n and Epi_n^X with values in free modules.

A module is described by an ordered basis at every object and the action of
every morphism on basis tokens.  Coefficients are Python ints or Fractions.

Shipped modules: the algebra functor L^n(A) of a non-unital commutative
algebra, the representables k[Epi_n(t, -)] and their labelled versions, and
the skyscraper b^epi_n.
"""

from __future__ import annotations

import itertools
import json
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from pathlib import Path
from typing import Hashable, Iterable, Mapping, Sequence

from .epicat import (
    LabeledTree,
    LevelTree,
    StructureError,
    TreeMorphism,
    compose,
    compose_maps,
    enumerate_trees,
    hom_set,
    identity_morphism,
    trees_below,
    trivial_tree,
)

Scalar = int | Fraction
Vector = dict[Hashable, Scalar]


def _add_into(target: dict, key: Hashable, value: Scalar) -> None:
    total = target.get(key, 0) + value
    if total:
        target[key] = total
    else:
        target.pop(key, None)


# ---------------------------------------------------------------------------
# Algebras


class AlgebraError(ValueError):
    """Raised when an algebra presentation fails validation."""


@dataclass(frozen=True)
class CommutativeAlgebraPresentation:
    """A finite-dimensional non-unital commutative algebra given by structure constants.

    ``products[(u, v)]`` maps basis index ``w`` to the coefficient of ``e_w``
    in ``e_u e_v``; missing pairs multiply to zero.  ``weights`` is an
    optional positive grading.
    """

    dim: int
    products: Mapping[tuple[int, int], Mapping[int, Scalar]] = field(default_factory=dict)
    weights: tuple[int, ...] | None = None
    name: str = "algebra"
    # weights above this bound are truncated away (used to model k[x_1..x_v])
    exact_below: int | None = None

    def __post_init__(self) -> None:
        clean: dict[tuple[int, int], dict[int, Scalar]] = {}
        for (u, v), row in self.products.items():
            entries = {int(w): c for w, c in row.items() if c}
            if entries:
                clean[(int(u), int(v))] = entries
        object.__setattr__(self, "products", clean)
        if self.weights is not None:
            object.__setattr__(self, "weights", tuple(self.weights))

    def multiply(self, u: int, v: int) -> dict[int, Scalar]:
        return self.products.get((u, v), {})

    def multiply_vectors(self, a: Mapping[int, Scalar], b: Mapping[int, Scalar]) -> dict[int, Scalar]:
        out: dict[int, Scalar] = {}
        for u, cu in a.items():
            for v, cv in b.items():
                for w, c in self.multiply(u, v).items():
                    _add_into(out, w, cu * cv * c)
        return out

    def product_of(self, factors: Sequence[int]) -> dict[int, Scalar]:
        """Expand ``e_{f_0} e_{f_1} ... `` left to right."""
        acc: dict[int, Scalar] = {factors[0]: 1}
        for f in factors[1:]:
            acc = self.multiply_vectors(acc, {f: 1})
            if not acc:
                break
        return acc

    def weight(self, u: int) -> int:
        return 1 if self.weights is None else self.weights[u]

    @property
    def graded(self) -> bool:
        return self.weights is not None

    def validate(self) -> None:
        """Check commutativity, associativity and weight additivity."""
        if self.dim < 0:
            raise AlgebraError("dimension must be non-negative")
        if self.weights is not None:
            if len(self.weights) != self.dim or any(w < 1 for w in self.weights):
                raise AlgebraError("weights must be positive, one per basis element")
        for (u, v), row in self.products.items():
            if not (0 <= u < self.dim and 0 <= v < self.dim) or any(not 0 <= w < self.dim for w in row):
                raise AlgebraError(f"product index out of range at ({u},{v})")
            if dict(self.multiply(v, u)) != dict(row):
                raise AlgebraError(f"not commutative at ({u},{v})")
            if self.weights is not None:
                for w in row:
                    if self.weights[w] != self.weights[u] + self.weights[v]:
                        raise AlgebraError(f"product ({u},{v}) breaks weight additivity")
        for u, v, z in itertools.product(range(self.dim), repeat=3):
            left = self.multiply_vectors(self.multiply(u, v), {z: 1})
            right = self.multiply_vectors({u: 1}, self.multiply(v, z))
            if left != right:
                raise AlgebraError(f"not associative at ({u},{v},{z})")

    def decomposables_rank(self) -> int:
        """dim of A.A, computed exactly."""
        from .linhom import SparseMatrix, rank

        vectors = [self.multiply(u, v) for u in range(self.dim) for v in range(u, self.dim)]
        vectors = [vec for vec in vectors if vec]
        if not vectors:
            return 0
        return rank(SparseMatrix.from_columns(self.dim, vectors))

    def indecomposables_dim(self) -> int:
        """dim of A / A.A."""
        return self.dim - self.decomposables_rank()

    # -- serialization ---------------------------------------------------

    def to_json(self) -> dict:
        products = []
        for (u, v), row in sorted(self.products.items()):
            products.append([u, v, [[w, _scalar_to_json(c)] for w, c in sorted(row.items())]])
        out: dict = {"dim": self.dim, "products": products}
        if self.weights is not None:
            out["weights"] = list(self.weights)
        return out

    @classmethod
    def from_json(cls, data: Mapping, name: str = "algebra") -> "CommutativeAlgebraPresentation":
        try:
            dim = int(data["dim"])
            weights = data.get("weights")
            products: dict[tuple[int, int], dict[int, Scalar]] = {}
            for u, v, terms in data.get("products", []):
                row = products.setdefault((int(u), int(v)), {})
                for w, c in terms:
                    row[int(w)] = row.get(int(w), 0) + _scalar_from_json(c)
        except (KeyError, TypeError, ValueError) as exc:
            raise AlgebraError(f"malformed algebra description: {exc}") from exc
        alg = cls(dim, products, tuple(weights) if weights is not None else None, name)
        alg.validate()
        return alg


def _scalar_to_json(c: Scalar) -> int | str:
    if isinstance(c, Fraction):
        return int(c) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"
    return int(c)


def _scalar_from_json(c) -> Scalar:
    if isinstance(c, int):
        return c
    value = Fraction(str(c))
    return int(value) if value.denominator == 1 else value


def load_algebra(path: str | Path) -> CommutativeAlgebraPresentation:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    return CommutativeAlgebraPresentation.from_json(data, name=Path(path).stem)


def trunc_poly(m: int) -> CommutativeAlgebraPresentation:
    """Augmentation ideal of k[x]/(x^m): basis x, ..., x^{m-1}."""
    if m < 1:
        raise AlgebraError("trunc-poly needs m >= 1")
    products = {}
    for a in range(1, m):
        for b in range(1, m):
            if a + b < m:
                products[(a - 1, b - 1)] = {a + b - 1: 1}
    return CommutativeAlgebraPresentation(m - 1, products, tuple(range(1, m)), f"trunc-poly:{m}")


def square_zero(d: int) -> CommutativeAlgebraPresentation:
    """A d-dimensional algebra with all products zero, in weight 1."""
    if d < 0:
        raise AlgebraError("square-zero needs d >= 0")
    return CommutativeAlgebraPresentation(d, {}, (1,) * d, f"square-zero:{d}")


def _monomials(nvars: int, max_weight: int) -> list[tuple[int, ...]]:
    out = []
    for w in range(1, max_weight + 1):
        for combo in itertools.combinations_with_replacement(range(nvars), w):
            out.append(tuple(combo.count(k) for k in range(nvars)))
    return out


def monomial_algebra(nvars: int, killed: Iterable[Sequence[int]], max_weight: int,
                     name: str | None = None) -> CommutativeAlgebraPresentation:
    """Augmentation ideal of k[x_1..x_v]/(monomial ideal), cut off above ``max_weight``.

    Monomials divisible by a ``killed`` exponent vector are zero.  The result
    agrees with the untruncated algebra in every weight up to ``max_weight``.
    """
    killed = [tuple(k) for k in killed]

    def alive(mono: tuple[int, ...]) -> bool:
        return not any(all(a >= b for a, b in zip(mono, k)) for k in killed)

    basis = [m for m in _monomials(nvars, max_weight) if alive(m)]
    index = {m: i for i, m in enumerate(basis)}
    products = {}
    for (i, a), (j, b) in itertools.product(enumerate(basis), repeat=2):
        c = tuple(x + y for x, y in zip(a, b))
        if c in index:
            products[(i, j)] = {index[c]: 1}
    weights = tuple(sum(m) for m in basis)
    label = name or f"monomial:{nvars}"
    return CommutativeAlgebraPresentation(len(basis), products, weights, label, exact_below=max_weight)


def poly(nvars: int, max_weight: int) -> CommutativeAlgebraPresentation:
    """Augmentation ideal of k[x_1..x_v], exact in weights up to ``max_weight``."""
    return monomial_algebra(nvars, [], max_weight, name=f"poly:{nvars}")


# ---------------------------------------------------------------------------
# Modules


class EpiModule(ABC):
    """A functor from Epi_n (or Epi_n^X) to free modules of finite rank."""

    n: int
    labeled: bool = False

    @abstractmethod
    def basis(self, obj: LevelTree | LabeledTree) -> Sequence[Hashable]:
        """Ordered basis tokens of the value at ``obj``."""

    @abstractmethod
    def apply(self, morphism: TreeMorphism, target: LevelTree | LabeledTree,
              token: Hashable) -> Mapping[Hashable, Scalar]:
        """Image of ``token`` under the morphism, as a combination of target tokens."""

    @abstractmethod
    def support(self, degree_bound: int | None = None) -> list[LevelTree | LabeledTree]:
        """Objects with non-zero value (of tree degree at most ``degree_bound``)."""

    @property
    def finitely_supported(self) -> bool:
        return False

    def matrix(self, morphism: TreeMorphism, source, target) -> dict[tuple[int, int], Scalar]:
        """Action as a sparse (row, col) -> value dictionary."""
        index = {tok: k for k, tok in enumerate(self.basis(target))}
        out = {}
        for col, tok in enumerate(self.basis(source)):
            for img, c in self.apply(morphism, target, tok).items():
                out[(index[img], col)] = c
        return out


class AlgebraModule(EpiModule):
    """L^n(A): the value at a tree is A^{(r_n + 1)}, with fibre-wise products.

    ``weight`` restricts to the tensors of exactly that total weight, which
    makes every graded piece finite.
    """

    def __init__(self, algebra: CommutativeAlgebraPresentation, n: int, weight: int | None = None):
        if n < 1:
            raise StructureError("n must be at least 1")
        if weight is not None and not algebra.graded:
            raise AlgebraError("weight truncation needs a graded algebra")
        if weight is not None and algebra.exact_below is not None and weight > algebra.exact_below:
            raise AlgebraError(f"weight {weight} exceeds the exact range of {algebra.name}")
        self.algebra = algebra
        self.n = n
        self.weight = weight
        self._basis_cache: dict[int, tuple[tuple[int, ...], ...]] = {}

    @property
    def finitely_supported(self) -> bool:
        return self.weight is not None

    def _tensors(self, length: int) -> tuple[tuple[int, ...], ...]:
        if length not in self._basis_cache:
            alg = self.algebra
            if self.weight is None:
                toks = tuple(itertools.product(range(alg.dim), repeat=length))
            else:
                toks = tuple(_weighted_words(tuple(alg.weights), length, self.weight))
            self._basis_cache[length] = toks
        return self._basis_cache[length]

    def basis(self, obj: LevelTree) -> Sequence[tuple[int, ...]]:
        return self._tensors(obj.leaves)

    def apply(self, morphism: TreeMorphism, target: LevelTree, token: tuple[int, ...]) -> dict:
        sigma = morphism.sigmas[-1]
        fibres: list[list[int]] = [[] for _ in range(target.leaves)]
        for j, a in enumerate(token):
            fibres[sigma[j]].append(a)
        out: dict[tuple[int, ...], Scalar] = {(): 1}
        for fibre in fibres:
            prod = self.algebra.product_of(fibre)
            if not prod:
                return {}
            nxt: dict[tuple[int, ...], Scalar] = {}
            for word, c in out.items():
                for w, cw in prod.items():
                    nxt[word + (w,)] = c * cw
            out = nxt
        return out

    def support(self, degree_bound: int | None = None) -> list[LevelTree]:
        if self.weight is not None:
            # r_i <= r_n <= weight - 1
            bound = self.n * self.weight
            degree_bound = bound if degree_bound is None else min(degree_bound, bound)
            top = self.weight - 1
        else:
            if degree_bound is None:
                raise StructureError("an unweighted algebra module needs a degree bound")
            top = None
        trees = enumerate_trees(self.n, degree_bound, max_top=top)
        return [t for t in trees if self.basis(t)]


def _weighted_words(weights: tuple[int, ...], length: int, total: int):
    if length == 0:
        if total == 0:
            yield ()
        return
    for u, w in enumerate(weights):
        if w <= total - (length - 1):
            for rest in _weighted_words(weights, length - 1, total - w):
                yield (u,) + rest


def algebra_module(algebra: CommutativeAlgebraPresentation, n: int,
                   weight: int | None = None) -> AlgebraModule:
    return AlgebraModule(algebra, n, weight)


class Representable(EpiModule):
    """k[Epi_n(t0, -)]: basis at t is the Hom-set, acting by post-composition."""

    def __init__(self, t0: LevelTree):
        self.t0 = t0
        self.n = t0.n

    @property
    def finitely_supported(self) -> bool:
        return True

    def basis(self, obj: LevelTree) -> Sequence[TreeMorphism]:
        return hom_set(self.t0, obj)

    def apply(self, morphism: TreeMorphism, target: LevelTree, token: TreeMorphism) -> dict:
        return {compose(morphism, token): 1}

    def support(self, degree_bound: int | None = None) -> list[LevelTree]:
        out = [t for t in trees_below(self.t0) if hom_set(self.t0, t)]
        if degree_bound is not None:
            out = [t for t in out if t.degree <= degree_bound]
        return out


class LabeledRepresentable(EpiModule):
    """k[Epi_n^X((t0, phi0), -)]: morphisms of trees compatible with the labellings."""

    labeled = True

    def __init__(self, lt0: LabeledTree):
        self.lt0 = lt0
        self.n = lt0.n

    @property
    def finitely_supported(self) -> bool:
        return True

    def _target_labeling(self, m: TreeMorphism) -> tuple[int, ...]:
        return compose_maps(m.sigmas[-1], self.lt0.phi)

    def basis(self, obj: LabeledTree) -> Sequence[TreeMorphism]:
        return _labeled_hom(self.lt0, obj)

    def apply(self, morphism: TreeMorphism, target: LabeledTree, token: TreeMorphism) -> dict:
        return {compose(morphism, token): 1}

    def support(self, degree_bound: int | None = None) -> list[LabeledTree]:
        seen: dict[LabeledTree, None] = {}
        for t in trees_below(self.lt0.tree):
            for m in hom_set(self.lt0.tree, t):
                seen.setdefault(LabeledTree(t, self.lt0.x_degrees, self._target_labeling(m)))
        out = list(seen)
        if degree_bound is not None:
            out = [lt for lt in out if lt.tree.degree <= degree_bound]
        out.sort(key=lambda lt: (lt.tree.arities, lt.tree.maps, lt.phi))
        return out


@lru_cache(maxsize=100_000)
def _labeled_hom(lt0: LabeledTree, obj: LabeledTree) -> tuple[TreeMorphism, ...]:
    if obj.x_degrees != lt0.x_degrees:
        return ()
    return tuple(m for m in hom_set(lt0.tree, obj.tree)
                 if compose_maps(m.sigmas[-1], lt0.phi) == obj.phi)


class SkyscraperModule(EpiModule):
    """b^epi_n: k at the trivial tree and zero elsewhere.

    Equivalently the cokernel of (d_0)_* between the contravariant
    representables at [1] -> [0] -> ... and the trivial tree.
    """

    def __init__(self, n: int):
        self.n = n
        self._trivial = trivial_tree(n)

    @property
    def finitely_supported(self) -> bool:
        return True

    def basis(self, obj: LevelTree) -> Sequence[Hashable]:
        return ((),) if obj == self._trivial else ()

    def apply(self, morphism: TreeMorphism, target: LevelTree, token: Hashable) -> dict:
        return {(): 1} if target == self._trivial else {}

    def support(self, degree_bound: int | None = None) -> list[LevelTree]:
        return [self._trivial]


def representable(t0: LevelTree) -> Representable:
    return Representable(t0)


def representable_X(lt0: LabeledTree) -> LabeledRepresentable:
    return LabeledRepresentable(lt0)


def b_epi(n: int) -> SkyscraperModule:
    if n < 1:
        raise StructureError("n must be at least 1")
    return SkyscraperModule(n)


def check_functoriality(module: EpiModule, f: TreeMorphism, g: TreeMorphism,
                        source, middle, target) -> bool:
    """F(g o f) == F(g) F(f) on every basis token of ``source``."""
    gf = compose(g, f)
    for tok in module.basis(source):
        direct = dict(module.apply(gf, target, tok))
        staged: dict = {}
        for mid, c in module.apply(f, middle, tok).items():
            for img, d in module.apply(g, target, mid).items():
                _add_into(staged, img, c * d)
        if direct != staged:
            return False
    return True


def check_identity_action(module: EpiModule, obj) -> bool:
    tree = obj.tree if isinstance(obj, LabeledTree) else obj
    ident = identity_morphism(tree)
    return all(dict(module.apply(ident, obj, tok)) == {tok: 1} for tok in module.basis(obj))


# ---------------------------------------------------------------------------
# The n = 1 contracting homotopy


Blocks = tuple[tuple[int, ...], ...]


def epi_generators(m: int, k: int) -> list[Blocks]:
    """Generators of (Delta^epi)^m at [k]: splittings of 0..m into k+1 consecutive blocks."""
    from .epicat import enumerate_ordered_surjections

    out = []
    for sig in enumerate_ordered_surjections(m, k):
        blocks = [[] for _ in range(k + 1)]
        for a, v in enumerate(sig):
            blocks[v].append(a)
        out.append(tuple(tuple(b) for b in blocks))
    return out


def b_epi_boundary(blocks: Blocks, degrees: Sequence[int] | None = None) -> dict[Blocks, int]:
    """b' = sum_i (-1)^i d_i, where d_i merges blocks i and i+1.

    In the graded variant d_i carries (-1)^{d(A_0) + ... + d(A_i)}.
    """
    out: dict[Blocks, int] = {}
    running = 0
    for i in range(len(blocks) - 1):
        if degrees is not None:
            running += sum(degrees[a] for a in blocks[i])
        merged = blocks[:i] + (blocks[i] + blocks[i + 1],) + blocks[i + 2:]
        sign = -1 if (i + running) % 2 else 1
        _add_into(out, merged, sign)
    return out


def homotopy_h(blocks: Blocks, degrees: Sequence[int] | None = None) -> dict[Blocks, int]:
    """Contracting homotopy: zero if A_0 = {0}, else split 0 off as its own block."""
    if blocks[0] == (0,):
        return {}
    sign = -1 if degrees is not None and degrees[0] % 2 else 1
    return {((0,), blocks[0][1:]) + blocks[1:]: sign}


def check_homotopy(m: int, degrees: Sequence[int] | None = None) -> bool:
    """b'h + hb' = id on every generator of (Delta^epi)^m, m >= 1."""
    if m < 1:
        raise StructureError("the trivial representable is not contractible")
    for k in range(m + 1):
        for gen in epi_generators(m, k):
            total: dict[Blocks, int] = {}
            for x, c in homotopy_h(gen, degrees).items():
                for y, d in b_epi_boundary(x, degrees).items():
                    _add_into(total, y, c * d)
            for x, c in b_epi_boundary(gen, degrees).items():
                for y, d in homotopy_h(x, degrees).items():
                    _add_into(total, y, c * d)
            if total != {gen: 1}:
                return False
    return True
