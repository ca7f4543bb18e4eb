"""The iterated bar construction B^n(A) of a commutative algebra.

This is an independent route to E_n-homology: basis elements are nested
bracket words rather than trees, the differential is the sum of the
simplicial and residual boundaries, and the product on B(A) is the shuffle
product.  Everything is graded by weight so each piece is finite.
"""

from __future__ import annotations

import itertools
from abc import ABC, abstractmethod
from functools import lru_cache
from typing import Hashable, Sequence

from .functors import CommutativeAlgebraPresentation, Scalar
from .linhom import QQ, ChainComplex, HomologyResult, Ring, SparseMatrix, homology


class DGError(ValueError):
    """Raised when a DG algebra fails its axioms."""


def _acc(target: dict, key: Hashable, value: Scalar) -> None:
    v = target.get(key, 0) + value
    if v:
        target[key] = v
    else:
        target.pop(key, None)


class DGCommAlgebra(ABC):
    """A weight-graded, non-unital differential graded commutative algebra."""

    @abstractmethod
    def basis(self, weight: int, max_degree: int) -> Sequence[Hashable]:
        """Basis elements of the given weight and degree at most ``max_degree``."""

    @abstractmethod
    def degree(self, e: Hashable) -> int: ...

    @abstractmethod
    def weight(self, e: Hashable) -> int: ...

    @abstractmethod
    def d(self, e: Hashable) -> dict[Hashable, Scalar]: ...

    @abstractmethod
    def mul(self, e: Hashable, f: Hashable) -> dict[Hashable, Scalar]: ...

    def min_weight(self) -> int:
        return 1

    def mul_vec(self, a: dict, b: dict) -> dict:
        out: dict = {}
        for e, ce in a.items():
            for f, cf in b.items():
                for g, c in self.mul(e, f).items():
                    _acc(out, g, ce * cf * c)
        return out

    def d_vec(self, a: dict) -> dict:
        out: dict = {}
        for e, ce in a.items():
            for g, c in self.d(e).items():
                _acc(out, g, ce * c)
        return out

    def check(self, max_weight: int, max_degree: int) -> None:
        """Verify d^2 = 0, Leibniz and graded commutativity on the given range."""
        elems = [e for w in range(1, max_weight + 1) for e in self.basis(w, max_degree)]
        for e in elems:
            if self.d_vec(self.d(e)):
                raise DGError(f"d^2 != 0 on {e!r}")
        for e, f in itertools.product(elems, repeat=2):
            if self.weight(e) + self.weight(f) > max_weight:
                continue
            de, df = self.degree(e), self.degree(f)
            ef = self.mul(e, f)
            fe = self.mul(f, e)
            sign = -1 if (de * df) % 2 else 1
            if ef != {g: sign * c for g, c in fe.items()}:
                raise DGError(f"not graded commutative on {e!r}, {f!r}")
            lhs = self.d_vec(ef)
            rhs = self.mul_vec(self.d(e), {f: 1})
            s = -1 if de % 2 else 1
            for g, c in self.mul_vec({e: 1}, self.d(f)).items():
                _acc(rhs, g, s * c)
            if lhs != rhs:
                raise DGError(f"Leibniz rule fails on {e!r}, {f!r}")


class AlgebraAsDG(DGCommAlgebra):
    """A weight-graded commutative algebra in degree 0 with zero differential."""

    def __init__(self, algebra: CommutativeAlgebraPresentation):
        if not algebra.graded:
            raise DGError("the iterated bar construction needs a weight grading")
        self.algebra = algebra

    def basis(self, weight: int, max_degree: int) -> Sequence[int]:
        if max_degree < 0:
            return ()
        return tuple(u for u in range(self.algebra.dim) if self.algebra.weights[u] == weight)

    def degree(self, e: int) -> int:
        return 0

    def weight(self, e: int) -> int:
        return self.algebra.weights[e]

    def d(self, e: int) -> dict:
        return {}

    def mul(self, e: int, f: int) -> dict:
        return dict(self.algebra.multiply(e, f))


class BarConstruction(DGCommAlgebra):
    """B(A): words [a_1|...|a_k], k >= 1, of degree k + sum d(a_i)."""

    def __init__(self, inner: DGCommAlgebra):
        self.inner = inner
        self._basis = lru_cache(maxsize=None)(self._basis_uncached)
        self._d = lru_cache(maxsize=None)(self._d_uncached)
        self._mul = lru_cache(maxsize=None)(self._mul_uncached)

    def degree(self, word: tuple) -> int:
        return len(word) + sum(self.inner.degree(a) for a in word)

    def weight(self, word: tuple) -> int:
        return sum(self.inner.weight(a) for a in word)

    def basis(self, weight: int, max_degree: int) -> Sequence[tuple]:
        return self._basis(weight, max_degree)

    def _basis_uncached(self, weight: int, max_degree: int) -> tuple:
        # each letter costs at least one degree and one weight
        if weight <= 0 or max_degree < 1:
            return ()
        out = []
        for w1 in range(1, weight + 1):
            for a in self.inner.basis(w1, max_degree - 1):
                cost = 1 + self.inner.degree(a)
                if cost > max_degree:
                    continue
                if w1 == weight:
                    out.append((a,))
                for rest in self._basis(weight - w1, max_degree - cost):
                    out.append((a,) + rest)
        return tuple(out)

    def d(self, word: tuple) -> dict:
        return self._d(word)

    def _d_uncached(self, word: tuple) -> dict:
        out: dict = {}
        degs = [self.inner.degree(a) for a in word]
        # residual boundary
        for i, a in enumerate(word, start=1):
            s = i + sum(degs[: i - 1])
            sign = -1 if s % 2 else 1
            for b, c in self.inner.d(a).items():
                _acc(out, word[: i - 1] + (b,) + word[i:], sign * c)
        # simplicial boundary
        for i in range(1, len(word)):
            s = i + sum(degs[:i])
            sign = -1 if s % 2 else 1
            for b, c in self.inner.mul(word[i - 1], word[i]).items():
                _acc(out, word[: i - 1] + (b,) + word[i + 1:], sign * c)
        return out

    def mul(self, u: tuple, v: tuple) -> dict:
        return self._mul(u, v)

    def _mul_uncached(self, u: tuple, v: tuple) -> dict:
        k, l = len(u), len(v)
        du = [self.inner.degree(a) + 1 for a in u]
        dv = [self.inner.degree(b) + 1 for b in v]
        out: dict = {}
        for left in itertools.combinations(range(k + l), k):
            lset = set(left)
            word = [None] * (k + l)
            right = [p for p in range(k + l) if p not in lset]
            for a, p in enumerate(left):
                word[p] = u[a]
            for b, p in enumerate(right):
                word[p] = v[b]
            exponent = 0
            for a, pa in enumerate(left):
                for b, pb in enumerate(right):
                    if pa > pb:
                        exponent += du[a] * dv[b]
            _acc(out, tuple(word), -1 if exponent % 2 else 1)
        return out


def iterated_bar(algebra: CommutativeAlgebraPresentation, n: int) -> DGCommAlgebra:
    """B^n(A) for A in degree 0 with zero differential."""
    A: DGCommAlgebra = AlgebraAsDG(algebra)
    for _ in range(n):
        A = BarConstruction(A)
    return A


def bar(A: DGCommAlgebra) -> BarConstruction:
    return BarConstruction(A)


def bar_chain_complex(B: DGCommAlgebra, weight: int, max_degree: int, shift: int = 0,
                      ring: Ring = QQ) -> ChainComplex:
    """The weight-``weight`` piece of (B, d) in degrees up to ``max_degree``, shifted down."""
    elems = list(B.basis(weight, max_degree))
    by_deg: dict[int, list] = {}
    for e in elems:
        by_deg.setdefault(B.degree(e), []).append(e)
    dims = {p - shift: len(v) for p, v in sorted(by_deg.items())}
    boundary = {}
    for p, basis in sorted(by_deg.items()):
        if p - 1 not in by_deg:
            continue
        index = {e: k for k, e in enumerate(by_deg[p - 1])}
        cols = []
        for e in basis:
            col: dict = {}
            for f, c in B.d(e).items():
                col[index[f]] = col.get(index[f], 0) + c
            cols.append({r: v for r, v in col.items() if v})
        if any(cols):
            boundary[p - shift] = SparseMatrix(len(by_deg[p - 1]), len(basis), cols)
    return ChainComplex(dims, boundary, ring, max_degree - shift - 1)


def iterated_bar_homology(algebra: CommutativeAlgebraPresentation, n: int, weight: int,
                          max_degree: int, ring: Ring = QQ) -> HomologyResult:
    """H_*(B^n(A)) in one weight, reindexed by -n; exact for degrees < max_degree - n."""
    B = iterated_bar(algebra, n)
    cc = bar_chain_complex(B, weight, max_degree + n, shift=n, ring=ring)
    return homology(cc)


def dimension_census(algebra: CommutativeAlgebraPresentation, n: int, weight: int,
                     max_degree: int) -> dict[int, int]:
    """Dimensions of the weight piece of B^n(A) by (unshifted) degree."""
    B = iterated_bar(algebra, n)
    out: dict[int, int] = {}
    for e in B.basis(weight, max_degree):
        out[B.degree(e)] = out.get(B.degree(e), 0) + 1
    return dict(sorted(out.items()))
