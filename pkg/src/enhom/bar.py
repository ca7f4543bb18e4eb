"""Bar homology of Delta^epi-modules and the Hochschild oracle.

``bar_homology`` works directly with the faces d_i of Delta^epi and the
alternating sum b' = sum (-1)^i d_i, independently of the tree machinery.
``hochschild_oracle`` builds the normalized Hochschild complex of the
unitalization k + A with coefficients in k, so that
H^bar_p(L(A)) = HH_{p+1}(k + A; k).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .epicat import LevelTree, StructureError, top_face
from .functors import AlgebraModule, CommutativeAlgebraPresentation, EpiModule, Scalar, _weighted_words
from .linhom import QQ, ChainComplex, HomologyResult, Ring, SparseMatrix, homology


def bar_complex(F: EpiModule, max_m: int | None = None, ring: Ring = QQ) -> ChainComplex:
    """C^bar_m(F) = F([m]) with b' = sum_i (-1)^i F(d_i), for m <= max_m.

    ``max_m`` may be omitted for finitely supported modules.
    """
    if F.n != 1:
        raise StructureError("bar homology needs a module on Delta^epi")
    top = max((t.r(1) for t in F.support(None)), default=0) if F.finitely_supported else None
    if max_m is None:
        if top is None:
            raise StructureError("need max_m for a module that is not finitely supported")
        max_m = top
    dims: dict[int, int] = {}
    bases = {}
    for m in range(max_m + 1):
        bases[m] = list(F.basis(LevelTree((m,))))
        dims[m] = len(bases[m])
    boundary: dict[int, SparseMatrix] = {}
    for m in range(1, max_m + 1):
        src = LevelTree((m,))
        tgt = LevelTree((m - 1,))
        index = {tok: k for k, tok in enumerate(bases[m - 1])}
        cols: list[dict[int, Scalar]] = []
        faces = [top_face(src, i) for i in range(m)]
        for tok in bases[m]:
            col: dict[int, Scalar] = {}
            for i, d in enumerate(faces):
                sign = -1 if i % 2 else 1
                for img, c in F.apply(d, tgt, tok).items():
                    r = index[img]
                    v = col.get(r, 0) + sign * c
                    if v:
                        col[r] = v
                    else:
                        col.pop(r, None)
            cols.append(col)
        boundary[m] = SparseMatrix(dims[m - 1], dims[m], cols)
    certified = None if top is not None and max_m >= top else max_m - 1
    return ChainComplex(dims, boundary, ring, certified)


def bar_homology(F: EpiModule, max_m: int | None = None, ring: Ring = QQ) -> HomologyResult:
    """H^bar_*(F)."""
    return homology(bar_complex(F, max_m, ring))


@dataclass(frozen=True)
class AugmentedAlgebra:
    """k + A with unit at index 0; basis index u + 1 is the u-th basis element of A."""

    ideal: CommutativeAlgebraPresentation

    @property
    def dim(self) -> int:
        return self.ideal.dim + 1

    def multiply(self, u: int, v: int) -> dict[int, Scalar]:
        if u == 0:
            return {v: 1}
        if v == 0:
            return {u: 1}
        return {w + 1: c for w, c in self.ideal.multiply(u - 1, v - 1).items()}

    def augmentation(self, u: int) -> Scalar:
        return 1 if u == 0 else 0


def hochschild_complex(A: CommutativeAlgebraPresentation, max_m: int, weight: int | None = None,
                       ring: Ring = QQ) -> ChainComplex:
    """Normalized Hochschild complex C_m = k (x) (A/k)^{(x)m} with coefficients in k.

    The outer faces act through the augmentation of k + A, the inner ones by
    multiplication.  With ``weight`` only tensors of that total weight are kept.
    """
    U = AugmentedAlgebra(A)
    reps = list(range(1, U.dim))  # normalized: drop the unit

    def words(m: int) -> list[tuple[int, ...]]:
        if weight is None:
            return list(itertools.product(reps, repeat=m))
        return [tuple(u + 1 for u in w) for w in _weighted_words(tuple(A.weights), m, weight)]

    bases = {m: words(m) for m in range(max_m + 1)}
    dims = {m: len(b) for m, b in bases.items()}
    boundary = {}
    for m in range(1, max_m + 1):
        index = {w: k for k, w in enumerate(bases[m - 1])}
        cols = []
        for word in bases[m]:
            col: dict[int, Scalar] = {}

            def add(target: tuple[int, ...], c: Scalar) -> None:
                # terms with a unit factor vanish in the normalized complex
                if any(u == 0 for u in target) or not c:
                    return
                r = index[target]
                v = col.get(r, 0) + c
                if v:
                    col[r] = v
                else:
                    col.pop(r, None)

            add(word[1:], U.augmentation(word[0]))
            for i in range(1, m):
                sign = -1 if i % 2 else 1
                for w, c in U.multiply(word[i - 1], word[i]).items():
                    add(word[: i - 1] + (w,) + word[i + 1:], sign * c)
            add(word[:-1], (-1) ** m * U.augmentation(word[-1]))
            cols.append(col)
        boundary[m] = SparseMatrix(dims[m - 1], dims[m], cols)
    certified = None if weight is not None and max_m >= weight else max_m - 1
    return ChainComplex(dims, boundary, ring, certified)


def hochschild_oracle(A: CommutativeAlgebraPresentation, max_m: int, weight: int | None = None,
                      ring: Ring = QQ) -> HomologyResult:
    """HH_*(k + A; k), shifted down by one so that it lines up with H^bar_*."""
    h = homology(hochschild_complex(A, max_m, weight, ring))
    betti = {p - 1: b for p, b in h.betti.items() if p >= 1}
    torsion = {p - 1: t for p, t in h.torsion.items() if p >= 1}
    cert = None if h.certified_max is None else h.certified_max - 1
    return HomologyResult(betti, ring, torsion, cert)


def algebra_bar_homology(A: CommutativeAlgebraPresentation, max_m: int | None = None,
                         weight: int | None = None, ring: Ring = QQ) -> HomologyResult:
    """H^bar_*(L(A)), optionally in a single weight."""
    return bar_homology(AlgebraModule(A, 1, weight), max_m, ring)
