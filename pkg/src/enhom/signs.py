"""Sign conventions: shuffle signs, set signs and planar edge labels.

All signs are returned as ``+1`` or ``-1``.  Shuffles are stored in image
notation: ``perm[a]`` is the new position of the element at position ``a``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Sequence

from .epicat import LabeledTree, LevelTree, StructureError


@dataclass(frozen=True)
class Shuffle:
    """A (p, q)-shuffle: increasing on ``0..p-1`` and on ``p..p+q-1``."""

    p: int
    q: int
    perm: tuple[int, ...]

    def __post_init__(self) -> None:
        perm = tuple(self.perm)
        object.__setattr__(self, "perm", perm)
        if len(perm) != self.p + self.q or sorted(perm) != list(range(self.p + self.q)):
            raise StructureError("not a permutation of the right size")
        left, right = perm[: self.p], perm[self.p:]
        if any(a > b for a, b in zip(left, left[1:])) or any(a > b for a, b in zip(right, right[1:])):
            raise StructureError("not a shuffle")

    @property
    def inverse(self) -> tuple[int, ...]:
        inv = [0] * len(self.perm)
        for a, b in enumerate(self.perm):
            inv[b] = a
        return tuple(inv)

    @property
    def is_identity(self) -> bool:
        return self.perm == tuple(range(len(self.perm)))

    def inversions(self) -> list[tuple[int, int]]:
        """Pairs (a, b) with a < p <= b and perm[a] > perm[b]."""
        return [(a, b) for a in range(self.p) for b in range(self.p, self.p + self.q)
                if self.perm[a] > self.perm[b]]


def enumerate_shuffles(p: int, q: int) -> list[Shuffle]:
    """All (p, q)-shuffles, ordered lexicographically by the image of the left block."""
    out = []
    for left in itertools.combinations(range(p + q), p):
        right = [k for k in range(p + q) if k not in left]
        out.append(Shuffle(p, q, tuple(left) + tuple(right)))
    return out


def shuffle_sign(sigma: Shuffle, left_degrees: Sequence[int], right_degrees: Sequence[int]) -> int:
    """Product of (-1)^{(d(a)+1)(d(b)+1)} over the inversions of ``sigma``.

    The degrees are those of the shuffled subtrees; the +1 shift lives here.
    """
    if len(left_degrees) != sigma.p or len(right_degrees) != sigma.q:
        raise StructureError("degree lists do not match the shuffle blocks")
    exponent = 0
    for a, b in sigma.inversions():
        exponent += (left_degrees[a] + 1) * (right_degrees[b - sigma.p] + 1)
    return -1 if exponent % 2 else 1


def eps_sets(a_degrees: Sequence[int], b_degrees: Sequence[int],
             a_positions: Sequence[int], b_positions: Sequence[int]) -> int:
    """epsilon(A; B): product of (-1)^{d(a)d(b)} over a in A, b in B with a after b."""
    if len(a_degrees) != len(a_positions) or len(b_degrees) != len(b_positions):
        raise StructureError("degrees and positions differ in length")
    if set(a_positions) & set(b_positions):
        raise StructureError("A and B overlap")
    exponent = 0
    for da, pa in zip(a_degrees, a_positions):
        if da % 2 == 0:
            continue
        for db, pb in zip(b_degrees, b_positions):
            if pa > pb:
                exponent += db
    return -1 if exponent % 2 else 1


def eps_blocks(left: Sequence[int], right: Sequence[int]) -> int:
    """epsilon(A; B) when every element of A comes after every element of B."""
    return -1 if (sum(left) * sum(right)) % 2 else 1


def koszul(*pairs: tuple[int, int]) -> int:
    """(-1)^{sum d1*d2} for the given degree pairs."""
    return -1 if sum(a * b for a, b in pairs) % 2 else 1


def edge_label(t: LevelTree | LabeledTree, j: int, i: int) -> int:
    """The sign exponent s_{j,i}.

    For j < n this is the label of the right-most top edge of the fibre
    t_{j,i}; for j = n it is the label of leaf i.  With a labelled tree the
    degrees of all X-elements sitting on leaves up to and including that
    edge's leaf are added.
    """
    tree = t.tree if isinstance(t, LabeledTree) else t
    if not 1 <= j <= tree.n or not 0 <= i <= tree.r(j):
        raise StructureError(f"no vertex {i} at level {j}")
    leaf = tree.leaf_range(j, i).stop - 1
    label = tree.edge_labels[-1][leaf]
    if isinstance(t, LabeledTree):
        label += sum(t.leaf_degrees[: leaf + 1])
    return label


def sgn_permutation(perm: Sequence[int], degrees: Sequence[int]) -> int:
    """Koszul sign of moving graded elements by ``perm`` (image notation)."""
    exponent = 0
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                exponent += degrees[a] * degrees[b]
    return -1 if exponent % 2 else 1
