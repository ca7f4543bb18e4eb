"""Tor over graded poset categories [a]^pi and their tensor products.

[a]^pi has objects 0..a and a rank-one Hom(i, j) for i <= j, generated by
xi_{ij} in degree d(pi^{i+1} u ... u pi^j).  Composition is twisted by the
set sign epsilon of the blocks involved.  Tor(R_a; L_0) is computed from the
normalized standard complex, whose chains are strictly increasing object
sequences from the bottom object to the top one.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

from .linhom import QQ, ChainComplex, HomologyResult, Ring, SparseMatrix, homology
from .signs import eps_sets


def _sign(exponent: int) -> int:
    return -1 if exponent % 2 else 1


@dataclass(frozen=True)
class GradedPosetCategory:
    """[a]^pi for a graded ordered set Y partitioned into blocks pi^1..pi^a.

    ``y_degrees[y]`` is the degree of the y-th element of Y and
    ``block_of[y]`` in 1..a names its block.
    """

    a: int
    y_degrees: tuple[int, ...]
    block_of: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "y_degrees", tuple(self.y_degrees))
        object.__setattr__(self, "block_of", tuple(self.block_of))
        if self.a < 1:
            raise ValueError("[a]^pi needs a >= 1")
        if len(self.y_degrees) != len(self.block_of):
            raise ValueError("every element of Y needs a block")
        if any(not 1 <= b <= self.a for b in self.block_of):
            raise ValueError("block labels must lie in 1..a")
        if any(d < 0 for d in self.y_degrees):
            raise ValueError("degrees must be non-negative")

    @classmethod
    def contiguous(cls, block_degrees: Sequence[Sequence[int]]) -> "GradedPosetCategory":
        """Blocks laid out one after another in Y."""
        degs, blocks = [], []
        for k, block in enumerate(block_degrees, start=1):
            degs.extend(block)
            blocks.extend([k] * len(block))
        return cls(len(block_degrees), tuple(degs), tuple(blocks))

    def elements(self, i: int, j: int) -> list[int]:
        """Positions of pi^{i+1} u ... u pi^j."""
        return [y for y, b in enumerate(self.block_of) if i < b <= j]

    def hom_degree(self, i: int, j: int) -> int:
        return sum(self.y_degrees[y] for y in self.elements(i, j))

    def block_degree(self, k: int) -> int:
        return self.hom_degree(k - 1, k)

    def eps(self, i: int, j: int, k: int) -> int:
        """epsilon(pi^{i+1..j}; pi^{j+1..k})."""
        A = self.elements(i, j)
        B = self.elements(j, k)
        return eps_sets([self.y_degrees[y] for y in A], [self.y_degrees[y] for y in B], A, B)

    def compose_sign(self, i: int, j: int, k: int) -> int:
        """xi_{jk} o xi_{ij} = sign * xi_{ik}."""
        if not i <= j <= k <= self.a:
            raise ValueError("composition out of order")
        return self.eps(i, j, k)

    def check_associativity(self) -> bool:
        for i, j, k, l in itertools.combinations_with_replacement(range(self.a + 1), 4):
            left = self.compose_sign(j, k, l) * self.compose_sign(i, j, l)
            right = self.compose_sign(i, j, k) * self.compose_sign(i, k, l)
            if left != right:
                return False
        return True


@dataclass(frozen=True)
class TensorCategory:
    """[a_0]^{pi_0} (x) ... (x) [a_r]^{pi_r} with Koszul-signed composition."""

    factors: tuple[GradedPosetCategory, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise ValueError("need at least one factor")

    @property
    def bottom(self) -> tuple[int, ...]:
        return (0,) * len(self.factors)

    @property
    def top(self) -> tuple[int, ...]:
        return tuple(c.a for c in self.factors)

    def hom_degrees(self, P: Sequence[int], Q: Sequence[int]) -> list[int]:
        return [c.hom_degree(p, q) for c, p, q in zip(self.factors, P, Q)]

    def compose_sign(self, P, Q, R) -> int:
        """(xi_{QR}) o (xi_{PQ}) for tensor generators, including the Koszul sign."""
        beta = self.hom_degrees(Q, R)
        alpha = self.hom_degrees(P, Q)
        exponent = sum(beta[k] * alpha[j] for j in range(len(alpha)) for k in range(j + 1, len(beta)))
        sign = _sign(exponent)
        for c, p, q, r in zip(self.factors, P, Q, R):
            sign *= c.compose_sign(p, q, r)
        return sign

    @cached_property
    def objects(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(c.a + 1) for c in self.factors)))


def strict_chains(C: TensorCategory) -> dict[int, list[tuple[tuple[int, ...], ...]]]:
    """Chains bottom = P_1 < ... < P_{n+1} = top, grouped by the number n of steps."""
    bottom, top = C.bottom, C.top
    out: dict[int, list] = {}

    up: dict = {}
    for P in C.objects:
        up[P] = [Q for Q in C.objects if Q != P and all(q >= p for p, q in zip(P, Q))]

    def extend(chain):
        last = chain[-1]
        if last == top:
            out.setdefault(len(chain) - 1, []).append(tuple(chain))
            return
        for Q in up[last]:
            extend(chain + [Q])

    if bottom == top:
        out[0] = [(bottom,)]
    else:
        extend([bottom])
    for n in out:
        out[n].sort()
    return dict(sorted(out.items()))


def _face(C: TensorCategory, chain, i: int) -> int:
    """Coefficient of d_i on a chain: merge steps i and i+1 (1-based steps)."""
    steps = [C.hom_degrees(chain[k], chain[k + 1]) for k in range(len(chain) - 1)]
    before = sum(sum(s) for s in steps[:i])
    return _sign(before) * C.compose_sign(chain[i - 1], chain[i], chain[i + 1])


def normalized_complex(C: TensorCategory, ring: Ring = QQ) -> ChainComplex:
    """L_0 (x) N_*(C) (x) R_top with d = sum_{i=1}^{n-1} (-1)^i d_i."""
    chains = strict_chains(C)
    top_n = max(chains) if chains else 0
    dims = {n: len(chains.get(n, [])) for n in range(0, top_n + 1)}
    degree_cache: dict = {}
    sign_cache: dict = {}

    def step_degree(P, Q) -> int:
        key = (P, Q)
        if key not in degree_cache:
            degree_cache[key] = sum(C.hom_degrees(P, Q))
        return degree_cache[key]

    def comp(P, Q, R) -> int:
        key = (P, Q, R)
        if key not in sign_cache:
            sign_cache[key] = C.compose_sign(P, Q, R)
        return sign_cache[key]

    boundary = {}
    for n in range(2, top_n + 1):
        index = {ch: k for k, ch in enumerate(chains.get(n - 1, []))}
        cols = []
        for ch in chains.get(n, []):
            col: dict[int, int] = {}
            before = 0
            for i in range(1, n):
                before += step_degree(ch[i - 1], ch[i])
                r = index[ch[:i] + ch[i + 1:]]
                v = _sign(i + before) * comp(ch[i - 1], ch[i], ch[i + 1])
                col[r] = col.get(r, 0) + v
            cols.append({r: v for r, v in col.items() if v})
        boundary[n] = SparseMatrix(dims[n - 1], dims[n], cols)
    return ChainComplex(dims, boundary, ring)


def tor(C: TensorCategory, ring: Ring = QQ) -> HomologyResult:
    """Tor^C_*(R_top; L_0)."""
    return homology(normalized_complex(C, ring))


def tor_ranks(C: TensorCategory, ring: Ring = QQ) -> dict[int, int]:
    return {n: b for n, b in tor(C, ring).betti.items() if b}


def lemma_prediction(C: TensorCategory) -> dict[int, int]:
    """k in degree r_1 + 1 when every a_j = 1, else nothing."""
    if all(c.a == 1 for c in C.factors):
        return {len(C.factors): 1}
    return {}


def homotopy(cat: GradedPosetCategory, chain: Sequence[int]) -> tuple[tuple[int, ...], int] | None:
    """The contracting homotopy on xi_{0 p_2} (x) ... (x) xi_{p_n a}.

    Zero when p_2 = 1; otherwise xi_{01} is split off with sign
    (-1)^{d(pi^1)} epsilon(pi^1; pi^2 u ... u pi^{p_2}).
    """
    p2 = chain[1]
    if p2 == 1:
        return None
    sign = _sign(cat.block_degree(1)) * cat.eps(0, 1, p2)
    return (0, 1) + tuple(chain[1:]), sign


def check_homotopy(cat: GradedPosetCategory) -> bool:
    """(-d) h + h (-d) = id on every generator, for a >= 2.

    With d = sum (-1)^i d_i as above the composite d h + h d is -id, so the
    homotopy contracts the complex with the opposite differential.
    """
    if cat.a < 2:
        raise ValueError("the homotopy is defined for a >= 2")
    C = TensorCategory((cat,))
    chains = strict_chains(C)
    flat = {n: [tuple(P[0] for P in ch) for ch in lst] for n, lst in chains.items()}

    def d(chain: tuple[int, ...]) -> dict[tuple[int, ...], int]:
        full = tuple((p,) for p in chain)
        out: dict[tuple[int, ...], int] = {}
        for i in range(1, len(chain) - 1):
            merged = chain[:i] + chain[i + 1:]
            out[merged] = out.get(merged, 0) - _sign(i) * _face(C, full, i)
        return {k: v for k, v in out.items() if v}

    def h(chain):
        res = homotopy(cat, chain)
        return {} if res is None else {res[0]: res[1]}

    for n, lst in flat.items():
        for ch in lst:
            total: dict[tuple[int, ...], int] = {}
            for x, c in h(ch).items():
                for y, e in d(x).items():
                    total[y] = total.get(y, 0) + c * e
            for x, c in d(ch).items():
                for y, e in h(x).items():
                    total[y] = total.get(y, 0) + c * e
            total = {k: v for k, v in total.items() if v}
            if total != {ch: 1}:
                return False
    return True


def kunneth_convolution(parts: Sequence[dict[int, int]]) -> dict[int, int]:
    """Degree-wise convolution of Tor ranks of the factors."""
    acc = {0: 1}
    for part in parts:
        nxt: dict[int, int] = {}
        for a, x in acc.items():
            for b, y in part.items():
                nxt[a + b] = nxt.get(a + b, 0) + x * y
        acc = {k: v for k, v in nxt.items() if v}
    return acc


def enumerate_instances(max_a: int = 3, max_factors: int = 3, max_degree: int = 2,
                        block_size: int = 1) -> list[TensorCategory]:
    """Tensor products of [a]^pi with contiguous singleton-block partitions.

    Each block holds ``block_size`` elements whose degrees run over 0..max_degree.
    """
    singles: list[GradedPosetCategory] = []
    for a in range(1, max_a + 1):
        for degs in itertools.product(range(max_degree + 1), repeat=a * block_size):
            blocks = [degs[k * block_size:(k + 1) * block_size] for k in range(a)]
            singles.append(GradedPosetCategory.contiguous(blocks))
    out = []
    for k in range(1, max_factors + 1):
        for combo in itertools.product(singles, repeat=k):
            out.append(TensorCategory(combo))
    return out
