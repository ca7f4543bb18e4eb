import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enhom.linhom import GF
from enhom.torcat import (
    GradedPosetCategory,
    TensorCategory,
    check_homotopy,
    enumerate_instances,
    homotopy,
    kunneth_convolution,
    lemma_prediction,
    normalized_complex,
    strict_chains,
    tor_ranks,
)


def single(*degrees):
    return GradedPosetCategory.contiguous([[d] for d in degrees])


@st.composite
def poset_categories(draw, max_a=3):
    a = draw(st.integers(1, max_a))
    blocks = [draw(st.lists(st.integers(0, 2), min_size=0, max_size=2)) for _ in range(a)]
    return GradedPosetCategory.contiguous(blocks)


class TestPosetCategory:
    def test_validation(self):
        with pytest.raises(ValueError):
            GradedPosetCategory(0, (), ())
        with pytest.raises(ValueError):
            GradedPosetCategory(2, (1,), (3,))
        with pytest.raises(ValueError):
            GradedPosetCategory(1, (1, 1), (1,))

    def test_hom_degrees(self):
        c = single(1, 2, 0)
        assert c.hom_degree(0, 3) == 3
        assert c.block_degree(2) == 2
        assert c.elements(1, 3) == [1, 2]

    def test_composition_sign_with_interleaved_blocks(self):
        # Y = (y0, y1) with y0 in block 2 and y1 in block 1, both odd
        c = GradedPosetCategory(2, (1, 1), (2, 1))
        assert c.compose_sign(0, 1, 2) == -1
        c2 = GradedPosetCategory(2, (1, 1), (1, 2))
        assert c2.compose_sign(0, 1, 2) == 1

    def test_out_of_order(self):
        with pytest.raises(ValueError):
            single(1, 1).compose_sign(2, 1, 2)


@given(poset_categories())
@settings(max_examples=60, deadline=None)
def test_associative(cat):
    assert cat.check_associativity()


def test_associative_on_interleaved_partitions():
    for size in range(1, 5):
        for blocks in itertools.product(range(1, 4), repeat=size):
            a = max(blocks)
            for degs in itertools.product(range(2), repeat=size):
                assert GradedPosetCategory(a, degs, blocks).check_associativity()


class TestChains:
    def test_count(self):
        C = TensorCategory((single(0, 0, 0),))
        chains = strict_chains(C)
        # subsets of the two interior objects
        assert {n: len(v) for n, v in chains.items()} == {1: 1, 2: 2, 3: 1}

    def test_product_chains_are_strict(self):
        C = TensorCategory((single(0), single(0, 0)))
        for n, lst in strict_chains(C).items():
            for ch in lst:
                assert len(ch) == n + 1
                assert all(p != q for p, q in zip(ch, ch[1:]))

    def test_complex_squares_to_zero(self):
        for C in enumerate_instances(max_a=3, max_factors=2, max_degree=1):
            assert normalized_complex(C).check_square_zero() == []


class TestLemma:
    @pytest.mark.parametrize("a", [1, 2, 3])
    def test_single_factor(self, a):
        for degs in itertools.product(range(3), repeat=a):
            C = TensorCategory((single(*degs),))
            assert tor_ranks(C) == lemma_prediction(C)

    def test_two_factors(self):
        for C in enumerate_instances(max_a=3, max_factors=2, max_degree=2):
            if len(C.factors) == 2:
                assert tor_ranks(C) == lemma_prediction(C)

    def test_all_ones(self):
        C = TensorCategory((single(1), single(2), single(0)))
        assert tor_ranks(C) == {3: 1}

    def test_over_f2(self):
        C = TensorCategory((single(1, 1), single(1)))
        assert tor_ranks(C, GF(2)) == {}

    def test_kunneth(self):
        parts = [{1: 1}, {1: 1}]
        assert kunneth_convolution(parts) == {2: 1}
        assert kunneth_convolution([{1: 1}, {}]) == {}


class TestHomotopy:
    def test_needs_two_objects(self):
        with pytest.raises(ValueError):
            check_homotopy(single(1))

    def test_vanishes_when_first_step_is_short(self):
        assert homotopy(single(1, 1, 1), (0, 1, 3)) is None
        chain, sign = homotopy(single(1, 1, 1), (0, 2, 3))
        assert chain == (0, 1, 2, 3)
        assert sign == -1

    @pytest.mark.parametrize("a", [2, 3, 4])
    def test_contracts(self, a):
        for degs in itertools.product(range(3), repeat=a):
            assert check_homotopy(single(*degs))


@given(poset_categories())
@settings(max_examples=40, deadline=None)
def test_homotopy_with_larger_blocks(cat):
    if cat.a >= 2:
        assert check_homotopy(cat)
