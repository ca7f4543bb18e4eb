import itertools
from functools import lru_cache
from math import comb

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from enhom.epicat import (
    LabeledTree,
    LevelTree,
    StructureError,
    TreeMorphism,
    compose,
    enumerate_ordered_surjections,
    enumerate_trees,
    extend_face,
    face_admissible,
    fiber_subtree,
    graft,
    hom_set,
    identity,
    identity_morphism,
    iota,
    is_order_preserving_surjection,
    labeled_fiber,
    parse_tree,
    serialize_tree,
    standard_labeling,
    trivial_tree,
    tree_from_maps,
)
from enhom.signs import enumerate_shuffles

EXAMPLE = tree_from_maps([0, 0, 1], [0, 0, 0, 1, 1, 2, 2, 2, 2])


@lru_cache(maxsize=None)
def brute_surjections(n, m):
    out = []
    for vals in itertools.combinations_with_replacement(range(m + 1), n + 1):
        if set(vals) == set(range(m + 1)):
            out.append(vals)
    return tuple(out)


def brute_trees(n, max_degree):
    """All towers of monotone surjections, found by filtering every arity tuple."""
    out = set()
    for arities in itertools.product(range(max_degree), repeat=n):
        if sum(r + 1 for r in arities) > max_degree:
            continue
        choices = [brute_surjections(arities[k + 1], arities[k]) for k in range(n - 1)]
        for maps in itertools.product(*choices):
            out.add((arities, maps))
    return out


def brute_hom(s, t):
    """Every tuple of maps satisfying the morphism axioms, by exhaustive search."""
    out = []
    ranges = [itertools.product(range(t.r(l) + 1), repeat=s.r(l) + 1) for l in range(1, s.n + 1)]
    for sigmas in itertools.product(*ranges):
        if TreeMorphism(s, t, sigmas).is_valid:
            out.append(tuple(tuple(x) for x in sigmas))
    return out


class TestSurjections:
    def test_small_cases(self):
        assert enumerate_ordered_surjections(1, 1) == ((0, 1),)
        assert enumerate_ordered_surjections(0, 1) == ()
        assert len(enumerate_ordered_surjections(4, 2)) == 6

    @pytest.mark.parametrize("n", range(0, 9))
    def test_counts_match_brute_force(self, n):
        for m in range(0, n + 1):
            got = enumerate_ordered_surjections(n, m)
            assert len(got) == comb(n, m)
            assert sorted(got) == sorted(brute_surjections(n, m))

    def test_order_is_by_fibre_composition(self):
        got = enumerate_ordered_surjections(3, 1)
        assert got == ((0, 1, 1, 1), (0, 0, 1, 1), (0, 0, 0, 1))


class TestTrees:
    def test_one_level(self):
        trees = enumerate_trees(1, 3)
        assert [t.arities for t in trees] == [(0,), (1,), (2,)]

    def test_two_level_degree_three(self):
        trees = enumerate_trees(2, 3)
        assert [serialize_tree(t) for t in trees] == ["2; 0,0; f_2=[0]", "2; 0,1; f_2=[0,0]"]

    def test_three_level_minimum(self):
        assert enumerate_trees(3, 3) == [trivial_tree(3)]

    @pytest.mark.parametrize("n,d", [(1, 6), (2, 6), (3, 7), (4, 7)])
    def test_enumeration_matches_brute_force(self, n, d):
        got = enumerate_trees(n, d)
        assert len(got) == len(set(got))
        assert {(t.arities, t.maps) for t in got} == brute_trees(n, d)

    def test_invalid_maps_rejected(self):
        with pytest.raises(StructureError):
            LevelTree((1, 2), ((0, 1, 0),))
        with pytest.raises(StructureError):
            LevelTree((2, 1), ((0, 1),))

    def test_serialization_round_trip(self):
        for t in enumerate_trees(3, 8):
            assert parse_tree(serialize_tree(t)) == t

    def test_parse_errors(self):
        with pytest.raises(StructureError):
            parse_tree("2; 0,1; g=[0,0]")

    def test_edge_labels_of_the_example(self):
        assert EXAMPLE.edge_labels == ((1, 9), (2, 6, 10), (3, 4, 5, 7, 8, 11, 12, 13, 14))
        assert EXAMPLE.degree == 14

    def test_degree_via_fibres(self):
        for t in enumerate_trees(3, 7) + enumerate_trees(2, 7):
            total = t.r(1) + 1 + sum(fiber_subtree(t, 1, i).degree for i in range(t.r(1) + 1))
            assert total == t.degree

    def test_graft_inverts_fibres(self):
        for t in enumerate_trees(3, 8):
            assert graft([fiber_subtree(t, 1, i) for i in range(t.r(1) + 1)]) == t


class TestIota:
    def test_palm(self):
        assert serialize_tree(iota(1, 3, LevelTree((2,)))) == "3; 0,0,2; f_2=[0]; f_3=[0,0,0]"

    def test_trivial(self):
        assert iota(2, 3, trivial_tree(2)) == trivial_tree(3)

    def test_degree_shift(self):
        for k in (1, 2):
            for t in enumerate_trees(k, 6):
                assert iota(k, 3, t).degree == t.degree + 3 - k


class TestFibres:
    def test_example_fibre_above_label_nine(self):
        sub = fiber_subtree(EXAMPLE, 1, 1)
        assert sub.arities == (0, 3)
        # its edges are 10..14 in the big tree
        assert sub.degree == 5

    def test_trivial(self):
        assert fiber_subtree(trivial_tree(3), 1, 0) == trivial_tree(2)

    def test_out_of_range(self):
        with pytest.raises(StructureError):
            fiber_subtree(EXAMPLE, 1, 2)

    def test_labeled_fibres(self):
        lt = standard_labeling(EXAMPLE, [1, 0, 2, 0, 1, 0, 0, 1, 1])
        sub = labeled_fiber(lt, 2, 1)
        assert sub.tree.arities == (1,)
        assert sub.x_degrees == (0, 1)
        assert labeled_fiber(lt, 3, 4) == (1,)


class TestHom:
    def test_identity_in_endomorphisms(self):
        t = tree_from_maps(identity(2))
        assert identity_morphism(t) in hom_set(t, t)

    def test_example_morphisms(self):
        s = tree_from_maps((0, 1, 2))
        t = tree_from_maps((0, 0, 1))
        homs = hom_set(s, t)
        assert len(homs) == 2
        assert {m.sigmas for m in homs} == {((0, 0, 1), (0, 1, 2)), ((0, 0, 1), (1, 0, 2))}

    def test_target_bigger_is_empty(self):
        assert hom_set(trivial_tree(2), tree_from_maps((0, 0))) == ()

    @pytest.mark.parametrize("n,d", [(1, 5), (2, 6), (3, 6)])
    def test_hom_sets_match_brute_force(self, n, d):
        trees = enumerate_trees(n, d)
        for s in trees:
            for t in trees:
                if t.degree > s.degree:
                    continue
                got = sorted(m.sigmas for m in hom_set(s, t))
                assert got == sorted(brute_hom(s, t))

    def test_composition_closed(self):
        trees = enumerate_trees(2, 5) + enumerate_trees(3, 5)
        for a in trees:
            for b in trees:
                if b.n != a.n:
                    continue
                for f in hom_set(a, b):
                    assert compose(identity_morphism(b), f) == f
                    assert compose(f, identity_morphism(a)) == f
                    for c in trees:
                        if c.n != a.n:
                            continue
                        for g in hom_set(b, c):
                            assert compose(g, f) in hom_set(a, c)

    def test_mismatched_composition(self):
        s = tree_from_maps((0, 1))
        with pytest.raises(StructureError):
            compose(identity_morphism(s), identity_morphism(trivial_tree(2)))


class TestFaces:
    def test_fork_has_no_top_faces(self):
        t = tree_from_maps(identity(2))
        assert not any(face_admissible(t, 2, i) for i in range(2))

    def test_merge_allowed(self):
        assert face_admissible(tree_from_maps((0, 0, 1)), 2, 0)

    def test_admissibility_matches_brute_force(self):
        for n in (2, 3):
            for t in enumerate_trees(n, 6):
                for j in range(2, n + 1):
                    f = t.f(j)
                    for i in range(t.r(j)):
                        # brute force: some monotone g with g o d_i = f
                        exists = any(
                            tuple(g[v if v <= i else v - 1] for v in range(len(f))) == f
                            for g in itertools.product(range(t.r(j - 1) + 1), repeat=t.r(j)))
                        assert face_admissible(t, j, i) == exists

    def test_identity_shuffle(self):
        m, target = extend_face(EXAMPLE, 1, 0, (0, 1, 2))
        assert m.sigmas[1:] == (identity(2), identity(8))
        assert target.maps == ((0, 0, 0), EXAMPLE.f(3))

    def test_example_shuffle_231(self):
        m, target = extend_face(EXAMPLE, 1, 0, (1, 2, 0))
        fibres = [fiber_subtree(target, 2, k).arities for k in range(3)]
        original = [fiber_subtree(EXAMPLE, 2, k).arities for k in range(3)]
        assert fibres == [original[2], original[0], original[1]]

    def test_extensions_are_distinct_morphisms(self):
        for n in (2, 3):
            for t in enumerate_trees(n, 6):
                for j in range(1, n):
                    for i in range(t.r(j)):
                        if not face_admissible(t, j, i):
                            continue
                        p, q = len(t.children(j, i)), len(t.children(j, i + 1))
                        ms = []
                        for sh in enumerate_shuffles(p, q):
                            m, target = extend_face(t, j, i, sh.perm)
                            assert m in hom_set(t, target)
                            ms.append(m)
                        assert len(set(ms)) == comb(p + q, p)

    def test_inadmissible_face(self):
        with pytest.raises(StructureError):
            extend_face(tree_from_maps(identity(1), (0, 1)), 2, 0, (0, 1))


@st.composite
def trees(draw, n=3, max_top=5):
    arities = [draw(st.integers(0, 2))]
    maps = []
    for _ in range(n - 1):
        r = draw(st.integers(arities[-1], max_top))
        f = draw(st.sampled_from(enumerate_ordered_surjections(r, arities[-1])))
        arities.append(r)
        maps.append(f)
    return LevelTree(tuple(arities), tuple(maps))


@given(trees())
@settings(max_examples=60, deadline=None)
def test_labels_increase_along_each_level(t):
    for row in t.edge_labels:
        assert list(row) == sorted(row)
    assert sorted(x for row in t.edge_labels for x in row) == list(range(1, t.degree + 1))


@given(trees())
@settings(max_examples=60, deadline=None)
def test_maps_are_monotone_surjections(t):
    for level in range(2, t.n + 1):
        assert is_order_preserving_surjection(t.f(level))


def test_labeled_tree_validation():
    t = tree_from_maps((0, 0, 1))
    with pytest.raises(StructureError):
        LabeledTree(t, (0, 0), (0, 1))
    lt = LabeledTree(t, (1, 0, 2, 0), (2, 0, 1, 2))
    assert lt.leaf_degrees == (0, 2, 1)
    assert lt.degree == t.degree + 3
