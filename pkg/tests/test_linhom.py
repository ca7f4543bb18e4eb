from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import GF as SGF
from sympy.polys.matrices import DomainMatrix

from enhom.linhom import (
    GF,
    QQ,
    ZZ,
    ChainComplex,
    ComplexError,
    SparseMatrix,
    homology,
    kernel_basis,
    nullity,
    parse_ring,
    rank,
    snf,
)

small_ints = st.integers(-4, 4)


@st.composite
def dense_matrices(draw, max_rows=7, max_cols=7, elements=small_ints):
    rows = draw(st.integers(1, max_rows))
    cols = draw(st.integers(1, max_cols))
    return [draw(st.lists(elements, min_size=cols, max_size=cols)) for _ in range(rows)]


def sympy_invariants(dense):
    m = sympy.Matrix(dense)
    if m.is_zero_matrix:
        return []
    d = smith_normal_form(m, domain=sympy.ZZ)
    vals = [abs(int(d[i, i])) for i in range(min(d.shape))]
    return sorted(v for v in vals if v)


class TestRings:
    def test_parse(self):
        assert parse_ring("q") == QQ
        assert parse_ring("Z") == ZZ
        assert parse_ring("fp:3") == GF(3)
        assert parse_ring("f:2") == GF(2)

    @pytest.mark.parametrize("text", ["r", "fp:4", "fp:x", ""])
    def test_parse_errors(self, text):
        with pytest.raises(ValueError):
            parse_ring(text)


class TestSparseMatrix:
    def test_dense_round_trip(self):
        dense = [[1, 0, 2], [0, 0, -1]]
        m = SparseMatrix.from_dense(dense)
        assert m.to_dense() == dense
        assert m.nnz == 3
        assert m.shape == (2, 3)

    def test_product_and_sum(self):
        a = SparseMatrix.from_dense([[1, 2], [3, 4]])
        b = SparseMatrix.from_dense([[0, 1], [1, 0]])
        assert (a @ b).to_dense() == [[2, 1], [4, 3]]
        assert (a + (-a)).is_zero()
        assert a.transpose().to_dense() == [[1, 3], [2, 4]]
        assert SparseMatrix.identity(2) @ a == a

    def test_triplets(self):
        m = SparseMatrix.from_triplets(2, 2, [(0, 1, 3), (0, 1, -3), (1, 0, 2)])
        assert m.triplets() == [(1, 0, 2)]


@given(dense_matrices())
@settings(max_examples=150, deadline=None)
def test_rank_over_q_matches_sympy(dense):
    assert rank(SparseMatrix.from_dense(dense), QQ) == sympy.Matrix(dense).rank()


@given(dense_matrices(elements=st.fractions(-3, 3, max_denominator=4)))
@settings(max_examples=80, deadline=None)
def test_rank_with_fractions(dense):
    assert rank(SparseMatrix.from_dense(dense), QQ) == sympy.Matrix(
        [[sympy.Rational(x.numerator, x.denominator) for x in row] for row in dense]).rank()


@given(dense_matrices(), st.sampled_from([2, 3, 5]))
@settings(max_examples=150, deadline=None)
def test_rank_mod_p_matches_sympy(dense, p):
    field = SGF(p)
    dm = DomainMatrix([[field(x) for x in row] for row in dense], (len(dense), len(dense[0])), field)
    expected = dm.rank()
    assert rank(SparseMatrix.from_dense(dense), GF(p)) == expected


@given(dense_matrices())
@settings(max_examples=150, deadline=None)
def test_snf_matches_sympy(dense):
    assert snf(SparseMatrix.from_dense(dense)) == sympy_invariants(dense)


def test_snf_torsion_example():
    assert snf(SparseMatrix.from_dense([[2, 0], [0, 3]])) == [1, 6]
    assert snf(SparseMatrix.from_dense([[2, 4], [6, 8]])) == [2, 4]
    with pytest.raises(ValueError):
        snf(SparseMatrix.from_dense([[Fraction(1, 2)]]))


def test_rank_over_z_refused():
    with pytest.raises(ValueError):
        rank(SparseMatrix.identity(2), ZZ)


@given(dense_matrices())
@settings(max_examples=80, deadline=None)
def test_kernel_basis(dense):
    m = SparseMatrix.from_dense(dense)
    basis = kernel_basis(m)
    assert len(basis) == nullity(m)
    for vec in basis:
        for row in dense:
            assert sum(row[c] * x for c, x in vec.items()) == 0


def circle():
    """Simplicial circle with three vertices and three edges."""
    d1 = SparseMatrix.from_dense([[-1, 0, 1], [1, -1, 0], [0, 1, -1]])
    return ChainComplex({0: 3, 1: 3}, {1: d1})


class TestHomology:
    def test_circle(self):
        h = homology(circle())
        assert h.betti_list(1) == [1, 1]
        assert not h.is_acyclic

    def test_rp2_torsion(self):
        # cellular chains of RP^2: Z <-2- Z <-0- Z
        c = ChainComplex({0: 1, 1: 1, 2: 1},
                         {1: SparseMatrix.from_dense([[0]]), 2: SparseMatrix.from_dense([[2]])})
        hz = homology(c, ZZ)
        assert hz.betti_list(2) == [1, 0, 0]
        assert hz.torsion == {1: [2]}
        assert homology(c, GF(2)).betti_list(2) == [1, 1, 1]
        assert homology(c, QQ).betti_list(2) == [1, 0, 0]

    def test_rejects_bad_complex(self):
        c = ChainComplex({0: 1, 1: 1, 2: 1},
                         {1: SparseMatrix.from_dense([[1]]), 2: SparseMatrix.from_dense([[1]])})
        with pytest.raises(ComplexError):
            homology(c)

    def test_certified_range(self):
        c = circle()
        c.certified_max = 0
        h = homology(c)
        assert h.betti == {0: 1}
        assert h.is_certified(0) and not h.is_certified(1)

    def test_euler_characteristic(self):
        assert circle().euler_characteristic() == 0

    def test_serializations(self):
        c = circle()
        assert c.to_json()["degree"] == {"0": 3, "1": 3}
        mm = c.to_matrix_market()
        assert "3 3 6" in mm
        assert homology(c).to_json()["betti"] == {"0": 1, "1": 1}


@given(st.lists(st.integers(0, 4), min_size=3, max_size=5), st.data())
@settings(max_examples=60, deadline=None)
def test_euler_characteristic_equals_alternating_betti(dims, data):
    """Random boundaries, replaced by zero whenever they would break d^2 = 0."""
    boundary = {}
    for p in range(1, len(dims)):
        rows, cols = dims[p - 1], dims[p]
        dense = [[data.draw(st.integers(-1, 1)) for _ in range(cols)] for _ in range(rows)]
        m = SparseMatrix.from_dense(dense) if rows and cols else SparseMatrix.zeros(rows, cols)
        if p - 1 in boundary and not (boundary[p - 1] @ m).is_zero():
            m = SparseMatrix.zeros(rows, cols)
        boundary[p] = m
    c = ChainComplex(dict(enumerate(dims)), boundary)
    h = homology(c)
    assert sum((-1) ** p * b for p, b in h.betti.items()) == c.euler_characteristic()
