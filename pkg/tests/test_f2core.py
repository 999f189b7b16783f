import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from extlab.f2core import (
    BitMatrix,
    EchelonAccumulator,
    F2Error,
    Solver,
    Subspace,
    column_space,
    kernel_basis,
    quotient_section,
    rank,
    rref,
    solve,
)


@st.composite
def bit_matrices(draw, max_dim=64):
    r = draw(st.integers(0, max_dim))
    c = draw(st.integers(0, max_dim))
    data = [draw(st.integers(0, (1 << c) - 1)) for _ in range(r)]
    return BitMatrix(r, c, data)


@given(bit_matrices())
@settings(max_examples=200, deadline=None)
def test_rank_nullity(m):
    assert rref(m).rank + kernel_basis(m).rank == m.cols


@given(bit_matrices())
@settings(max_examples=200, deadline=None)
def test_rref_idempotent(m):
    reduced = rref(m).matrix
    assert rref(reduced).matrix == reduced


@given(bit_matrices(max_dim=24), st.integers(0, (1 << 24) - 1))
@settings(max_examples=200, deadline=None)
def test_solve_soundness(m, b):
    b &= (1 << m.rows) - 1
    x = solve(m, b)
    if x is not None:
        assert m.mul_vec(x) == b
    # batch solver agrees with the one-shot path bit for bit
    assert Solver(m).solve(b) == x


@given(bit_matrices(max_dim=24))
@settings(max_examples=200, deadline=None)
def test_solve_finds_existing_solutions(m, ):
    # any column combination is solvable
    v = 0
    for j, col in enumerate(m.columns()):
        if j % 2 == 0:
            v ^= col
    assert solve(m, v) is not None


@given(st.integers(0, 24), st.lists(st.integers(0, (1 << 24) - 1), max_size=6))
@settings(max_examples=200, deadline=None)
def test_quotient_exactness(n, vectors):
    vectors = [v & ((1 << n) - 1) for v in vectors]
    sub = Subspace.from_rows(vectors, n)
    proj, lift = quotient_section(n, sub)
    assert proj.rows == n - sub.rank
    assert proj @ lift == BitMatrix.identity(proj.rows)
    for row in sub.basis.data:
        assert proj.mul_vec(row) == 0
    assert kernel_basis(proj) == sub


def test_rref_empty_and_identity():
    assert rref(BitMatrix.zero(0, 0)).rank == 0
    res = rref(BitMatrix.identity(3))
    assert res.matrix == BitMatrix.identity(3)
    assert res.pivots == (0, 1, 2)
    assert res.rank == 3


def test_rref_dependent_rows():
    m = BitMatrix.from_dense([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    assert rref(m).rank == 2


def test_kernel_examples():
    assert kernel_basis(BitMatrix.zero(2, 3)).rank == 3
    assert kernel_basis(BitMatrix.identity(5)).rank == 0
    ker = kernel_basis(BitMatrix.from_dense([[1, 1]]))
    assert ker.rank == 1 and ker.basis.row(0) == 0b11


def test_solve_examples():
    ident = BitMatrix.identity(4)
    assert solve(ident, 0b1010) == 0b1010
    assert solve(BitMatrix.zero(2, 2), 0b10) is None
    assert solve(BitMatrix.from_dense([[1], [1]]), 0b11) == 1


def test_quotient_examples():
    full = Subspace.from_rows([1, 2, 4], 3)
    proj, _ = quotient_section(3, full)
    assert proj.rows == 0
    proj, lift = quotient_section(3, Subspace.from_rows([], 3))
    assert proj == BitMatrix.identity(3)
    proj, _ = quotient_section(2, Subspace.from_rows([0b11], 2))
    assert proj.rows == 1


def test_subspace_coordinates_and_reduce():
    sub = Subspace.from_rows([0b011, 0b110], 3)
    assert sub.contains(0b101)
    assert sub.coordinates(0b101) is not None
    assert sub.coordinates(0b001) is None
    assert sub.reduce(0b011) == 0


def test_matmul_and_transpose():
    a = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    b = BitMatrix.from_dense([[1, 1], [0, 1], [1, 0]])
    prod = a @ b
    assert prod.to_dense() == [[0, 1], [1, 1]]
    assert a.transpose().to_dense() == [[1, 0], [0, 1], [1, 1]]
    with pytest.raises(F2Error):
        b @ b  # shape mismatch


def test_column_space_and_from_columns():
    m = BitMatrix.from_dense([[1, 0, 1], [0, 1, 1]])
    assert column_space(m).rank == 2
    assert BitMatrix.from_columns(m.columns(), m.rows) == m


def test_immutability_and_padding():
    m = BitMatrix.identity(2)
    with pytest.raises(AttributeError):
        m.rows = 5
    with pytest.raises(F2Error):
        BitMatrix(1, 2, [0b100])  # bit beyond column count


def test_echelon_accumulator():
    acc = EchelonAccumulator(4)
    assert acc.add(0b0110)
    assert acc.add(0b0110) == 0
    assert acc.add(0b1100)
    assert acc.contains(0b1010)
    assert acc.rank == 2
    assert acc.subspace() == Subspace.from_rows([0b0110, 0b1100], 4)


def test_rank_helper():
    assert rank(BitMatrix.identity(6)) == 6
    assert rank(BitMatrix.zero(3, 7)) == 0
