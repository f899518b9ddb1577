"""
Tests for exact linear algebra over F_q.
"""
import random

import pytest

from exactla import (
    MatrixFq,
    RankDeficient,
    ShapeMismatch,
    Singular,
    choose_submatrix,
    invert,
    rank,
    rref_rank,
    valid_column_sets,
)
from gf import make_field

F2, F3, F4, F5 = make_field(2), make_field(3), make_field(2, 2), make_field(5)


def test_rank_basics():
    assert rank(MatrixFq.identity(F5, 4)) == 4
    assert rank(MatrixFq.zeros(F5, 3, 4)) == 0
    assert rank(MatrixFq.from_rows(F2, [[1, 0, 1], [1, 0, 1]])) == 1
    # 1 + 2 = 0 in F_3, so the third row is the sum of the first two
    assert rank(MatrixFq.from_rows(F3, [[1, 2, 0], [2, 0, 1], [0, 2, 1]])) == 2


def test_rref_pivots_and_form():
    M = MatrixFq.from_rows(F5, [[0, 2, 4, 1], [0, 1, 2, 0]])
    r, R, pivots = rref_rank(M)
    assert r == 2
    assert pivots == [1, 3]
    assert R.to_rows() == [[0, 1, 2, 0], [0, 0, 0, 1]]


@pytest.mark.parametrize("field", [F2, F3, F4, F5], ids=lambda f: f"F_{f.q}")
def test_invert_random_matrices(field):
    rng = random.Random(field.q)
    checked = 0
    while checked < 10:
        n = rng.randint(1, 4)
        M = MatrixFq.from_rows(field, [[rng.randrange(field.q) for _ in range(n)] for _ in range(n)])
        if rank(M) < n:
            with pytest.raises(Singular):
                invert(M)
            continue
        assert M.matmul(invert(M)) == MatrixFq.identity(field, n)
        assert invert(M).matmul(M) == MatrixFq.identity(field, n)
        checked += 1


def test_invert_errors():
    with pytest.raises(ShapeMismatch):
        invert(MatrixFq.zeros(F3, 2, 3))
    with pytest.raises(Singular):
        invert(MatrixFq.from_rows(F3, [[1, 2], [2, 1]]))


def test_matrix_validation():
    with pytest.raises(ShapeMismatch):
        MatrixFq.from_rows(F3, [[1, 2], [1]])
    with pytest.raises(ShapeMismatch):
        MatrixFq.from_rows(F3, [[1, 3]])
    with pytest.raises(ShapeMismatch):
        MatrixFq(2, 2, (1, 2, 3), F3)


def test_choose_submatrix_two_forms():
    A = MatrixFq.from_rows(F3, [[1, 0, 1], [0, 1, 1]])
    choice = choose_submatrix(A, [0, 1])
    assert choice.col_set == (0, 1)
    assert choice.complement_cols == (2,)
    assert choice.B_inv.to_rows() == [[1, 0], [0, 1]]
    assert choice.sigma.to_rows() == [[1], [1]]
    assert choice.l == 2
    assert choice.free_support([(0, 1), (2, 3), (4, 5, 6)]) == (4, 5, 6)


def test_choose_submatrix_three_forms():
    A = MatrixFq.from_rows(F3, [[1, 0, 0, 1], [1, 1, 0, 1], [0, 1, 1, 0]])
    choice = choose_submatrix(A, [0, 1, 2])
    assert choice.col_set == (0, 1, 2)
    # -1 is 2 in F_3
    assert choice.B_inv.to_rows() == [[1, 0, 0], [2, 1, 0], [1, 2, 1]]
    assert choice.sigma.to_rows() == [[1], [0], [0]]


def test_choose_submatrix_full_square():
    A = MatrixFq.from_rows(F5, [[1, 2], [3, 4]])
    choice = choose_submatrix(A, [0, 1])
    assert choice.complement_cols == ()
    assert choice.sigma.cols == 0
    assert A.matmul(choice.B_inv) == MatrixFq.identity(F5, 2)


def test_choose_submatrix_forced_columns():
    A = MatrixFq.from_rows(F3, [[1, 0, 1], [0, 1, 1]])
    choice = choose_submatrix(A, [0, 1], col_set=[1, 2])
    assert choice.complement_cols == (0,)
    # B = [[0, 1], [1, 1]] has inverse [[2, 1], [1, 0]] over F_3
    assert choice.B_inv.to_rows() == [[2, 1], [1, 0]]
    assert choice.sigma.to_rows() == [[2], [1]]


def test_choose_submatrix_errors():
    A = MatrixFq.from_rows(F2, [[1, 0, 1], [1, 0, 1]])
    with pytest.raises(RankDeficient):
        choose_submatrix(A, [0, 1])
    B = MatrixFq.from_rows(F3, [[1, 1, 0], [1, 1, 1]])
    with pytest.raises(RankDeficient):
        choose_submatrix(B, [0, 1], col_set=[0, 1])
    with pytest.raises(RankDeficient):
        choose_submatrix(B, [0, 1], col_set=[0])


def test_valid_column_sets():
    A = MatrixFq.from_rows(F3, [[1, 0, 1], [0, 1, 1]])
    assert valid_column_sets(A, [0, 1]) == [(0, 1), (0, 2), (1, 2)]
    assert valid_column_sets(A, [0]) == [(0,), (2,)]
    B = MatrixFq.from_rows(F3, [[1, 1, 0], [1, 1, 1]])
    assert valid_column_sets(B, [0, 1]) == [(0, 2), (1, 2)]


def test_submatrix_and_rows():
    A = MatrixFq.from_rows(F5, [[1, 2, 3], [4, 0, 1]])
    assert A.submatrix([1], [0, 2]).to_rows() == [[4, 1]]
    assert A.row(1) == (4, 0, 1)
    assert not A.is_zero_row(1)
    assert MatrixFq.zeros(F5, 1, 3).is_zero_row(0)
