"""
Exact linear algebra over F_q: rank, reduced row echelon form, inversion,
and the invertible-submatrix choice used by the system-count formula.

All indices are 0-based here; files and CLI output convert to 1-based.
"""
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, List, Optional, Sequence, Tuple

from gf import FieldElement, FieldSpec, MlcountError


class RankDeficient(MlcountError):
    """Exception raised when a row set does not have full rank."""
    exit_code = 3


class Singular(MlcountError):
    """Exception raised when inverting a singular matrix."""
    exit_code = 3


class ShapeMismatch(MlcountError):
    """Exception raised when matrix or system dimensions do not fit an operation."""
    exit_code = 3


@dataclass(frozen=True)
class MatrixFq:
    """A rows x cols matrix over one field; entries are canonical indices, row-major."""
    rows: int
    cols: int
    entries: Tuple[int, ...]
    field: FieldSpec

    def __post_init__(self):
        if len(self.entries) != self.rows * self.cols:
            raise ShapeMismatch(
                f"{len(self.entries)} entries do not fill a {self.rows}x{self.cols} matrix"
            )

    @classmethod
    def from_rows(cls, field: FieldSpec, rows: Sequence[Sequence[int]], cols: Optional[int] = None) -> "MatrixFq":
        rows = [[int(x) for x in row] for row in rows]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for i, row in enumerate(rows):
            if len(row) != cols:
                raise ShapeMismatch(f"Row {i + 1} has {len(row)} entries, expected {cols}")
            for x in row:
                if not 0 <= x < field.q:
                    raise ShapeMismatch(f"Entry {x} is not an element of F_{field.q}")
        return cls(len(rows), cols, tuple(x for row in rows for x in row), field)

    @classmethod
    def identity(cls, field: FieldSpec, n: int) -> "MatrixFq":
        return cls.from_rows(field, [[int(i == j) for j in range(n)] for i in range(n)], n)

    @classmethod
    def zeros(cls, field: FieldSpec, rows: int, cols: int) -> "MatrixFq":
        return cls(rows, cols, (0,) * (rows * cols), field)

    def get(self, i: int, j: int) -> int:
        return self.entries[i * self.cols + j]

    def element(self, i: int, j: int) -> FieldElement:
        return FieldElement(self.get(i, j), self.field)

    def row(self, i: int) -> Tuple[int, ...]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def to_rows(self) -> List[List[int]]:
        return [list(self.row(i)) for i in range(self.rows)]

    def submatrix(self, rows: Iterable[int], cols: Iterable[int]) -> "MatrixFq":
        rows, cols = list(rows), list(cols)
        return MatrixFq.from_rows(self.field, [[self.get(i, j) for j in cols] for i in rows], len(cols))

    def matmul(self, other: "MatrixFq") -> "MatrixFq":
        if self.cols != other.rows:
            raise ShapeMismatch(f"Cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        f = self.field
        out = []
        for i in range(self.rows):
            for j in range(other.cols):
                acc = 0
                for t in range(self.cols):
                    acc = f.add(acc, f.mul(self.get(i, t), other.get(t, j)))
                out.append(acc)
        return MatrixFq(self.rows, other.cols, tuple(out), f)

    def is_zero_row(self, i: int) -> bool:
        return not any(self.row(i))


def _rref_rows(field: FieldSpec, rows: List[List[int]], ncols: int) -> Tuple[List[List[int]], List[int]]:
    """In-place Gauss-Jordan elimination, pivoting on the first nonzero entry."""
    pivots = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if rows[i][c] != 0), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        scale = field.inv(rows[r][c])
        rows[r] = [field.mul(scale, x) for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c] != 0:
                factor = rows[i][c]
                rows[i] = [field.sub(x, field.mul(factor, y)) for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows, pivots


def rref_rank(M: MatrixFq) -> Tuple[int, MatrixFq, List[int]]:
    """
    Reduced row echelon form of M.

    Returns:
        (rank, rref, pivot_cols) with pivot_cols 0-based and ascending.
    """
    rows, pivots = _rref_rows(M.field, M.to_rows(), M.cols)
    return len(pivots), MatrixFq.from_rows(M.field, rows, M.cols), pivots


def rank(M: MatrixFq) -> int:
    return rref_rank(M)[0]


def invert(M: MatrixFq) -> MatrixFq:
    """
    Inverse of a square matrix.

    Raises:
        ShapeMismatch: If M is not square.
        Singular: If M is not invertible.
    """
    if M.rows != M.cols:
        raise ShapeMismatch(f"Cannot invert a {M.rows}x{M.cols} matrix")
    n = M.rows
    augmented = [list(M.row(i)) + [int(i == j) for j in range(n)] for i in range(n)]
    rows, pivots = _rref_rows(M.field, augmented, n)
    if pivots != list(range(n)):
        raise Singular(f"Matrix of rank {len(pivots)} < {n} is singular")
    return MatrixFq.from_rows(M.field, [row[n:] for row in rows], n)


@dataclass(frozen=True)
class SubmatrixChoice:
    """
    An invertible l x l block B of the row-restricted matrix A[row_set].

    ``sigma`` is B^-1 C where C holds the complement columns, so the pivot
    block products equal B^-1 b - sigma times the free block products.
    """
    row_set: Tuple[int, ...]
    col_set: Tuple[int, ...]
    complement_cols: Tuple[int, ...]
    B_inv: MatrixFq
    sigma: MatrixFq

    @property
    def l(self) -> int:
        return len(self.row_set)

    def free_support(self, blocks: Sequence[Sequence[int]]) -> Tuple[int, ...]:
        """Variables of the complement blocks, sorted."""
        return tuple(sorted(v for j in self.complement_cols for v in blocks[j]))


def choose_submatrix(A: MatrixFq, row_set: Sequence[int], col_set: Optional[Sequence[int]] = None) -> SubmatrixChoice:
    """
    Choose the invertible block for the rows ``row_set`` of A.

    Args:
        A: The k x m coefficient matrix.
        row_set: Ascending 0-based row indices.
        col_set: Optional forced column choice; by default the pivot columns
            of the RREF, i.e. the lexicographically smallest valid choice.

    Returns:
        The SubmatrixChoice with B^-1 and sigma computed.

    Raises:
        RankDeficient: If A[row_set] has rank below len(row_set), or a forced
            col_set gives a singular block.
    """
    row_set = tuple(sorted(row_set))
    restricted = A.submatrix(row_set, range(A.cols))
    if col_set is None:
        r, _, pivots = rref_rank(restricted)
        if r < len(row_set):
            raise RankDeficient(
                f"Rows {[i + 1 for i in row_set]} have rank {r} < {len(row_set)}"
            )
        col_set = tuple(pivots)
    else:
        col_set = tuple(sorted(col_set))
        if len(col_set) != len(row_set):
            raise RankDeficient(f"Column choice {list(col_set)} does not match {len(row_set)} rows")
    complement = tuple(j for j in range(A.cols) if j not in col_set)

    B = restricted.submatrix(range(len(row_set)), col_set)
    try:
        B_inv = invert(B)
    except Singular as e:
        raise RankDeficient(f"Columns {[j + 1 for j in col_set]} give a singular block: {e}")
    C = restricted.submatrix(range(len(row_set)), complement)
    sigma = B_inv.matmul(C) if complement else MatrixFq.zeros(A.field, len(row_set), 0)
    return SubmatrixChoice(row_set, col_set, complement, B_inv, sigma)


def valid_column_sets(A: MatrixFq, row_set: Sequence[int]) -> List[Tuple[int, ...]]:
    """Every column subset giving an invertible block for ``row_set``, lexicographic."""
    row_set = tuple(sorted(row_set))
    restricted = A.submatrix(row_set, range(A.cols))
    out = []
    for cols in combinations(range(A.cols), len(row_set)):
        if rank(restricted.submatrix(range(len(row_set)), cols)) == len(row_set):
            out.append(cols)
    return out
