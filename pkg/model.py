"""
Problem instances: the variable partition, the coefficient matrix and the
target value, with validation and the JSON problem file format.

A system of k multilinear forms with separated variables is

    f_i = sum_j A[i][j] * prod_{tau in J_j} X_tau        (i = 1..k)

over one shared partition {J_1, ..., J_m} of {1, ..., n}. Files use 1-based
variable indices; everything in memory is 0-based.
"""
import json
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

from exactla import MatrixFq, rank
from gf import (
    FieldElement,
    FieldSpec,
    MlcountError,
    SchemaError,
    as_index,
    field_to_json,
    parse_field,
)

PROBLEM_KEYS = ("field", "n", "partition", "A", "a")


class PartitionError(MlcountError):
    """Exception raised when blocks overlap, leave a gap, or are empty."""
    exit_code = 2


class RankError(MlcountError):
    """Exception raised when rank(A) < k on a formula-path system."""
    exit_code = 3


class DimensionError(MlcountError):
    """Exception raised when the system has more forms than blocks (k > m)."""
    exit_code = 3


@dataclass(frozen=True)
class Partition:
    """Blocks J_1..J_m of the variables 0..n-1, each block sorted ascending."""
    n: int
    blocks: Tuple[Tuple[int, ...], ...]

    @property
    def m(self) -> int:
        return len(self.blocks)

    @property
    def block_sizes(self) -> Tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    @property
    def max_block_size(self) -> int:
        return max(self.block_sizes)

    def to_json(self) -> List[List[int]]:
        return [[v + 1 for v in block] for block in self.blocks]


def make_partition(n: int, blocks: Sequence[Sequence[int]], one_based: bool = False) -> Partition:
    """
    Validate and build a Partition.

    Args:
        n: Number of variables.
        blocks: The blocks, in column order of A.
        one_based: Whether block entries are 1-based file indices.

    Raises:
        PartitionError: If a block is empty, blocks overlap, an index is out
            of range, or some variable is not covered.
    """
    if n < 1:
        raise PartitionError(f"n must be at least 1, got {n}")
    if not blocks:
        raise PartitionError("Partition has no blocks")
    shift = 1 if one_based else 0
    seen: Dict[int, int] = {}
    normalized = []
    for j, block in enumerate(blocks):
        if not block:
            raise PartitionError(f"Block {j + 1} is empty")
        members = []
        for raw in block:
            v = raw - shift
            if not 0 <= v < n:
                raise PartitionError(f"Block {j + 1} names variable {raw}, outside 1..{n}")
            if v in seen:
                raise PartitionError(
                    f"Variable {v + 1} appears in blocks {seen[v] + 1} and {j + 1}"
                )
            seen[v] = j
            members.append(v)
        normalized.append(tuple(sorted(members)))
    missing = [v + 1 for v in range(n) if v not in seen]
    if missing:
        raise PartitionError(f"Variables {missing} are not covered by any block")
    return Partition(n, tuple(normalized))


@dataclass(frozen=True)
class SystemSpec:
    """
    The forms f_1..f_k: a partition plus a k x m coefficient matrix.

    ``relaxed`` marks systems built without the k <= m and rank(A) = k checks;
    only the oracle accepts them.
    """
    field: FieldSpec
    partition: Partition
    A: MatrixFq
    relaxed: bool = False

    @property
    def k(self) -> int:
        return self.A.rows

    @property
    def m(self) -> int:
        return self.partition.m

    @property
    def n(self) -> int:
        return self.partition.n

    @property
    def q(self) -> int:
        return self.field.q

    def rows(self, row_set: Sequence[int]) -> "SystemSpec":
        """The subsystem made of the forms ``row_set`` (0-based)."""
        A = self.A.submatrix(row_set, range(self.A.cols))
        return SystemSpec(self.field, self.partition, A, self.relaxed)


@dataclass(frozen=True)
class CountQuery:
    system: SystemSpec
    target: FieldElement


@dataclass(frozen=True)
class Diagnostic:
    """One violated invariant; ``level`` is "error" or "warning"."""
    level: str
    error: str
    message: str


def _shape_check(field: FieldSpec, partition: Partition, A: MatrixFq) -> None:
    if A.field != field:
        raise SchemaError(f"Matrix over {A.field!r} used with {field!r}")
    if A.cols != partition.m:
        raise SchemaError(f"A has {A.cols} columns but the partition has {partition.m} blocks")
    if A.rows < 1:
        raise SchemaError("A has no rows")


def validate_system(sys: SystemSpec, require_rank: bool = True) -> List[Diagnostic]:
    """
    List every violated invariant of sys; an empty list means valid.

    With require_rank False, k > m and rank(A) < k are reported as warnings,
    since the oracle counts any system.
    """
    level = "error" if require_rank else "warning"
    report = []
    if sys.k > sys.m:
        report.append(Diagnostic(level, "DimensionError", f"k = {sys.k} exceeds m = {sys.m}"))
    zero_rows = [i + 1 for i in range(sys.k) if sys.A.is_zero_row(i)]
    if zero_rows:
        report.append(Diagnostic(level, "RankError", f"Rows {zero_rows} of A are zero"))
    r = rank(sys.A)
    if r < sys.k:
        report.append(Diagnostic(level, "RankError", f"rank(A) = {r} < k = {sys.k}"))
    return report


def _raise_first(report: List[Diagnostic]) -> None:
    errors = {"DimensionError": DimensionError, "RankError": RankError}
    for diag in report:
        if diag.level == "error":
            raise errors[diag.error](diag.message)


def check_system(sys: SystemSpec) -> None:
    """
    Raise the first invariant violation of sys.

    Raises:
        DimensionError: If k > m.
        RankError: If A has a zero row or rank(A) < k.
    """
    _raise_first(validate_system(sys, require_rank=True))


def make_system(field: FieldSpec, partition: Partition, A: MatrixFq) -> SystemSpec:
    """
    Build a formula-path system.

    Raises:
        SchemaError: If A does not fit the field or the partition.
        DimensionError: If k > m.
        RankError: If rank(A) < k.
    """
    _shape_check(field, partition, A)
    sys = SystemSpec(field, partition, A)
    check_system(sys)
    return sys


def relaxed_system(field: FieldSpec, partition: Partition, A: MatrixFq) -> SystemSpec:
    """Build a system for brute-force use only: any k, any rank, zero rows allowed."""
    _shape_check(field, partition, A)
    return SystemSpec(field, partition, A, relaxed=True)


def system_from_rows(field: FieldSpec, blocks: Sequence[Sequence[int]], rows: Sequence[Sequence[int]],
                     relaxed: bool = False) -> SystemSpec:
    """Shorthand constructor from 0-based blocks and a list of matrix rows."""
    n = sum(len(b) for b in blocks)
    partition = make_partition(n, blocks)
    A = MatrixFq.from_rows(field, rows, len(blocks))
    if relaxed:
        return relaxed_system(field, partition, A)
    return make_system(field, partition, A)


def _decode(text) -> Dict:
    if isinstance(text, (bytes, bytearray)):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise SchemaError(f"Input is not UTF-8: {e}")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f"Invalid JSON: {e}")
    if not isinstance(data, dict):
        raise SchemaError("Top level must be a JSON object")
    return data


def _int_matrix(value, name: str) -> List[List[int]]:
    if not isinstance(value, list) or not all(isinstance(r, list) for r in value):
        raise SchemaError(f"{name} must be a list of lists")
    for r in value:
        for x in r:
            if isinstance(x, bool) or not isinstance(x, int):
                raise SchemaError(f"{name} entries must be integers, got {x!r}")
    return value


def _parse_partition(data: Dict) -> Partition:
    n = data["n"]
    if isinstance(n, bool) or not isinstance(n, int):
        raise SchemaError(f"n must be an integer, got {n!r}")
    return make_partition(n, _int_matrix(data["partition"], "partition"), one_based=True)


def _check_keys(data: Dict, required: Sequence[str]) -> None:
    unknown = set(data) - set(required)
    if unknown:
        raise SchemaError(f"Unknown keys: {sorted(unknown)}")
    missing = [key for key in required if key not in data]
    if missing:
        raise SchemaError(f"Missing keys: {missing}")


def parse_problem(text, require_rank: bool = True) -> CountQuery:
    """
    Parse a problem file.

    Args:
        text: UTF-8 bytes or str holding
            ``{"field": {...}, "n": 7, "partition": [[1,2],...], "A": [[...]], "a": 0}``.
        require_rank: Enforce k <= m and rank(A) = k. Pass False for
            oracle-only use.

    Returns:
        The validated CountQuery.

    Raises:
        SchemaError: Malformed document or out-of-range entries.
        PartitionError: Overlapping, missing or empty blocks.
        DimensionError: k > m (formula path only).
        RankError: rank(A) < k (formula path only).
    """
    data = _decode(text)
    _check_keys(data, PROBLEM_KEYS)
    field = parse_field(data["field"])
    partition = _parse_partition(data)
    rows = _int_matrix(data["A"], "A")
    try:
        A = MatrixFq.from_rows(field, rows, partition.m)
    except MlcountError as e:
        raise SchemaError(f"A: {e}")
    a = data["a"]
    if isinstance(a, bool) or not isinstance(a, int) or not 0 <= a < field.q:
        raise SchemaError(f"a = {a!r} is not an element index of F_{field.q}")

    if require_rank:
        sys = make_system(field, partition, A)
    else:
        sys = relaxed_system(field, partition, A)
    return CountQuery(sys, field.element(a))


def problem_to_json(query: CountQuery) -> Dict[str, object]:
    sys = query.system
    return {
        "field": field_to_json(sys.field),
        "n": sys.n,
        "partition": sys.partition.to_json(),
        "A": sys.A.to_rows(),
        "a": query.target.index,
    }


def serialize_problem(query: CountQuery) -> str:
    """Canonical problem file text: sorted keys, sorted blocks, 1-based indices."""
    return json.dumps(problem_to_json(query), sort_keys=True)


def make_query(sys: SystemSpec, a) -> CountQuery:
    return CountQuery(sys, sys.field.element(as_index(a, sys.field)))


def block_products(sys: SystemSpec, point: Sequence[int]) -> List[int]:
    """prod_{tau in J_j} X_tau for every block, as field indices."""
    f = sys.field
    out = []
    for block in sys.partition.blocks:
        acc = 1
        for v in block:
            acc = f.mul(acc, point[v])
            if acc == 0:
                break
        out.append(acc)
    return out


def evaluate(sys: SystemSpec, point: Sequence[int], products: Optional[Sequence[int]] = None) -> Tuple[int, ...]:
    """
    Values (f_1(x), ..., f_k(x)) at a point x of F_q^n given as indices.

    Each block product is computed once and shared by all k forms.
    """
    if len(point) != sys.n:
        raise SchemaError(f"Point has {len(point)} coordinates, expected {sys.n}")
    f = sys.field
    if products is None:
        products = block_products(sys, point)
    values = []
    for i in range(sys.k):
        acc = 0
        for coeff, prod in zip(sys.A.row(i), products):
            if coeff and prod:
                acc = f.add(acc, f.mul(coeff, prod))
        values.append(acc)
    return tuple(values)
