"""
The multilinear code with separated variables C(q, n, J).

A message (a_1, ..., a_m) in F_q^m is encoded as the evaluation table of
sum_j a_j prod_{tau in J_j} X_tau at all q^n points. Weights are complements
of zero counts, so everything here goes through the counting formulas and
never enumerates F_q^n (except the *_oracle cross-checks).
"""
import json
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, Iterator, List, Sequence, Tuple

from counting import count_single, count_system
from exactla import MatrixFq, RankDeficient, rank
from gf import FieldSpec, MlcountError, SchemaError, field_to_json, parse_field
from model import Partition, _check_keys, _decode, _parse_partition, make_partition, make_system, relaxed_system
from oracle import DEFAULT_MAX_BITS, value_distribution
from parallel import map_chunks

MAX_SUBSPACES = 10 ** 6
CODE_KEYS = ("field", "n", "partition")


class HierarchyTooLarge(MlcountError):
    """Exception raised when a hierarchy level has too many subspaces to enumerate."""
    exit_code = 5


@dataclass(frozen=True)
class CodeSpec:
    field: FieldSpec
    partition: Partition

    @property
    def length(self) -> int:
        return self.field.q ** self.partition.n

    @property
    def dimension(self) -> int:
        return self.partition.m

    @property
    def s(self) -> int:
        """Largest block size."""
        return self.partition.max_block_size

    def __str__(self) -> str:
        return f"C(q={self.field.q}, n={self.partition.n}, m={self.dimension})"


@dataclass(frozen=True)
class SubcodeBasis:
    """Coefficient vectors of h linearly independent codewords, as an h x m matrix."""
    h: int
    rows: MatrixFq


def make_code(field: FieldSpec, blocks: Sequence[Sequence[int]]) -> CodeSpec:
    """CodeSpec from 0-based blocks."""
    return CodeSpec(field, make_partition(sum(len(b) for b in blocks), blocks))


def parse_code(text) -> CodeSpec:
    """
    Parse a code file ``{"field": {...}, "n": 7, "partition": [[1,2],...]}``.

    Raises:
        SchemaError: Malformed or non-UTF-8 document.
        PartitionError: Overlapping, missing or empty blocks.
    """
    data = _decode(text)
    _check_keys(data, CODE_KEYS)
    return CodeSpec(parse_field(data["field"]), _parse_partition(data))


def serialize_code(code: CodeSpec) -> str:
    return json.dumps({
        "field": field_to_json(code.field),
        "n": code.partition.n,
        "partition": code.partition.to_json(),
    }, sort_keys=True)


def _word_system(code: CodeSpec, coeffs: Sequence[int]):
    if len(coeffs) != code.dimension:
        raise SchemaError(f"Codeword needs {code.dimension} coefficients, got {len(coeffs)}")
    A = MatrixFq.from_rows(code.field, [list(coeffs)], code.dimension)
    return relaxed_system(code.field, code.partition, A)


def codeword_weight(code: CodeSpec, coeffs: Sequence[int]) -> int:
    """Hamming weight of the codeword with message coeffs: q^n - N(f, 0)."""
    return code.length - count_single(_word_system(code, coeffs), 0, 0)


def codeword_weight_oracle(code: CodeSpec, coeffs: Sequence[int], max_bits: int = DEFAULT_MAX_BITS) -> int:
    """Hamming weight by evaluating the codeword at every point."""
    return code.length - value_distribution(_word_system(code, coeffs), max_bits)[0]


def min_distance(code: CodeSpec) -> int:
    """q^(n-s) (q-1)^s, s the largest block size."""
    q, n, s = code.field.q, code.partition.n, code.s
    return q ** (n - s) * (q - 1) ** s


def wei_weight(code: CodeSpec, basis: SubcodeBasis, threads: int = 1) -> int:
    """
    Support size of the subcode spanned by basis: q^n minus the number of
    common zeros of its h generators.

    Raises:
        RankDeficient: If the basis rows are dependent.
    """
    if rank(basis.rows) < basis.h:
        raise RankDeficient(f"Subcode basis of {basis.h} rows has rank {rank(basis.rows)}")
    sys = make_system(code.field, code.partition, basis.rows)
    return code.length - count_system(sys, range(basis.h), [0] * basis.h, threads=threads)


def gaussian_binomial(m: int, h: int, q: int) -> int:
    """Number of h-dimensional subspaces of F_q^m."""
    if h < 0 or h > m:
        return 0
    num, den = 1, 1
    for i in range(h):
        num *= q ** (m - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def _free_positions(pivots: Sequence[int], m: int) -> List[Tuple[int, int]]:
    """Entries of an RREF matrix with these pivots that may take any value."""
    pivot_set = set(pivots)
    return [(r, j) for r, p in enumerate(pivots) for j in range(p + 1, m) if j not in pivot_set]


def subspaces_with_pivots(pivots: Sequence[int], m: int, field: FieldSpec) -> Iterator[SubcodeBasis]:
    """Every RREF basis whose pivot columns are exactly ``pivots``."""
    h = len(pivots)
    free = _free_positions(pivots, m)
    for values in product(range(field.q), repeat=len(free)):
        grid = [[0] * m for _ in range(h)]
        for r, p in enumerate(pivots):
            grid[r][p] = 1
        for (r, j), x in zip(free, values):
            grid[r][j] = x
        yield SubcodeBasis(h, MatrixFq.from_rows(field, grid, m))


def enumerate_subspaces(m: int, h: int, field: FieldSpec) -> Iterator[SubcodeBasis]:
    """
    Each h-dimensional subspace of F_q^m exactly once, as its RREF basis.

    Pivot sets are visited in lexicographic order; the total count is the
    Gaussian binomial [m choose h]_q.
    """
    if not 0 < h <= m:
        raise ValueError(f"Need 0 < h <= m, got h = {h}, m = {m}")
    for pivots in combinations(range(m), h):
        yield from subspaces_with_pivots(pivots, m, field)


def weight_hierarchy(code: CodeSpec, threads: int = 1, max_subspaces: int = MAX_SUBSPACES,
                     progress: bool = False) -> List[int]:
    """
    The weight hierarchy d_1 < ... < d_m.

    d_h is the least Wei weight over all h-dimensional subcodes. Each level is
    sharded by pivot set across workers.

    Raises:
        HierarchyTooLarge: If some level has more than max_subspaces subspaces.
    """
    m, field = code.dimension, code.field
    for h in range(1, m + 1):
        size = gaussian_binomial(m, h, field.q)
        if size > max_subspaces:
            raise HierarchyTooLarge(
                f"Level h = {h} has {size} subspaces, over the limit {max_subspaces}"
            )

    def shard_min(pivots: Tuple[int, ...]) -> int:
        return min(wei_weight(code, basis) for basis in subspaces_with_pivots(pivots, m, field))

    hierarchy = []
    for h in range(1, m + 1):
        shards = list(combinations(range(m), h))
        hierarchy.append(min(map_chunks(shard_min, shards, threads, progress, f"Level d_{h}")))
    return hierarchy


def code_report(code: CodeSpec) -> Dict[str, object]:
    return {
        "length": code.length,
        "dimension": code.dimension,
        "s": code.s,
    }
