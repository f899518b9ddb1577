"""
Brute-force ground truth: walk every point of F_q^n and count directly.

Nothing here assumes anything about A (any rank, zero rows, k > m), so these
functions are the reference the formula path is tested against.
"""
from collections import Counter
from typing import Dict, Iterator, List, Sequence

from exactla import ShapeMismatch
from gf import MlcountError, as_index
from model import CountQuery, SystemSpec, evaluate
from parallel import map_chunks, split_range

DEFAULT_MAX_BITS = 26


class OracleTooLarge(MlcountError):
    """Exception raised when q^n exceeds the brute-force guard."""
    exit_code = 4


def check_guard(sys: SystemSpec, max_bits: int = DEFAULT_MAX_BITS, force: bool = False) -> int:
    """
    Number of points q^n, after checking it against 2^max_bits.

    Raises:
        OracleTooLarge: If q^n > 2^max_bits and force is not set.
    """
    points = sys.q ** sys.n
    if not force and points > 1 << max_bits:
        raise OracleTooLarge(
            f"q^n = {sys.q}^{sys.n} exceeds the oracle limit 2^{max_bits}; use force to override"
        )
    return points


def _points(q: int, n: int, rng: range) -> Iterator[List[int]]:
    """Points with linear index in rng, coordinate 0 least significant."""
    if not len(rng):
        return
    point = []
    index = rng.start
    for _ in range(n):
        index, digit = divmod(index, q)
        point.append(digit)
    for _ in rng:
        yield point
        for v in range(n):
            point[v] += 1
            if point[v] < q:
                break
            point[v] = 0


def _product_tally(sys: SystemSpec, rng: range) -> Counter:
    f = sys.field
    tally = Counter()
    for point in _points(sys.q, sys.n, rng):
        acc = 1
        for value in evaluate(sys, point):
            acc = f.mul(acc, value)
        tally[acc] += 1
    return tally


def _system_tally(sys: SystemSpec, row_set: Sequence[int], b: Sequence[int], rng: range) -> int:
    hits = 0
    for point in _points(sys.q, sys.n, rng):
        values = evaluate(sys, point)
        if all(values[i] == bt for i, bt in zip(row_set, b)):
            hits += 1
    return hits


def value_distribution(sys: SystemSpec, max_bits: int = DEFAULT_MAX_BITS, force: bool = False,
                       threads: int = 1, progress: bool = False) -> Dict[int, int]:
    """
    Number of x in F_q^n with f_1(x)...f_k(x) = a, for every a in F_q.

    Returns:
        Mapping from element index to count; the values sum to q^n.

    Raises:
        OracleTooLarge: If q^n exceeds the guard.
    """
    total = check_guard(sys, max_bits, force)
    chunks = split_range(total, max(threads, 1) * 4)
    tallies = map_chunks(lambda rng: _product_tally(sys, rng), chunks, threads,
                         progress, "Enumerating points")
    merged = Counter()
    for tally in tallies:
        merged.update(tally)
    return {a: merged.get(a, 0) for a in range(sys.q)}


def brute_count(query: CountQuery, max_bits: int = DEFAULT_MAX_BITS, force: bool = False,
                threads: int = 1, progress: bool = False) -> int:
    """Exact N(f, a) by exhaustive evaluation."""
    dist = value_distribution(query.system, max_bits, force, threads, progress)
    return dist[query.target.index]


def brute_count_system(sys: SystemSpec, row_set: Sequence[int], b: Sequence, max_bits: int = DEFAULT_MAX_BITS,
                       force: bool = False, threads: int = 1) -> int:
    """
    Exact number of common solutions of f_i = b_t for i = row_set[t].

    An empty row_set imposes nothing and returns q^n.
    """
    total = check_guard(sys, max_bits, force)
    row_set = list(row_set)
    b = [as_index(bt, sys.field) for bt in b]
    if len(b) != len(row_set):
        raise ShapeMismatch(f"{len(row_set)} rows but {len(b)} right-hand sides")
    if not row_set:
        return total
    chunks = split_range(total, max(threads, 1) * 4)
    return sum(map_chunks(lambda rng: _system_tally(sys, row_set, b, rng), chunks, threads))
