"""
Worked example systems with known closed forms, and random instance
generators shared by the tests and the selftest command.
"""
import random
from typing import List, Optional

from exactla import MatrixFq, rank, valid_column_sets
from gf import FieldSpec, make_field, prime_factors
from model import SystemSpec, make_partition, make_system, system_from_rows

FIELD_SIZES = (2, 3, 4, 5)


def field_of_size(q: int) -> FieldSpec:
    """F_q with the built-in modulus when q is a prime power."""
    factors = prime_factors(q)
    if len(factors) != 1:
        raise ValueError(f"{q} is not a prime power")
    p = factors[0]
    e = 0
    while q > 1:
        q //= p
        e += 1
    return make_field(p, e)


# -------------------------------------------------------------------------
# (X1 X2 + X5 X6 X7)(X3 X4 + X5 X6 X7) = a, n = 7
# -------------------------------------------------------------------------
SHARED_CUBE_BLOCKS = ((0, 1), (2, 3), (4, 5, 6))
SHARED_CUBE_A = ((1, 0, 1), (0, 1, 1))


def shared_cube_system(field: FieldSpec) -> SystemSpec:
    return system_from_rows(field, SHARED_CUBE_BLOCKS, SHARED_CUBE_A)


def shared_cube_zero_count(q: int) -> int:
    return 2 * q ** 6 + 3 * q ** 5 - 13 * q ** 4 + 16 * q ** 3 - 9 * q ** 2 + 2 * q


def shared_cube_square_count(q: int) -> int:
    """Count for a nonzero square target; valid for odd q only."""
    return (q - 1) ** 2 * q * (q ** 3 + q ** 2 - 2 * q + 2)


def shared_cube_nonsquare_count(q: int) -> int:
    """Count for a non-square target (odd q)."""
    return (q - 1) ** 3 * q * (q ** 2 + 2 * q - 2)


# -------------------------------------------------------------------------
# (X1 + X6 X7 X8)(X1 + X2 X3 + X6 X7 X8)(X2 X3 + X4 X5) = a, n = 8
# -------------------------------------------------------------------------
THREE_FACTOR_BLOCKS = ((0,), (1, 2), (3, 4), (5, 6, 7))
THREE_FACTOR_A = ((1, 0, 0, 1), (1, 1, 0, 1), (0, 1, 1, 0))


def three_factor_system(field: FieldSpec) -> SystemSpec:
    return system_from_rows(field, THREE_FACTOR_BLOCKS, THREE_FACTOR_A)


def three_factor_zero_count(q: int) -> int:
    return 3 * q ** 7 - 3 * q ** 6 + q ** 3 * (2 * q ** 2 - 2 * q + 1)


def three_factor_nonzero_count(field: FieldSpec, a: int) -> int:
    """q^3 sum_{a1, a2 in F_q*} (q + kappa(a2 - a1)) (q + kappa(a1 - a2 + a / (a1 a2)))."""
    f, q = field, field.q
    total = 0
    for a1 in range(1, q):
        for a2 in range(1, q):
            left = q + f.kappa(f.sub(a2, a1))
            right = q + f.kappa(f.add(f.sub(a1, a2), f.div(a, f.mul(a1, a2))))
            total += left * right
    return q ** 3 * total


# -------------------------------------------------------------------------
# Random instances
# -------------------------------------------------------------------------
def random_blocks(rng: random.Random, n: int, m: int) -> List[List[int]]:
    """A random partition of 0..n-1 into m nonempty blocks."""
    order = list(range(n))
    rng.shuffle(order)
    cuts = sorted(rng.sample(range(1, n), m - 1))
    bounds = [0] + cuts + [n]
    return [sorted(order[bounds[j]:bounds[j + 1]]) for j in range(m)]


def random_full_rank(rng: random.Random, field: FieldSpec, k: int, m: int) -> List[List[int]]:
    while True:
        rows = [[rng.randrange(field.q) for _ in range(m)] for _ in range(k)]
        if rank(MatrixFq.from_rows(field, rows, m)) == k:
            return rows


def _max_n(q: int, max_bits: Optional[int], n_max: int) -> int:
    if max_bits is None:
        return n_max
    n = n_max
    while n > 1 and q ** n > 1 << max_bits:
        n -= 1
    return n


def random_system(rng: random.Random, field: Optional[FieldSpec] = None, n_max: int = 10, m_max: int = 4,
                  k_max: int = 3, max_bits: Optional[int] = None) -> SystemSpec:
    """
    A random formula-path system with k <= m <= n.

    Args:
        rng: Source of randomness.
        field: Field to use; drawn from FIELD_SIZES when omitted.
        n_max: Largest n.
        m_max: Largest number of blocks.
        k_max: Largest number of forms.
        max_bits: Keep q^n <= 2^max_bits when given.
    """
    if field is None:
        field = field_of_size(rng.choice(FIELD_SIZES))
    n_cap = _max_n(field.q, max_bits, n_max)
    n = rng.randint(1, n_cap)
    m = rng.randint(1, min(m_max, n))
    k = rng.randint(1, min(k_max, m))
    blocks = random_blocks(rng, n, m)
    A = MatrixFq.from_rows(field, random_full_rank(rng, field, k, m), m)
    return make_system(field, make_partition(n, blocks), A)


def random_square_system(rng: random.Random, field: FieldSpec, m_max: int = 3, n_max: int = 8,
                         max_bits: Optional[int] = None) -> SystemSpec:
    """m = k with invertible A."""
    n_cap = _max_n(field.q, max_bits, n_max)
    m = rng.randint(1, min(m_max, n_cap))
    n = rng.randint(m, n_cap)
    blocks = random_blocks(rng, n, m)
    return system_from_rows(field, blocks, random_full_rank(rng, field, m, m))


def random_diagonal_system(rng: random.Random, field: FieldSpec, k_max: int = 2, n_max: int = 8,
                           max_bits: Optional[int] = None) -> SystemSpec:
    """m = 2k and A = (D_1 D_2) with random invertible diagonal D_1, D_2."""
    n_cap = _max_n(field.q, max_bits, n_max)
    k = rng.randint(1, max(1, min(k_max, n_cap // 2)))
    n = rng.randint(2 * k, max(2 * k, n_cap))
    blocks = random_blocks(rng, n, 2 * k)
    rows = [[0] * (2 * k) for _ in range(k)]
    for i in range(k):
        rows[i][i] = rng.randrange(1, field.q)
        rows[i][k + i] = rng.randrange(1, field.q)
    return system_from_rows(field, blocks, rows)


def random_pair_system(rng: random.Random, field: FieldSpec, m_max: int = 4, n_max: int = 8,
                       max_bits: Optional[int] = None) -> SystemSpec:
    """k = 2, m >= 2."""
    n_cap = max(2, _max_n(field.q, max_bits, n_max))
    m = rng.randint(2, min(m_max, n_cap))
    n = rng.randint(m, n_cap)
    blocks = random_blocks(rng, n, m)
    return system_from_rows(field, blocks, random_full_rank(rng, field, 2, m))


def random_multi_choice_system(rng: random.Random, field: FieldSpec, m_max: int = 4, n_max: int = 8,
                               max_bits: Optional[int] = None) -> SystemSpec:
    """A system whose full row set admits at least two invertible column choices."""
    if _max_n(field.q, max_bits, n_max) < 2 or m_max < 2:
        raise ValueError("Need room for two blocks to have a choice of columns")
    while True:
        sys = random_system(rng, field, n_max, m_max, 3, max_bits)
        if len(valid_column_sets(sys.A, range(sys.k))) >= 2:
            return sys
