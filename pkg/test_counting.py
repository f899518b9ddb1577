"""
Tests for the formula-path counts and the count dispatcher.

Randomized checks compare against the brute-force oracle on instances small
enough to enumerate.
"""
import random
from pathlib import Path

import pytest

import fixtures
from counting import (
    BlockDistribution,
    ZeroTarget,
    block_distribution,
    block_product_count,
    count,
    count_pair,
    count_product_nonzero,
    count_product_zero,
    count_single,
    count_special_diag,
    count_special_mk,
    count_system,
    count_system_pointwise,
    factorizations,
    matches_diagonal_shape,
    matches_square_shape,
    value_distribution,
)
from exactla import RankDeficient, ShapeMismatch, valid_column_sets
from gf import make_field
from model import DimensionError, RankError, make_query, parse_problem, system_from_rows
from oracle import OracleTooLarge, brute_count, brute_count_system, value_distribution as oracle_distribution

PROBLEMS = Path(__file__).parent / "problems"
F2, F3, F4, F5 = make_field(2), make_field(3), make_field(2, 2), make_field(5)


# ---------------------------------------------------------
# Blocks and single forms
# ---------------------------------------------------------
@pytest.mark.parametrize("q", fixtures.FIELD_SIZES)
@pytest.mark.parametrize("d", [1, 2, 3, 4])
def test_block_counts_partition_the_cube(q, d):
    field = fixtures.field_of_size(q)
    dist = block_distribution(d, field)
    assert dist.count_zero + (q - 1) * dist.count_each_nonzero == q ** d
    assert dist.count_zero == q ** d - (q - 1) ** d


def test_block_product_count_values():
    assert block_product_count(1, True, F5) == 1
    assert block_product_count(1, False, F5) == 1
    assert block_product_count(2, True, F3) == 5
    assert block_product_count(2, False, F3) == 2
    assert block_distribution(3, F2) == BlockDistribution(3, 2, 7, 1)
    with pytest.raises(ShapeMismatch):
        block_product_count(0, True, F3)


def test_count_single():
    sys = fixtures.shared_cube_system(F2)
    # X1 X2 + X5 X6 X7 over F_2: 64 + 8 * 1 * 3 zeros
    assert count_single(sys, 0, 0) == 88
    assert count_single(sys, 0, 1) == 40
    assert count_single(sys, 1, 0) == 88


def test_count_single_zero_row():
    sys = system_from_rows(F3, [[0], [1, 2]], [[0, 0]], relaxed=True)
    assert count_single(sys, 0, 0) == 27
    assert count_single(sys, 0, 2) == 0


@pytest.mark.parametrize("seed", range(8))
def test_count_single_matches_oracle(seed):
    rng = random.Random(seed)
    sys = fixtures.random_system(rng, max_bits=10)
    for i in range(sys.k):
        row = sys.rows([i])
        brute = oracle_distribution(row)
        for a in range(sys.q):
            assert count_single(sys, i, a) == brute[a]


# ---------------------------------------------------------
# Systems of forms
# ---------------------------------------------------------
def test_count_system_shared_cube():
    sys = fixtures.shared_cube_system(F2)
    assert count_system(sys, [], []) == 128
    assert count_system(sys, [0, 1], [0, 0]) == brute_count_system(sys, [0, 1], [0, 0])
    assert count_system(sys, [1, 0], [1, 0]) == count_system(sys, [0, 1], [0, 1])


def test_count_system_errors():
    sys = fixtures.shared_cube_system(F3)
    with pytest.raises(ShapeMismatch):
        count_system(sys, [0, 1], [0])
    relaxed = system_from_rows(F2, [[0, 1], [2, 3], [4, 5, 6]], [[1, 0, 1], [1, 0, 1]], relaxed=True)
    with pytest.raises(RankDeficient):
        count_system(relaxed, [0, 1], [0, 0])


@pytest.mark.parametrize("seed", range(10))
def test_count_system_matches_oracle(seed):
    rng = random.Random(100 + seed)
    sys = fixtures.random_system(rng, max_bits=10)
    for size in range(1, sys.k + 1):
        rows = sorted(rng.sample(range(sys.k), size))
        b = [rng.randrange(sys.q) for _ in rows]
        expected = brute_count_system(sys, rows, b)
        assert count_system(sys, rows, b) == expected
        assert count_system_pointwise(sys, rows, b) == expected


@pytest.mark.parametrize("seed", range(10))
def test_count_system_independent_of_column_choice(seed):
    rng = random.Random(200 + seed)
    field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
    sys = fixtures.random_multi_choice_system(rng, field, max_bits=12)
    rows = list(range(sys.k))
    b = [rng.randrange(sys.q) for _ in rows]
    counts = {count_system(sys, rows, b, cols) for cols in valid_column_sets(sys.A, rows)}
    assert len(counts) == 1


# ---------------------------------------------------------
# Products of forms: worked examples
# ---------------------------------------------------------
@pytest.mark.parametrize("q,expected", [(2, 112), (3, 1491), (4, 8824), (5, 34285)])
def test_shared_cube_zero(q, expected):
    sys = fixtures.shared_cube_system(fixtures.field_of_size(q))
    assert fixtures.shared_cube_zero_count(q) == expected
    assert count_product_zero(sys) == expected


def test_shared_cube_nonzero_odd_q():
    sys3 = fixtures.shared_cube_system(F3)
    assert count_product_nonzero(sys3, 1) == 384
    assert count_product_nonzero(sys3, 2) == 312
    sys5 = fixtures.shared_cube_system(F5)
    for a in (1, 4):
        assert count_product_nonzero(sys5, a) == fixtures.shared_cube_square_count(5) == 11360
    for a in (2, 3):
        assert count_product_nonzero(sys5, a) == fixtures.shared_cube_nonsquare_count(5) == 10560


def test_shared_cube_characteristic_two():
    # The nonzero-square closed form assumes odd q and is off at q = 2
    sys = fixtures.shared_cube_system(F2)
    assert count_product_nonzero(sys, 1) == 16
    assert fixtures.shared_cube_square_count(2) == 20
    sys4 = fixtures.shared_cube_system(F4)
    assert sum(count_product_nonzero(sys4, a) for a in range(1, 4)) == 4 ** 7 - 8824 == 7560


@pytest.mark.parametrize("q,expected", [(2, 232), (3, 4725)])
def test_three_factor_zero(q, expected):
    sys = fixtures.three_factor_system(fixtures.field_of_size(q))
    assert fixtures.three_factor_zero_count(q) == expected
    assert count_product_zero(sys) == expected


@pytest.mark.parametrize("q", [2, 3])
def test_three_factor_nonzero(q):
    field = fixtures.field_of_size(q)
    sys = fixtures.three_factor_system(field)
    for a in range(1, q):
        assert count_product_nonzero(sys, a) == fixtures.three_factor_nonzero_count(field, a)
    if q == 2:
        assert count_product_nonzero(sys, 1) == 24


@pytest.mark.parametrize("q,expected", [(2, {0: 232, 1: 24}), (3, {0: 4725, 1: 918, 2: 918})])
def test_three_factor_matches_oracle(q, expected):
    sys = fixtures.three_factor_system(fixtures.field_of_size(q))
    assert oracle_distribution(sys) == expected
    assert value_distribution(sys) == expected


def test_factorizations():
    tuples = factorizations(F5, 3, 3)
    assert len(tuples) == 16
    for t in tuples:
        assert F5.mul(F5.mul(t[0], t[1]), t[2]) == 3
    assert factorizations(F5, 2, 1) == [(2,)]


def test_nonzero_count_rejects_zero_target():
    sys = fixtures.shared_cube_system(F3)
    with pytest.raises(ZeroTarget):
        count_product_nonzero(sys, 0)
    with pytest.raises(ZeroTarget):
        count_special_mk(system_from_rows(F3, [[0], [1]], [[1, 1], [1, 2]]), 0)


def test_rank_deficient_systems_are_refused():
    query = parse_problem((PROBLEMS / "rank_deficient_q2.json").read_bytes(), require_rank=False)
    with pytest.raises(RankDeficient):
        count_product_zero(query.system)
    with pytest.raises(RankDeficient):
        count_product_nonzero(query.system, 1)


# ---------------------------------------------------------
# Products of forms: randomized against the oracle
# ---------------------------------------------------------
@pytest.mark.parametrize("seed", range(15))
def test_value_distribution_matches_oracle(seed):
    rng = random.Random(300 + seed)
    sys = fixtures.random_system(rng, max_bits=10)
    formula = value_distribution(sys)
    assert formula == oracle_distribution(sys)
    assert sum(formula.values()) == sys.q ** sys.n


@pytest.mark.parametrize("seed", range(5))
def test_conservation_without_oracle(seed):
    rng = random.Random(400 + seed)
    sys = fixtures.random_system(rng, n_max=14)
    assert sum(value_distribution(sys).values()) == sys.q ** sys.n


# ---------------------------------------------------------
# Special shapes and the pair formula
# ---------------------------------------------------------
def test_shape_detection():
    square = system_from_rows(F3, [[0], [1, 2]], [[1, 2], [2, 2]])
    assert matches_square_shape(square)
    assert not matches_diagonal_shape(square)
    diagonal = system_from_rows(F3, [[0], [1], [2], [3]], [[1, 0, 2, 0], [0, 2, 0, 1]])
    assert matches_diagonal_shape(diagonal)
    assert not matches_square_shape(diagonal)
    assert not matches_diagonal_shape(fixtures.shared_cube_system(F3))


def test_diagonal_single_form():
    # X1 X2 + X3 X4 over F_2
    sys = system_from_rows(F2, [[0, 1], [2, 3]], [[1, 1]])
    assert count_special_diag(sys, 1) == 6
    assert count_special_diag(sys, 0) == 10


def test_special_shape_errors():
    with pytest.raises(ShapeMismatch):
        count_special_diag(fixtures.shared_cube_system(F3), 0)
    with pytest.raises(ShapeMismatch):
        count_special_mk(fixtures.shared_cube_system(F3), 1)
    with pytest.raises(ShapeMismatch):
        count_pair(fixtures.three_factor_system(F3), 1)


@pytest.mark.parametrize("seed", range(10))
def test_square_formula(seed):
    rng = random.Random(500 + seed)
    field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
    sys = fixtures.random_square_system(rng, field, max_bits=10)
    brute = oracle_distribution(sys)
    for a in range(1, sys.q):
        assert count_special_mk(sys, a) == count_product_nonzero(sys, a) == brute[a]


@pytest.mark.parametrize("seed", range(10))
def test_diagonal_formula(seed):
    rng = random.Random(600 + seed)
    field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
    sys = fixtures.random_diagonal_system(rng, field, max_bits=10)
    brute = oracle_distribution(sys)
    for a in range(sys.q):
        assert count_special_diag(sys, a) == brute[a]


@pytest.mark.parametrize("seed", range(10))
def test_pair_formula(seed):
    rng = random.Random(700 + seed)
    field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
    sys = fixtures.random_pair_system(rng, field, max_bits=10)
    brute = oracle_distribution(sys)
    for a in range(sys.q):
        assert count_pair(sys, a) == brute[a]


# ---------------------------------------------------------
# Dispatcher
# ---------------------------------------------------------
def test_dispatch_labels():
    sys = fixtures.shared_cube_system(F3)
    value, method, ns = count(make_query(sys, 0))
    assert (value, method) == (1491, "general-IE")
    assert ns >= 0
    assert count(make_query(sys, 1))[:2] == (384, "general-factor")
    assert count(make_query(sys, 2), "oracle")[:2] == (312, "oracle")

    square = parse_problem((PROBLEMS / "square_q4.json").read_bytes())
    value, method, _ = count(square)
    assert method == "special-mk"
    assert value == brute_count(square)

    diagonal = system_from_rows(F2, [[0, 1], [2, 3]], [[1, 1]])
    assert count(make_query(diagonal, 1))[:2] == (6, "special-diag")
    assert count(make_query(diagonal, 0), "general")[:2] == (10, "general-IE")


def test_dispatch_special_requires_shape():
    sys = fixtures.shared_cube_system(F3)
    with pytest.raises(ShapeMismatch):
        count(make_query(sys, 1), "special")
    with pytest.raises(ValueError):
        count(make_query(sys, 1), "fastest")


def test_auto_rejects_invalid_systems():
    query = parse_problem((PROBLEMS / "rank_deficient_q2.json").read_bytes(), require_rank=False)
    with pytest.raises(RankError):
        count(query)
    assert count(query, "oracle")[:2] == (88, "oracle")
    with pytest.raises(RankDeficient):
        count(query, "general")


def test_auto_never_enumerates():
    # rank 1 < k = 2 over 3^30 points: a rank error, not an oracle refusal
    big = system_from_rows(F3, [list(range(15)), list(range(15, 30))], [[1, 0], [2, 0]], relaxed=True)
    with pytest.raises(RankError):
        count(make_query(big, 0))
    wide = system_from_rows(F3, [[0, 1]], [[1], [2]], relaxed=True)
    with pytest.raises(DimensionError):
        count(make_query(wide, 1))


def test_oracle_guard():
    big = system_from_rows(F3, [list(range(30))], [[1]])
    with pytest.raises(OracleTooLarge):
        count(make_query(big, 0), "oracle")
    # the formula path has no size limit
    assert count(make_query(big, 0))[0] == 3 ** 30 - 2 ** 30


@pytest.mark.parametrize("path", ["shared_cube_q3.json", "three_factor_q3.json", "square_q4.json"])
def test_thread_counts_agree(path):
    query = parse_problem((PROBLEMS / path).read_bytes())
    single = count(query, "general", threads=1)[0]
    assert count(query, "general", threads=3)[0] == single
    assert count(query, "oracle", threads=3)[0] == single
