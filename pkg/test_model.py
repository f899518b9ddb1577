"""
Tests for partitions, systems and the problem file format.
"""
import json
from pathlib import Path

import pytest

from gf import SchemaError, make_field
from model import (
    PROBLEM_KEYS,
    DimensionError,
    PartitionError,
    RankError,
    block_products,
    evaluate,
    make_partition,
    make_query,
    parse_problem,
    problem_to_json,
    serialize_problem,
    system_from_rows,
    validate_system,
)

PROBLEMS = Path(__file__).parent / "problems"

SHARED_CUBE = {
    "field": {"p": 3, "e": 1},
    "n": 7,
    "partition": [[1, 2], [3, 4], [5, 6, 7]],
    "A": [[1, 0, 1], [0, 1, 1]],
    "a": 0,
}


def problem_text(**overrides):
    doc = dict(SHARED_CUBE)
    doc.update(overrides)
    return json.dumps(doc)


# ---------------------------------------------------------
# Partitions
# ---------------------------------------------------------
def test_make_partition_sorts_blocks():
    P = make_partition(5, [[3, 1], [0], [4, 2]])
    assert P.blocks == ((1, 3), (0,), (2, 4))
    assert P.m == 3
    assert P.block_sizes == (2, 1, 2)
    assert P.max_block_size == 2
    assert P.to_json() == [[2, 4], [1], [3, 5]]


def test_make_partition_one_based():
    P = make_partition(3, [[1, 2], [3]], one_based=True)
    assert P.blocks == ((0, 1), (2,))


@pytest.mark.parametrize("n,blocks", [
    (3, [[0, 1], [1, 2]]),   # overlap
    (4, [[0, 1], [2]]),      # variable 3 not covered
    (3, [[0, 1], [], [2]]),  # empty block
    (3, [[0, 1], [3]]),      # out of range
    (3, []),
    (0, [[0]]),
])
def test_make_partition_rejects(n, blocks):
    with pytest.raises(PartitionError):
        make_partition(n, blocks)


# ---------------------------------------------------------
# Systems
# ---------------------------------------------------------
def test_system_properties():
    F3 = make_field(3)
    sys = system_from_rows(F3, [[0, 1], [2, 3], [4, 5, 6]], [[1, 0, 1], [0, 1, 1]])
    assert (sys.k, sys.m, sys.n, sys.q) == (2, 3, 7, 3)
    assert sys.rows([1]).A.to_rows() == [[0, 1, 1]]
    assert validate_system(sys) == []


def test_rank_and_dimension_errors():
    F2 = make_field(2)
    with pytest.raises(RankError):
        system_from_rows(F2, [[0], [1]], [[1, 1], [1, 1]])
    with pytest.raises(RankError):
        system_from_rows(F2, [[0], [1]], [[1, 0], [0, 0]])
    with pytest.raises(DimensionError):
        system_from_rows(F2, [[0], [1]], [[1, 0], [0, 1], [1, 1]])


def test_validate_system_relaxed_reports_warnings():
    F2 = make_field(2)
    sys = system_from_rows(F2, [[0], [1]], [[1, 0], [0, 0], [1, 0]], relaxed=True)
    report = validate_system(sys, require_rank=False)
    assert {d.error for d in report} == {"DimensionError", "RankError"}
    assert all(d.level == "warning" for d in report)
    assert all(d.level == "error" for d in validate_system(sys))


def test_evaluate_shares_block_products():
    F3 = make_field(3)
    sys = system_from_rows(F3, [[0, 1], [2, 3], [4, 5, 6]], [[1, 0, 1], [0, 1, 1]])
    point = [1, 2, 2, 2, 1, 1, 2]
    assert block_products(sys, point) == [2, 1, 2]
    # f_1 = 2 + 2, f_2 = 1 + 2
    assert evaluate(sys, point) == (1, 0)
    with pytest.raises(SchemaError):
        evaluate(sys, point[:-1])


def test_make_query_accepts_ints_and_elements():
    F5 = make_field(5)
    sys = system_from_rows(F5, [[0], [1]], [[1, 1]])
    assert make_query(sys, 3).target.index == 3
    assert make_query(sys, F5.element(4)).target.index == 4


# ---------------------------------------------------------
# Problem files
# ---------------------------------------------------------
def test_parse_problem_file():
    query = parse_problem((PROBLEMS / "shared_cube_q3.json").read_bytes())
    sys = query.system
    assert sys.q == 3
    assert sys.partition.blocks == ((0, 1), (2, 3), (4, 5, 6))
    assert sys.A.to_rows() == [[1, 0, 1], [0, 1, 1]]
    assert query.target.index == 0


def test_parse_problem_extension_field():
    query = parse_problem((PROBLEMS / "square_q4.json").read_bytes())
    assert (query.system.field.p, query.system.field.e) == (2, 2)
    assert query.target.index == 2


def test_serialize_problem_round_trip_is_canonical():
    shuffled = problem_text(partition=[[2, 1], [4, 3], [7, 5, 6]])
    query = parse_problem(shuffled)
    text = serialize_problem(query)
    assert json.loads(text)["partition"] == [[1, 2], [3, 4], [5, 6, 7]]
    assert list(json.loads(text)) == sorted(PROBLEM_KEYS)
    assert serialize_problem(parse_problem(text)) == text
    assert problem_to_json(query)["field"] == {"p": 3, "e": 1}


@pytest.mark.parametrize("text", [
    "{not json",
    "[1, 2]",
    problem_text(extra=1),
    json.dumps({k: v for k, v in SHARED_CUBE.items() if k != "a"}),
    problem_text(a=3),
    problem_text(a=-1),
    problem_text(a=True),
    problem_text(n="7"),
    problem_text(A=[[1, 0], [0, 1]]),
    problem_text(A=[[1, 0, 5], [0, 1, 1]]),
    problem_text(A=[[1, 0, 1.5], [0, 1, 1]]),
    problem_text(field={"p": 3, "modulus_degree": 1}),
])
def test_parse_problem_schema_errors(text):
    with pytest.raises(SchemaError):
        parse_problem(text)


def test_parse_problem_partition_errors():
    with pytest.raises(PartitionError):
        parse_problem(problem_text(partition=[[1, 2], [2, 3, 4], [5, 6, 7]]))
    with pytest.raises(PartitionError):
        parse_problem(problem_text(partition=[[0, 1], [2, 3, 4], [5, 6, 7]]))


def test_parse_problem_rank_checks():
    text = (PROBLEMS / "rank_deficient_q2.json").read_bytes()
    with pytest.raises(RankError):
        parse_problem(text)
    relaxed = parse_problem(text, require_rank=False)
    assert relaxed.system.relaxed
    assert validate_system(relaxed.system, require_rank=False)
