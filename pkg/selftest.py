"""
Self-test suites: the worked examples against their closed forms, and
randomized property checks of the formula path against the oracle and
against itself.

Each suite returns a tally; a failing check keeps the full problem JSON so
the instance can be rerun with ``mlcount.py count``.
"""
import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, Dict, List, Optional, Tuple

from tqdm import tqdm

import fixtures
from codes import (
    codeword_weight,
    codeword_weight_oracle,
    enumerate_subspaces,
    gaussian_binomial,
    make_code,
    min_distance,
    wei_weight,
    weight_hierarchy,
)
from counting import (
    count_pair,
    count_product_nonzero,
    count_product_zero,
    count_special_diag,
    count_special_mk,
    count_system,
    count_system_pointwise,
    value_distribution,
)
from exactla import valid_column_sets
from gf import MlcountError, is_square
from model import SystemSpec, make_query, make_system, problem_to_json
from oracle import brute_count_system, value_distribution as oracle_distribution

DEFAULT_MAX_BITS = 14
ORACLE_SUITE_MAX_BITS = 20
DEFAULT_SEED = 20060301
RANDOM_INSTANCES = 200
SHAPE_INSTANCES = 50
CODE_INSTANCES = 30


@dataclass
class SuiteResult:
    name: str
    checked: int = 0
    failures: List[Dict[str, object]] = dc_field(default_factory=list)
    notes: List[str] = dc_field(default_factory=list)

    @property
    def passed(self) -> int:
        return self.checked - len(self.failures)

    @property
    def ok(self) -> bool:
        return not self.failures

    def check(self, condition: bool, sys: Optional[SystemSpec], a: int, detail: str) -> None:
        self.checked += 1
        if not condition:
            self.fail(sys, a, detail)

    def fail(self, sys: Optional[SystemSpec], a: int, detail: str) -> None:
        record: Dict[str, object] = {"suite": self.name, "detail": detail}
        if sys is not None:
            record["problem"] = problem_to_json(make_query(sys, a))
        self.failures.append(record)


def _fits(sys: SystemSpec, max_bits: int) -> bool:
    return sys.q ** sys.n <= 1 << max_bits


def suite_shared_cube(max_bits: int, threads: int) -> SuiteResult:
    """Two forms sharing the cubic block, n = 7, at q in {2, 3, 5, 7}."""
    result = SuiteResult("shared-cube")
    for q in (2, 3, 5, 7):
        field = fixtures.field_of_size(q)
        sys = fixtures.shared_cube_system(field)
        dist = value_distribution(sys, threads)
        result.check(dist[0] == fixtures.shared_cube_zero_count(q), sys, 0,
                     f"q={q}: N(f,0) = {dist[0]}, closed form {fixtures.shared_cube_zero_count(q)}")
        result.check(sum(dist.values()) == q ** 7, sys, 0, f"q={q}: counts do not sum to q^7")
        for a in range(1, q):
            if q % 2 == 1:
                expected = (fixtures.shared_cube_square_count(q) if is_square(field.element(a))
                            else fixtures.shared_cube_nonsquare_count(q))
                result.check(dist[a] == expected, sys, a, f"q={q}: N(f,{a}) = {dist[a]}, closed form {expected}")
        if q % 2 == 0:
            result.notes.append(
                f"q={q}: the nonzero-square closed form gives {fixtures.shared_cube_square_count(q)}, "
                f"the count is {dist[1]}; the form assumes odd q"
            )
        if _fits(sys, max_bits):
            brute = oracle_distribution(sys, threads=threads)
            result.check(brute == dist, sys, 0, f"q={q}: oracle distribution {brute} != {dist}")
    return result


def suite_three_factor(max_bits: int, threads: int) -> SuiteResult:
    """Three forms, n = 8, at q in {2, 3}."""
    result = SuiteResult("three-factor")
    for q in (2, 3):
        field = fixtures.field_of_size(q)
        sys = fixtures.three_factor_system(field)
        dist = value_distribution(sys, threads)
        result.check(dist[0] == fixtures.three_factor_zero_count(q), sys, 0,
                     f"q={q}: N(f,0) = {dist[0]}, closed form {fixtures.three_factor_zero_count(q)}")
        for a in range(1, q):
            expected = fixtures.three_factor_nonzero_count(field, a)
            result.check(dist[a] == expected, sys, a, f"q={q}: N(f,{a}) = {dist[a]}, double sum {expected}")
        if _fits(sys, max_bits):
            brute = oracle_distribution(sys, threads=threads)
            result.check(brute == dist, sys, 0, f"q={q}: oracle distribution {brute} != {dist}")
    return result


def suite_conservation(rng: random.Random, threads: int, instances: int = RANDOM_INSTANCES) -> SuiteResult:
    result = SuiteResult("conservation")
    for _ in range(instances):
        sys = fixtures.random_system(rng)
        total = sum(value_distribution(sys, threads).values())
        result.check(total == sys.q ** sys.n, sys, 0, f"sum over a is {total}, expected {sys.q ** sys.n}")
    return result


def suite_oracle(rng: random.Random, max_bits: int, threads: int, instances: int = RANDOM_INSTANCES) -> SuiteResult:
    """Formula distribution against brute force on random systems with q^n <= 2^max_bits."""
    result = SuiteResult("oracle")
    for _ in range(instances):
        sys = fixtures.random_system(rng, max_bits=max_bits)
        formula = value_distribution(sys, threads)
        brute = oracle_distribution(sys, max_bits, threads=threads)
        for a in range(sys.q):
            result.check(formula[a] == brute[a], sys, a, f"formula {formula[a]} != oracle {brute[a]}")
    return result


def suite_submatrix(rng: random.Random, threads: int, instances: int = SHAPE_INSTANCES) -> SuiteResult:
    """Same system count for every invertible column choice, collapsed or pointwise."""
    result = SuiteResult("submatrix-invariance")
    for _ in range(instances):
        field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
        sys = fixtures.random_multi_choice_system(rng, field, max_bits=12)
        rows = list(range(sys.k))
        b = [rng.randrange(sys.q) for _ in rows]
        counts = {cols: count_system(sys, rows, b, cols, threads) for cols in valid_column_sets(sys.A, rows)}
        pointwise = count_system_pointwise(sys, rows, b)
        values = set(counts.values()) | {pointwise}
        result.check(len(values) == 1, sys, 0, f"b={b}: counts by column choice {counts}, pointwise {pointwise}")
    return result


def suite_special(rng: random.Random, max_bits: int, threads: int, instances: int = SHAPE_INSTANCES) -> SuiteResult:
    result = SuiteResult("special-shapes")
    for _ in range(instances):
        field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
        sys = fixtures.random_square_system(rng, field, max_bits=max_bits)
        brute = oracle_distribution(sys, max_bits, threads=threads) if _fits(sys, max_bits) else None
        for a in range(1, sys.q):
            special = count_special_mk(sys, a)
            general = count_product_nonzero(sys, a, threads)
            result.check(special == general, sys, a, f"square formula {special} != general {general}")
            if brute is not None:
                result.check(special == brute[a], sys, a, f"square formula {special} != oracle {brute[a]}")
    for _ in range(instances):
        field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
        sys = fixtures.random_diagonal_system(rng, field, max_bits=max_bits)
        brute = oracle_distribution(sys, max_bits, threads=threads) if _fits(sys, max_bits) else None
        for a in range(sys.q):
            special = count_special_diag(sys, a)
            general = count_product_zero(sys, threads) if a == 0 else count_product_nonzero(sys, a, threads)
            result.check(special == general, sys, a, f"diagonal formula {special} != general {general}")
            if brute is not None:
                result.check(special == brute[a], sys, a, f"diagonal formula {special} != oracle {brute[a]}")
    return result


def suite_pair(rng: random.Random, threads: int, instances: int = SHAPE_INSTANCES) -> SuiteResult:
    result = SuiteResult("pair")
    for _ in range(instances):
        field = fixtures.field_of_size(rng.choice(fixtures.FIELD_SIZES))
        sys = fixtures.random_pair_system(rng, field)
        for a in range(sys.q):
            pair = count_pair(sys, a)
            general = count_product_zero(sys, threads) if a == 0 else count_product_nonzero(sys, a, threads)
            result.check(pair == general, sys, a, f"pair formula {pair} != general {general}")
    return result


def suite_codes(rng: random.Random, max_bits: int, threads: int, instances: int = CODE_INSTANCES) -> SuiteResult:
    """Minimum distance, hierarchy monotonicity and Wei weights on small codes."""
    result = SuiteResult("codes")
    for _ in range(instances):
        q = rng.choice(fixtures.FIELD_SIZES)
        field = fixtures.field_of_size(q)
        m = rng.randint(1, 3)
        while q ** m > 1 << 12:
            m -= 1
        n = rng.randint(m, max(m, 6))
        code = make_code(field, fixtures.random_blocks(rng, n, m))
        label = f"q={q}, blocks={code.partition.to_json()}"

        weights = []
        for line in enumerate_subspaces(m, 1, field):
            coeffs = list(line.rows.row(0))
            weight = codeword_weight(code, coeffs)
            weights.append(weight)
            if code.length <= 1 << max_bits:
                brute = codeword_weight_oracle(code, coeffs)
                result.check(weight == brute, None, 0, f"{label}: word {coeffs} weight {weight}, oracle {brute}")
        exhaustive = min(weights)
        result.check(exhaustive == min_distance(code), None, 0,
                     f"{label}: min weight {exhaustive}, formula {min_distance(code)}")

        for h in range(1, m + 1):
            bases = list(enumerate_subspaces(m, h, field))
            result.check(len(bases) == gaussian_binomial(m, h, q), None, 0,
                         f"{label}: {len(bases)} subspaces of dimension {h}")

        hierarchy = weight_hierarchy(code, threads)
        increasing = all(x < y for x, y in zip(hierarchy, hierarchy[1:]))
        result.check(increasing and hierarchy[0] == min_distance(code), None, 0,
                     f"{label}: hierarchy {hierarchy}")

        if code.length <= 1 << max_bits:
            basis = next(iter(enumerate_subspaces(m, m, field)))
            sys = make_system(field, code.partition, basis.rows)
            common = brute_count_system(sys, range(m), [0] * m)
            result.check(wei_weight(code, basis) == code.length - common, sys, 0,
                         f"{label}: whole-code Wei weight")
    return result


def run_selftest(max_bits: int = DEFAULT_MAX_BITS, seed: int = DEFAULT_SEED, threads: int = 1,
                 progress: bool = False, oracle_bits: int = ORACLE_SUITE_MAX_BITS) -> List[SuiteResult]:
    """
    Run every suite and return their tallies.

    Args:
        max_bits: Oracle-backed checks only run where q^n <= 2^max_bits.
        oracle_bits: Size cap for the randomized formula-against-oracle
            instances, which is the costliest suite.
        seed: Seed for the randomized suites; equal seeds give equal instances.
        threads: Workers for the counting and oracle reductions.
        progress: Show a tqdm bar over the suites.
    """
    rng = random.Random(seed)
    suites: List[Tuple[str, Callable[[], SuiteResult]]] = [
        ("shared-cube", lambda: suite_shared_cube(max_bits, threads)),
        ("three-factor", lambda: suite_three_factor(max_bits, threads)),
        ("conservation", lambda: suite_conservation(rng, threads)),
        ("oracle", lambda: suite_oracle(rng, oracle_bits, threads)),
        ("submatrix-invariance", lambda: suite_submatrix(rng, threads)),
        ("special-shapes", lambda: suite_special(rng, max_bits, threads)),
        ("pair", lambda: suite_pair(rng, threads)),
        ("codes", lambda: suite_codes(rng, max_bits, threads)),
    ]
    results = []
    for name, run in tqdm(suites, desc="Self-test suites", disable=not progress):
        try:
            results.append(run())
        except MlcountError as e:
            crashed = SuiteResult(name)
            crashed.checked = 1
            crashed.fail(None, 0, f"{type(e).__name__}: {e}")
            results.append(crashed)
    return results
