"""
Exact solution counts for products of multilinear forms with separated
variables, without enumerating F_q^n.

Every formula is evaluated in Python ints. The rational factors
q^(d-1) (1 - ((q-1)/q)^(d-1)) are always rewritten as the integer
q^(d-1) - (q-1)^(d-1), written z(d) below.

Zero targets go through inclusion-exclusion over row subsets; nonzero
targets through the sum over factorizations a = a_1 ... a_k. Both reduce
to the system count, which sums over the values of the free block
products rather than over the free variables themselves.
"""
import time
from dataclasses import dataclass
from itertools import combinations, product
from typing import Dict, List, Optional, Sequence, Tuple

from exactla import RankDeficient, ShapeMismatch, SubmatrixChoice, choose_submatrix, invert, rank
from gf import FieldSpec, MlcountError, as_index
from model import CountQuery, SystemSpec, check_system
from oracle import DEFAULT_MAX_BITS, OracleTooLarge, brute_count
from parallel import map_chunks

MAX_INCLUSION_EXCLUSION_ROWS = 16
POINTWISE_MAX_POINTS = 1 << 20

METHODS = ("auto", "general", "special", "oracle")


class ZeroTarget(MlcountError):
    """Exception raised when a nonzero-target count is asked for a = 0."""
    exit_code = 3


@dataclass(frozen=True)
class BlockDistribution:
    """How the q^d tuples of one block split by the value of their product."""
    block_size: int
    q: int
    count_zero: int
    count_each_nonzero: int

    def count(self, w_is_zero: bool) -> int:
        return self.count_zero if w_is_zero else self.count_each_nonzero


def z(d: int, q: int) -> int:
    return q ** (d - 1) - (q - 1) ** (d - 1)


def block_product_count(d: int, w_is_zero: bool, field: FieldSpec) -> int:
    """
    Number of (X_1, ..., X_d) in F_q^d with alpha * X_1 ... X_d = w.

    The count depends only on whether w is zero: q^(d-1) + kappa(w) z(d).
    """
    if d < 1:
        raise ShapeMismatch(f"Block size must be at least 1, got {d}")
    q = field.q
    kappa = q - 1 if w_is_zero else -1
    return q ** (d - 1) + kappa * z(d, q)


def block_distribution(d: int, field: FieldSpec) -> BlockDistribution:
    return BlockDistribution(
        block_size=d,
        q=field.q,
        count_zero=block_product_count(d, True, field),
        count_each_nonzero=block_product_count(d, False, field),
    )


def _assert_full_rank(sys: SystemSpec) -> None:
    r = rank(sys.A)
    if r < sys.k:
        raise RankDeficient(f"rank(A) = {r} < k = {sys.k}; use the oracle for this system")


# -------------------------------------------------------------------------
# One form
# -------------------------------------------------------------------------
def count_single(sys: SystemSpec, i: int, a) -> int:
    """
    N(f_i, a) for the single form in row i of A.

    q^(n-1) + kappa(a) q^(n-1) prod_{l: A[i][l] != 0} (1 - ((q-1)/q)^(|J_l|-1)),
    computed as q^(n-1) + kappa(a) q^(n-1-sum(|J_l|-1)) prod z(|J_l|).
    A zero row is the zero polynomial: q^n solutions for a = 0, none otherwise.
    """
    q, n = sys.q, sys.n
    a = as_index(a, sys.field)
    sizes = [sys.partition.block_sizes[l] for l in range(sys.m) if sys.A.get(i, l) != 0]
    if not sizes:
        return q ** n if a == 0 else 0
    zs = 1
    for d in sizes:
        zs *= z(d, q)
    exponent = n - 1 - sum(d - 1 for d in sizes)
    return q ** (n - 1) + sys.field.kappa(a) * q ** exponent * zs


# -------------------------------------------------------------------------
# Systems of forms
# -------------------------------------------------------------------------
class _SystemSum:
    """
    Collapsed sum for N(f_{i_1}, ..., f_{i_l}, b_1, ..., b_l).

    Pivot block products are fixed by B^-1 b - sigma v, where v ranges over
    the values of the m - l free block products, each weighted by the number
    of tuples of its block realising it.
    """

    def __init__(self, sys: SystemSpec, choice: SubmatrixChoice):
        f = sys.field
        sizes = sys.partition.block_sizes
        self.field = f
        self.choice = choice
        self.free = [block_distribution(sizes[j], f) for j in choice.complement_cols]
        self.pivot = [block_distribution(sizes[j], f) for j in choice.col_set]
        # sigma_terms[t][j][v] = sigma[t][j] * v
        self.sigma_terms = [
            [[f.mul(choice.sigma.get(t, j), v) for v in range(f.q)] for j in range(len(self.free))]
            for t in range(choice.l)
        ]

    def forced(self, b: Sequence[int]) -> List[int]:
        f = self.field
        out = []
        for t in range(self.choice.l):
            acc = 0
            for j, bj in enumerate(b):
                acc = f.add(acc, f.mul(self.choice.B_inv.get(t, j), bj))
            out.append(acc)
        return out

    def _term(self, w0: Sequence[int], v: Sequence[int]) -> int:
        f = self.field
        weight = 1
        for dist, vj in zip(self.free, v):
            weight *= dist.count(vj == 0)
        for t, dist in enumerate(self.pivot):
            w = w0[t]
            for j, vj in enumerate(v):
                if vj:
                    w = f.sub(w, self.sigma_terms[t][j][vj])
            weight *= dist.count(w == 0)
        return weight

    def total(self, b: Sequence[int], lead: Optional[int] = None) -> int:
        """Sum over all free values, or only those whose first coordinate is ``lead``."""
        w0 = self.forced(b)
        q = self.field.q
        nfree = len(self.free)
        if nfree == 0:
            return self._term(w0, ())
        if lead is None:
            return sum(self._term(w0, v) for v in product(range(q), repeat=nfree))
        return sum(self._term(w0, (lead,) + rest) for rest in product(range(q), repeat=nfree - 1))


def count_system(sys: SystemSpec, row_set: Sequence[int], b: Sequence, col_set: Optional[Sequence[int]] = None,
                 threads: int = 1) -> int:
    """
    N(f_{i_1}, ..., f_{i_l}, b_1, ..., b_l): common solutions of f_{i_t} = b_t.

    Args:
        sys: The system.
        row_set: 0-based rows i_1 < ... < i_l.
        b: Right-hand sides, as indices or FieldElements.
        col_set: Force the invertible block's columns; the count is the same
            for every valid choice.
        threads: Workers for the sum over free block values.

    Raises:
        RankDeficient: If the rows of row_set are linearly dependent.
        ShapeMismatch: If b and row_set differ in length.
    """
    b = [as_index(bt, sys.field) for bt in b]
    if len(b) != len(row_set):
        raise ShapeMismatch(f"{len(row_set)} rows but {len(b)} right-hand sides")
    if not row_set:
        return sys.q ** sys.n
    order = sorted(range(len(row_set)), key=lambda t: row_set[t])
    rows = [row_set[t] for t in order]
    b = [b[t] for t in order]
    summer = _SystemSum(sys, choose_submatrix(sys.A, rows, col_set))
    if threads <= 1 or not summer.free:
        return summer.total(b)
    return sum(map_chunks(lambda lead: summer.total(b, lead), range(sys.q), threads))


def count_system_pointwise(sys: SystemSpec, row_set: Sequence[int], b: Sequence,
                           col_set: Optional[Sequence[int]] = None,
                           max_points: int = POINTWISE_MAX_POINTS) -> int:
    """
    The same count as count_system, summing over every assignment of the
    free variables instead of over free block values. For cross-checks on
    small instances.

    Raises:
        OracleTooLarge: If the free variables take more than max_points values.
    """
    f = sys.field
    b = [as_index(bt, f) for bt in b]
    if not row_set:
        return sys.q ** sys.n
    order = sorted(range(len(row_set)), key=lambda t: row_set[t])
    rows = [row_set[t] for t in order]
    b = [b[t] for t in order]
    choice = choose_submatrix(sys.A, rows, col_set)
    blocks = sys.partition.blocks
    free_vars = choice.free_support(blocks)
    if sys.q ** len(free_vars) > max_points:
        raise OracleTooLarge(f"{sys.q}^{len(free_vars)} free assignments exceed {max_points}")
    position = {v: i for i, v in enumerate(free_vars)}
    pivot = [block_distribution(len(blocks[j]), f) for j in choice.col_set]

    total = 0
    for x in product(range(sys.q), repeat=len(free_vars)):
        values = []
        for j in choice.complement_cols:
            acc = 1
            for v in blocks[j]:
                acc = f.mul(acc, x[position[v]])
            values.append(acc)
        term = 1
        for t, dist in enumerate(pivot):
            w = 0
            for j, bj in enumerate(b):
                w = f.add(w, f.mul(choice.B_inv.get(t, j), bj))
            for j, vj in enumerate(values):
                w = f.sub(w, f.mul(choice.sigma.get(t, j), vj))
            term *= dist.count(w == 0)
        total += term
    return total


# -------------------------------------------------------------------------
# Products of forms
# -------------------------------------------------------------------------
def count_product_zero(sys: SystemSpec, threads: int = 1) -> int:
    """
    N(f_1 ... f_k, 0) by inclusion-exclusion over nonempty row subsets.

    Single rows use the one-form count; larger subsets use count_system with
    all right-hand sides zero.

    Raises:
        RankDeficient: If rank(A) < k.
        ShapeMismatch: If k exceeds MAX_INCLUSION_EXCLUSION_ROWS.
    """
    _assert_full_rank(sys)
    k = sys.k
    if k > MAX_INCLUSION_EXCLUSION_ROWS:
        raise ShapeMismatch(f"k = {k} exceeds the inclusion-exclusion limit {MAX_INCLUSION_EXCLUSION_ROWS}")
    total = sum(count_single(sys, i, 0) for i in range(k))
    for size in range(2, k + 1):
        layer = sum(count_system(sys, rows, [0] * size, threads=threads) for rows in combinations(range(k), size))
        total += layer if size % 2 == 1 else -layer
    return total


def factorizations(field: FieldSpec, a: int, k: int) -> List[Tuple[int, ...]]:
    """Every (a_1, ..., a_k) with a_1 ... a_k = a != 0; the last entry is forced."""
    out = []
    for prefix in product(range(1, field.q), repeat=k - 1):
        acc = 1
        for x in prefix:
            acc = field.mul(acc, x)
        out.append(prefix + (field.div(a, acc),))
    return out


def count_product_nonzero(sys: SystemSpec, a, threads: int = 1) -> int:
    """
    N(f_1 ... f_k, a) for a != 0, summed over the (q-1)^(k-1) factorizations
    of a into k nonzero factors.

    Raises:
        ZeroTarget: If a = 0.
        RankDeficient: If rank(A) < k.
    """
    a = as_index(a, sys.field)
    if a == 0:
        raise ZeroTarget("a = 0 is counted by inclusion-exclusion, not by factorizations")
    _assert_full_rank(sys)
    summer = _SystemSum(sys, choose_submatrix(sys.A, range(sys.k)))
    tuples = factorizations(sys.field, a, sys.k)
    if threads <= 1:
        return sum(summer.total(b) for b in tuples)
    chunks = [tuples[i::threads] for i in range(threads)]
    return sum(map_chunks(lambda chunk: sum(summer.total(b) for b in chunk), chunks, threads))


def count_pair(sys: SystemSpec, a) -> int:
    """
    N(f_1 f_2, a) for two forms.

    For a = 0: 2 q^(n-1) + (q-1)(P_1 + P_2) minus the joint zeros, where P_i
    is q^(n-1) times the product over the support of row i. For a != 0: a sum
    over u in F_q* of the joint counts of f_1 = u, f_2 = a/u, the pivot value
    of block t being a'_{t,1} u + a'_{t,2} a/u - sum_j sigma_{t,j} v_j.

    Raises:
        ShapeMismatch: If k != 2.
        RankDeficient: If the two rows are dependent.
    """
    if sys.k != 2:
        raise ShapeMismatch(f"The pair formula needs k = 2, got k = {sys.k}")
    f = sys.field
    q, n = sys.q, sys.n
    a = as_index(a, f)
    choice = choose_submatrix(sys.A, (0, 1))
    sizes = sys.partition.block_sizes
    free = [block_distribution(sizes[j], f) for j in choice.complement_cols]
    pivot_sizes = [sizes[j] for j in choice.col_set]

    def joint(c1: int, c2: int) -> int:
        total = 0
        for v in product(range(q), repeat=len(free)):
            term = 1
            for dist, vj in zip(free, v):
                term *= dist.count(vj == 0)
            for t in range(2):
                w = f.add(f.mul(choice.B_inv.get(t, 0), c1), f.mul(choice.B_inv.get(t, 1), c2))
                for j, vj in enumerate(v):
                    w = f.sub(w, f.mul(choice.sigma.get(t, j), vj))
                d = pivot_sizes[t]
                term *= q ** (d - 1) + f.kappa(w) * z(d, q)
            total += term
        return total

    if a == 0:
        supports = 0
        for i in range(2):
            zs = 1
            sizes_i = [sizes[l] for l in range(sys.m) if sys.A.get(i, l) != 0]
            for d in sizes_i:
                zs *= z(d, q)
            supports += q ** (n - 1 - sum(d - 1 for d in sizes_i)) * zs
        return 2 * q ** (n - 1) + (q - 1) * supports - joint(0, 0)
    return sum(joint(u, f.div(a, u)) for u in range(1, q))


# -------------------------------------------------------------------------
# Special shapes
# -------------------------------------------------------------------------
def matches_square_shape(sys: SystemSpec) -> bool:
    """m = k with A invertible."""
    return sys.m == sys.k and rank(sys.A) == sys.k


def matches_diagonal_shape(sys: SystemSpec) -> bool:
    """m = 2k and A = (D_1 D_2) with D_1, D_2 invertible diagonal."""
    k = sys.k
    if sys.m != 2 * k:
        return False
    for i in range(k):
        for j in range(k):
            on_diagonal = i == j
            if (sys.A.get(i, j) != 0) != on_diagonal or (sys.A.get(i, k + j) != 0) != on_diagonal:
                return False
    return True


def count_special_mk(sys: SystemSpec, a) -> int:
    """
    N(f, a) for a != 0 when A is square and invertible.

    Every block is a pivot block, so each factorization b of a fixes all
    block products to A^-1 b and contributes prod_i (q^(|J_i|-1) + kappa(w_i) z(|J_i|)).

    Raises:
        ShapeMismatch: If m != k or A is singular.
        ZeroTarget: If a = 0.
    """
    f = sys.field
    a = as_index(a, f)
    if sys.m != sys.k:
        raise ShapeMismatch(f"Square formula needs m = k, got m = {sys.m}, k = {sys.k}")
    if a == 0:
        raise ZeroTarget("The square formula covers a != 0 only")
    try:
        A_inv = invert(sys.A)
    except MlcountError as e:
        raise ShapeMismatch(f"A is not invertible: {e}")
    q = sys.q
    sizes = sys.partition.block_sizes
    total = 0
    for b in factorizations(f, a, sys.k):
        term = 1
        for i in range(sys.m):
            w = 0
            for j, bj in enumerate(b):
                w = f.add(w, f.mul(A_inv.get(i, j), bj))
            term *= q ** (sizes[i] - 1) + f.kappa(w) * z(sizes[i], q)
        total += term
    return total


def count_special_diag(sys: SystemSpec, a) -> int:
    """
    N(f, a) when m = 2k and A = (D_1 D_2) with invertible diagonal D_1, D_2.

    Form i only involves blocks i and k+i, so the forms use disjoint
    variables. With n'_i = |J_i| + |J_{k+i}|, one form takes each nonzero
    value q^(n'_i - 1) - q z(|J_i|) z(|J_{k+i}|) times and zero
    q^(n'_i - 1) + (q-1) q z(|J_i|) z(|J_{k+i}|) times.

    Raises:
        ShapeMismatch: If sys does not have the diagonal shape.
    """
    if not matches_diagonal_shape(sys):
        raise ShapeMismatch("A is not of the form (D_1 D_2) with invertible diagonal blocks")
    f = sys.field
    a = as_index(a, f)
    q, n, k = sys.q, sys.n, sys.k
    sizes = sys.partition.block_sizes
    widths = [sizes[i] + sizes[k + i] for i in range(k)]
    cross = [q * z(sizes[i], q) * z(sizes[k + i], q) for i in range(k)]

    if a != 0:
        total = (q - 1) ** (k - 1)
        for i in range(k):
            total *= q ** (widths[i] - 1) - cross[i]
        return total

    zeros = [q ** (widths[i] - 1) + (q - 1) * cross[i] for i in range(k)]
    total = 0
    for size in range(1, k + 1):
        layer = 0
        for rows in combinations(range(k), size):
            term = q ** (n - sum(widths[i] for i in rows))
            for i in rows:
                term *= zeros[i]
            layer += term
        total += layer if size % 2 == 1 else -layer
    return total


# -------------------------------------------------------------------------
# Dispatch
# -------------------------------------------------------------------------
def _general(sys: SystemSpec, a: int, threads: int) -> Tuple[int, str]:
    if a == 0:
        return count_product_zero(sys, threads), "general-IE"
    return count_product_nonzero(sys, a, threads), "general-factor"


def _special(sys: SystemSpec, a: int) -> Optional[Tuple[int, str]]:
    if a != 0 and matches_square_shape(sys):
        return count_special_mk(sys, a), "special-mk"
    if matches_diagonal_shape(sys):
        return count_special_diag(sys, a), "special-diag"
    return None


def count(query: CountQuery, method: str = "auto", threads: int = 1,
          max_bits: int = DEFAULT_MAX_BITS, force: bool = False) -> Tuple[int, str, int]:
    """
    Count N(f, a) with the requested method.

    Args:
        query: The system and target.
        method: "auto" takes a special-shape formula when one applies and the
            general path otherwise; the oracle runs only when asked for.
            "general", "special" and "oracle" force a path.
        threads: Workers for the parallel sums.
        max_bits: Oracle guard, log2 of the largest q^n enumerated.
        force: Run the oracle past the guard.

    Returns:
        (count, method_used, elapsed nanoseconds), method_used being one of
        general-IE, general-factor, special-mk, special-diag, oracle.

    Raises:
        DimensionError: method="auto" on a system with k > m.
        RankError: method="auto" on a system with a zero row or rank(A) < k.
        ShapeMismatch: method="special" on a system of no special shape.
        OracleTooLarge: method="oracle" and q^n exceeds the guard.
    """
    if method not in METHODS:
        raise ValueError(f"Unknown method {method!r}; expected one of {METHODS}")
    sys = query.system
    a = query.target.index
    start = time.perf_counter_ns()

    if method == "oracle":
        result = brute_count(query, max_bits, force, threads), "oracle"
    elif method == "general":
        result = _general(sys, a, threads)
    else:
        if method == "auto":
            check_system(sys)
        else:
            _assert_full_rank(sys)
        result = _special(sys, a)
        if result is None:
            if method == "special":
                raise ShapeMismatch("System matches neither the square nor the diagonal shape")
            result = _general(sys, a, threads)

    elapsed = time.perf_counter_ns() - start
    return result[0], result[1], elapsed


def value_distribution(sys: SystemSpec, threads: int = 1) -> Dict[int, int]:
    """N(f, a) for every a in F_q by the general path; the values sum to q^n."""
    out = {0: count_product_zero(sys, threads)}
    for a in range(1, sys.q):
        out[a] = count_product_nonzero(sys, a, threads)
    return out
