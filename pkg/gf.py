"""
Exact arithmetic in the finite field F_q = F_{p^e}.

Elements are encoded as integer indices: the coefficient vector
(c_0, ..., c_{e-1}) of the polynomial sum c_i x^i mod the field modulus,
read base p, little-endian. Index 0 is the additive identity and index 1
the multiplicative identity, so tuples over F_q^n can be walked as
mixed-radix counters of plain ints.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

MAX_FIELD_SIZE = 1 << 20
TABLE_LIMIT = 1 << 16

# Irreducible moduli for every (p, e) with e > 1 and p^e <= 32,
# little-endian coefficients, monic.
BUILTIN_MODULI: Dict[Tuple[int, int], Tuple[int, ...]] = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (2, 4): (1, 1, 0, 0, 1),
    (2, 5): (1, 0, 1, 0, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
}


class MlcountError(Exception):
    """Base class for every error raised by mlcount."""
    exit_code = 1


class SchemaError(MlcountError):
    """Exception raised when an input document does not follow its JSON schema."""
    exit_code = 2


class NotPrime(MlcountError):
    """Exception raised when the field characteristic is not prime."""
    exit_code = 2


class ReducibleModulus(MlcountError):
    """Exception raised when an extension modulus is malformed or reducible."""
    exit_code = 2


class FieldTooLarge(MlcountError):
    """Exception raised when q exceeds the supported field size."""
    exit_code = 2


class FieldMismatch(MlcountError):
    """Exception raised when operands belong to different fields."""
    exit_code = 2


class DivisionByZero(MlcountError):
    """Exception raised on inversion of the zero element."""
    exit_code = 2


def is_prime(n: int) -> bool:
    """Deterministic trial-division primality test."""
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def prime_factors(n: int) -> List[int]:
    """Distinct prime factors of n in ascending order."""
    factors = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            factors.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        factors.append(n)
    return factors


# -------------------------------------------------------------------------
# Polynomials over F_p as little-endian coefficient lists
# -------------------------------------------------------------------------
def _poly_trim(a: List[int]) -> List[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _poly_divmod(num: Sequence[int], den: Sequence[int], p: int) -> Tuple[List[int], List[int]]:
    num = _poly_trim(list(num))
    den = _poly_trim(list(den))
    if not den:
        raise DivisionByZero("Polynomial division by zero")
    lead_inv = pow(den[-1], -1, p)
    quot = [0] * max(len(num) - len(den) + 1, 0)
    while len(num) >= len(den) and num:
        shift = len(num) - len(den)
        c = num[-1] * lead_inv % p
        quot[shift] = c
        for i, d in enumerate(den):
            num[shift + i] = (num[shift + i] - c * d) % p
        _poly_trim(num)
    return quot, num


def _poly_mul(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] = (out[i + j] + x * y) % p
    return _poly_trim(out)


def _poly_sub(a: Sequence[int], b: Sequence[int], p: int) -> List[int]:
    out = [0] * max(len(a), len(b))
    for i, x in enumerate(a):
        out[i] = x
    for i, y in enumerate(b):
        out[i] = (out[i] - y) % p
    return _poly_trim(out)


def _monic_polynomials(degree: int, p: int):
    """Yield every monic polynomial of the given degree over F_p."""
    for low in range(p ** degree):
        coeffs = []
        for _ in range(degree):
            low, c = divmod(low, p)
            coeffs.append(c)
        coeffs.append(1)
        yield coeffs


def is_irreducible(modulus: Sequence[int], p: int) -> bool:
    """
    Check a monic polynomial over F_p for irreducibility.

    Exhaustive: tries every monic divisor of degree 1..deg/2, which stays
    cheap because the field size guard keeps p^(deg/2) <= 2^10.
    """
    degree = len(modulus) - 1
    for d in range(1, degree // 2 + 1):
        for g in _monic_polynomials(d, p):
            _, rem = _poly_divmod(modulus, g, p)
            if not rem:
                return False
    return True


class FieldSpec:
    """
    The finite field F_{p^e}, immutable after construction.

    Arithmetic methods take and return canonical integer indices; wrap an
    index with ``element`` to get a FieldElement with operator support.
    """

    def __init__(self, p: int, e: int, modulus: Tuple[int, ...]):
        self.p = p
        self.e = e
        self.modulus = modulus
        self.q = p ** e
        self._log: Optional[List[int]] = None
        self._exp: Optional[List[int]] = None
        self._primitive = self._find_primitive()
        if self.q <= TABLE_LIMIT:
            self._build_tables()

    def __eq__(self, other) -> bool:
        if not isinstance(other, FieldSpec):
            return NotImplemented
        return (self.p, self.e, self.modulus) == (other.p, other.e, other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.e, self.modulus))

    def __repr__(self) -> str:
        if self.e == 1:
            return f"FieldSpec(F_{self.q})"
        return f"FieldSpec(F_{self.q}, modulus={list(self.modulus)})"

    # ---------------------------------------------------------------------
    # Encoding
    # ---------------------------------------------------------------------
    def digits(self, a: int) -> List[int]:
        """Coefficient vector (c_0, ..., c_{e-1}) of index a."""
        out = []
        for _ in range(self.e):
            a, c = divmod(a, self.p)
            out.append(c)
        return out

    def from_digits(self, coeffs: Sequence[int]) -> int:
        index = 0
        for c in reversed(list(coeffs)[:self.e]):
            index = index * self.p + c
        return index

    def element(self, index: int) -> "FieldElement":
        if not 0 <= index < self.q:
            raise FieldMismatch(f"Index {index} is not an element of F_{self.q}")
        return FieldElement(index, self)

    @property
    def zero(self) -> "FieldElement":
        return FieldElement(0, self)

    @property
    def one(self) -> "FieldElement":
        return FieldElement(1, self)

    # ---------------------------------------------------------------------
    # Index-level arithmetic
    # ---------------------------------------------------------------------
    def add(self, a: int, b: int) -> int:
        if self.e == 1:
            return (a + b) % self.p
        if self.p == 2:
            return a ^ b
        out, scale = 0, 1
        while a or b:
            a, x = divmod(a, self.p)
            b, y = divmod(b, self.p)
            out += ((x + y) % self.p) * scale
            scale *= self.p
        return out

    def neg(self, a: int) -> int:
        if self.e == 1:
            return -a % self.p
        if self.p == 2:
            return a
        out, scale = 0, 1
        while a:
            a, x = divmod(a, self.p)
            out += (-x % self.p) * scale
            scale *= self.p
        return out

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def _mul_slow(self, a: int, b: int) -> int:
        if self.e == 1:
            return a * b % self.p
        prod = _poly_mul(self.digits(a), self.digits(b), self.p)
        _, rem = _poly_divmod(prod, self.modulus, self.p)
        return self.from_digits(rem)

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        if self._log is not None:
            return self._exp[self._log[a] + self._log[b]]
        return self._mul_slow(a, b)

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero(f"Zero has no inverse in F_{self.q}")
        if self._log is not None:
            return self._exp[(self.q - 1 - self._log[a]) % (self.q - 1)]
        if self.e == 1:
            return pow(a, -1, self.p)
        # extended Euclid over F_p[x]
        r0, r1 = list(self.modulus), _poly_trim(self.digits(a))
        s0, s1 = [], [1]
        while r1:
            quot, rem = _poly_divmod(r0, r1, self.p)
            r0, r1 = r1, rem
            s0, s1 = s1, _poly_sub(s0, _poly_mul(quot, s1, self.p), self.p)
        scale = pow(r0[0], -1, self.p)
        return self.from_digits([c * scale % self.p for c in s0])

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def pow(self, a: int, n: int) -> int:
        if n < 0:
            a, n = self.inv(a), -n
        if a == 0:
            return 1 if n == 0 else 0
        if self._log is not None:
            return self._exp[self._log[a] * n % (self.q - 1)]
        result = 1
        while n:
            if n & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            n >>= 1
        return result

    def kappa(self, a: int) -> int:
        """q - 1 for the zero element, -1 otherwise."""
        return self.q - 1 if a == 0 else -1

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero index."""
        if a == 0:
            raise DivisionByZero("Zero has no multiplicative order")
        n = self.q - 1
        for r in prime_factors(self.q - 1):
            while n % r == 0 and self._pow_slow(a, n // r) == 1:
                n //= r
        return n

    def _pow_slow(self, a: int, n: int) -> int:
        result = 1
        while n:
            if n & 1:
                result = self._mul_slow(result, a)
            a = self._mul_slow(a, a)
            n >>= 1
        return result

    # ---------------------------------------------------------------------
    # Tables
    # ---------------------------------------------------------------------
    def _find_primitive(self) -> int:
        factors = prime_factors(self.q - 1)
        for g in range(1, self.q):
            if all(self._pow_slow(g, (self.q - 1) // r) != 1 for r in factors):
                return g
        raise ReducibleModulus(f"No primitive element found for {self!r}")

    def _build_tables(self) -> None:
        size = self.q - 1
        exp = [0] * (2 * size)
        log = [0] * self.q
        x = 1
        for i in range(size):
            exp[i] = x
            log[x] = i
            x = self._mul_slow(x, self._primitive)
        for i in range(size, 2 * size):
            exp[i] = exp[i - size]
        self._exp, self._log = exp, log

    @property
    def primitive(self) -> int:
        return self._primitive


@dataclass(frozen=True)
class FieldElement:
    """An element of a FieldSpec, stored as its canonical index."""
    index: int
    field: FieldSpec

    def __int__(self) -> int:
        return self.index

    def __repr__(self) -> str:
        return f"FieldElement({self.index}, F_{self.field.q})"

    def __add__(self, other: "FieldElement") -> "FieldElement":
        return fe_arith("add", self, other)

    def __sub__(self, other: "FieldElement") -> "FieldElement":
        return fe_arith("sub", self, other)

    def __mul__(self, other: "FieldElement") -> "FieldElement":
        return fe_arith("mul", self, other)

    def __truediv__(self, other: "FieldElement") -> "FieldElement":
        return fe_arith("div", self, other)

    def __neg__(self) -> "FieldElement":
        return fe_arith("neg", self)

    def __pow__(self, n: int) -> "FieldElement":
        return fe_arith("pow", self, n)

    def is_zero(self) -> bool:
        return self.index == 0


def make_field(p: int, e: int = 1, modulus: Optional[Sequence[int]] = None) -> FieldSpec:
    """
    Build and validate F_{p^e}.

    Args:
        p: The characteristic; must be prime.
        e: The extension degree, at least 1.
        modulus: Little-endian coefficients of a monic irreducible polynomial of
            degree e over F_p. Ignored when e == 1; looked up in BUILTIN_MODULI
            when omitted for e > 1.

    Returns:
        The validated FieldSpec.

    Raises:
        NotPrime: If p is not prime.
        FieldTooLarge: If p^e exceeds MAX_FIELD_SIZE.
        ReducibleModulus: If the modulus is missing, malformed or reducible.
    """
    if not isinstance(p, int) or not is_prime(p):
        raise NotPrime(f"Characteristic {p} is not prime")
    if not isinstance(e, int) or e < 1:
        raise ReducibleModulus(f"Extension degree {e} must be a positive integer")
    if p ** e > MAX_FIELD_SIZE:
        raise FieldTooLarge(f"q = {p}^{e} exceeds the limit {MAX_FIELD_SIZE}")

    if e == 1:
        return FieldSpec(p, 1, ())

    if modulus is None:
        if (p, e) not in BUILTIN_MODULI:
            raise ReducibleModulus(f"No built-in modulus for p={p}, e={e}; supply one")
        modulus = BUILTIN_MODULI[(p, e)]
    modulus = tuple(int(c) for c in modulus)
    if len(modulus) != e + 1:
        raise ReducibleModulus(f"Modulus {list(modulus)} must have {e + 1} coefficients")
    if any(not 0 <= c < p for c in modulus):
        raise ReducibleModulus(f"Modulus coefficients must lie in [0, {p})")
    if modulus[-1] != 1:
        raise ReducibleModulus(f"Modulus {list(modulus)} is not monic")
    if not is_irreducible(modulus, p):
        raise ReducibleModulus(f"Modulus {list(modulus)} is reducible over F_{p}")
    return FieldSpec(p, e, modulus)


def _check_same_field(operands: Sequence[FieldElement]) -> FieldSpec:
    field = operands[0].field
    for x in operands[1:]:
        if x.field != field:
            raise FieldMismatch(f"Operands from {field!r} and {x.field!r}")
    return field


_BINARY_OPS: Dict[str, Callable[[FieldSpec, int, int], int]] = {
    "add": FieldSpec.add,
    "sub": FieldSpec.sub,
    "mul": FieldSpec.mul,
    "div": FieldSpec.div,
}


def fe_arith(op: str, *operands) -> FieldElement:
    """
    Apply a field operation to FieldElement operands.

    ``op`` is one of add, sub, mul, div (two elements), neg, inv (one
    element) or pow (an element and an int exponent).
    """
    if op == "pow":
        base, n = operands
        return FieldElement(base.field.pow(base.index, int(n)), base.field)
    field = _check_same_field(operands)
    if op in _BINARY_OPS:
        a, b = operands
        return FieldElement(_BINARY_OPS[op](field, a.index, b.index), field)
    if op == "neg":
        return FieldElement(field.neg(operands[0].index), field)
    if op == "inv":
        return FieldElement(field.inv(operands[0].index), field)
    raise ValueError(f"Unknown field operation {op!r}")


def kappa(v: FieldElement) -> int:
    return v.field.kappa(v.index)


def primitive_element(field: FieldSpec) -> FieldElement:
    """The element of smallest index whose multiplicative order is q - 1."""
    return FieldElement(field.primitive, field)


def element_order(v: FieldElement) -> int:
    return v.field.order(v.index)


def is_square(v: FieldElement) -> bool:
    """True when v is a nonzero square of F_q."""
    field = v.field
    if v.index == 0:
        return False
    if field.p == 2:
        return True
    return field.pow(v.index, (field.q - 1) // 2) == 1


def enumerate_elements(field: FieldSpec, nonzero_only: bool = False) -> List[FieldElement]:
    start = 1 if nonzero_only else 0
    return [FieldElement(i, field) for i in range(start, field.q)]


def as_index(v, field: FieldSpec) -> int:
    """Canonical index of v, given either as a FieldElement of ``field`` or an int."""
    if isinstance(v, FieldElement):
        if v.field != field:
            raise FieldMismatch(f"Element of {v.field!r} used with {field!r}")
        return v.index
    if isinstance(v, bool) or not isinstance(v, int) or not 0 <= v < field.q:
        raise FieldMismatch(f"{v!r} is not an element index of F_{field.q}")
    return v


def _require_int(value, name: str) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise SchemaError(f"{name} must be an integer, got {value!r}")
    return value


def parse_field(obj) -> FieldSpec:
    """
    Build a FieldSpec from its JSON form ``{"p": 3, "e": 1}``.

    ``e`` defaults to 1 and ``modulus`` (little-endian coefficients) to the
    built-in one for extension fields.

    Raises:
        SchemaError: If obj is not an object or carries unknown keys.
    """
    if not isinstance(obj, dict):
        raise SchemaError(f"field must be an object, got {obj!r}")
    unknown = set(obj) - {"p", "e", "modulus"}
    if unknown:
        raise SchemaError(f"Unknown field keys: {sorted(unknown)}")
    if "p" not in obj:
        raise SchemaError("field is missing 'p'")
    p = _require_int(obj["p"], "field.p")
    e = _require_int(obj.get("e", 1), "field.e")
    modulus = obj.get("modulus")
    if modulus is not None:
        if not isinstance(modulus, list):
            raise SchemaError(f"field.modulus must be a list, got {modulus!r}")
        modulus = [_require_int(c, "field.modulus entry") for c in modulus]
    return make_field(p, e, modulus)


def field_to_json(field: FieldSpec) -> Dict[str, object]:
    out: Dict[str, object] = {"p": field.p, "e": field.e}
    if field.e > 1:
        out["modulus"] = list(field.modulus)
    return out
