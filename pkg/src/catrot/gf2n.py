"""Arithmetic in GF(2^n), primitive polynomials, and F2 linear algebra.

Field elements and polynomials are held as Python ints: bit ``j`` is the
coefficient of ``x^j`` (equivalently of ``alpha^j``). A degree-n polynomial
mask therefore has bit ``n`` set.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from . import kernels
from .errors import CapacityError, NoPolynomialFound, NotPrimitiveError

MIN_DEGREE = 2
MAX_DEGREE = 64
DLOG_MAX_DEGREE = 28


# ---------- polynomial helpers over F2 (ints as coefficient vectors)

def clmul(a: int, b: int) -> int:
    """Carryless product of two F2 polynomials."""
    acc = 0
    while b:
        if b & 1:
            acc ^= a
        a <<= 1
        b >>= 1
    return acc


def poly_mod(a: int, m: int) -> int:
    """Remainder of ``a`` divided by ``m`` over F2."""
    dm = m.bit_length()
    while a.bit_length() >= dm:
        a ^= m << (a.bit_length() - dm)
    return a


def poly_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, poly_mod(a, b)
    return a


def poly_mulmod(a: int, b: int, m: int) -> int:
    return poly_mod(clmul(a, b), m)


def poly_powmod(a: int, e: int, m: int) -> int:
    result = 1
    a = poly_mod(a, m)
    while e:
        if e & 1:
            result = poly_mulmod(result, a, m)
        a = poly_mulmod(a, a, m)
        e >>= 1
    return result


# ---------- integer factorization

@lru_cache(maxsize=None)
def factorize(N: int) -> dict[int, int]:
    """Prime factorization ``{p: e}`` of a positive integer."""
    import sympy

    if N < 1:
        raise ValueError(f"cannot factor {N}")
    return {int(p): int(e) for p, e in sympy.factorint(N).items()}


def mersenne_factors(n: int) -> tuple[int, ...]:
    """Distinct prime factors of 2^n - 1."""
    return tuple(sorted(factorize((1 << n) - 1)))


# ---------- text forms

_TERM = re.compile(r"^(?:(1)|x(?:\^(\d+))?)$")


def parse_poly(text: str) -> int:
    """Parse ``"x^3 + x + 1"`` or ``"0xb"`` into a coefficient mask."""
    s = "".join(text.split()).lower()
    if not s:
        raise ValueError("empty polynomial")
    if s.startswith("0x"):
        try:
            return int(s, 16)
        except ValueError:
            raise ValueError(f"bad hex polynomial {text!r}") from None
    mask = 0
    for term in s.split("+"):
        m = _TERM.match(term)
        if m is None:
            raise ValueError(f"bad polynomial term {term!r} in {text!r}")
        exp = 0 if m.group(1) else int(m.group(2) or 1)
        mask ^= 1 << exp
    return mask


def format_poly(mask: int) -> str:
    terms = []
    for exp in range(mask.bit_length() - 1, -1, -1):
        if (mask >> exp) & 1:
            terms.append("1" if exp == 0 else "x" if exp == 1 else f"x^{exp}")
    return " + ".join(terms) if terms else "0"


def format_hex(mask: int) -> str:
    return hex(mask)


# ---------- domain types

@dataclass(frozen=True)
class FieldPoly:
    """A monic degree-n primitive polynomial, as returned by :func:`certify_primitive`.

    ``mask`` includes the leading ``x^n`` bit.
    """

    mask: int
    n: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "n", self.mask.bit_length() - 1)
        if not MIN_DEGREE <= self.n <= MAX_DEGREE:
            raise CapacityError(f"degree {self.n} outside [{MIN_DEGREE}, {MAX_DEGREE}]")
        if not self.mask & 1:
            raise NotPrimitiveError(f"{format_poly(self.mask)} has f_0 = 0", "reducible")

    @property
    def low(self) -> int:
        """f_0..f_{n-1} packed as an int (the reduction of x^n)."""
        return self.mask ^ (1 << self.n)

    @property
    def coeffs(self) -> tuple[int, ...]:
        return tuple((self.mask >> j) & 1 for j in range(self.n))

    @property
    def order(self) -> int:
        return (1 << self.n) - 1

    @property
    def q_set(self) -> tuple[int, ...]:
        """CX target indices: j in [0, n-2] with f_{j+1} = 1."""
        return tuple(j for j in range(self.n - 1) if (self.mask >> (j + 1)) & 1)

    @property
    def weight(self) -> int:
        return self.mask.bit_count()

    def __str__(self):
        return format_poly(self.mask)


@dataclass(frozen=True)
class GFElement:
    value: int
    n: int

    def __post_init__(self):
        if self.value < 0 or self.value >> self.n:
            raise ValueError(f"value {self.value:#x} does not fit in {self.n} bits")

    @classmethod
    def from_bits(cls, bits) -> GFElement:
        bits = list(bits)
        return cls(sum(int(b) << j for j, b in enumerate(bits)), len(bits))

    @classmethod
    def one(cls, n: int) -> GFElement:
        return cls(1, n)

    @classmethod
    def alpha(cls, n: int) -> GFElement:
        return cls(2, n)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.value >> j) & 1 for j in range(self.n))

    def __add__(self, other: GFElement) -> GFElement:
        _check_degree(self, other)
        return GFElement(self.value ^ other.value, self.n)

    def __bool__(self):
        return self.value != 0


def _check_degree(*items):
    degrees = {x.n for x in items}
    if len(degrees) != 1:
        raise ValueError(f"degree mismatch: {sorted(degrees)}")


def gf_mul(a: GFElement, b: GFElement, f: FieldPoly) -> GFElement:
    """Field product ``a * b`` modulo ``f``."""
    _check_degree(a, b, f)
    return GFElement(int(kernels.gf_mul(a.value, b.value, f.low, f.n)), f.n)


def gf_pow(a: GFElement, e: int, f: FieldPoly) -> GFElement:
    _check_degree(a, f)
    if e < 0:
        raise ValueError("exponent must be nonnegative")
    result, base = 1, a.value
    while e:
        if e & 1:
            result = kernels.gf_mul(result, base, f.low, f.n)
        base = kernels.gf_mul(base, base, f.low, f.n)
        e >>= 1
    return GFElement(int(result), f.n)


def alpha_power(j: int, f: FieldPoly) -> int:
    """alpha^j as a coefficient mask."""
    return gf_pow(GFElement.alpha(f.n), j % f.order, f).value


# ---------- primitivity

def is_irreducible(mask: int) -> bool:
    """Rabin's test over F2."""
    n = mask.bit_length() - 1
    if n < 1:
        return False
    if poly_powmod(0b10, 1 << n, mask) != 0b10:
        return False
    for p in factorize(n) if n > 1 else ():
        h = poly_powmod(0b10, 1 << (n // p), mask) ^ 0b10
        if poly_gcd(mask, h) != 1:
            return False
    return True


def certify_primitive(poly) -> FieldPoly:
    """Return a :class:`FieldPoly` if ``poly`` (mask or text) is primitive.

    Raises :class:`NotPrimitiveError` with reason ``"reducible"`` or
    ``"not primitive"``.
    """
    mask = parse_poly(poly) if isinstance(poly, str) else int(poly)
    n = mask.bit_length() - 1
    if not MIN_DEGREE <= n <= MAX_DEGREE:
        raise CapacityError(f"unsupported degree {n}: need {MIN_DEGREE} <= n <= {MAX_DEGREE}")
    if not mask & 1 or not is_irreducible(mask):
        raise NotPrimitiveError(f"{format_poly(mask)} is reducible", "reducible")
    N = (1 << n) - 1
    for p in mersenne_factors(n):
        if poly_powmod(0b10, N // p, mask) == 1:
            raise NotPrimitiveError(
                f"{format_poly(mask)} is irreducible but x has order dividing {N // p}",
                "not primitive",
            )
    return FieldPoly(mask)


def _is_primitive(mask: int) -> bool:
    try:
        certify_primitive(mask)
    except NotPrimitiveError:
        return False
    return True


def find_primitive(n: int, max_terms: int = 5) -> FieldPoly:
    """Smallest primitive trinomial of degree n, else smallest pentanomial.

    Candidates are ordered by their integer coefficient mask, so the highest
    middle term is minimised first.
    """
    if not MIN_DEGREE <= n <= MAX_DEGREE:
        raise CapacityError(f"unsupported degree {n}")
    if max_terms not in (3, 5):
        raise ValueError("max_terms must be 3 or 5")
    head = (1 << n) | 1
    for k in range(1, n):
        if _is_primitive(head | (1 << k)):
            return FieldPoly(head | (1 << k))
    if max_terms == 5:
        middles = sorted(
            (sum(1 << e for e in c) for c in combinations(range(1, n), 3)),
        )
        for mid in middles:
            if _is_primitive(head | mid):
                return FieldPoly(head | mid)
    raise NoPolynomialFound(f"no primitive polynomial of degree {n} with <= {max_terms} terms")


# ---------- binary matrices

@dataclass(frozen=True)
class BinMatrix:
    """Square matrix over F2. ``rows[i]`` bit ``j`` is entry (i, j)."""

    n: int
    rows: tuple[int, ...]

    def __post_init__(self):
        if len(self.rows) != self.n:
            raise ValueError(f"expected {self.n} rows, got {len(self.rows)}")
        if any(r >> self.n for r in self.rows):
            raise ValueError("row wider than matrix")

    @classmethod
    def identity(cls, n: int) -> BinMatrix:
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_lists(cls, entries) -> BinMatrix:
        entries = [list(r) for r in entries]
        return cls(len(entries), tuple(sum(int(b) << j for j, b in enumerate(r)) for r in entries))

    @classmethod
    def from_columns(cls, cols) -> BinMatrix:
        cols = list(cols)
        n = len(cols)
        return cls(n, tuple(sum(((c >> i) & 1) << j for j, c in enumerate(cols)) for i in range(n)))

    def to_lists(self) -> list[list[int]]:
        return [[(r >> j) & 1 for j in range(self.n)] for r in self.rows]

    def columns(self) -> tuple[int, ...]:
        return self.transpose().rows

    def transpose(self) -> BinMatrix:
        return BinMatrix(self.n, tuple(
            sum(((r >> j) & 1) << i for i, r in enumerate(self.rows)) for j in range(self.n)
        ))

    def apply(self, v: int) -> int:
        """Matrix-vector product with ``v`` given as a bit mask."""
        out = 0
        for i, r in enumerate(self.rows):
            out |= ((r & v).bit_count() & 1) << i
        return out

    def __matmul__(self, other: BinMatrix) -> BinMatrix:
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        out = []
        for r in self.rows:
            acc, j = 0, 0
            while r:
                if r & 1:
                    acc ^= other.rows[j]
                r >>= 1
                j += 1
            out.append(acc)
        return BinMatrix(self.n, tuple(out))

    def __pow__(self, e: int) -> BinMatrix:
        if e < 0:
            return self.inverse() ** (-e)
        result, base = BinMatrix.identity(self.n), self
        while e:
            if e & 1:
                result = result @ base
            base = base @ base
            e >>= 1
        return result

    def rank(self) -> int:
        rows, rank = list(self.rows), 0
        for col in range(self.n):
            bit = 1 << col
            pivot = next((i for i in range(rank, self.n) if rows[i] & bit), None)
            if pivot is None:
                continue
            rows[rank], rows[pivot] = rows[pivot], rows[rank]
            for i in range(self.n):
                if i != rank and rows[i] & bit:
                    rows[i] ^= rows[rank]
            rank += 1
        return rank

    def is_invertible(self) -> bool:
        return self.rank() == self.n

    def inverse(self) -> BinMatrix:
        n = self.n
        rows = [r | (1 << (n + i)) for i, r in enumerate(self.rows)]
        for col in range(n):
            bit = 1 << col
            pivot = next((i for i in range(col, n) if rows[i] & bit), None)
            if pivot is None:
                raise ValueError("matrix is singular over F2")
            rows[col], rows[pivot] = rows[pivot], rows[col]
            for i in range(n):
                if i != col and rows[i] & bit:
                    rows[i] ^= rows[col]
        return BinMatrix(n, tuple(r >> n for r in rows))

    def is_identity(self) -> bool:
        return all(r == 1 << i for i, r in enumerate(self.rows))


def companion_matrix(f: FieldPoly) -> BinMatrix:
    """Multiplication-by-alpha on coefficient vectors."""
    n = f.n
    rows = [((f.mask >> i) & 1) << (n - 1) for i in range(n)]
    for i in range(1, n):
        rows[i] |= 1 << (i - 1)
    return BinMatrix(n, tuple(rows))


def companion_decompose(f: FieldPoly) -> tuple[BinMatrix, BinMatrix]:
    """Split the companion matrix into (cyclic shift) @ (unit upper triangular)."""
    n = f.n
    perm = BinMatrix.from_columns(1 << ((j + 1) % n) for j in range(n))
    last = [(f.mask >> (i + 1)) & 1 for i in range(n - 1)] + [f.mask & 1]
    upper = BinMatrix(n, tuple((1 << i) | (last[i] << (n - 1)) for i in range(n)))
    return perm, upper


def frobenius_matrix(f: FieldPoly) -> BinMatrix:
    """Squaring map g -> g^2; column j is alpha^(2j) reduced mod f."""
    return BinMatrix.from_columns(poly_mod(1 << (2 * j), f.mask) for j in range(f.n))


def matrix_order(M: BinMatrix, cap: int = 1 << 20) -> int:
    """Smallest t >= 1 with M^t = I.

    Uses the factorization of 2^n - 1 when M^(2^n - 1) = I (true for every
    companion matrix of a primitive polynomial), else iterates up to ``cap``.
    """
    if not M.is_invertible():
        raise ValueError("matrix is singular over F2")
    N = (1 << M.n) - 1
    if (M ** N).is_identity():
        t = N
        for p in mersenne_factors(M.n) if M.n > 1 else ():
            while t % p == 0 and (M ** (t // p)).is_identity():
                t //= p
        return t
    P = M
    for t in range(1, cap + 1):
        if P.is_identity():
            return t
        P = P @ M
    raise CapacityError(f"matrix order exceeds cap {cap}")


# ---------- discrete log and number theory

@lru_cache(maxsize=4)
def _log_table(f: FieldPoly) -> np.ndarray:
    orbit = kernels.gf_orbit(f.low, f.n)
    dtype = np.uint32 if f.n <= 32 else np.uint64
    table = np.zeros(1 << f.n, dtype=dtype)
    table[orbit.astype(np.int64)] = np.arange(f.order, dtype=dtype)
    table.flags.writeable = False
    return table


def log_table(f: FieldPoly) -> np.ndarray:
    """Array mapping each nonzero element mask to its discrete log (entry 0 unused)."""
    if f.n > DLOG_MAX_DEGREE:
        raise CapacityError(f"discrete-log table capped at n <= {DLOG_MAX_DEGREE}, got n = {f.n}")
    return _log_table(f)


def discrete_log(g: GFElement, f: FieldPoly) -> int:
    """The j in [0, 2^n - 2] with alpha^j = g, by table lookup."""
    _check_degree(g, f)
    if not g:
        raise ValueError("discrete log of zero is undefined")
    return int(log_table(f)[g.value])


def mod_inverse(a: int, N: int) -> int:
    if math.gcd(a, N) != 1:
        raise ValueError(f"{a} is not invertible modulo {N}")
    return pow(a, -1, N)


def totient(N: int) -> int:
    phi = N
    for p in factorize(N):
        phi = phi // p * (p - 1)
    return phi


def rosser_bound(N: int) -> float:
    """Lower bound 1 / (e^gamma log log N + 3 / log log N) on phi(N)/N."""
    ll = math.log(math.log(N))
    return 1.0 / (math.exp(np.euler_gamma) * ll + 3.0 / ll)


def totient_check(N: int) -> tuple[Fraction, float, bool]:
    if N < 5:
        raise ValueError("need N >= 5 so that log log N > 0")
    ratio = Fraction(totient(N), N)
    bound = rosser_bound(N)
    return ratio, bound, ratio >= bound


# ---------- built-in polynomials

FIXED_POLYS = {
    27: (1 << 27) | (1 << 20) | (1 << 13) | (1 << 7) | 1,
    36: (1 << 36) | (1 << 11) | 1,
}


@lru_cache(maxsize=None)
def builtin_poly(n: int) -> FieldPoly:
    """Default polynomial for a bare degree: fixed choices for 27 and 36,
    otherwise the first hit of :func:`find_primitive`."""
    if n in FIXED_POLYS:
        return certify_primitive(FIXED_POLYS[n])
    return find_primitive(n, 5)


BUILTIN_DEGREES = tuple(range(3, 21)) + (27, 36)
