"""Exact rational arithmetic, p-adic valuations and elementary divisors.

Scalars are :class:`fractions.Fraction` throughout; nothing in this package
rounds.  ``Rational`` is an alias kept so call sites read like the maths.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
INF = math.inf

Scalar = Union[int, Fraction, str]


class ValidationError(ValueError):
    """Raised when an input violates a documented precondition."""


class SingularMatrixError(ValidationError):
    pass


_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime(n: int) -> bool:
    # deterministic Miller-Rabin for n < 3.3e24
    if n < 2:
        return False
    for q in _MR_BASES:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def check_prime(p) -> int:
    if isinstance(p, bool) or not isinstance(p, int) or not is_prime(p):
        raise ValidationError(f"{p!r} is not a prime")
    return p


def to_rational(x: Scalar) -> Fraction:
    """Coerce an int, Fraction or ``"num/den"`` string to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise ValidationError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        try:
            if "/" in s:
                num, den = s.split("/")
                return Fraction(int(num), int(den))
            return Fraction(int(s))
        except (ValueError, ZeroDivisionError) as exc:
            raise ValidationError(f"cannot parse rational {x!r}") from exc
    raise ValidationError(f"unsupported scalar {x!r}; floats are not accepted")


def format_rational(x: Fraction) -> str:
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def int_valuation(n: int, p: int):
    """Exponent of ``p`` in the integer ``n``; ``INF`` for zero."""
    if n == 0:
        return INF
    n = abs(n)
    if p == 2:
        return (n & -n).bit_length() - 1
    v = 0
    # strip in big chunks first, entries of long words carry large powers
    pk, k = p ** 16, 16
    while n % pk == 0:
        n //= pk
        v += k
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x: Scalar, p: int):
    """p-adic valuation of a rational; ``INF`` iff ``x == 0``."""
    check_prime(p)
    x = to_rational(x)
    if x == 0:
        return INF
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def _vp(x: Fraction, p: int):
    # unchecked variant for inner loops
    if x == 0:
        return INF
    return int_valuation(x.numerator, p) - int_valuation(x.denominator, p)


def reduce_mod_power(x: Fraction, p: int, n: int) -> Fraction:
    """Representative of ``x`` modulo ``p**n * Z_p`` lying in ``Z[1/p] ∩ [0, p**n)``."""
    if x == 0 or _vp(x, p) >= n:
        return Fraction(0)
    k = int_valuation(x.denominator, p)
    unit_den = x.denominator // p**k
    mod = p ** (n + k)
    m = (x.numerator % mod) * pow(unit_den, -1, mod) % mod
    return Fraction(m, p**k)


class Matrix:
    """Invertible 2x2 or 3x3 matrix over the rationals (immutable)."""

    __slots__ = ("rows", "dim", "_hash")

    def __init__(self, rows: Iterable[Iterable[Scalar]], *, check: bool = True):
        rows = tuple(tuple(to_rational(x) for x in row) for row in rows)
        dim = len(rows)
        if check:
            if dim not in (2, 3) or any(len(r) != dim for r in rows):
                raise ValidationError("matrices must be 2x2 or 3x3")
        self.rows = rows
        self.dim = dim
        self._hash = None
        if check and self.det() == 0:
            raise SingularMatrixError("matrix is singular")

    @classmethod
    def _raw(cls, rows) -> "Matrix":
        m = cls.__new__(cls)
        m.rows = rows
        m.dim = len(rows)
        m._hash = None
        return m

    @classmethod
    def identity(cls, dim: int = 2) -> "Matrix":
        one, zero = Fraction(1), Fraction(0)
        return cls._raw(tuple(tuple(one if i == j else zero for j in range(dim)) for i in range(dim)))

    @classmethod
    def diag(cls, *entries: Scalar) -> "Matrix":
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        body = ", ".join("[" + ", ".join(format_rational(x) for x in r) + "]" for r in self.rows)
        return f"Matrix([{body}])"

    def __mul__(self, other: "Matrix") -> "Matrix":
        if isinstance(other, Matrix):
            a, b = self.rows, other.rows
            n = self.dim
            if n == 2:
                (a00, a01), (a10, a11) = a
                (b00, b01), (b10, b11) = b
                return Matrix._raw(
                    (
                        (a00 * b00 + a01 * b10, a00 * b01 + a01 * b11),
                        (a10 * b00 + a11 * b10, a10 * b01 + a11 * b11),
                    )
                )
            cols = list(zip(*b))
            return Matrix._raw(tuple(tuple(sum(x * y for x, y in zip(r, c)) for c in cols) for r in a))
        if isinstance(other, (int, Fraction)):
            return Matrix._raw(tuple(tuple(x * other for x in r) for r in self.rows))
        return NotImplemented

    __rmul__ = __mul__

    def det(self) -> Fraction:
        r = self.rows
        if self.dim == 2:
            return r[0][0] * r[1][1] - r[0][1] * r[1][0]
        return (
            r[0][0] * (r[1][1] * r[2][2] - r[1][2] * r[2][1])
            - r[0][1] * (r[1][0] * r[2][2] - r[1][2] * r[2][0])
            + r[0][2] * (r[1][0] * r[2][1] - r[1][1] * r[2][0])
        )

    def trace(self) -> Fraction:
        return sum((self.rows[i][i] for i in range(self.dim)), Fraction(0))

    def inverse(self) -> "Matrix":
        d = self.det()
        if d == 0:
            raise SingularMatrixError("matrix is singular")
        r = self.rows
        if self.dim == 2:
            return Matrix._raw(((r[1][1] / d, -r[0][1] / d), (-r[1][0] / d, r[0][0] / d)))
        cof = [[Fraction(0)] * 3 for _ in range(3)]
        for i in range(3):
            for j in range(3):
                rr = [k for k in range(3) if k != i]
                cc = [k for k in range(3) if k != j]
                minor = r[rr[0]][cc[0]] * r[rr[1]][cc[1]] - r[rr[0]][cc[1]] * r[rr[1]][cc[0]]
                cof[i][j] = minor if (i + j) % 2 == 0 else -minor
        return Matrix._raw(tuple(tuple(cof[j][i] / d for j in range(3)) for i in range(3)))

    def __pow__(self, k: int) -> "Matrix":
        base = self if k >= 0 else self.inverse()
        k = abs(k)
        result = Matrix.identity(self.dim)
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def is_identity(self) -> bool:
        return self.rows == Matrix.identity(self.dim).rows

    def entries(self) -> tuple:
        return tuple(x for r in self.rows for x in r)

    def to_json(self) -> list:
        return [[format_rational(x) for x in r] for r in self.rows]

    @classmethod
    def from_json(cls, data: Sequence[Sequence[Scalar]]) -> "Matrix":
        if not isinstance(data, (list, tuple)):
            raise ValidationError("matrix must be a list of rows")
        return cls(data)

    def integral_form(self) -> tuple[tuple[int, ...], int]:
        """Return ``(flat integer entries, den)`` with ``self == entries / den``."""
        den = 1
        for x in self.entries():
            den = den * x.denominator // math.gcd(den, x.denominator)
        return tuple(int(x * den) for x in self.entries()), den


def elementary_divisor_valuations(m: Matrix, p: int) -> list[int]:
    """Valuations of the elementary divisors of ``m`` over Z_(p), ascending.

    Gaussian elimination where every pivot is an entry of minimal valuation
    in the remaining block, so all row and column operations are
    invertible over the rationals with p-free denominators.
    """
    check_prime(p)
    a = [list(r) for r in m.rows]
    n = m.dim
    out = []
    for k in range(n):
        best = None
        for i in range(k, n):
            for j in range(k, n):
                v = _vp(a[i][j], p)
                if v != INF and (best is None or v < best[0]):
                    best = (v, i, j)
        if best is None:
            raise SingularMatrixError("matrix is singular")
        v, i, j = best
        a[k], a[i] = a[i], a[k]
        for row in a:
            row[k], row[j] = row[j], row[k]
        piv = a[k][k]
        for i in range(k + 1, n):
            f = a[i][k] / piv
            if f:
                for j in range(k, n):
                    a[i][j] -= f * a[k][j]
        for j in range(k + 1, n):
            a[k][j] = Fraction(0)
        out.append(v)
    return sorted(out)
