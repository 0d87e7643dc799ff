"""Exact rational matrices: rank, canonical factorization, Kronecker powers and
entrywise polynomial maps.

All arithmetic is done with :class:`fractions.Fraction` (or plain ``int`` in the
fraction-free rank routine); nothing here ever touches floating point.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import lcm
from typing import Iterable, Mapping, Sequence

Rational = Fraction

#: Abort elimination when any intermediate numerator/denominator grows past this.
DEFAULT_BIT_CAP = 1 << 14
#: Largest vector length :func:`kronecker_power` will materialize.
DEFAULT_INDEX_CAP = 1 << 20


class BitLengthExceeded(ArithmeticError):
    """Raised when elimination produces coefficients beyond the bit-length cap."""


class IndexSpaceExceeded(ValueError):
    """Raised when a tensor power would exceed the configured index-space cap."""


def to_rational(x) -> Fraction:
    """Convert ints, Fractions and ``"num/den"`` strings to a Fraction.

    Decimal strings (``"0.5"``, ``"1e3"``) are rejected so that interchange stays
    lossless.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        return Fraction(int(x))
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        s = x.strip()
        if any(ch in s for ch in ".eE"):
            raise ValueError(f"decimal notation not accepted for exact values: {x!r}")
        return Fraction(s)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


def _check_bits(x: Fraction, cap: int) -> None:
    if x.numerator.bit_length() > cap or x.denominator.bit_length() > cap:
        raise BitLengthExceeded(f"coefficient exceeds {cap} bits during elimination")


@dataclass(frozen=True)
class RationalMatrix:
    """Immutable dense matrix of exact rationals.

    ``rows`` x ``cols`` may have a zero dimension; such matrices have rank 0.
    """

    rows: int
    cols: int
    data: tuple[tuple[Fraction, ...], ...] = field(repr=False)

    def __post_init__(self):
        if self.rows < 0 or self.cols < 0:
            raise ValueError("negative matrix dimension")
        if len(self.data) != self.rows or any(len(r) != self.cols for r in self.data):
            raise ValueError("entries do not match the declared shape")

    @classmethod
    def from_rows(cls, rows: Iterable[Iterable], cols: int | None = None) -> "RationalMatrix":
        data = tuple(tuple(to_rational(x) for x in r) for r in rows)
        if cols is None:
            cols = len(data[0]) if data else 0
        return cls(len(data), cols, data)

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "RationalMatrix":
        z = Fraction(0)
        return cls(rows, cols, tuple((z,) * cols for _ in range(rows)))

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls.from_rows([[int(i == j) for j in range(n)] for i in range(n)], cols=n)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.data[i][j]

    def row(self, i: int) -> tuple[Fraction, ...]:
        return self.data[i]

    def col(self, j: int) -> tuple[Fraction, ...]:
        return tuple(r[j] for r in self.data)

    def tolist(self) -> list[list[Fraction]]:
        return [list(r) for r in self.data]

    @property
    def T(self) -> "RationalMatrix":
        return RationalMatrix(self.cols, self.rows, tuple(tuple(r[j] for r in self.data) for j in range(self.cols)))

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "RationalMatrix":
        return RationalMatrix(len(rows), len(cols), tuple(tuple(self.data[i][j] for j in cols) for i in rows))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ocols = other.T.data
        zero = Fraction(0)
        out = tuple(
            tuple(sum((a * b for a, b in zip(r, c)), zero) for c in ocols) for r in self.data
        )
        return RationalMatrix(self.rows, other.cols, out)

    def _zip(self, other: "RationalMatrix", op) -> "RationalMatrix":
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        return RationalMatrix(
            self.rows, self.cols,
            tuple(tuple(op(a, b) for a, b in zip(r, s)) for r, s in zip(self.data, other.data)),
        )

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self._zip(other, lambda a, b: a - b)

    def map(self, fn) -> "RationalMatrix":
        return RationalMatrix(self.rows, self.cols, tuple(tuple(fn(x) for x in r) for r in self.data))

    def values(self) -> set[Fraction]:
        return {x for r in self.data for x in r}

    def __str__(self) -> str:
        return "\n".join(" ".join(str(x) for x in r) for r in self.data)


def as_matrix(m) -> RationalMatrix:
    return m if isinstance(m, RationalMatrix) else RationalMatrix.from_rows(m)


# --------------------------------------------------------------------------
# elimination


def _integer_rows(m: RationalMatrix) -> list[list[int]]:
    out = []
    for r in m.data:
        den = lcm(*(x.denominator for x in r)) if r else 1
        out.append([int(x * den) for x in r])
    return out


def rank(m, *, bit_cap: int = DEFAULT_BIT_CAP) -> int:
    """Exact rank by fraction-free (Bareiss) elimination on denominator-cleared rows."""
    m = as_matrix(m)
    a = _integer_rows(m)
    n, k = m.rows, m.cols
    r = 0
    prev = 1
    for c in range(k):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        p = a[r][c]
        for i in range(r + 1, n):
            ai = a[i]
            f = ai[c]
            row_r = a[r]
            for j in range(c + 1, k):
                ai[j] = (p * ai[j] - f * row_r[j]) // prev
            ai[c] = 0
            if bit_cap and any(x.bit_length() > bit_cap for x in ai):
                raise BitLengthExceeded(f"coefficient exceeds {bit_cap} bits during elimination")
        prev = p
        r += 1
        if r == n:
            break
    return r


def rref(m, *, bit_cap: int = DEFAULT_BIT_CAP) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form with pivot normalization.

    Returns the nonzero rows of the RREF and the list of pivot columns.
    """
    m = as_matrix(m)
    a = [list(r) for r in m.data]
    n, k = m.rows, m.cols
    pivots: list[int] = []
    r = 0
    for c in range(k):
        piv = next((i for i in range(r, n) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = 1 / a[r][c]
        a[r] = [x * inv for x in a[r]]
        row_r = a[r]
        for i in range(n):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], row_r)]
                if bit_cap:
                    for x in a[i]:
                        _check_bits(x, bit_cap)
        pivots.append(c)
        r += 1
        if r == n:
            break
    return a[:r], pivots


@dataclass(frozen=True)
class Factorization:
    """``left @ right`` equals the factored matrix exactly."""

    left: RationalMatrix
    right: RationalMatrix

    @property
    def inner_dim(self) -> int:
        return self.left.cols

    def product(self) -> RationalMatrix:
        return self.left @ self.right


def factorize(m) -> Factorization:
    """Canonical rank factorization from the reduced echelon form.

    The left factor holds the pivot columns of ``m``; the right factor is the
    nonzero part of ``rref(m)``. Inner dimension equals ``rank(m)``.
    """
    m = as_matrix(m)
    rows, pivots = rref(m)
    left = m.submatrix(range(m.rows), pivots)
    right = RationalMatrix(len(rows), m.cols, tuple(tuple(r) for r in rows))
    return Factorization(left, right)


# --------------------------------------------------------------------------
# polynomial maps


def kronecker_power(v: Sequence, c: int, *, cap: int = DEFAULT_INDEX_CAP) -> tuple[Fraction, ...]:
    """c-fold self-Kronecker product; entry at multi-index (k1..kc) is prod v[k_i].

    The first index is the most significant one.
    """
    if c < 0:
        raise ValueError("power must be nonnegative")
    v = [to_rational(x) for x in v]
    if len(v) ** c > cap:
        raise IndexSpaceExceeded(f"{len(v)}^{c} entries exceeds cap {cap}")
    out = [Fraction(1)]
    for _ in range(c):
        out = [x * y for x in out for y in v]
    return tuple(out)


@dataclass(frozen=True)
class SupportPolynomial:
    """Univariate polynomial with exact coefficients, stored sparsely by degree."""

    coefficients: Mapping[int, Fraction]

    def __post_init__(self):
        clean = {}
        for deg, c in dict(self.coefficients).items():
            if deg < 0:
                raise ValueError("negative degree")
            c = to_rational(c)
            if c != 0:
                clean[int(deg)] = c
        object.__setattr__(self, "coefficients", dict(sorted(clean.items())))

    @classmethod
    def from_coeffs(cls, coeffs: Sequence) -> "SupportPolynomial":
        """Build from ascending coefficients ``[c0, c1, ...]``."""
        return cls(dict(enumerate(coeffs)))

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(self.coefficients)

    @property
    def degree(self) -> int:
        return max(self.coefficients, default=-1)

    def __call__(self, z) -> Fraction:
        z = to_rational(z)
        return sum((c * z**d for d, c in self.coefficients.items()), Fraction(0))

    def __hash__(self):
        return hash(tuple(self.coefficients.items()))

    def __str__(self) -> str:
        if not self.coefficients:
            return "0"
        return " + ".join(f"{c}*z^{d}" for d, c in self.coefficients.items())


def entrywise_poly(m, p: SupportPolynomial) -> RationalMatrix:
    return as_matrix(m).map(p)


def poly_rank_certificate(m, p: SupportPolynomial, *, cap: int = DEFAULT_INDEX_CAP) -> tuple[Factorization, int]:
    """Explicit factorization of ``entrywise_poly(m, p)`` through tensor powers.

    With ``m = P Q`` canonical and ``d = rank(m)``, each monomial ``c z^k``
    contributes the block ``c * p_i^{(x)k}`` on the left and ``q_j^{(x)k}`` on the
    right, so the inner dimension is ``sum(d**k for k in support(p))``.
    """
    m = as_matrix(m)
    fac = factorize(m)
    d = fac.inner_dim
    bound = sum(d**k for k in p.support)
    if bound > cap:
        raise IndexSpaceExceeded(f"inner dimension {bound} exceeds cap {cap}")
    left_rows: list[list[Fraction]] = [[] for _ in range(m.rows)]
    right_rows: list[tuple[Fraction, ...]] = []
    qcols = [fac.right.col(j) for j in range(m.cols)]
    for k, coef in p.coefficients.items():
        for i in range(m.rows):
            left_rows[i].extend(coef * x for x in kronecker_power(fac.left.row(i), k, cap=cap))
        powered = [kronecker_power(q, k, cap=cap) for q in qcols]
        right_rows.extend(tuple(col[t] for col in powered) for t in range(d**k))
    left = RationalMatrix(m.rows, bound, tuple(tuple(r) for r in left_rows))
    right = RationalMatrix(bound, m.cols, tuple(right_rows))
    return Factorization(left, right), bound
