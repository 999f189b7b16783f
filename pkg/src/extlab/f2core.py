"""Exact linear algebra over GF(2) with bit-packed rows.

Conventions, fixed repo-wide:

* A vector in F2^n is a Python int whose bit ``j`` (value ``(v >> j) & 1``)
  is coordinate ``j``.  Python ints give arbitrarily wide rows and word-level
  XOR for free; row XOR is the hot loop of every computation in this repo.
* A :class:`BitMatrix` with ``rows`` rows and ``cols`` columns represents a
  linear map F2^cols -> F2^rows.  Vectors are columns and maps act on the
  left: ``(m @ v)`` has bit ``i`` equal to ``<row_i, v>``.
* All outputs are canonical: rref is the unique reduced row-echelon form,
  ``solve`` returns the unique solution supported on pivot columns, and
  quotient complements are spanned by the non-pivot coordinates.  Everything
  downstream is therefore deterministic and cache files are reproducible.

Matrices and subspaces are immutable after construction and safe to share.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Sequence


class F2Error(ValueError):
    """Dimension mismatch or malformed input to a GF(2) operation."""


def popcount_parity(x: int) -> int:
    return x.bit_count() & 1


def vector_to_bits(v: int, n: int) -> list[int]:
    return [(v >> j) & 1 for j in range(n)]


class BitMatrix:
    """Immutable dense GF(2) matrix with one int per row."""

    __slots__ = ("rows", "cols", "data")

    def __init__(self, rows: int, cols: int, data: Sequence[int]):
        if rows < 0 or cols < 0:
            raise F2Error("negative dimensions")
        if len(data) != rows:
            raise F2Error(f"expected {rows} rows, got {len(data)}")
        mask = (1 << cols) - 1
        for r in data:
            if r & ~mask:
                raise F2Error("row has bits set beyond column count")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "data", tuple(data))

    def __setattr__(self, name, value):
        raise AttributeError("BitMatrix is immutable")

    @classmethod
    def zero(cls, rows: int, cols: int) -> "BitMatrix":
        return cls(rows, cols, [0] * rows)

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence[int]], cols: Optional[int] = None) -> "BitMatrix":
        rows = len(entries)
        if cols is None:
            cols = len(entries[0]) if rows else 0
        data = []
        for row in entries:
            if len(row) != cols:
                raise F2Error("ragged rows")
            acc = 0
            for j, e in enumerate(row):
                if e & 1:
                    acc |= 1 << j
            data.append(acc)
        return cls(rows, cols, data)

    @classmethod
    def from_columns(cls, columns: Sequence[int], rows: int) -> "BitMatrix":
        """Build the matrix whose j-th column is the vector ``columns[j]``."""
        data = [0] * rows
        for j, col in enumerate(columns):
            if col >> rows:
                raise F2Error("column has bits set beyond row count")
            while col:
                low = col & -col
                data[low.bit_length() - 1] |= 1 << j
                col ^= low
        return cls(rows, len(columns), data)

    def row(self, i: int) -> int:
        return self.data[i]

    def column(self, j: int) -> int:
        if not 0 <= j < self.cols:
            raise F2Error("column index out of range")
        acc = 0
        for i, r in enumerate(self.data):
            if (r >> j) & 1:
                acc |= 1 << i
        return acc

    def columns(self) -> list[int]:
        out = [0] * self.cols
        for i, r in enumerate(self.data):
            while r:
                low = r & -r
                out[low.bit_length() - 1] |= 1 << i
                r ^= low
        return out

    def get(self, i: int, j: int) -> int:
        return (self.data[i] >> j) & 1

    def mul_vec(self, v: int) -> int:
        """m @ v for a column vector v in F2^cols."""
        if v >> self.cols:
            raise F2Error("vector has bits set beyond column count")
        acc = 0
        for i, r in enumerate(self.data):
            if (r & v).bit_count() & 1:
                acc |= 1 << i
        return acc

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        if self.cols != other.rows:
            raise F2Error(f"shape mismatch: {self.shape} @ {other.shape}")
        data = []
        for r in self.data:
            acc = 0
            rr = r
            while rr:
                low = rr & -rr
                acc ^= other.data[low.bit_length() - 1]
                rr ^= low
            data.append(acc)
        return BitMatrix(self.rows, other.cols, data)

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        if self.shape != other.shape:
            raise F2Error("shape mismatch in sum")
        return BitMatrix(self.rows, self.cols, [a ^ b for a, b in zip(self.data, other.data)])

    def transpose(self) -> "BitMatrix":
        return BitMatrix.from_columns(self.data, self.cols)

    def hstack(self, other: "BitMatrix") -> "BitMatrix":
        if self.rows != other.rows:
            raise F2Error("row count mismatch in hstack")
        data = [a | (b << self.cols) for a, b in zip(self.data, other.data)]
        return BitMatrix(self.rows, self.cols + other.cols, data)

    def is_zero(self) -> bool:
        return not any(self.data)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def to_dense(self) -> list[list[int]]:
        return [vector_to_bits(r, self.cols) for r in self.data]

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.shape == other.shape
            and self.data == other.data
        )

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.data))

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _rref_rows(data: list[int], cols: int) -> tuple[list[int], list[int]]:
    """In-place full Gauss-Jordan; returns (rows, pivot columns)."""
    pivots: list[int] = []
    rank = 0
    nrows = len(data)
    for col in range(cols):
        bit = 1 << col
        pivot = -1
        for i in range(rank, nrows):
            if data[i] & bit:
                pivot = i
                break
        if pivot < 0:
            continue
        data[rank], data[pivot] = data[pivot], data[rank]
        prow = data[rank]
        for i in range(nrows):
            if i != rank and data[i] & bit:
                data[i] ^= prow
        pivots.append(col)
        rank += 1
    return data, pivots


@dataclass(frozen=True)
class RrefResult:
    matrix: "BitMatrix"
    pivots: tuple[int, ...]
    rank: int


def rref(m: BitMatrix) -> RrefResult:
    """Unique reduced row-echelon form of m, with pivot columns and rank."""
    data, pivots = _rref_rows(list(m.data), m.cols)
    return RrefResult(BitMatrix(m.rows, m.cols, data), tuple(pivots), len(pivots))


class Subspace:
    """A subspace of F2^n stored as a reduced row-echelon basis.

    Rows of ``basis`` are the basis vectors; pivot columns are strictly
    increasing and each pivot column has a single 1, so the representation
    is unique for the subspace.
    """

    __slots__ = ("ambient_dim", "basis", "pivots")

    def __init__(self, ambient_dim: int, basis: BitMatrix, pivots: tuple[int, ...]):
        if basis.cols != ambient_dim:
            raise F2Error("basis width does not match ambient dimension")
        if len(pivots) != basis.rows:
            raise F2Error("pivot count does not match basis rank")
        object.__setattr__(self, "ambient_dim", ambient_dim)
        object.__setattr__(self, "basis", basis)
        object.__setattr__(self, "pivots", pivots)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def from_rows(cls, vectors: Iterable[int], ambient_dim: int) -> "Subspace":
        data, pivots = _rref_rows(list(vectors), ambient_dim)
        data = [r for r in data if r]
        return cls(ambient_dim, BitMatrix(len(data), ambient_dim, data), tuple(pivots))

    @classmethod
    def full(cls, ambient_dim: int) -> "Subspace":
        return cls(ambient_dim, BitMatrix.identity(ambient_dim), tuple(range(ambient_dim)))

    @property
    def rank(self) -> int:
        return self.basis.rows

    def reduce(self, v: int) -> int:
        """Canonical representative of v modulo this subspace."""
        for row, p in zip(self.basis.data, self.pivots):
            if (v >> p) & 1:
                v ^= row
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def coordinates(self, v: int) -> Optional[int]:
        """Coefficients of v over the basis rows, or None if v is outside."""
        coords = 0
        for i, (row, p) in enumerate(zip(self.basis.data, self.pivots)):
            if (v >> p) & 1:
                v ^= row
                coords |= 1 << i
        return coords if v == 0 else None

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Subspace)
            and self.ambient_dim == other.ambient_dim
            and self.basis == other.basis
        )

    def __hash__(self) -> int:
        return hash((self.ambient_dim, self.basis))

    def __repr__(self) -> str:
        return f"Subspace(dim {self.rank} of F2^{self.ambient_dim})"


def kernel_basis(m: BitMatrix) -> Subspace:
    """Basis of {v : m @ v = 0}, canonicalized to reduced row-echelon form."""
    res = rref(m)
    pivot_set = set(res.pivots)
    vectors = []
    for j in range(m.cols):
        if j in pivot_set:
            continue
        v = 1 << j
        for r, p in zip(res.matrix.data, res.pivots):
            if (r >> j) & 1:
                v |= 1 << p
        vectors.append(v)
    return Subspace.from_rows(vectors, m.cols)


def column_space(m: BitMatrix) -> Subspace:
    return Subspace.from_rows(m.columns(), m.rows)


def rank(m: BitMatrix) -> int:
    return rref(m).rank


def solve(m: BitMatrix, b: int) -> Optional[int]:
    """Canonical x with m @ x = b, or None if the system is inconsistent.

    The solution is the one produced by rref back-substitution with all free
    variables set to zero; it is unique for given inputs.
    """
    if b >> m.rows:
        raise F2Error("right-hand side has bits set beyond row count")
    aug = [r | (((b >> i) & 1) << m.cols) for i, r in enumerate(m.data)]
    data, pivots = _rref_rows(aug, m.cols)
    bcol = 1 << m.cols
    x = 0
    for r, p in zip(data, pivots):
        if r & bcol:
            x |= 1 << p
    for i in range(len(pivots), m.rows):
        if data[i] & bcol:
            return None
    return x


class Solver:
    """Reusable solver for many right-hand sides against a fixed matrix.

    Precomputes E with E @ m in rref; solving costs one matrix-vector
    product.  Solutions agree bit-for-bit with :func:`solve`.
    """

    __slots__ = ("matrix", "_transform", "_pivots", "_rank")

    def __init__(self, m: BitMatrix):
        aug = [r | (1 << (m.cols + i)) for i, r in enumerate(m.data)]
        data, pivots = _rref_rows(aug, m.cols)
        mask = (1 << m.cols) - 1
        self.matrix = m
        self._transform = [r >> m.cols for r in data]
        self._pivots = pivots
        self._rank = len(pivots)

    @property
    def rank(self) -> int:
        return self._rank

    def solve(self, b: int) -> Optional[int]:
        if b >> self.matrix.rows:
            raise F2Error("right-hand side has bits set beyond row count")
        x = 0
        for r, p in zip(self._transform, self._pivots):
            if (r & b).bit_count() & 1:
                x |= 1 << p
        for i in range(self._rank, self.matrix.rows):
            if (self._transform[i] & b).bit_count() & 1:
                return None
        return x


def quotient_section(ambient_dim: int, sub: Subspace) -> tuple[BitMatrix, BitMatrix]:
    """Projection onto and section from the canonical complement of ``sub``.

    The complement is coordinatized by the non-pivot columns of the
    subspace basis.  Returns (proj, lift) with proj: F2^n -> F2^q and
    lift: F2^q -> F2^n satisfying proj @ lift = identity and
    kernel(proj) = sub.
    """
    if sub.ambient_dim != ambient_dim:
        raise F2Error("subspace ambient dimension mismatch")
    pivot_set = set(sub.pivots)
    free_cols = [j for j in range(ambient_dim) if j not in pivot_set]
    proj_rows = []
    for jk in free_cols:
        row = 1 << jk
        for r, p in zip(sub.basis.data, sub.pivots):
            if (r >> jk) & 1:
                row |= 1 << p
        proj_rows.append(row)
    proj = BitMatrix(len(free_cols), ambient_dim, proj_rows)
    lift_rows = [0] * ambient_dim
    for k, jk in enumerate(free_cols):
        lift_rows[jk] = 1 << k
    lift = BitMatrix(ambient_dim, len(free_cols), lift_rows)
    return proj, lift


class EchelonAccumulator:
    """Mutable reduced-echelon span; the engine's complement chooser.

    ``add`` returns the fully reduced remainder of the vector against the
    current span (0 if dependent) and, when nonzero, inserts it while
    keeping the stored rows reduced against each other.  Insertion order
    determines nothing about the final span but makes remainders canonical
    for a fixed feed order.
    """

    __slots__ = ("ambient_dim", "_rows", "_pivots")

    def __init__(self, ambient_dim: int):
        self.ambient_dim = ambient_dim
        self._rows: list[int] = []
        self._pivots: list[int] = []

    @property
    def rank(self) -> int:
        return len(self._rows)

    def reduce(self, v: int) -> int:
        for row, p in zip(self._rows, self._pivots):
            if (v >> p) & 1:
                v ^= row
        return v

    def add(self, v: int) -> int:
        v = self.reduce(v)
        if v == 0:
            return 0
        p = v.bit_length() - 1
        # keep earlier rows reduced against the new pivot
        for i, row in enumerate(self._rows):
            if (row >> p) & 1:
                self._rows[i] = row ^ v
        idx = 0
        while idx < len(self._pivots) and self._pivots[idx] > p:
            idx += 1
        self._rows.insert(idx, v)
        self._pivots.insert(idx, p)
        return v

    def contains(self, v: int) -> bool:
        return self.reduce(v) == 0

    def rows(self) -> list[int]:
        return list(self._rows)

    def subspace(self) -> Subspace:
        return Subspace.from_rows(list(self._rows), self.ambient_dim)
