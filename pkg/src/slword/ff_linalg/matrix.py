"""Exact dense matrices over F_p.

Matrices are immutable: every operation returns a fresh value.  Entries are
canonical residues held in an int64 numpy array; the modulus bound enforced
by PrimeField guarantees single products never overflow, and matmul falls
back to exact Python integers in the (unusual) case where an accumulated dot
product could.
"""

from __future__ import annotations

from typing import Iterable, NamedTuple

import numpy as np

from ..errors import FieldMismatchError, ShapeError, SingularMatrixError
from .field import PrimeField

_I64_MAX = 2**63 - 1


def as_residues(field: PrimeField, data) -> np.ndarray:
    """Coerce array-like data to a canonical int64 residue array."""
    a = np.asarray(data, dtype=np.int64)
    return a % field.p


def vec(field: PrimeField, data) -> np.ndarray:
    v = as_residues(field, data)
    if v.ndim != 1:
        raise ShapeError(f"expected a vector, got shape {v.shape}")
    return v


def unit_vector(n: int, i: int) -> np.ndarray:
    e = np.zeros(n, dtype=np.int64)
    e[i] = 1
    return e


def _rref_in_place(a: np.ndarray, p: int) -> tuple[list[int], int]:
    """Fully reduce `a` (writable int64, canonical residues). Returns (pivots, rank)."""
    rows, cols = a.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            a[[r, pr]] = a[[pr, r]]
        inv = pow(int(a[r, c]), p - 2, p)
        a[r] = (a[r] * inv) % p
        for i in range(rows):
            if i != r and a[i, c]:
                a[i] = (a[i] - a[i, c] * a[r]) % p
        pivots.append(c)
        r += 1
    return pivots, r


class RrefResult(NamedTuple):
    matrix: "GFMatrix"
    pivot_cols: tuple[int, ...]
    rank: int


class GFMatrix:
    """An immutable rows x cols matrix over F_p."""

    __slots__ = ("field", "_a", "_hash")

    def __init__(self, field: PrimeField, entries):
        a = as_residues(field, entries)
        if a.ndim != 2:
            raise ShapeError(f"expected a 2-D array, got shape {a.shape}")
        if a.shape[0] < 1 or a.shape[1] < 1:
            raise ShapeError(f"matrix must be at least 1x1, got {a.shape}")
        a.setflags(write=False)
        self.field = field
        self._a = a
        self._hash = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def identity(cls, field: PrimeField, n: int) -> "GFMatrix":
        return cls(field, np.eye(n, dtype=np.int64))

    @classmethod
    def zeros(cls, field: PrimeField, rows: int, cols: int) -> "GFMatrix":
        return cls(field, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def diagonal(cls, field: PrimeField, entries: Iterable[int]) -> "GFMatrix":
        d = vec(field, list(entries))
        return cls(field, np.diag(d))

    @classmethod
    def from_columns(cls, field: PrimeField, columns: Iterable[np.ndarray]) -> "GFMatrix":
        return cls(field, np.column_stack(list(columns)))

    # -- basic accessors -----------------------------------------------------

    @property
    def array(self) -> np.ndarray:
        """The underlying read-only residue array."""
        return self._a

    @property
    def rows(self) -> int:
        return self._a.shape[0]

    @property
    def cols(self) -> int:
        return self._a.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self._a.shape

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def column(self, j: int) -> np.ndarray:
        return self._a[:, j].copy()

    def row(self, i: int) -> np.ndarray:
        return self._a[i].copy()

    def __eq__(self, other):
        return (
            isinstance(other, GFMatrix)
            and other.field == self.field
            and other.shape == self.shape
            and np.array_equal(other._a, self._a)
        )

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.field.p, self.shape, self._a.tobytes()))
        return self._hash

    def key(self) -> bytes:
        """Stable byte key, used by visited-set hashing in BFS."""
        return self._a.tobytes()

    def __repr__(self):
        body = "; ".join(" ".join(str(x) for x in row) for row in self._a)
        return f"GFMatrix(p={self.field.p}, [{body}])"

    def is_identity(self) -> bool:
        return self.is_square and np.array_equal(self._a, np.eye(self.rows, dtype=np.int64))

    # -- arithmetic ----------------------------------------------------------

    def _check_same_field(self, other: "GFMatrix"):
        if self.field != other.field:
            raise FieldMismatchError(f"F_{self.field.p} vs F_{other.field.p}")

    def __matmul__(self, other: "GFMatrix") -> "GFMatrix":
        self._check_same_field(other)
        if self.cols != other.rows:
            raise ShapeError(f"cannot multiply {self.shape} by {other.shape}")
        p = self.field.p
        if self.cols * (p - 1) ** 2 <= _I64_MAX:
            prod = (self._a @ other._a) % p
        else:
            # exact big-int fallback for large moduli
            prod = [
                [sum(int(x) * int(y) for x, y in zip(r, c)) % p for c in zip(*other._a.tolist())]
                for r in self._a.tolist()
            ]
        return GFMatrix(self.field, prod)

    def apply(self, v: np.ndarray) -> np.ndarray:
        """Matrix action on a column vector."""
        if v.shape != (self.cols,):
            raise ShapeError(f"cannot apply {self.shape} to vector of shape {v.shape}")
        p = self.field.p
        if self.cols * (p - 1) ** 2 <= _I64_MAX:
            return (self._a @ v) % p
        return np.array(
            [sum(int(x) * int(y) for x, y in zip(r, v.tolist())) % p for r in self._a.tolist()],
            dtype=np.int64,
        )

    def transpose(self) -> "GFMatrix":
        return GFMatrix(self.field, self._a.T)

    def scale(self, c: int) -> "GFMatrix":
        return GFMatrix(self.field, (self._a * (c % self.field.p)) % self.field.p)

    def det(self) -> int:
        """Determinant by Gaussian elimination, exact over F_p."""
        if not self.is_square:
            raise ShapeError("determinant of a non-square matrix")
        p = self.field.p
        a = self._a.copy()
        n = self.rows
        det = 1
        for c in range(n):
            nz = np.nonzero(a[c:, c])[0]
            if nz.size == 0:
                return 0
            r = c + int(nz[0])
            if r != c:
                a[[c, r]] = a[[r, c]]
                det = -det
            pivot = int(a[c, c])
            det = (det * pivot) % p
            inv = pow(pivot, p - 2, p)
            for i in range(c + 1, n):
                if a[i, c]:
                    a[i] = (a[i] - (a[i, c] * inv) % p * a[c]) % p
        return det % p

    def inv(self) -> "GFMatrix":
        if not self.is_square:
            raise ShapeError("inverse of a non-square matrix")
        p = self.field.p
        n = self.rows
        aug = np.concatenate([self._a.copy(), np.eye(n, dtype=np.int64)], axis=1)
        pivots, _ = _rref_in_place(aug, p)
        # invertible iff every pivot falls in the left half
        if pivots != list(range(n)):
            got = len([c for c in pivots if c < n])
            raise SingularMatrixError(f"matrix of rank {got} < {n} has no inverse")
        return GFMatrix(self.field, aug[:, n:])

    def rref(self) -> RrefResult:
        a = self._a.copy()
        pivots, rank = _rref_in_place(a, self.field.p)
        return RrefResult(GFMatrix(self.field, a), tuple(pivots), rank)

    def rank(self) -> int:
        a = self._a.copy()
        _, r = _rref_in_place(a, self.field.p)
        return r

    # -- block structure -----------------------------------------------------

    def submatrix(self, rows: slice, cols: slice) -> "GFMatrix":
        return GFMatrix(self.field, self._a[rows, cols])

    def embed_principal(self, n: int, offset: int) -> "GFMatrix":
        """Embed this square matrix as a principal block of I_n at `offset`."""
        if not self.is_square:
            raise ShapeError("block embedding requires a square matrix")
        if offset + self.rows > n:
            raise ShapeError("block does not fit")
        out = np.eye(n, dtype=np.int64)
        out[offset : offset + self.rows, offset : offset + self.cols] = self._a
        return GFMatrix(self.field, out)

    # -- text format ---------------------------------------------------------

    def to_text(self) -> str:
        """Serialize as 'p rows cols' header plus one line per row."""
        lines = [f"{self.field.p} {self.rows} {self.cols}"]
        lines.extend(" ".join(str(int(x)) for x in row) for row in self._a)
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "GFMatrix":
        lines = [ln for ln in text.splitlines() if ln.strip()]
        if not lines:
            raise ValueError("empty matrix text")
        head = lines[0].split()
        if len(head) != 3:
            raise ValueError(f"bad matrix header: {lines[0]!r}")
        p, rows, cols = (int(x) for x in head)
        if len(lines) != rows + 1:
            raise ValueError(f"expected {rows} rows, got {len(lines) - 1}")
        field = PrimeField(p)
        data = []
        for ln in lines[1:]:
            entries = [int(x) for x in ln.split()]
            if len(entries) != cols:
                raise ValueError(f"bad row width in {ln!r}")
            if any(x < 0 or x >= p for x in entries):
                raise ValueError(f"entry out of range [0, {p}) in {ln!r}")
            data.append(entries)
        return cls(field, data)
