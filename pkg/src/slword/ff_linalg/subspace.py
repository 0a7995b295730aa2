"""Subspaces of F_p^n in canonical reduced-row-echelon form.

Two Subspace values describe the same subspace exactly when their basis
arrays are entry-wise identical, so equality and hashing are cheap.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from ..errors import ShapeError
from .field import PrimeField
from .matrix import GFMatrix, _rref_in_place, as_residues


class Subspace:
    __slots__ = ("field", "ambient_dim", "_basis", "pivot_cols")

    def __init__(self, field: PrimeField, ambient_dim: int, basis: np.ndarray, pivot_cols: tuple[int, ...]):
        # internal: callers go through span()
        basis = basis.astype(np.int64, copy=True)
        basis.setflags(write=False)
        self.field = field
        self.ambient_dim = ambient_dim
        self._basis = basis
        self.pivot_cols = pivot_cols

    @classmethod
    def span(cls, field: PrimeField, vectors: Iterable[np.ndarray], ambient_dim: int | None = None) -> "Subspace":
        vs = [as_residues(field, v) for v in vectors]
        if ambient_dim is None:
            if not vs:
                raise ShapeError("cannot infer ambient dimension from an empty span")
            ambient_dim = len(vs[0])
        for v in vs:
            if v.shape != (ambient_dim,):
                raise ShapeError(f"vector of shape {v.shape} in ambient dimension {ambient_dim}")
        if not vs:
            return cls(field, ambient_dim, np.zeros((0, ambient_dim), dtype=np.int64), ())
        stacked = np.vstack(vs)
        pivots, rank = _rref_in_place(stacked, field.p)
        return cls(field, ambient_dim, stacked[:rank], tuple(pivots))

    @classmethod
    def zero(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        return cls.span(field, [], ambient_dim)

    @classmethod
    def full(cls, field: PrimeField, ambient_dim: int) -> "Subspace":
        return cls.span(field, np.eye(ambient_dim, dtype=np.int64), ambient_dim)

    @classmethod
    def coordinate_span(cls, field: PrimeField, ambient_dim: int, coords: Sequence[int]) -> "Subspace":
        """Span of the standard basis vectors with the given indices."""
        rows = np.zeros((len(coords), ambient_dim), dtype=np.int64)
        for r, c in enumerate(coords):
            rows[r, c] = 1
        return cls.span(field, rows, ambient_dim)

    @classmethod
    def head(cls, field: PrimeField, n: int, t: int) -> "Subspace":
        """<e_1, ..., e_t>: the first t coordinates."""
        return cls.coordinate_span(field, n, range(t))

    @classmethod
    def tail(cls, field: PrimeField, n: int, t: int) -> "Subspace":
        """<e_{t+1}, ..., e_n>: the last n - t coordinates."""
        return cls.coordinate_span(field, n, range(t, n))

    # ------------------------------------------------------------------

    @property
    def dim(self) -> int:
        return self._basis.shape[0]

    @property
    def basis_rows(self) -> np.ndarray:
        return self._basis

    def __eq__(self, other):
        return (
            isinstance(other, Subspace)
            and other.field == self.field
            and other.ambient_dim == self.ambient_dim
            and other._basis.shape == self._basis.shape
            and np.array_equal(other._basis, self._basis)
        )

    def __hash__(self):
        return hash((self.field.p, self.ambient_dim, self._basis.tobytes()))

    def __repr__(self):
        return f"Subspace(p={self.field.p}, dim={self.dim}, ambient={self.ambient_dim})"

    def reduce(self, v: np.ndarray) -> np.ndarray:
        """Residual of v after eliminating against the basis (zero iff v is a member)."""
        p = self.field.p
        w = as_residues(self.field, v).copy()
        for row, pc in zip(self._basis, self.pivot_cols):
            c = int(w[pc])
            if c:
                w = (w - c * row) % p
        return w

    def contains(self, v: np.ndarray) -> bool:
        return not self.reduce(v).any()

    def contains_subspace(self, other: "Subspace") -> bool:
        return all(self.contains(row) for row in other._basis)

    def sum(self, other: "Subspace") -> "Subspace":
        self._check_compatible(other)
        return Subspace.span(
            self.field, np.vstack([self._basis, other._basis]), self.ambient_dim
        )

    def perp(self) -> "Subspace":
        """Orthogonal complement under the standard dot product.

        The form is non-degenerate over F_p, so dim(perp) = n - dim and
        perp(perp(U)) = U; intersections reduce to sums of complements.
        """
        n = self.ambient_dim
        p = self.field.p
        if self.dim == 0:
            return Subspace.full(self.field, n)
        # solve basis @ x = 0
        a = self._basis.copy()
        pivots, rank = _rref_in_place(a, p)
        free = [c for c in range(n) if c not in pivots]
        out = np.zeros((len(free), n), dtype=np.int64)
        for k, fc in enumerate(free):
            out[k, fc] = 1
            for r, pc in enumerate(pivots):
                out[k, pc] = (-a[r, fc]) % p
        return Subspace.span(self.field, out, n)

    def intersect(self, other: "Subspace") -> "Subspace":
        self._check_compatible(other)
        return self.perp().sum(other.perp()).perp()

    def image_under(self, m: GFMatrix) -> "Subspace":
        """The subspace {m v : v in self}."""
        if m.cols != self.ambient_dim:
            raise ShapeError("matrix does not act on this ambient space")
        if self.dim == 0:
            return Subspace.zero(self.field, m.rows)
        images = (self._basis @ m.array.T) % self.field.p
        return Subspace.span(self.field, images, m.rows)

    def _check_compatible(self, other: "Subspace"):
        if self.field != other.field or self.ambient_dim != other.ambient_dim:
            raise ShapeError("subspaces live in different ambient spaces")


def project_head(v: np.ndarray, t: int) -> np.ndarray:
    """Keep coordinates 1..t, zero the rest (the projection onto <e_1..e_t>)."""
    out = np.array(v, dtype=np.int64, copy=True)
    out[t:] = 0
    return out


def project_tail(v: np.ndarray, t: int) -> np.ndarray:
    """Keep coordinates t+1..n, zero the rest (the projection onto <e_{t+1}..e_n>)."""
    out = np.array(v, dtype=np.int64, copy=True)
    out[:t] = 0
    return out


def complete_to_basis(field: PrimeField, vectors: Sequence[np.ndarray], ambient: Subspace) -> list[np.ndarray]:
    """Extend independent `vectors` (all inside `ambient`) to a basis of `ambient`.

    Extension vectors are drawn greedily from ambient's canonical basis rows
    in index order, so the result is deterministic.
    """
    vs = [as_residues(field, v) for v in vectors]
    for v in vs:
        if not ambient.contains(v):
            raise ValueError("input vector lies outside the ambient subspace")
    span = Subspace.span(field, vs, ambient.ambient_dim)
    if span.dim != len(vs):
        raise ValueError("input vectors are linearly dependent")
    out = list(vs)
    for row in ambient.basis_rows:
        if span.dim == ambient.dim:
            break
        if not span.contains(row):
            out.append(row.copy())
            span = Subspace.span(field, out, ambient.ambient_dim)
    if span.dim != ambient.dim:
        raise ValueError("could not complete to a basis")  # unreachable for valid inputs
    return out
