"""Generating sets, words with a step-cost model, and the block subgroup.

A Word is a sequence of steps, each either a reference to a generator (with
an inverse flag) or an arbitrary payload X in SL_{n-t} realized through the
block subgroup.  Words evaluate left to right: the product of the step
matrices in list order, acting on column vectors from the left.  Hence
evaluate(w1 + w2) = evaluate(w1) @ evaluate(w2).
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from fractions import Fraction
from typing import Iterator, NamedTuple, Sequence

import numpy as np

from .errors import FieldMismatchError, ParameterError, ShapeError
from .ff_linalg import GFMatrix, PrimeField, Subspace, as_residues, sl_map_vector

DEFAULT_BLOCK_STEP_COST = 4


@dataclass(frozen=True)
class Generator:
    """A named determinant-one matrix with a positive step cost."""

    label: str
    matrix: GFMatrix
    cost: int = 1

    def __post_init__(self):
        if not self.label or any(c.isspace() for c in self.label):
            raise ValueError(f"generator label must be a non-empty token, got {self.label!r}")
        if not self.matrix.is_square:
            raise ShapeError("generators must be square matrices")
        if self.cost < 1:
            raise ValueError("generator cost must be >= 1")
        d = self.matrix.det()
        if d != 1:
            raise ParameterError(f"generator {self.label!r} has determinant {d} != 1")


class GeneratorSet:
    """An ordered set of generators of (a subgroup of) SL_n(F_p)."""

    def __init__(self, generators: Sequence[Generator], symmetric: bool = False):
        if not generators:
            raise ValueError("a generating set needs at least one generator")
        first = generators[0].matrix
        for g in generators:
            if g.matrix.field != first.field:
                raise FieldMismatchError("generators over different fields")
            if g.matrix.shape != first.shape:
                raise ShapeError("generators of different sizes")
        self.generators = tuple(generators)
        self.n = first.rows
        self.field = first.field
        self.symmetric = symmetric
        self._mats = [g.matrix for g in generators]
        self._invs: list[GFMatrix | None] = [None] * len(generators)
        if symmetric:
            self._verify_symmetric()

    def _verify_symmetric(self):
        keys = {g.matrix.key() for g in self.generators}
        for i, g in enumerate(self.generators):
            if self.inverse_matrix(i).key() not in keys:
                raise ParameterError(
                    f"set flagged symmetric but {g.label!r} has no inverse member"
                )

    def __len__(self):
        return len(self.generators)

    def __iter__(self) -> Iterator[Generator]:
        return iter(self.generators)

    def matrix(self, index: int) -> GFMatrix:
        return self._mats[index]

    def inverse_matrix(self, index: int) -> GFMatrix:
        inv = self._invs[index]
        if inv is None:
            inv = self._mats[index].inv()
            self._invs[index] = inv
        return inv

    def step_matrix(self, index: int, inverse: bool = False) -> GFMatrix:
        return self.inverse_matrix(index) if inverse else self.matrix(index)

    def with_extra(self, extra: Sequence[Generator], symmetric: bool | None = None) -> "GeneratorSet":
        return GeneratorSet(
            list(self.generators) + list(extra),
            self.symmetric if symmetric is None else symmetric,
        )


@dataclass(frozen=True)
class Groumvirate:
    """The block-embedded copy of SL_{n-t} fixing the first t coordinates.

    Elements are the matrices block-diag(I_t, X) with X in SL_{n-t}(F_p),
    written in the standard basis.  Each element counts as one word step of
    cost `step_cost` regardless of X.
    """

    n: int
    t: int
    step_cost: int = DEFAULT_BLOCK_STEP_COST

    def __post_init__(self):
        if not (1 <= self.t <= self.n - 2):
            raise ParameterError(f"need 1 <= t <= n-2, got t={self.t}, n={self.n}")
        if self.step_cost < 1:
            raise ParameterError("step cost must be >= 1")

    @property
    def block_dim(self) -> int:
        return self.n - self.t

    def check_payload(self, x: GFMatrix):
        if x.shape != (self.block_dim, self.block_dim):
            raise ShapeError(
                f"payload must be {self.block_dim}x{self.block_dim}, got {x.shape}"
            )
        d = x.det()
        if d != 1:
            raise ParameterError(f"payload determinant {d} != 1")

    def embed(self, x: GFMatrix) -> GFMatrix:
        self.check_payload(x)
        return x.embed_principal(self.n, self.t)

    def head(self, f: PrimeField) -> Subspace:
        return Subspace.head(f, self.n, self.t)

    def tail(self, f: PrimeField) -> Subspace:
        return Subspace.tail(f, self.n, self.t)


@dataclass(frozen=True)
class GenStep:
    index: int
    inverse: bool = False


@dataclass(frozen=True)
class BlockStep:
    payload: GFMatrix


Step = GenStep | BlockStep


@dataclass(frozen=True)
class Word:
    """An immutable sequence of steps; concatenation mirrors matrix products."""

    steps: tuple[Step, ...] = dc_field(default=())

    @classmethod
    def empty(cls) -> "Word":
        return cls(())

    @classmethod
    def single(cls, step: Step) -> "Word":
        return cls((step,))

    def __add__(self, other: "Word") -> "Word":
        return Word(self.steps + other.steps)

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def inverse(self) -> "Word":
        inv_steps = []
        for s in reversed(self.steps):
            if isinstance(s, GenStep):
                inv_steps.append(GenStep(s.index, not s.inverse))
            else:
                inv_steps.append(BlockStep(s.payload.inv()))
        return Word(tuple(inv_steps))


def evaluate_word(word: Word, gs: GeneratorSet, gv: Groumvirate | None = None) -> GFMatrix:
    """The product of step matrices in list order (an element of SL_n)."""
    acc = GFMatrix.identity(gs.field, gs.n)
    for s in word:
        if isinstance(s, GenStep):
            if not (0 <= s.index < len(gs)):
                raise IndexError(f"generator index {s.index} out of range")
            acc = acc @ gs.step_matrix(s.index, s.inverse)
        else:
            if gv is None:
                raise ParameterError("word contains block steps but no block subgroup was given")
            acc = acc @ gv.embed(s.payload)
    return acc


def word_cost(word: Word, gs: GeneratorSet, gv: Groumvirate | None = None) -> int:
    """Total cost: generator steps cost generator.cost, block steps cost gv.step_cost."""
    total = 0
    for s in word:
        if isinstance(s, GenStep):
            total += gs.generators[s.index].cost
        else:
            if gv is None:
                raise ParameterError("word contains block steps but no block subgroup was given")
            total += gv.step_cost
    return total


def groumvirate_step(x: GFMatrix, gv: Groumvirate) -> Word:
    """A one-step word evaluating to block-diag(I_t, x)."""
    gv.check_payload(x)
    return Word.single(BlockStep(x))


def pi2_retarget(
    field: PrimeField, v: np.ndarray, w: np.ndarray, gv: Groumvirate
) -> Word:
    """One block step M with tail(M v) = w and head(M v) = head(v).

    Requires the tail projection of v to be nonzero (the block subgroup fixes
    vectors supported on the first t coordinates) and w a nonzero vector of
    the tail space.
    """
    v = as_residues(field, v)
    w = as_residues(field, w)
    t = gv.t
    if v.shape != (gv.n,) or w.shape != (gv.n,):
        raise ShapeError("vectors must have length n")
    if not v[t:].any():
        raise ParameterError("tail projection of v is zero; the block subgroup cannot move it")
    if not w.any():
        raise ParameterError("target w must be nonzero")
    if w[:t].any():
        raise ParameterError("target w must lie in the tail coordinate span")
    x = sl_map_vector(field, v[t:], w[t:], gv.block_dim)
    return groumvirate_step(x, gv)


class DensityBound(NamedTuple):
    exponent: Fraction
    c_eps: Fraction


def density_threshold(n: int, t: int, d) -> DensityBound:
    """Exact exponents for the size threshold |A| >= q^E.

    E(n, t, d) = (1 - 1/d) n^2 + (1/d)(n - t)^2 and
    c_eps = (1 - (1 - eps)^2)/d with eps = t/n, both as exact rationals.
    """
    if not (0 <= t <= n):
        raise ParameterError(f"need 0 <= t <= n, got t={t}, n={n}")
    d = Fraction(d)
    if d <= 0:
        raise ParameterError("d must be positive")
    exponent = (1 - 1 / d) * n * n + Fraction(1, 1) / d * (n - t) ** 2
    eps = Fraction(t, n)
    c_eps = (1 - (1 - eps) ** 2) / d
    return DensityBound(Fraction(exponent), Fraction(c_eps))


def random_sl(rng: random.Random, field: PrimeField, m: int) -> GFMatrix:
    """A pseudo-random element of SL_m(F_p): product of unit triangular factors."""
    p = field.p
    lo = np.eye(m, dtype=np.int64)
    up = np.eye(m, dtype=np.int64)
    for i in range(m):
        for j in range(i):
            lo[i, j] = rng.randrange(p)
            up[j, i] = rng.randrange(p)
    return GFMatrix(field, lo) @ GFMatrix(field, up)


def random_word(
    rng: random.Random,
    gs: GeneratorSet,
    gv: Groumvirate | None,
    length: int,
    block_prob: float = 0.5,
) -> Word:
    """A seeded random word mixing generator steps and block steps."""
    steps: list[Step] = []
    for _ in range(length):
        if gv is not None and rng.random() < block_prob:
            steps.append(BlockStep(random_sl(rng, gs.field, gv.block_dim)))
        else:
            idx = rng.randrange(len(gs))
            inv = gs.symmetric and rng.random() < 0.5
            steps.append(GenStep(idx, inv))
    return Word(tuple(steps))


# -- serialization -----------------------------------------------------------


def generator_set_to_text(gs: GeneratorSet, gv: Groumvirate) -> str:
    """Header 'p n t count', then per generator 'label cost' and an n x n block."""
    if gv.n != gs.n:
        raise ShapeError("block subgroup dimension does not match the generating set")
    lines = [f"{gs.field.p} {gs.n} {gv.t} {len(gs)}"]
    for g in gs:
        lines.append(f"{g.label} {g.cost}")
        for row in g.matrix.array:
            lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + "\n"


def generator_set_from_text(
    text: str, step_cost: int = DEFAULT_BLOCK_STEP_COST
) -> tuple[GeneratorSet, Groumvirate]:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty generator-set text")
    p, n, t, count = (int(x) for x in lines[0].split())
    field = PrimeField(p)
    pos = 1
    gens = []
    for _ in range(count):
        label, cost = lines[pos].split()
        pos += 1
        block = lines[pos : pos + n]
        pos += n
        mat = GFMatrix(field, [[int(x) for x in ln.split()] for ln in block])
        gens.append(Generator(label, mat, int(cost)))
    # flag symmetric only when closure actually holds
    keys = {g.matrix.key() for g in gens}
    symmetric = all(g.matrix.inv().key() in keys for g in gens)
    return GeneratorSet(gens, symmetric=symmetric), Groumvirate(n, t, step_cost)


def word_to_text(word: Word) -> str:
    """One line per step: 'G <index> <0|1>' or 'V' followed by payload rows."""
    lines = []
    for s in word:
        if isinstance(s, GenStep):
            lines.append(f"G {s.index} {1 if s.inverse else 0}")
        else:
            lines.append("V")
            for row in s.payload.array:
                lines.append(" ".join(str(int(x)) for x in row))
    return "\n".join(lines) + ("\n" if lines else "")


def word_from_text(text: str, gs: GeneratorSet, gv: Groumvirate) -> Word:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    steps: list[Step] = []
    pos = 0
    m = gv.block_dim
    while pos < len(lines):
        head = lines[pos].split()
        if head[0] == "G":
            idx, inv = int(head[1]), int(head[2])
            if not (0 <= idx < len(gs)):
                raise ValueError(f"generator index {idx} out of range")
            steps.append(GenStep(idx, bool(inv)))
            pos += 1
        elif head[0] == "V":
            block = lines[pos + 1 : pos + 1 + m]
            if len(block) < m:
                raise ValueError("truncated block payload")
            payload = GFMatrix(gs.field, [[int(x) for x in ln.split()] for ln in block])
            gv.check_payload(payload)
            steps.append(BlockStep(payload))
            pos += 1 + m
        else:
            raise ValueError(f"bad word line: {lines[pos]!r}")
    return Word(tuple(steps))
