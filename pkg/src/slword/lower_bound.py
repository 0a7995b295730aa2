"""The hard generating set, its potential function, and exact BFS covering.

The generating set couples the full block copy of SL_{n-t} (every element a
single cost-1 generator) with the t signed swaps e_i -> -e_{i+1},
e_{i+1} -> e_i.  A potential attached to the head basis vectors drops by at
most one per generator step, which certifies that any word for the
coordinate-swap normal form needs at least t(t+1)/2 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .errors import ParameterError
from .ff_linalg import GFMatrix, PrimeField
from .group_model import (
    GenStep,
    Generator,
    GeneratorSet,
    Groumvirate,
    Word,
    evaluate_word,
)
from .word_builder import unsigned_block_swap


def signed_swap_matrix(field: PrimeField, n: int, i: int) -> GFMatrix:
    """e_i -> -e_{i+1}, e_{i+1} -> e_i (0-based i), fixing the other basis vectors."""
    if not (0 <= i < n - 1):
        raise ParameterError(f"swap index {i} out of range for n={n}")
    a = np.eye(n, dtype=np.int64)
    a[i, i] = a[i + 1, i + 1] = 0
    a[i + 1, i] = -1 % field.p
    a[i, i + 1] = 1
    return GFMatrix(field, a)


class LowerBoundSet(NamedTuple):
    gs: GeneratorSet
    gv: Groumvirate


def lb_generating_set(field: PrimeField, n: int) -> LowerBoundSet:
    """Signed swaps as explicit cost-1 generators plus the block subgroup.

    t = ceil(n/3).  Because the block elements literally belong to the set,
    block steps carry cost 1 here rather than the default 4.
    """
    if n < 3:
        raise ParameterError(f"need n >= 3, got n={n}")
    t = math.ceil(n / 3)
    gens = []
    seen = set()
    for i in range(t):
        s = signed_swap_matrix(field, n, i)
        gens.append(Generator(f"s{i + 1}", s, cost=1))
        seen.add(s.key())
        s_inv = s.inv()
        if s_inv.key() not in seen:
            gens.append(Generator(f"s{i + 1}~", s_inv, cost=1))
            seen.add(s_inv.key())
    gs = GeneratorSet(gens, symmetric=True)
    gv = Groumvirate(n, t, step_cost=1)
    return LowerBoundSet(gs, gv)


def sl_order(n: int, p: int) -> int:
    """|SL_n(F_p)| = p^(n(n-1)/2) * prod_{k=2..n} (p^k - 1)."""
    order = p ** (n * (n - 1) // 2)
    for k in range(2, n + 1):
        order *= p**k - 1
    return order


def enumerate_sl(field: PrimeField, m: int, cap: int = 2_000_000) -> list[GFMatrix]:
    """All of SL_m(F_p) by brute force over the p^(m^2) entry tuples."""
    total = field.p ** (m * m)
    if total > cap:
        raise ParameterError(f"p^(m^2) = {total} exceeds enumeration cap {cap}")
    out = []
    for code in range(total):
        entries = []
        c = code
        for _ in range(m * m):
            entries.append(c % field.p)
            c //= field.p
        mat = GFMatrix(field, np.array(entries, dtype=np.int64).reshape(m, m))
        if mat.det() == 1:
            out.append(mat)
    assert len(out) == sl_order(m, field.p)
    return out


def block_generators(field: PrimeField, gv: Groumvirate, cap: int = 2_000_000) -> list[Generator]:
    """The embedded block subgroup as explicit cost-1 generators (small cases)."""
    gens = []
    for i, x in enumerate(enumerate_sl(field, gv.block_dim, cap)):
        gens.append(Generator(f"b{i}", gv.embed(x), cost=1))
    return gens


def lb_generating_set_explicit(field: PrimeField, n: int, cap: int = 2_000_000) -> GeneratorSet:
    """The hard set with its block subgroup enumerated into explicit generators."""
    gs, gv = lb_generating_set(field, n)
    return gs.with_extra(block_generators(field, gv, cap), symmetric=True)


# -- potential traces ---------------------------------------------------------


@dataclass(frozen=True)
class PotentialTrace:
    """d_0, ..., d_k and the frozen index sets F_l along a word.

    Steps are walked in application order (the last stored factor acts
    first), so the l-th prefix is the product of the last l step matrices
    and the final prefix equals the evaluated word.
    """

    word: Word
    d_values: tuple[int, ...]
    f_sets: tuple[frozenset[int], ...]
    signed: bool

    @property
    def d0(self) -> int:
        return self.d_values[0]


def _step_matrices_application_order(word: Word, gs: GeneratorSet, gv: Groumvirate):
    for s in reversed(word.steps):
        if isinstance(s, GenStep):
            yield gs.step_matrix(s.index, s.inverse), True
        else:
            yield gv.embed(s.payload), False


def potential_trace(
    word: Word,
    gs: GeneratorSet,
    gv: Groumvirate,
    t: int | None = None,
    signed: bool = False,
) -> PotentialTrace:
    """Track where the head basis vectors travel and score each prefix.

    An index i contributes t+1-j while every prefix so far has kept e_i
    inside the head basis set and the current prefix sends it to position j.
    With `signed` False (the default) membership and position ignore the
    +-1 factor picked up from signed swaps; with `signed` True the literal
    vector must equal e_j, a reading under which single steps can drop the
    potential by more than one (see verify_descent).
    """
    t = gv.t if t is None else t
    n = gs.n
    p = gs.field.p
    cols = np.eye(n, t, dtype=np.int64)  # images of e_1..e_t under the prefix
    in_f = [True] * t

    def score() -> int:
        total = 0
        for i in range(t):
            if not in_f[i]:
                continue
            col = cols[:, i]
            nz = np.nonzero(col)[0]
            if len(nz) != 1:
                continue
            j = int(nz[0])
            val = int(col[j])
            unit = val == 1 if signed else val in (1, p - 1)
            if unit and j <= t:  # contributes t+1-j for positions 1..t+1, else 0
                total += t - j
        return total

    def refresh_f():
        for i in range(t):
            if not in_f[i]:
                continue
            col = cols[:, i]
            nz = np.nonzero(col)[0]
            ok = False
            if len(nz) == 1 and int(nz[0]) < t:
                val = int(col[nz[0]])
                ok = val == 1 if signed else val in (1, p - 1)
            if not ok:
                in_f[i] = False

    refresh_f()
    d_values = [score()]
    f_sets = [frozenset(i + 1 for i in range(t) if in_f[i])]
    for mat, is_generator in _step_matrices_application_order(word, gs, gv):
        prev_d = d_values[-1]
        cols = (mat.array @ cols) % p
        refresh_f()
        d = score()
        if not is_generator:
            # a block step fixes every e_j with j <= t, so the score is unchanged
            assert d == prev_d, "block step changed the potential"
        d_values.append(d)
        f_sets.append(frozenset(i + 1 for i in range(t) if in_f[i]))
    return PotentialTrace(word, tuple(d_values), tuple(f_sets), signed)


def verify_descent(trace: PotentialTrace) -> bool:
    """True when d_{l+1} >= d_l - 1 at every step."""
    d = trace.d_values
    return all(d[l + 1] >= d[l] - 1 for l in range(len(d) - 1))


@dataclass(frozen=True)
class Certificate:
    d0: int
    word_length: int
    binom_display: int  # t(t-1)/2, the weaker displayed constant


def lower_bound_certificate(
    word: Word, gs: GeneratorSet, gv: Groumvirate, t: int | None = None
) -> Certificate:
    """Replay the descent argument against a word for the swap normal form.

    Requires evaluate(word) to equal the unsigned block swap; the final
    potential is then zero, each step loses at most one, so the word length
    is at least d_0 = t(t+1)/2.  Both d_0 and the weaker t(t-1)/2 constant
    are reported.
    """
    t = gv.t if t is None else t
    target = unsigned_block_swap(gs.field, gs.n, t)
    if evaluate_word(word, gs, gv) != target:
        raise ParameterError("word does not evaluate to the block swap target")
    trace = potential_trace(word, gs, gv, t=t, signed=False)
    assert trace.d_values[-1] == 0
    assert verify_descent(trace)
    d0 = t * (t + 1) // 2
    assert trace.d0 == d0
    if len(word) < d0:
        raise AssertionError(
            f"descent contradiction: word of length {len(word)} below the bound {d0}"
        )
    return Certificate(d0=d0, word_length=len(word), binom_display=t * (t - 1) // 2)


# -- exact breadth-first covering ----------------------------------------------


@dataclass
class BfsResult:
    group_order: int
    covering_number: int | None
    reached_per_depth: list[int]  # newly reached at each depth (depth 0 = identity)
    frontier_per_depth: list[int]
    total_reached: int
    stabilized: bool  # closure stopped growing below the group order
    exhausted: bool  # max_depth hit before closure completed


def _symmetric_edge_matrices(gs: GeneratorSet) -> list[GFMatrix]:
    mats = []
    seen = set()
    for i in range(len(gs)):
        for m in (gs.matrix(i), gs.inverse_matrix(i)):
            if m.key() not in seen:
                seen.add(m.key())
                mats.append(m)
    return mats


def bfs_covering(
    gs: GeneratorSet,
    max_depth: int | None = None,
    element_cap: int = 10_000_000,
) -> BfsResult:
    """Exact closure A^k from the identity until the whole group is covered.

    The generator list is closed under inverses before the walk.  Refuses to
    start when |SL_n(F_p)| exceeds `element_cap`.
    """
    order = sl_order(gs.n, gs.field.p)
    if order > element_cap:
        raise ParameterError(f"|SL_{gs.n}(F_{gs.field.p})| = {order} exceeds cap {element_cap}")
    edges = [m.array for m in _symmetric_edge_matrices(gs)]
    p = gs.field.p
    ident = np.eye(gs.n, dtype=np.int64)
    visited = {ident.tobytes()}
    frontier = [ident]
    reached = [1]
    frontier_sizes = [1]
    depth = 0
    while frontier and len(visited) < order:
        if max_depth is not None and depth >= max_depth:
            return BfsResult(
                group_order=order,
                covering_number=None,
                reached_per_depth=reached,
                frontier_per_depth=frontier_sizes,
                total_reached=len(visited),
                stabilized=False,
                exhausted=True,
            )
        nxt = []
        for cur in frontier:
            for g in edges:
                new = (cur @ g) % p
                key = new.tobytes()
                if key not in visited:
                    visited.add(key)
                    nxt.append(new)
        depth += 1
        reached.append(len(nxt))
        frontier_sizes.append(len(nxt))
        frontier = nxt
    complete = len(visited) == order
    return BfsResult(
        group_order=order,
        covering_number=depth if complete else None,
        reached_per_depth=reached,
        frontier_per_depth=frontier_sizes,
        total_reached=len(visited),
        stabilized=not complete,
        exhausted=False,
    )


def bfs_shortest_word(
    gs: GeneratorSet, target: GFMatrix, max_depth: int = 64
) -> Word | None:
    """A minimum-length word over the explicit generators evaluating to target.

    Walks right multiplications so the recovered step list, read in order,
    multiplies out to the target.  Inverse flags are used for edges that are
    inverses of declared generators.
    """
    p = gs.field.p
    steps: list[tuple[GenStep, np.ndarray]] = []
    seen_edges = set()
    for i in range(len(gs)):
        for inv in (False, True):
            m = gs.step_matrix(i, inv)
            if m.key() in seen_edges:
                continue
            seen_edges.add(m.key())
            steps.append((GenStep(i, inv), m.array))
    ident = np.eye(gs.n, dtype=np.int64)
    tkey = target.array.tobytes()
    parents: dict[bytes, tuple[bytes, GenStep] | None] = {ident.tobytes(): None}
    if tkey in parents:
        return Word.empty()
    frontier = [ident]
    for _ in range(max_depth):
        nxt = []
        for cur in frontier:
            ckey = cur.tobytes()
            for step, g in steps:
                new = (cur @ g) % p
                key = new.tobytes()
                if key in parents:
                    continue
                parents[key] = (ckey, step)
                if key == tkey:
                    out = []
                    k = key
                    while parents[k] is not None:
                        prev, st = parents[k]
                        out.append(st)
                        k = prev
                    return Word(tuple(reversed(out)))
                nxt.append(new)
        if not nxt:
            return None
        frontier = nxt
    return None
