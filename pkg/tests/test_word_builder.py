import random

import numpy as np
import pytest

from slword import (
    GenStep,
    GFMatrix,
    Generator,
    GeneratorSet,
    Groumvirate,
    ParameterError,
    PrimeField,
    SearchExhaustedError,
    Subspace,
    Word,
    WordBuilder,
    block_generators,
    construct_word,
    evaluate_word,
    frames_to_tail_word,
    head_basis_frames,
    lb_generating_set,
    monomial_word,
    lower_triangular_word,
    move_word,
    random_sl,
    random_word,
    signed_block_swap,
    swap_target,
    swap_word,
    tail_nonzero_word,
    unit_vector,
    unsigned_block_swap,
    upgrade_word,
    word_cost,
)

GRID = [(3, 1, 2), (3, 1, 5), (6, 2, 3), (9, 3, 2)]


def _setup(n, p):
    f = PrimeField(p)
    gs, gv = lb_generating_set(f, n)
    return f, gs, gv


def _block_only_set(p=2, n=3):
    """A non-generating set: the embedded block subgroup alone."""
    f = PrimeField(p)
    gv = Groumvirate(n, 1, step_cost=1)
    gens = block_generators(f, gv)
    return f, GeneratorSet(gens, symmetric=True), gv


def test_tail_nonzero_single_swap_witness():
    f, gs, gv = _setup(3, 5)
    w = tail_nonzero_word(gs, gv)
    assert len(w) == 1
    img = evaluate_word(w, gs, gv).apply(unit_vector(3, 0))
    assert np.array_equal(img, np.array([0, 4, 0]))  # -e_2 mod 5


@pytest.mark.parametrize("n,t,p", GRID)
def test_tail_nonzero_contract(n, t, p):
    f, gs, gv = _setup(n, p)
    m = evaluate_word(tail_nonzero_word(gs, gv), gs, gv)
    for i in range(t):
        assert m.column(i)[t:].any()


def test_tail_nonzero_non_generating_set_errors():
    f, gs, gv = _block_only_set()
    with pytest.raises(SearchExhaustedError) as exc:
        tail_nonzero_word(gs, gv)
    assert exc.value.stuck_index == 1


def test_head_basis_frames_small_case():
    f, gs, gv = _setup(3, 5)
    frames = head_basis_frames(gs, gv)
    assert len(frames) == 1
    fr = frames[0]
    assert fr.index == 1 and len(fr.a_word) == 1
    moved = evaluate_word(fr.a_word, gs, gv).apply(fr.v)
    assert moved[0] != 0  # head projection nonzero


@pytest.mark.parametrize("n,t,p", GRID)
def test_head_basis_frames_contract(n, t, p):
    f, gs, gv = _setup(n, p)
    frames = head_basis_frames(gs, gv)
    assert [fr.index for fr in frames] == list(range(1, t + 1))
    heads = []
    grown = Subspace.tail(f, n, t)
    for fr in frames:
        assert Subspace.tail(f, n, t).contains(fr.v)
        assert len(fr.a_word) <= fr.index
        moved = evaluate_word(fr.a_word, gs, gv).apply(fr.v)
        assert not grown.contains(moved)  # strictly new direction each time
        grown = grown.sum(Subspace.span(f, [moved], n))
        heads.append(moved[:t])
    assert Subspace.span(f, heads, t).dim == t


def test_head_basis_frames_non_generating():
    f, gs, gv = _block_only_set()
    with pytest.raises(SearchExhaustedError):
        head_basis_frames(gs, gv)


def test_frames_to_tail_base_case():
    f, gs, gv = _setup(3, 2)
    frames = head_basis_frames(gs, gv)
    b = frames_to_tail_word(frames, gs, gv)
    assert b == frames[0].a_word.inverse()
    moved = evaluate_word(frames[0].a_word, gs, gv).apply(frames[0].v)
    back = evaluate_word(b, gs, gv).apply(moved)
    assert Subspace.tail(f, 3, 1).contains(back)


@pytest.mark.parametrize("n,t,p", GRID)
def test_frames_to_tail_contract(n, t, p):
    f, gs, gv = _setup(n, p)
    frames = head_basis_frames(gs, gv)
    b = frames_to_tail_word(frames, gs, gv)
    bm = evaluate_word(b, gs, gv)
    tail = Subspace.tail(f, n, t)
    for fr in frames:
        mv = evaluate_word(fr.a_word, gs, gv).apply(fr.v)
        assert tail.contains(bm.apply(mv))


def test_regime_violation_rejected():
    f = PrimeField(5)
    gs, gv = lb_generating_set(f, 4)  # t = ceil(4/3) = 2, but 3t > n
    assert gv.t == 2
    with pytest.raises(ParameterError):
        frames_to_tail_word([], gs, gv)
    with pytest.raises(ParameterError):
        move_word(gs, gv)
    with pytest.raises(ParameterError):
        swap_word(gs, gv)


@pytest.mark.parametrize("n,t,p", GRID)
def test_move_word_contract(n, t, p):
    f, gs, gv = _setup(n, p)
    m = evaluate_word(move_word(gs, gv), gs, gv)
    tail = Subspace.tail(f, n, t)
    for i in range(t):
        assert tail.contains(m.column(i))


def test_move_word_witness_short_circuit():
    # t = 1: the first signed swap already moves e_1 into the tail span
    f, gs, gv = _setup(3, 5)
    w = move_word(gs, gv)
    assert len(w) == 1 and word_cost(w, gs, gv) == 1


def test_swap_exact_small():
    f, gs, gv = _setup(3, 2)
    w = swap_word(gs, gv)
    m = evaluate_word(w, gs, gv)
    assert m == GFMatrix(f, [[0, 1, 0], [1, 0, 0], [0, 0, 1]])
    assert (m @ m).is_identity()


@pytest.mark.parametrize("n,t,p", [(6, 2, 3), (6, 2, 5), (12, 4, 7), (9, 3, 2)])
def test_swap_exact_unsigned_when_attainable(n, t, p):
    f, gs, gv = _setup(n, p)
    m = evaluate_word(swap_word(gs, gv), gs, gv)
    assert m == unsigned_block_swap(f, n, t)
    assert (m @ m).is_identity()


@pytest.mark.parametrize("n,t,p", [(3, 1, 3), (3, 1, 5), (9, 3, 7)])
def test_swap_determinant_obstruction(n, t, p):
    """For odd t over odd p the unsigned swap lies outside SL_n.

    Its determinant is (-1)^t = p-1 != 1, so no product of determinant-one
    generators can reach it; the builder delivers the signed normal form,
    which is entry-exact and has determinant one.
    """
    f, gs, gv = _setup(n, p)
    unsigned = unsigned_block_swap(f, n, t)
    assert unsigned.det() == p - 1  # provably unreachable by det-1 words
    m = evaluate_word(swap_word(gs, gv), gs, gv)
    assert m == signed_block_swap(f, n, t)
    assert m.det() == 1
    assert m == swap_target(f, n, t)


def test_upgrade_identity_and_partition():
    f, gs, gv = _setup(6, 3)
    builder = WordBuilder(gs, gv)
    t, n = gv.t, gv.n
    ident = GFMatrix.identity(f, n)
    moved = tuple(range(t, t + (n - 2 * t)))
    assert evaluate_word(builder.upgrade_word(ident, moved), gs, gv).is_identity()

    rng = random.Random(4)
    x = random_sl(rng, f, gv.block_dim)
    T = gv.embed(x)
    w = builder.upgrade_word(T, tuple(range(2 * t, n)))  # identity partition
    s = builder.swap_matrix()
    assert evaluate_word(w, gs, gv) == s @ T @ s.inv()


def test_upgrade_moves_action_to_chosen_window():
    f, gs, gv = _setup(3, 2)
    builder = WordBuilder(gs, gv)
    x = GFMatrix(f, [[0, 1], [1, 1]])
    assert x.det() == 1
    T = gv.embed(x)
    w = builder.upgrade_word(T, (2,))  # act on coordinates {0, 2}, fix e_2
    r = evaluate_word(w, gs, gv)
    assert np.array_equal(r.apply(unit_vector(3, 1)), unit_vector(3, 1))
    window = Subspace.coordinate_span(f, 3, [0, 2])
    for v in window.basis_rows:
        assert window.contains(r.apply(v.copy()))
    s = builder.swap_matrix()
    assert r == s @ T @ s.inv()


def test_upgrade_validation():
    f, gs, gv = _setup(6, 3)
    builder = WordBuilder(gs, gv)
    with pytest.raises(ParameterError):
        builder.upgrade_word(GFMatrix.identity(f, 6), (2,))  # wrong moved size
    with pytest.raises(ParameterError):
        builder.upgrade_word(GFMatrix.identity(f, 6), (0, 3))  # head coordinate
    bad = GFMatrix.diagonal(f, [2, 2, 1, 1, 1, 1])
    with pytest.raises(ParameterError):
        builder.upgrade_word(bad, (4, 5))  # not a block element


def test_lower_triangular_cases(rng):
    f, gs, gv = _setup(6, 3)
    builder = WordBuilder(gs, gv)
    assert builder.lower_triangular_word(GFMatrix.identity(f, 6)) == Word.empty()
    for _ in range(5):
        a = np.eye(6, dtype=np.int64)
        for i in range(6):
            for j in range(i):
                a[i, j] = rng.randrange(3)
        # random unit diagonal with determinant one
        diag = [rng.randrange(1, 3) for _ in range(5)]
        prod = 1
        for d in diag:
            prod = prod * d % 3
        diag.append(pow(prod, 1, 3))
        diag[-1] = pow(prod, 3 - 2, 3)
        for i in range(6):
            a[i, i] = diag[i]
        l_mat = GFMatrix(f, a)
        assert l_mat.det() == 1
        w = builder.lower_triangular_word(l_mat)
        assert evaluate_word(w, gs, gv) == l_mat


def test_lower_triangular_rejections():
    f, gs, gv = _setup(6, 3)
    builder = WordBuilder(gs, gv)
    upper = GFMatrix(f, np.triu(np.ones((6, 6), dtype=np.int64)))
    with pytest.raises(ParameterError):
        builder.lower_triangular_word(upper)
    a = np.eye(6, dtype=np.int64)
    a[0, 0] = 0  # zero diagonal entry: singular
    with pytest.raises(ParameterError):
        builder.lower_triangular_word(GFMatrix(f, a))
    with pytest.raises(ParameterError):
        builder.lower_triangular_word(GFMatrix.diagonal(f, [2, 1, 1, 1, 1, 1]))


def test_monomial_cases():
    f, gs, gv = _setup(3, 2)
    builder = WordBuilder(gs, gv)
    assert builder.monomial_word(GFMatrix.identity(f, 3)) == Word.empty()
    # cross-check against the swap construction path
    target = unsigned_block_swap(f, 3, 1)
    via_monomial = evaluate_word(builder.monomial_word(target), gs, gv)
    via_swap = evaluate_word(builder.swap_word(), gs, gv)
    assert via_monomial == target and via_swap == target

    f5, gs5, gv5 = _setup(3, 5)
    b5 = WordBuilder(gs5, gv5)
    scalar = GFMatrix.diagonal(f5, [2, 3, 1])  # 2 * 3 = 6 = 1 mod 5
    assert scalar.det() == 1
    assert evaluate_word(b5.monomial_word(scalar), gs5, gv5) == scalar


def test_monomial_random(rng):
    f, gs, gv = _setup(6, 5)
    builder = WordBuilder(gs, gv)
    for _ in range(5):
        perm = list(range(6))
        rng.shuffle(perm)
        a = np.zeros((6, 6), dtype=np.int64)
        for j in range(6):
            a[perm[j], j] = rng.randrange(1, 5)
        m = GFMatrix(f, a)
        d = m.det()
        a[perm[0], 0] = a[perm[0], 0] * pow(int(d), 3, 5) % 5
        m = GFMatrix(f, a)
        assert m.det() == 1
        assert evaluate_word(builder.monomial_word(m), gs, gv) == m


def test_monomial_rejections():
    f, gs, gv = _setup(3, 5)
    builder = WordBuilder(gs, gv)
    with pytest.raises(ParameterError):
        builder.monomial_word(GFMatrix(f, [[1, 1, 0], [0, 1, 0], [0, 0, 1]]))
    with pytest.raises(ParameterError):
        builder.monomial_word(GFMatrix.diagonal(f, [2, 1, 1]))


def test_construct_shortcuts():
    f, gs, gv = _setup(6, 3)
    builder = WordBuilder(gs, gv)
    rep = builder.construct(GFMatrix.identity(f, 6))
    assert rep.ok and rep.cost == 0 and len(rep.word) == 0

    g0 = gs.matrix(0)
    rep = builder.construct(g0)
    assert rep.ok and rep.word == Word.single(GenStep(0))

    rng = random.Random(8)
    block = gv.embed(random_sl(rng, f, gv.block_dim))
    rep = builder.construct(block)
    assert rep.ok and rep.cost == gv.step_cost and len(rep.word) == 1


def test_construct_random_targets(rng):
    f, gs, gv = _setup(6, 2)
    builder = WordBuilder(gs, gv)
    for _ in range(15):
        target = evaluate_word(random_word(rng, gs, gv, 24), gs, gv)
        rep = builder.construct(target)
        assert rep.ok
        assert evaluate_word(rep.word, gs, gv) == target
        assert rep.cost <= 64 * 36


def test_construct_rejects_non_special():
    f, gs, gv = _setup(3, 5)
    with pytest.raises(ParameterError):
        construct_word(GFMatrix.diagonal(f, [2, 1, 1]), gs, gv)


def test_construct_budget_failure_reported():
    f, gs, gv = _setup(6, 3)
    rng = random.Random(13)
    target = evaluate_word(random_word(rng, gs, gv, 24), gs, gv)
    rep = construct_word(target, gs, gv, budget_constant=0)
    assert not rep.ok
    assert rep.cost > 0  # the achieved cost is still reported
    assert evaluate_word(rep.word, gs, gv) == target


@pytest.mark.parametrize("n,t,p", [(7, 2, 3), (8, 2, 2), (10, 3, 5)])
def test_loose_regime_with_padded_windows(n, t, p):
    """n strictly greater than 3t pads the middle window from the far tail."""
    from slword import signed_swap_matrix

    f = PrimeField(p)
    gens, seen = [], set()
    for i in range(t):
        s = signed_swap_matrix(f, n, i)
        gens.append(Generator(f"s{i + 1}", s))
        seen.add(s.key())
        si = s.inv()
        if si.key() not in seen:
            gens.append(Generator(f"s{i + 1}~", si))
    gs = GeneratorSet(gens, symmetric=True)
    gv = Groumvirate(n, t, step_cost=4)
    builder = WordBuilder(gs, gv)
    assert evaluate_word(builder.swap_word(), gs, gv) == swap_target(f, n, t)
    rng = random.Random(n * p + t)
    for _ in range(3):
        target = evaluate_word(random_word(rng, gs, gv, 3 * n), gs, gv)
        rep = builder.construct(target)
        assert rep.ok and evaluate_word(rep.word, gs, gv) == target


def test_flattening_fallback_mover():
    """A pinned set where the primary mover cannot place the next frame.

    Flattening frame i+1 with the inverse of its own frame word requires the
    current image's head part to be visible in that mover's preimage of the
    tail span; for this generating set it is not, and the builder must fall
    back to another mover from the pool.  The contract is unchanged.
    """
    f = PrimeField(3)
    g = GFMatrix(
        f,
        [
            [1, 1, 2, 2, 0, 1],
            [1, 2, 1, 1, 0, 0],
            [1, 1, 0, 2, 1, 2],
            [2, 1, 0, 0, 1, 1],
            [1, 2, 0, 1, 0, 1],
            [0, 1, 0, 1, 2, 0],
        ],
    )
    h = GFMatrix(
        f,
        [
            [1, 1, 2, 1, 0, 2],
            [2, 0, 2, 1, 2, 1],
            [0, 0, 1, 1, 1, 1],
            [1, 0, 1, 0, 0, 0],
            [1, 1, 1, 2, 1, 1],
            [1, 0, 2, 1, 0, 1],
        ],
    )
    gs = GeneratorSet(
        [
            Generator("g", g),
            Generator("g~", g.inv()),
            Generator("h", h),
            Generator("h~", h.inv()),
        ],
        symmetric=True,
    )
    gv = Groumvirate(6, 2, step_cost=4)
    builder = WordBuilder(gs, gv)
    frames = builder.head_basis_frames()
    b = evaluate_word(builder.frames_to_tail_word(frames), gs, gv)
    tail = Subspace.tail(f, 6, 2)
    for fr in frames:
        mv = evaluate_word(fr.a_word, gs, gv).apply(fr.v)
        assert tail.contains(b.apply(mv))
    # and the full pipeline still lands the exact swap form
    assert builder.swap_matrix() == swap_target(f, 6, 2)


def test_assembly_cost_quadratic_sweep():
    """Full-construction cost stays under one constant times n^2 across a t sweep."""
    f = PrimeField(5)
    ratios = []
    rng = random.Random(31)
    for t in range(1, 7):
        n = 3 * t
        gs, gv = lb_generating_set(f, n)
        builder = WordBuilder(gs, gv)
        worst = 0
        for _ in range(3):
            target = evaluate_word(random_word(rng, gs, gv, 3 * n), gs, gv)
            rep = builder.construct(target)
            assert rep.ok
            worst = max(worst, rep.cost)
        ratios.append(worst / (n * n))
    assert max(ratios) <= 64  # one constant covers the whole sweep


def test_builder_requires_symmetric_set():
    f = PrimeField(5)
    rot = Generator("r", GFMatrix(f, [[0, 1, 0], [4, 0, 0], [0, 0, 1]]))
    gs = GeneratorSet([rot], symmetric=False)
    with pytest.raises(ParameterError):
        WordBuilder(gs, Groumvirate(3, 1))


def test_wrapper_functions_agree():
    f, gs, gv = _setup(3, 2)
    assert evaluate_word(swap_word(gs, gv), gs, gv) == WordBuilder(gs, gv).swap_matrix()
    assert evaluate_word(
        lower_triangular_word(GFMatrix.identity(f, 3), gs, gv), gs, gv
    ).is_identity()
    assert evaluate_word(
        monomial_word(GFMatrix.identity(f, 3), gs, gv), gs, gv
    ).is_identity()
    t = GFMatrix.identity(f, 3)
    assert evaluate_word(upgrade_word(t, (2,), gs, gv), gs, gv).is_identity()
