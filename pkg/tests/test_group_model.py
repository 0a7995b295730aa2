import random
from fractions import Fraction

import numpy as np
import pytest

from slword import (
    BlockStep,
    GenStep,
    Generator,
    GeneratorSet,
    GFMatrix,
    Groumvirate,
    ParameterError,
    PrimeField,
    Word,
    density_threshold,
    evaluate_word,
    generator_set_from_text,
    generator_set_to_text,
    groumvirate_step,
    lb_generating_set,
    pi2_retarget,
    project_head,
    project_tail,
    random_sl,
    random_word,
    unit_vector,
    vec,
    word_cost,
    word_from_text,
    word_to_text,
)


@pytest.fixture
def setup():
    f = PrimeField(5)
    gs, gv = lb_generating_set(f, 6)
    return f, gs, gv


def test_generator_validation():
    f = PrimeField(5)
    with pytest.raises(ParameterError):
        Generator("g", GFMatrix.diagonal(f, [2, 1]))  # det 2
    with pytest.raises(ValueError):
        Generator("bad label", GFMatrix.identity(f, 2))
    with pytest.raises(ValueError):
        Generator("g", GFMatrix.identity(f, 2), cost=0)


def test_symmetric_flag_verified():
    f = PrimeField(5)
    rot = Generator("r", GFMatrix(f, [[0, 1], [4, 0]]))  # order 4, inverse not included
    with pytest.raises(ParameterError):
        GeneratorSet([rot], symmetric=True)
    inv = Generator("r~", rot.matrix.inv())
    GeneratorSet([rot, inv], symmetric=True)  # fine


def test_groumvirate_validation():
    with pytest.raises(ParameterError):
        Groumvirate(3, 0)
    with pytest.raises(ParameterError):
        Groumvirate(3, 2)  # block would be 1x1
    gv = Groumvirate(6, 2)
    assert gv.block_dim == 4 and gv.step_cost == 4
    f = PrimeField(3)
    with pytest.raises(ParameterError):
        gv.check_payload(GFMatrix.diagonal(f, [2, 1, 1, 1]))
    with pytest.raises(Exception):
        gv.check_payload(GFMatrix.identity(f, 3))


def test_evaluate_basics(setup):
    f, gs, gv = setup
    assert evaluate_word(Word.empty(), gs, gv).is_identity()
    w = Word((GenStep(0), GenStep(0, True)))
    assert evaluate_word(w, gs, gv).is_identity()


def test_block_step_embedding():
    f = PrimeField(7)
    gs, gv = lb_generating_set(f, 3)
    x = GFMatrix(f, [[0, -1], [1, 0]])
    w = groumvirate_step(x, gv)
    m = evaluate_word(w, gs, gv)
    assert np.array_equal(m.apply(unit_vector(3, 0)), unit_vector(3, 0))
    assert m == GFMatrix(f, [[1, 0, 0], [0, 0, 6], [0, 1, 0]])


def test_evaluate_is_morphism(setup):
    f, gs, gv = setup
    rng = random.Random(9)
    for _ in range(25):
        w1 = random_word(rng, gs, gv, rng.randrange(6))
        w2 = random_word(rng, gs, gv, rng.randrange(6))
        lhs = evaluate_word(w1 + w2, gs, gv)
        rhs = evaluate_word(w1, gs, gv) @ evaluate_word(w2, gs, gv)
        assert lhs == rhs
        assert lhs.det() == 1


def test_word_inverse(setup):
    f, gs, gv = setup
    rng = random.Random(11)
    w = random_word(rng, gs, gv, 8)
    assert (evaluate_word(w, gs, gv) @ evaluate_word(w.inverse(), gs, gv)).is_identity()
    assert word_cost(w.inverse(), gs, gv) == word_cost(w, gs, gv)


def test_cost_model(setup):
    f, gs, gv = setup
    assert word_cost(Word.empty(), gs, gv) == 0
    gv4 = Groumvirate(gv.n, gv.t, step_cost=4)
    one_block = Word.single(BlockStep(GFMatrix.identity(f, gv.block_dim)))
    assert word_cost(one_block, gs, gv4) == 4
    w = Word(
        (GenStep(0), GenStep(1), GenStep(0, True))
        + one_block.steps
        + one_block.steps
    )
    assert word_cost(w, gs, gv4) == 3 + 8
    # additivity
    rng = random.Random(5)
    a = random_word(rng, gs, gv, 5)
    b = random_word(rng, gs, gv, 7)
    assert word_cost(a + b, gs, gv) == word_cost(a, gs, gv) + word_cost(b, gs, gv)


def test_groumvirate_step_validation(setup):
    f, gs, gv = setup
    with pytest.raises(ParameterError):
        groumvirate_step(GFMatrix.diagonal(f, [2, 1, 1, 1]), gv)


def test_pi2_retarget_contract():
    f = PrimeField(5)
    gs, gv = lb_generating_set(f, 3)
    # identity payload acceptable when the tail is already on target
    v = vec(f, [1, 2, 0])
    w = vec(f, [0, 2, 0])
    word = pi2_retarget(f, v, w, gv)
    moved = evaluate_word(word, gs, gv).apply(v)
    assert np.array_equal(project_tail(moved, 1), w)

    v = vec(f, [1, 1, 0])
    w = vec(f, [0, 0, 1])
    word = pi2_retarget(f, v, w, gv)
    m = evaluate_word(word, gs, gv)
    assert np.array_equal(project_tail(m.apply(v), 1), w)
    assert np.array_equal(project_head(m.apply(v), 1), project_head(v, 1))

    with pytest.raises(ParameterError):
        pi2_retarget(f, unit_vector(3, 0), w, gv)  # tail projection zero
    with pytest.raises(ParameterError):
        pi2_retarget(f, v, vec(f, [0, 0, 0]), gv)


def test_pi2_retarget_random_grid():
    rng = random.Random(77)
    for n, t, p in [(3, 1, 2), (3, 1, 5), (6, 2, 3)]:
        f = PrimeField(p)
        gs, gv = lb_generating_set(f, n)
        assert gv.t == t
        done = 0
        while done < 500:
            v = vec(f, [rng.randrange(p) for _ in range(n)])
            w = np.zeros(n, dtype=np.int64)
            w[t:] = [rng.randrange(p) for _ in range(n - t)]
            if not v[t:].any() or not w.any():
                continue
            m = evaluate_word(pi2_retarget(f, v, w, gv), gs, gv)
            assert np.array_equal(project_tail(m.apply(v), t), w)
            assert np.array_equal(project_head(m.apply(v), t), project_head(v, t))
            done += 1


def test_density_threshold_exact():
    assert density_threshold(4, 0, 3).exponent == Fraction(16)
    b = density_threshold(6, 2, 10)
    assert b.exponent == Fraction(34)
    assert b.c_eps == Fraction(5, 9 * 10)
    # eps = 1/3 gives 5/(9d) for any n divisible by 3
    for n, d in [(3, 2), (9, 7), (12, 11)]:
        assert density_threshold(n, n // 3, d).c_eps == Fraction(5, 9 * d)
    with pytest.raises(ParameterError):
        density_threshold(3, 4, 1)
    with pytest.raises(ParameterError):
        density_threshold(3, 1, 0)


def test_generator_set_round_trip(setup):
    f, gs, gv = setup
    text = generator_set_to_text(gs, gv)
    gs2, gv2 = generator_set_from_text(text, step_cost=gv.step_cost)
    assert gs2.n == gs.n and gs2.field == gs.field
    assert gv2.t == gv.t and gv2.step_cost == gv.step_cost
    assert len(gs2) == len(gs)
    for a, b in zip(gs, gs2):
        assert a.label == b.label and a.cost == b.cost and a.matrix == b.matrix
    assert gs2.symmetric  # closure detected
    assert generator_set_to_text(gs2, gv2) == text


def test_word_round_trip(setup):
    f, gs, gv = setup
    rng = random.Random(21)
    w = random_word(rng, gs, gv, 9)
    text = word_to_text(w)
    back = word_from_text(text, gs, gv)
    assert evaluate_word(back, gs, gv) == evaluate_word(w, gs, gv)
    assert word_to_text(back) == text
    assert word_from_text("", gs, gv) == Word.empty()


def test_random_sl_is_special():
    rng = random.Random(2)
    f = PrimeField(7)
    for _ in range(20):
        assert random_sl(rng, f, 3).det() == 1


def test_evaluate_word_index_errors(setup):
    f, gs, gv = setup
    with pytest.raises(IndexError):
        evaluate_word(Word.single(GenStep(99)), gs, gv)
    block = Word.single(BlockStep(GFMatrix.identity(f, gv.block_dim)))
    with pytest.raises(ParameterError):
        evaluate_word(block, gs, None)  # block step with no block subgroup
    with pytest.raises(ParameterError):
        word_cost(block, gs, None)


def test_word_text_rejects_bad_payload(setup):
    f, gs, gv = setup
    m = gv.block_dim
    bad = "V\n" + "\n".join(" ".join("2" if i == j == 0 else ("1" if i == j else "0") for j in range(m)) for i in range(m)) + "\n"
    with pytest.raises(ParameterError):
        word_from_text(bad, gs, gv)  # payload determinant 2
    with pytest.raises(ValueError):
        word_from_text("G 99 0\n", gs, gv)
    with pytest.raises(ValueError):
        word_from_text("Q 1 2\n", gs, gv)


def test_loader_detects_asymmetric_set():
    f = PrimeField(5)
    s = GFMatrix(f, [[0, 1, 0], [4, 0, 0], [0, 0, 1]])  # order 4, inverse absent
    gs = GeneratorSet([Generator("r", s)], symmetric=False)
    text = generator_set_to_text(gs, Groumvirate(3, 1))
    loaded, _ = generator_set_from_text(text)
    assert not loaded.symmetric
