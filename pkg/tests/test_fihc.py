import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slldecomp.errors import DimensionError, ParameterError
from slldecomp.fihc import (BLOCK_SIZE, IndividualSource, RngSeed, extend_population, fihc_batch,
                            fihc_optimize, read_population, sample_optimized_population, write_population)
from slldecomp.functions import ConcatenatedProblem, UnitationFunction, builtin


def is_local_optimum(problem, x):
    f = problem.evaluate(x)
    for i in range(problem.n):
        y = np.array(x, copy=True)
        y[i] ^= 1
        if problem.evaluate(y) > f:
            return False
    return True


def test_global_optimum_is_fixed_point():
    p = ConcatenatedProblem(builtin("trap", 5), 1)
    assert fihc_optimize(p, [1] * 5, rng=0).tolist() == [1] * 5


@pytest.mark.parametrize("first", [0, 1])
def test_bimodal_lone_first_bit_falls_to_zero(first):
    p = ConcatenatedProblem(builtin("bimodal", 6), 1)
    x = [first] + [0] * 5
    assert fihc_optimize(p, x, order=range(6)).tolist() == [0] * 6


def test_bimodal_middle_unitation_stays():
    p = ConcatenatedProblem(builtin("bimodal", 6), 1)
    out = fihc_optimize(p, [1, 1, 0, 1, 0, 0], order=range(6))
    assert out.sum() == 3


def test_evaluation_count_and_bad_inputs():
    p = ConcatenatedProblem(builtin("trap", 4), 2)
    _, evals = fihc_optimize(p, [1] * 8, order=range(8), return_evals=True)
    assert evals == 1 + 8
    with pytest.raises(DimensionError):
        fihc_optimize(p, [0] * 7, rng=0)
    with pytest.raises(ParameterError):
        fihc_optimize(p, [0] * 8, order=[0] * 8)


def random_problem(draw, max_k=6, max_r=4):
    k = draw(st.integers(1, max_k))
    r = draw(st.integers(1, max_r))
    values = draw(st.lists(st.integers(-4, 4), min_size=k + 1, max_size=k + 1))
    return ConcatenatedProblem(UnitationFunction(k, tuple(values)), r)


@st.composite
def climbs(draw):
    p = random_problem(draw)
    x = np.array(draw(st.lists(st.integers(0, 1), min_size=p.n, max_size=p.n)), dtype=np.uint8)
    seed = draw(st.integers(0, 2**32 - 1))
    return p, x, seed


@settings(max_examples=300)
@given(climbs())
def test_output_is_local_optimum_and_not_worse(case):
    p, x, seed = case
    y = fihc_optimize(p, x, rng=seed)
    assert is_local_optimum(p, y)
    assert p.evaluate(y) >= p.evaluate(x)


@settings(max_examples=300)
@given(climbs(), st.integers(0, 2**32 - 1))
def test_idempotent_under_fresh_order(case, other_seed):
    p, x, seed = case
    y = fihc_optimize(p, x, rng=seed)
    assert np.array_equal(fihc_optimize(p, y, rng=other_seed), y)


@settings(max_examples=300)
@given(climbs())
def test_block_locality(case):
    p, x, seed = case
    order = np.random.default_rng(seed).permutation(p.n)
    y = fihc_optimize(p, x, order=order)
    single = ConcatenatedProblem(p.g, 1)
    k = p.k
    for b in range(p.r):
        local = [g - b * k for g in order if b * k <= g < (b + 1) * k]
        yb = fihc_optimize(single, x[b * k:(b + 1) * k], order=local)
        assert np.array_equal(yb, y[b * k:(b + 1) * k])


@settings(max_examples=100)
@given(st.data())
def test_batch_matches_scalar(data):
    p = random_problem(data.draw, max_k=5, max_r=3)
    rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
    bits = rng.integers(0, 2, (20, p.n), dtype=np.uint8)
    orders = np.array([rng.permutation(p.n) for _ in range(20)])
    out, evals = fihc_batch(p, bits, orders)
    for i in range(20):
        y, e = fihc_optimize(p, bits[i], order=orders[i], return_evals=True)
        assert np.array_equal(out[i], y) and evals[i] == e


def test_population_deterministic_across_splits_and_threads():
    p = ConcatenatedProblem(builtin("bimodal", 6), 2)
    seed = RngSeed(11, stream=3)
    whole = sample_optimized_population(p, BLOCK_SIZE + 50, seed)
    threaded = sample_optimized_population(p, BLOCK_SIZE + 50, seed, workers=4)
    assert np.array_equal(whole.members, threaded.members)
    grown = sample_optimized_population(p, 10, seed)
    for chunk in (1, 7, BLOCK_SIZE, 32):
        grown = extend_population(grown, chunk)
    assert np.array_equal(grown.members, whole.members[:grown.s])
    assert whole.evaluations == threaded.evaluations


def test_streams_differ():
    p = ConcatenatedProblem(builtin("trap", 5), 2)
    a = sample_optimized_population(p, 50, RngSeed(1, 0)).members
    b = sample_optimized_population(p, 50, RngSeed(1, 1)).members
    assert not np.array_equal(a, b)


def test_extend_rules():
    p = ConcatenatedProblem(builtin("trap", 3), 2)
    pop = sample_optimized_population(p, 1, 5)
    assert pop.s == 1 and is_local_optimum(p, pop.members[0])
    with pytest.raises(ParameterError):
        extend_population(pop, 0)
    bigger = extend_population(pop, 1)
    assert bigger.s == 2 and np.array_equal(bigger.members[:1], pop.members)
    with pytest.raises(ValueError):
        pop.members[0, 0] = 1


def test_population_is_read_only_and_roundtrips(tmp_path):
    p = ConcatenatedProblem(builtin("reverted", 4), 3)
    pop = sample_optimized_population(p, 17, RngSeed(9, 2))
    path = tmp_path / "pop.txt"
    write_population(path, pop)
    bits, header = read_population(path)
    assert np.array_equal(bits, pop.members)
    assert header == {"n": 12, "s": 17, "seed": 9, "stream": 2}


def test_individual_source_rejects_bad_range():
    src = IndividualSource(ConcatenatedProblem(builtin("trap", 3), 1), RngSeed(0))
    with pytest.raises(ParameterError):
        src.get(5, 2)
    assert src.get(3, 3)[0].shape == (0, 3)


@pytest.mark.parametrize("name, expected", [("bimodal", 60 / 64), ("reverted", 40 / 64)])
def test_fraction_of_middle_unitation(name, expected):
    s = 10**6
    pop = sample_optimized_population(ConcatenatedProblem(builtin(name, 6), 1), s, RngSeed(2024))
    frac = np.mean(pop.members.sum(axis=1) == 3)
    se = np.sqrt(expected * (1 - expected) / s)
    assert abs(frac - expected) < 3 * se


def test_symmetric_function_marginals_are_one_half():
    s = 10**6
    pop = sample_optimized_population(ConcatenatedProblem(builtin("bimodal", 6), 1), s, RngSeed(77))
    freq = pop.members.mean(axis=0)
    assert np.all(np.abs(freq - 0.5) < 4 * np.sqrt(0.25 / s))
