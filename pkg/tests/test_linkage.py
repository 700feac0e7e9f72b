import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.cluster.hierarchy import linkage as scipy_linkage
from scipy.spatial.distance import squareform

from slldecomp.errors import DimensionError, ParameterError
from slldecomp.functions import ConcatenatedProblem, UnitationFunction, builtin
from slldecomp.linkage import build_linkage_tree, fill_trace_csv, optimal_mixing, run_lt_gomea_lite
from slldecomp.stats import Dsm


def random_dsm(rng, n):
    a = rng.random((n, n))
    d = (a + a.T) / 2
    np.fill_diagonal(d, 0)
    return Dsm(d)


def check_tree_shape(tree):
    n = tree.n
    assert len(tree.masks) == 2 * n - 1
    assert tree.masks[tree.root] == frozenset(range(n))
    for node, kids in enumerate(tree.children):
        if kids:
            a, b = kids
            assert not tree.masks[a] & tree.masks[b]
            assert tree.masks[a] | tree.masks[b] == tree.masks[node]
    for x in tree.masks:
        for y in tree.masks:
            assert not (x & y) or x <= y or y <= x


def test_two_genes():
    tree = build_linkage_tree(Dsm(np.array([[0, 0.3], [0.3, 0]])))
    assert tree.children[2] == (0, 1) and tree.heights[2] == 0.3
    assert [m.tolist() for m in tree.mixing_masks()] == [[0], [1]]


def test_perfect_dsm_recovers_blocks():
    blocks = np.repeat([0, 1], 3)
    d = np.where(blocks[:, None] == blocks[None, :], 0.2, 1.0)
    np.fill_diagonal(d, 0)
    tree = build_linkage_tree(Dsm(d, blocks))
    check_tree_shape(tree)
    assert frozenset({0, 1, 2}) in tree.masks and frozenset({3, 4, 5}) in tree.masks


def test_constant_dsm_is_deterministic():
    d = np.full((5, 5), 0.7)
    np.fill_diagonal(d, 0)
    a, b = build_linkage_tree(Dsm(d)), build_linkage_tree(Dsm(d))
    assert a == b
    assert a.children[5] == (0, 1)
    check_tree_shape(a)


def test_tree_rejects_bad_input():
    with pytest.raises(ParameterError):
        build_linkage_tree(Dsm(np.zeros((1, 1))))
    with pytest.raises(ParameterError):
        build_linkage_tree(Dsm(np.zeros((3, 3))), linkage="ward")


@settings(max_examples=60)
@given(st.integers(2, 12), st.integers(0, 2**32 - 1), st.sampled_from(["average", "single"]))
def test_heights_match_scipy(n, seed, method):
    dsm = random_dsm(np.random.default_rng(seed), n)
    tree = build_linkage_tree(dsm, method)
    check_tree_shape(tree)
    reference = scipy_linkage(squareform(dsm.d, checks=False), method=method)[:, 2]
    assert np.allclose(sorted(tree.heights[n:]), sorted(reference), atol=1e-12)


@settings(max_examples=60)
@given(st.integers(2, 4), st.integers(2, 4), st.integers(0, 2**32 - 1))
def test_blocks_are_masks_under_any_perfect_dsm(k, r, seed):
    rng = np.random.default_rng(seed)
    n = k * r
    blocks = rng.permutation(np.repeat(np.arange(r), k))
    inside = blocks[:, None] == blocks[None, :]
    low, high = rng.uniform(0, 0.5, (n, n)), rng.uniform(0.5, 1, (n, n))
    d = np.where(inside, low, high)
    d = np.triu(d, 1)
    d = d + d.T
    tree = build_linkage_tree(Dsm(d, blocks))
    for b in range(r):
        assert frozenset(np.flatnonzero(blocks == b).tolist()) in tree.masks


def test_optimal_mixing_examples():
    p = ConcatenatedProblem(builtin("trap", 5), 1)
    src = np.zeros(5, dtype=np.uint8)
    out, res = optimal_mixing(src, src, [0, 1], p)
    assert res.accepted and res.fitness_after == res.fitness_before == 4 and res.evaluations_used == 0
    out, res = optimal_mixing(src, np.ones(5), range(5), p)
    assert res.accepted and (res.fitness_before, res.fitness_after) == (4, 5) and out.tolist() == [1] * 5
    out, res = optimal_mixing(src, np.ones(5), [0, 1], p)
    assert not res.accepted and out.tolist() == [0] * 5 and res.evaluations_used == 1
    with pytest.raises(ParameterError):
        optimal_mixing(src, src, [], p)
    with pytest.raises(DimensionError):
        optimal_mixing(src[:4], src, [0], p)


@st.composite
def mixing_cases(draw):
    k, r = draw(st.integers(1, 5)), draw(st.integers(1, 4))
    values = draw(st.lists(st.integers(-3, 3), min_size=k + 1, max_size=k + 1))
    p = ConcatenatedProblem(UnitationFunction(k, tuple(values)), r)
    bits = st.lists(st.integers(0, 1), min_size=p.n, max_size=p.n)
    mask = draw(st.lists(st.integers(0, p.n - 1), min_size=1, max_size=p.n, unique=True))
    return p, np.array(draw(bits)), np.array(draw(bits)), mask


@settings(max_examples=500)
@given(mixing_cases())
def test_mixing_never_lowers_fitness(case):
    p, src, donor, mask = case
    out, res = optimal_mixing(src, donor, mask, p)
    assert res.fitness_after >= res.fitness_before
    assert p.evaluate(out) == res.fitness_after >= p.evaluate(src)


def test_optimizer_stops_on_optimal_population():
    p = ConcatenatedProblem(builtin("trap", 4), 2)
    res = run_lt_gomea_lite(p, 8, 1000, 0, initial=np.ones((8, 8), dtype=np.uint8))
    assert len(res.fill_trace) == 1 and res.ffe_to_optimum == 8 and res.best_fitness == 8


def test_optimizer_is_deterministic():
    p = ConcatenatedProblem(builtin("bimodal", 6), 2)
    a = run_lt_gomea_lite(p, 40, 20000, 5)
    b = run_lt_gomea_lite(p, 40, 20000, 5)
    assert a.fill_trace == b.fill_trace and a.ffe_to_optimum == b.ffe_to_optimum
    assert np.array_equal(a.best, b.best)
    assert fill_trace_csv(a.fill_trace).splitlines()[0] == "generation,ffe_used,fill_summary,best_fitness"


def test_optimizer_respects_budget():
    p = ConcatenatedProblem(builtin("ridge2", 12), 2)
    res = run_lt_gomea_lite(p, 200, 12000, 1)
    assert res.ffe_used <= 12000 and res.ffe_to_optimum is None
    assert res.best_fitness == p.evaluate(res.best)
    with pytest.raises(ParameterError):
        run_lt_gomea_lite(p, 1, 100, 0)
