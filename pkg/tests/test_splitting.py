import numpy as np
import pytest

from limrand.algorithms.splitting import (chernoff_envelope, exact_failure_bound, split, split_tape)
from limrand.errors import InputError, ParameterError
from limrand.graph import BipartiteGraph, random_bipartite
from limrand.params import Params
from limrand.randomness import ExplicitTape, FullSource, SharedSource, seed_to_bits


def star(n_right):
    right = tuple(range(2, n_right + 2))
    return BipartiteGraph((1,), right, {1: right})


@pytest.mark.parametrize("seed", range(10))
def test_full_neighborhood_fails_only_if_monochromatic(seed):
    bip = star(8)
    res = split(bip, SharedSource(ExplicitTape(seed_to_bits(seed, 64))), c_min=0)
    colors = set(res.coloring.values())
    assert res.ok == (len(colors) == 2)


def test_single_right_node_is_input_error():
    with pytest.raises(InputError) as exc:
        split(star(1), SharedSource(ExplicitTape(seed_to_bits(0, 8))), c_min=0)
    assert exc.value.node == 1


def test_degree_precondition():
    bip = random_bipartite(5, 40, 3, seed=0)
    with pytest.raises(InputError):
        split(bip, split_tape(0, bip, Params(n=bip.n)), Params(n=bip.n), c_min=1.0)


def test_private_source_rejected():
    with pytest.raises(ParameterError):
        split(star(4), FullSource(0), c_min=0)


@pytest.mark.parametrize("seed", range(20))
def test_engine_matches_fast_and_zero_rounds(seed):
    bip = random_bipartite(30, 60, 16, seed=seed)
    params = Params(n=bip.n)
    a = split(bip, split_tape(seed, bip, params), params, simulate=True)
    b = split(bip, split_tape(seed, bip, params), params, simulate=False)
    assert a.coloring == b.coloring and a.failed_left == b.failed_left
    assert a.rounds == 0 and b.rounds == 0
    assert a.random_bits == b.random_bits == params.split_k_factor * params.L * \
        split_tape(seed, bip, params).tape.m


def test_failed_left_matches_definition():
    bip = random_bipartite(50, 12, 4, seed=3)
    params = Params(n=bip.n)
    fails = 0
    for seed in range(200):
        r = split(bip, split_tape(seed, bip, params), params, simulate=False, c_min=0)
        for u in bip.left:
            mono = len({r.coloring[v] for v in bip.adj[u]}) < 2
            assert mono == (u in r.failed_left)
        fails += len(r.failed_left)
    # per-node monochromatic probability is 2^(1-4)
    assert abs(fails / (200 * 50) - 1 / 8) < 0.02


def test_bounds():
    assert chernoff_envelope(200, 64) == pytest.approx(2 * 200 * np.exp(-64 / 12))
    assert exact_failure_bound(200, 64) == pytest.approx(200 * 2.0 ** -63)
