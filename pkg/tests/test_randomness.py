import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import path_graph
from limrand.errors import BudgetError, ParameterError
from limrand.graph import bfs_distances, generate
from limrand.randomness import (ExplicitTape, FullSource, KWiseSource, KWiseTape, PooledSource,
                                SharedSource, SparseSource, coverage_radius, dump_tape, field_degree,
                                kwise_tape, load_tape, make_source, place_sparse, sample_geometric,
                                seed_to_bits)


def all_seeds(nbits):
    for s in range(1 << nbits):
        yield np.array([(s >> (nbits - 1 - j)) & 1 for j in range(nbits)], dtype=np.uint8)


def tuple_counts(k, m, positions, use_elements=False):
    counts = Counter()
    for seed in all_seeds(k * m):
        t = KWiseTape(seed, k, m)
        vals = t.elements(positions) if use_elements else t.bits(positions)
        counts[tuple(vals.tolist())] += 1
    return counts


def test_k1_tape_is_constant_seed_bit():
    for seed in all_seeds(3):
        bits = kwise_tape(seed, 1, 8)
        assert set(bits.tolist()) == {int(seed[2])}
    assert Counter(int(kwise_tape(s, 1, 8)[5]) for s in all_seeds(3)) == {0: 4, 1: 4}


def test_k2_pairs_exactly_uniform():
    for pair in itertools.combinations(range(8), 2):
        c = tuple_counts(2, 3, list(pair))
        assert sorted(c.values()) == [16, 16, 16, 16]


def test_degree_one_is_not_3wise_on_field_elements():
    # 6 seed bits cannot cover the 512 element triples
    c = tuple_counts(2, 3, [0, 1, 2], use_elements=True)
    assert len(c) < 8 ** 3


def test_degree_one_bits_fail_on_a_dependent_quadruple():
    # low bits of a degree-1 polynomial satisfy b(x)^b(y)^b(z)^b(x^y^z) = 0
    c = tuple_counts(2, 3, [1, 2, 4, 7])
    assert len(c) < 16
    assert all(sum(t) % 2 == 0 for t in c)


def test_k_at_least_length_is_fully_uniform():
    c = tuple_counts(4, 2, [0, 1, 2, 3])
    assert len(c) == 16 and set(c.values()) == {16}


def test_kwise_seed_length_error_names_requirement():
    with pytest.raises(ParameterError, match="needs 12"):
        KWiseTape(np.zeros(11, dtype=np.uint8), 4, 3)
    with pytest.raises(ParameterError):
        kwise_tape(np.zeros(10, dtype=np.uint8), 0, 4)


@given(st.integers(1, 10 ** 6))
def test_field_degree(n):
    m = field_degree(n)
    assert 2 ** m >= n and (m == 1 or 2 ** (m - 1) < n)


def test_seed_to_bits_forms_agree():
    a = seed_to_bits("0a", 64)
    assert np.array_equal(a, seed_to_bits("0x0a", 64))
    assert np.array_equal(a, seed_to_bits(bytes([10]), 64))
    assert not np.array_equal(seed_to_bits(1, 64), seed_to_bits(2, 64))
    assert seed_to_bits(1, 13).size == 13


class Stream:
    """Handle stand-in replaying a fixed bit list."""

    def __init__(self, bits):
        self.it = iter(bits)

    def bit(self):
        return next(self.it)


def test_geometric_examples():
    assert sample_geometric(Stream([0]), 10).value == 1
    s = sample_geometric(Stream([1, 1, 0]), 10)
    assert (s.value, s.bits_used, s.truncated) == (3, 3, False)
    s = sample_geometric(Stream([1] * 10), 10)
    assert (s.value, s.truncated) == (10, True)
    with pytest.raises(ParameterError):
        sample_geometric(Stream([0]), 0)


def test_geometric_distribution():
    src = FullSource(123)
    vals = Counter(src.handle(v).geometric(40).value for v in range(1, 20001))
    for j in range(1, 6):
        assert abs(vals[j] / 20000 - 2.0 ** -j) <= 0.015


def test_full_source_accounting_and_determinism():
    a, b = FullSource(5), FullSource(5)
    ha, hb = a.handle(3), b.handle(3)
    assert ha.bits(300) == hb.bits(300)
    assert a.total_consumed == 300
    assert FullSource(6).handle(3).bits(64) != FullSource(5).handle(3).bits(64)
    h = a.handle(9)
    h.bits(2)
    h.uint(4)
    assert a.consumed[9] == 6


def test_kwise_source_private_streams():
    src = KWiseSource(seed_to_bits(1, 4 * 20), 4, id_space=16, stride=64)
    assert src.handle(2).bits(5) == src.tape.bits(np.arange(64, 69)).tolist()
    with pytest.raises(BudgetError):
        src.handle(1).bits(65)


def test_shared_source_counts_tape_once():
    tape = ExplicitTape(seed_to_bits(7, 1000))
    src = SharedSource(tape)
    for v in range(1, 50):
        src.handle(v).bits(10)
    assert src.total_consumed == 10
    assert src.read_at([99]).tolist() == [int(tape.bits_array[99])]
    assert src.total_consumed == 100
    assert src.handle(1).at(5) == int(tape.bits_array[5])
    with pytest.raises(BudgetError):
        src.read_at([1000])
    k = SharedSource(KWiseTape(seed_to_bits(1, 40), 4, 10))
    k.read_at([3, 500])
    assert k.total_consumed == 40
    src.prefetch([1, 2, 3])
    assert src.read_at([2]).tolist() == [int(tape.bits_array[2])]


def test_at_requires_shared():
    with pytest.raises(ParameterError):
        FullSource(1).handle(1).at(0)


def test_sparse_source_one_bit_inside_S_only():
    src = SparseSource({1, 2}, 1, seed=4)
    assert src.handle(1).bit() in (0, 1)
    assert src.total_consumed == 1
    with pytest.raises(BudgetError):
        src.handle(3).bit()
    with pytest.raises(BudgetError):
        src.handle(2).bits(2)


def test_pooled_source():
    src = PooledSource({5: [1, 0, 1]})
    assert src.handle(5).bits(3) == [1, 0, 1]
    with pytest.raises(BudgetError):
        src.handle(5).bits(4)


def test_make_source_modes():
    assert make_source("full", 1).mode == "full"
    assert make_source("kwise", 1, k=4, id_space=64, stride=8).mode == "kwise"
    assert make_source("shared", 1, tape_bits=64).mode == "shared"
    z = make_source("shared", 1, constant=0, tape_bits=64)
    assert z.handle(3).bits(8) == [0] * 8
    assert make_source("shared", 1, k=4, tape_bits=64).tape.k == 4
    assert make_source("sparse", 1, S={1}, h=1).mode == "sparse"
    with pytest.raises(ParameterError):
        make_source("kwise", 1)
    with pytest.raises(ParameterError):
        make_source("nosuch", 1)


def test_place_sparse_h0_is_all():
    g = generate("gnp", 40, {"p": 0.1}, seed=2)
    assert place_sparse(g, 0, seed=1) == frozenset(g.nodes)
    with pytest.raises(ParameterError):
        place_sparse(g, -1, 0)


def test_path_center_covers_radius_four():
    g = path_graph(range(1, 10))
    assert coverage_radius(g, {5}) == 4


@given(st.integers(1, 60), st.integers(0, 5), st.integers(0, 10 ** 6))
def test_place_sparse_covers(n, h, seed):
    g = generate("gnp", n, {"p": 0.08}, seed=seed)
    S = place_sparse(g, h, seed)
    assert max(d for d, _ in bfs_distances(g, S).values()) <= h
    assert place_sparse(g, h, seed) == S


@given(st.lists(st.integers(0, 1), max_size=300))
def test_tape_dump_roundtrip(bits):
    header, back = load_tape(dump_tape(bits, "kwise", k=3))
    assert header == {"mode": "kwise", "k": 3, "length": len(bits)}
    assert back.tolist() == bits
