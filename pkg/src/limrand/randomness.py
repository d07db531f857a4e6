"""Randomness sources with exact bit accounting.

Every algorithm draws bits through a per-node handle obtained from a
:class:`RandomnessSource`.  The source records how many bits each node drew;
for shared tapes the count is of tape bits, not per-node reads.
"""

from __future__ import annotations

import base64
import hashlib
import json
import random
from dataclasses import dataclass
from typing import Iterable, Mapping

import numpy as np

from . import gf2
from .errors import BudgetError, ParameterError
from .graph import Graph, bfs_distances, distances_from
from .params import clog2


@dataclass(frozen=True)
class GeometricSample:
    value: int
    bits_used: int
    truncated: bool = False


def seed_to_bits(seed: int | str | bytes, length: int) -> np.ndarray:
    """Expand an integer/hex/bytes seed into ``length`` uniform bits (SHAKE-256)."""
    if isinstance(seed, str):
        seed = bytes.fromhex(seed.removeprefix("0x"))
    elif isinstance(seed, int):
        seed = seed.to_bytes(16, "big", signed=True)
    raw = hashlib.shake_256(b"limrand-seed" + seed).digest((length + 7) // 8)
    return np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:length].copy()


# ---------------------------------------------------------------------------
# k-wise independent tapes


class KWiseTape:
    """Polynomial tape: element i is P(i) for a random degree-(k-1) P over GF(2^m).

    Any k distinct elements are independent and uniform over GF(2^m); the bit at
    position i is the low bit of element i.  The seed is read as k m-bit
    coefficients, most significant bit first, leading coefficient first.
    """

    def __init__(self, seed_bits, k: int, m: int):
        if k < 1:
            raise ParameterError("k must be >= 1")
        if not 1 <= m <= gf2.MAX_DEGREE:
            raise ParameterError(f"field degree {m} outside 1..{gf2.MAX_DEGREE}")
        seed_bits = np.asarray(seed_bits, dtype=np.uint8)
        need = k * m
        if seed_bits.size < need:
            raise ParameterError(f"seed has {seed_bits.size} bits; k={k}, m={m} needs {need}")
        chunks = seed_bits[:need].reshape(k, m).astype(np.int64)
        weights = 1 << np.arange(m - 1, -1, -1, dtype=np.int64)
        self.coeffs = chunks @ weights
        self.k, self.m = k, m
        self.seed_len = need

    @property
    def length(self) -> int:
        return 1 << self.m

    def elements(self, positions) -> np.ndarray:
        return gf2.poly_eval(self.coeffs, positions, self.m)

    def bits(self, positions) -> np.ndarray:
        return (self.elements(positions) & 1).astype(np.uint8)


def field_degree(output_len: int) -> int:
    """Smallest m >= 1 with 2**m >= output_len."""
    return max(1, clog2(max(1, output_len)))


def kwise_tape(seed_bits, k: int, output_len: int) -> np.ndarray:
    """First ``output_len`` bits of the k-wise tape built from ``seed_bits``.

    Raises:
        ParameterError: if the seed is shorter than ``k * m`` with 2**m >= output_len.
    """
    if output_len < 0:
        raise ParameterError("output_len must be >= 0")
    tape = KWiseTape(seed_bits, k, field_degree(output_len))
    return tape.bits(np.arange(output_len))


class ExplicitTape:
    """A tape given bit by bit."""

    def __init__(self, bits):
        self.bits_array = np.asarray(bits, dtype=np.uint8)
        self.seed_len = int(self.bits_array.size)

    @property
    def length(self) -> int:
        return int(self.bits_array.size)

    def bits(self, positions) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size and positions.max() >= self.length:
            raise BudgetError(f"tape of {self.length} bits read at {int(positions.max())}")
        return self.bits_array[positions]


# ---------------------------------------------------------------------------
# sources and handles


class NodeRandom:
    """A node's view of a randomness source: a sequential bit stream."""

    __slots__ = ("source", "node", "pos")

    def __init__(self, source: "RandomnessSource", node: int):
        self.source = source
        self.node = node
        self.pos = 0

    def bits(self, count: int) -> list[int]:
        out = self.source._read(self.node, self.pos, count)
        self.pos += count
        return out

    def bit(self) -> int:
        return self.bits(1)[0]

    def uint(self, nbits: int) -> int:
        v = 0
        for b in self.bits(nbits):
            v = (v << 1) | b
        return v

    def geometric(self, cap: int) -> GeometricSample:
        return sample_geometric(self, cap)

    def at(self, position: int) -> int:
        """Bit at a fixed tape position (shared sources only)."""
        if not isinstance(self.source, SharedSource):
            raise ParameterError(f"{self.source.mode} sources have no addressable tape")
        return int(self.source.read_at([position])[0])


class RandomnessSource:
    mode = "abstract"

    def __init__(self):
        self.consumed: dict[int, int] = {}

    def handle(self, node: int) -> NodeRandom:
        return NodeRandom(self, node)

    @property
    def total_consumed(self) -> int:
        return sum(self.consumed.values())

    def _charge(self, node: int, count: int) -> None:
        self.consumed[node] = self.consumed.get(node, 0) + count

    def _read(self, node: int, pos: int, count: int) -> list[int]:
        raise NotImplementedError


class FullSource(RandomnessSource):
    """Fully independent bits; node v's stream is SHAKE-256(seed, v)."""

    mode = "full"
    _BLOCK = 256

    def __init__(self, seed: int):
        super().__init__()
        self.seed = seed
        self._cache: dict[int, np.ndarray] = {}

    def _stream(self, node: int, upto: int) -> np.ndarray:
        have = self._cache.get(node)
        if have is None or have.size < upto:
            size = max(self._BLOCK, 1 << clog2(max(upto, 1)))
            raw = hashlib.shake_256(f"full:{self.seed}:{node}".encode()).digest(size // 8)
            have = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))
            self._cache[node] = have
        return have

    def _read(self, node, pos, count):
        self._charge(node, count)
        return self._stream(node, pos + count)[pos:pos + count].tolist()


class KWiseSource(RandomnessSource):
    """Private k-wise streams: bit j of node v is tape position (v - 1) * stride + j."""

    mode = "kwise"

    def __init__(self, seed_bits, k: int, id_space: int, stride: int):
        super().__init__()
        self.stride = stride
        self.tape = KWiseTape(seed_bits, k, field_degree(id_space * stride))

    def _read(self, node, pos, count):
        if pos + count > self.stride:
            raise BudgetError(f"node {node} exceeded its {self.stride}-bit stream")
        self._charge(node, count)
        base = (node - 1) * self.stride + pos
        return self.tape.bits(np.arange(base, base + count)).tolist()


class SharedSource(RandomnessSource):
    """One tape read by every node from position 0.

    Consumption is counted on the tape, once: the prefix length read for an
    explicit tape, or the seed length for a k-wise tape (its only entropy).
    """

    mode = "shared"

    def __init__(self, tape):
        super().__init__()
        self.tape = tape
        self._high = 0
        self._cache: dict[int, int] = {}

    def prefetch(self, positions) -> None:
        """Evaluate many positions in one vectorized call; later reads hit the cache."""
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size:
            self._cache.update(zip(positions.tolist(), self.tape.bits(positions).tolist()))

    def _read(self, node, pos, count):
        self._note(pos + count)
        return self.tape.bits(np.arange(pos, pos + count)).tolist()

    def read_at(self, positions) -> np.ndarray:
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size:
            self._note(int(positions.max()) + 1)
        if positions.size == 1 and int(positions[0]) in self._cache:
            return np.array([self._cache[int(positions[0])]], dtype=np.uint8)
        return self.tape.bits(positions)

    def elements(self, positions) -> np.ndarray:
        if not isinstance(self.tape, KWiseTape):
            raise ParameterError("field elements need a k-wise tape")
        positions = np.asarray(positions, dtype=np.int64)
        if positions.size:
            self._note(int(positions.max()) + 1)
        return self.tape.elements(positions)

    def _note(self, upto: int) -> None:
        self._high = max(self._high, upto)

    @property
    def total_consumed(self) -> int:
        if isinstance(self.tape, KWiseTape):
            return self.tape.seed_len if self._high else 0
        return self._high


class SparseSource(RandomnessSource):
    """Only nodes of S hold randomness, one uniform bit each."""

    mode = "sparse"

    def __init__(self, S: Iterable[int], h: int, seed: int):
        super().__init__()
        self.S = frozenset(S)
        self.h = h
        self.seed = seed

    def secret_bit(self, node: int) -> int:
        if node not in self.S:
            raise BudgetError(f"node {node} is not in S and holds no random bit")
        return hashlib.shake_256(f"sparse:{self.seed}:{node}".encode()).digest(1)[0] & 1

    def _read(self, node, pos, count):
        if node not in self.S:
            raise BudgetError(f"node {node} is not in S and holds no random bit")
        if pos + count > 1:
            raise BudgetError(f"node {node} holds a single random bit")
        self._charge(node, count)
        return [self.secret_bit(node)] * count


class PooledSource(RandomnessSource):
    """Per-node pools of already-drawn bits (e.g. bits gathered at a cluster center)."""

    mode = "pooled"

    def __init__(self, pools: Mapping[int, Iterable[int]]):
        super().__init__()
        self.pools = {v: list(b) for v, b in pools.items()}

    def _read(self, node, pos, count):
        pool = self.pools.get(node, [])
        if pos + count > len(pool):
            raise BudgetError(f"node {node} has {len(pool)} pooled bits, needs {pos + count}")
        self._charge(node, count)
        return pool[pos:pos + count]


def make_source(mode: str, seed: int, *, n: int | None = None, k: int | None = None,
                id_space: int | None = None, stride: int = 4096, tape_bits: int | None = None,
                S=None, h: int | None = None, constant: int | None = None) -> RandomnessSource:
    """Factory used by the harness and CLI."""
    if mode == "full":
        return FullSource(seed)
    if mode == "kwise":
        if k is None or id_space is None:
            raise ParameterError("kwise mode needs k and id_space")
        m = field_degree(id_space * stride)
        return KWiseSource(seed_to_bits(seed, k * m), k, id_space, stride)
    if mode == "shared":
        if constant is not None:
            return SharedSource(ExplicitTape(np.full(tape_bits or 1 << 20, constant, dtype=np.uint8)))
        if k is None:
            return SharedSource(ExplicitTape(seed_to_bits(seed, tape_bits or 1 << 20)))
        m = field_degree(tape_bits or 1 << 20)
        return SharedSource(KWiseTape(seed_to_bits(seed, k * m), k, m))
    if mode == "sparse":
        return SparseSource(S, h, seed)
    raise ParameterError(f"unknown randomness mode {mode!r}")


# ---------------------------------------------------------------------------


def sample_geometric(handle: NodeRandom, cap: int) -> GeometricSample:
    """Flip coins until the first 0; the value is that flip's 1-based index.

    If no 0 appears within ``cap`` flips the value is ``cap`` with the
    truncation flag set.
    """
    if cap < 1:
        raise ParameterError("cap must be >= 1")
    for i in range(1, cap + 1):
        if handle.bit() == 0:
            return GeometricSample(i, i, False)
    return GeometricSample(cap, cap, True)


def place_sparse(g: Graph, h: int, seed: int) -> frozenset[int]:
    """A set S with every node within ``h`` hops of S.

    Greedy over a seeded shuffle: a node not yet covered joins S and covers its
    h-ball.  h=0 forces S = V.
    """
    if h < 0:
        raise ParameterError("h must be >= 0")
    order = list(g.nodes)
    random.Random(f"{seed}:sparse").shuffle(order)
    covered: set[int] = set()
    S = []
    for v in order:
        if v in covered:
            continue
        S.append(v)
        covered.update(distances_from(g, v, h))
    return frozenset(S)


def coverage_radius(g: Graph, S) -> object:
    """Largest distance from a node to S (INF if some node is unreachable)."""
    d = bfs_distances(g, S)
    return max(dist for dist, _ in d.values())


# ---------------------------------------------------------------------------
# tape dump format: JSON header line, then base64 of the packed bits


def dump_tape(bits, mode: str = "shared", k: int | None = None) -> str:
    bits = np.asarray(bits, dtype=np.uint8)
    header = json.dumps({"mode": mode, "k": k, "length": int(bits.size)}, sort_keys=True)
    body = base64.b64encode(np.packbits(bits).tobytes()).decode()
    return header + "\n" + body + "\n"


def load_tape(text: str) -> tuple[dict, np.ndarray]:
    header_line, _, body = text.partition("\n")
    header = json.loads(header_line)
    raw = np.frombuffer(base64.b64decode(body.strip()), dtype=np.uint8)
    bits = np.unpackbits(raw)[:header["length"]].copy()
    return header, bits
