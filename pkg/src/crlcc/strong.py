"""Strong locally correctable construction with bounded label fan-out.

The weak construction lets one corrupted label block poison every node that
hashes it, because a node's label can feed arbitrarily many children.  Here
each node of the base DAG is replaced by a chain of m graph nodes whose last
element aggregates the chain, and every base edge is re-attached to a chain
slot with spare capacity, so both in- and out-degree of the labeling graph
stay below m.  Data and labels are grouped per meta-node:

  blocks 1 .. t         encoded chunk groups (m*beta*ell bits each),
  blocks t+1 .. 2t      encoded label groups (m*ell bits each),
  blocks 2t+1 .. 3t     t copies of the encoded label group of meta-node t.

The corrector never applies the weak construction's goodness rule.  Instead
it checks that the base graph still expands through green edges: for every
dyadic window anchored at the queried meta-node it samples window edges,
calls an edge green when the tail's aggregate node and the head's attachment
node are green, and rejects when the estimated red count exceeds
(5/2) * delta * window size.  Reads past the three-quarter point
additionally reconstruct meta-node t's label group from the repetition
region and re-run the window test on it.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .bits import pack_bits, unpack_bits
from .ecc import get_block_code
from .graph import LocalExpanderDag, build_local_expander
from .hashing import LABEL_WIDTHS, check_seed, gen_seed, label_bytes, label_graph
from .word import BlockSpec, QueryMeter, ReceivedWord


class MetaGraph:
    """Degree-reduced view of a base DAG: chains of m nodes per base node.

    Graph node (u, j) has global id (u-1)*m + j.  Within a chain, node j
    feeds j+1 and everything feeds the final node m.  A base edge (u, v)
    turns into one edge from u's final node to the first chain slot of v
    that still has in-degree at most 1; `cross_target[(u, v)]` records the
    chosen slot.
    """

    def __init__(self, base: LocalExpanderDag, m: int):
        max_deg = max(base.max_in_degree, base.max_out_degree)
        if m != max_deg + 1:
            raise ValueError(
                f"chain length must be max degree + 1 = {max_deg + 1}, got {m}")
        if m < 3:
            raise ValueError("degree reduction needs chains of at least 3")
        self.base = base
        self.t = base.n
        self.m = m
        self.n = self.t * m
        parents: list[list[int]] = [[] for _ in range(self.n + 1)]
        children: list[list[int]] = [[] for _ in range(self.n + 1)]

        def gid(u: int, j: int) -> int:
            return (u - 1) * m + j

        def connect(a: int, b: int) -> None:
            children[a].append(b)
            parents[b].append(a)

        for u in range(1, self.t + 1):
            for j in range(1, m):
                connect(gid(u, j), gid(u, j + 1))
            for j in range(1, m - 1):
                connect(gid(u, j), gid(u, m))
        self.cross_target: dict[tuple[int, int], int] = {}
        indeg_slots = [len(p) for p in parents]
        for u, v in base.edges():
            slot = None
            for j in range(1, m):
                if indeg_slots[gid(v, j)] <= 1:
                    slot = j
                    break
            if slot is None:
                raise AssertionError(
                    f"no attachment slot left on node {v}; base in-degree "
                    "exceeds m - 1")
            connect(gid(u, m), gid(v, slot))
            indeg_slots[gid(v, slot)] += 1
            self.cross_target[(u, v)] = slot
        self._parents = [np.array(sorted(p), dtype=np.int64) for p in parents]
        self._children = [np.array(sorted(c), dtype=np.int64) for c in children]
        self.max_in_degree = max(len(p) for p in self._parents[1:])
        self.max_out_degree = max(len(c) for c in self._children[1:])

    def gid(self, u: int, j: int) -> int:
        return (u - 1) * self.m + j

    def split(self, g: int) -> tuple[int, int]:
        return (g - 1) // self.m + 1, (g - 1) % self.m + 1

    def parents(self, g: int) -> np.ndarray:
        return self._parents[g]

    def children(self, g: int) -> np.ndarray:
        return self._children[g]


def reduce_degree(base: LocalExpanderDag, m: int | None = None) -> MetaGraph:
    """Degree-reduced labeling graph of `base`; m defaults to max degree + 1."""
    if m is None:
        m = max(base.max_in_degree, base.max_out_degree) + 1
    return MetaGraph(base, m)


class StrongCode:
    """Encoder and local corrector for the strong construction."""

    def __init__(self, k: int, ell: int = 128, beta: int = 1,
                 rate=Fraction(1, 4), m: int = 8, delta=Fraction(15, 256),
                 kappa: int | None = None, alpha=None, epsilon: float = 0.5,
                 graph_seed: int = 11, hash_seed: bytes | None = None):
        delta = Fraction(delta)
        rate = Fraction(rate)
        if ell not in LABEL_WIDTHS:
            raise ValueError(f"ell must be one of {LABEL_WIDTHS}")
        if beta < 1 or int(beta) != beta:
            raise ValueError("beta must be a positive integer")
        if not delta < Fraction(1, 16):
            raise ValueError("delta must be below 1/16")
        group = beta * ell * m
        if k <= 0 or k % group:
            raise ValueError(f"k must be a positive multiple of {group}")
        self.k = k
        self.ell = ell
        self.beta = int(beta)
        self.m = int(m)
        self.delta = delta
        self.epsilon = float(epsilon)
        self.t = k // group
        if self.t < 4:
            raise ValueError("need at least four meta-nodes")
        self.graph_seed = int(graph_seed)
        self.hash_seed = check_seed(hash_seed) if hash_seed else gen_seed()
        self.base = build_local_expander(self.t, delta, graph_seed,
                                         degree_cap=self.m - 1)
        got = max(self.base.max_in_degree, self.base.max_out_degree)
        if got != self.m - 1:
            raise ValueError(
                f"base graph tops out at degree {got}; use m = {got + 1}")
        self.meta = MetaGraph(self.base, self.m)
        self.chunk_bits = self.beta * self.ell
        self.message_block = get_block_code(self.m * self.chunk_bits, rate)
        self.label_block = get_block_code(self.m * self.ell, rate)
        mb, lb = self.message_block.block_bits, self.label_block.block_bits
        self.n = self.t * (mb + 2 * lb)
        assert Fraction(self.k, self.n) == rate * beta / (beta + 2)
        self.rate = Fraction(self.k, self.n)
        specs = []
        off = 0
        for _ in range(self.t):
            specs.append(BlockSpec(offset=off, code=self.message_block))
            off += mb
        for _ in range(2 * self.t):
            specs.append(BlockSpec(offset=off, code=self.label_block))
            off += lb
        self.block_specs = specs
        self.block_count = 3 * self.t
        self.radius_fraction = min(self.message_block.radius_fraction,
                                   self.label_block.radius_fraction)
        # Fan constant of the base graph's dyadic windows; the theorem wants
        # kappa scaled by it and alpha inversely scaled by it.
        self.fan = self.base.measured_interval_indegree()
        self.kappa = int(kappa) if kappa is not None else 1600 * self.fan
        if self.kappa < 1:
            raise ValueError("kappa must be positive")
        lo, hi = delta / (20 * self.fan), delta / (10 * self.fan)
        self.alpha = Fraction(alpha) if alpha is not None else delta / (16 * self.fan)
        if not lo <= self.alpha <= hi:
            raise ValueError(f"alpha must lie in [{lo}, {hi}]")

    # -- encoding ------------------------------------------------------------

    def label_hash(self, payload: bytes) -> bytes:
        return label_bytes(self.hash_seed, payload, self.ell)

    def node_parents(self, u: int, j: int) -> list[tuple[int, int]]:
        """Parents of graph node (u, j) as (meta, slot) pairs, gid order."""
        return [self.meta.split(int(g))
                for g in self.meta.parents(self.meta.gid(u, j))]

    def encode(self, message) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k,):
            raise ValueError(f"message must be {self.k} bits")
        cb = self.chunk_bits
        chunks = [pack_bits(message[g * cb : (g + 1) * cb])
                  for g in range(self.meta.n)]
        labels = label_graph(self.meta, self.hash_seed, chunks, self.ell)
        msg_rows = message.reshape(self.t, self.m * cb)
        lab_rows = np.zeros((self.t, self.m * self.ell), dtype=np.uint8)
        for u in range(self.t):
            group = b"".join(labels[u * self.m : (u + 1) * self.m])
            lab_rows[u] = unpack_bits(group, self.m * self.ell)
        enc_msg = self.message_block.encode_many(msg_rows)
        enc_lab = self.label_block.encode_many(lab_rows)
        tail = np.tile(enc_lab[-1], (self.t, 1))
        return np.concatenate(
            [enc_msg.reshape(-1), enc_lab.reshape(-1), tail.reshape(-1)])

    def extract_message(self, codeword) -> np.ndarray:
        bits = np.asarray(codeword, dtype=np.uint8)
        mb = self.message_block.block_bits
        rows = bits[: self.t * mb].reshape(self.t, mb)
        return rows[:, : self.m * self.chunk_bits].reshape(-1).copy()

    def received(self, bits) -> ReceivedWord:
        word = ReceivedWord(bits, self.block_specs)
        if word.n != self.n:
            raise ValueError(f"word must be {self.n} bits")
        return word

    def budget_bits(self, kappa: int | None = None) -> int:
        """Corruption budget the tamper bound assumes, at the given kappa."""
        return math.floor(self.radius_fraction * self.k / (kappa or self.kappa))

    # -- layout --------------------------------------------------------------

    def block_of(self, i: int) -> int:
        """1-based block index holding codeword bit i."""
        mb = self.message_block.block_bits
        lb = self.label_block.block_bits
        if i <= self.t * mb:
            return math.ceil(i / mb)
        return self.t + math.ceil((i - self.t * mb) / lb)

    def metanode(self, i: int) -> int:
        """The meta-node whose data codeword bit i carries.

        Message and label blocks map to their own meta-node; repetition
        blocks carry copies of meta-node t's label group.
        """
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} outside [1, {self.n}]")
        b = self.block_of(i)
        if b <= self.t:
            return b
        if b < 2 * self.t:
            return b - self.t
        return self.t

    # -- local checks --------------------------------------------------------

    def _group_label(self, word: ReceivedWord, u: int, j: int,
                     meter: QueryMeter,
                     overrides: dict[int, bytes]) -> bytes | None:
        """Label of graph node (u, j) out of meta u's label group."""
        lb = self.ell // 8
        if u in overrides:
            return overrides[u][(j - 1) * lb : j * lb]
        msg = word.read_decoded(self.t + u, meter)
        if msg is None:
            return None
        return pack_bits(msg)[(j - 1) * lb : j * lb]

    def node_green(self, word: ReceivedWord, u: int, j: int,
                   meter: QueryMeter,
                   overrides: dict[int, bytes] | None = None) -> bool:
        """Hash-consistency of graph node (u, j) under decoded blocks."""
        overrides = overrides or {}
        parents = self.node_parents(u, j)
        meter.bill_block(u)
        if u not in overrides:
            meter.bill_block(self.t + u)
        for p, _ in parents:
            if p not in overrides:
                meter.bill_block(self.t + p)
        key = ("ngreen", u, j, tuple(sorted(overrides.items())))
        cached = word.check_cache.get(key)
        if cached is not None:
            return cached
        result = False
        own = self._group_label(word, u, j, meter, overrides)
        chunk_group = word.read_decoded(u, meter)
        if own is not None and chunk_group is not None:
            cb = self.chunk_bits
            chunk = chunk_group[(j - 1) * cb : j * cb]
            parts = []
            for p, r in parents:
                lab = self._group_label(word, p, r, meter, overrides)
                if lab is None:
                    break
                parts.append(lab)
            else:
                payload = pack_bits(chunk) + b"".join(parts)
                result = self.label_hash(payload) == own
        word.check_cache[key] = result
        return result

    def meta_green(self, word: ReceivedWord, u: int, meter: QueryMeter,
                   overrides: dict[int, bytes] | None = None) -> bool:
        """Meta-node rule: final chain node green, >= 2/3 of the chain green."""
        if not self.node_green(word, u, self.m, meter, overrides):
            return False
        greens = sum(self.node_green(word, u, j, meter, overrides)
                     for j in range(1, self.m + 1))
        return 3 * greens >= 2 * self.m

    def edge_green(self, word: ReceivedWord, edge: tuple[int, int],
                   meter: QueryMeter,
                   overrides: dict[int, bytes] | None = None) -> bool:
        """A base edge is green when its carrier graph nodes are green."""
        u, v = edge
        if not self.node_green(word, u, self.m, meter, overrides):
            return False
        return self.node_green(word, v, self.meta.cross_target[(u, v)],
                               meter, overrides)

    def expansion_sample_count(self) -> int:
        return math.ceil(math.log2(self.t) ** (1 + self.epsilon))

    def is_local_expander(self, word: ReceivedWord, u: int,
                          rng: np.random.Generator, meter: QueryMeter,
                          overrides: dict[int, bytes] | None = None) -> bool:
        """Sampled test that green edges still expand around meta-node u.

        For every dyadic radius and both directions (windows falling outside
        [1, t] are skipped), samples window edges with replacement and
        rejects when the estimated number of red edges exceeds
        (5/2) * delta * radius.
        """
        samples = self.expansion_sample_count()
        scales = max(1, math.floor(math.log2(self.t)))
        for p in range(1, scales + 1):
            r = 2 ** p
            for ancestors in (False, True):
                if ancestors and u - 2 * r + 1 < 1:
                    continue
                if not ancestors and u + 2 * r - 1 > self.t:
                    continue
                ie = self.base.interval_expander(u, r, ancestors=ancestors)
                if not ie.edges:
                    continue
                draws = rng.integers(0, len(ie.edges), size=samples)
                reds = sum(
                    not self.edge_green(word, ie.edges[int(d)], meter, overrides)
                    for d in draws)
                estimate = Fraction(reds, samples) * len(ie.edges)
                if estimate > Fraction(5, 2) * self.delta * r:
                    return False
        return True

    # -- decoding ------------------------------------------------------------

    def repetition_sample_count(self) -> int:
        return math.ceil(math.log2(self.n) ** (1 + self.epsilon))

    def _tail_majority(self, word: ReceivedWord, rng: np.random.Generator,
                       meter: QueryMeter):
        """Per-position majority over sampled repetition blocks.

        Returns (majority bit vector, label-group bytes or None): the vector
        is the bitwise majority of the re-encoded decodes (ties toward 1);
        the bytes are its decode, when it decodes.
        """
        samples = self.repetition_sample_count()
        draws = rng.integers(2 * self.t + 1, 3 * self.t + 1, size=samples)
        votes = np.zeros(self.label_block.block_bits, dtype=np.int64)
        used = 0
        for b in draws:
            msg = word.read_decoded(int(b), meter)
            if msg is not None:
                votes += self.label_block.encode(msg)
                used += 1
        if used == 0:
            return None, None
        vector = (2 * votes >= used).astype(np.uint8)
        msg = self.label_block.decode(vector)
        return vector, None if msg is None else pack_bits(msg)

    def dec_repetition(self, word: ReceivedWord, i: int,
                       rng: np.random.Generator,
                       meter: QueryMeter) -> int | None:
        """Recover a bit of the final label block or a repetition copy."""
        vector, _ = self._tail_majority(word, rng, meter)
        if vector is None:
            return None
        spec = self.block_specs[self.block_of(i) - 1]
        return int(vector[i - spec.offset - 1])

    def dec_window(self, word: ReceivedWord, i: int, u: int,
                   rng: np.random.Generator, meter: QueryMeter) -> int | None:
        """Recover a bit owned by meta-node u via the expansion test.

        Past the three-quarter point the test alone is not trusted: the
        decoder reconstructs meta-node t's label group from the repetition
        region and re-runs the test around t with it standing in.
        """
        if not self.is_local_expander(word, u, rng, meter):
            return None
        if 4 * u < 3 * self.t:
            return self._repaired_bit(word, i, meter)
        _, tail_bytes = self._tail_majority(word, rng, meter)
        if tail_bytes is None:
            return None
        overrides = {self.t: tail_bytes}
        if self.is_local_expander(word, self.t, rng, meter, overrides):
            return self._repaired_bit(word, i, meter)
        return None

    def _repaired_bit(self, word: ReceivedWord, i: int,
                      meter: QueryMeter) -> int | None:
        """Bit i of its block after a decode/re-encode round trip, or None."""
        b = self.block_of(i)
        spec = self.block_specs[b - 1]
        message = word.read_decoded(b, meter)
        if message is None:
            return None
        return int(spec.code.encode(message)[i - spec.offset - 1])

    def decode(self, word, i: int, rng=None) -> tuple[int | None, int]:
        """Locally correct codeword bit i; returns (bit or None, queries)."""
        if not isinstance(word, ReceivedWord):
            word = self.received(word)
        rng = np.random.default_rng(rng) if not isinstance(
            rng, np.random.Generator) else rng
        meter = word.new_meter()
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} outside [1, {self.n}]")
        if self.block_of(i) >= 2 * self.t:
            bit = self.dec_repetition(word, i, rng, meter)
        else:
            bit = self.dec_window(word, i, self.metanode(i), rng, meter)
        return bit, meter.total()

    def decode_message(self, word, i: int, rng=None) -> tuple[int | None, int]:
        """Locally correct message bit i (1 <= i <= k)."""
        if not isinstance(word, ReceivedWord):
            word = self.received(word)
        rng = np.random.default_rng(rng) if not isinstance(
            rng, np.random.Generator) else rng
        if not 1 <= i <= self.k:
            raise ValueError(f"message index {i} outside [1, {self.k}]")
        meter = word.new_meter()
        group = self.m * self.chunk_bits
        u = math.ceil(i / group)
        if not self.is_local_expander(word, u, rng, meter):
            return None, meter.total()
        if 4 * u >= 3 * self.t:
            _, tail_bytes = self._tail_majority(word, rng, meter)
            if tail_bytes is None:
                return None, meter.total()
            overrides = {self.t: tail_bytes}
            if not self.is_local_expander(word, self.t, rng, meter,
                                          overrides):
                return None, meter.total()
        msg = word.read_decoded(u, meter)
        if msg is None:
            return None, meter.total()
        return int(msg[(i - 1) % group]), meter.total()

    def __repr__(self) -> str:
        return (f"StrongCode(k={self.k}, ell={self.ell}, beta={self.beta}, "
                f"m={self.m}, t={self.t}, rate={self.rate}, n={self.n})")
