"""Weak locally correctable construction for computationally bounded errors.

A message of k bits is split into k' = k / ell chunks, one per node of a
local-expander DAG.  Each node gets a hash label committing to its chunk and
its parents' labels.  The codeword is three equal regions of rate-1/4 blocks:

  blocks 1 .. k'        encoded chunks,
  blocks k'+1 .. 2k'    encoded labels,
  blocks 2k'+1 .. 3k'   k' copies of the encoded label of node k'.

Overall rate is exactly 1/12.  Decoding a position never reads the whole
word: a node is *green* when its decoded label matches the hash of its
decoded chunk and parent labels, and *good* when sampled windows around it
are mostly green.  Bits in the final label block and the repetition region
are recovered by majority over sampled repetition blocks; any other bit is
returned raw only if both its node and node k' (with the majority-
reconstructed label standing in for block 2k') pass the goodness test,
otherwise the decoder answers None rather than risk a fabricated value.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction

import numpy as np

from .bits import pack_bits, unpack_bits
from .ecc import get_block_code
from .graph import build_local_expander
from .hashing import LABEL_WIDTHS, check_seed, gen_seed, label_bytes, label_graph
from .word import BlockSpec, QueryMeter, ReceivedWord


class WeakCode:
    """Encoder and local corrector for the weak construction."""

    def __init__(self, k: int, ell: int = 128, delta=Fraction(1, 100),
                 alpha=Fraction(1, 2), epsilon: float = 0.5,
                 graph_seed: int = 7, hash_seed: bytes | None = None,
                 probe_size: int = 12):
        delta = Fraction(delta)
        alpha = Fraction(alpha)
        if ell not in LABEL_WIDTHS:
            raise ValueError(f"ell must be one of {LABEL_WIDTHS}")
        if k <= 0 or k % ell:
            raise ValueError("k must be a positive multiple of ell")
        if not alpha < Fraction(3, 4):
            raise ValueError("alpha must be below 3/4")
        if not delta < min((1 - alpha) / 2, Fraction(1, 4)):
            raise ValueError("delta must be below min((1-alpha)/2, 1/4)")
        self.k = k
        self.ell = ell
        self.delta = delta
        self.alpha = alpha
        self.epsilon = float(epsilon)
        self.k_prime = k // ell
        if self.k_prime < 2:
            raise ValueError("need at least two chunks")
        self.graph_seed = int(graph_seed)
        self.hash_seed = check_seed(hash_seed) if hash_seed else gen_seed()
        self.graph = build_local_expander(self.k_prime, delta, graph_seed,
                                          probe_size=probe_size)
        self.block_code = get_block_code(ell, Fraction(1, 4))
        self.block_bits = self.block_code.block_bits
        self.block_count = 3 * self.k_prime
        self.n = self.block_count * self.block_bits
        assert self.n == 12 * k
        self.block_specs = [
            BlockSpec(offset=b * self.block_bits, code=self.block_code)
            for b in range(self.block_count)]
        self.radius_fraction = self.block_code.radius_fraction
        self.rate = Fraction(self.k, self.n)

    # -- encoding ----------------------------------------------------------

    def label_hash(self, payload: bytes) -> bytes:
        return label_bytes(self.hash_seed, payload, self.ell)

    def chunk_bytes(self, message: np.ndarray, v: int) -> bytes:
        return pack_bits(message[(v - 1) * self.ell : v * self.ell])

    def encode(self, message) -> np.ndarray:
        message = np.asarray(message, dtype=np.uint8)
        if message.shape != (self.k,):
            raise ValueError(f"message must be {self.k} bits")
        chunks = [self.chunk_bytes(message, v)
                  for v in range(1, self.k_prime + 1)]
        labels = label_graph(self.graph, self.hash_seed, chunks, self.ell)
        rows = np.zeros((self.block_count, self.ell), dtype=np.uint8)
        rows[: self.k_prime] = message.reshape(self.k_prime, self.ell)
        for v, lab in enumerate(labels):
            rows[self.k_prime + v] = unpack_bits(lab, self.ell)
        rows[2 * self.k_prime :] = rows[2 * self.k_prime - 1]
        return self.block_code.encode_many(rows).reshape(-1)

    def extract_message(self, codeword) -> np.ndarray:
        """Message bits from the systematic part of an (honest) codeword."""
        bits = np.asarray(codeword, dtype=np.uint8)
        rows = bits[: self.k_prime * self.block_bits].reshape(
            self.k_prime, self.block_bits)
        return rows[:, : self.ell].reshape(-1).copy()

    def received(self, bits) -> ReceivedWord:
        word = ReceivedWord(bits, self.block_specs)
        if word.n != self.n:
            raise ValueError(f"word must be {self.n} bits")
        return word

    def budget_bits(self, divisor: int = 4) -> int:
        """Corruption budget the soundness guarantee assumes."""
        return math.floor(self.radius_fraction * self.k / divisor)

    # -- local checks --------------------------------------------------------

    def _node_label(self, word: ReceivedWord, v: int, meter: QueryMeter,
                    overrides: dict[int, bytes]) -> bytes | None:
        if v in overrides:
            return overrides[v]
        msg = word.read_decoded(self.k_prime + v, meter)
        return None if msg is None else pack_bits(msg)

    def is_green(self, word: ReceivedWord, v: int, meter: QueryMeter,
                 overrides: dict[int, bytes] | None = None) -> bool:
        """Does v's decoded label match the hash of its decoded inputs?

        Reads (and bills) the node's chunk block, its label block unless
        overridden, and every parent's label block.  Any block that fails to
        decode makes the node red.
        """
        overrides = overrides or {}
        parents = self.graph.parents(v)
        meter.bill_block(v)
        if v not in overrides:
            meter.bill_block(self.k_prime + v)
        for p in parents:
            if int(p) not in overrides:
                meter.bill_block(self.k_prime + int(p))
        key = ("green", v, tuple(sorted(overrides.items())))
        cached = word.check_cache.get(key)
        if cached is not None:
            return cached
        result = False
        own = self._node_label(word, v, meter, overrides)
        chunk = word.read_decoded(v, meter)
        if own is not None and chunk is not None:
            parts = []
            for p in parents:
                lab = self._node_label(word, int(p), meter, overrides)
                if lab is None:
                    break
                parts.append(lab)
            else:
                payload = pack_bits(chunk) + b"".join(parts)
                result = self.label_hash(payload) == own
        word.check_cache[key] = result
        return result

    def is_good(self, word: ReceivedWord, v: int, rng: np.random.Generator,
                meter: QueryMeter,
                overrides: dict[int, bytes] | None = None) -> bool:
        """Sampled goodness test around v.

        Rejects a red v outright; otherwise samples windows of every dyadic
        radius on both sides (clipped to [1, k']) and rejects when any
        window's sampled red fraction exceeds 3 * alpha / 8.
        """
        if not self.is_green(word, v, meter, overrides):
            return False
        kp = self.k_prime
        scales = max(1, math.ceil(math.log2(kp)))
        samples = math.ceil(math.log2(kp) ** (1 + self.epsilon))
        threshold = 3 * self.alpha / 8
        for p in range(1, scales + 1):
            r = 2 ** p
            for lo, hi in ((v - r + 1, v), (v, v + r - 1)):
                lo, hi = max(1, lo), min(kp, hi)
                draws = rng.integers(lo, hi + 1, size=samples)
                reds = sum(
                    not self.is_green(word, int(u), meter, overrides)
                    for u in draws)
                if Fraction(reds, samples) > threshold:
                    return False
        return True

    # -- decoding ------------------------------------------------------------

    def repetition_sample_count(self) -> int:
        return min(self.k_prime,
                   max(32, math.ceil(math.log2(self.k) ** 3 / self.ell)))

    def _majority_tail(self, word: ReceivedWord, rng: np.random.Generator,
                       meter: QueryMeter):
        """Majority vote over sampled repetition blocks.

        Returns (codeword_block, label_bytes) for the winning decode, or
        (None, None) when no sampled block decodes.  Ties break to the
        lexicographically smallest label.
        """
        count = self.repetition_sample_count()
        draws = rng.integers(2 * self.k_prime + 1, 3 * self.k_prime + 1,
                             size=count)
        votes: Counter[bytes] = Counter()
        for b in draws:
            msg = word.read_decoded(int(b), meter)
            if msg is not None:
                votes[pack_bits(msg)] += 1
        if not votes:
            return None, None
        top = max(votes.values())
        winner = min(lab for lab, c in votes.items() if c == top)
        block = self.block_code.encode(unpack_bits(winner, self.ell))
        return block, winner

    def dec_repetition(self, word: ReceivedWord, i: int,
                       rng: np.random.Generator,
                       meter: QueryMeter) -> int | None:
        """Recover a bit of the final label block or the repetition region."""
        block, _ = self._majority_tail(word, rng, meter)
        if block is None:
            return None
        j = i % self.block_bits
        if j == 0:
            j = self.block_bits
        return int(block[j - 1])

    def dec_message_region(self, word: ReceivedWord, i: int,
                           rng: np.random.Generator,
                           meter: QueryMeter) -> int | None:
        """Recover a bit outside the repetition-backed region.

        Reconstructs node k''s label from the repetition blocks, then demands
        that node k' (with that label standing in) and the node owning bit i
        both pass the goodness test before answering.  The answer is bit i of
        the challenged block after a decode/re-encode round trip, so stray
        flips inside an otherwise intact block cannot leak through.
        """
        _, tail_label = self._majority_tail(word, rng, meter)
        if tail_label is None:
            return None
        overrides = {self.k_prime: tail_label}
        i_prime = math.ceil(i / self.block_bits) % self.k_prime
        if i_prime == 0:
            i_prime = self.k_prime
        if not self.is_good(word, self.k_prime, rng, meter, overrides):
            return None
        if not self.is_good(word, i_prime, rng, meter, overrides):
            return None
        b = math.ceil(i / self.block_bits)
        message = word.read_decoded(b, meter)
        if message is None:
            return None
        repaired = self.block_code.encode(message)
        return int(repaired[(i - 1) % self.block_bits])

    def _dispatch(self, word: ReceivedWord, i: int,
                  rng: np.random.Generator, meter: QueryMeter) -> int | None:
        if not 1 <= i <= self.n:
            raise ValueError(f"index {i} outside [1, {self.n}]")
        if i > 8 * self.k - 4 * self.ell:
            return self.dec_repetition(word, i, rng, meter)
        return self.dec_message_region(word, i, rng, meter)

    def decode(self, word, i: int, rng=None) -> tuple[int | None, int]:
        """Locally correct codeword bit i; returns (bit or None, queries)."""
        if not isinstance(word, ReceivedWord):
            word = self.received(word)
        rng = np.random.default_rng(rng) if not isinstance(
            rng, np.random.Generator) else rng
        meter = word.new_meter()
        bit = self._dispatch(word, i, rng, meter)
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
        v = math.ceil(i / self.ell)
        _, tail_label = self._majority_tail(word, rng, meter)
        if tail_label is None:
            return None, meter.total()
        overrides = {self.k_prime: tail_label}
        if not self.is_good(word, self.k_prime, rng, meter, overrides):
            return None, meter.total()
        if not self.is_good(word, v, rng, meter, overrides):
            return None, meter.total()
        msg = word.read_decoded(v, meter)
        if msg is None:
            return None, meter.total()
        return int(msg[(i - 1) % self.ell]), meter.total()

    def __repr__(self) -> str:
        return (f"WeakCode(k={self.k}, ell={self.ell}, delta={self.delta}, "
                f"alpha={self.alpha}, n={self.n})")
