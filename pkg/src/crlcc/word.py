"""Received words: query-metered access to a possibly corrupted codeword.

Decoders never touch raw bits directly; they go through a ReceivedWord so
that (a) every read is billed to a QueryMeter and (b) block decoding is done
once per word no matter how many local checks look at the same block.  A
meter counts distinct bit positions per decoder invocation, which is the
query complexity of a local corrector: asking for the same position twice
costs one query.  Caching never changes what is billed, only what is
recomputed.
"""

from __future__ import annotations

from bisect import bisect_right
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class BlockSpec:
    """One block of the codeword layout: bit offset and the code it uses."""

    offset: int
    code: object  # BlockCode; duck-typed to avoid an import cycle


class QueryMeter:
    """Distinct bit positions read during one decoder invocation."""

    def __init__(self, word: "ReceivedWord"):
        self._word = word
        self.blocks: set[int] = set()
        self.bits: set[int] = set()

    def bill_block(self, b: int) -> None:
        self.blocks.add(b)

    def bill_bit(self, i: int) -> None:
        self.bits.add(i)

    def total(self) -> int:
        """Number of distinct positions covered by billed blocks and bits."""
        total = sum(self._word.block_len(b) for b in self.blocks)
        for i in self.bits:
            if self._word.block_of(i) not in self.blocks:
                total += 1
        return total


class ReceivedWord:
    """Immutable received bits plus per-word decode and check caches."""

    def __init__(self, bits, specs: list[BlockSpec]):
        self.bits = np.ascontiguousarray(np.asarray(bits, dtype=np.uint8))
        self.specs = specs
        self.n = len(self.bits)
        self._offsets = [s.offset for s in specs]
        last = specs[-1]
        if last.offset + last.code.block_bits != self.n:
            raise ValueError("block layout does not tile the word")
        self._decoded: list[np.ndarray | None] | None = None
        # Shared across decoder invocations on this word; keys are chosen by
        # the decoders (green checks are a pure function of the word).
        self.check_cache: dict = {}

    def new_meter(self) -> QueryMeter:
        return QueryMeter(self)

    def block_len(self, b: int) -> int:
        return self.specs[b - 1].code.block_bits

    def block_of(self, i: int) -> int:
        """1-based block index containing 1-based bit position i."""
        return bisect_right(self._offsets, i - 1)

    def block_slice(self, b: int) -> np.ndarray:
        spec = self.specs[b - 1]
        return self.bits[spec.offset : spec.offset + spec.code.block_bits]

    def read_block(self, b: int, meter: QueryMeter) -> np.ndarray:
        meter.bill_block(b)
        return self.block_slice(b)

    def read_bit(self, i: int, meter: QueryMeter) -> int:
        if not 1 <= i <= self.n:
            raise ValueError(f"bit index {i} outside [1, {self.n}]")
        meter.bill_bit(i)
        return int(self.bits[i - 1])

    def read_decoded(self, b: int, meter: QueryMeter) -> np.ndarray | None:
        """Decoded message of block b (billing the whole block), or None."""
        meter.bill_block(b)
        if self._decoded is None:
            self._decode_all()
        return self._decoded[b - 1]

    def _decode_all(self) -> None:
        """Batch-decode every block, grouping blocks that share a code."""
        self._decoded = [None] * len(self.specs)
        groups: dict[int, tuple[object, list[int]]] = {}
        for idx, spec in enumerate(self.specs):
            key = id(spec.code)
            groups.setdefault(key, (spec.code, []))[1].append(idx)
        for code, idxs in groups.values():
            rows = np.stack([self.block_slice(i + 1) for i in idxs])
            for i, msg in zip(idxs, code.decode_many(rows)):
                self._decoded[i] = msg
