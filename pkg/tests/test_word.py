from fractions import Fraction

import numpy as np
import pytest

from crlcc.ecc import get_block_code
from crlcc.word import BlockSpec, ReceivedWord


def make_word(blocks=4):
    code = get_block_code(128, Fraction(1, 4))
    rng = np.random.default_rng(0)
    msgs = rng.integers(0, 2, (blocks, 128)).astype(np.uint8)
    bits = np.concatenate([code.encode(m) for m in msgs])
    specs = [BlockSpec(offset=b * code.block_bits, code=code)
             for b in range(blocks)]
    return ReceivedWord(bits, specs), code, msgs


def test_block_lookup():
    word, code, _ = make_word()
    assert word.block_of(1) == 1
    assert word.block_of(code.block_bits) == 1
    assert word.block_of(code.block_bits + 1) == 2
    assert word.block_of(word.n) == 4
    with pytest.raises(ValueError):
        word.read_bit(0, word.new_meter())
    with pytest.raises(ValueError):
        word.read_bit(word.n + 1, word.new_meter())


def test_meter_counts_distinct_positions():
    word, code, _ = make_word()
    meter = word.new_meter()
    word.read_block(1, meter)
    assert meter.total() == code.block_bits
    # re-reading the same block adds nothing
    word.read_block(1, meter)
    assert meter.total() == code.block_bits
    # a bit inside an already-billed block adds nothing
    word.read_bit(5, meter)
    assert meter.total() == code.block_bits
    # a bit elsewhere adds one
    word.read_bit(code.block_bits + 3, meter)
    assert meter.total() == code.block_bits + 1
    # billing that block afterwards absorbs the stray bit
    word.read_block(2, meter)
    assert meter.total() == 2 * code.block_bits


def test_decoded_reads_bill_and_cache():
    word, code, msgs = make_word()
    meter = word.new_meter()
    got = word.read_decoded(2, meter)
    assert (got == msgs[1]).all()
    assert meter.total() == code.block_bits
    # a second decoder invocation gets its own meter but shares the cache
    other = word.new_meter()
    got2 = word.read_decoded(2, other)
    assert (got2 == msgs[1]).all()
    assert other.total() == code.block_bits


def test_decoded_read_failure_is_none():
    word, code, _ = make_word()
    bits = word.bits.copy()
    bits[: code.block_bits // 2] ^= 1
    broken = ReceivedWord(bits, word.specs)
    got = broken.read_decoded(1, broken.new_meter())
    assert got is None or len(got) == 128
