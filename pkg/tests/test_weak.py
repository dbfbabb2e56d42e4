from fractions import Fraction

import numpy as np
import pytest

from crlcc.channel import cheapest_patch
from crlcc.oracles import oracle_alpha_good, oracle_green_set
from crlcc.weak import WeakCode


def plant_red(code, honest, nodes):
    """Tamper the message block of each node, leaving labels decodable.

    Steering one message block to a different codeword turns exactly that
    node red: children hash parent labels, not parent chunks, so nothing
    propagates.
    """
    patch = cheapest_patch(code.block_code)
    bits = honest.copy()
    for v in nodes:
        offset = code.block_specs[v - 1].offset
        bits[offset + patch.positions] ^= 1
    return bits


def test_parameter_validation():
    with pytest.raises(ValueError):
        WeakCode(k=100)  # not a multiple of ell
    with pytest.raises(ValueError):
        WeakCode(k=2048, ell=77)
    with pytest.raises(ValueError):
        WeakCode(k=2048, alpha=Fraction(3, 4))
    with pytest.raises(ValueError):
        WeakCode(k=2048, delta=Fraction(1, 3))
    with pytest.raises(ValueError):
        WeakCode(k=128)  # single node


def test_rate_is_one_twelfth(weak16, weak256):
    for code in (weak16, weak256):
        assert code.rate == Fraction(1, 12)
        assert code.n == 12 * code.k


def test_layout_and_repetition_blocks(weak16, weak16_word):
    _, word = weak16_word
    code = weak16
    bb = code.block_bits
    kp = code.k_prime
    # repetition region: k_prime copies of the final label block
    label_tail = word[(2 * kp - 1) * bb:(2 * kp) * bb]
    for b in range(2 * kp, 3 * kp):
        assert (word[b * bb:(b + 1) * bb] == label_tail).all()


def test_extract_message_round_trip(weak16, weak16_word):
    message, word = weak16_word
    assert (weak16.extract_message(word) == message).all()


def test_honest_word_is_all_green(weak16, weak16_word):
    _, word = weak16_word
    green = oracle_green_set(weak16, word)
    assert green[1:].all()


def test_is_green_matches_oracle_on_plants(weak16, weak16_word):
    _, honest = weak16_word
    code = weak16
    bits = plant_red(code, honest, [3, 7])
    green = oracle_green_set(code, bits)
    expected = np.ones(code.k_prime + 1, dtype=bool)
    expected[[3, 7]] = False
    assert (green[1:] == expected[1:]).all()
    word = code.received(bits)
    for v in range(1, code.k_prime + 1):
        assert code.is_green(word, v, word.new_meter()) == bool(green[v])


def test_label_tamper_poisons_children(weak16, weak16_word):
    _, honest = weak16_word
    code = weak16
    patch = cheapest_patch(code.block_code)
    bits = honest.copy()
    offset = code.block_specs[code.k_prime].offset  # label block of node 1
    bits[offset + patch.positions] ^= 1
    green = oracle_green_set(code, bits)
    assert not green[1]
    for child in code.graph.children(1):
        assert not green[int(child)]


def test_decode_honest_everywhere(weak16, weak16_word):
    _, word = weak16_word
    code = weak16
    received = code.received(word)
    rng = np.random.default_rng(17)
    bb = code.block_bits
    kp = code.k_prime
    picks = [1, bb, bb + 1,  # message region
             kp * bb + 1,  # first label block
             (2 * kp - 1) * bb,  # last bit served by the front decoder
             (2 * kp - 1) * bb + 1,  # first bit of the repetition region
             2 * kp * bb + 5, code.n]
    for i in picks:
        bit, queries = code.decode(received, i, rng)
        assert bit == int(word[i - 1]), f"index {i}"
        assert 0 < queries <= code.n


def test_decode_message_bits(weak16, weak16_word):
    message, word = weak16_word
    code = weak16
    received = code.received(word)
    rng = np.random.default_rng(23)
    for i in [1, 2, code.ell, code.ell + 1, code.k // 2, code.k]:
        bit, _ = code.decode_message(received, i, rng)
        assert bit == int(message[i - 1]), f"message index {i}"


def test_decode_refuses_on_red_node(weak16, weak16_word):
    _, honest = weak16_word
    code = weak16
    bits = plant_red(code, honest, [2])
    word = code.received(bits)
    rng = np.random.default_rng(5)
    # any challenge inside node 2's message block must now refuse or stay
    # honest; the planted block decodes differently, so a non-refusing
    # answer would be wrong
    offset = code.block_specs[1].offset
    for i in [offset + 1, offset + 17, offset + code.block_bits]:
        bit, _ = code.decode(word, i, rng)
        assert bit is None


def test_is_good_accepts_honest_rejects_flood(weak16, weak16_word):
    _, honest = weak16_word
    code = weak16
    word = code.received(honest)
    rng = np.random.default_rng(31)
    assert code.is_good(word, 5, rng, word.new_meter())
    # paint half the graph solid red around node 5
    kp = code.k_prime
    reds = list(range(2, 2 + kp // 2))
    bits = plant_red(code, honest, reds)
    assert not oracle_alpha_good(kp, set(reds), 5, code.alpha)
    flooded = code.received(bits)
    rejected = 0
    for trial in range(20):
        rng = np.random.default_rng([41, trial])
        if not code.is_good(flooded, 5, rng, flooded.new_meter()):
            rejected += 1
    assert rejected >= 19


def test_budget_formula(weak16):
    code = weak16
    assert code.budget_bits() == int(code.radius_fraction * code.k / 4)
    assert code.budget_bits(8) == int(code.radius_fraction * code.k / 8)


def test_query_meter_nonzero_and_bounded(weak256, weak256_word):
    _, word = weak256_word
    code = weak256
    received = code.received(word)
    bit, queries = code.decode(received, 1, np.random.default_rng(3))
    assert bit == int(word[0])
    assert 0 < queries < code.n
