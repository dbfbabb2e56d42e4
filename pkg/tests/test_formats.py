from fractions import Fraction

import numpy as np
import pytest

from crlcc.formats import (FormatError, apply_mask, read_codeword, read_graph,
                           read_mask, read_strong, read_weak, write_graph,
                           write_mask, write_strong, write_weak)
from crlcc.graph import build_local_expander


def test_graph_round_trip(tmp_path):
    graph = build_local_expander(64, Fraction(1, 4), seed=7)
    path = tmp_path / "g.cdag"
    write_graph(path, graph)
    loaded = read_graph(path)
    assert loaded.n == graph.n
    assert loaded.delta == graph.delta
    assert loaded.seed == graph.seed
    assert set(loaded.edges()) == set(graph.edges())


def test_weak_round_trip(tmp_path, weak16, weak16_word):
    message, word = weak16_word
    path = tmp_path / "w.crlcc"
    write_weak(path, weak16, word)
    code, bits = read_weak(path)
    assert (bits == word).all()
    assert code.k == weak16.k
    assert code.delta == weak16.delta
    assert code.alpha == weak16.alpha
    assert code.hash_seed == weak16.hash_seed
    # a faithful reconstruction re-derives the same codeword
    assert (code.encode(message) == word).all()
    kind, code2, bits2 = read_codeword(path)
    assert kind == "weak" and (bits2 == bits).all()


def test_strong_round_trip(tmp_path, strong_small, strong_small_word):
    message, word = strong_small_word
    path = tmp_path / "s.crlcc"
    write_strong(path, strong_small, word)
    code, bits = read_strong(path)
    assert (bits == word).all()
    assert code.t == strong_small.t
    assert code.m == strong_small.m
    assert code.kappa == strong_small.kappa
    assert code.alpha == strong_small.alpha
    assert (code.encode(message) == word).all()
    kind, _, _ = read_codeword(path)
    assert kind == "strong"


def test_wrong_magic_rejected(tmp_path, weak16, weak16_word):
    _, word = weak16_word
    path = tmp_path / "w.crlcc"
    write_weak(path, weak16, word)
    with pytest.raises(FormatError, match="CRLCC-S"):
        read_strong(path)
    other = tmp_path / "junk.bin"
    other.write_bytes(b"NOPE" + bytes(64))
    with pytest.raises(FormatError, match="magic"):
        read_codeword(other)


def test_truncation_rejected(tmp_path, weak16, weak16_word):
    _, word = weak16_word
    path = tmp_path / "w.crlcc"
    write_weak(path, weak16, word)
    data = path.read_bytes()
    for cut in (2, 10, len(data) - 5):
        clipped = tmp_path / f"cut{cut}.crlcc"
        clipped.write_bytes(data[:cut])
        with pytest.raises(FormatError, match="truncated"):
            read_weak(clipped)


def test_trailing_bytes_rejected(tmp_path, weak16, weak16_word):
    _, word = weak16_word
    path = tmp_path / "w.crlcc"
    write_weak(path, weak16, word)
    padded = tmp_path / "pad.crlcc"
    padded.write_bytes(path.read_bytes() + b"\x00\x00")
    with pytest.raises(FormatError, match="trailing"):
        read_weak(padded)


def test_unsupported_version_rejected(tmp_path, weak16, weak16_word):
    _, word = weak16_word
    path = tmp_path / "w.crlcc"
    write_weak(path, weak16, word)
    data = bytearray(path.read_bytes())
    data[4] = 9  # version field follows the 4-byte magic
    bumped = tmp_path / "v9.crlcc"
    bumped.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="version"):
        read_weak(bumped)


def test_bad_edges_rejected(tmp_path):
    graph = build_local_expander(16, Fraction(1, 4), seed=1)
    path = tmp_path / "g.cdag"
    write_graph(path, graph)
    data = bytearray(path.read_bytes())
    data += bytes(8)  # half an edge
    broken = tmp_path / "broken.cdag"
    broken.write_bytes(bytes(data))
    with pytest.raises(FormatError, match="multiple of 16"):
        read_graph(broken)


def test_mask_round_trip_and_validation(tmp_path):
    path = tmp_path / "m.mask"
    write_mask(path, [5, 2, 99])
    assert read_mask(path).tolist() == [2, 5, 99]
    unsorted = tmp_path / "bad.mask"
    unsorted.write_bytes(np.array([5, 5], dtype="<u8").tobytes())
    with pytest.raises(FormatError, match="increasing"):
        read_mask(unsorted)
    ragged = tmp_path / "ragged.mask"
    ragged.write_bytes(bytes(9))
    with pytest.raises(FormatError, match="multiple of 8"):
        read_mask(ragged)


def test_apply_mask():
    bits = np.zeros(10, dtype=np.uint8)
    out = apply_mask(bits, [1, 10])
    assert out[0] == 1 and out[9] == 1
    assert bits.sum() == 0  # input untouched
    with pytest.raises(ValueError):
        apply_mask(bits, [11])
    with pytest.raises(ValueError):
        apply_mask(bits, [0])
