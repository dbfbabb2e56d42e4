"""Versioned binary file formats for graphs, codewords, and masks.

All integers are little-endian.  Codeword bits are packed LSB-first: bit i
of the word lives in byte i // 8 at bit position i % 8.

* graph:     magic ``CDAG``, u32 version, u64 n, f64 delta, u32 degree,
             u64 seed, then the edge list as (u64, u64) pairs.
* weak word: magic ``CRW1``, u32 version, u64 k, u32 ell, f64 delta,
             f64 alpha, u64 graph_seed, 32-byte hash seed, then n = 12k
             packed codeword bits.
* strong word: magic ``CRS1``, u32 version, u64 k, u32 ell, u32 m, u64 t,
             f64 delta, f64 alpha, f64 beta, f64 R, u32 kappa,
             u64 graph_seed, 32-byte hash seed, then n packed bits.
* mask sidecar: sorted u64 bit positions (1-based), no header.
"""

from __future__ import annotations

import struct
from fractions import Fraction

import numpy as np

from .bits import pack_bits, unpack_bits
from .graph import LocalExpanderDag
from .hashing import SEED_BYTES

VERSION = 1

_GRAPH_MAGIC = b"CDAG"
_WEAK_MAGIC = b"CRW1"
_STRONG_MAGIC = b"CRS1"

_GRAPH_HDR = struct.Struct("<IQdIQ")
_WEAK_HDR = struct.Struct("<IQIddQ")
_STRONG_HDR = struct.Struct("<IQIIQddddIQ")


class FormatError(Exception):
    """Raised when a file does not parse as the format it claims to be."""


def _fraction(x: float) -> Fraction:
    return Fraction(x).limit_denominator(10 ** 6)


def _take(data: bytes, n: int, what: str) -> tuple[bytes, bytes]:
    if len(data) < n:
        raise FormatError(f"truncated file: expected {n} more bytes ({what})")
    return data[:n], data[n:]


def _check_magic(data: bytes, magic: bytes, kind: str) -> bytes:
    got, rest = _take(data, len(magic), "magic")
    if got != magic:
        raise FormatError(f"not a {kind} file (magic {got!r})")
    return rest


def _check_version(version: int) -> None:
    if version != VERSION:
        raise FormatError(f"unsupported format version {version}")


# -- graphs -----------------------------------------------------------------


def write_graph(path, graph: LocalExpanderDag) -> None:
    edges = sorted(graph.edges())
    arr = np.array(edges, dtype="<u8").reshape(len(edges), 2)
    with open(path, "wb") as fh:
        fh.write(_GRAPH_MAGIC)
        fh.write(_GRAPH_HDR.pack(VERSION, graph.n, float(graph.delta),
                                 graph.overlay_degree or 0, graph.seed))
        fh.write(arr.tobytes())


def read_graph(path) -> LocalExpanderDag:
    with open(path, "rb") as fh:
        data = fh.read()
    data = _check_magic(data, _GRAPH_MAGIC, "CRLCC-DAG")
    head, data = _take(data, _GRAPH_HDR.size, "graph header")
    version, n, delta, degree, seed = _GRAPH_HDR.unpack(head)
    _check_version(version)
    if len(data) % 16:
        raise FormatError("edge list length is not a multiple of 16 bytes")
    pairs = np.frombuffer(data, dtype="<u8").reshape(-1, 2)
    try:
        return LocalExpanderDag(
            n, _fraction(delta), seed,
            edges=[(int(u), int(v)) for u, v in pairs],
            overlay_degree=degree or None)
    except ValueError as exc:
        raise FormatError(f"bad edge list: {exc}") from exc


# -- codewords ----------------------------------------------------------------


def write_weak(path, code, bits) -> None:
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) != code.n:
        raise ValueError(f"expected {code.n} codeword bits, got {len(bits)}")
    with open(path, "wb") as fh:
        fh.write(_WEAK_MAGIC)
        fh.write(_WEAK_HDR.pack(VERSION, code.k, code.ell, float(code.delta),
                                float(code.alpha), code.graph_seed))
        fh.write(code.hash_seed)
        fh.write(pack_bits(bits))


def read_weak(path):
    """Returns (WeakCode, codeword bits)."""
    from .weak import WeakCode

    with open(path, "rb") as fh:
        data = fh.read()
    data = _check_magic(data, _WEAK_MAGIC, "CRLCC-W")
    head, data = _take(data, _WEAK_HDR.size, "codeword header")
    version, k, ell, delta, alpha, graph_seed = _WEAK_HDR.unpack(head)
    _check_version(version)
    hash_seed, data = _take(data, SEED_BYTES, "hash seed")
    try:
        code = WeakCode(k=k, ell=ell, delta=_fraction(delta),
                        alpha=_fraction(alpha), graph_seed=graph_seed,
                        hash_seed=hash_seed)
    except ValueError as exc:
        raise FormatError(f"bad codeword parameters: {exc}") from exc
    payload, data = _take(data, code.n // 8, "codeword bits")
    if data:
        raise FormatError(f"{len(data)} trailing bytes after codeword")
    return code, unpack_bits(payload, code.n)


def write_strong(path, code, bits) -> None:
    bits = np.asarray(bits, dtype=np.uint8)
    if len(bits) != code.n:
        raise ValueError(f"expected {code.n} codeword bits, got {len(bits)}")
    with open(path, "wb") as fh:
        fh.write(_STRONG_MAGIC)
        fh.write(_STRONG_HDR.pack(
            VERSION, code.k, code.ell, code.m, code.t, float(code.delta),
            float(code.alpha), float(code.beta),
            float(code.message_block.rate), code.kappa, code.graph_seed))
        fh.write(code.hash_seed)
        fh.write(pack_bits(bits))


def read_strong(path):
    """Returns (StrongCode, codeword bits)."""
    from .strong import StrongCode

    with open(path, "rb") as fh:
        data = fh.read()
    data = _check_magic(data, _STRONG_MAGIC, "CRLCC-S")
    head, data = _take(data, _STRONG_HDR.size, "codeword header")
    (version, k, ell, m, t, delta, alpha, beta, rate, kappa,
     graph_seed) = _STRONG_HDR.unpack(head)
    _check_version(version)
    hash_seed, data = _take(data, SEED_BYTES, "hash seed")
    if beta != int(beta):
        raise FormatError(f"beta must be an integer, got {beta}")
    try:
        code = StrongCode(k=k, ell=ell, beta=int(beta), rate=_fraction(rate),
                          m=m, delta=_fraction(delta), kappa=kappa,
                          alpha=_fraction(alpha), graph_seed=graph_seed,
                          hash_seed=hash_seed)
    except ValueError as exc:
        raise FormatError(f"bad codeword parameters: {exc}") from exc
    if code.t != t:
        raise FormatError(f"header says t={t} but parameters give t={code.t}")
    payload, data = _take(data, code.n // 8, "codeword bits")
    if data:
        raise FormatError(f"{len(data)} trailing bytes after codeword")
    return code, unpack_bits(payload, code.n)


def read_codeword(path):
    """Dispatch on magic; returns (kind, code, bits) with kind weak|strong."""
    with open(path, "rb") as fh:
        magic = fh.read(4)
    if magic == _WEAK_MAGIC:
        return ("weak", *read_weak(path))
    if magic == _STRONG_MAGIC:
        return ("strong", *read_strong(path))
    raise FormatError(f"not a CRLCC codeword file (magic {magic!r})")


# -- corruption masks ---------------------------------------------------------


def write_mask(path, positions) -> None:
    pos = np.array(sorted(int(p) for p in positions), dtype="<u8")
    with open(path, "wb") as fh:
        fh.write(pos.tobytes())


def read_mask(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if len(data) % 8:
        raise FormatError("mask length is not a multiple of 8 bytes")
    pos = np.frombuffer(data, dtype="<u8").astype(np.int64)
    if len(pos) and (np.diff(pos) <= 0).any():
        raise FormatError("mask positions must be strictly increasing")
    return pos


def apply_mask(bits, positions, n: int | None = None) -> np.ndarray:
    bits = np.asarray(bits, dtype=np.uint8).copy()
    n = len(bits) if n is None else n
    pos = np.asarray(positions, dtype=np.int64)
    if len(pos) and (pos.min() < 1 or pos.max() > n):
        raise ValueError(f"mask positions must lie in [1, {n}]")
    bits[pos - 1] ^= 1
    return bits
