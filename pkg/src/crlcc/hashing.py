"""Seeded hash labels over a DAG.

Each node's label commits to its data chunk and to the labels of all its
parents, so one inconsistent chunk anywhere upstream breaks every label that
depends on it.  Labels are SHA-256 over (seed, domain byte, payload),
truncated to the configured width; 128- and 256-bit labels are supported.
"""

from __future__ import annotations

import hashlib
import secrets

SEED_BYTES = 32
LABEL_WIDTHS = (128, 256)
_DOMAIN = b"\x01"


def gen_seed(rng=None) -> bytes:
    """Fresh 32-byte hash seed; pass a numpy Generator for reproducibility."""
    if rng is None:
        return secrets.token_bytes(SEED_BYTES)
    return rng.bytes(SEED_BYTES)


def check_seed(seed: bytes) -> bytes:
    if not isinstance(seed, (bytes, bytearray)) or len(seed) != SEED_BYTES:
        raise ValueError(f"hash seed must be {SEED_BYTES} bytes")
    return bytes(seed)


def label_bytes(seed: bytes, payload: bytes, label_bits: int) -> bytes:
    """The label of `payload` under `seed`, truncated to label_bits."""
    if label_bits not in LABEL_WIDTHS:
        raise ValueError(f"label width must be one of {LABEL_WIDTHS}")
    digest = hashlib.sha256(seed + _DOMAIN + payload).digest()
    return digest[: label_bits // 8]


def label_graph(graph, seed: bytes, chunks: list[bytes],
                label_bits: int) -> list[bytes]:
    """Labels for all nodes of `graph`, in node order (index 0 -> node 1).

    chunks[v-1] is node v's data chunk.  A node's payload is its chunk
    followed by the labels of its parents in ascending node order; nodes are
    processed in ascending order, which is topological for these DAGs.
    """
    seed = check_seed(seed)
    if len(chunks) != graph.n:
        raise ValueError(f"need {graph.n} chunks, got {len(chunks)}")
    labels: list[bytes] = []
    for v in range(1, graph.n + 1):
        payload = chunks[v - 1] + b"".join(
            labels[p - 1] for p in graph.parents(v))
        labels.append(label_bytes(seed, payload, label_bits))
    return labels
