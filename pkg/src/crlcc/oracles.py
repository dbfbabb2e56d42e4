"""Exhaustive reference checks used to pin down the sampling components.

Everything in this module trades time for certainty: exact subset enumeration,
full-word decoding, brute-force nearest-codeword search.  The production
decoders must agree with these on small instances; the test suite freezes that
agreement.  Functions here deliberately avoid importing the construction
modules (they duck-type graph and code objects) so each side can be trusted
independently of the other.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations

import numpy as np

ORACLE_RADIUS_LIMIT = 12
ORACLE_SIDE_LIMIT = 24


def subset_threshold(delta: Fraction, size: int) -> int:
    """Smallest subset size that delta-expansion constrains: > delta * size."""
    return math.floor(Fraction(delta) * size) + 1


def oracle_delta_expander(edges, tail, head, delta) -> bool:
    """Exact check that (tail, head) with the given edges is a delta-expander.

    The property: every X subseteq tail and Y subseteq head, both of size
    greater than delta times their side, have at least one edge from X to Y.
    Equivalently every X of size s_tail must reach all but at most
    s_head - 1 nodes of head.  Enumerates all X; refuses sides larger than
    ORACLE_RADIUS_LIMIT because the enumeration is exponential.
    """
    delta = Fraction(delta)
    tail = [int(v) for v in tail]
    head = [int(v) for v in head]
    r_t, r_h = len(tail), len(head)
    if max(r_t, r_h) > ORACLE_SIDE_LIMIT:
        raise ValueError(
            f"interval size {max(r_t, r_h)} exceeds the exact-check limit "
            f"{ORACLE_SIDE_LIMIT}")
    if r_t == 0 or r_h == 0:
        return True
    s_t = subset_threshold(delta, r_t)
    s_h = subset_threshold(delta, r_h)
    if s_t > r_t or s_h > r_h:
        return True
    tail_pos = {v: i for i, v in enumerate(tail)}
    head_pos = {v: i for i, v in enumerate(head)}
    masks = [0] * r_t
    for u, v in edges:
        iu = tail_pos.get(int(u))
        iv = head_pos.get(int(v))
        if iu is not None and iv is not None:
            masks[iu] |= 1 << iv
    need = r_h - s_h + 1
    for xs in combinations(range(r_t), s_t):
        cover = 0
        for i in xs:
            cover |= masks[i]
        if cover.bit_count() < need:
            return False
    return True


def verify_local_expansion(graph, max_radius: int = ORACLE_RADIUS_LIMIT,
                           delta=None) -> list[tuple[int, int, str]]:
    """Exact local-expansion audit of a DAG; returns violating windows.

    For every node v and radius r <= max_radius it checks the descendant
    window ([v, v+r-1] -> [v+r, v+2r-1]) and the ancestor window
    ([v-2r+1, v-r] -> [v-r+1, v]) whenever they fit inside [1, n].  An empty
    return value means every tested window is a delta-expander.
    """
    if max_radius > ORACLE_RADIUS_LIMIT:
        raise ValueError(f"max_radius {max_radius} exceeds the exact-check "
                         f"limit {ORACLE_RADIUS_LIMIT}")
    delta = Fraction(graph.delta if delta is None else delta)
    bad: list[tuple[int, int, str]] = []
    for v in range(1, graph.n + 1):
        for r in range(1, max_radius + 1):
            if v + 2 * r - 1 <= graph.n:
                ie = graph.interval_expander(v, r)
                if not oracle_delta_expander(ie.edges, ie.tail, ie.head, delta):
                    bad.append((v, r, "descendants"))
            if v - 2 * r + 1 >= 1:
                ie = graph.interval_expander(v, r, ancestors=True)
                if not oracle_delta_expander(ie.edges, ie.tail, ie.head, delta):
                    bad.append((v, r, "ancestors"))
    return bad


# ---------------------------------------------------------------------------
# Goodness of nodes relative to a red set.


def oracle_alpha_good(n: int, red, v: int, alpha) -> bool:
    """Exact alpha-goodness of node v against red set `red` on [1, n].

    v is alpha-good when every backward window [v-r+1, v] and forward window
    [v, v+r-1] (clipped to [1, n]) contains at most alpha * r red nodes, for
    every r from 1 to n.  Comparisons are exact rational arithmetic.
    """
    alpha = Fraction(alpha)
    red = set(int(x) for x in red)
    if v in red:
        return False
    back = fwd = 0
    for r in range(1, n + 1):
        lo = v - r + 1
        hi = v + r - 1
        if 1 <= lo and lo in red:
            back += 1
        if hi <= n and hi in red:
            fwd += 1
        if back > alpha * r or fwd > alpha * r:
            return False
    return True


def oracle_alpha_good_all(n: int, red, alpha) -> np.ndarray:
    """Vector of oracle_alpha_good for all nodes; index 0 is unused."""
    alpha = Fraction(alpha)
    ind = np.zeros(n + 2, dtype=np.int64)
    for x in red:
        if 1 <= x <= n:
            ind[x] = 1
    pref = np.concatenate([[0], np.cumsum(ind[1 : n + 1])])  # pref[i] = #red in [1, i]
    good = ind[1 : n + 1] == 0
    num, den = alpha.numerator, alpha.denominator
    v = np.arange(1, n + 1)
    for r in range(1, n + 1):
        lo = np.maximum(v - r + 1, 1)
        hi = np.minimum(v + r - 1, n)
        back = pref[v] - pref[lo - 1]
        fwd = pref[hi] - pref[v - 1]
        good &= (back * den <= num * r) & (fwd * den <= num * r)
    out = np.zeros(n + 1, dtype=bool)
    out[1:] = good
    return out


# ---------------------------------------------------------------------------
# Exhaustive code checks.


def oracle_nearest_codeword(code, word) -> tuple[np.ndarray, int]:
    """Brute-force nearest codeword of `word`; (message bits, distance).

    Enumerates all 2^message_bits codewords, so it refuses messages longer
    than 20 bits.  Ties resolve to the smallest message read as an LSB-first
    integer, which is the enumeration order.
    """
    if code.message_bits > 20:
        raise ValueError("message space too large for brute force")
    count = 1 << code.message_bits
    msgs = (np.arange(count, dtype=np.uint32)[:, None]
            >> np.arange(code.message_bits, dtype=np.uint32)) & 1
    msgs = msgs.astype(np.uint8)
    words = code.encode_many(msgs)
    dist = (words != np.asarray(word, dtype=np.uint8)[None, :]).sum(axis=1)
    best = int(np.argmin(dist))
    return msgs[best].copy(), int(dist[best])


def oracle_tampered_blocks(code, honest_bits, word_bits):
    """Classify every block of a received word against the honest codeword.

    Returns (tampered, failed): `failed` holds indices whose block does not
    decode at all, `tampered` holds indices that decode to a codeword other
    than the honest one.  Block indices are 1-based, matching the layout in
    `code.block_specs`.
    """
    honest_bits = np.asarray(honest_bits, dtype=np.uint8)
    word_bits = np.asarray(word_bits, dtype=np.uint8)
    tampered: set[int] = set()
    failed: set[int] = set()
    for b, spec in enumerate(code.block_specs, start=1):
        lo = spec.offset
        hi = lo + spec.code.block_bits
        msg = spec.code.decode(word_bits[lo:hi])
        if msg is None:
            failed.add(b)
        elif (spec.code.encode(msg) != honest_bits[lo:hi]).any():
            tampered.add(b)
    return tampered, failed


# ---------------------------------------------------------------------------
# Exhaustive green / goodness checks on whole received words.


def oracle_green_set(code, word_bits) -> np.ndarray:
    """Exact green set of a received weak-construction word.

    green[v] (1-based; index 0 unused) is True when the message block of v,
    the label block of v, and the label blocks of all parents of v decode,
    and the decoded label equals the hash of the decoded chunk with the
    decoded parent labels.  This is the full-decode counterpart of the
    query-driven check in the decoder.
    """
    from .bits import pack_bits

    word_bits = np.asarray(word_bits, dtype=np.uint8)
    kp = code.k_prime
    bb = code.block_code.block_bits
    blocks = word_bits[: 2 * kp * bb].reshape(2 * kp, bb)
    decoded = code.block_code.decode_many(blocks)
    chunks = decoded[:kp]
    labels = decoded[kp:]
    label_bytes = [None if l is None else pack_bits(l) for l in labels]
    green = np.zeros(kp + 1, dtype=bool)
    for v in range(1, kp + 1):
        if chunks[v - 1] is None or label_bytes[v - 1] is None:
            continue
        parents = code.graph.parents(v)
        parts = [label_bytes[p - 1] for p in parents]
        if any(p is None for p in parts):
            continue
        payload = pack_bits(chunks[v - 1]) + b"".join(parts)
        green[v] = code.label_hash(payload) == label_bytes[v - 1]
    return green


def oracle_strong_green(code, word_bits):
    """Exact green sets of a strong-construction word.

    Returns (node_green, meta_green): node_green[u, j] covers graph node j of
    meta-node u (1-based on both axes), and meta_green[u] applies the
    meta-node rule (final node green and at least two thirds of the chain
    green).
    """
    from .bits import pack_bits

    word_bits = np.asarray(word_bits, dtype=np.uint8)
    t, m = code.t, code.m
    mb = code.message_block.block_bits
    lb = code.label_block.block_bits
    msg_rows = word_bits[: t * mb].reshape(t, mb)
    lab_rows = word_bits[t * mb : t * mb + t * lb].reshape(t, lb)
    dec_msg = code.message_block.decode_many(msg_rows)
    dec_lab = code.label_block.decode_many(lab_rows)
    lab_bytes = [None if l is None else pack_bits(l) for l in dec_lab]
    cb = code.chunk_bits
    lbits = code.ell
    lbytes = lbits // 8

    def node_label(u, j):
        grp = lab_bytes[u - 1]
        return None if grp is None else grp[(j - 1) * lbytes : j * lbytes]

    node_green = np.zeros((t + 1, m + 1), dtype=bool)
    for u in range(1, t + 1):
        if dec_msg[u - 1] is None:
            continue
        for j in range(1, m + 1):
            own = node_label(u, j)
            if own is None:
                continue
            chunk = dec_msg[u - 1][(j - 1) * cb : j * cb]
            parts = []
            ok = True
            for (p, r) in code.node_parents(u, j):
                lab = node_label(p, r)
                if lab is None:
                    ok = False
                    break
                parts.append(lab)
            if not ok:
                continue
            payload = pack_bits(chunk) + b"".join(parts)
            node_green[u, j] = code.label_hash(payload) == own
    meta_green = np.zeros(t + 1, dtype=bool)
    for u in range(1, t + 1):
        meta_green[u] = bool(node_green[u, m]) and \
            3 * int(node_green[u, 1:].sum()) >= 2 * m
    return node_green, meta_green


# ---------------------------------------------------------------------------
# Reachability.


def reachable_set(graph, start: int, alive=None) -> set[int]:
    """Nodes reachable from `start` along edges, staying inside `alive`."""
    allowed = None if alive is None else set(int(x) for x in alive)
    if allowed is not None and start not in allowed:
        return set()
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in graph.children(u):
            v = int(v)
            if v in seen or (allowed is not None and v not in allowed):
                continue
            seen.add(v)
            stack.append(v)
    return seen
