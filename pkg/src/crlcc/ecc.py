"""Systematic block code used for every block of the outer constructions.

The code is a concatenation: an interleaved Reed-Solomon outer code over
GF(2^8) and a short binary inner code per symbol.  A block carrying
`message_bits` bits at rate 1/4 is built as

  * split the message into k_o = message_bits / 8 byte symbols,
  * interleave them into L sub-words of k_sub = k_o / L symbols each, where
    L is the smallest power of two making k_sub <= 127,
  * extend each sub-word with k_sub Reed-Solomon parity symbols
    ([2*k_sub, k_sub] over GF(2^8), generator roots alpha^0..alpha^{k_sub-1}),
  * encode every symbol with a binary [16, 8] inner code of minimum
    distance 5.

Rate 1/2 uses the same outer code with a trivial [8, 8] inner code.  The bit
layout is systematic: the first `message_bits` bits of a block are the message
verbatim, followed by the inner parity of the message symbols (rate 1/4 only),
followed by the fully inner-encoded Reed-Solomon parity symbols.

Decoding is bounded-distance on each sub-word (Berlekamp-Massey locator,
Chien root search, magnitudes by solving the syndrome system) and returns
None when any sub-word fails, so callers can treat unrecoverable blocks as a
first-class outcome.  `radius_bits` is the number of adversarial bit flips a
block is guaranteed to survive: a symbol resists two flips, a sub-word resists
E = floor(k_sub/2) bad symbols, so radius_bits = 3E + 2 at rate 1/4 and E at
rate 1/2.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np

# ---------------------------------------------------------------------------
# GF(2^8) arithmetic, reduction polynomial x^8 + x^4 + x^3 + x^2 + 1 (0x11d).

GF_EXP = np.zeros(510, dtype=np.uint8)
GF_LOG = np.zeros(256, dtype=np.int32)

_x = 1
for _i in range(255):
    GF_EXP[_i] = _x
    GF_LOG[_x] = _i
    _x <<= 1
    if _x & 0x100:
        _x ^= 0x11D
GF_EXP[255:510] = GF_EXP[:255]

# Full multiplication table; fancy indexing into this is the fastest way to
# do elementwise GF products in numpy.
GF_MUL = np.zeros((256, 256), dtype=np.uint8)
_la = GF_LOG[1:][:, None] + GF_LOG[1:][None, :]
GF_MUL[1:, 1:] = GF_EXP[_la]
del _la, _x, _i


def gf_mul(a: int, b: int) -> int:
    return int(GF_MUL[a, b])


def gf_inv(a: int) -> int:
    if a == 0:
        raise ZeroDivisionError("inverse of 0 in GF(256)")
    return int(GF_EXP[255 - GF_LOG[a]])


def gf_pow(a: int, e: int) -> int:
    if a == 0:
        return 0 if e else 1
    return int(GF_EXP[(GF_LOG[a] * e) % 255])


# ---------------------------------------------------------------------------
# Inner [16, 8] binary code, minimum distance 5.
#
# Parity-generator rows found by seeded random search over systematic [I | P]
# generators (LSB-first row masks); the distance is pinned by a test.

INNER_PARITY_ROWS = (186, 125, 115, 183, 153, 173, 79, 225)


def _inner_parity_table() -> np.ndarray:
    table = np.zeros(256, dtype=np.uint16)
    for m in range(256):
        p = 0
        for i in range(8):
            if (m >> i) & 1:
                p ^= INNER_PARITY_ROWS[i]
        table[m] = p
    return table


INNER_PARITY = _inner_parity_table()
# 16-bit codeword for each message byte: systematic byte in the low half.
INNER_ENC = INNER_PARITY.astype(np.uint16) << 8 | np.arange(256, dtype=np.uint16)


@lru_cache(maxsize=1)
def inner_decode_table() -> np.ndarray:
    """Map every 16-bit word to the message byte of a nearest inner codeword.

    Built by multi-source breadth-first search from the 256 codewords, so each
    word is owned by a codeword at minimal Hamming distance.  Ties go to
    whichever word is reached first scanning the previous layer in ascending
    order; within the unique-decoding radius (2 flips) there are no ties.
    """
    owner = np.zeros(1 << 16, dtype=np.uint8)
    dist = np.full(1 << 16, 0xFF, dtype=np.uint8)
    frontier = INNER_ENC.astype(np.int64)
    dist[frontier] = 0
    owner[frontier] = np.arange(256, dtype=np.uint8)
    d = 0
    while len(frontier):
        frontier = np.sort(frontier)
        nxt = []
        for bit in range(16):
            cand = frontier ^ (1 << bit)
            fresh = dist[cand] == 0xFF
            if not fresh.any():
                continue
            cand = cand[fresh]
            src = owner[frontier[fresh]]
            first = np.unique(cand, return_index=True)[1]
            cand, src = cand[first], src[first]
            still = dist[cand] == 0xFF
            cand, src = cand[still], src[still]
            dist[cand] = d + 1
            owner[cand] = src
            nxt.append(cand)
        frontier = np.concatenate(nxt) if nxt else np.array([], dtype=np.int64)
        d += 1
    return owner


# ---------------------------------------------------------------------------
# Reed-Solomon machinery.


@lru_cache(maxsize=None)
def _rs_generator(nsym: int) -> tuple[int, ...]:
    g = [1]
    for i in range(nsym):
        # multiply g by (x - alpha^i); subtraction == addition in GF(2^8)
        root = gf_pow(2, i)
        nxt = [0] * (len(g) + 1)
        for j, c in enumerate(g):
            nxt[j] ^= c
            nxt[j + 1] ^= gf_mul(c, root)
        g = nxt
    return tuple(g)


def _rs_remainder(msg: list[int], gen: tuple[int, ...]) -> list[int]:
    buf = list(msg) + [0] * (len(gen) - 1)
    for i in range(len(msg)):
        c = buf[i]
        if c:
            for j in range(1, len(gen)):
                buf[i + j] ^= gf_mul(gen[j], c)
    return buf[len(msg):]


@lru_cache(maxsize=None)
def _rs_parity_matrix(k_sub: int) -> np.ndarray:
    """[nsym, k_sub] matrix: parity symbols = GF matrix product with message."""
    gen = _rs_generator(k_sub)
    cols = []
    for i in range(k_sub):
        unit = [0] * k_sub
        unit[i] = 1
        cols.append(_rs_remainder(unit, gen))
    return np.array(cols, dtype=np.uint8).T.copy()


@lru_cache(maxsize=None)
def _rs_syndrome_matrix(k_sub: int) -> np.ndarray:
    """[nsym, n_sub] Vandermonde: S_j = sum_t r_t * alpha^(j*(n_sub-1-t))."""
    nsym, n_sub = k_sub, 2 * k_sub
    mat = np.zeros((nsym, n_sub), dtype=np.uint8)
    for j in range(nsym):
        for t in range(n_sub):
            mat[j, t] = gf_pow(2, j * (n_sub - 1 - t))
    return mat


def _gf_matmul(mat: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """GF(256) product mat @ vecs for mat [r, c] and vecs [..., c] -> [..., r]."""
    out = np.zeros(vecs.shape[:-1] + (mat.shape[0],), dtype=np.uint8)
    for c in range(mat.shape[1]):
        out ^= GF_MUL[mat[:, c], vecs[..., c, None]]
    return out


def _berlekamp_massey(synd: list[int]) -> list[int]:
    """Error-locator polynomial (ascending powers) from a syndrome sequence."""
    cur = [1]
    prev = [1]
    L = 0
    shift = 1
    b = 1
    for n in range(len(synd)):
        d = synd[n]
        for i in range(1, L + 1):
            d ^= gf_mul(cur[i], synd[n - i])
        if d == 0:
            shift += 1
        elif 2 * L <= n:
            old = cur[:]
            coef = gf_mul(d, gf_inv(b))
            cur = cur + [0] * (len(prev) + shift - len(cur))
            for i, pv in enumerate(prev):
                cur[i + shift] ^= gf_mul(coef, pv)
            L = n + 1 - L
            prev = old
            b = d
            shift = 1
        else:
            coef = gf_mul(d, gf_inv(b))
            cur = cur + [0] * (len(prev) + shift - len(cur))
            for i, pv in enumerate(prev):
                cur[i + shift] ^= gf_mul(coef, pv)
            shift += 1
    while cur and cur[-1] == 0:
        cur.pop()
    return cur


def _solve_gf_system(a: list[list[int]], b: list[int]) -> list[int] | None:
    n = len(b)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col]), None)
        if piv is None:
            return None
        m[col], m[piv] = m[piv], m[col]
        inv = gf_inv(m[col][col])
        m[col] = [gf_mul(v, inv) for v in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                f = m[r][col]
                m[r] = [vr ^ gf_mul(f, vc) for vr, vc in zip(m[r], m[col])]
    return [m[r][n] for r in range(n)]


def _rs_correct(received: np.ndarray, k_sub: int) -> np.ndarray | None:
    """Bounded-distance decode of one [2k, k] sub-word; None on failure."""
    n_sub = 2 * k_sub
    synd = _gf_matmul(_rs_syndrome_matrix(k_sub), received[None, :])[0]
    if not synd.any():
        return received
    slist = [int(s) for s in synd]
    sigma = _berlekamp_massey(slist)
    nu = len(sigma) - 1
    if nu == 0 or nu > k_sub // 2:
        return None
    # Chien search: error at transmission index t means sigma(alpha^-(n-1-t)) = 0.
    positions = []
    for e in range(n_sub):
        xinv = gf_pow(2, (255 - e) % 255)
        acc = 0
        for c in reversed(sigma):
            acc = gf_mul(acc, xinv) ^ c
        if acc == 0:
            positions.append(n_sub - 1 - e)
    if len(positions) != nu:
        return None
    locs = [gf_pow(2, n_sub - 1 - t) for t in positions]
    a = [[gf_pow(x, j) for x in locs] for j in range(nu)]
    mags = _solve_gf_system(a, slist[:nu])
    if mags is None:
        return None
    fixed = received.copy()
    for t, y in zip(positions, mags):
        fixed[t] ^= y
    if _gf_matmul(_rs_syndrome_matrix(k_sub), fixed[None, :])[0].any():
        return None
    return fixed


# ---------------------------------------------------------------------------
# The public block code.

_POW2_16 = (1 << np.arange(16, dtype=np.uint16)).astype(np.uint16)


class BlockCode:
    """Systematic [block_bits, message_bits] binary code, rate 1/4 or 1/2."""

    def __init__(self, message_bits: int, rate: Fraction | float):
        rate = Fraction(rate).limit_denominator(16)
        if rate not in (Fraction(1, 4), Fraction(1, 2)):
            raise ValueError(f"unsupported rate {rate}; use 1/4 or 1/2")
        if message_bits <= 0 or message_bits % 8:
            raise ValueError("message_bits must be a positive multiple of 8")
        self.message_bits = message_bits
        self.rate = rate
        self.k_o = message_bits // 8
        lanes = 1
        while self.k_o // lanes > 127 or self.k_o % lanes:
            lanes *= 2
            if lanes > self.k_o:
                raise ValueError(f"cannot interleave {self.k_o} symbols into "
                                 "sub-words of <= 127 symbols")
        self.lanes = lanes
        self.k_sub = self.k_o // lanes
        self.nsym = self.k_sub
        self.n_sub = 2 * self.k_sub
        self.block_bits = int(message_bits / rate)
        e_rs = self.k_sub // 2
        inner_e = 2 if rate == Fraction(1, 4) else 0
        self.radius_bits = (inner_e + 1) * (e_rs + 1) - 1
        if self.radius_bits < 1:
            raise ValueError(
                f"message_bits={message_bits} at rate {rate} corrects zero "
                "errors; use a longer message or rate 1/4")
        self.radius_fraction = Fraction(self.radius_bits, self.block_bits)
        self._wide = rate == Fraction(1, 4)

    # -- encoding ----------------------------------------------------------

    def _message_symbols(self, msgs: np.ndarray) -> np.ndarray:
        """[B, message_bits] bits -> [B, k_o] byte symbols (LSB-first)."""
        return np.packbits(msgs, axis=-1, bitorder="little")

    def _parity_symbols(self, syms: np.ndarray) -> np.ndarray:
        """[B, k_o] message symbols -> [B, k_o] RS parity symbols.

        Output order: all parities of interleave lane 0, then lane 1, ...
        Lane s holds message symbols s, s+L, s+2L, ...
        """
        b = syms.shape[0]
        lanes = syms.reshape(b, self.k_sub, self.lanes).transpose(0, 2, 1)
        par = _gf_matmul(_rs_parity_matrix(self.k_sub), lanes)
        return par.reshape(b, self.k_o)

    def encode_many(self, msgs: np.ndarray) -> np.ndarray:
        msgs = np.asarray(msgs, dtype=np.uint8)
        if msgs.ndim != 2 or msgs.shape[1] != self.message_bits:
            raise ValueError("bad message shape")
        b = msgs.shape[0]
        syms = self._message_symbols(msgs)
        par = self._parity_symbols(syms)
        out = np.zeros((b, self.block_bits), dtype=np.uint8)
        out[:, : self.message_bits] = msgs
        if self._wide:
            mp = INNER_PARITY[syms].astype(np.uint8)
            out[:, self.message_bits : 2 * self.message_bits] = np.unpackbits(
                mp, axis=-1, bitorder="little")
            pw = INNER_ENC[par]
            pbits = (pw[..., None] >> np.arange(16, dtype=np.uint16)) & 1
            out[:, 2 * self.message_bits :] = pbits.reshape(b, -1)
        else:
            out[:, self.message_bits :] = np.unpackbits(
                par, axis=-1, bitorder="little")
        return out

    def encode(self, msg) -> np.ndarray:
        return self.encode_many(np.asarray(msg, dtype=np.uint8)[None, :])[0]

    # -- decoding ----------------------------------------------------------

    def _gather_symbols(self, words: np.ndarray) -> np.ndarray:
        """[B, block_bits] -> [B, 2*k_o] inner-decoded byte symbols."""
        b = words.shape[0]
        m = self.message_bits
        if self._wide:
            sys_b = np.packbits(words[:, :m], axis=-1, bitorder="little")
            par_b = np.packbits(words[:, m : 2 * m], axis=-1, bitorder="little")
            msg_w = sys_b.astype(np.uint16) | par_b.astype(np.uint16) << 8
            tail = words[:, 2 * m :].reshape(b, self.k_o, 16).astype(np.uint16)
            tail_w = (tail * _POW2_16).sum(axis=-1, dtype=np.uint16)
            table = inner_decode_table()
            return np.concatenate([table[msg_w], table[tail_w]], axis=1)
        sys_b = np.packbits(words[:, :m], axis=-1, bitorder="little")
        par_b = np.packbits(words[:, m :], axis=-1, bitorder="little")
        return np.concatenate([sys_b, par_b], axis=1)

    def decode_many(self, words: np.ndarray) -> list[np.ndarray | None]:
        """Decode a batch; element i is the message bits of row i, or None."""
        words = np.asarray(words, dtype=np.uint8)
        if words.ndim != 2 or words.shape[1] != self.block_bits:
            raise ValueError("bad word shape")
        out: list[np.ndarray | None] = [None] * words.shape[0]
        # Fast path: a word that equals the encoding of its own systematic
        # part is a codeword, which covers every honest block.
        sys_part = words[:, : self.message_bits]
        clean = (self.encode_many(sys_part) == words).all(axis=1)
        for i in np.nonzero(clean)[0]:
            out[int(i)] = sys_part[int(i)].copy()
        for i in np.nonzero(~clean)[0]:
            out[int(i)] = self._decode_slow(words[int(i)])
        return out

    def decode(self, word) -> np.ndarray | None:
        return self.decode_many(np.asarray(word, dtype=np.uint8)[None, :])[0]

    def _decode_slow(self, word: np.ndarray) -> np.ndarray | None:
        syms = self._gather_symbols(word[None, :])[0]
        msg_syms = syms[: self.k_o]
        par_syms = syms[self.k_o :]
        fixed_lanes = []
        for s in range(self.lanes):
            lane = np.concatenate(
                [msg_syms[s :: self.lanes],
                 par_syms[s * self.nsym : (s + 1) * self.nsym]])
            fixed = _rs_correct(lane, self.k_sub)
            if fixed is None:
                return None
            fixed_lanes.append(fixed[: self.k_sub])
        msg = np.zeros(self.k_o, dtype=np.uint8)
        for s in range(self.lanes):
            msg[s :: self.lanes] = fixed_lanes[s]
        return np.unpackbits(msg, bitorder="little")[: self.message_bits].copy()

    def reencode(self, word) -> np.ndarray | None:
        """Decode then re-encode: the codeword this word is read as, or None."""
        msg = self.decode(word)
        return None if msg is None else self.encode(msg)

    def __repr__(self) -> str:
        return (f"BlockCode(message_bits={self.message_bits}, rate={self.rate}, "
                f"lanes={self.lanes}, radius_bits={self.radius_bits})")


@lru_cache(maxsize=None)
def get_block_code(message_bits: int, rate: Fraction) -> BlockCode:
    """Shared BlockCode instances (their tables are worth reusing)."""
    return BlockCode(message_bits, rate)
