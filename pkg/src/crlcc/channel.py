"""Adversarial channel harness: bounded-budget attacks and game rounds.

A round follows the channel game: draw a message, encode it, let an attack
flip at most `budget` bits, pick a challenge index (the attack may suggest
one), and score the decoder's answer as correct, bottom (refused), or fooled
(confidently wrong).  Fooling is the event the constructions must make
negligible; refusals are allowed.

Attacks are efficient algorithms with full knowledge of the code, including
the hash seed.  The interesting ones tamper surgically: thanks to linearity,
adding a low-weight codeword of a block code moves that block to a different
valid codeword, and applying only part of the difference (leaving the rest
within decoding radius) does the same at lower cost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ecc import GF_MUL, INNER_ENC, _rs_parity_matrix

_WT16 = np.array([bin(int(w)).count("1") for w in INNER_ENC], dtype=np.int64)
_WT8 = np.array([bin(b).count("1") for b in range(256)], dtype=np.int64)


@dataclass(frozen=True)
class Patch:
    """A partial block tamper: flip `positions` (block-relative, 0-based)."""

    positions: np.ndarray
    cost: int
    data_bit: int  # message bit index (0-based) the tamper alters


@lru_cache(maxsize=None)
def _tamper_weights(message_bits: int, rate) -> np.ndarray:
    """weights[q, v]: codeword weight of the single-symbol message (q, v).

    q indexes the position inside an interleave lane, v the byte value.  The
    weight is computed symbol-wise from the parity matrix, without encoding.
    """
    from fractions import Fraction

    from .ecc import get_block_code

    code = get_block_code(message_bits, Fraction(rate))
    par = _rs_parity_matrix(code.k_sub)
    wt = _WT16 if code.rate == Fraction(1, 4) else _WT8
    values = np.arange(256, dtype=np.uint8)
    weights = np.zeros((code.k_sub, 256), dtype=np.int64)
    for q in range(code.k_sub):
        total = wt[values].copy()
        for j in range(code.nsym):
            total += wt[GF_MUL[par[j, q], values]]
        weights[q] = total
    weights[:, 0] = 1 << 30
    return weights


def cheapest_patch(code, byte_lo: int = 0, byte_hi: int | None = None) -> Patch:
    """Cheapest tamper of one block whose altered byte lies in [lo, hi).

    Searches single-byte messages for the lightest nonzero codeword, then
    drops `radius_bits` of its support: the result still decodes to the
    tampered codeword but costs that much less to apply.
    """
    byte_hi = code.k_o if byte_hi is None else byte_hi
    weights = _tamper_weights(code.message_bits, code.rate)
    best = None
    for p in range(byte_lo, byte_hi):
        q = p // code.lanes
        v = int(np.argmin(weights[q]))
        w = int(weights[q, v])
        if best is None or w < best[0]:
            best = (w, p, v)
    _, p, v = best
    msg = np.zeros(code.message_bits, dtype=np.uint8)
    bits = np.unpackbits(np.array([v], dtype=np.uint8), bitorder="little")
    msg[8 * p : 8 * p + 8] = bits
    support = np.nonzero(code.encode(msg))[0]
    keep = support[: len(support) - code.radius_bits]
    return Patch(positions=keep, cost=len(keep),
                 data_bit=8 * p + int(np.nonzero(bits)[0][0]))


@dataclass
class AttackResult:
    bits: np.ndarray
    positions: np.ndarray  # 1-based flipped positions, sorted
    challenge_hint: int | None = None


def _finish(honest, flips: set[int], hint) -> AttackResult:
    bits = np.asarray(honest, dtype=np.uint8).copy()
    pos = np.array(sorted(flips), dtype=np.int64)
    if len(pos):
        bits[pos - 1] ^= 1
    return AttackResult(bits=bits, positions=pos, challenge_hint=hint)


def _apply_patch(flips: set[int], offset: int, patch: Patch) -> None:
    flips.update(int(offset + q + 1) for q in patch.positions)


def attack_random_flip(code, honest, budget: int, rng) -> AttackResult:
    n = len(honest)
    count = min(budget, n)
    pos = rng.choice(n, size=count, replace=False) + 1
    return _finish(honest, set(int(p) for p in pos), None)


def attack_block_killer(code, honest, budget: int, rng) -> AttackResult:
    """Retarget random blocks to different codewords until budget runs out."""
    flips: set[int] = set()
    hint = None
    remaining = budget
    for b in rng.permutation(code.block_count) + 1:
        spec = code.block_specs[b - 1]
        patch = cheapest_patch(spec.code)
        if patch.cost > remaining:
            continue
        _apply_patch(flips, spec.offset, patch)
        remaining -= patch.cost
        if hint is None:
            hint = spec.offset + patch.data_bit + 1
    return _finish(honest, flips, hint)


def attack_tail(code, honest, budget: int, rng) -> AttackResult:
    """block_killer restricted to the repetition region."""
    flips: set[int] = set()
    hint = None
    remaining = budget
    first_rep = 2 * (code.block_count // 3)
    rep = np.arange(first_rep + 1, code.block_count + 1)
    for b in rng.permutation(rep):
        spec = code.block_specs[b - 1]
        patch = cheapest_patch(spec.code)
        if patch.cost > remaining:
            break
        _apply_patch(flips, spec.offset, patch)
        remaining -= patch.cost
        if hint is None:
            hint = spec.offset + patch.data_bit + 1
    return _finish(honest, flips, hint)


def attack_red_flood(code, honest, budget: int, rng) -> AttackResult:
    """Poison label blocks of the widest-fanning nodes first.

    Against the weak construction one tampered label turns the node and all
    of its children red.  Against the strong construction the tamper targets
    the final chain node's label so the whole meta-node goes red, but the
    bounded fan stops it from spreading.
    """
    flips: set[int] = set()
    remaining = budget
    if hasattr(code, "k_prime"):  # weak layout
        graph, count, label_base = code.graph, code.k_prime, code.k_prime
        patch = cheapest_patch(code.block_code)
        hint = 1
    else:
        graph, count, label_base = code.base, code.t, code.t
        lb = code.ell // 8
        patch = cheapest_patch(code.label_block,
                               byte_lo=(code.m - 1) * lb, byte_hi=code.m * lb)
        hint = None
    order = sorted(range(1, count + 1),
                   key=lambda v: (-graph.out_degree(v), v))
    for v in order:
        if patch.cost > remaining:
            break
        spec = code.block_specs[label_base + v - 1]
        _apply_patch(flips, spec.offset, patch)
        remaining -= patch.cost
        if hint is None:
            hint = code.block_specs[v - 1].offset + 1
    return _finish(honest, flips, hint if flips else None)


def attack_label_swap(code, honest, budget: int, rng) -> AttackResult:
    """Splice in a prefix of a properly re-labeled forgery.

    Flips the first message bit, re-encodes with the real hash seed, and
    rewrites blocks toward the forgery in layout order while the budget
    lasts, applying the final block partially when the full difference no
    longer fits.
    """
    honest = np.asarray(honest, dtype=np.uint8)
    message = code.extract_message(honest)
    message = message.copy()
    message[0] ^= 1
    forged = code.encode(message)
    flips: set[int] = set()
    remaining = budget
    for b in range(1, code.block_count + 1):
        spec = code.block_specs[b - 1]
        lo, hi = spec.offset, spec.offset + spec.code.block_bits
        diff = np.nonzero(honest[lo:hi] != forged[lo:hi])[0]
        if len(diff) == 0:
            continue
        full = len(diff)
        partial = full - spec.code.radius_bits
        if full <= remaining:
            take = full
        elif 0 < partial <= remaining:
            take = partial
        else:
            break
        flips.update(int(lo + q + 1) for q in diff[:take])
        remaining -= take
    return _finish(honest, flips, 1)


ATTACKS = {
    "random_flip": attack_random_flip,
    "block_killer": attack_block_killer,
    "tail_attack": attack_tail,
    "red_flood": attack_red_flood,
    "label_swap": attack_label_swap,
}


# ---------------------------------------------------------------------------
# Game rounds.


@dataclass
class ChannelRound:
    attack: str
    budget: int
    flips: int
    challenge: int
    truth: int
    answer: int | None
    outcome: str  # "correct" | "bottom" | "fooled"
    queries: int

    def to_record(self) -> dict:
        return {
            "attack": self.attack, "budget": self.budget, "flips": self.flips,
            "challenge": self.challenge, "truth": self.truth,
            "answer": self.answer, "outcome": self.outcome,
            "queries": self.queries,
        }


@dataclass
class AttackStats:
    attack: str
    rounds: int = 0
    correct: int = 0
    bottom: int = 0
    fooled: int = 0
    queries: int = 0

    @property
    def fool_rate(self) -> float:
        return self.fooled / self.rounds if self.rounds else 0.0

    def fool_upper(self, confidence: float = 0.95) -> float:
        return clopper_pearson_upper(self.fooled, self.rounds, confidence)

    def to_record(self) -> dict:
        return {
            "attack": self.attack, "rounds": self.rounds,
            "correct": self.correct, "bottom": self.bottom,
            "fooled": self.fooled, "fool_rate": self.fool_rate,
            "fool_upper_95": self.fool_upper(),
            "mean_queries": self.queries / self.rounds if self.rounds else 0.0,
        }


def clopper_pearson_upper(failures: int, trials: int,
                          confidence: float = 0.95) -> float:
    """One-sided upper confidence bound on a binomial proportion."""
    from scipy.stats import beta

    if trials == 0:
        return 1.0
    if failures >= trials:
        return 1.0
    return float(beta.ppf(confidence, failures + 1, trials - failures))


def run_round(code, attack: str, budget: int, rng,
              message=None, challenge: int | None = None) -> ChannelRound:
    """One game round; challenge defaults to the attack's suggestion."""
    rng = np.random.default_rng(rng) if not isinstance(
        rng, np.random.Generator) else rng
    if message is None:
        message = rng.integers(0, 2, code.k).astype(np.uint8)
    honest = code.encode(message)
    result = ATTACKS[attack](code, honest, budget, rng)
    if len(result.positions) > budget:
        raise AssertionError(
            f"attack {attack} flipped {len(result.positions)} bits, "
            f"budget {budget}")
    if challenge is None:
        challenge = result.challenge_hint
    if challenge is None:
        challenge = int(rng.integers(1, code.n + 1))
    word = code.received(result.bits)
    answer, queries = code.decode(word, challenge, rng)
    truth = int(honest[challenge - 1])
    if answer is None:
        outcome = "bottom"
    elif answer == truth:
        outcome = "correct"
    else:
        outcome = "fooled"
    return ChannelRound(attack=attack, budget=budget,
                        flips=len(result.positions), challenge=challenge,
                        truth=truth, answer=answer, outcome=outcome,
                        queries=queries)


@dataclass
class SweepResult:
    rounds: list[ChannelRound] = field(default_factory=list)
    stats: dict[str, AttackStats] = field(default_factory=dict)


def run_sweep(code, attacks, rounds: int, budget: int | None = None,
              base_seed: int = 0, challenge: str = "adversarial",
              on_round=None, workers: int = 1) -> SweepResult:
    """Run `rounds` game rounds per attack; returns records and aggregates.

    challenge="adversarial" uses each attack's suggested index,
    "uniform" draws the challenge uniformly.  Each round is seeded
    independently, so results do not depend on `workers`.
    """
    if budget is None:
        budget = code.budget_bits()

    def one(ai_ri):
        ai, ri = ai_ri
        rng = np.random.default_rng(
            np.random.SeedSequence([base_seed, ai, ri]))
        forced = None if challenge == "adversarial" else int(
            rng.integers(1, code.n + 1))
        return run_round(code, attacks[ai], budget, rng, challenge=forced)

    jobs = [(ai, ri) for ai in range(len(attacks)) for ri in range(rounds)]
    if workers > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(one, jobs))
    else:
        records = [one(job) for job in jobs]

    out = SweepResult()
    for attack in attacks:
        out.stats[attack] = AttackStats(attack=attack)
    for rec in records:
        out.rounds.append(rec)
        stats = out.stats[rec.attack]
        stats.rounds += 1
        stats.queries += rec.queries
        if rec.outcome == "correct":
            stats.correct += 1
        elif rec.outcome == "bottom":
            stats.bottom += 1
        else:
            stats.fooled += 1
        if on_round is not None:
            on_round(rec)
    return out


def measure_availability(code, honest_bits, word_bits, indices, reps: int,
                         base_seed: int = 0) -> dict[int, float]:
    """Fraction of repetitions answering each index correctly (non-bottom)."""
    word = code.received(word_bits)
    honest = np.asarray(honest_bits, dtype=np.uint8)
    out: dict[int, float] = {}
    for pos, i in enumerate(indices):
        i = int(i)
        correct = 0
        for rep in range(reps):
            rng = np.random.default_rng(
                np.random.SeedSequence([base_seed, pos, rep]))
            bit, _ = code.decode(word, i, rng)
            if bit is not None and bit == int(honest[i - 1]):
                correct += 1
        out[i] = correct / reps
    return out
