import numpy as np
import pytest

from crlcc.channel import (ATTACKS, AttackResult, cheapest_patch,
                           clopper_pearson_upper, run_round, run_sweep)
from crlcc.oracles import oracle_green_set, oracle_strong_green

ATTACK_NAMES = ["random_flip", "block_killer", "tail_attack", "red_flood",
                "label_swap"]


def test_registry_is_complete():
    assert sorted(ATTACKS) == sorted(ATTACK_NAMES)


def test_cheapest_patch_cost_frozen(weak16, strong128):
    # measured once; these pin the tamper-economics of the experiments
    assert cheapest_patch(weak16.block_code).cost == 82
    assert cheapest_patch(strong128.message_block).cost == 370
    lb = strong128.ell // 8
    final = cheapest_patch(strong128.label_block,
                           byte_lo=(strong128.m - 1) * lb,
                           byte_hi=strong128.m * lb)
    assert final.cost == 372


def test_cheapest_patch_retargets_block(weak16):
    code = weak16.block_code
    rng = np.random.default_rng(2)
    msg = rng.integers(0, 2, code.message_bits).astype(np.uint8)
    word = code.encode(msg)
    patch = cheapest_patch(code)
    word[patch.positions] ^= 1
    got = code.decode(word)
    assert got is not None and not (got == msg).all()
    # the patch flips exactly the advertised data bit
    diff = np.nonzero(got != msg)[0]
    assert patch.data_bit in diff.tolist()


def test_attacks_respect_budget(weak16, weak16_word):
    _, honest = weak16_word
    for name, attack in ATTACKS.items():
        for budget in (0, 5, 100):
            result = attack(weak16, honest, budget, np.random.default_rng(1))
            assert len(result.positions) <= budget, name
            flipped = np.nonzero(result.bits != honest)[0] + 1
            assert sorted(flipped.tolist()) == result.positions.tolist()


def test_zero_budget_rounds_are_always_correct(weak16):
    for name in ATTACK_NAMES:
        rec = run_round(weak16, name, 0, np.random.default_rng(11))
        assert rec.outcome == "correct", name
        assert rec.flips == 0


def test_budget_violations_raise(weak16):
    def rogue(code, honest, budget, rng):
        bits = np.asarray(honest, dtype=np.uint8).copy()
        bits[:budget + 1] ^= 1
        return AttackResult(bits=bits,
                            positions=np.arange(1, budget + 2),
                            challenge_hint=None)

    ATTACKS["rogue"] = rogue
    try:
        with pytest.raises(AssertionError, match="budget"):
            run_round(weak16, "rogue", 3, np.random.default_rng(0))
    finally:
        del ATTACKS["rogue"]


def test_red_flood_floods_weak(weak16, weak16_word):
    _, honest = weak16_word
    code = weak16
    patch_cost = cheapest_patch(code.block_code).cost
    result = ATTACKS["red_flood"](code, honest, patch_cost,
                                  np.random.default_rng(0))
    green = oracle_green_set(code, result.bits)
    # one poisoned label block at the widest-fanning node turns every node red
    assert not green[1:].any()


def test_red_flood_is_contained_on_strong(strong128, strong128_word):
    _, honest = strong128_word
    code = strong128
    result = ATTACKS["red_flood"](code, honest, code.budget_bits(),
                                  np.random.default_rng(0))
    _, meta_green = oracle_strong_green(code, result.bits)
    red = int((~meta_green[1:]).sum())
    assert 1 <= red <= 2


def test_label_swap_reaches_forgery_when_budget_allows(weak16, weak16_word):
    message, honest = weak16_word
    code = weak16
    result = ATTACKS["label_swap"](code, honest, code.n,
                                   np.random.default_rng(0))
    forged_message = message.copy()
    forged_message[0] ^= 1
    assert (result.bits == code.encode(forged_message)).all()


def test_clopper_pearson_bounds():
    assert clopper_pearson_upper(0, 1000) == pytest.approx(0.0029912, abs=1e-6)
    assert clopper_pearson_upper(0, 0) == 1.0
    assert clopper_pearson_upper(5, 5) == 1.0
    assert clopper_pearson_upper(1, 100) == pytest.approx(0.046560, abs=1e-5)


def test_sweep_is_deterministic_and_worker_independent(weak16):
    a = run_sweep(weak16, ["random_flip", "block_killer"], rounds=3,
                  base_seed=5)
    b = run_sweep(weak16, ["random_flip", "block_killer"], rounds=3,
                  base_seed=5, workers=3)
    assert [r.to_record() for r in a.rounds] == [
        r.to_record() for r in b.rounds]
    assert a.stats["random_flip"].rounds == 3
    total = a.stats["random_flip"]
    assert total.correct + total.bottom + total.fooled == 3
