import numpy as np
import pytest

from crlcc.cli import main


@pytest.fixture()
def message_file(tmp_path):
    path = tmp_path / "msg.bin"
    rng = np.random.default_rng(3)
    path.write_bytes(rng.integers(0, 256, 2048 // 8,
                                  dtype=np.uint8).tobytes())
    return str(path)


def run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_encode_query_round_trip(tmp_path, capsys, message_file):
    cw = str(tmp_path / "cw.crlcc")
    code, out, _ = run(capsys, "encode", "--mode", "weak", "--in",
                       message_file, "--out", cw, "--seed", "7")
    assert code == 0 and "k=2048" in out
    code, out, _ = run(capsys, "query", "--in", cw, "--index", "1")
    assert code == 0
    assert out.splitlines()[0] in ("verdict: 0", "verdict: 1")
    assert "bit queries:" in out


def test_corrupt_then_query_reports_truth(tmp_path, capsys, message_file):
    cw = str(tmp_path / "cw.crlcc")
    run(capsys, "encode", "--mode", "weak", "--in", message_file,
        "--out", cw, "--seed", "7")
    cw2 = str(tmp_path / "cw2.crlcc")
    code, out, _ = run(capsys, "corrupt", "--in", cw, "--attack",
                       "random_flip", "--out", cw2, "--attack-seed", "5")
    assert code == 0 and "budget bits flipped" in out
    code, out, _ = run(capsys, "query", "--in", cw2, "--index", "40",
                       "--rng", "2")
    assert code == 0
    assert "truth:" in out and "WRONG" not in out
    code, out, _ = run(capsys, "query", "--in", cw2, "--index", "9",
                       "--message-bit")
    assert code == 0 and "truth:" in out


def test_budget_refusal_and_override(tmp_path, capsys, message_file):
    cw = str(tmp_path / "cw.crlcc")
    run(capsys, "encode", "--mode", "weak", "--in", message_file,
        "--out", cw)
    cw2 = str(tmp_path / "cw2.crlcc")
    code, _, err = run(capsys, "corrupt", "--in", cw, "--attack",
                       "block_killer", "--out", cw2, "--budget-bits", "5000")
    assert code == 4 and "refusing" in err
    code, out, _ = run(capsys, "corrupt", "--in", cw, "--attack",
                       "block_killer", "--out", cw2, "--budget-bits", "5000",
                       "--allow-excess")
    assert code == 0


def test_format_error_exit_code(tmp_path, capsys):
    junk = tmp_path / "junk.crlcc"
    junk.write_bytes(b"garbage")
    code, _, err = run(capsys, "query", "--in", str(junk), "--index", "1")
    assert code == 3 and "format error" in err
    code, _, err = run(capsys, "query", "--in", str(tmp_path / "absent"),
                       "--index", "1")
    assert code == 3


def test_usage_errors_exit_two(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["encode", "--mode", "sideways", "--in", "x", "--out", "y"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["verify-graph"])  # neither --n nor --in
    assert exc.value.code == 2


def test_verify_graph_build_save_reload(tmp_path, capsys):
    saved = str(tmp_path / "g.cdag")
    code, out, _ = run(capsys, "verify-graph", "--n", "64", "--delta", "1/4",
                       "--seed", "7", "--max-r", "6", "--out", saved)
    assert code == 0 and "are 1/4-expanders" in out
    code, out, _ = run(capsys, "verify-graph", "--in", saved, "--max-r", "6")
    assert code == 0
    code, _, err = run(capsys, "verify-graph", "--in", saved, "--max-r", "30")
    assert code == 4 and "capped" in err


def test_sweep_outputs_records_and_table(tmp_path, capsys, message_file):
    config = tmp_path / "sweep.toml"
    config.write_text(
        'mode = "weak"\nk = 2048\nrounds = 2\nseed = 3\n'
        'attacks = ["random_flip"]\n')
    records = tmp_path / "rounds.jsonl"
    code, out, _ = run(capsys, "sweep", "--config", str(config),
                       "--out", str(records))
    assert code == 0
    assert "fool_rate" in out and "random_flip" in out
    lines = records.read_text().strip().splitlines()
    assert len(lines) == 2
    import json

    rec = json.loads(lines[0])
    assert rec["attack"] == "random_flip"
    assert rec["outcome"] in ("correct", "bottom", "fooled")


def test_sweep_budget_refusal(tmp_path, capsys):
    config = tmp_path / "sweep.toml"
    config.write_text('mode = "weak"\nk = 2048\nrounds = 1\n'
                      'budget_bits = 99999\n')
    code, _, err = run(capsys, "sweep", "--config", str(config))
    assert code == 4 and "refusing" in err


def test_strong_encode_round_trip(tmp_path, capsys):
    msg = tmp_path / "smsg.bin"
    rng = np.random.default_rng(3)
    msg.write_bytes(rng.integers(0, 256, 8192 // 8,
                                 dtype=np.uint8).tobytes())
    cw = str(tmp_path / "scw.crlcc")
    code, out, _ = run(capsys, "encode", "--mode", "strong", "--in",
                       str(msg), "--out", cw, "--seed", "11", "--m", "4",
                       "--kappa", "8")
    assert code == 0 and "mode=strong" in out
    code, out, _ = run(capsys, "query", "--in", cw, "--index", "77")
    assert code == 0 and "verdict:" in out
