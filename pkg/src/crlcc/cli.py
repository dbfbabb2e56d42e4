"""Command-line front end: encode, corrupt, query, sweep, verify-graph.

Exit codes: 0 success, 2 usage error, 3 malformed file, 4 refusal
(budget above the assumed bound, or a graph failing verification).

Codeword files carry every parameter the decoder needs, so `query` and
`corrupt` take no code parameters; this keeps encode-side and decode-side
configuration from drifting apart.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from fractions import Fraction

import numpy as np

from . import channel, formats
from .bits import unpack_bits
from .graph import build_local_expander, calibrate_degree
from .hashing import SEED_BYTES
from .oracles import ORACLE_RADIUS_LIMIT, verify_local_expansion

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_FORMAT = 3
EXIT_REFUSED = 4


class Refusal(Exception):
    pass


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from exc


def _hash_seed(args) -> bytes:
    """Explicit hex seed, or one derived deterministically from --seed."""
    if args.hash_seed is not None:
        seed = bytes.fromhex(args.hash_seed)
        if len(seed) != SEED_BYTES:
            raise Refusal(f"--hash-seed must be {SEED_BYTES} bytes of hex")
        return seed
    material = f"label-seed:{args.seed}".encode()
    return hashlib.sha256(material).digest()


def _load_message(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data:
        raise Refusal(f"message file {path} is empty")
    return unpack_bits(data, 8 * len(data))


def cmd_encode(args) -> int:
    message = _load_message(args.infile)
    k = len(message)
    hash_seed = _hash_seed(args)
    if args.mode == "weak":
        from .weak import WeakCode

        code = WeakCode(k=k, ell=args.ell, delta=args.delta or Fraction(1, 100),
                        alpha=args.alpha or Fraction(1, 2),
                        graph_seed=args.seed, hash_seed=hash_seed)
        formats.write_weak(args.outfile, code, code.encode(message))
    else:
        from .strong import StrongCode

        code = StrongCode(k=k, ell=args.ell,
                          delta=args.delta or Fraction(15, 256),
                          alpha=args.alpha, beta=args.beta, rate=args.rate,
                          m=args.m, kappa=args.kappa, graph_seed=args.seed,
                          hash_seed=hash_seed)
        formats.write_strong(args.outfile, code, code.encode(message))
    print(f"wrote {args.outfile}: mode={args.mode} k={code.k} n={code.n} "
          f"rate={code.rate}")
    return EXIT_OK


def cmd_corrupt(args) -> int:
    kind, code, bits = formats.read_codeword(args.infile)
    assumed = code.budget_bits()
    if args.budget_bits is not None:
        budget = args.budget_bits
    elif args.budget_frac is not None:
        budget = int(args.budget_frac * code.n)
    else:
        budget = assumed
    if budget > assumed and not args.allow_excess:
        print(f"refusing budget {budget} above the assumed bound {assumed} "
              f"(pass --allow-excess for out-of-theorem runs)",
              file=sys.stderr)
        return EXIT_REFUSED
    rng = np.random.default_rng(args.attack_seed)
    result = channel.ATTACKS[args.attack](code, bits, budget, rng)
    write = formats.write_weak if kind == "weak" else formats.write_strong
    write(args.outfile, code, result.bits)
    mask_path = args.outfile + ".mask"
    formats.write_mask(mask_path, result.positions)
    print(f"wrote {args.outfile} ({len(result.positions)} of {budget} "
          f"budget bits flipped) and {mask_path}")
    if result.challenge_hint is not None:
        print(f"attack suggests challenge index {result.challenge_hint}")
    return EXIT_OK


def cmd_query(args) -> int:
    _, code, bits = formats.read_codeword(args.infile)
    rng = np.random.default_rng(args.rng)
    word = code.received(bits)
    if args.message_bit:
        bit, queries = code.decode_message(word, args.index, rng)
    else:
        bit, queries = code.decode(word, args.index, rng)
    print("verdict: " + ("BOTTOM" if bit is None else str(bit)))
    print(f"bit queries: {queries}")
    mask_path = args.infile + ".mask"
    try:
        mask = formats.read_mask(mask_path)
    except FileNotFoundError:
        return EXIT_OK
    honest = formats.apply_mask(bits, mask)
    if args.message_bit:
        truth = int(code.extract_message(honest)[args.index - 1])
    else:
        truth = int(honest[args.index - 1])
    verdict = ("refused" if bit is None
               else "MATCH" if bit == truth else "WRONG")
    print(f"truth: {truth} ({verdict})")
    return EXIT_OK


def cmd_sweep(args) -> int:
    try:
        import tomllib
    except ModuleNotFoundError:
        import tomli as tomllib

    with open(args.config, "rb") as fh:
        cfg = tomllib.load(fh)
    mode = cfg.get("mode", "weak")
    k = cfg["k"]
    seed = cfg.get("seed", 0)
    hash_seed = hashlib.sha256(f"label-seed:{seed}".encode()).digest()
    if mode == "weak":
        from .weak import WeakCode

        code = WeakCode(k=k, ell=cfg.get("ell", 128),
                        delta=Fraction(cfg.get("delta", "1/100")),
                        graph_seed=cfg.get("graph_seed", 7),
                        hash_seed=hash_seed)
    else:
        from .strong import StrongCode

        code = StrongCode(k=k, ell=cfg.get("ell", 128),
                          beta=cfg.get("beta", 1),
                          rate=Fraction(cfg.get("rate", "1/4")),
                          m=cfg.get("m", 8),
                          delta=Fraction(cfg.get("delta", "15/256")),
                          kappa=cfg.get("kappa"),
                          graph_seed=cfg.get("graph_seed", 11),
                          hash_seed=hash_seed)
    attacks = cfg.get("attacks", list(channel.ATTACKS))
    unknown = [a for a in attacks if a not in channel.ATTACKS]
    if unknown:
        raise Refusal(f"unknown attacks: {', '.join(unknown)}")
    budget = cfg.get("budget_bits")
    if budget is None and "budget_frac" in cfg:
        budget = int(Fraction(str(cfg["budget_frac"])) * code.n)
    assumed = code.budget_bits()
    if budget is not None and budget > assumed and not cfg.get(
            "allow_excess", False):
        print(f"refusing budget {budget} above the assumed bound {assumed} "
              f"(set allow_excess = true for out-of-theorem runs)",
              file=sys.stderr)
        return EXIT_REFUSED

    sink = open(args.out, "w") if args.out else sys.stdout

    def emit(rec):
        sink.write(json.dumps(rec.to_record()) + "\n")

    try:
        result = channel.run_sweep(
            code, attacks, rounds=cfg.get("rounds", 100), budget=budget,
            base_seed=seed, challenge=cfg.get("challenge", "adversarial"),
            on_round=emit, workers=cfg.get("workers", 1))
    finally:
        if args.out:
            sink.close()

    header = (f"{'attack':>14} {'rounds':>7} {'correct':>8} {'bottom':>7} "
              f"{'fooled':>7} {'fool_rate':>10} {'ci95_upper':>11} "
              f"{'mean_queries':>13}")
    print(header)
    print("-" * len(header))
    for stats in result.stats.values():
        rec = stats.to_record()
        print(f"{rec['attack']:>14} {rec['rounds']:>7} {rec['correct']:>8} "
              f"{rec['bottom']:>7} {rec['fooled']:>7} "
              f"{rec['fool_rate']:>10.4f} {rec['fool_upper_95']:>11.4f} "
              f"{rec['mean_queries']:>13.1f}")
    return EXIT_OK


def cmd_verify_graph(args) -> int:
    if args.max_r > ORACLE_RADIUS_LIMIT:
        print(f"refusing max radius {args.max_r}: the exact oracle is "
              f"exponential and capped at {ORACLE_RADIUS_LIMIT}",
              file=sys.stderr)
        return EXIT_REFUSED
    if args.infile:
        graph = formats.read_graph(args.infile)
    else:
        graph = build_local_expander(args.n, args.delta, args.seed)
        print(f"built graph: n={graph.n} delta={graph.delta} "
              f"seed={graph.seed} edges={graph.edge_count} "
              f"degree={calibrate_degree(graph.delta)}")
    if args.outfile:
        formats.write_graph(args.outfile, graph)
        print(f"wrote {args.outfile}")
    violations = verify_local_expansion(graph, max_radius=args.max_r)
    if violations:
        for base, radius, direction in violations[:20]:
            print(f"FAIL window base={base} radius={radius} {direction}")
        print(f"{len(violations)} violating windows up to radius "
              f"{args.max_r}")
        return EXIT_REFUSED
    print(f"all windows up to radius {args.max_r} are "
          f"{graph.delta}-expanders")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crlcc",
        description="Locally correctable codes for computationally "
                    "bounded channels.")
    sub = parser.add_subparsers(dest="command", required=True)

    enc = sub.add_parser("encode", help="encode a message file")
    enc.add_argument("--mode", choices=["weak", "strong"], required=True)
    enc.add_argument("--in", dest="infile", required=True,
                     help="raw message bytes; k = 8 * file size")
    enc.add_argument("--out", dest="outfile", required=True)
    enc.add_argument("--ell", type=int, default=128,
                     help="label width in bits (default 128)")
    enc.add_argument("--delta", type=_fraction, default=None,
                     help="expansion parameter, e.g. 1/100 or 0.01")
    enc.add_argument("--alpha", type=_fraction, default=None)
    enc.add_argument("--beta", type=int, default=1,
                     help="strong mode: chunk size multiplier")
    enc.add_argument("--rate", type=_fraction, default=Fraction(1, 4),
                     help="strong mode: block code rate (1/4 or 1/2)")
    enc.add_argument("--m", type=int, default=8,
                     help="strong mode: chain length")
    enc.add_argument("--kappa", type=int, default=None,
                     help="strong mode: budget divisor (default theorem)")
    enc.add_argument("--seed", type=int, default=7, help="graph seed")
    enc.add_argument("--hash-seed", default=None,
                     help="64 hex chars; derived from --seed when omitted")
    enc.set_defaults(func=cmd_encode)

    cor = sub.add_parser("corrupt", help="attack a codeword file")
    cor.add_argument("--in", dest="infile", required=True)
    cor.add_argument("--out", dest="outfile", required=True)
    cor.add_argument("--attack", choices=sorted(channel.ATTACKS),
                     required=True)
    group = cor.add_mutually_exclusive_group()
    group.add_argument("--budget-bits", type=int, default=None)
    group.add_argument("--budget-frac", type=_fraction, default=None)
    cor.add_argument("--attack-seed", type=int, default=0)
    cor.add_argument("--allow-excess", action="store_true",
                     help="permit budgets above the assumed bound")
    cor.set_defaults(func=cmd_corrupt)

    qry = sub.add_parser("query", help="locally decode one bit")
    qry.add_argument("--in", dest="infile", required=True)
    qry.add_argument("--index", type=int, required=True)
    qry.add_argument("--message-bit", action="store_true",
                     help="index into the message instead of the codeword")
    qry.add_argument("--rng", type=int, default=0, help="decoder RNG seed")
    qry.set_defaults(func=cmd_query)

    swp = sub.add_parser("sweep", help="run channel game rounds from a config")
    swp.add_argument("--config", required=True, help="TOML sweep description")
    swp.add_argument("--out", default=None,
                     help="write per-round JSON lines here instead of stdout")
    swp.set_defaults(func=cmd_sweep)

    ver = sub.add_parser("verify-graph",
                         help="check local expansion with the exact oracle")
    ver.add_argument("--n", type=int, default=None)
    ver.add_argument("--delta", type=_fraction, default=Fraction(1, 4))
    ver.add_argument("--seed", type=int, default=7)
    ver.add_argument("--max-r", type=int, default=ORACLE_RADIUS_LIMIT)
    ver.add_argument("--in", dest="infile", default=None,
                     help="verify this graph file instead of building")
    ver.add_argument("--out", dest="outfile", default=None,
                     help="also save the graph in binary form")
    ver.set_defaults(func=cmd_verify_graph)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "verify-graph" and not args.infile and args.n is None:
        parser.error("verify-graph needs --n or --in")
    try:
        return args.func(args)
    except formats.FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except FileNotFoundError as exc:
        print(f"cannot open {exc.filename}", file=sys.stderr)
        return EXIT_FORMAT
    except Refusal as exc:
        print(f"refused: {exc}", file=sys.stderr)
        return EXIT_REFUSED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
