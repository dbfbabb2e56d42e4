"""Locally correctable codes for computationally bounded channels.

Two constructions are provided.  `WeakCode` hash-labels the message over a
local expander graph and appends a repeated copy of the last label, giving a
local corrector that may refuse but is rarely wrong.  `StrongCode` first
reduces the graph's degree by expanding each node into a short chain, which
bounds how far a budget-limited adversary can spread damage and lets most
positions stay decodable.

Everything is deterministic given the graph seed and the 32-byte hash seed.
"""

from .channel import ATTACKS, clopper_pearson_upper, run_round, run_sweep
from .ecc import BlockCode, get_block_code
from .formats import (FormatError, read_codeword, read_graph, read_mask,
                      read_strong, read_weak, write_graph, write_mask,
                      write_strong, write_weak)
from .graph import (LocalExpanderDag, build_local_expander, calibrate_degree,
                    forced_band_width)
from .hashing import gen_seed, label_bytes, label_graph
from .oracles import (oracle_alpha_good, oracle_delta_expander,
                      oracle_nearest_codeword, oracle_tampered_blocks,
                      verify_local_expansion)
from .strong import MetaGraph, StrongCode, reduce_degree
from .weak import WeakCode

__version__ = "0.1.0"

__all__ = [
    "ATTACKS", "BlockCode", "FormatError", "LocalExpanderDag", "MetaGraph",
    "StrongCode", "WeakCode", "build_local_expander", "calibrate_degree",
    "clopper_pearson_upper", "forced_band_width", "gen_seed",
    "get_block_code", "label_bytes", "label_graph", "oracle_alpha_good",
    "oracle_delta_expander", "oracle_nearest_codeword",
    "oracle_tampered_blocks", "read_codeword", "read_graph", "read_mask",
    "read_strong", "read_weak", "reduce_degree", "run_round", "run_sweep",
    "verify_local_expansion", "write_graph", "write_mask", "write_strong",
    "write_weak",
]
