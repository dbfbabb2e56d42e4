"""Directed acyclic graphs on [1, n] with local expansion in every window.

The target property: for each node v and radius r, the bipartite graphs
([v, v+r-1] -> [v+r, v+2r-1]) and ([v-2r+1, v-r] -> [v-r+1, v]) restricted to
the DAG's edges are delta-expanders (no pair of subsets larger than delta
times the window without an edge between them).

Construction.  Small windows make the property brutally dense: when a subset
bound is 1 the two intervals must be completely joined, and when it is 2 every
pair of tail nodes must dominate all but one head node.  So the builder adds a
complete band of short edges out to the distance those window sizes force (and
at least far enough that every window the exact oracle can audit passes by
density alone).  Beyond the band, where subsets grow with the window, it adds
a calibrated number of random perfect matchings between consecutive tiles of
every dyadic length, at two half-tile phases, which is the regime where sparse
random graphs genuinely expand.  The number of matchings is chosen by
`calibrate_degree`: the smallest degree whose random probes always satisfy the
exact expander oracle.

An optional per-node degree cap keeps both in- and out-degree at or below a
bound; capped graphs trade far-range expansion for the bounded fan that the
degree-reduced construction needs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .oracles import oracle_delta_expander, subset_threshold

CALIBRATION_PROBE_LIMIT = 24


@lru_cache(maxsize=None)
def calibrate_degree(delta: Fraction, probe_size: int = 12, trials: int = 50,
                     seed: int = 2024) -> int:
    """Smallest matching count whose random probes always pass the oracle.

    For each candidate degree d, builds `trials` bipartite probes on
    probe_size x probe_size nodes as the union of d random perfect matchings
    (or the complete graph once d reaches probe_size, mirroring the builder's
    dense-tile rule) and accepts d when every probe is a delta-expander by
    the exact oracle.  Always terminates at d = probe_size.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    if not 2 <= probe_size <= CALIBRATION_PROBE_LIMIT:
        raise ValueError(f"probe_size must be in [2, {CALIBRATION_PROBE_LIMIT}]")
    rng = np.random.default_rng(np.random.SeedSequence(
        [seed, probe_size, delta.numerator, delta.denominator]))
    tail = list(range(probe_size))
    head = list(range(probe_size, 2 * probe_size))
    for d in range(1, probe_size + 1):
        if d >= probe_size:
            return d
        ok = True
        for _ in range(trials):
            edges = set()
            for _ in range(d):
                perm = rng.permutation(probe_size)
                edges.update((tail[i], head[perm[i]]) for i in range(probe_size))
            if not oracle_delta_expander(edges, tail, head, delta):
                ok = False
                break
        if ok:
            return d
    raise AssertionError("unreachable: complete probe always passes")


def forced_band_width(delta: Fraction, oracle_radius: int = 12) -> int:
    """Distance out to which the node band must be completely joined.

    Windows whose subset bound is 1 need complete joining; bound-2 windows
    need every tail pair to dominate all but one head node, which a complete
    band of width 2r - 2*floor(delta*r) - 1 provides.  The band also covers
    every window of radius <= oracle_radius so that audits of built graphs
    never depend on the random overlay.
    """
    delta = Fraction(delta)
    width = 1
    r = 1
    while subset_threshold(delta, r) <= 2:
        width = max(width, 2 * r - 2 * math.floor(delta * r) - 1)
        r += 1
    for r in range(1, oracle_radius + 1):
        width = max(width, 2 * r - 2 * math.floor(delta * r) - 1)
    return width


@dataclass
class IntervalExpander:
    """One audited window: tail interval, head interval, induced edges."""

    base: int
    radius: int
    ancestors: bool
    tail: np.ndarray
    head: np.ndarray
    edges: list[tuple[int, int]]
    max_indegree: int


class LocalExpanderDag:
    """A DAG on nodes 1..n with sorted adjacency and window extraction."""

    def __init__(self, n: int, delta: Fraction, seed: int,
                 edges, degree_cap: int | None = None,
                 overlay_degree: int | None = None):
        self.n = int(n)
        self.delta = Fraction(delta)
        self.seed = int(seed)
        self.degree_cap = degree_cap
        self.overlay_degree = overlay_degree
        pairs = sorted(set((int(u), int(v)) for u, v in edges))
        for u, v in pairs:
            if not (1 <= u < v <= self.n):
                raise ValueError(f"edge ({u}, {v}) is not forward inside [1, {n}]")
        self._edge_keys = frozenset((u << 32) | v for u, v in pairs)
        kids: list[list[int]] = [[] for _ in range(self.n + 1)]
        pars: list[list[int]] = [[] for _ in range(self.n + 1)]
        for u, v in pairs:
            kids[u].append(v)
            pars[v].append(u)
        self._children = [np.array(sorted(c), dtype=np.int64) for c in kids]
        self._parents = [np.array(sorted(p), dtype=np.int64) for p in pars]
        self.edge_count = len(pairs)
        self._d_delta: int | None = None

    # -- adjacency ---------------------------------------------------------

    def children(self, v: int) -> np.ndarray:
        return self._children[v]

    def parents(self, v: int) -> np.ndarray:
        return self._parents[v]

    def out_degree(self, v: int) -> int:
        return len(self._children[v])

    def in_degree(self, v: int) -> int:
        return len(self._parents[v])

    @property
    def max_out_degree(self) -> int:
        return max(len(c) for c in self._children[1:]) if self.n else 0

    @property
    def max_in_degree(self) -> int:
        return max(len(p) for p in self._parents[1:]) if self.n else 0

    def has_edge(self, u: int, v: int) -> bool:
        return ((int(u) << 32) | int(v)) in self._edge_keys

    def edges(self):
        for u in range(1, self.n + 1):
            for v in self._children[u]:
                yield (u, int(v))

    # -- windows -----------------------------------------------------------

    def interval_expander(self, base: int, radius: int,
                          ancestors: bool = False) -> IntervalExpander:
        """Bipartite window anchored at `base`.

        Descendant direction: tail [base, base+radius-1], head
        [base+radius, base+2*radius-1].  Ancestor direction: tail
        [base-2*radius+1, base-radius], head [base-radius+1, base].  Raises
        when the window does not fit inside [1, n].
        """
        r = int(radius)
        if r < 1:
            raise ValueError("radius must be positive")
        if ancestors:
            lo = base - 2 * r + 1
            if lo < 1 or base > self.n:
                raise ValueError(f"ancestor window at {base} radius {r} "
                                 "leaves [1, n]")
            tail = np.arange(lo, base - r + 1)
            head = np.arange(base - r + 1, base + 1)
        else:
            hi = base + 2 * r - 1
            if base < 1 or hi > self.n:
                raise ValueError(f"descendant window at {base} radius {r} "
                                 "leaves [1, n]")
            tail = np.arange(base, base + r)
            head = np.arange(base + r, base + 2 * r)
        h_lo, h_hi = int(head[0]), int(head[-1])
        edges = []
        indeg = np.zeros(len(head), dtype=np.int64)
        for a in tail:
            kids = self._children[int(a)]
            i = int(np.searchsorted(kids, h_lo, side="left"))
            j = int(np.searchsorted(kids, h_hi, side="right"))
            for b in kids[i:j]:
                edges.append((int(a), int(b)))
                indeg[int(b) - h_lo] += 1
        return IntervalExpander(
            base=int(base), radius=r, ancestors=ancestors, tail=tail,
            head=head, edges=edges,
            max_indegree=int(indeg.max()) if len(head) else 0)

    def measured_interval_indegree(self) -> int:
        """Max head-indegree over all dyadic windows; the fan constant d.

        Scans every node and every power-of-two radius that fits, in both
        directions.  Cached after the first call.
        """
        if self._d_delta is None:
            worst = 1
            p = 1
            while 2 ** (p + 1) <= self.n:
                r = 2 ** p
                for v in range(1, self.n + 1):
                    if v + 2 * r - 1 <= self.n:
                        worst = max(worst, self.interval_expander(v, r).max_indegree)
                    if v - 2 * r + 1 >= 1:
                        worst = max(
                            worst,
                            self.interval_expander(v, r, ancestors=True).max_indegree)
                p += 1
            self._d_delta = worst
        return self._d_delta

    def __repr__(self) -> str:
        return (f"LocalExpanderDag(n={self.n}, delta={self.delta}, "
                f"seed={self.seed}, edges={self.edge_count})")


def build_local_expander(n: int, delta, seed: int,
                         degree_cap: int | None = None,
                         overlay_degree: int | None = None,
                         probe_size: int = 12) -> LocalExpanderDag:
    """Deterministic local-expander DAG on [1, n].

    Edge tiers, inserted in order (first writer wins under a degree cap):
    the backbone path, the complete short band out to `forced_band_width`,
    then round-robin over dyadic scales: the q-th random matching between
    consecutive half-phased tiles, q up to the calibrated overlay degree.
    Tiles no longer than the overlay degree are joined completely instead.
    The random stream depends only on (seed, n, delta), never on the cap, so
    capped and uncapped builds see the same candidate edges.
    """
    delta = Fraction(delta)
    if not 0 < delta < 1:
        raise ValueError("delta must be in (0, 1)")
    if n < 2:
        raise ValueError("need at least two nodes")
    if degree_cap is not None and degree_cap < 1:
        raise ValueError("degree_cap must be at least 1")
    if overlay_degree is None:
        overlay_degree = calibrate_degree(delta, probe_size)
    band = min(n - 1, forced_band_width(delta))

    # Dyadic scales whose tile pairs reach beyond the complete band.
    scales = []
    p = 1
    while 2 ** (p + 1) <= n:
        if 2 ** (p + 1) - 1 > band:
            scales.append(p)
        p += 1

    rng = np.random.default_rng(np.random.SeedSequence(
        [seed & 0xFFFFFFFFFFFFFFFF, n, delta.numerator, delta.denominator]))
    matchings: dict[tuple[int, int, int, int], np.ndarray] = {}
    tile_pairs: dict[int, list[tuple[int, int]]] = {}
    for p in scales:
        size = 2 ** p
        pairs = []
        for phase in (0, size // 2) if size > 1 else (0,):
            left = 1 + phase
            while left + 2 * size - 1 <= n:
                pairs.append((left, phase))
                left += size
        tile_pairs[p] = pairs
        if size > overlay_degree:
            for left, phase in pairs:
                for q in range(1, overlay_degree + 1):
                    matchings[(p, phase, left, q)] = rng.permutation(size)

    out_deg = np.zeros(n + 1, dtype=np.int64)
    in_deg = np.zeros(n + 1, dtype=np.int64)
    edges: set[tuple[int, int]] = set()

    def add(u: int, v: int) -> None:
        if (u, v) in edges:
            return
        if degree_cap is not None and (
                out_deg[u] >= degree_cap or in_deg[v] >= degree_cap):
            return
        edges.add((u, v))
        out_deg[u] += 1
        in_deg[v] += 1

    for v in range(1, n):
        add(v, v + 1)
    for dist in range(2, band + 1):
        for v in range(1, n - dist + 1):
            add(v, v + dist)
    max_round = max(overlay_degree,
                    max((2 ** p for p in scales if 2 ** p <= overlay_degree),
                        default=0))
    for q in range(1, max_round + 1):
        for p in scales:
            size = 2 ** p
            if size <= overlay_degree:
                if q == 1:
                    for left, _phase in tile_pairs[p]:
                        for i in range(size):
                            for j in range(size):
                                add(left + i, left + size + j)
            elif q <= overlay_degree:
                for left, phase in tile_pairs[p]:
                    perm = matchings[(p, phase, left, q)]
                    for i in range(size):
                        add(left + i, left + size + int(perm[i]))

    return LocalExpanderDag(n, delta, seed, edges, degree_cap=degree_cap,
                            overlay_degree=overlay_degree)
