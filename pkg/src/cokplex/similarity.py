"""Graph similarity from an optimal co-k-plex of the conflict graph, and the
Euclidean fingerprint baseline."""

from __future__ import annotations

import json
import logging
import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .conflict import Layout, build_conflict_graph, conflict_vertices, edge_census
from .molgraph import ReducedGraph
from .qubo import ALLOW_BIJECTION, MODES, PenaltyRule, build_cokplex_pbo
from .solve import DEFAULT_CAP, exhaustive_optimize

log = logging.getLogger(__name__)

RATIOS = ("count", "weight")


def combine_ratios(r1: float, r2: float, delta: float) -> float:
    """``delta * max + (1 - delta) * min`` of the two coverage ratios."""
    hi, lo = max(r1, r2), min(r1, r2)
    return delta * hi + (1 - delta) * lo


@dataclass(frozen=True)
class SimilarityResult:
    score: Optional[float]
    delta: float
    distinct_left: int
    distinct_right: int
    order_left: int
    order_right: int
    selected_pairs: tuple[tuple[int, int], ...]
    skipped: bool = False
    objective: Optional[float] = None
    num_vars: int = 0
    optima_count: int = 0
    census: Mapping[str, int] = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["selected_pairs"] = [list(p) for p in self.selected_pairs]
        out["census"] = dict(self.census)
        return out


def _check(delta: float, k: int, mode: str, ratio: str):
    if not 0 <= delta <= 1:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    if not (isinstance(k, (int, np.integer)) and k >= 1):
        raise ValueError(f"k must be a positive integer, got {k}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    if ratio not in RATIOS:
        raise ValueError(f"ratio must be one of {RATIOS}")


def similarity_multi(
    g: ReducedGraph,
    g2: ReducedGraph,
    layout: Layout,
    k: int,
    deltas: Sequence[float],
    mode: str = ALLOW_BIJECTION,
    *,
    rule: PenaltyRule = PenaltyRule(),
    cap: int = DEFAULT_CAP,
    induced: bool = False,
    ratio: str = "count",
    unit_weights: bool = False,
    tie_limit: int = 4096,
) -> dict[float, SimilarityResult]:
    """One solve, scored for several ``delta`` values.

    Among optimal selections (up to ``tie_limit`` of them) the one with the
    highest score is reported, then the larger distinct-vertex total, then
    the lexicographically smallest. Scoring every optimum keeps the value
    symmetric in the two graphs.
    """
    for d in deltas:
        _check(d, k, mode, ratio)
    n1, n2 = len(g), len(g2)
    pairs = conflict_vertices([g, g2], layout)
    if len(pairs) > cap:
        return {
            d: SimilarityResult(None, d, 0, 0, n1, n2, (), True, None, len(pairs))
            for d in deltas
        }
    cg = build_conflict_graph(g, g2, layout, unit_weights=unit_weights, tuples=pairs)
    census = edge_census(cg)
    if cg.n == 0:
        return {d: SimilarityResult(0.0, d, 0, 0, n1, n2, (), False, 0, 0, 1, census) for d in deltas}

    with warnings.catch_warnings():
        # a vacuous degree bound is routine for tiny conflict graphs in batch scoring
        warnings.simplefilter("ignore", UserWarning)
        poly = build_cokplex_pbo(cg, k, mode, rule, induced=induced)
    report = exhaustive_optimize(poly, cap=cap, keep_optima=tie_limit)
    candidates = report.optima if report.optima is not None else (report.best.bits,)

    if ratio == "count":
        w1, w2 = np.ones(n1), np.ones(n2)
    else:
        w1 = np.array([v.weight for v in g.vertices], dtype=float)
        w2 = np.array([v.weight for v in g2.vertices], dtype=float)
    bits = np.array(candidates, dtype=bool)
    left = np.array([p[0] for p in cg.pairs])
    right = np.array([p[1] for p in cg.pairs])
    cover1 = np.zeros((len(bits), n1), dtype=bool)
    cover2 = np.zeros((len(bits), n2), dtype=bool)
    for j in range(cg.n):
        cover1[:, left[j]] |= bits[:, j]
        cover2[:, right[j]] |= bits[:, j]
    count1, count2 = cover1.sum(axis=1), cover2.sum(axis=1)
    r1 = (cover1 * w1).sum(axis=1) / w1.sum()
    r2 = (cover2 * w2).sum(axis=1) / w2.sum()

    out = {}
    for d in deltas:
        scores = [combine_ratios(a, b, d) for a, b in zip(r1.tolist(), r2.tolist())]
        # candidates are already in lexicographic order, so max() keeps the first
        pick = max(range(len(scores)), key=lambda i: (scores[i], count1[i] + count2[i], -i))
        chosen = tuple(cg.pairs[j] for j in range(cg.n) if bits[pick, j])
        out[d] = SimilarityResult(
            scores[pick],
            d,
            int(count1[pick]),
            int(count2[pick]),
            n1,
            n2,
            chosen,
            False,
            report.best.value,
            cg.n,
            report.optima_count,
            census,
        )
    return out


def similarity(
    g: ReducedGraph,
    g2: ReducedGraph,
    layout: Layout,
    k: int = 1,
    delta: float = 0.5,
    mode: str = ALLOW_BIJECTION,
    **kwargs,
) -> SimilarityResult:
    return similarity_multi(g, g2, layout, k, [delta], mode, **kwargs)[delta]


# ---------------------------------------------------------------- fingerprints


@dataclass(frozen=True)
class Fingerprint:
    bits: tuple[int, ...]

    def __post_init__(self):
        if not self.bits:
            raise ValueError("fingerprint must have at least one bit")
        if any(b not in (0, 1) for b in self.bits):
            raise ValueError("fingerprint bits must be 0 or 1")

    @property
    def length(self) -> int:
        return len(self.bits)

    @classmethod
    def from_hex(cls, text: str, length: Optional[int] = None) -> "Fingerprint":
        """Bits are read most significant first; trailing pad bits must be 0."""
        text = text.strip().lower().removeprefix("0x")
        full = len(text) * 4
        value = int(text, 16)
        bits = tuple((value >> (full - 1 - i)) & 1 for i in range(full))
        if length is not None:
            if length > full or any(bits[length:]):
                raise ValueError(f"hex string does not encode a {length}-bit fingerprint")
            bits = bits[:length]
        return cls(bits)

    def to_hex(self) -> str:
        pad = (-self.length) % 4
        value = 0
        for b in self.bits + (0,) * pad:
            value = value << 1 | b
        return format(value, f"0{(self.length + pad) // 4}x")


MACCS_LENGTH = 166


def fingerprint_similarity(f1: Fingerprint, f2: Fingerprint) -> float:
    """``1 - ||f1 - f2|| / sqrt(length)``, in [0, 1]."""
    if f1.length != f2.length:
        raise ValueError(f"fingerprint lengths differ: {f1.length} vs {f2.length}")
    diff = sum(a != b for a, b in zip(f1.bits, f2.bits))
    return 1.0 - math.sqrt(diff) / math.sqrt(f1.length)


# ---------------------------------------------------------------- pair cache


@dataclass(frozen=True)
class ScoreParams:
    layout: int
    d_t: float
    k: int
    mode: str = ALLOW_BIJECTION

    def as_layout(self) -> Layout:
        return Layout.from_index(self.layout, self.d_t)


def _dt_json(d_t: float):
    return "inf" if math.isinf(d_t) else d_t


SKIPPED = "skipped"


class SimilarityCache:
    """Append-only JSON-lines store of pair scores.

    Rows are ``{left, right, layout, d_t, k, delta, mode, score}`` with
    ``score`` either a number or ``"skipped"``. Keys are unordered pairs.
    """

    def __init__(self, path: Optional[str | os.PathLike] = None):
        self.path = Path(path) if path is not None else None
        self._rows: dict[tuple, object] = {}
        self.computed = 0  # pair solves performed through this cache
        if self.path is not None and self.path.exists():
            with self.path.open() as fh:
                for line in fh:
                    if line.strip():
                        row = json.loads(line)
                        d_t = math.inf if row["d_t"] == "inf" else float(row["d_t"])
                        key = self._key(row["left"], row["right"], row["layout"], d_t, row["k"], row["delta"], row.get("mode", ALLOW_BIJECTION))
                        self._rows[key] = None if row["score"] == SKIPPED else row["score"]

    @staticmethod
    def _key(left, right, layout, d_t, k, delta, mode):
        a, b = sorted((str(left), str(right)))
        return (a, b, int(layout), float(d_t), int(k), float(delta), mode)

    def __len__(self) -> int:
        return len(self._rows)

    def has(self, left, right, params: ScoreParams, delta: float) -> bool:
        return self._key(left, right, params.layout, params.d_t, params.k, delta, params.mode) in self._rows

    def get(self, left, right, params: ScoreParams, delta: float) -> Optional[float]:
        """Cached score, ``None`` for a skipped pair; ``KeyError`` when absent."""
        return self._rows[self._key(left, right, params.layout, params.d_t, params.k, delta, params.mode)]

    def put(self, left, right, params: ScoreParams, delta: float, score: Optional[float]):
        key = self._key(left, right, params.layout, params.d_t, params.k, delta, params.mode)
        if key in self._rows:
            return
        self._rows[key] = score
        if self.path is not None:
            row = {
                "left": key[0],
                "right": key[1],
                "layout": params.layout,
                "d_t": _dt_json(params.d_t),
                "k": params.k,
                "delta": delta,
                "mode": params.mode,
                "score": SKIPPED if score is None else score,
            }
            with self.path.open("a") as fh:
                fh.write(json.dumps(row) + "\n")


def _score_job(args):
    g, g2, params, deltas, cap = args
    res = similarity_multi(g, g2, params.as_layout(), params.k, deltas, params.mode, cap=cap)
    return {d: (None if r.skipped else r.score) for d, r in res.items()}


def fill_cache(
    graphs: Mapping[str, ReducedGraph],
    params: ScoreParams,
    deltas: Sequence[float],
    cache: SimilarityCache,
    *,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
    pairs: Optional[Iterable[tuple[str, str]]] = None,
) -> int:
    """Score every missing unordered pair; returns the number of solves done."""
    ids = sorted(graphs)
    if pairs is None:
        pairs = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]]
    todo = [(a, b) for a, b in pairs if not all(cache.has(a, b, params, d) for d in deltas)]
    if not todo:
        return 0
    jobs = [(graphs[a], graphs[b], params, list(deltas), cap) for a, b in todo]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_score_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_score_job(j) for j in jobs]
    for (a, b), scores in zip(todo, results):
        for d, s in scores.items():
            cache.put(a, b, params, d, s)
    cache.computed += len(todo)
    log.debug("scored %d pairs for %s", len(todo), params)
    return len(todo)
