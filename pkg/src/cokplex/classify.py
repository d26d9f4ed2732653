"""Weighted k-NN mutagenicity prediction and cross-validation."""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable, Iterable, Mapping, Optional, Sequence

from .molgraph import CLASS_LABELS, MUTAGEN, NON_MUTAGEN, ReducedGraph
from .qubo import ALLOW_BIJECTION
from .similarity import ScoreParams, SimilarityCache, fill_cache
from .solve import DEFAULT_CAP

METRIC_NAMES = ("accuracy", "precision", "sensitivity", "specificity")


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int = 0
    fp: int = 0
    tn: int = 0
    fn: int = 0

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp, self.tn + other.tn, self.fn + other.fn)

    def record(self, truth: str, predicted: str) -> "ConfusionCounts":
        pos_truth, pos_pred = truth == MUTAGEN, predicted == MUTAGEN
        return self + ConfusionCounts(
            int(pos_truth and pos_pred),
            int(pos_pred and not pos_truth),
            int(not pos_truth and not pos_pred),
            int(pos_truth and not pos_pred),
        )


@dataclass(frozen=True)
class Metrics:
    """The four rates; ``None`` marks a zero denominator."""

    accuracy: Optional[float]
    precision: Optional[float]
    sensitivity: Optional[float]
    specificity: Optional[float]

    @property
    def undefined(self) -> tuple[str, ...]:
        return tuple(name for name in METRIC_NAMES if getattr(self, name) is None)

    def as_dict(self) -> dict:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _ratio(num: int, den: int) -> Optional[float]:
    return num / den if den else None


def metrics(c: ConfusionCounts) -> Metrics:
    if c.total == 0:
        raise ValueError("no evaluated queries")
    return Metrics(
        _ratio(c.tp + c.tn, c.total),
        _ratio(c.tp, c.tp + c.fp),
        _ratio(c.tp, c.tp + c.fn),
        _ratio(c.tn, c.tn + c.fp),
    )


@dataclass(frozen=True)
class Entry:
    id: str
    label: str
    item: object  # ReducedGraph, Fingerprint, ...


class LabeledCorpus:
    def __init__(self, entries: Iterable[Entry]):
        self.entries = tuple(entries)
        ids = [e.id for e in self.entries]
        if len(set(ids)) != len(ids):
            raise ValueError("corpus ids must be unique")
        for e in self.entries:
            if e.label not in CLASS_LABELS:
                raise ValueError(f"entry {e.id!r} has unknown label {e.label!r}")
        self.by_id = {e.id: e for e in self.entries}

    def __len__(self):
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def class_counts(self) -> dict[str, int]:
        return {lab: sum(e.label == lab for e in self.entries) for lab in CLASS_LABELS}


SimilarityFn = Callable[[Entry, Entry], Optional[float]]


class Abstention(ValueError):
    """Fewer than kappa neighbours have a defined similarity to the query."""


def knn_predict(query: Entry, corpus: Iterable[Entry], kappa: int, similarity_fn: SimilarityFn) -> str:
    """Inverse-distance weighted vote of the ``kappa`` nearest entries.

    Distance is ``1 - similarity``; entries with undefined similarity do not
    vote. Zero-distance neighbours decide alone by majority. Every exact tie
    goes to the mutagen class.
    """
    if kappa < 1 or kappa % 2 == 0:
        raise ValueError(f"kappa must be an odd positive integer, got {kappa}")
    scored = []
    for entry in corpus:
        if entry.id == query.id:
            continue
        s = similarity_fn(query, entry)
        if s is not None:
            scored.append((1.0 - s, entry.id, entry.label))
    if len(scored) < kappa:
        raise Abstention(f"only {len(scored)} scoreable neighbours for {query.id!r}, need {kappa}")
    scored.sort()
    nearest = scored[:kappa]
    exact = [lab for d, _, lab in nearest if d <= 0]
    votes = {MUTAGEN: 0.0, NON_MUTAGEN: 0.0}
    if exact:
        for lab in exact:
            votes[lab] += 1
    else:
        for d, _, lab in nearest:
            votes[lab] += 1.0 / d
    return MUTAGEN if votes[MUTAGEN] >= votes[NON_MUTAGEN] else NON_MUTAGEN


def stratified_folds(corpus: LabeledCorpus, folds: int, seed: int = 0) -> list[list[str]]:
    """Seeded shuffle within each class, then deal round-robin into folds."""
    rng = random.Random(seed)
    out: list[list[str]] = [[] for _ in range(folds)]
    slot = 0
    for lab in CLASS_LABELS:
        ids = sorted(e.id for e in corpus if e.label == lab)
        rng.shuffle(ids)
        for i in ids:
            out[slot % folds].append(i)
            slot += 1
    return [sorted(f) for f in out]


@dataclass(frozen=True)
class FoldResult:
    counts: ConfusionCounts
    metrics: Optional[Metrics]
    abstentions: int


@dataclass(frozen=True)
class MetricsReport:
    folds: tuple[FoldResult, ...]
    mean: Mapping[str, Optional[float]]
    stderr: Mapping[str, Optional[float]]

    @property
    def counts(self) -> ConfusionCounts:
        total = ConfusionCounts()
        for f in self.folds:
            total = total + f.counts
        return total

    @property
    def abstentions(self) -> int:
        return sum(f.abstentions for f in self.folds)

    def to_dict(self) -> dict:
        return {
            "mean": dict(self.mean),
            "stderr": dict(self.stderr),
            "counts": vars(self.counts),
            "abstentions": self.abstentions,
            "folds": [
                {
                    "counts": vars(f.counts),
                    "metrics": None if f.metrics is None else f.metrics.as_dict(),
                    "abstentions": f.abstentions,
                }
                for f in self.folds
            ],
        }


def summarize(folds: Sequence[FoldResult]) -> MetricsReport:
    mean, stderr = {}, {}
    for name in METRIC_NAMES:
        vals = [getattr(f.metrics, name) for f in folds if f.metrics is not None]
        vals = [v for v in vals if v is not None]
        mean[name] = sum(vals) / len(vals) if vals else None
        if len(vals) >= 2:
            mu = mean[name]
            var = sum((v - mu) ** 2 for v in vals) / (len(vals) - 1)
            stderr[name] = math.sqrt(var / len(vals))
        else:
            stderr[name] = None
    return MetricsReport(tuple(folds), mean, stderr)


def cross_validate(
    corpus: LabeledCorpus,
    similarity_fn: SimilarityFn,
    folds: int = 5,
    kappa: int = 3,
    seed: int = 0,
) -> MetricsReport:
    """Stratified k-fold CV; mutagen is the positive class."""
    if folds < 2:
        raise ValueError("need at least two folds")
    for lab, count in corpus.class_counts().items():
        if count < folds:
            raise ValueError(f"class {lab!r} has {count} entries, fewer than {folds} folds")
    parts = stratified_folds(corpus, folds, seed)
    results = []
    for part in parts:
        held = set(part)
        train = [e for e in corpus if e.id not in held]
        if {e.label for e in train} != set(CLASS_LABELS):
            raise ValueError("a class is absent from a training split")
        counts = ConfusionCounts()
        abstained = 0
        for qid in part:
            query = corpus.by_id[qid]
            try:
                pred = knn_predict(query, train, kappa, similarity_fn)
            except Abstention:
                abstained += 1
                continue
            counts = counts.record(query.label, pred)
        results.append(FoldResult(counts, metrics(counts) if counts.total else None, abstained))
    return summarize(results)


def matrix_similarity(scores: Mapping[tuple[str, str], Optional[float]], exclude: frozenset = frozenset()) -> SimilarityFn:
    """Similarity function backed by an unordered-pair score table."""

    def fn(a: Entry, b: Entry) -> Optional[float]:
        key = (a.id, b.id) if a.id < b.id else (b.id, a.id)
        if key in exclude:
            return None
        return scores.get(key)

    return fn


@dataclass(frozen=True)
class SweepRow:
    layout: int
    d_t: float
    k: int
    delta: float
    report: MetricsReport
    pairs_solved: int
    pairs_total: int

    def to_dict(self) -> dict:
        return {
            "layout": self.layout,
            "d_t": "inf" if math.isinf(self.d_t) else self.d_t,
            "k": self.k,
            "delta": self.delta,
            "pairs_solved": self.pairs_solved,
            "pairs_total": self.pairs_total,
            **self.report.to_dict(),
        }


def sweep(
    corpus: LabeledCorpus,
    layouts: Sequence[int] = range(16),
    dt_grid: Sequence[float] = (0, 0.5, 1, 1.5, 5, 10),
    k_grid: Sequence[int] = (1, 2, 3, 4, 5),
    delta_grid: Sequence[float] = (0.3, 0.4, 0.5),
    *,
    mode: str = ALLOW_BIJECTION,
    folds: int = 5,
    kappa: int = 3,
    seed: int = 0,
    cache: Optional[SimilarityCache] = None,
    reduced_pairs: bool = False,
    cap: int = DEFAULT_CAP,
    workers: int = 1,
) -> list[SweepRow]:
    """Cross-validate every parameter combination over graph items.

    Pair scores come from (and go to) ``cache``. With ``reduced_pairs`` a
    pair skipped under any swept setting is excluded from every row, so all
    rows compare the same pair set.
    """
    if not (layouts and dt_grid and k_grid and delta_grid):
        raise ValueError("empty parameter grid")
    cache = cache if cache is not None else SimilarityCache()
    graphs: dict[str, ReducedGraph] = {e.id: e.item for e in corpus}
    ids = sorted(graphs)
    pairs = [(a, b) for i, a in enumerate(ids) for b in ids[i + 1:]]
    settings = [ScoreParams(lay, float(dt), k, mode) for lay, dt, k in itertools.product(layouts, dt_grid, k_grid)]
    for params in settings:
        fill_cache(graphs, params, delta_grid, cache, cap=cap, workers=workers, pairs=pairs)

    excluded: frozenset = frozenset()
    if reduced_pairs:
        excluded = frozenset(
            (a, b)
            for a, b in pairs
            if any(cache.get(a, b, p, d) is None for p in settings for d in delta_grid)
        )

    rows = []
    for params in settings:
        for delta in delta_grid:
            scores = {(a, b): cache.get(a, b, params, delta) for a, b in pairs}
            solved = sum(1 for key, s in scores.items() if s is not None and key not in excluded)
            fn = matrix_similarity(scores, excluded)
            report = cross_validate(corpus, fn, folds, kappa, seed)
            rows.append(SweepRow(params.layout, params.d_t, params.k, delta, report, solved, len(pairs)))
    return rows


def format_table(rows: Sequence[SweepRow]) -> str:
    """Aligned text table, one line per sweep row."""
    head = ["layout", "d_t", "k", "delta", "pairs", *METRIC_NAMES, "abstain"]
    lines = []
    for r in rows:
        vals = []
        for name in METRIC_NAMES:
            m, se = r.report.mean[name], r.report.stderr[name]
            vals.append("-" if m is None else (f"{m:.3f}" if se is None else f"{m:.3f}±{se:.3f}"))
        lines.append([str(r.layout), f"{r.d_t:g}", str(r.k), f"{r.delta:g}", f"{r.pairs_solved}/{r.pairs_total}", *vals, str(r.report.abstentions)])
    widths = [max(len(h), *(len(l[i]) for l in lines)) if lines else len(h) for i, h in enumerate(head)]
    out = ["  ".join(h.rjust(w) for h, w in zip(head, widths))]
    out += ["  ".join(v.rjust(w) for v, w in zip(l, widths)) for l in lines]
    return "\n".join(out) + "\n"
