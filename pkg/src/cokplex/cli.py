"""Command line entry point: ``cokplex reduce | similarity | qubo | crossval | sweep``.

Exit codes: 0 ok, 2 usage, 3 skipped/oversize instance, 4 data error.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path
from typing import Optional, Sequence

from .classify import Entry, LabeledCorpus, cross_validate, format_table, matrix_similarity, sweep
from .conflict import CapExceeded, Layout, build_conflict_graph, edge_census
from .molgraph import MoleculeFormatError, ReducedGraph, read_molecules, reduce
from .qubo import MODES, PenaltyRule, build_cokplex_pbo, export_qubo, quadratize
from .similarity import (
    MACCS_LENGTH,
    Fingerprint,
    ScoreParams,
    SimilarityCache,
    fill_cache,
    fingerprint_similarity,
    similarity,
)
from .solve import DEFAULT_CAP

log = logging.getLogger("cokplex")

EXIT_OK, EXIT_USAGE, EXIT_SKIPPED, EXIT_DATA = 0, 2, 3, 4


@dataclass(frozen=True)
class RunConfig:
    rh: bool = False
    rb: bool = False
    fc: bool = False
    dn: bool = False
    dt: float = math.inf
    k: int = 1
    delta: float = 0.5
    mode: str = "allow_bijection"
    penalty: Optional[float] = None  # None -> min weight + 1
    cap: int = DEFAULT_CAP
    seed: int = 0
    workers: int = 1
    kappa: int = 3
    folds: int = 5
    method: str = "graph"
    fp_length: int = MACCS_LENGTH

    def __post_init__(self):
        Layout(self.rh, self.rb, self.fc, self.dn, self.dt)
        if self.k < 1:
            raise ValueError("k must be >= 1")
        if not 0 <= self.delta <= 1:
            raise ValueError("delta must lie in [0, 1]")
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}")
        if self.method not in ("graph", "fingerprint"):
            raise ValueError("method must be 'graph' or 'fingerprint'")
        if self.cap < 1 or self.workers < 1 or self.folds < 2 or self.kappa < 1 or self.fp_length < 1:
            raise ValueError("cap, workers, kappa, fp_length must be >= 1 and folds >= 2")

    @property
    def layout(self) -> Layout:
        return Layout(self.rh, self.rb, self.fc, self.dn, self.dt)

    @property
    def rule(self) -> PenaltyRule:
        return PenaltyRule() if self.penalty is None else PenaltyRule("explicit", self.penalty)


def _float(text: str) -> float:
    return math.inf if text.lower() in ("inf", "infinity") else float(text)


def _floats(text: str) -> list[float]:
    return [_float(t) for t in text.split(",") if t]


def _ints(text: str) -> list[int]:
    return [int(t) for t in text.split(",") if t]


def _add_config_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("run configuration (overrides --config)")
    g.add_argument("--config", type=Path, help="JSON file with RunConfig fields")
    for flag in ("rh", "rb", "fc", "dn"):
        g.add_argument(f"--{flag}", action="store_true", default=None, help=f"match on {flag.upper()}")
    g.add_argument("--dt", type=_float, help="distance threshold (default inf)")
    g.add_argument("--k", type=int, help="co-k-plex relaxation (default 1)")
    g.add_argument("--delta", type=float, help="score mixing weight in [0, 1]")
    g.add_argument("--mode", choices=MODES)
    g.add_argument("--penalty", type=float, help="explicit penalty coefficient")
    g.add_argument("--cap", type=int, help="exhaustive solver variable cap (default 24)")
    g.add_argument("--seed", type=int)
    g.add_argument("--workers", type=int)
    g.add_argument("--kappa", type=int, help="number of neighbours")
    g.add_argument("--folds", type=int)
    g.add_argument("--method", choices=("graph", "fingerprint"))
    g.add_argument("--fp-length", type=int, help=f"fingerprint bits (default {MACCS_LENGTH})")


def load_config(args: argparse.Namespace) -> RunConfig:
    base = {}
    if getattr(args, "config", None):
        base = json.loads(Path(args.config).read_text())
        if "dt" in base and isinstance(base["dt"], str):
            base["dt"] = _float(base["dt"])
        unknown = set(base) - {f.name for f in fields(RunConfig)}
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
    cfg = RunConfig(**base)
    overrides = {f.name: getattr(args, f.name) for f in fields(RunConfig) if getattr(args, f.name, None) is not None}
    return replace(cfg, **overrides)


def _load_graph(path: Path) -> ReducedGraph:
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        if isinstance(data, dict) and "vertices" in data:
            return ReducedGraph.from_dict(data)
    return reduce(read_molecules(path)[0])


# ---------------------------------------------------------------- commands


def cmd_reduce(args) -> int:
    mols = read_molecules(args.input)
    outdir = Path(args.output)
    outdir.mkdir(parents=True, exist_ok=True)
    stem = Path(args.input).stem
    for i, mol in enumerate(mols):
        g = reduce(mol)
        base = stem if len(mols) == 1 else f"{stem}_{i}"
        (outdir / f"{base}.json").write_text(g.to_json())
        (outdir / f"{base}.dot").write_text(g.to_dot())
        print(outdir / f"{base}.json")
    return EXIT_OK


def cmd_similarity(args) -> int:
    cfg = load_config(args)
    g, g2 = _load_graph(Path(args.left)), _load_graph(Path(args.right))
    res = similarity(g, g2, cfg.layout, cfg.k, cfg.delta, cfg.mode, rule=cfg.rule, cap=cfg.cap)
    out = res.to_dict()
    out["left"], out["right"] = args.left, args.right
    out["layout"], out["d_t"] = cfg.layout.index, "inf" if math.isinf(cfg.dt) else cfg.dt
    if res.skipped:
        out["score"] = "skipped"
    print(json.dumps(out, indent=1))
    return EXIT_SKIPPED if res.skipped else EXIT_OK


def cmd_qubo(args) -> int:
    cfg = load_config(args)
    g, g2 = _load_graph(Path(args.left)), _load_graph(Path(args.right))
    cg = build_conflict_graph(g, g2, cfg.layout)
    poly = build_cokplex_pbo(cg, cfg.k, cfg.mode, cfg.rule)
    quad = quadratize(poly)
    record = export_qubo(quad.poly, quad.ancilla_map)
    record["pairs"] = [list(p) for p in cg.pairs]
    record["census"] = edge_census(cg)
    record["penalty_weight"] = quad.penalty_weight
    text = json.dumps(record, indent=1) + "\n"
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return EXIT_OK


def read_manifest(path: Path, method: str, fp_length: int) -> LabeledCorpus:
    """JSON-lines manifest: ``{"path": ..., "label": ..., "id"?: ..., "fingerprint"?: hex}``."""
    entries = []
    for lineno, line in enumerate(path.read_text().splitlines(), start=1):
        if not line.strip():
            continue
        try:
            row = json.loads(line)
        except json.JSONDecodeError as err:
            raise MoleculeFormatError(f"invalid manifest line: {err.msg}", lineno, str(path)) from None
        mol_path = path.parent / row["path"] if "path" in row else None
        mol = read_molecules(mol_path)[row.get("record", 0)] if mol_path is not None else None
        ident = row.get("id") or (mol.name if mol is not None and mol.name else Path(row["path"]).stem)
        label = row.get("label") or (mol.label if mol is not None else None)
        if label is None:
            raise MoleculeFormatError(f"entry {ident!r} has no label", lineno, str(path))
        if method == "fingerprint":
            hexfp = row.get("fingerprint") or (mol.fingerprint if mol is not None else None)
            if hexfp is None:
                raise MoleculeFormatError(f"entry {ident!r} has no fingerprint", lineno, str(path))
            item = Fingerprint.from_hex(hexfp, fp_length)
        else:
            item = reduce(mol)
        entries.append(Entry(ident, label, item))
    return LabeledCorpus(entries)


def _write_report(out: Optional[Path], payload: dict, table: str):
    sys.stdout.write(table)
    if out is not None:
        out.write_text(json.dumps(payload, indent=1) + "\n")
        out.with_suffix(".txt").write_text(table)


def cmd_crossval(args) -> int:
    cfg = load_config(args)
    corpus = read_manifest(Path(args.manifest), cfg.method, cfg.fp_length)
    if cfg.method == "fingerprint":

        def fn(a, b):
            return fingerprint_similarity(a.item, b.item)

    else:
        cache = SimilarityCache(args.cache)
        params = ScoreParams(cfg.layout.index, cfg.dt, cfg.k, cfg.mode)
        graphs = {e.id: e.item for e in corpus}
        fill_cache(graphs, params, [cfg.delta], cache, cap=cfg.cap, workers=cfg.workers)
        ids = sorted(graphs)
        scores = {(a, b): cache.get(a, b, params, cfg.delta) for i, a in enumerate(ids) for b in ids[i + 1:]}
        fn = matrix_similarity(scores)
    report = cross_validate(corpus, fn, cfg.folds, cfg.kappa, cfg.seed)
    lines = [f"{name:>12}  {report.mean[name] if report.mean[name] is not None else '-'}" for name in report.mean]
    table = "\n".join(lines + [f"{'abstentions':>12}  {report.abstentions}"]) + "\n"
    _write_report(Path(args.output) if args.output else None, report.to_dict(), table)
    return EXIT_OK


def cmd_sweep(args) -> int:
    cfg = load_config(args)
    corpus = read_manifest(Path(args.manifest), "graph", cfg.fp_length)
    cache = SimilarityCache(args.cache)
    rows = sweep(
        corpus,
        layouts=_ints(args.layouts),
        dt_grid=_floats(args.dt_grid),
        k_grid=_ints(args.k_grid),
        delta_grid=_floats(args.delta_grid),
        mode=cfg.mode,
        folds=cfg.folds,
        kappa=cfg.kappa,
        seed=cfg.seed,
        cache=cache,
        reduced_pairs=args.reduced_pairs,
        cap=cfg.cap,
        workers=cfg.workers,
    )
    log.info("sweep: %d rows, %d new pair solves", len(rows), cache.computed)
    _write_report(Path(args.output) if args.output else None, {"rows": [r.to_dict() for r in rows]}, format_table(rows))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cokplex", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reduce", help="write reduced-graph JSON and DOT for each record")
    p.add_argument("input")
    p.add_argument("-o", "--output", default=".", help="output directory")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("similarity", help="similarity of two molecules as JSON")
    p.add_argument("left")
    p.add_argument("right")
    _add_config_flags(p)
    p.set_defaults(func=cmd_similarity)

    p = sub.add_parser("qubo", help="export the quadratized co-k-plex QUBO of a pair")
    p.add_argument("left")
    p.add_argument("right")
    p.add_argument("-o", "--output")
    _add_config_flags(p)
    p.set_defaults(func=cmd_qubo)

    p = sub.add_parser("crossval", help="k-fold cross-validation over a manifest")
    p.add_argument("manifest")
    p.add_argument("--cache", help="JSON-lines pair score cache")
    p.add_argument("-o", "--output", help="report JSON path (a .txt table is written alongside)")
    _add_config_flags(p)
    p.set_defaults(func=cmd_crossval)

    p = sub.add_parser("sweep", help="cross-validate over a parameter grid")
    p.add_argument("manifest")
    p.add_argument("--layouts", default=",".join(str(i) for i in range(16)))
    p.add_argument("--dt-grid", default="0,0.5,1,1.5,5,10")
    p.add_argument("--k-grid", default="1,2,3,4,5")
    p.add_argument("--delta-grid", default="0.3,0.4,0.5")
    p.add_argument("--reduced-pairs", action="store_true", help="drop pairs skipped in any setting from all rows")
    p.add_argument("--cache", help="JSON-lines pair score cache")
    p.add_argument("-o", "--output")
    _add_config_flags(p)
    p.set_defaults(func=cmd_sweep)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except CapExceeded as err:
        print(f"skipped: {err}", file=sys.stderr)
        return EXIT_SKIPPED
    except (ValueError, OSError, KeyError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
