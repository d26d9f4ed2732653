"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

The lines are also collected and repeated in the pytest terminal summary.
"""

import json
import math
import time
import warnings

import numpy as np
import pytest

from cokplex.classify import ConfusionCounts, Entry, LabeledCorpus, metrics, sweep
from cokplex.conflict import DISTANCE, Layout, build_conflict_graph, max_distance_discrepancy
from cokplex.molgraph import ReducedGraph, read_molecules, reduce
from cokplex.qubo import MODES, build_cokplex_pbo, build_mis_qubo, quadratize
from cokplex.similarity import SimilarityCache, similarity_multi
from cokplex.solve import DEFAULT_CAP, cokplex_oracle, eliminate_optimize, exhaustive_optimize, verify_cokplex
from cokplex.synthetic import planted_corpus, random_conflict_graph, random_molecule, random_polynomial

from conftest import DATA, record_criterion

KS = (1, 2, 3)
DT_GRID = (0, 0.5, 1, 1.5, 5, 10)
DELTAS = (0.3, 0.4, 0.5)
ALL_OPTIMA = 1 << DEFAULT_CAP


@pytest.fixture(scope="module")
def oracle_corpus():
    """200 seeded conflict graphs, n in [4, 12], density in [0.1, 0.9], weights 1-5."""
    rng = np.random.default_rng(2024)
    graphs = []
    for _ in range(200):
        n = int(rng.integers(4, 13))
        graphs.append(random_conflict_graph(rng, n, float(rng.uniform(0.1, 0.9))))
    return graphs


@pytest.fixture(scope="module")
def source_solves(oracle_corpus):
    """Every (graph, k, mode) instance with its polynomial and full optimum list."""
    out = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for cg in oracle_corpus:
            for k in KS:
                for mode in MODES:
                    poly = build_cokplex_pbo(cg, k, mode)
                    out.append((cg, k, mode, poly, exhaustive_optimize(poly, keep_optima=ALL_OPTIMA)))
    return out


def random_pairs(seed, count):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        a, b = reduce(random_molecule(rng)), reduce(random_molecule(rng))
        yield rng, a, b


def test_criterion_01_oracle_equivalence(oracle_corpus):
    start = time.perf_counter()
    mismatches = 0
    count = 0
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", UserWarning)
        for cg in oracle_corpus:
            for k in KS:
                for mode in MODES:
                    best = exhaustive_optimize(build_cokplex_pbo(cg, k, mode)).best.value
                    mismatches += best != cokplex_oracle(cg, k, mode)[0]
                    count += 1
    elapsed = time.perf_counter() - start
    ok = mismatches == 0 and elapsed < 120
    record_criterion(1, "exhaustive optimum == branch-and-bound oracle", ok, f"{count} instances, {mismatches} mismatches, {elapsed:.1f}s")
    assert ok


def test_criterion_02_quadratization_soundness(source_solves):
    start = time.perf_counter()
    failures = []
    large = 0

    def check(label, poly, source_value):
        nonlocal large
        q = quadratize(poly)
        if q.poly.num_vars <= DEFAULT_CAP:
            rep = exhaustive_optimize(q.poly, keep_optima=ALL_OPTIMA)
            value, optima = rep.best.value, rep.optima
        else:
            # beyond the enumeration cap: exact variable elimination, one optimum
            large += 1
            best = eliminate_optimize(q.poly)
            value, optima = best.value, (best.bits,)
        if value != source_value:
            failures.append(f"{label}: quadratized {value} vs source {source_value}")
        elif any(poly.evaluate(q.project(bits)) != source_value for bits in optima):
            failures.append(f"{label}: projected optimum is not source-optimal")

    for i, (_, k, mode, poly, rep) in enumerate(source_solves):
        check(f"corpus#{i} k={k} {mode}", poly, rep.best.value)
    rng = np.random.default_rng(77)
    for i in range(100):
        poly = random_polynomial(rng, int(rng.integers(1, 11)), max_degree=4, sense="max" if i % 2 == 0 else "min")
        check(f"poly#{i}", poly, exhaustive_optimize(poly).best.value)
    elapsed = time.perf_counter() - start
    ok = not failures
    detail = f"{len(source_solves)} co-k-plex + 100 random polynomials, {large} solved by elimination, {len(failures)} failures, {elapsed:.1f}s"
    record_criterion(2, "quadratized optimum == source optimum, projections optimal", ok, detail)
    assert ok, failures[:5]


def test_criterion_03_mis_recovery():
    rng = np.random.default_rng(303)
    differing = 0
    for _ in range(100):
        cg = random_conflict_graph(rng, int(rng.integers(2, 13)), float(rng.uniform(0.1, 0.9)))
        a, b = build_cokplex_pbo(cg, 1), build_mis_qubo(cg)
        differing += a.terms != b.terms or a.sense != b.sense
    ok = differing == 0
    record_criterion(3, "k=1 builder is term-identical to the MIS QUBO", ok, f"100 graphs, {differing} differ")
    assert ok


def test_criterion_04_feasibility(source_solves):
    checked = infeasible = 0
    for cg, k, mode, _, rep in source_solves:
        assert rep.optima is not None
        for bits in rep.optima:
            checked += 1
            infeasible += not verify_cokplex(cg, [i for i, b in enumerate(bits) if b], k, mode)
    ok = infeasible == 0
    record_criterion(4, "every optimal assignment is a co-k-plex", ok, f"{checked} optimal assignments, {infeasible} infeasible")
    assert ok


def pair_objective(a, b, layout, k):
    res = similarity_multi(a, b, layout, k, [0.5])[0.5]
    assert not res.skipped
    return res.objective


def test_criterion_05_relaxation_monotonicity():
    violations = []
    for i, (rng, a, b) in enumerate(random_pairs(505, 50)):
        index = int(rng.integers(16))
        d_t = float(rng.choice(DT_GRID))
        along_k = [pair_objective(a, b, Layout.from_index(index, d_t), k) for k in (1, 2, 3, 4)]
        k = int(rng.integers(1, 5))
        along_dt = [pair_objective(a, b, Layout.from_index(index, dt), k) for dt in DT_GRID]
        for name, seq in (("k", along_k), ("d_t", along_dt)):
            if any(x > y for x, y in zip(seq, seq[1:])):
                violations.append(f"pair {i} along {name}: {seq}")
    ok = not violations
    record_criterion(5, "objective non-decreasing in k and in d_t", ok, f"50 pairs, {len(violations)} violations")
    assert ok, violations[:5]


def test_criterion_06_similarity_identities():
    worst_self = worst_sym = 0.0
    rng = np.random.default_rng(606)
    for _ in range(50):
        g = reduce(random_molecule(rng))
        lay = Layout.from_index(int(rng.integers(16)), float(rng.choice(DT_GRID + (math.inf,))))
        for res in similarity_multi(g, g, lay, int(rng.integers(1, 5)), DELTAS).values():
            worst_self = max(worst_self, abs(res.score - 1.0))
    for rng, a, b in random_pairs(607, 50):
        lay = Layout.from_index(int(rng.integers(16)), float(rng.choice(DT_GRID + (math.inf,))))
        k = int(rng.integers(1, 5))
        ab, ba = similarity_multi(a, b, lay, k, DELTAS), similarity_multi(b, a, lay, k, DELTAS)
        for d in DELTAS:
            worst_sym = max(worst_sym, abs(ab[d].score - ba[d].score))
    ok = worst_self <= 1e-12 and worst_sym <= 1e-12
    detail = f"max |S(G,G)-1| = {worst_self:.1e}, max |S(A,B)-S(B,A)| = {worst_sym:.1e}"
    record_criterion(6, "self-similarity 1 and symmetry", ok, detail)
    assert ok


def test_criterion_07_metric_formulas():
    rng = np.random.default_rng(707)
    worst = 0.0
    flag_errors = 0
    done = 0
    while done < 1000:
        tp, fp, tn, fn = (int(x) for x in rng.integers(0, 6, size=4) * rng.integers(0, 2, size=4))
        if tp + fp + tn + fn == 0:
            continue
        done += 1
        m = metrics(ConfusionCounts(tp, fp, tn, fn))
        expected = {
            "accuracy": (tp + tn, tp + tn + fp + fn),
            "precision": (tp, tp + fp),
            "sensitivity": (tp, tp + fn),
            "specificity": (tn, tn + fp),
        }
        for name, (num, den) in expected.items():
            value = getattr(m, name)
            if den == 0:
                flag_errors += value is not None or name not in m.undefined
            elif value is None or name in m.undefined:
                flag_errors += 1
            else:
                worst = max(worst, abs(value - num / den))
    ok = worst <= 1e-12 and flag_errors == 0
    record_criterion(7, "metric formulas and undefined flags", ok, f"1000 confusion counts, max error {worst:.1e}, {flag_errors} flag errors")
    assert ok


def test_criterion_08_planted_pipeline():
    start = time.perf_counter()
    mols = planted_corpus(seed=0)
    corpus = LabeledCorpus(Entry(m.name, m.label, reduce(m)) for m in mols)
    cache = SimilarityCache()
    [cell] = sweep(corpus, [7], [1.5], [3], [0.4], folds=5, kappa=3, cache=cache)
    accuracy = cell.report.mean["accuracy"]
    rows = sweep(corpus, range(16), [1.5], [3], [0.4], folds=5, kappa=3, cache=cache, reduced_pairs=True)
    solved = {r.pairs_solved for r in rows}
    # a tight cap skips some pairs; the excluded set must still be shared by every row
    capped = sweep(corpus, range(16), [1.5], [3], [0.4], folds=5, kappa=3, reduced_pairs=True, cap=10)
    capped_solved = {r.pairs_solved for r in capped}
    elapsed = time.perf_counter() - start
    ok = (
        len(mols) == 40
        and accuracy >= 0.9
        and len(rows) == 16
        and {r.layout for r in rows} == set(range(16))
        and len(solved) == 1
        and len(capped) == 16
        and len(capped_solved) == 1
        and elapsed < 600
    )
    detail = (
        f"accuracy {accuracy:.3f} at layout 7/d_t 1.5/k 3/delta 0.4, {len(rows)} sweep rows, "
        f"pairs {solved.pop()}/{rows[0].pairs_total}, capped pairs {capped_solved.pop()}/{capped[0].pairs_total}, {elapsed:.1f}s"
    )
    record_criterion(8, "planted corpus end to end", ok, detail)
    assert ok


def test_criterion_09_golden_files():
    names = ["nitromethane", "methanol_explicit_h", "naphthol", "pyridinium"]
    bad = []
    for name in names:
        golden = (DATA / f"{name}.reduced.json").read_text()
        produced = reduce(read_molecules(DATA / f"{name}.mol")[0]).to_json()
        if produced != golden or ReducedGraph.from_dict(json.loads(golden)).to_json() != golden:
            bad.append(name)
    ok = not bad
    record_criterion(9, "parser golden files round-trip bit-exactly", ok, f"{len(names)} fixtures, mismatches: {bad or 'none'}")
    assert ok


def test_criterion_10_conflict_nesting():
    failures = []
    for i, (rng, a, b) in enumerate(random_pairs(1010, 50)):
        index = int(rng.integers(16))
        edge_sets = [set(build_conflict_graph(a, b, Layout.from_index(index, dt)).edges) for dt in DT_GRID + (math.inf,)]
        if any(not edge_sets[0] >= s for s in edge_sets[1:]) or any(not x >= y for x, y in zip(edge_sets, edge_sets[1:])):
            failures.append(f"pair {i}: edge sets not nested")
        limit = max_distance_discrepancy(a, b, Layout.from_index(index))
        above = build_conflict_graph(a, b, Layout.from_index(index, limit + 1e-9))
        if any(kind == DISTANCE for kind in above.edges.values()):
            failures.append(f"pair {i}: distance edges above the max discrepancy {limit}")
    ok = not failures
    record_criterion(10, "conflict edges nest over d_t, no distance edges past the limit", ok, f"50 pairs, {len(failures)} failures")
    assert ok, failures[:5]
