import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cokplex.conflict import BIJECTION, USER, ConflictGraph
from cokplex.qubo import ALLOW_BIJECTION, FORBID_BIJECTION, PseudoBooleanPolynomial, build_cokplex_pbo, build_mis_qubo, quadratize
from cokplex.solve import (
    SolverCapError,
    cokplex_oracle,
    eliminate_optimize,
    exhaustive_optimize,
    milp_optimize,
    value_table,
    verify_cokplex,
)
from cokplex.synthetic import random_conflict_graph, random_polynomial


def complete(n):
    return ConflictGraph.from_edges([1] * n, {(i, j): USER for i in range(n) for j in range(i + 1, n)})


def subsets_oracle(cg, k, mode):
    """Maximum co-k-plex weight by enumerating every vertex subset."""
    best = 0
    for mask in range(1 << cg.n):
        chosen = [i for i in range(cg.n) if mask >> i & 1]
        if verify_cokplex(cg, chosen, k, mode):
            best = max(best, sum(cg.weights[i] for i in chosen))
    return best


# ---------------------------------------------------------------- exhaustive enumeration


def test_single_edge():
    rep = exhaustive_optimize(build_mis_qubo(ConflictGraph.from_edges([1, 1], {(0, 1): USER})))
    assert rep.best.value == 1 and rep.optima_count == 2
    assert rep.best.bits == (0, 1)  # lexicographically smallest


def test_zero_polynomial():
    rep = exhaustive_optimize(PseudoBooleanPolynomial(3))
    assert rep.best.value == 0 and rep.optima_count == 8 and rep.vars_explored == 8


def test_triangle_k2():
    tri = complete(3)
    rep = exhaustive_optimize(build_cokplex_pbo(tri, 2))
    assert rep.best.value == 2 and rep.optima_count == 3


def test_cap():
    with pytest.raises(SolverCapError):
        exhaustive_optimize(PseudoBooleanPolynomial(25))


def test_minimisation():
    p = PseudoBooleanPolynomial(2, {(0,): 3, (1,): -2, (0, 1): 1}, "min")
    rep = exhaustive_optimize(p)
    assert rep.best.value == -2 and rep.best.bits == (0, 1)


def test_float_coefficients():
    p = PseudoBooleanPolynomial(3, {(0,): 0.1, (1,): 0.2, (0, 1): 0.3, (2,): -0.5})
    rep = exhaustive_optimize(p)
    assert rep.best.value == pytest.approx(0.6) and rep.best.bits == (1, 1, 0)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["max", "min"]))
def test_table_matches_evaluate(seed, sense):
    rng = np.random.default_rng(seed)
    p = random_polynomial(rng, int(rng.integers(1, 9)), sense=sense)
    table = value_table(p)
    for index in range(1 << p.num_vars):
        bits = tuple((index >> i) & 1 for i in range(p.num_vars))
        assert table[index] == p.evaluate(bits)


@given(st.integers(0, 2**32 - 1), st.sampled_from(["max", "min"]))
def test_gray_code_matches_table(seed, sense):
    rng = np.random.default_rng(seed)
    p = random_polynomial(rng, int(rng.integers(1, 10)), sense=sense)
    a = exhaustive_optimize(p, method="table")
    b = exhaustive_optimize(p, method="gray")
    assert a.best == b.best and a.optima_count == b.optima_count and a.optima == b.optima


def test_optima_are_lexicographic():
    rep = exhaustive_optimize(PseudoBooleanPolynomial(3))
    assert list(rep.optima) == sorted(itertools.product((0, 1), repeat=3))


# ---------------------------------------------------------------- branch and bound


def test_oracle_single_edge():
    weight, members = cokplex_oracle(ConflictGraph.from_edges([1, 1], {(0, 1): USER}), 1)
    assert weight == 1 and len(members) == 1


def test_oracle_triangle_k3():
    assert cokplex_oracle(complete(3), 3) == (3, frozenset({0, 1, 2}))


def test_oracle_k4_k2():
    weight, members = cokplex_oracle(complete(4), 2)
    assert weight == 2 and len(members) == 2


@given(st.integers(0, 2**32 - 1), st.integers(1, 4), st.sampled_from([ALLOW_BIJECTION, FORBID_BIJECTION]))
def test_oracle_matches_subset_enumeration(seed, k, mode):
    rng = np.random.default_rng(seed)
    cg = random_conflict_graph(rng, int(rng.integers(1, 10)), float(rng.uniform(0.1, 0.9)))
    weight, members = cokplex_oracle(cg, k, mode)
    assert weight == subsets_oracle(cg, k, mode)
    assert verify_cokplex(cg, members, k, mode)
    assert weight == sum(cg.weights[i] for i in members)


def test_oracle_cap():
    with pytest.raises(SolverCapError):
        cokplex_oracle(complete(31), 1)


# ---------------------------------------------------------------- verification


def test_verify_examples():
    tri = complete(3)
    assert verify_cokplex(tri, [], 1)
    assert not verify_cokplex(ConflictGraph.from_edges([1, 1], {(0, 1): USER}), [0, 1], 1)
    assert verify_cokplex(tri, [0, 1, 2], 3)


def test_verify_forbid_bijection():
    cg = ConflictGraph.from_edges([1, 1], {(0, 1): BIJECTION})
    assert verify_cokplex(cg, [0, 1], 2)
    assert not verify_cokplex(cg, [0, 1], 2, FORBID_BIJECTION)


def test_verify_rejects_unknown_vertex():
    with pytest.raises(ValueError):
        verify_cokplex(complete(2), [5], 1)


# ---------------------------------------------------------------- MILP cross-check


@given(st.integers(0, 2**32 - 1), st.sampled_from(["max", "min"]))
def test_milp_matches_enumeration(seed, sense):
    rng = np.random.default_rng(seed)
    p = random_polynomial(rng, int(rng.integers(1, 8)), sense=sense)
    assert milp_optimize(p).value == exhaustive_optimize(p).best.value


def test_milp_on_quadratized_cokplex():
    rng = np.random.default_rng(5)
    cg = random_conflict_graph(rng, 10, 0.6)
    q = quadratize(build_cokplex_pbo(cg, 3))
    result = milp_optimize(q.poly)
    assert result.value == cokplex_oracle(cg, 3)[0]


# ---------------------------------------------------------------- variable elimination


@given(st.integers(0, 2**32 - 1), st.sampled_from(["max", "min"]), st.integers(1, 6))
def test_elimination_matches_enumeration(seed, sense, width):
    # small widths force the conditioning path
    rng = np.random.default_rng(seed)
    p = random_polynomial(rng, int(rng.integers(1, 10)), sense=sense)
    best = eliminate_optimize(p, max_width=width)
    assert best.value == exhaustive_optimize(p).best.value
    assert p.evaluate(best.bits) == best.value


def test_elimination_beyond_the_enumeration_cap():
    rng = np.random.default_rng(5)
    cg = random_conflict_graph(rng, 10, 0.6)
    q = quadratize(build_cokplex_pbo(cg, 3))
    assert q.poly.num_vars > 24
    best = eliminate_optimize(q.poly)
    assert best.value == cokplex_oracle(cg, 3)[0]
    assert q.poly.evaluate(best.bits) == best.value


def test_elimination_conditioning_cap():
    with pytest.raises(SolverCapError):
        eliminate_optimize(complete_poly(8), max_width=2, max_conditioned=1)


def complete_poly(n):
    return PseudoBooleanPolynomial(n, {(i, j): 1 for i in range(n) for j in range(i + 1, n)})
