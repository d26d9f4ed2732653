"""Exact solvers.

``exhaustive_optimize`` enumerates all ``2**n`` assignments of a
pseudo-Boolean polynomial. ``cokplex_oracle`` solves the co-k-plex problem
combinatorially by branch and bound, without building any polynomial, and is
the independent check on the penalty formulation. ``eliminate_optimize``
handles sparse instances past the enumeration cap.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .conflict import BIJECTION, CapExceeded, ConflictGraph
from .qubo import ALLOW_BIJECTION, FORBID_BIJECTION, MODES, PseudoBooleanPolynomial

DEFAULT_CAP = 24
ORACLE_CAP = 30


class SolverCapError(CapExceeded):
    def __init__(self, size: int, cap: int, what: str = "variables"):
        self.size = size
        self.cap = cap
        super().__init__(f"instance has {size} {what}, above the exhaustive solver cap of {cap}")


@dataclass(frozen=True)
class Assignment:
    bits: tuple[int, ...]
    value: float


@dataclass(frozen=True)
class SolveReport:
    best: Assignment
    optima_count: int
    vars_explored: int  # assignments enumerated
    elapsed: float  # seconds
    optima: Optional[tuple[tuple[int, ...], ...]] = None  # all optima, lexicographic, when few enough


def value_table(p: PseudoBooleanPolynomial) -> np.ndarray:
    """Objective value of every assignment; bit ``i`` of the index is ``x_i``.

    Each coefficient is placed at its monomial's mask and summed over subsets
    (one vectorised pass per variable), so ``table[s] = sum of c_T, T <= s``.
    """
    n = p.num_vars
    dtype = np.int64 if p.is_integral() else np.float64
    table = np.zeros(1 << n, dtype=dtype)
    for mono, coeff in p.terms.items():
        mask = 0
        for v in mono:
            mask |= 1 << v
        table[mask] += coeff
    for i in range(n):
        view = table.reshape(-1, 2, 1 << i)
        view[:, 1, :] += view[:, 0, :]
    return table


def _bit_reverse(indices: np.ndarray, n: int) -> np.ndarray:
    # lexicographic order of (x_0, x_1, ...) equals numeric order of the reversed index
    out = np.zeros_like(indices)
    for i in range(n):
        out |= ((indices >> i) & 1) << (n - 1 - i)
    return out


def _bits_of(index: int, n: int) -> tuple[int, ...]:
    return tuple((index >> i) & 1 for i in range(n))


def exhaustive_optimize(
    p: PseudoBooleanPolynomial,
    cap: int = DEFAULT_CAP,
    keep_optima: int = 64,
    method: str = "table",
) -> SolveReport:
    """Global optimum by full enumeration.

    The representative optimum is the lexicographically smallest bit vector.
    ``method="gray"`` walks a Gray code with incremental delta evaluation in
    pure Python; it is much slower and exists as a cross-check.
    """
    n = p.num_vars
    if n > cap:
        raise SolverCapError(n, cap)
    start = time.perf_counter()
    if method == "gray":
        value, count, best_index, optima = _gray_optimize(p, keep_optima)
    elif method == "table":
        table = value_table(p)
        value = table.max() if p.sense == "max" else table.min()
        if table.dtype.kind == "f":
            hits = np.flatnonzero(np.isclose(table, value, rtol=0, atol=1e-9 * max(1.0, abs(value))))
        else:
            hits = np.flatnonzero(table == value)
        keys = _bit_reverse(hits, n)
        count = len(hits)
        best_index = int(hits[np.argmin(keys)])
        optima = None
        if count <= keep_optima:
            optima = [int(h) for h in hits[np.argsort(keys)]]
        value = value.item()
    else:
        raise ValueError(f"unknown method {method!r}")
    elapsed = time.perf_counter() - start
    return SolveReport(
        Assignment(_bits_of(best_index, n), value),
        count,
        1 << n,
        elapsed,
        None if optima is None else tuple(_bits_of(h, n) for h in optima),
    )


def _gray_optimize(p: PseudoBooleanPolynomial, keep_optima: int):
    n = p.num_vars
    touching: list[list[tuple[int, float]]] = [[] for _ in range(n)]
    for mono, coeff in p.terms.items():
        mask = 0
        for v in mono:
            mask |= 1 << v
        for v in mono:
            touching[v].append((mask & ~(1 << v), coeff))
    better = (lambda a, b: a > b) if p.sense == "max" else (lambda a, b: a < b)
    tol = 0 if p.is_integral() else 1e-9

    state = 0
    value = p.constant
    best, hits = value, [0]
    for step in range(1, 1 << n):
        flip = (step & -step).bit_length() - 1
        delta = sum(c for others, c in touching[flip] if state & others == others)
        if state >> flip & 1:
            value -= delta
        else:
            value += delta
        state ^= 1 << flip
        if better(value, best + (tol if p.sense == "max" else -tol)):
            best, hits = value, [state]
        elif abs(value - best) <= tol * max(1.0, abs(best)):
            hits.append(state)
    arr = np.array(hits, dtype=np.int64)
    keys = _bit_reverse(arr, n)
    order = np.argsort(keys)
    optima = [int(h) for h in arr[order]] if len(hits) <= keep_optima else None
    return best, len(hits), int(arr[order[0]]), optima


def milp_optimize(p: PseudoBooleanPolynomial, time_limit: Optional[float] = None) -> Assignment:
    """Exact optimum through a mixed-integer linear program (HiGHS).

    Every monomial of degree >= 2 gets a product variable ``z`` with
    ``z <= x_v`` and ``z >= sum(x) - (d - 1)``. Used for instances beyond
    the enumeration cap, e.g. quadratized polynomials with many ancillas.
    """
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import lil_matrix

    n = p.num_vars
    products = [m for m in p.terms if len(m) >= 2]
    total = n + len(products)
    c = np.zeros(total)
    for mono, coeff in p.terms.items():
        if len(mono) == 1:
            c[mono[0]] += coeff
    for j, mono in enumerate(products):
        c[n + j] = p.terms[mono]
    if p.sense == "max":
        c = -c
    rows = sum(len(m) + 1 for m in products)
    a = lil_matrix((max(rows, 1), total))
    lo = np.full(max(rows, 1), -np.inf)
    hi = np.full(max(rows, 1), np.inf)
    r = 0
    for j, mono in enumerate(products):
        z = n + j
        for v in mono:
            a[r, z], a[r, v] = 1, -1
            hi[r] = 0
            r += 1
        a[r, z] = 1
        for v in mono:
            a[r, v] = -1
        lo[r] = -(len(mono) - 1)
        r += 1
    constraints = [LinearConstraint(a.tocsr(), lo, hi)] if products else []
    options = {"mip_rel_gap": 0}
    if time_limit is not None:
        options["time_limit"] = time_limit
    res = milp(c, integrality=np.ones(total), bounds=Bounds(0, 1), constraints=constraints, options=options)
    if res.status != 0:
        raise RuntimeError(f"MILP solve failed: {res.message}")
    bits = tuple(int(round(x)) for x in res.x[:n])
    return Assignment(bits, p.evaluate(bits))


def _elimination_plan(p: PseudoBooleanPolynomial, max_width: int) -> tuple[list[int], list[int]]:
    """Conditioning set and elimination order for the interaction graph of ``p``.

    Variables are eliminated min-degree first. While the induced width of
    that order exceeds ``max_width``, the highest-degree variable is moved
    to the conditioning set (enumerated instead of eliminated).
    """
    base = {v: set() for v in range(p.num_vars)}
    for mono in p.terms:
        for v in mono:
            base[v].update(mono)
    for v in base:
        base[v].discard(v)
    conditioned: list[int] = []
    while True:
        adj = {v: base[v] - set(conditioned) for v in base if v not in conditioned}
        order, width, hub = [], 0, None
        while adj:
            v = min(adj, key=lambda u: (len(adj[u]), u))
            nbrs = adj.pop(v)
            if len(nbrs) + 1 > width:
                width = len(nbrs) + 1
            for u in nbrs:
                adj[u].discard(v)
                adj[u].update(nbrs - {u})
            order.append(v)
        if width <= max_width:
            return conditioned, order
        hub = max((v for v in base if v not in conditioned), key=lambda u: (len(base[u] - set(conditioned)), -u))
        conditioned.append(hub)


def eliminate_optimize(p: PseudoBooleanPolynomial, max_width: int = 20, max_conditioned: int = 16) -> Assignment:
    """Exact optimum by max-sum variable elimination with cutset conditioning.

    Monomials become tables over their variables and are eliminated in a
    fixed greedy order, keeping argmax tables for the backward pass. Cost is
    exponential in the induced width rather than the variable count, so
    sparse instances with many variables (e.g. quadratized ones) stay
    cheap; when the width is too large a few hub variables are enumerated.
    """
    conditioned, order = _elimination_plan(p, max_width)
    if len(conditioned) > max_conditioned:
        raise SolverCapError(len(conditioned), max_conditioned, "conditioning variables")
    maximize = p.sense == "max"
    best: Optional[Assignment] = None
    for values in itertools.product((0, 1), repeat=len(conditioned)):
        fixed = dict(zip(conditioned, values))
        bits = _eliminate(p, order, fixed)
        value = p.evaluate(bits)
        if best is None or (value > best.value if maximize else value < best.value):
            best = Assignment(bits, value)
    return best


def _eliminate(p: PseudoBooleanPolynomial, order: list[int], fixed: dict[int, int]) -> tuple[int, ...]:
    better = np.maximum if p.sense == "max" else np.minimum
    if not p.is_integral():
        dtype = np.float64
    else:
        dtype = np.int32 if sum(abs(c) for c in p.terms.values()) < 2**31 else np.int64
    factors: list[tuple[tuple[int, ...], np.ndarray]] = []
    for mono, coeff in p.terms.items():
        if any(fixed.get(v) == 0 for v in mono):
            continue
        scope = tuple(v for v in mono if v not in fixed)
        if scope:
            table = np.zeros((2,) * len(scope), dtype=dtype)
            table[(1,) * len(scope)] = coeff
            factors.append((scope, table))

    trail = []
    for v in order:
        inside = [(s, t) for s, t in factors if v in s]
        factors = [(s, t) for s, t in factors if v not in s]
        rest = tuple(sorted({u for s, _ in inside for u in s} - {v}))
        halves = []
        for value in (0, 1):
            total = np.zeros((2,) * len(rest), dtype=dtype)
            for scope, table in inside:
                part = table.take(value, axis=scope.index(v))
                total += part.reshape([2 if u in scope else 1 for u in rest])
            halves.append(total)
        trail.append((v, inside))
        if rest:
            factors.append((rest, better(halves[0], halves[1])))

    # backward pass: pick each variable's best value given the later ones
    bits = [0] * p.num_vars
    for v, value in fixed.items():
        bits[v] = value
    prefer_one = (lambda a, b: b > a) if p.sense == "max" else (lambda a, b: b < a)
    for v, inside in reversed(trail):
        scores = []
        for value in (0, 1):
            bits[v] = value
            scores.append(sum(t[tuple(bits[u] for u in s)] for s, t in inside))
        bits[v] = int(prefer_one(scores[0], scores[1]))
    return tuple(bits)


def _check_mode(mode: str):
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")


def verify_cokplex(cg: ConflictGraph, subset: Iterable[int], k: int, mode: str = ALLOW_BIJECTION) -> bool:
    """True iff every chosen vertex has at most ``k - 1`` chosen neighbours
    (and, when bijection conflicts are forbidden, no chosen bijection neighbour)."""
    _check_mode(mode)
    chosen = set(subset)
    sel = 0
    for v in chosen:
        if not 0 <= v < cg.n:
            raise ValueError(f"vertex {v} not in conflict graph")
        sel |= 1 << v
    bij = cg.kind_adjacency({BIJECTION}) if mode == FORBID_BIJECTION else None
    for v in chosen:
        if (cg.adjacency[v] & sel).bit_count() > k - 1:
            return False
        if bij is not None and bij[v] & sel:
            return False
    return True


def cokplex_oracle(
    cg: ConflictGraph, k: int, mode: str = ALLOW_BIJECTION, cap: int = ORACLE_CAP
) -> tuple[int, frozenset[int]]:
    """Maximum-weight co-k-plex by branch and bound.

    Vertices are branched in order of decreasing weight, include before
    exclude. A candidate that cannot be added now can never be added deeper
    in the branch (degrees only grow), so the bound is the current weight plus
    the weight of the still-addable candidates.
    """
    _check_mode(mode)
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    n = cg.n
    if n > cap:
        raise SolverCapError(n, cap, "conflict vertices")
    w = cg.weights
    adj = cg.adjacency
    bij = cg.kind_adjacency({BIJECTION}) if mode == FORBID_BIJECTION else [0] * n
    limit = k - 1
    deg = [0] * n
    best = [-1, 0]

    def addable(v: int, sel: int) -> bool:
        if bij[v] & sel:
            return False
        nb = adj[v] & sel
        if nb.bit_count() > limit:
            return False
        while nb:
            low = nb & -nb
            if deg[low.bit_length() - 1] >= limit:
                return False
            nb ^= low
        return True

    def search(cands: list[int], sel: int, weight: int):
        cands = [v for v in cands if addable(v, sel)]
        if weight > best[0]:
            best[0], best[1] = weight, sel
        if not cands or weight + sum(w[v] for v in cands) <= best[0]:
            return
        v, rest = cands[0], cands[1:]
        nb = adj[v] & sel
        touched = []
        while nb:
            low = nb & -nb
            u = low.bit_length() - 1
            deg[u] += 1
            touched.append(u)
            nb ^= low
        deg[v] = len(touched)
        search(rest, sel | (1 << v), weight + w[v])
        for u in touched:
            deg[u] -= 1
        deg[v] = 0
        search(rest, sel, weight)

    search(sorted(range(n), key=lambda v: (-w[v], v)), 0, 0)
    members = frozenset(i for i in range(n) if best[1] >> i & 1)
    return best[0], members
