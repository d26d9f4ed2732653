"""Pseudo-Boolean objectives for independent sets and co-k-plexes.

``build_mis_qubo`` is the quadratic independent-set objective. The co-k-plex
objective subtracts one penalty monomial ``x_c * prod(x_s for s in S)`` per
star: a centre ``c`` with ``k`` conflict neighbours ``S``. These monomials
have degree ``k + 1``; :func:`quadratize` brings them back to degree two.
"""

from __future__ import annotations

import itertools
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .conflict import BIJECTION, CapExceeded, ConflictGraph

Monomial = tuple[int, ...]

ALLOW_BIJECTION = "allow_bijection"
FORBID_BIJECTION = "forbid_bijection"
MODES = (ALLOW_BIJECTION, FORBID_BIJECTION)

DEFAULT_TERM_CAP = 10**6


def _clean(c):
    if isinstance(c, float) and c.is_integer():
        return int(c)
    return c


@dataclass(frozen=True)
class PseudoBooleanPolynomial:
    """Multilinear polynomial over ``num_vars`` binary variables.

    ``terms`` maps sorted variable tuples to coefficients; ``()`` is the
    constant. Zero coefficients are dropped on construction.
    """

    num_vars: int
    terms: Mapping[Monomial, float] = field(default_factory=dict)
    sense: str = "max"
    notes: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.sense not in ("max", "min"):
            raise ValueError(f"sense must be 'max' or 'min', got {self.sense!r}")
        clean: dict[Monomial, float] = {}
        for mono, coeff in self.terms.items():
            key = tuple(sorted(mono))
            if len(set(key)) != len(key):
                raise ValueError(f"monomial {mono} repeats a variable")
            if key and not (0 <= key[0] and key[-1] < self.num_vars):
                raise ValueError(f"monomial {mono} out of range for {self.num_vars} variables")
            clean[key] = clean.get(key, 0) + coeff
        object.__setattr__(
            self, "terms", {k: _clean(v) for k, v in sorted(clean.items(), key=lambda kv: (len(kv[0]), kv[0])) if v != 0}
        )

    @property
    def degree(self) -> int:
        return max((len(m) for m in self.terms), default=0)

    @property
    def constant(self):
        return self.terms.get((), 0)

    def evaluate(self, bits: Sequence[int]):
        if len(bits) != self.num_vars:
            raise ValueError(f"expected {self.num_vars} bits, got {len(bits)}")
        return sum(c for mono, c in self.terms.items() if all(bits[v] for v in mono))

    def is_integral(self) -> bool:
        return all(isinstance(c, int) for c in self.terms.values())

    def dump(self) -> str:
        """One term per line, highest degree last."""
        head = f"{self.sense} over {self.num_vars} vars, {len(self.terms)} terms, degree {self.degree}"
        body = []
        for mono, coeff in self.terms.items():
            name = "*".join(f"x{v}" for v in mono) or "1"
            body.append(f"  {coeff:+} {name}")
        return "\n".join([head, *body])


@dataclass(frozen=True)
class PenaltyRule:
    """Penalty coefficient for a violated conflict structure.

    ``min_plus_one`` gives ``min(weights) + 1``; ``explicit`` uses ``value``,
    which must still exceed the smallest involved weight.
    """

    scheme: str = "min_plus_one"
    value: Optional[float] = None

    def __post_init__(self):
        if self.scheme not in ("min_plus_one", "explicit"):
            raise ValueError(f"unknown penalty scheme {self.scheme!r}")
        if self.scheme == "explicit" and self.value is None:
            raise ValueError("explicit penalty needs a value")

    def penalty(self, weights: Iterable[float]):
        low = min(weights)
        if self.scheme == "min_plus_one":
            return low + 1
        if not self.value > low:
            raise ValueError(f"explicit penalty {self.value} does not exceed min weight {low}")
        return self.value


def _check_weights(cg: ConflictGraph):
    for w in cg.weights:
        if not w > 0:
            raise ValueError(f"conflict vertex weights must be positive, got {w}")


def build_mis_qubo(cg: ConflictGraph, rule: PenaltyRule = PenaltyRule()) -> PseudoBooleanPolynomial:
    _check_weights(cg)
    terms: dict[Monomial, float] = {(i,): w for i, w in enumerate(cg.weights)}
    w = cg.weights
    for i, j in cg.edges:
        terms[(i, j)] = terms.get((i, j), 0) - rule.penalty((w[i], w[j]))
    return PseudoBooleanPolynomial(cg.n, terms, "max")


def _bits(mask: int) -> list[int]:
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def count_star_monomials(cg: ConflictGraph, k: int, mode: str = ALLOW_BIJECTION) -> int:
    adj = cg.adjacency if mode == ALLOW_BIJECTION else cg.kind_adjacency(set(cg.edges.values()) - {BIJECTION})
    if k == 1:
        return sum(m.bit_count() for m in adj) // 2
    return sum(math.comb(m.bit_count(), k) for m in adj)


def build_cokplex_pbo(
    cg: ConflictGraph,
    k: int,
    mode: str = ALLOW_BIJECTION,
    rule: PenaltyRule = PenaltyRule(),
    *,
    induced: bool = False,
    max_terms: int = DEFAULT_TERM_CAP,
) -> PseudoBooleanPolynomial:
    """Maximum weighted co-k-plex objective (maximize).

    Every centre ``c`` and every ``k``-subset ``S`` of its neighbours adds
    ``-a * x_c * prod(x_S)`` with ``a = min(w over c and S) + 1``; terms on
    the same monomial accumulate. For ``k == 1`` each edge is one star.

    In ``forbid_bijection`` mode stars are taken over non-bijection edges only
    and each bijection edge carries its own quadratic penalty.

    ``induced=True`` keeps only stars whose leaves are pairwise non-adjacent,
    i.e. the literal "induces a star" reading. It under-penalizes cliques
    (a triangle at ``k=2`` is not penalized) and is kept for comparison only.
    """
    if k < 1:
        raise ValueError(f"k must be a positive integer, got {k}")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}")
    _check_weights(cg)
    n_terms = count_star_monomials(cg, k, mode)
    if n_terms > max_terms:
        raise CapExceeded(f"co-{k}-plex objective needs {n_terms} penalty monomials, above the cap of {max_terms}")

    w = cg.weights
    terms: dict[Monomial, float] = {(i,): wi for i, wi in enumerate(w)}

    def add(mono, coeff):
        key = tuple(sorted(mono))
        terms[key] = terms.get(key, 0) + coeff

    if mode == FORBID_BIJECTION:
        for (i, j), kind in cg.edges.items():
            if kind == BIJECTION:
                add((i, j), -rule.penalty((w[i], w[j])))
        adj = cg.kind_adjacency(set(cg.edges.values()) - {BIJECTION})
    else:
        adj = cg.adjacency

    if k == 1:
        for c in range(cg.n):
            for s in _bits(adj[c] >> (c + 1) << (c + 1)):
                add((c, s), -rule.penalty((w[c], w[s])))
    else:
        for c in range(cg.n):
            for leaves in itertools.combinations(_bits(adj[c]), k):
                if induced and any(adj[a] >> b & 1 for a, b in itertools.combinations(leaves, 2)):
                    continue
                add((c, *leaves), -rule.penalty([w[c], *(w[s] for s in leaves)]))

    notes = {}
    if k >= cg.n:
        notes["vacuous"] = True
        warnings.warn(f"k={k} >= |V_c|={cg.n}: the co-k-plex degree bound is vacuous", stacklevel=2)
    return PseudoBooleanPolynomial(cg.n, terms, "max", notes)


@dataclass(frozen=True)
class QuadratizationResult:
    poly: PseudoBooleanPolynomial
    ancilla_map: dict[int, tuple[int, int]]
    penalty_weight: float

    def project(self, bits: Sequence[int]) -> tuple[int, ...]:
        """Drop ancilla bits, keeping the source variables."""
        n = self.poly.num_vars - len(self.ancilla_map)
        return tuple(bits[:n])


def quadratize(p: PseudoBooleanPolynomial) -> QuadratizationResult:
    """Reduce ``p`` to degree two by pairwise substitution.

    Repeatedly picks the variable pair that occurs in the most monomials of
    degree >= 3 (ties: smallest ids), replaces it by a fresh ancilla ``y`` and
    adds ``M * (u*v - 2*u*y - 2*v*y + 3*y)`` with ``M = 1 + sum|coeffs of p|``.
    The penalty is zero iff ``y == u*v`` and at least ``M`` otherwise. The
    result keeps the sense of ``p`` (the penalty is subtracted when
    maximizing), so optimal values are directly comparable.
    """
    if p.degree <= 2:
        return QuadratizationResult(p, {}, 0)
    big_m = 1 + sum(abs(c) for c in p.terms.values())
    sign = -1 if p.sense == "max" else 1
    terms = dict(p.terms)
    n = p.num_vars
    ancillas: dict[int, tuple[int, int]] = {}

    while True:
        high = [m for m in terms if len(m) >= 3]
        if not high:
            break
        freq: Counter = Counter()
        for mono in high:
            freq.update(itertools.combinations(mono, 2))
        top = max(freq.values())
        u, v = min(pair for pair, count in freq.items() if count == top)
        y = n
        n += 1
        ancillas[y] = (u, v)
        for mono in high:
            if u in mono and v in mono:
                coeff = terms.pop(mono)
                new = tuple(x for x in mono if x != u and x != v) + (y,)
                terms[new] = terms.get(new, 0) + coeff
        for mono, coeff in (((u, v), 1), ((u, y), -2), ((v, y), -2), ((y,), 3)):
            terms[mono] = terms.get(mono, 0) + sign * big_m * coeff
    return QuadratizationResult(PseudoBooleanPolynomial(n, terms, p.sense), ancillas, big_m)


def export_qubo(p: PseudoBooleanPolynomial, ancilla_map: Optional[Mapping[int, tuple[int, int]]] = None) -> dict:
    """Linear vector plus sorted upper-triangular ``[i, j, c]`` entries."""
    if p.degree > 2:
        raise ValueError(f"export needs degree <= 2, polynomial has degree {p.degree}")
    linear = [0] * p.num_vars
    quadratic = []
    for mono, coeff in p.terms.items():
        if len(mono) == 1:
            linear[mono[0]] = coeff
        elif len(mono) == 2:
            quadratic.append([mono[0], mono[1], coeff])
    quadratic.sort()
    out = {
        "num_vars": p.num_vars,
        "sense": p.sense,
        "constant": p.constant,
        "linear": linear,
        "quadratic": quadratic,
    }
    if ancilla_map:
        out["ancilla_map"] = {str(y): list(pair) for y, pair in sorted(ancilla_map.items())}
    return out


def import_qubo(data: Mapping) -> PseudoBooleanPolynomial:
    terms: dict[Monomial, float] = {}
    if data.get("constant"):
        terms[()] = data["constant"]
    for i, c in enumerate(data["linear"]):
        if c:
            terms[(i,)] = c
    for i, j, c in data["quadratic"]:
        if i >= j:
            raise ValueError(f"quadratic entry ({i}, {j}) is not upper-triangular")
        terms[(i, j)] = terms.get((i, j), 0) + c
    return PseudoBooleanPolynomial(data["num_vars"], terms, data.get("sense", "max"))


def dumps_qubo(p: PseudoBooleanPolynomial, **extra) -> str:
    return json.dumps({**export_qubo(p), **extra}, indent=1) + "\n"
