"""Conflict graphs over candidate vertex pairings.

A conflict vertex is a tuple of vertices, one per compared graph, whose labels
match under a :class:`Layout`. Two conflict vertices are joined when they
cannot coexist in a common substructure: a coordinate is reused (bijection),
the edge labels disagree (absent edge counts as a label), or a geometric
distance differs by more than ``d_t``.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional, Sequence

import numpy as np

from .molgraph import ReducedGraph, VertexLabels

BIJECTION = "bijection"
EDGE_LABEL = "edge_label"
DISTANCE = "distance"
USER = "user"
EDGE_KINDS = (BIJECTION, EDGE_LABEL, DISTANCE, USER)

# mirrors the black/green/blue rendering of conflict pictures
DOT_COLORS = {BIJECTION: "black", DISTANCE: "green", EDGE_LABEL: "blue", USER: "gray"}

DEFAULT_TUPLE_CAP = 10**6


class CapExceeded(ValueError):
    """An instance is larger than a configured size cap."""


@dataclass(frozen=True)
class Layout:
    """Optional matching criteria plus the distance threshold.

    Atomic number, weight and (for atoms) implicit hydrogens always have to
    match; ``rh`` adds the ring hydrogen count, ``rb`` the in-ring bond
    orders, ``fc`` the formal charge and ``dn`` the degree signature.
    """

    rh: bool = False
    rb: bool = False
    fc: bool = False
    dn: bool = False
    d_t: float = math.inf

    def __post_init__(self):
        if math.isnan(self.d_t) or self.d_t < 0:
            raise ValueError(f"d_t must be >= 0, got {self.d_t}")

    @property
    def index(self) -> int:
        return 8 * self.rh + 4 * self.rb + 2 * self.fc + self.dn

    @classmethod
    def from_index(cls, index: int, d_t: float = math.inf) -> "Layout":
        if not 0 <= index <= 15:
            raise ValueError(f"layout index must be in [0, 15], got {index}")
        return cls(bool(index & 8), bool(index & 4), bool(index & 2), bool(index & 1), d_t)

    def with_dt(self, d_t: float) -> "Layout":
        return Layout(self.rh, self.rb, self.fc, self.dn, d_t)

    def labels_match(self, a: VertexLabels, b: VertexLabels) -> bool:
        if a.atomic_number != b.atomic_number or a.weight != b.weight or a.kind != b.kind:
            return False
        if (a.kind == "atom" or self.rh) and a.implicit_h != b.implicit_h:
            return False
        if self.rb and a.ring_bond_orders != b.ring_bond_orders:
            return False
        if self.fc and a.formal_charge != b.formal_charge:
            return False
        if self.dn and a.degree_signature != b.degree_signature:
            return False
        return True


@dataclass(frozen=True)
class ConflictGraph:
    pairs: tuple[tuple[int, ...], ...]
    weights: tuple[int, ...]
    edges: dict  # (i, j) with i < j -> kind
    orders: tuple[int, ...] = ()
    sources: tuple[str, ...] = ()

    @property
    def n(self) -> int:
        return len(self.pairs)

    @classmethod
    def from_edges(cls, weights: Sequence[int], edges: dict, pairs=None, orders=(), sources=()) -> "ConflictGraph":
        """Build directly from typed edges, e.g. for synthetic instances."""
        norm = {}
        for (i, j), kind in edges.items():
            if i == j:
                raise ValueError("self-loop in conflict graph")
            if kind not in EDGE_KINDS:
                raise ValueError(f"unknown edge kind {kind!r}")
            norm[(min(i, j), max(i, j))] = kind
        if pairs is None:
            pairs = tuple((i,) for i in range(len(weights)))
        return cls(tuple(pairs), tuple(weights), dict(sorted(norm.items())), tuple(orders), tuple(sources))

    @cached_property
    def adjacency(self) -> list[int]:
        """Neighbour bitmask per vertex."""
        masks = [0] * self.n
        for i, j in self.edges:
            masks[i] |= 1 << j
            masks[j] |= 1 << i
        return masks

    def kind_adjacency(self, kinds) -> list[int]:
        masks = [0] * self.n
        for (i, j), kind in self.edges.items():
            if kind in kinds:
                masks[i] |= 1 << j
                masks[j] |= 1 << i
        return masks

    def transposed(self) -> "ConflictGraph":
        """Swap the coordinates of two-graph pairs."""
        pairs = tuple(p[::-1] for p in self.pairs)
        return ConflictGraph(pairs, self.weights, dict(self.edges), self.orders[::-1], self.sources[::-1])

    def to_dict(self) -> dict:
        return {
            "sources": list(self.sources),
            "orders": list(self.orders),
            "vertices": [{"pair": list(p), "weight": w} for p, w in zip(self.pairs, self.weights)],
            "edges": [[i, j, kind] for (i, j), kind in self.edges.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"

    def to_dot(self) -> str:
        lines = ["graph conflict {"]
        for i, (p, w) in enumerate(zip(self.pairs, self.weights)):
            tag = ",".join(str(c) for c in p)
            lines.append(f'  {i} [label="({tag}) w={w}"];')
        for (i, j), kind in self.edges.items():
            lines.append(f"  {i} -- {j} [color={DOT_COLORS[kind]}];")
        lines.append("}")
        return "\n".join(lines) + "\n"


def edge_census(cg: ConflictGraph) -> dict[str, int]:
    counts = dict.fromkeys(EDGE_KINDS, 0)
    for kind in cg.edges.values():
        counts[kind] += 1
    return counts


Compatible = Callable[[Sequence[VertexLabels]], bool]
ExtraConflict = Callable[[tuple[int, ...], tuple[int, ...]], bool]


def conflict_vertices(
    graphs: Sequence[ReducedGraph],
    layout: Layout,
    compatible: Optional[Compatible] = None,
    cap: int = DEFAULT_TUPLE_CAP,
) -> list[tuple[int, ...]]:
    """Vertex tuples that pass label matching, in lexicographic order."""
    if len(graphs) < 2:
        raise ValueError("need at least two graphs")

    def too_many(count):
        return CapExceeded(
            f"conflict graph would have more than {cap} tuple vertices ({count}+); use a stricter layout"
        )

    if compatible is not None:
        out = []
        for tup in itertools.product(*(range(len(g)) for g in graphs)):
            if compatible([g.vertices[c] for g, c in zip(graphs, tup)]):
                out.append(tup)
                if len(out) > cap:
                    raise too_many(len(out))
        return out

    partial: list[tuple[int, ...]] = [(u,) for u in range(len(graphs[0]))]
    for gi in range(1, len(graphs)):
        grown = []
        for tup in partial:
            for v, lab in enumerate(graphs[gi].vertices):
                if all(layout.labels_match(graphs[gj].vertices[tup[gj]], lab) for gj in range(gi)):
                    grown.append(tup + (v,))
            if len(grown) > cap:
                raise too_many(len(grown))
        partial = grown
    return partial


def _edge_kinds(graphs: Sequence[ReducedGraph], tuples: np.ndarray, d_t: float, rows: slice) -> np.ndarray:
    """Kind codes for a block of rows: 0 none, 1 bijection, 2 edge label, 3 distance."""
    n_graphs = tuples.shape[1]
    block = tuples[rows]
    shape = (block.shape[0], tuples.shape[0])
    bij = np.zeros(shape, dtype=bool)
    for c in range(n_graphs):
        bij |= block[:, c][:, None] == tuples[:, c][None, :]
    codes = [g.edge_code_matrix() for g in graphs]
    label = np.zeros(shape, dtype=bool)
    for a, b in itertools.combinations(range(n_graphs), 2):
        la = codes[a][np.ix_(block[:, a], tuples[:, a])]
        lb = codes[b][np.ix_(block[:, b], tuples[:, b])]
        label |= la != lb
    dist = np.zeros(shape, dtype=bool)
    if not math.isinf(d_t):
        dists = [g.distance_matrix() for g in graphs]
        for a, b in itertools.combinations(range(n_graphs), 2):
            da = dists[a][np.ix_(block[:, a], tuples[:, a])]
            db = dists[b][np.ix_(block[:, b], tuples[:, b])]
            dist |= np.abs(da - db) > d_t
    out = np.zeros(shape, dtype=np.int8)
    out[dist] = 3
    out[label] = 2
    out[bij] = 1
    return out


_KIND_OF_CODE = {1: BIJECTION, 2: EDGE_LABEL, 3: DISTANCE}


def build_nway_conflict_graph(
    graphs: Sequence[ReducedGraph],
    layout: Layout,
    *,
    compatible: Optional[Compatible] = None,
    extra_conflict: Optional[ExtraConflict] = None,
    unit_weights: bool = False,
    cap: int = DEFAULT_TUPLE_CAP,
    tuples: Optional[list[tuple[int, ...]]] = None,
) -> ConflictGraph:
    """Conflict graph of ``n >= 2`` reduced graphs.

    An edge is recorded once, with priority bijection > edge_label > distance
    > user. ``extra_conflict`` adds user-defined conflicts between tuples.
    """
    if tuples is None:
        tuples = conflict_vertices(graphs, layout, compatible, cap)
    m = len(tuples)
    weights = tuple(1 if unit_weights else graphs[0].vertices[t[0]].weight for t in tuples)
    edges: dict[tuple[int, int], str] = {}
    if m:
        arr = np.asarray(tuples, dtype=np.intp)
        step = max(1, 2_000_000 // m)
        for start in range(0, m, step):
            kinds = _edge_kinds(graphs, arr, layout.d_t, slice(start, min(m, start + step)))
            ii, jj = np.nonzero(kinds)
            for i, j in zip((ii + start).tolist(), jj.tolist()):
                if i < j:
                    edges[(i, j)] = _KIND_OF_CODE[int(kinds[i - start, j])]
        if extra_conflict is not None:
            for i in range(m):
                for j in range(i + 1, m):
                    if (i, j) not in edges and extra_conflict(tuples[i], tuples[j]):
                        edges[(i, j)] = USER
    return ConflictGraph(
        tuple(tuples),
        weights,
        dict(sorted(edges.items())),
        tuple(len(g) for g in graphs),
        tuple(g.name for g in graphs),
    )


def build_conflict_graph(g: ReducedGraph, g2: ReducedGraph, layout: Layout, **kwargs) -> ConflictGraph:
    return build_nway_conflict_graph([g, g2], layout, **kwargs)


def max_distance_discrepancy(g: ReducedGraph, g2: ReducedGraph, layout: Layout) -> float:
    """Largest |d - d'| over candidate pairings; any larger d_t removes all distance edges."""
    tuples = conflict_vertices([g, g2], layout)
    if not tuples:
        return 0.0
    arr = np.asarray(tuples, dtype=np.intp)
    da = g.distance_matrix()[np.ix_(arr[:, 0], arr[:, 0])]
    db = g2.distance_matrix()[np.ix_(arr[:, 1], arr[:, 1])]
    return float(np.abs(da - db).max())
