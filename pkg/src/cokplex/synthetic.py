"""Seeded generators: random small molecules, a planted two-family corpus,
random conflict graphs and random polynomials."""

from __future__ import annotations

import itertools
import math
from typing import Optional

import numpy as np

from .conflict import BIJECTION, DISTANCE, EDGE_LABEL, USER, ConflictGraph
from .molgraph import MUTAGEN, NON_MUTAGEN, Atom, Bond, Molecule
from .qubo import PseudoBooleanPolynomial

C, N, O, H = 6, 7, 8, 1
BOND_LENGTH = 1.45


def _unit(rng: np.random.Generator) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


def _rotation(rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    return q * np.sign(np.diag(r))


class _Builder:
    def __init__(self, rng: np.random.Generator):
        self.rng = rng
        self.atoms: list[list] = []  # element, charge, position
        self.bonds: list[Bond] = []

    def atom(self, element: int, pos, charge: int = 0) -> int:
        self.atoms.append([element, charge, np.asarray(pos, dtype=float)])
        return len(self.atoms) - 1

    def bond(self, a: int, b: int, order: int = 1):
        self.bonds.append(Bond(a, b, order))

    def branch(self, parent: int, element: int, order: int = 1, charge: int = 0, direction=None) -> int:
        d = _unit(self.rng) if direction is None else np.asarray(direction, float) / np.linalg.norm(direction)
        child = self.atom(element, self.atoms[parent][2] + BOND_LENGTH * d, charge)
        self.bond(parent, child, order)
        return child

    def ring(self, size: int, centre, orders: Optional[list[int]] = None) -> list[int]:
        radius = BOND_LENGTH / (2 * math.sin(math.pi / size))
        ids = []
        for i in range(size):
            ang = 2 * math.pi * i / size
            ids.append(self.atom(C, np.asarray(centre) + radius * np.array([math.cos(ang), math.sin(ang), 0.0])))
        orders = orders or [1] * size
        for i in range(size):
            self.bond(ids[i], ids[(i + 1) % size], orders[i])
        return ids

    def molecule(self, name: str, label: Optional[str] = None, noise: float = 0.0, rotate: bool = True) -> Molecule:
        rot = _rotation(self.rng) if rotate else np.eye(3)
        atoms = []
        for element, charge, pos in self.atoms:
            p = rot @ pos + (self.rng.normal(scale=noise, size=3) if noise else 0)
            atoms.append(Atom(element, charge, tuple(round(float(c), 4) for c in p), element == H))
        return Molecule(tuple(atoms), tuple(self.bonds), name, label)


def random_molecule(rng: np.random.Generator, name: str = "", max_heavy: int = 5, ring_prob: float = 0.4) -> Molecule:
    """Small random molecule: an optional carbocycle plus a random heavy-atom tree."""
    b = _Builder(rng)
    free: list[int] = []
    if rng.random() < ring_prob:
        size = int(rng.choice([5, 6]))
        orders = [2, 1] * 3 if size == 6 and rng.random() < 0.5 else [1] * size
        ring = b.ring(size, (0.0, 0.0, 0.0), orders[:size])
        if rng.random() < 0.2:
            # fused neighbour sharing one edge
            a0, a1 = ring[0], ring[1]
            p0, p1 = b.atoms[a0][2], b.atoms[a1][2]
            out = (p0 + p1) / 2 * 2.2
            extra = [b.atom(C, out + _unit(rng) * 0.3) for _ in range(3)]
            b.bond(a1, extra[0])
            b.bond(extra[0], extra[1])
            b.bond(extra[1], extra[2])
            b.bond(extra[2], a0)
        free = [ring[int(rng.integers(len(ring)))]]
    else:
        free = [b.atom(int(rng.choice([C, C, N, O])), (0.0, 0.0, 0.0))]
    valence = {C: 4, N: 3, O: 2}
    used = {i: sum(bd.order for bd in b.bonds if i in (bd.a, bd.b)) for i in range(len(b.atoms))}
    for _ in range(int(rng.integers(1, max_heavy + 1))):
        parent = free[int(rng.integers(len(free)))]
        element = int(rng.choice([C, C, C, N, O]))
        room = min(valence[b.atoms[parent][0]] - used.get(parent, 0), valence[element])
        if room < 1:
            continue
        order = 2 if room >= 2 and rng.random() < 0.2 else 1
        child = b.branch(parent, element, order)
        used[parent] = used.get(parent, 0) + order
        used[child] = order
        free.append(child)
    if rng.random() < 0.15:
        host = free[int(rng.integers(len(free)))]
        if used.get(host, 0) < valence[b.atoms[host][0]]:
            b.branch(host, H)
    return b.molecule(name, noise=0.0)


def nitroarene(rng: np.random.Generator, name: str, noise: float = 0.05) -> Molecule:
    """Mutagen family: a Kekulé benzene carrying a nitro group and a small substituent."""
    b = _Builder(rng)
    ring = b.ring(6, (0.0, 0.0, 0.0), [2, 1, 2, 1, 2, 1])
    out0 = b.atoms[ring[0]][2]
    n = b.branch(ring[0], N, 1, +1, direction=out0)
    b.branch(n, O, 2, direction=out0 + np.array([0, 1.0, 0]))
    b.branch(n, O, 1, -1, direction=out0 + np.array([0, -1.0, 0]))
    kind = int(rng.integers(3))
    pos = ring[int(rng.choice([2, 3, 4]))]
    direction = b.atoms[pos][2]
    if kind == 0:
        b.branch(pos, C, direction=direction)
    elif kind == 1:
        b.branch(pos, N, direction=direction)
    else:
        n2 = b.branch(pos, N, 1, +1, direction=direction)
        b.branch(n2, O, 2, direction=direction + np.array([0, 0, 1.0]))
        b.branch(n2, O, 1, -1, direction=direction + np.array([0, 0, -1.0]))
    return b.molecule(name, MUTAGEN, noise)


def aliphatic_alcohol(rng: np.random.Generator, name: str, noise: float = 0.05) -> Molecule:
    """Non-mutagen family: a saturated carbon chain with hydroxyl/carbonyl groups."""
    b = _Builder(rng)
    length = int(rng.integers(3, 6))
    chain = [b.atom(C, (0.0, 0.0, 0.0))]
    for i in range(1, length):
        angle = 0.6 if i % 2 else -0.6
        chain.append(b.branch(chain[-1], C, direction=(1.0, angle, 0.0)))
    b.branch(chain[-1], O, direction=(1.0, 0.5, 0.0))
    if rng.random() < 0.5:
        b.branch(chain[int(rng.integers(1, length - 1))], O, 2, direction=(0.0, 0.0, 1.0))
    return b.molecule(name, NON_MUTAGEN, noise)


def planted_corpus(seed: int = 0, per_class: int = 20, noise: float = 0.05) -> list[Molecule]:
    rng = np.random.default_rng(seed)
    mols = [nitroarene(rng, f"mut{i:02d}", noise) for i in range(per_class)]
    mols += [aliphatic_alcohol(rng, f"non{i:02d}", noise) for i in range(per_class)]
    return mols


def random_conflict_graph(rng: np.random.Generator, n: int, density: float, max_weight: int = 5) -> ConflictGraph:
    """Random conflict graph laid over a real pairing grid.

    Pairs sharing a coordinate get bijection edges; further edges with random
    non-bijection kinds are added until roughly ``density`` of all vertex
    pairs are joined.
    """
    side = max(2, math.ceil(math.sqrt(n)) + 1)
    grid = [(i, j) for i in range(side) for j in range(side)]
    picks = rng.choice(len(grid), size=n, replace=False)
    pairs = sorted(grid[int(p)] for p in picks)
    weights = [int(w) for w in rng.integers(1, max_weight + 1, size=n)]
    edges = {}
    for i, j in itertools.combinations(range(n), 2):
        if pairs[i][0] == pairs[j][0] or pairs[i][1] == pairs[j][1]:
            edges[(i, j)] = BIJECTION
    free = [(i, j) for i, j in itertools.combinations(range(n), 2) if (i, j) not in edges]
    want = int(round(density * n * (n - 1) / 2)) - len(edges)
    if want > 0 and free:
        chosen = rng.choice(len(free), size=min(want, len(free)), replace=False)
        kinds = [EDGE_LABEL, DISTANCE, USER]
        for c in chosen:
            edges[free[int(c)]] = kinds[int(rng.integers(3))]
    return ConflictGraph.from_edges(weights, edges, pairs)


def random_polynomial(rng: np.random.Generator, num_vars: int, max_degree: int = 4, n_terms: int = 12, sense: str = "max") -> PseudoBooleanPolynomial:
    terms = {}
    for _ in range(n_terms):
        d = int(rng.integers(0, max_degree + 1))
        mono = tuple(sorted(int(v) for v in rng.choice(num_vars, size=min(d, num_vars), replace=False)))
        terms[mono] = terms.get(mono, 0) + int(rng.integers(-9, 10))
    return PseudoBooleanPolynomial(num_vars, terms, sense)
