"""Molecule ingestion and the reduced labelled chemical graph.

A molecule is read from a V2000 MOL/SDF block or from JSON, its rings are
perceived as a minimum cycle basis, and every ring is contracted into one
weighted vertex. Rings that share atoms are linked by an ``artificial`` edge.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import jsonschema
import numpy as np

MUTAGEN = "mutagen"
NON_MUTAGEN = "non-mutagen"
CLASS_LABELS = (MUTAGEN, NON_MUTAGEN)

# reduced-graph edge labels and their integer codes (0 = no edge)
EDGE_LABELS = ("single", "double", "triple", "artificial")
EDGE_CODES = {"single": 1, "double": 2, "triple": 3, "artificial": 4}
BOND_LABELS = {1: "single", 2: "double", 3: "triple"}

_SYMBOLS = (
    "H He Li Be B C N O F Ne Na Mg Al Si P S Cl Ar K Ca Sc Ti V Cr Mn Fe Co Ni "
    "Cu Zn Ga Ge As Se Br Kr Rb Sr Y Zr Nb Mo Tc Ru Rh Pd Ag Cd In Sn Sb Te I Xe "
    "Cs Ba La Ce Pr Nd Pm Sm Eu Gd Tb Dy Ho Er Tm Yb Lu Hf Ta W Re Os Ir Pt Au Hg "
    "Tl Pb Bi Po At Rn Fr Ra Ac Th Pa U Np Pu Am Cm Bk Cf Es Fm Md No Lr Rf Db Sg "
    "Bh Hs Mt Ds Rg Cn Nh Fl Mc Lv Ts Og"
).split()
ATOMIC_NUMBERS = {sym: z for z, sym in enumerate(_SYMBOLS, start=1)}
ATOMIC_NUMBERS["D"] = ATOMIC_NUMBERS["T"] = 1
SYMBOLS = {z: sym for sym, z in ATOMIC_NUMBERS.items() if sym not in ("D", "T")}

# H C N O S P F Cl Br I
STANDARD_VALENCE = {1: 1, 6: 4, 7: 3, 8: 2, 16: 2, 15: 3, 9: 1, 17: 1, 35: 1, 53: 1}
# cations of these elements gain a bonding slot (ammonium, oxonium, ...)
ONIUM_ELEMENTS = frozenset({7, 15, 8, 16})

# V2000 legacy charge column codes
_LEGACY_CHARGE = {0: 0, 1: 3, 2: 2, 3: 1, 4: 0, 5: -1, 6: -2, 7: -3}


class MoleculeFormatError(ValueError):
    """Raised for unreadable molecule input; carries the offending line when known."""

    def __init__(self, message: str, line: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.source = source
        where = ":".join(str(p) for p in (source, line) if p is not None)
        super().__init__(f"{where}: {message}" if where else message)


@dataclass(frozen=True)
class Atom:
    element: int
    formal_charge: int = 0
    position: tuple[float, float, float] = (0.0, 0.0, 0.0)
    explicit_hydrogen: bool = False
    # per-atom override, only set by the JSON reader
    implicit_h: Optional[int] = None

    def __post_init__(self):
        if self.element < 1:
            raise ValueError(f"atomic number must be >= 1, got {self.element}")
        if len(self.position) != 3 or not all(math.isfinite(c) for c in self.position):
            raise ValueError(f"position must be 3 finite reals, got {self.position}")
        if self.implicit_h is not None and self.implicit_h < 0:
            raise ValueError("implicit_h must be nonnegative")


@dataclass(frozen=True)
class Bond:
    a: int
    b: int
    order: int = 1

    def __post_init__(self):
        if self.a == self.b:
            raise ValueError(f"bond joins atom {self.a} to itself")
        if self.order not in BOND_LABELS:
            raise ValueError(f"unsupported bond order {self.order}")


@dataclass(frozen=True)
class Molecule:
    atoms: tuple[Atom, ...]
    bonds: tuple[Bond, ...] = ()
    name: str = ""
    label: Optional[str] = None
    fingerprint: Optional[str] = None

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(self.atoms))
        object.__setattr__(self, "bonds", tuple(self.bonds))
        if not self.atoms:
            raise ValueError("molecule has no atoms")
        seen = set()
        n = len(self.atoms)
        for bond in self.bonds:
            if not (0 <= bond.a < n and 0 <= bond.b < n):
                raise ValueError(f"bond index out of range: ({bond.a}, {bond.b}) for {n} atoms")
            key = (min(bond.a, bond.b), max(bond.a, bond.b))
            if key in seen:
                raise ValueError(f"duplicate bond {key}")
            seen.add(key)
        if self.label is not None and self.label not in CLASS_LABELS:
            raise ValueError(f"unknown class label {self.label!r}")

    def neighbors(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.atoms]
        for bond in self.bonds:
            adj[bond.a].append(bond.b)
            adj[bond.b].append(bond.a)
        for row in adj:
            row.sort()
        return adj


# ---------------------------------------------------------------- parsing


def _element(symbol: str, line: int) -> int:
    z = ATOMIC_NUMBERS.get(symbol)
    if z is None:
        raise MoleculeFormatError(f"unknown element symbol {symbol!r}", line)
    return z


def parse_molfile(text: str, source: Optional[str] = None) -> Molecule:
    """Parse one V2000 MOL block (an SDF record is accepted too; data items
    after ``M  END`` are scanned for a ``label`` or ``fingerprint`` field)."""
    lines = text.splitlines()
    try:
        return _parse_molblock(lines, 0)
    except MoleculeFormatError as err:
        if source is not None and err.source is None:
            raise MoleculeFormatError(err.message, err.line, source) from None
        raise


def _parse_molblock(lines: list[str], offset: int) -> Molecule:
    # offset: 0-based index of the first record line in the enclosing file,
    # used so errors report file line numbers
    def lineno(i: int) -> int:
        return offset + i + 1

    if len(lines) < 4:
        raise MoleculeFormatError("truncated header: expected 3 header lines and a counts line", lineno(len(lines)))
    counts = lines[3]
    if "V3000" in counts:
        raise MoleculeFormatError("V3000 blocks are not supported", lineno(3))
    try:
        n_atoms = int(counts[0:3])
        n_bonds = int(counts[3:6])
    except ValueError:
        raise MoleculeFormatError(f"malformed counts line {counts!r}", lineno(3)) from None
    if n_atoms < 0 or n_bonds < 0:
        raise MoleculeFormatError(f"malformed counts line {counts!r}", lineno(3))
    overrun = next((i for i in range(4, min(len(lines), 4 + n_atoms + n_bonds)) if lines[i].startswith("M  ")), None)
    if len(lines) < 4 + n_atoms + n_bonds or overrun is not None:
        raise MoleculeFormatError(
            f"atom/bond count mismatch: counts line declares {n_atoms} atoms and {n_bonds} bonds",
            lineno(len(lines) if overrun is None else overrun),
        )

    raw_atoms = []
    for i in range(4, 4 + n_atoms):
        line = lines[i]
        try:
            x, y, z = float(line[0:10]), float(line[10:20]), float(line[20:30])
        except ValueError:
            raise MoleculeFormatError(f"malformed atom line {line!r}", lineno(i)) from None
        symbol = line[31:34].strip()
        if not symbol:
            raise MoleculeFormatError(f"atom line has no element symbol {line!r}", lineno(i))
        if symbol in ("A", "Q", "*", "L", "LP", "R", "R#"):
            raise MoleculeFormatError(f"query/pseudo atom {symbol!r} is not supported", lineno(i))
        element = _element(symbol, lineno(i))
        code_field = line[36:39].strip()
        code = int(code_field) if code_field.lstrip("-").isdigit() else 0
        raw_atoms.append([element, _LEGACY_CHARGE.get(code, 0), (x, y, z), symbol in ("H", "D", "T")])

    bonds = []
    seen = set()
    for i in range(4 + n_atoms, 4 + n_atoms + n_bonds):
        line = lines[i]
        try:
            a, b, order = int(line[0:3]), int(line[3:6]), int(line[6:9])
        except ValueError:
            raise MoleculeFormatError(f"malformed bond line {line!r}", lineno(i)) from None
        if not (1 <= a <= n_atoms and 1 <= b <= n_atoms):
            raise MoleculeFormatError(f"bond index out of range: ({a}, {b}) with {n_atoms} atoms", lineno(i))
        if a == b:
            raise MoleculeFormatError(f"bond joins atom {a} to itself", lineno(i))
        if order not in BOND_LABELS:
            raise MoleculeFormatError(f"unsupported bond code {order} (only 1, 2, 3 are accepted)", lineno(i))
        key = (min(a, b), max(a, b))
        if key in seen:
            raise MoleculeFormatError(f"duplicate bond {key}", lineno(i))
        seen.add(key)
        bonds.append(Bond(a - 1, b - 1, order))

    i = 4 + n_atoms + n_bonds
    chg_seen = False
    while i < len(lines) and not lines[i].startswith("M  END"):
        line = lines[i]
        if line.startswith("M  CHG"):
            if not chg_seen:
                # any CHG line supersedes the legacy column for the whole block
                for atom in raw_atoms:
                    atom[1] = 0
                chg_seen = True
            fields = line[6:].split()
            try:
                count = int(fields[0])
                pairs = [(int(fields[1 + 2 * j]), int(fields[2 + 2 * j])) for j in range(count)]
            except (ValueError, IndexError):
                raise MoleculeFormatError(f"malformed M  CHG line {line!r}", lineno(i)) from None
            for idx, charge in pairs:
                if not 1 <= idx <= n_atoms:
                    raise MoleculeFormatError(f"M  CHG atom index {idx} out of range", lineno(i))
                raw_atoms[idx - 1][1] = charge
        i += 1

    props = _data_items(lines[i + 1:]) if i < len(lines) else {}
    label = props.get("label")
    if label is not None and label not in CLASS_LABELS:
        raise MoleculeFormatError(f"unknown class label {label!r}", None)
    atoms = tuple(Atom(e, c, p, h) for e, c, p, h in raw_atoms)
    return Molecule(atoms, tuple(bonds), lines[0].strip(), label, props.get("fingerprint"))


def _data_items(lines: list[str]) -> dict[str, str]:
    props: dict[str, str] = {}
    key = None
    for line in lines:
        if line.startswith(">"):
            start, end = line.find("<"), line.find(">", 1)
            key = line[start + 1:end].strip().lower() if start != -1 and end > start else None
        elif key is not None and line.strip():
            props.setdefault(key, line.strip())
        elif not line.strip():
            key = None
    return props


def parse_sdf(text: str, source: Optional[str] = None) -> list[Molecule]:
    """Split an SDF file on ``$$$$`` and parse every record."""
    lines = text.splitlines()
    records: list[tuple[int, list[str]]] = []
    start = 0
    for i, line in enumerate(lines):
        if line.strip() == "$$$$":
            records.append((start, lines[start:i]))
            start = i + 1
    tail = lines[start:]
    if any(l.strip() for l in tail):
        records.append((start, tail))
    if not records:
        raise MoleculeFormatError("no molecule records found", 1, source)
    out = []
    for offset, block in records:
        try:
            out.append(_parse_molblock(block, offset))
        except MoleculeFormatError as err:
            raise MoleculeFormatError(err.message, err.line, source) from None
    return out


MOLECULE_SCHEMA = {
    "type": "object",
    "required": ["atoms"],
    "properties": {
        "name": {"type": "string"},
        "label": {"enum": list(CLASS_LABELS)},
        "atoms": {
            "type": "array",
            "minItems": 1,
            "items": {
                "type": "object",
                "required": ["z", "pos"],
                "properties": {
                    "z": {"type": "integer", "minimum": 1},
                    "charge": {"type": "integer"},
                    "pos": {"type": "array", "items": {"type": "number"}, "minItems": 3, "maxItems": 3},
                    "implicit_h": {"type": "integer", "minimum": 0},
                },
                "additionalProperties": False,
            },
        },
        "bonds": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["a", "b", "order"],
                "properties": {
                    "a": {"type": "integer", "minimum": 0},
                    "b": {"type": "integer", "minimum": 0},
                    "order": {"enum": [1, 2, 3]},
                },
                "additionalProperties": False,
            },
        },
        "fingerprint": {"type": "string", "pattern": "^[0-9a-fA-F]+$"},
    },
}


def molecule_from_dict(data: dict) -> Molecule:
    try:
        jsonschema.validate(data, MOLECULE_SCHEMA)
    except jsonschema.ValidationError as err:
        path = "/".join(str(p) for p in err.absolute_path)
        raise MoleculeFormatError(f"schema violation at '{path}': {err.message}") from None
    atoms = tuple(
        Atom(
            a["z"],
            a.get("charge", 0),
            tuple(float(c) for c in a["pos"]),
            a["z"] == 1,
            a.get("implicit_h"),
        )
        for a in data["atoms"]
    )
    try:
        bonds = tuple(Bond(b["a"], b["b"], b["order"]) for b in data.get("bonds", []))
        return Molecule(atoms, bonds, data.get("name", ""), data.get("label"), data.get("fingerprint"))
    except ValueError as err:
        raise MoleculeFormatError(str(err)) from None


def parse_molecule_json(text: str) -> Molecule:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise MoleculeFormatError(f"invalid JSON: {err.msg}", err.lineno) from None
    return molecule_from_dict(data)


def molecule_to_dict(m: Molecule) -> dict:
    out: dict = {"name": m.name}
    if m.label is not None:
        out["label"] = m.label
    atoms = []
    for a in m.atoms:
        entry: dict = {"z": a.element, "pos": list(a.position)}
        if a.formal_charge:
            entry["charge"] = a.formal_charge
        if a.implicit_h is not None:
            entry["implicit_h"] = a.implicit_h
        atoms.append(entry)
    out["atoms"] = atoms
    out["bonds"] = [{"a": b.a, "b": b.b, "order": b.order} for b in m.bonds]
    if m.fingerprint is not None:
        out["fingerprint"] = m.fingerprint
    return out


def read_molecules(path: str | Path) -> list[Molecule]:
    """Read every molecule in a ``.mol``/``.sdf``/``.json`` file."""
    path = Path(path)
    text = path.read_text()
    if not text.strip():
        raise MoleculeFormatError("empty file", 1, str(path))
    suffix = path.suffix.lower()
    if suffix == ".json":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as err:
            raise MoleculeFormatError(f"invalid JSON: {err.msg}", err.lineno, str(path)) from None
        items = data if isinstance(data, list) else [data]
        try:
            return [molecule_from_dict(d) for d in items]
        except MoleculeFormatError as err:
            raise MoleculeFormatError(err.message, err.line, str(path)) from None
    if suffix == ".sdf":
        return parse_sdf(text, str(path))
    return [parse_molfile(text, str(path))]


# ---------------------------------------------------------------- chemistry


def implicit_hydrogens(m: Molecule) -> list[int]:
    """Implicit hydrogen count per atom from the standard-valence table.

    Explicitly listed hydrogens count 0; a per-atom ``implicit_h`` from JSON
    input always wins.
    """
    bond_sum = [0] * len(m.atoms)
    for bond in m.bonds:
        bond_sum[bond.a] += bond.order
        bond_sum[bond.b] += bond.order
    counts = []
    missing = set()
    for i, atom in enumerate(m.atoms):
        if atom.implicit_h is not None:
            counts.append(atom.implicit_h)
            continue
        if atom.explicit_hydrogen:
            counts.append(0)
            continue
        valence = STANDARD_VALENCE.get(atom.element)
        if valence is None:
            missing.add(atom.element)
            counts.append(0)
            continue
        charge = atom.formal_charge
        if charge > 0 and atom.element not in ONIUM_ELEMENTS:
            charge = -charge
        counts.append(max(0, valence - bond_sum[i] + charge))
    if missing:
        names = ", ".join(SYMBOLS.get(z, str(z)) for z in sorted(missing))
        raise ValueError(f"no standard valence for element(s) {names}; supply implicit_h via JSON input")
    return counts


def detect_rings(m: Molecule) -> list[frozenset[int]]:
    """Minimum cycle basis of the bond graph, as atom-index sets.

    Horton candidates (one BFS tree per root, so paths are consistent) are
    sorted by length and accepted greedily while independent over GF(2).
    """
    n = len(m.atoms)
    adj = m.neighbors()
    edges = sorted((min(b.a, b.b), max(b.a, b.b)) for b in m.bonds)
    edge_id = {e: i for i, e in enumerate(edges)}

    comp = [-1] * n
    n_comp = 0
    for s in range(n):
        if comp[s] == -1:
            comp[s] = n_comp
            stack = [s]
            while stack:
                u = stack.pop()
                for v in adj[u]:
                    if comp[v] == -1:
                        comp[v] = n_comp
                        stack.append(v)
            n_comp += 1
    target = len(edges) - n + n_comp
    if target == 0:
        return []

    candidates = {}
    for root in range(n):
        parent = {root: -1}
        order = [root]
        for u in order:
            for v in adj[u]:
                if v not in parent:
                    parent[v] = u
                    order.append(v)

        def path(x):
            nodes = [x]
            while parent[nodes[-1]] != -1:
                nodes.append(parent[nodes[-1]])
            return nodes  # x ... root

        for x, y in edges:
            if x not in parent or parent[x] == y or parent[y] == x:
                continue
            px, py = path(x), path(y)
            if set(px) & set(py) != {root}:
                continue
            mask = 1 << edge_id[(x, y)]
            for p in (px, py):
                for u, v in zip(p, p[1:]):
                    mask |= 1 << edge_id[(min(u, v), max(u, v))]
            if mask not in candidates:
                candidates[mask] = frozenset(px) | frozenset(py)

    ranked = sorted(candidates.items(), key=lambda kv: (kv[0].bit_count(), sorted(kv[1]), kv[0]))
    basis: dict[int, int] = {}
    rings = []
    for mask, nodes in ranked:
        reduced = mask
        while reduced:
            top = reduced.bit_length() - 1
            if top not in basis:
                break
            reduced ^= basis[top]
        if reduced:
            basis[reduced.bit_length() - 1] = reduced
            rings.append(nodes)
            if len(rings) == target:
                break
    rings.sort(key=lambda r: sorted(r))
    return rings


# ---------------------------------------------------------------- reduced graph


@dataclass(frozen=True)
class VertexLabels:
    kind: str  # "atom" | "ring"
    atomic_number: int
    implicit_h: int
    formal_charge: int
    degree_signature: tuple[int, ...]
    ring_bond_orders: tuple[int, ...]
    weight: int
    position: tuple[float, float, float]

    def __post_init__(self):
        if self.weight < 1:
            raise ValueError("vertex weight must be >= 1")
        if self.kind == "atom" and (self.weight != 1 or self.ring_bond_orders):
            raise ValueError("atom vertices have weight 1 and no ring bonds")
        if self.kind == "ring" and (self.weight < 3 or self.atomic_number != 0):
            raise ValueError("ring vertices have atomic number 0 and weight >= 3")

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "atomic_number": self.atomic_number,
            "implicit_h": self.implicit_h,
            "formal_charge": self.formal_charge,
            "degree_signature": list(self.degree_signature),
            "ring_bond_orders": list(self.ring_bond_orders),
            "weight": self.weight,
            "position": list(self.position),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "VertexLabels":
        return cls(
            d["kind"],
            d["atomic_number"],
            d["implicit_h"],
            d["formal_charge"],
            tuple(d["degree_signature"]),
            tuple(d["ring_bond_orders"]),
            d["weight"],
            tuple(float(c) for c in d["position"]),
        )


@dataclass(frozen=True)
class ReducedGraph:
    vertices: tuple[VertexLabels, ...]
    edges: tuple[tuple[int, int, str], ...]
    member_atoms: tuple[tuple[int, ...], ...]
    name: str = ""
    label: Optional[str] = None
    fingerprint: Optional[str] = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        seen = set()
        n = len(self.vertices)
        for u, v, lab in self.edges:
            if u == v or not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"bad edge ({u}, {v})")
            key = (min(u, v), max(u, v))
            if key in seen:
                raise ValueError(f"parallel edge {key}")
            if lab not in EDGE_CODES:
                raise ValueError(f"unknown edge label {lab!r}")
            seen.add(key)

    def __len__(self) -> int:
        return len(self.vertices)

    def edge_label(self, u: int, v: int) -> Optional[str]:
        for a, b, lab in self.edges:
            if {a, b} == {u, v}:
                return lab
        return None

    def edge_code_matrix(self) -> np.ndarray:
        if "codes" not in self._cache:
            n = len(self.vertices)
            mat = np.zeros((n, n), dtype=np.int8)
            for u, v, lab in self.edges:
                mat[u, v] = mat[v, u] = EDGE_CODES[lab]
            self._cache["codes"] = mat
        return self._cache["codes"]

    def distance_matrix(self) -> np.ndarray:
        if "dist" not in self._cache:
            pos = np.array([v.position for v in self.vertices], dtype=float)
            diff = pos[:, None, :] - pos[None, :, :]
            self._cache["dist"] = np.sqrt((diff ** 2).sum(axis=-1))
        return self._cache["dist"]

    def to_dict(self) -> dict:
        out: dict = {"name": self.name}
        if self.label is not None:
            out["label"] = self.label
        out["vertices"] = [v.to_dict() for v in self.vertices]
        out["edges"] = [[u, v, lab] for u, v, lab in self.edges]
        out["member_atoms"] = [list(m) for m in self.member_atoms]
        if self.fingerprint is not None:
            out["fingerprint"] = self.fingerprint
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "ReducedGraph":
        return cls(
            tuple(VertexLabels.from_dict(v) for v in d["vertices"]),
            tuple((u, v, lab) for u, v, lab in d["edges"]),
            tuple(tuple(m) for m in d["member_atoms"]),
            d.get("name", ""),
            d.get("label"),
            d.get("fingerprint"),
        )

    def to_dot(self) -> str:
        lines = [f'graph "{self.name or "reduced"}" {{']
        for i, v in enumerate(self.vertices):
            tag = "ring" if v.kind == "ring" else SYMBOLS.get(v.atomic_number, str(v.atomic_number))
            shape = "box" if v.kind == "ring" else "ellipse"
            lines.append(f'  {i} [label="{tag} w={v.weight} h={v.implicit_h}", shape={shape}];')
        for u, v, lab in self.edges:
            style = "dashed" if lab == "artificial" else "solid"
            lines.append(f'  {u} -- {v} [label="{lab}", style={style}];')
        lines.append("}")
        return "\n".join(lines) + "\n"


def _centroid(points: Sequence[tuple[float, float, float]]) -> tuple[float, float, float]:
    k = len(points)
    return tuple(sum(p[d] for p in points) / k for d in range(3))


def reduce(m: Molecule) -> ReducedGraph:
    """Contract each ring of ``m`` to one weighted vertex."""
    rings = detect_rings(m)
    hs = implicit_hydrogens(m)
    in_rings: dict[int, list[int]] = {}
    for r, ring in enumerate(rings):
        for a in ring:
            in_rings.setdefault(a, []).append(r)

    incident: list[list[int]] = [[] for _ in m.atoms]
    for bond in m.bonds:
        incident[bond.a].append(bond.order)
        incident[bond.b].append(bond.order)

    vertices = []
    members = []
    for ring in rings:
        inner = sorted(b.order for b in m.bonds if b.a in ring and b.b in ring)
        exo = sorted(b.order for b in m.bonds if (b.a in ring) != (b.b in ring))
        vertices.append(
            VertexLabels(
                kind="ring",
                atomic_number=0,
                implicit_h=sum(hs[a] for a in ring),
                formal_charge=sum(m.atoms[a].formal_charge for a in ring),
                degree_signature=tuple(exo),
                ring_bond_orders=tuple(inner),
                weight=len(ring),
                position=_centroid([m.atoms[a].position for a in sorted(ring)]),
            )
        )
        members.append(tuple(sorted(ring)))

    vertex_of: dict[int, list[int]] = {a: list(rs) for a, rs in in_rings.items()}
    for a, atom in enumerate(m.atoms):
        if a in in_rings:
            continue
        vertex_of[a] = [len(vertices)]
        vertices.append(
            VertexLabels(
                kind="atom",
                atomic_number=atom.element,
                implicit_h=hs[a],
                formal_charge=atom.formal_charge,
                degree_signature=tuple(sorted(incident[a])),
                ring_bond_orders=(),
                weight=1,
                position=tuple(float(c) for c in atom.position),
            )
        )
        members.append((a,))

    edges: dict[tuple[int, int], str] = {}
    for r in range(len(rings)):
        for s in range(r + 1, len(rings)):
            if rings[r] & rings[s]:
                edges[(r, s)] = "artificial"
    for bond in m.bonds:
        if set(in_rings.get(bond.a, ())) & set(in_rings.get(bond.b, ())):
            continue  # internal to a ring
        for u in vertex_of[bond.a]:
            for v in vertex_of[bond.b]:
                if u != v:
                    edges.setdefault((min(u, v), max(u, v)), BOND_LABELS[bond.order])

    return ReducedGraph(
        tuple(vertices),
        tuple((u, v, lab) for (u, v), lab in sorted(edges.items())),
        tuple(members),
        m.name,
        m.label,
        m.fingerprint,
    )
