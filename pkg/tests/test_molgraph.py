import json

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from cokplex.molgraph import (
    MoleculeFormatError,
    ReducedGraph,
    detect_rings,
    implicit_hydrogens,
    molecule_from_dict,
    molecule_to_dict,
    parse_molecule_json,
    parse_molfile,
    parse_sdf,
    read_molecules,
    reduce,
)
from cokplex.synthetic import random_molecule

from conftest import DATA, make_molecule

TWO_CARBONS = """cc
  test

  2  1  0  0  0  0  0  0  0  0999 V2000
    0.0000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
    1.5000    0.0000    0.0000 C   0  0  0  0  0  0  0  0  0  0  0  0
  1  2  1  0
M  END
"""

GOLDEN = ["nitromethane", "methanol_explicit_h", "naphthol", "pyridinium"]


# ---------------------------------------------------------------- parsing


def test_two_atom_block():
    m = parse_molfile(TWO_CARBONS)
    assert len(m.atoms) == 2 and len(m.bonds) == 1
    assert m.bonds[0].order == 1
    assert m.atoms[1].position == (1.5, 0.0, 0.0)


def test_charge_line_sets_formal_charge():
    text = TWO_CARBONS.replace("M  END", "M  CHG  1   1  -1\nM  END")
    m = parse_molfile(text)
    assert [a.formal_charge for a in m.atoms] == [-1, 0]


def test_charge_line_supersedes_legacy_column():
    m = read_molecules(DATA / "nitromethane.mol")[0]
    assert [a.formal_charge for a in m.atoms] == [0, 1, 0, -1]


def test_legacy_charge_column():
    m = read_molecules(DATA / "pyridinium.mol")[0]
    assert m.atoms[0].formal_charge == 1


def test_bond_index_out_of_range():
    lines = TWO_CARBONS.splitlines()
    lines[6] = "  1  7  1  0"
    with pytest.raises(MoleculeFormatError, match="bond index out of range") as err:
        parse_molfile("\n".join(lines))
    assert err.value.line == 7


@pytest.mark.parametrize(
    "edit, message",
    [
        (lambda t: t.replace("  1  2  1  0", "  1  2  4  0"), "unsupported bond code"),
        (lambda t: t.replace(" C   0", " Xx  0", 1), "unknown element"),
        (lambda t: t.replace("  2  1  0", "  3  1  0", 1), "count mismatch"),
        (lambda t: t.replace("V2000", "V3000"), "V3000"),
        (lambda t: "\n".join(t.splitlines()[:2]), "truncated"),
    ],
)
def test_malformed_blocks(edit, message):
    with pytest.raises(MoleculeFormatError, match=message):
        parse_molfile(edit(TWO_CARBONS))


def test_error_reports_source():
    with pytest.raises(MoleculeFormatError) as err:
        parse_molfile(TWO_CARBONS.replace("  1  2  1  0", "  1  1  1  0"), source="x.mol")
    assert "x.mol" in str(err.value)


def test_sdf_records_and_labels():
    mols = parse_sdf((DATA / "small.sdf").read_text())
    assert [m.name for m in mols] == ["nitromethane", "methanol", "pyridinium"]
    assert [m.label for m in mols] == ["mutagen", "non-mutagen", "non-mutagen"]


def test_empty_file_is_an_error(tmp_path):
    path = tmp_path / "empty.sdf"
    path.write_text("")
    with pytest.raises(MoleculeFormatError):
        read_molecules(path)


def test_json_minimal_molecule():
    m = parse_molecule_json('{"atoms":[{"z":6,"pos":[0,0,0]}],"bonds":[]}')
    assert len(m.atoms) == 1 and m.atoms[0].element == 6


def test_json_missing_pos_is_schema_error():
    with pytest.raises(MoleculeFormatError):
        parse_molecule_json('{"atoms":[{"z":6}],"bonds":[]}')


def test_json_label():
    m = parse_molecule_json('{"atoms":[{"z":6,"pos":[0,0,0]}],"bonds":[],"label":"mutagen"}')
    assert m.label == "mutagen"


def test_json_round_trip():
    m = read_molecules(DATA / "naphthol.mol")[0]
    assert molecule_from_dict(json.loads(json.dumps(molecule_to_dict(m)))) == m


# ---------------------------------------------------------------- chemistry


def test_methane_with_explicit_hydrogens():
    atoms = [(6, 0, (0, 0, 0))] + [(1, 0, (i, 1, 0)) for i in range(4)]
    m = make_molecule(atoms, [(0, i, 1) for i in range(1, 5)])
    assert implicit_hydrogens(m)[0] == 0


def test_isolated_carbon():
    assert implicit_hydrogens(make_molecule([(6, 0, (0, 0, 0))], [])) == [4]


def test_oxygen_with_one_bond():
    m = make_molecule([(6, 0, (0, 0, 0)), (8, 0, (1.4, 0, 0))], [(0, 1, 1)])
    assert implicit_hydrogens(m)[1] == 1


@pytest.mark.parametrize(
    "element, charge, bonds, expected",
    [
        (7, 1, 1, 3),  # ammonium-like N+
        (7, 1, 4, 0),  # nitro N+
        (8, -1, 1, 0),  # alkoxide
        (6, -1, 3, 0),  # carbanion
        (6, 1, 3, 0),  # carbocation
        (8, 1, 3, 0),  # oxonium
    ],
)
def test_charged_valence(element, charge, bonds, expected):
    atoms = [(element, charge, (0, 0, 0))] + [(6, 0, (i + 1, 0, 0)) for i in range(bonds)]
    m = make_molecule(atoms, [(0, i + 1, 1) for i in range(bonds)])
    assert implicit_hydrogens(m)[0] == expected


def test_json_implicit_h_override():
    m = parse_molecule_json('{"atoms":[{"z":6,"pos":[0,0,0],"implicit_h":2}],"bonds":[]}')
    assert implicit_hydrogens(m) == [2]


def test_benzene_ring(benzene):
    assert detect_rings(benzene) == [frozenset(range(6))]


def test_butane_has_no_rings():
    m = make_molecule([(6, 0, (i, 0, 0)) for i in range(4)], [(0, 1, 1), (1, 2, 1), (2, 3, 1)])
    assert detect_rings(m) == []


def test_naphthalene_rings():
    m = read_molecules(DATA / "naphthol.mol")[0]
    rings = detect_rings(m)
    assert [len(r) for r in rings] == [6, 6]
    assert len(rings[0] & rings[1]) == 2


def _nx_graph(m):
    g = nx.Graph()
    g.add_nodes_from(range(len(m.atoms)))
    g.add_edges_from((b.a, b.b) for b in m.bonds)
    return g


@given(st.integers(0, 2**32 - 1))
def test_ring_basis_matches_networkx(seed):
    m = random_molecule(np.random.default_rng(seed), max_heavy=8, ring_prob=0.8)
    ours = sorted(len(r) for r in detect_rings(m))
    theirs = sorted(len(c) for c in nx.minimum_cycle_basis(_nx_graph(m)))
    assert ours == theirs


def test_cubane_like_basis_size():
    # cube graph: 12 edges, 8 nodes, basis size 5 (all 4-cycles)
    cube = nx.hypercube_graph(3)
    index = {v: i for i, v in enumerate(cube.nodes)}
    m = make_molecule([(6, 0, (i, 0, 0)) for i in range(8)], [(index[a], index[b], 1) for a, b in cube.edges])
    rings = detect_rings(m)
    assert len(rings) == 5 and all(len(r) == 4 for r in rings)


# ---------------------------------------------------------------- reduction


def test_benzene_reduces_to_one_vertex(benzene):
    g = reduce(benzene)
    assert len(g) == 1 and g.vertices[0].weight == 6 and g.edges == ()


def test_naphthalene_artificial_edge():
    g = reduce(read_molecules(DATA / "naphthol.mol")[0])
    ring_edges = [e for e in g.edges if e[0] < 2 and e[1] < 2]
    assert ring_edges == [(0, 1, "artificial")]


def test_toluene(toluene):
    g = reduce(toluene)
    assert [(v.kind, v.weight) for v in g.vertices] == [("ring", 6), ("atom", 1)]
    assert g.edges == ((0, 1, "single"),)


def test_spiro_rings_share_an_atom():
    # two 3-rings sharing atom 0
    m = make_molecule([(6, 0, (i, i % 2, 0)) for i in range(5)], [(0, 1, 1), (1, 2, 1), (2, 0, 1), (0, 3, 1), (3, 4, 1), (4, 0, 1)])
    g = reduce(m)
    assert len(g) == 2 and g.edges == ((0, 1, "artificial"),)


@pytest.mark.parametrize("name", GOLDEN)
def test_golden_reduced_graph(name):
    """Bit-exact serialized reduction of hand-written fixtures."""
    g = reduce(read_molecules(DATA / f"{name}.mol")[0])
    golden = (DATA / f"{name}.reduced.json").read_text()
    assert g.to_json() == golden
    assert ReducedGraph.from_dict(json.loads(golden)).to_json() == golden


@given(st.integers(0, 2**32 - 1))
def test_reduction_invariants(seed):
    m = random_molecule(np.random.default_rng(seed), max_heavy=8)
    g = reduce(m)
    covered = sorted(a for members in g.member_atoms for a in members)
    assert set(covered) == set(range(len(m.atoms)))
    assert sum(v.weight for v in g.vertices if v.kind == "atom") + sum(
        v.weight for v in g.vertices if v.kind == "ring"
    ) >= len(m.atoms)
    for u, v, _ in g.edges:
        assert 0 <= u < v < len(g)
    assert ReducedGraph.from_dict(json.loads(g.to_json())).to_json() == g.to_json()


def test_dot_export(toluene):
    dot = reduce(toluene).to_dot()
    assert dot.startswith('graph "toluene"') and "0 -- 1" in dot
