"""Graph similarity through maximum weighted co-k-plexes of conflict graphs."""

from .classify import ConfusionCounts, Entry, LabeledCorpus, cross_validate, knn_predict, metrics, sweep
from .conflict import Layout, build_conflict_graph, build_nway_conflict_graph, edge_census
from .molgraph import Molecule, ReducedGraph, detect_rings, implicit_hydrogens, parse_molecule_json, parse_molfile, reduce
from .qubo import PenaltyRule, PseudoBooleanPolynomial, build_cokplex_pbo, build_mis_qubo, export_qubo, quadratize
from .similarity import Fingerprint, fingerprint_similarity, similarity
from .solve import cokplex_oracle, eliminate_optimize, exhaustive_optimize, verify_cokplex

__version__ = "0.1.0"
