"""Motif discovery in large directed attributed graphs."""
from .discovery import CandidateMotif, DiscoveryConfig, DiscoveryResult, discover, refine, seed_candidates
from .dsl import MotifQuery, automorphism_count, canonical_form, parse_motif, read_motif
from .engine import (
    MatchResult,
    SearchTask,
    count_monomorphisms,
    enumerate_monomorphisms,
    expand_task,
    plan_order,
)
from .graph import PropertyDigraph, degree_sequences, load_graph, write_graph
from .nulls import NullEnsemble, SwapConfig, build_ensemble, xswap
from .stats import MotifStatistics, SignificanceCriteria, score_motif, topology_class

__version__ = "0.1.0"

__all__ = [
    "CandidateMotif", "DiscoveryConfig", "DiscoveryResult", "MatchResult", "MotifQuery",
    "MotifStatistics", "NullEnsemble", "PropertyDigraph", "SearchTask", "SignificanceCriteria",
    "SwapConfig", "automorphism_count", "build_ensemble", "canonical_form", "count_monomorphisms",
    "degree_sequences", "discover", "enumerate_monomorphisms", "expand_task", "load_graph",
    "parse_motif", "plan_order", "read_motif", "refine", "score_motif", "seed_candidates",
    "topology_class", "write_graph", "xswap",
]
