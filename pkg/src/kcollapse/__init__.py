"""Targeted k-node collapse: core decomposition, modified onion layers and MONA."""
from .attack import (AttackError, AttackResult, IterationRecord, PrunedFollowers,
                     degree_attack, greedy_followers_attack, mona, optimal, prune_edge,
                     random_attack)
from .cores import (CoreInfo, FollowerSet, KCoreView, candidate_p, core_numbers, followers,
                    followers_recompute, k_core)
from .graph import (Graph, MissingEdgeError, ParseError, ParseOptions, adjacency_queries,
                    induced_subgraph, load_edge_list, remove_edges, to_edge_list_text)
from .harness import (ConfigError, ExperimentConfig, Report, emit_report, run_experiment,
                      select_targets)
from .onion import (BacktrackTree, CandidateH, OnionLayers, TargetError, backtrack_tree,
                    candidate_h, mod_layers)

__version__ = "0.1.0"
