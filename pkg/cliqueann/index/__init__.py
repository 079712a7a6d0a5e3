from .builder import BuildParams, build, greedy_maximal_clique, mine_cliques
from .clique_index import BuildMeta, Clique, CliqueIndex, CliqueKind
from .metrics import audit_index, coverage_curve, effective_out_degree, index_stats
from .updates import IndexUpdater, delete_node, insert_node

__all__ = [
    "BuildParams",
    "BuildMeta",
    "Clique",
    "CliqueIndex",
    "CliqueKind",
    "build",
    "mine_cliques",
    "greedy_maximal_clique",
    "effective_out_degree",
    "coverage_curve",
    "index_stats",
    "audit_index",
    "IndexUpdater",
    "insert_node",
    "delete_node",
]
