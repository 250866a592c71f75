"""Fast multipole acceleration: cluster tree and far-field operators."""

from .operators import (FmmConfig, FmmOperators, build_operators, choose_method, count_nonzeros,
                        fast_matvec, translation)
from .tree import (Cluster, ClusterTree, check_partition, cluster_root, cluster_tree, coverage,
                   farfield_pair, truncation_length)

__all__ = ["Cluster", "ClusterTree", "FmmConfig", "FmmOperators", "build_operators", "check_partition",
           "choose_method", "cluster_root", "cluster_tree", "count_nonzeros", "coverage", "fast_matvec",
           "farfield_pair", "translation", "truncation_length"]
