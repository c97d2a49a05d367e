"""Robust persistent homology with distances to measures and sparse weighted Rips filtrations."""
from .metric import MetricSpace, MetricError, NeighborList, distance, hausdorff, knn
from .dtm import (
    DiscreteMeasure,
    Mass,
    WeightedPointSet,
    barycenter_and_energy,
    dP_eval,
    dtm_eval,
    dtm_measure,
    dtm_weights,
    power_distance_eval,
    witnessed_kdistance_eval,
)
from .transport import wasserstein2
from .filtration import Filtration
from .weighted_rips import build_rips, build_weighted_rips, edge_birth
from .sparse_rips import (
    GreedyPermutation,
    SparseParams,
    build_sparse_rips,
    build_sparse_weighted_rips,
    greedy_permutation,
    interleaving_constant,
    perturbation_s,
    sparse_edge_birth,
    sparse_rips_sizes,
)
from .persistence import PersistenceDiagram, betti_at, reduce
from .diagrams import bottleneck, log_bottleneck, snr
from .pipeline import ExperimentConfig, PipelineError, run_pipeline

__version__ = "0.1.0"
