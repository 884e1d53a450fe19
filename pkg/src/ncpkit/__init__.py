"""Size-resolved community structure of weighted graphs."""
from .aclcut import PushParams, epsilon_grid, exact_ppr, push_approx_ppr
from .association import AssociationMatrix, accumulate, order_nodes, reweight_graph, sample_communities
from .compare import ComparisonGrid, compare_methods, spearman
from .egonet import egorank, k_ego_net
from .graph import Graph, GraphError, build_graph, read_edgelist, write_edgelist
from .ingest import Layer, MultilayerSpec, build_supra, read_vote_csv, vote_similarity_layer
from .lfr import InfeasibleError, LfrParams, PlantedPartition, generate_lfr, lfr_ncp_sweep, preset
from .movcut import MovParams, NegativeCurvature, alpha_grid, gamma_grid, movcut_rank
from .ncp import CoverageBudget, NcpCurve, SweepResult, crp, global_ncp, local_ncp, sweep
from .quality import (
    conductance,
    conductance_ratio,
    edge_expansion,
    graph_conductance,
    internal_conductance,
    lambda2,
    mean_clustering,
)
from .ranking import RankVector

__all__ = [
    "AssociationMatrix", "ComparisonGrid", "CoverageBudget", "Graph", "GraphError", "InfeasibleError",
    "Layer", "LfrParams", "MovParams", "MultilayerSpec", "NcpCurve", "NegativeCurvature", "PlantedPartition",
    "PushParams", "RankVector", "SweepResult", "accumulate", "alpha_grid", "build_graph", "build_supra",
    "compare_methods", "conductance", "conductance_ratio", "crp", "edge_expansion", "egorank", "epsilon_grid",
    "exact_ppr", "gamma_grid", "generate_lfr", "global_ncp", "graph_conductance", "internal_conductance",
    "k_ego_net", "lambda2", "lfr_ncp_sweep", "local_ncp", "mean_clustering", "movcut_rank", "order_nodes",
    "preset", "push_approx_ppr", "read_edgelist", "read_vote_csv", "reweight_graph", "sample_communities",
    "spearman", "sweep", "vote_similarity_layer", "write_edgelist",
]
