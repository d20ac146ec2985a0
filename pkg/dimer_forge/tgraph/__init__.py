"""T-graphs, their derived dimer graphs and the matching/forest correspondence."""

from dimer_forge.tgraph.correspondence import (
    CorrespondenceReport,
    DualityReport,
    MarkedMatching,
    SpanningForest,
    TorusCorrespondenceReport,
    duality_check,
    enumerate_forests,
    enumerate_marked_matchings,
    forest_from_marked_matching,
    marked_matching_from_forest,
    torus_correspondence_check,
    verify_measure_preservation,
)
from dimer_forge.tgraph.tgraph import (
    DerivedDimerGraph,
    DimerEdge,
    Move,
    Segment,
    Subsegment,
    TFace,
    TGraph,
    TransitionChain,
    TVertex,
    build_from_segments,
    derived_dimer_graph,
    dump_segments,
    load_segments,
    martingale_residual,
    parse_tgraph,
    roots_reachable,
    segments_from_dict,
    stability_radius,
    transition_chain,
)

__all__ = [
    "CorrespondenceReport",
    "DerivedDimerGraph",
    "DimerEdge",
    "DualityReport",
    "MarkedMatching",
    "Move",
    "Segment",
    "SpanningForest",
    "Subsegment",
    "TFace",
    "TGraph",
    "TVertex",
    "TorusCorrespondenceReport",
    "TransitionChain",
    "build_from_segments",
    "derived_dimer_graph",
    "dump_segments",
    "duality_check",
    "enumerate_forests",
    "enumerate_marked_matchings",
    "forest_from_marked_matching",
    "load_segments",
    "marked_matching_from_forest",
    "martingale_residual",
    "parse_tgraph",
    "roots_reachable",
    "segments_from_dict",
    "stability_radius",
    "torus_correspondence_check",
    "transition_chain",
    "verify_measure_preservation",
]
