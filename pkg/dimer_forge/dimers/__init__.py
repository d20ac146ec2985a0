"""Bipartite planar and toroidal maps and their Kasteleyn theory."""

from dimer_forge.dimers.degeneracy import DegeneracyReport, degeneracy_report
from dimer_forge.dimers.kasteleyn import (
    GaugeNormalization,
    KasteleynMatrix,
    Matching,
    MatchingEnumeration,
    adjugate,
    assign_signs,
    determinant,
    enumerate_matchings,
    gauge_normalize,
    kasteleyn_signs,
    partition_function,
    random_generic_weights,
)
from dimer_forge.dimers.planarmap import (
    BoundaryProfile,
    Dart,
    Edge,
    Face,
    PlanarMap,
    TorusMap,
    boundary_profile,
    dump_graph,
    faces,
    from_embedding,
    graph_from_dict,
    graph_to_dict,
    parse_graph,
    torus_from_embedding,
)

__all__ = [
    "BoundaryProfile",
    "Dart",
    "DegeneracyReport",
    "Edge",
    "Face",
    "GaugeNormalization",
    "KasteleynMatrix",
    "Matching",
    "MatchingEnumeration",
    "PlanarMap",
    "TorusMap",
    "adjugate",
    "assign_signs",
    "boundary_profile",
    "degeneracy_report",
    "determinant",
    "dump_graph",
    "enumerate_matchings",
    "faces",
    "from_embedding",
    "gauge_normalize",
    "graph_from_dict",
    "graph_to_dict",
    "kasteleyn_signs",
    "parse_graph",
    "partition_function",
    "random_generic_weights",
    "torus_from_embedding",
]
