"""Build T-graphs from gauge-normalized Kasteleyn matrices of plane maps."""

from dimer_forge.construct.flat import ParallelComponent, detect_flat_faces
from dimer_forge.construct.polygon import Polygon, choose_polygon, polygon_from_points
from dimer_forge.construct.psi import (
    BoundaryCuts,
    PsiDiagnostics,
    PsiMapping,
    boundary_cuts,
    build_psi,
)
from dimer_forge.construct.roundtrip import (
    RoundtripReport,
    roundtrip_check,
    tgraph_from_psi,
    white_faces,
)

__all__ = [
    "BoundaryCuts",
    "ParallelComponent",
    "Polygon",
    "PsiDiagnostics",
    "PsiMapping",
    "RoundtripReport",
    "boundary_cuts",
    "build_psi",
    "choose_polygon",
    "detect_flat_faces",
    "polygon_from_points",
    "roundtrip_check",
    "tgraph_from_psi",
    "white_faces",
]
