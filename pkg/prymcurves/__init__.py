"""
prymcurves

Exact search for primitive Teichmüller curves in the genus three Prym loci
Prym(2,1,1) and Prym(2,2): torsion equations in roots of unity, cusp
geometries, square-tiled candidates and prototype normal forms.
"""

__version__ = "1.0.0"
__author__ = "prymcurves developers"

from .core import (
    CandidateReport, CycloElt, FlatSurface, GeometryPair, Origami, Prototype, QuadElt, ReducedMatrix,
    RelationSolution, SeparatrixDiagram, StageCache, Stratum, run_pipeline,
)

__all__ = [
    "CandidateReport",
    "CycloElt",
    "FlatSurface",
    "GeometryPair",
    "Origami",
    "Prototype",
    "QuadElt",
    "ReducedMatrix",
    "RelationSolution",
    "SeparatrixDiagram",
    "StageCache",
    "Stratum",
    "run_pipeline",
]
