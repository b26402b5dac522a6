"""
Core components: exact arithmetic, the torsion solver, cusp geometry,
separatrix diagrams, origamis, flat surfaces and the pipeline.
"""

from .cuspgeom import CuspTuple, GeometryPair, ReducedMatrix, enumerate_geometries, full_matrix_splits
from .exactmath import CycloElt, QuadElt, UniPoly, galois_apply, min_poly_over_Q, rational_roots, resultant
from .exceptions import (IdentityCheckFailed, InvalidInputError, NormalizationError, PrymCurvesError,
                         RegressionMismatch)
from .flatsurface import (FlatSurface, Prototype, admissible_vertical, compute_prototype,
                          moduli_commensurability_check, realize_surface)
from .models import *
from .origami import Origami, enumerate_arithmetic_surfaces, square_counts
from .pipeline import run_pipeline
from .rou_solver import RelationSolution, enumerate_solutions, verify_resultant_identity
from .separatrix import SeparatrixDiagram, enumerate_separatrix_diagrams
from .stage_cache import StageCache

__all__ = [
    "CuspTuple",
    "GeometryPair",
    "ReducedMatrix",
    "enumerate_geometries",
    "full_matrix_splits",
    "CycloElt",
    "QuadElt",
    "UniPoly",
    "galois_apply",
    "min_poly_over_Q",
    "rational_roots",
    "resultant",
    "IdentityCheckFailed",
    "InvalidInputError",
    "NormalizationError",
    "PrymCurvesError",
    "RegressionMismatch",
    "FlatSurface",
    "Prototype",
    "admissible_vertical",
    "compute_prototype",
    "moduli_commensurability_check",
    "realize_surface",
    "Origami",
    "enumerate_arithmetic_surfaces",
    "square_counts",
    "run_pipeline",
    "RelationSolution",
    "enumerate_solutions",
    "verify_resultant_identity",
    "SeparatrixDiagram",
    "enumerate_separatrix_diagrams",
    "StageCache",
    "Stratum",
    "Crossing",
    "OutputFormat",
    "CandidateReport",
    "CandidateRecord",
    "CellCount",
    "StageManifest",
    "SolverOptions",
    "EnumerationOptions",
    "PipelineOptions",
]
