"""
Pydantic records for the JSON files exchanged between stages.

Exact field elements are serialized as rationals ``{num, den}``, quadratic
elements as ``{a, b, D0}`` and cyclotomic elements as ``{N, coeffs}``; no
floating point value is ever persisted.
"""

import json
from enum import Enum
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

from pydantic import BaseModel, Field

from .exactmath import CycloElt, QuadElt


class Stratum(str, Enum):
    """The two Prym loci in genus three."""
    PRYM211 = "2-1-1"
    PRYM22 = "2-2"

    @property
    def zero_orders(self) -> tuple:
        return (2, 1, 1) if self is Stratum.PRYM211 else (2, 2)

    @property
    def label(self) -> str:
        return f"Prym({self.value.replace('-', ',')})"


class Crossing(str, Enum):
    """Horizontal cylinder crossed by the vertical relative-period saddle connection."""
    C1 = "C1"
    C2 = "C2"


class OutputFormat(str, Enum):
    JSON = "json"
    CSV = "csv"
    MD = "md"


class RationalModel(BaseModel):
    num: int
    den: int = Field(1, gt=0)

    @classmethod
    def of(cls, q: Union[int, Fraction]) -> 'RationalModel':
        q = Fraction(q)
        return cls(num=q.numerator, den=q.denominator)

    def value(self) -> Fraction:
        return Fraction(self.num, self.den)


class QuadModel(BaseModel):
    a: RationalModel
    b: RationalModel
    D0: int = Field(..., ge=1, description="squarefree radicand; 1 only for rationals")
    text: str = Field("", description="human readable form, ignored on load")

    @classmethod
    def of(cls, x: QuadElt) -> 'QuadModel':
        return cls(a=RationalModel.of(x.a), b=RationalModel.of(x.b), D0=x.D0, text=str(x))

    def value(self) -> QuadElt:
        return QuadElt(self.a.value(), self.b.value(), self.D0)


class CycloModel(BaseModel):
    N: int = Field(..., ge=1)
    coeffs: List[RationalModel]

    @classmethod
    def of(cls, x: CycloElt) -> 'CycloModel':
        return cls(N=x.N, coeffs=[RationalModel.of(c) for c in x.coeffs])

    def value(self) -> CycloElt:
        return CycloElt.from_coeffs(self.N, [c.value() for c in self.coeffs])


class SolutionRecord(BaseModel):
    """One solution (N, e_XY, e_U, r) of a torsion equation."""
    stratum: Stratum
    N: int = Field(..., ge=3)
    eXY: int = Field(..., ge=1)
    eU: int = Field(..., ge=1)
    r: QuadModel


class CuspTupleRecord(BaseModel):
    source: SolutionRecord
    k: int = Field(..., ge=-2, le=2)
    ell: int = Field(..., ge=-1, le=1)
    r2: QuadModel
    h2: QuadModel
    gamma: QuadModel


class GeometryRecord(BaseModel):
    """A pair of suitable directions with its intersection data."""
    stratum: Stratum
    horizontal: CuspTupleRecord
    vertical: CuspTupleRecord
    crossing: Crossing
    wZ1: QuadModel
    wZ2: QuadModel
    hZ1: QuadModel
    hZ2: QuadModel
    mred: List[List[int]] = Field(..., description="[[m11+m13, 2*m12], [m21, m22]]")
    full_matrices: List[List[List[int]]]


class OrigamiRecord(BaseModel):
    """Square-tiled surface given by right and up neighbour permutations."""
    n: int
    sigma_h: List[int]
    sigma_v: List[int]
    rho: List[int]
    lengths: List[int] = Field(default_factory=list, description="saddle connection lengths in squares")
    twists: List[int] = Field(default_factory=list, description="twists of C1 and C2 in squares")
    full_matrix: List[List[int]] = Field(default_factory=list)


class PrototypeRecord(BaseModel):
    w: int
    h: int
    t: int
    e: int
    D: int
    slit: QuadModel
    lambda_below_w: bool


class CandidateRecord(BaseModel):
    """A surface with an admissible vertical direction, reduced to prototype data."""
    mred: List[List[int]]
    diagram: int
    trace_field: int
    origami: OrigamiRecord
    prototype: Optional[PrototypeRecord] = None
    normalization_error: Optional[str] = None
    twist_zero: bool = False
    commensurable: Optional[bool] = None


class CellCount(BaseModel):
    """Counts for one (reduced matrix, separatrix diagram) cell."""
    mred: List[List[int]]
    diagram: int
    arithmetic_surfaces: int
    admissible: int
    prototype_classes: int
    unnormalizable: int
    after_commensurability: int


class CandidateReport(BaseModel):
    stratum: Stratum
    diagram_keys: List[str] = Field(default_factory=list)
    cells: List[CellCount] = Field(default_factory=list)
    candidates: List[CandidateRecord] = Field(default_factory=list)
    per_diagram_totals: List[int] = Field(default_factory=list)
    total_before_filter: int = 0
    total_after_filter: int = 0
    trace_fields: List[int] = Field(default_factory=list)
    notes: List[str] = Field(default_factory=list)


class StageManifest(BaseModel):
    """Cache entry describing how a stage output was produced."""
    stage: str
    input_hash: str
    parameters: Dict[str, Any]
    output_path: str
    tool_version: str


class SolverOptions(BaseModel):
    jobs: int = Field(1, ge=1)
    prefilter: bool = Field(True, description="modular consistency prefilter before exact solving")
    galois_reduction: bool = Field(False, description="solve only e_XY | N and expand Galois orbits")
    fields: Optional[List[int]] = Field(None, description="keep only these trace fields D0")
    progress: bool = False


class EnumerationOptions(BaseModel):
    jobs: int = Field(1, ge=1)
    diagram: Optional[int] = Field(None, ge=0, description="restrict to one diagram index")
    progress: bool = False


class PipelineOptions(BaseModel):
    stratum: Stratum
    jobs: int = Field(1, ge=1)
    cache_dir: Optional[str] = None
    with_identity_check: bool = False
    progress: bool = False


def dumps(payload: Union[BaseModel, Sequence[BaseModel], Dict[str, Any]]) -> str:
    """Canonical JSON text: sorted keys, two-space indent, trailing newline."""
    if isinstance(payload, BaseModel):
        data: Any = payload.model_dump(mode='json')
    elif isinstance(payload, dict):
        data = payload
    else:
        data = [item.model_dump(mode='json') for item in payload]
    return json.dumps(data, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def write_json(path: Union[str, Path], payload: Union[BaseModel, Sequence[BaseModel], Dict[str, Any]]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(payload), encoding="utf-8")
    return path


def read_records(path: Union[str, Path], model: type) -> List[Any]:
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    return [model.model_validate(item) for item in data]
