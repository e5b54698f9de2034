"""Brouwer degrees of circle/sphere self-maps and non-iterate certificates."""

from .certify import (
    BallProvenance,
    HomotopyReport,
    NonIterateCertificate,
    PowerWitness,
    Refusal,
    ball_certificate,
    certify_not_iterate,
    homotopy_check,
    is_perfect_power,
)
from .degree import (
    DegreeParams,
    DegreeResult,
    DistanceEstimate,
    degree,
    degree_quadrature,
    degree_winding,
    sup_distance,
)
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    DistanceTooLarge,
    DomainError,
    InvalidBlend,
    InvalidHomotopy,
    InvalidResolution,
    MapdegError,
    NearZeroVector,
    ParseError,
    ResolutionExceeded,
    SymbolicNumericMismatch,
)
from .expr import (
    Antipode,
    Blend,
    Compose,
    Conj,
    Id,
    Iterate,
    MapExpr,
    PerturbationField,
    Perturb,
    Pow,
    Rot,
    Rot3,
    Susp,
    dimension,
    eval_array,
    evaluate,
    parse,
    perturbation_field,
    render,
    symbolic_degree,
)
from .geometry import (
    SampleGrid,
    SpherePoint,
    TangentFrame,
    chordal_dist,
    make_grid,
    normalize,
    tangent_frame,
)

__version__ = "0.1.0"
