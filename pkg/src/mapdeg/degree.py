"""Numerical Brouwer degree and sup-distance estimation.

On S1 the degree is the winding number: the summed, wrapped angle
increments of the image curve divided by 2*pi. On S2 it is the quadrature
of the pulled-back normalized area form, with tangential derivatives taken
by central finite differences. Both methods refine adaptively and refuse
to answer (ResolutionExceeded) rather than round a doubtful value.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import ClassVar

import numpy as np

from .errors import (
    DimensionMismatch,
    InvalidBlend,
    ResolutionExceeded,
    SymbolicNumericMismatch,
)
from .expr import Blend, MapExpr, eval_array, walk
from .geometry import frame_rows, make_grid, normalize_rows

_TWO_PI = 2.0 * math.pi

#: Pre-normalization norms at or below this invalidate a blend slice.
BLEND_MIN_NORM = 1e-6

#: t samples used when sweeping a straight-line segment between two maps.
SEGMENT_T_STEPS = 16


@dataclass(frozen=True)
class DegreeParams:
    """Knobs for the adaptive degree computations.

    Resolutions left as None fall back to per-dimension defaults. The
    effective maximum is never below twice the starting resolution so at
    least one two-level comparison can run.
    """

    initial_resolution: int | None = None
    max_resolution: int | None = None
    tolerance: float = 0.1
    step_cap: float = math.pi / 2

    _DEFAULT_INITIAL: ClassVar[dict[int, int]] = {1: 256, 2: 128}
    _DEFAULT_MAX: ClassVar[dict[int, int]] = {1: 16384, 2: 1024}

    def __post_init__(self):
        if self.initial_resolution is not None and self.initial_resolution < 8:
            raise ValueError("initial resolution must be >= 8")
        if not 0.0 < self.tolerance < 0.5:
            raise ValueError("tolerance must lie in (0, 0.5)")
        if self.step_cap <= 0.0:
            raise ValueError("step cap must be positive")

    def initial_for(self, dim: int) -> int:
        return self.initial_resolution or self._DEFAULT_INITIAL[dim]

    def max_for(self, dim: int) -> int:
        configured = self.max_resolution or self._DEFAULT_MAX[dim]
        return max(configured, 2 * self.initial_for(dim))


@dataclass(frozen=True)
class DegreeResult:
    """An integer degree plus the evidence it was rounded from.

    residual is |raw - value| before rounding and is always below the
    tolerance in force; method records which route produced the value.
    """

    value: int
    residual: float
    method: str  # "winding" | "quadrature" | "symbolic"
    resolution: int


@dataclass(frozen=True)
class DistanceEstimate:
    """Sampled sup distance between two maps, optionally with a bound.

    sampled_max is a lower bound of the true sup. rigorous, present only
    when Lipschitz constants were supplied, adds (L_f + L_g) * mesh and is
    a true upper bound.
    """

    sampled_max: float
    resolution: int
    rigorous: float | None = None


def _start_resolution(e: MapExpr, params: DegreeParams, dim: int) -> int:
    """Starting resolution, floored by the map's structural wrap bound.

    Sampling a map that wraps K times with fewer than ~2*pi*K nodes can
    alias to a convincing but wrong winding, so when the AST yields a
    Lipschitz bound we refuse to start below it.
    """
    n = params.initial_for(dim)
    bound = e.lipschitz_bound()
    if bound is not None:
        factor = _TWO_PI if dim == 1 else math.pi
        n = max(n, int(math.ceil(factor * bound)))
    if 2 * n > params.max_for(dim):
        raise ResolutionExceeded(
            f"map needs resolution {n}, beyond the cap {params.max_for(dim)}"
        )
    return n


def winding_raw(e: MapExpr, resolution: int, offset: float = 0.0) -> tuple[float, float]:
    """One non-adaptive winding pass: (raw winding, largest |step|)."""
    phis = offset + _TWO_PI * np.arange(resolution) / resolution
    X = np.column_stack([np.cos(phis), np.sin(phis)])
    Y = eval_array(e, X)
    alpha = np.arctan2(Y[:, 1], Y[:, 0])
    steps = np.diff(np.concatenate([alpha, alpha[:1]]))
    steps = np.mod(steps + math.pi, _TWO_PI) - math.pi  # wrap to [-pi, pi)
    return float(steps.sum() / _TWO_PI), float(np.abs(steps).max())


def degree_winding(e: MapExpr, params: DegreeParams = DegreeParams()) -> DegreeResult:
    """Winding-number degree of an S1 expression.

    Doubles the sample count until consecutive levels agree within the
    tolerance and no wrapped step exceeds the step cap.
    """
    if e.dim != 1:
        raise DimensionMismatch(f"winding is for S1 maps, got S{e.dim}")
    n = _start_resolution(e, params, 1)
    n_max = params.max_for(1)
    raw_c, step_c = winding_raw(e, n)
    while 2 * n <= n_max:
        raw_f, step_f = winding_raw(e, 2 * n)
        value = int(round(raw_f))
        residual = abs(raw_f - value)
        if (
            step_c <= params.step_cap
            and step_f <= params.step_cap
            and abs(raw_c - raw_f) <= params.tolerance
            and residual < params.tolerance
        ):
            return DegreeResult(value, residual, "winding", 2 * n)
        n, raw_c, step_c = 2 * n, raw_f, step_f
    raise ResolutionExceeded(
        f"winding did not stabilize by resolution {n_max} for {e.render()}"
    )


def quadrature_raw(e: MapExpr, resolution: int) -> float:
    """One non-adaptive quadrature pass over a lat-long grid.

    Integrates f . (d1 f x d2 f) over the grid, where d1/d2 are central
    finite differences along the node's tangent frame, and divides by the
    sphere area. Accumulation order is fixed, so reruns are bit-identical.
    """
    grid = make_grid(2, resolution)
    X = grid.nodes
    e1, e2 = frame_rows(X)
    h = min(1e-4, grid.mesh / 8.0)
    f = eval_array(e, X)
    d1 = (
        eval_array(e, normalize_rows(X + h * e1))
        - eval_array(e, normalize_rows(X - h * e1))
    ) / (2.0 * h)
    d2 = (
        eval_array(e, normalize_rows(X + h * e2))
        - eval_array(e, normalize_rows(X - h * e2))
    ) / (2.0 * h)
    integrand = np.einsum("ij,ij->i", f, np.cross(d1, d2))
    return float(grid.weights @ integrand) / (4.0 * math.pi)


def degree_quadrature(e: MapExpr, params: DegreeParams = DegreeParams()) -> DegreeResult:
    """Area-form quadrature degree of an S2 expression.

    The resolution counts latitude bands; the grid carries twice as many
    longitudes. Doubles until two consecutive levels agree within the
    tolerance and the finer raw value sits near an integer.
    """
    if e.dim != 2:
        raise DimensionMismatch(f"quadrature is for S2 maps, got S{e.dim}")
    n = _start_resolution(e, params, 2)
    n_max = params.max_for(2)
    raw_c = quadrature_raw(e, n)
    while 2 * n <= n_max:
        raw_f = quadrature_raw(e, 2 * n)
        value = int(round(raw_f))
        residual = abs(raw_f - value)
        if abs(raw_c - raw_f) <= params.tolerance and residual < params.tolerance:
            return DegreeResult(value, residual, "quadrature", 2 * n)
        n, raw_c = 2 * n, raw_f
    raise ResolutionExceeded(
        f"quadrature did not stabilize by {n_max} bands for {e.render()}"
    )


def segment_min_norm(
    f: MapExpr,
    g: MapExpr,
    resolution: int,
    t_values,
) -> tuple[float, tuple[float, ...], float]:
    """Minimum of |(1-t) f(x) + t g(x)| over grid nodes x and given t.

    Returns (min_norm, argmin point coordinates, argmin t). This is the
    denominator of the straight-line homotopy between f and g; a value
    near zero means the homotopy (or a blend slice) is invalid.
    """
    if f.dim != g.dim:
        raise DimensionMismatch(f"maps on S{f.dim} and S{g.dim}")
    grid = make_grid(f.dim, resolution)
    F = eval_array(f, grid.nodes)
    G = eval_array(g, grid.nodes)
    best = math.inf
    best_idx, best_t = 0, 0.0
    for t in t_values:
        norms = np.linalg.norm((1.0 - t) * F + t * G, axis=1)
        i = int(np.argmin(norms))
        if norms[i] < best:
            best, best_idx, best_t = float(norms[i]), i, float(t)
    point = tuple(float(c) for c in grid.nodes[best_idx])
    return best, point, best_t


def check_blend_validity(e: MapExpr, params: DegreeParams) -> None:
    """Reject expressions whose blend denominators approach zero.

    Every blend node is swept over its children's grid at the canonical
    t samples {0, 1/16, ..., 1} plus the node's own t. Conservative by
    design: a pinch anywhere on the segment is treated as inconclusive.
    """
    for node in walk(e):
        if not isinstance(node, Blend):
            continue
        ts = sorted({i / SEGMENT_T_STEPS for i in range(SEGMENT_T_STEPS + 1)} | {node.t})
        n = params.initial_for(node.f.dim)
        min_norm, point, t = segment_min_norm(node.f, node.g, n, ts)
        if min_norm <= BLEND_MIN_NORM:
            raise InvalidBlend(
                f"blend denominator {min_norm:.3e} at t={t} near {point} in {node.render()}"
            )


def degree(e: MapExpr, params: DegreeParams = DegreeParams()) -> DegreeResult:
    """Degree of any well-formed expression.

    When the AST knows its degree the numeric method must confirm it (a
    disagreement raises SymbolicNumericMismatch and is always a bug or an
    insufficient-resolution signal, never silently preferred away). When
    it does not (a blend is present), the blend denominators are checked
    and the numeric result is returned as-is.
    """
    numeric = degree_winding if e.dim == 1 else degree_quadrature
    sd = e.symbolic_degree()
    if sd is None:
        check_blend_validity(e, params)
        return numeric(e, params)
    witness = numeric(e, params)
    if witness.value != sd:
        raise SymbolicNumericMismatch(
            f"structural degree {sd} but {witness.method} found {witness.value} "
            f"at resolution {witness.resolution} for {e.render()}"
        )
    return DegreeResult(sd, witness.residual, "symbolic", witness.resolution)


def sup_distance(
    f: MapExpr,
    g: MapExpr,
    resolution: int | None = None,
    lipschitz: tuple[float, float] | None = None,
) -> DistanceEstimate:
    """Sampled sup distance between two maps of the same sphere.

    The sampled max is a lower bound of the true sup. Supplying
    Lipschitz constants (L_f, L_g) adds a rigorous upper bound
    sampled_max + (L_f + L_g) * mesh.
    """
    if f.dim != g.dim:
        raise DimensionMismatch(f"maps on S{f.dim} and S{g.dim}")
    n = resolution or DegreeParams().initial_for(f.dim)
    grid = make_grid(f.dim, n)
    F = eval_array(f, grid.nodes)
    G = eval_array(g, grid.nodes)
    sampled = min(2.0, float(np.linalg.norm(F - G, axis=1).max()))
    rigorous = None
    if lipschitz is not None:
        lf, lg = lipschitz
        rigorous = sampled + (lf + lg) * grid.mesh
    return DistanceEstimate(sampled, n, rigorous)
