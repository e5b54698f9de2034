"""Geometry of the unit circle S1 in R2 and the unit sphere S2 in R3.

Points, normalization, tangent frames, and quadrature sample grids. All
types are immutable values and all operations are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, InvalidResolution, NearZeroVector

#: Vectors with Euclidean norm at or below this cannot be normalized.
NEAR_ZERO = 1e-9

#: Allowed deviation of a sphere point's norm from 1.
UNIT_TOL = 1e-12

MIN_RESOLUTION = 8


@dataclass(frozen=True)
class SpherePoint:
    """A point of S1 or S2, stored by its ambient coordinates."""

    coords: tuple[float, ...]

    def __post_init__(self):
        if len(self.coords) not in (2, 3):
            raise DimensionMismatch(
                f"expected 2 or 3 coordinates, got {len(self.coords)}"
            )
        norm = math.sqrt(sum(c * c for c in self.coords))
        if abs(norm - 1.0) > UNIT_TOL:
            raise ValueError(f"not a unit vector: norm {norm!r}")

    @property
    def dim(self) -> int:
        """Dimension m of the sphere the point lives on (1 or 2)."""
        return len(self.coords) - 1

    def array(self) -> np.ndarray:
        return np.asarray(self.coords, dtype=float)


@dataclass(frozen=True)
class TangentFrame:
    """Orthonormal tangent basis (e1, e2) at a point of S2.

    The convention makes (e1, e2, base) right-handed: e1 x e2 = base.
    """

    base: SpherePoint
    e1: tuple[float, float, float]
    e2: tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """Quadrature nodes and weights covering S1 or S2.

    nodes is an (n, dim+1) array of unit rows; weights is the matching
    (n,) array summing to the circumference (2*pi) or area (4*pi).
    mesh is a safe upper bound on the chordal spacing between adjacent
    nodes, used for Lipschitz-based distance bounds.
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    mesh: float

    def __len__(self) -> int:
        return len(self.weights)

    def point(self, i: int) -> SpherePoint:
        return SpherePoint(tuple(float(c) for c in self.nodes[i]))


def normalize(v) -> SpherePoint:
    """Project a nonzero vector of length 2 or 3 onto the unit sphere.

    Raises NearZeroVector if the norm is at or below NEAR_ZERO, which
    signals an invalid blend or perturbation rather than a rounding issue.
    """
    arr = np.asarray(v, dtype=float)
    if arr.shape not in ((2,), (3,)):
        raise DimensionMismatch(f"expected a vector of length 2 or 3, got shape {arr.shape}")
    norm = float(np.linalg.norm(arr))
    if norm <= NEAR_ZERO:
        raise NearZeroVector(f"cannot normalize vector of norm {norm:.3e}")
    return SpherePoint(tuple(float(c) for c in arr / norm))


def normalize_rows(X: np.ndarray, eps: float = NEAR_ZERO) -> np.ndarray:
    """Row-wise normalization of an (n, k) array; rejects near-zero rows."""
    norms = np.linalg.norm(X, axis=1)
    small = float(norms.min()) if len(norms) else 1.0
    if small <= eps:
        raise NearZeroVector(f"cannot normalize row of norm {small:.3e}")
    return X / norms[:, None]


def chordal_dist(p: SpherePoint, q: SpherePoint) -> float:
    """Ambient Euclidean distance between two sphere points, in [0, 2]."""
    if p.dim != q.dim:
        raise DimensionMismatch(f"points on S{p.dim} and S{q.dim}")
    return min(2.0, float(np.linalg.norm(p.array() - q.array())))


def make_grid(dim: int, resolution: int) -> SampleGrid:
    """Build a quadrature grid with `resolution` angular subdivisions.

    dim=1: `resolution` equally spaced angles, each with weight
    2*pi/resolution. dim=2: `resolution` latitude bands crossed with
    2*resolution longitudes, nodes at cell centers; each weight is the
    exact spherical area of its cell, so the weights always sum to 4*pi.
    """
    if dim not in (1, 2):
        raise DimensionMismatch(f"dim must be 1 or 2, got {dim}")
    if resolution < MIN_RESOLUTION:
        raise InvalidResolution(f"resolution {resolution} < {MIN_RESOLUTION}")
    if dim == 1:
        phis = 2.0 * math.pi * np.arange(resolution) / resolution
        nodes = np.column_stack([np.cos(phis), np.sin(phis)])
        weights = np.full(resolution, 2.0 * math.pi / resolution)
        mesh = 2.0 * math.sin(math.pi / resolution)
        return SampleGrid(1, nodes, weights, mesh)

    edges = np.linspace(0.0, math.pi, resolution + 1)
    centers = 0.5 * (edges[:-1] + edges[1:])
    band_area = np.cos(edges[:-1]) - np.cos(edges[1:])  # per radian of longitude
    nlon = 2 * resolution
    dphi = 2.0 * math.pi / nlon
    phis = (np.arange(nlon) + 0.5) * dphi
    sin_t, cos_t = np.sin(centers), np.cos(centers)
    x = np.outer(sin_t, np.cos(phis)).ravel()
    y = np.outer(sin_t, np.sin(phis)).ravel()
    z = np.repeat(cos_t, nlon)
    nodes = np.column_stack([x, y, z])
    weights = np.repeat(band_area * dphi, nlon)
    mesh = math.hypot(math.pi / resolution, math.pi / resolution)
    return SampleGrid(2, nodes, weights, mesh)


def frame_rows(X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Tangent frames for every row of an (n, 3) array of unit vectors.

    e1 = normalize(a x p) with a = z-axis, falling back to the x-axis
    near the poles; e2 = p x e1. The fallback keeps the cross product
    bounded away from zero for every p.
    """
    a = np.zeros_like(X)
    near_pole = np.abs(X[:, 2]) >= 0.9
    a[~near_pole, 2] = 1.0
    a[near_pole, 0] = 1.0
    e1 = np.cross(a, X)
    e1 /= np.linalg.norm(e1, axis=1)[:, None]
    e2 = np.cross(X, e1)
    return e1, e2


def tangent_frame(p: SpherePoint) -> TangentFrame:
    """Deterministic orthonormal frame at a point of S2."""
    if p.dim != 2:
        raise DimensionMismatch(f"tangent frames exist on S2 only, got S{p.dim}")
    e1, e2 = frame_rows(p.array()[None, :])
    return TangentFrame(
        base=p,
        e1=tuple(float(c) for c in e1[0]),
        e2=tuple(float(c) for c in e2[0]),
    )
