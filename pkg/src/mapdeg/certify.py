"""Non-iterate certificates from the degree obstruction.

The degree of any n-th iterate (n >= 2) is a perfect power k^n. So a map
whose degree is not a perfect power cannot be an iterate of any continuous
map, and neither can anything within sup-distance 1 of it: the normalized
straight-line homotopy to the base map never vanishes there, and homotopic
maps share their degree. This module turns both arguments into checkable
artifacts. A Refusal never claims a map IS an iterate; it only says the
degree obstruction is silent.
"""

from __future__ import annotations

from dataclasses import dataclass

from .degree import (
    SEGMENT_T_STEPS,
    DegreeParams,
    DegreeResult,
    DistanceEstimate,
    degree,
    segment_min_norm,
    sup_distance,
)
from .errors import (
    ConsistencyError,
    DimensionMismatch,
    DistanceTooLarge,
    DomainError,
    InvalidHomotopy,
)
from .expr import MapExpr, render

#: Homotopy denominators at or below this are treated as pinched.
HOMOTOPY_MIN_NORM = 1e-6

#: Radius of the ball around the base map inside which the argument works.
BALL_RADIUS = 1.0


@dataclass(frozen=True)
class PowerWitness:
    """Integers (base, exp) with exp >= 2 witnessing d = base**exp."""

    base: int
    exp: int

    def __post_init__(self):
        if self.exp < 2:
            raise ValueError(f"witness exponent must be >= 2, got {self.exp}")

    def value(self) -> int:
        return self.base**self.exp


@dataclass(frozen=True)
class HomotopyReport:
    """Validity data for the straight-line homotopy between two maps."""

    valid: bool
    min_norm: float
    argmin_point: tuple[float, ...]
    argmin_t: float
    resolution: int
    t_steps: int


@dataclass(frozen=True)
class BallProvenance:
    """Where a neighborhood certificate came from: base map and distance."""

    base: str
    distance: DistanceEstimate
    radius: float = BALL_RADIUS


@dataclass(frozen=True)
class NonIterateCertificate:
    """Proof sketch that `subject` is not f^n for any continuous f, n >= 2.

    checked_exponents is the inclusive range of exponents the perfect-power
    scan covered; exponents above it are impossible for the degree's size.
    When ball is present the degree belongs to the base map and transfers
    to the subject by homotopy invariance.
    """

    subject: str
    dim: int
    degree: DegreeResult
    checked_exponents: tuple[int, int]
    ball: BallProvenance | None = None

    def to_json_dict(self) -> dict:
        out = {
            "subject": self.subject,
            "dim": self.dim,
            "degree": {
                "value": self.degree.value,
                "method": self.degree.method,
                "residual": self.degree.residual,
                "resolution": self.degree.resolution,
            },
            "power_check": {"checked_exponents": list(self.checked_exponents)},
            "ball": None,
        }
        if self.ball is not None:
            out["ball"] = {
                "base": self.ball.base,
                "sampled_distance": self.ball.distance.sampled_max,
                "radius": self.ball.radius,
                "rigorous": self.ball.distance.rigorous,
            }
        return out


@dataclass(frozen=True)
class Refusal:
    """The degree obstruction is silent: the degree is a perfect power.

    Not a claim that the subject is an iterate; the obstruction is
    necessary, not sufficient.
    """

    subject: str
    dim: int
    degree: DegreeResult
    witness: PowerWitness

    def to_json_dict(self) -> dict:
        return {
            "subject": self.subject,
            "dim": self.dim,
            "degree": {
                "value": self.degree.value,
                "method": self.degree.method,
                "residual": self.degree.residual,
                "resolution": self.degree.resolution,
            },
            "witness": {"base": self.witness.base, "exp": self.witness.exp},
        }


def _int_nth_root(a: int, n: int) -> int:
    """Integer candidate for a**(1/n), to be verified by exact powering."""
    return int(round(a ** (1.0 / n)))


def _exponent_scan_range(d: int) -> tuple[int, int]:
    """Inclusive exponent range that decides perfect-powerness of d.

    For |d| >= 2 any representation d = k^n with |k| >= 2 forces
    n <= log2 |d|; n = 2 is always scanned so the range is never empty.
    """
    hi = max(2, abs(d).bit_length() - 1) if abs(d) >= 2 else 2
    return 2, hi


def is_perfect_power(d: int) -> PowerWitness | None:
    """Smallest-exponent witness that d = k^n with n >= 2, or None.

    Conventions: 0 = 0^2, 1 = 1^2, -1 = (-1)^3 are all perfect powers.
    Negative d admits odd exponents only. Roots are found by rounding the
    floating n-th root and verifying candidates with exact integer
    arithmetic, so no witness is ever approximate.
    """
    if d == 0:
        return PowerWitness(0, 2)
    if d == 1:
        return PowerWitness(1, 2)
    if d == -1:
        return PowerWitness(-1, 3)
    a = abs(d)
    lo, hi = _exponent_scan_range(d)
    for n in range(lo, hi + 1):
        if d < 0 and n % 2 == 0:
            continue
        r = _int_nth_root(a, n)
        for k in (r - 1, r, r + 1):
            if k >= 2 and k**n == a:
                return PowerWitness(-k if d < 0 else k, n)
    return None


def homotopy_check(
    f0: MapExpr,
    g: MapExpr,
    resolution: int | None = None,
    t_steps: int = SEGMENT_T_STEPS,
) -> HomotopyReport:
    """Sample the normalized straight-line homotopy's denominator.

    Sweeps t in {0, 1/t_steps, ..., 1} over a grid and reports the
    minimum of |(1-t) f0(x) + t g(x)|; the homotopy is valid iff that
    minimum stays above HOMOTOPY_MIN_NORM.
    """
    if f0.dim != g.dim:
        raise DimensionMismatch(f"maps on S{f0.dim} and S{g.dim}")
    if t_steps < 16:
        raise DomainError(f"t_steps must be >= 16, got {t_steps}")
    n = resolution or DegreeParams().initial_for(f0.dim)
    ts = [i / t_steps for i in range(t_steps + 1)]
    min_norm, point, t = segment_min_norm(f0, g, n, ts)
    return HomotopyReport(
        valid=min_norm > HOMOTOPY_MIN_NORM,
        min_norm=min_norm,
        argmin_point=point,
        argmin_t=t,
        resolution=n,
        t_steps=t_steps,
    )


def certify_not_iterate(
    e: MapExpr, params: DegreeParams = DegreeParams()
) -> NonIterateCertificate | Refusal:
    """Certify that e is no iterate, or refuse with the blocking witness.

    Computes the degree, then scans for a perfect-power representation.
    No witness means no continuous f and no n >= 2 satisfy f^n = e.
    """
    deg = degree(e, params)
    witness = is_perfect_power(deg.value)
    subject = render(e)
    if witness is not None:
        return Refusal(subject, e.dim, deg, witness)
    return NonIterateCertificate(
        subject, e.dim, deg, _exponent_scan_range(deg.value)
    )


def ball_certificate(
    f0: MapExpr,
    g: MapExpr,
    params: DegreeParams = DegreeParams(),
    resolution: int | None = None,
    lipschitz: tuple[float, float] | None = None,
) -> NonIterateCertificate | Refusal:
    """Certify g as a non-iterate from its proximity to a base map f0.

    Requires (i) degree(f0) is not a perfect power, (ii) the sampled sup
    distance between f0 and g is below 1 (and the rigorous bound too when
    Lipschitz constants are supplied), (iii) the straight-line homotopy
    between them never pinches. The certificate carries f0's degree; the
    logic never needs degree(g). It is still computed afterwards as a
    consistency assertion and must agree.
    """
    if f0.dim != g.dim:
        raise DimensionMismatch(f"maps on S{f0.dim} and S{g.dim}")
    n = resolution or params.initial_for(f0.dim)
    deg0 = degree(f0, params)
    witness = is_perfect_power(deg0.value)
    if witness is not None:
        return Refusal(render(g), g.dim, deg0, witness)

    dist = sup_distance(f0, g, n, lipschitz)
    if dist.sampled_max >= BALL_RADIUS:
        raise DistanceTooLarge(
            f"sampled distance {dist.sampled_max:.6f} >= {BALL_RADIUS}; "
            "the ball argument does not apply (inconclusive)"
        )
    if dist.rigorous is not None and dist.rigorous >= BALL_RADIUS:
        raise DistanceTooLarge(
            f"rigorous distance bound {dist.rigorous:.6f} >= {BALL_RADIUS}"
        )
    report = homotopy_check(f0, g, n)
    if not report.valid:
        raise InvalidHomotopy(
            f"homotopy pinches to {report.min_norm:.3e} at t={report.argmin_t}"
        )

    certificate = NonIterateCertificate(
        subject=render(g),
        dim=g.dim,
        degree=deg0,
        checked_exponents=_exponent_scan_range(deg0.value),
        ball=BallProvenance(render(f0), dist),
    )
    deg_g = degree(g, params)
    if deg_g.value != deg0.value:
        raise ConsistencyError(
            f"degree {deg_g.value} of the perturbed map differs from the "
            f"base degree {deg0.value}; homotopy invariance violated"
        )
    return certificate
