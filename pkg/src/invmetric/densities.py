"""Infinitesimal invariant metrics of planar domains.

Exact closed forms on the disc, the half-plane and the annulus; certified
[lower, upper] brackets on smooth Jordan domains via candidate families and
comparison domains.  Estimated values are always reported as brackets, never
as single-point guesses.

Annulus closed form
-------------------
For A = {r < |z| < 1} the upper half-plane H covers A through
pi(w) = exp(i * alpha * Log w) with alpha = log(1/r)/pi; a point z in A has
lifts w with arg w = -log|z| / alpha in (0, pi).  Pushing the half-plane
density |xi| / (2 Im w) down through pi (all lifts give the same value, the
deck transformations being isometries of H) yields

    lambda_A(z) = pi / (2 |z| log(1/r) sin(pi log|z| / log r))

per unit Euclidean vector length.  An independent numeric extremal search over
covering-disc candidates (finite differences only) lives in
annulus_covering_search for cross-validation.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .domains import (Annulus, Domain, SmoothDomain, UnitDisc, UpperHalfPlane,
                      UNBOUNDED_RADIUS)
from .errors import (AmbiguousProjectionError, BracketInversionError,
                     EmptyFamilyError, NotSelfMapError,
                     PointOutsideDomainError)
from .maps import (AffineMap, HolomorphicMap, MobiusMap, Polynomial,
                   RationalMap, disc_image_bound)
from .mobius import (MobiusTransform, cayley, cayley_derivative,
                     cayley_inverse, mobius_to_zero, _require_finite)


class MetricKind(Enum):
    POINCARE = "poincare"
    KOBAYASHI = "kobayashi"
    CARATHEODORY = "caratheodory"
    QUASIHYPERBOLIC = "quasihyperbolic"


@dataclass(frozen=True)
class DensityBound:
    """Infinitesimal metric value as an exact number or a [lower, upper] bracket."""

    lower: float
    upper: float
    exact: bool

    def __post_init__(self):
        if self.lower < 0 or not math.isfinite(self.upper):
            raise ValueError("density bounds must be finite and non-negative")
        if self.lower > self.upper * (1 + 1e-12) + 1e-300:
            raise BracketInversionError(
                f"lower {self.lower} exceeds upper {self.upper}")
        if self.exact and self.lower != self.upper:
            raise ValueError("exact bounds must have lower == upper")

    @classmethod
    def exactly(cls, value: float) -> "DensityBound":
        return cls(value, value, True)

    @property
    def value(self) -> float:
        return 0.5 * (self.lower + self.upper)


def poincare_density(p: complex, xi: complex) -> float:
    """|xi| / (1 - |p|^2) on the unit disc."""
    p = _require_finite(p, "base point")
    xi = _require_finite(xi, "tangent vector")
    if abs(p) >= 1.0:
        raise PointOutsideDomainError("Poincare density needs |p| < 1")
    return abs(xi) / (1.0 - abs(p) ** 2)


def pseudohyperbolic(a: complex, b: complex) -> float:
    """|a - b| / |1 - conj(a) b| for a, b in the disc; values in [0, 1)."""
    a = _require_finite(a, "point")
    b = _require_finite(b, "point")
    if abs(a) >= 1.0 or abs(b) >= 1.0:
        raise PointOutsideDomainError("pseudohyperbolic metric needs disc points")
    return abs(a - b) / abs(1.0 - a.conjugate() * b)


def quasihyperbolic_density(domain: Domain, z: complex, xi: complex) -> float:
    """|xi| / dist(z, boundary)."""
    xi = _require_finite(xi, "tangent vector")
    return abs(xi) / domain.boundary_distance(z)


# -- annulus closed form and covering machinery ---------------------------


def annulus_covering_exponent(r_inner: float) -> float:
    return math.log(1.0 / r_inner) / math.pi


def annulus_cover(r_inner: float, w: complex) -> complex:
    """Covering map from the upper half-plane onto {r < |z| < 1}."""
    if w.imag <= 0:
        raise PointOutsideDomainError("covering map needs Im w > 0")
    alpha = annulus_covering_exponent(r_inner)
    return cmath.exp(1j * alpha * cmath.log(w))

def annulus_lifts(r_inner: float, z: complex, k_range: int = 3) -> np.ndarray:
    """Half-plane preimages of z under the covering map, indices -k..k."""
    alpha = annulus_covering_exponent(r_inner)
    argw = -math.log(abs(z)) / alpha
    ks = np.arange(-k_range, k_range + 1)
    logmod = (cmath.phase(z) + 2.0 * math.pi * ks) / alpha
    return np.exp(logmod) * cmath.exp(1j * argw)


def annulus_density(r_inner: float, z: complex) -> float:
    """Hyperbolic (= Kobayashi) density of {r < |z| < 1} per unit |xi|."""
    rho = abs(z)
    if not r_inner < rho < 1.0:
        raise PointOutsideDomainError(f"|z| = {rho} outside ({r_inner}, 1)")
    logr = math.log(r_inner)
    return math.pi / (2.0 * rho * (-logr) * math.sin(math.pi * math.log(rho) / logr))


def annulus_covering_search(r_inner: float, z: complex, xi: complex = 1.0,
                            k_range: int = 3, fd_step: float = 1e-5) -> float:
    """Numeric extremal search over covering-disc candidates.

    Each candidate is evaluated purely by composition and the derivative at 0
    is taken by central finite differences, so this shares no formulas with
    annulus_density and serves as its independent oracle.  Candidates route
    through the half-plane (disc -> half-plane at i -> affine move to the
    lift -> covering map), which stays well conditioned for distant lifts.
    """
    best = math.inf
    for w in annulus_lifts(r_inner, z, k_range):
        w = complex(w)

        def f(zeta: complex) -> complex:
            u = cayley_inverse(zeta)  # sends 0 to i
            return annulus_cover(r_inner, w.real + w.imag * u)

        d = (f(fd_step) - f(-fd_step)) / (2.0 * fd_step)
        best = min(best, abs(xi) / abs(d))
    return best


# -- candidate families ----------------------------------------------------


@dataclass(frozen=True)
class DiscValuedMaps:
    """Maps from a domain into the disc (lower-bound side of the sup metric)."""

    maps: tuple[HolomorphicMap, ...]

    @classmethod
    def for_domain(cls, domain: Domain, z: complex) -> "DiscValuedMaps":
        if isinstance(domain, UnitDisc):
            return cls((Polynomial.identity(),))
        if isinstance(domain, UpperHalfPlane):
            # the Cayley map as a rational map: (w - i)/(w + i)
            return cls((RationalMap([-1j, 1], [1j, 1]),))
        if isinstance(domain, Annulus):
            r = domain.r_inner
            members: list[HolomorphicMap] = [Polynomial.identity()]
            members.append(RationalMap([r], [0, 1]))  # w -> r/w
            for n in (2, 3, 4):
                members.append(Polynomial([0] * n + [1]))  # w -> w^n
                members.append(RationalMap([r ** n], [0] * n + [1]))
            return cls(tuple(members))
        if isinstance(domain, SmoothDomain):
            m = domain.circumradius_about(z)
            return cls((AffineMap(1.0 / m, -complex(z) / m),))
        raise EmptyFamilyError(f"no disc-valued family for {type(domain).__name__}")


@dataclass(frozen=True)
class AnalyticDiscs:
    """Maps from the disc into a domain sending 0 to the base point."""

    maps: tuple[HolomorphicMap, ...]

    @classmethod
    def for_domain(cls, domain: Domain, z: complex,
                   n_directions: int = 32) -> "AnalyticDiscs":
        z = complex(z)
        if isinstance(domain, UnitDisc):
            return cls((MobiusMap(mobius_to_zero(z).inverse()),))
        # affine inscribed-disc maps zeta -> z + delta e^{i phi} zeta
        delta = domain.boundary_distance(z)
        phis = 2.0 * math.pi * np.arange(n_directions) / n_directions
        return cls(tuple(AffineMap(delta * cmath.exp(1j * p), z) for p in phis))


def kobayashi_upper_from_family(domain: Domain, z: complex, xi: complex,
                                family: AnalyticDiscs) -> float:
    """min |xi| / |f'(0)| over the family; an upper bound for the inf metric."""
    if not family.maps:
        raise EmptyFamilyError("analytic-disc family is empty")
    return min(abs(xi) / abs(f.derivative(0j)) for f in family.maps)


def caratheodory_lower_from_family(domain: Domain, z: complex, xi: complex,
                                   family: DiscValuedMaps) -> float:
    """max over members, normalized so each sends z to 0, of |f'(z) xi|.

    Post-composing f with the automorphism moving f(z) to 0 multiplies the
    derivative by 1/(1 - |f(z)|^2), which is applied directly.
    """
    if not family.maps:
        raise EmptyFamilyError("disc-valued family is empty")
    z = complex(z)
    best = 0.0
    for f in family.maps:
        v = f(z)
        best = max(best, abs(f.derivative(z)) * abs(xi) / (1.0 - abs(v) ** 2))
    return best


# -- the bracket metrics ----------------------------------------------------


def kobayashi_density(domain: Domain, z: complex, xi: complex) -> DensityBound:
    """Infinitesimal Kobayashi metric: exact where known, else a bracket."""
    z = domain._require_interior(z)
    xi = _require_finite(xi, "tangent vector")
    if xi == 0:
        return DensityBound.exactly(0.0)
    if isinstance(domain, UnitDisc):
        return DensityBound.exactly(poincare_density(z, xi))
    if isinstance(domain, UpperHalfPlane):
        # push through the Cayley conformal isometry
        return DensityBound.exactly(
            poincare_density(cayley(z), cayley_derivative(z) * xi))
    if isinstance(domain, Annulus):
        return DensityBound.exactly(annulus_density(domain.r_inner, z) * abs(xi))
    if isinstance(domain, SmoothDomain):
        upper = abs(xi) / domain.boundary_distance(z)  # inscribed disc
        lower = abs(xi) / domain.circumradius_about(z)  # containing disc
        ext = _exterior_annulus_lower(domain, z, xi)
        if ext is not None:
            lower = max(lower, ext)
        return DensityBound(lower, upper, False)
    raise TypeError(f"unsupported domain {type(domain).__name__}")


def _exterior_annulus_lower(domain: SmoothDomain, z: complex,
                            xi: complex) -> float | None:
    """Lower bound from the region (big disc) minus (exterior tangent disc).

    That region contains the domain and is conformally a concentric annulus,
    whose density is known in closed form.  Returns None when the comparison
    does not apply (ambiguous projection, or too far from the boundary).
    """
    try:
        r_osc, R = domain.osculating_radii()
    except ValueError:
        return None
    if not math.isfinite(R):
        return None
    try:
        p = domain.nearest_boundary_point(z)
    except AmbiguousProjectionError:
        return None
    if abs(z - p) >= r_osc:
        return None  # outside the tubular neighborhood
    outward, _ = domain.normals(p)
    center = p + R * outward
    big = R + domain.diameter
    w = (z - center) / big
    rho = R / big
    if not rho < abs(w) < 1.0:
        return None
    return annulus_density(rho, w) * abs(xi) / big


def boundary_bracket_constants(domain: SmoothDomain, delta_max: float = 0.1,
                               n: int = 200) -> tuple[float, float]:
    """Constants (c, C) with c|xi|/delta <= F_K <= C|xi|/delta near the boundary.

    The upper constant is 1 (inscribed-disc bound).  The lower constant comes
    from the exterior-tangent-circle comparison region evaluated along the
    normal, minimized over boundary distances up to delta_max, with a small
    safety factor for off-normal samples.
    """
    _, R = domain.osculating_radii()
    if not math.isfinite(R):
        raise ValueError("boundary needs a finite exterior osculating radius")
    big = R + domain.diameter
    rho = R / big
    deltas = np.linspace(delta_max / n, delta_max, n)
    vals = [d * annulus_density(rho, (R + d) / big) / big for d in deltas]
    return 0.999 * min(vals), 1.0


def caratheodory_density(domain: Domain, z: complex, xi: complex,
                         family: DiscValuedMaps | None = None) -> DensityBound:
    """Infinitesimal Caratheodory metric; coincides with Kobayashi on the disc
    and half-plane, elsewhere a bracket [family sup, Kobayashi upper]."""
    z = domain._require_interior(z)
    xi = _require_finite(xi, "tangent vector")
    if xi == 0:
        return DensityBound.exactly(0.0)
    if isinstance(domain, (UnitDisc, UpperHalfPlane)):
        return kobayashi_density(domain, z, xi)
    if family is None:
        family = DiscValuedMaps.for_domain(domain, z)
    lower = caratheodory_lower_from_family(domain, z, xi, family)
    upper = kobayashi_density(domain, z, xi).upper
    return DensityBound(lower, upper, False)


def schwarz_pick_gap(f: HolomorphicMap, a: complex) -> float:
    """(1 - |f(a)|^2)/(1 - |a|^2) - |f'(a)|; zero exactly for automorphisms."""
    a = _require_finite(a, "point")
    if abs(a) >= 1.0:
        raise PointOutsideDomainError("base point must be in the disc")
    if disc_image_bound(f, 512) > 1.0 + 1e-9:
        raise NotSelfMapError("map does not send the disc into itself")
    fa = f(a)
    return (1.0 - abs(fa) ** 2) / (1.0 - abs(a) ** 2) - abs(f.derivative(a))


def density_bound(domain: Domain, kind: MetricKind, z: complex,
                  xi: complex) -> DensityBound:
    """Uniform dispatcher over the four metric kinds."""
    if kind is MetricKind.POINCARE:
        if isinstance(domain, UnitDisc):
            return DensityBound.exactly(poincare_density(z, xi))
        if isinstance(domain, UpperHalfPlane):
            return kobayashi_density(domain, z, xi)
        raise ValueError("the Poincare metric lives on the disc or half-plane")
    if kind is MetricKind.KOBAYASHI:
        return kobayashi_density(domain, z, xi)
    if kind is MetricKind.CARATHEODORY:
        return caratheodory_density(domain, z, xi)
    if kind is MetricKind.QUASIHYPERBOLIC:
        return DensityBound.exactly(quasihyperbolic_density(domain, z, xi))
    raise ValueError(f"unknown metric kind {kind!r}")


def vector_density(domain: Domain, kind: MetricKind, side: str = "upper"):
    """Vectorized density evaluator (z_array, xi_array) -> array.

    Used by the quadrature and grid machinery; falls back to a per-point loop
    for brackets that need boundary projections.
    """
    if side not in ("upper", "lower"):
        raise ValueError("side must be 'upper' or 'lower'")

    if isinstance(domain, UnitDisc) and kind in (
            MetricKind.POINCARE, MetricKind.KOBAYASHI, MetricKind.CARATHEODORY):
        return lambda z, xi: np.abs(xi) / (1.0 - np.abs(z) ** 2)
    if isinstance(domain, UpperHalfPlane) and kind in (
            MetricKind.POINCARE, MetricKind.KOBAYASHI, MetricKind.CARATHEODORY):
        return lambda z, xi: np.abs(xi) / (2.0 * np.asarray(z).imag)
    if kind is MetricKind.QUASIHYPERBOLIC:
        return lambda z, xi: np.abs(xi) / domain.boundary_distance_many(z)
    if isinstance(domain, SmoothDomain) and side == "upper" and kind in (
            MetricKind.KOBAYASHI, MetricKind.CARATHEODORY):
        # inscribed-disc bound: the upper density is exactly |xi| / delta(z)
        return lambda z, xi: np.abs(xi) / domain.boundary_distance_many(z)
    if isinstance(domain, Annulus) and (
            kind is MetricKind.KOBAYASHI
            or (kind is MetricKind.CARATHEODORY and side == "upper")):
        r = domain.r_inner

        def ann(z, xi):
            rho = np.abs(np.asarray(z))
            logr = math.log(r)
            return (np.abs(xi) * math.pi
                    / (2.0 * rho * (-logr) * np.sin(math.pi * np.log(rho) / logr)))
        return ann

    def pointwise(z, xi):
        z = np.asarray(z).ravel()
        xi = np.broadcast_to(np.asarray(xi), z.shape).ravel()
        out = np.empty(len(z))
        for i in range(len(z)):
            b = density_bound(domain, kind, z[i], xi[i])
            out[i] = b.upper if side == "upper" else b.lower
        return out
    return pointwise
