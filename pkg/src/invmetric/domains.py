"""Planar domain geometry.

Four domain kinds: the unit disc, the upper half-plane, a concentric annulus
{r_inner < |z| < 1}, and a smooth Jordan domain given by boundary samples.

A smooth boundary is represented by N uniform parameter samples; first and
second parameter derivatives are estimated by 5-point central differences and
the curve is evaluated between samples with cubic Hermite interpolation.
Points within BOUNDARY_TOL (1e-9) of the boundary count as boundary points;
points within 1e-12 of it are reported as not contained.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import Callable

import numpy as np
import shapely
from scipy.spatial import cKDTree
from shapely.geometry import Polygon

from .errors import AmbiguousProjectionError, PointOutsideDomainError

BOUNDARY_TOL = 1e-9
INTERIOR_TOL = 1e-12

#: sentinel for "no finite exterior osculating circle" (the unit disc)
UNBOUNDED_RADIUS = math.inf


@dataclass(frozen=True)
class ApproachRegionParams:
    """Aperture / metric-ball parameters for boundary approach regions."""

    alpha: float  # nontangential aperture, > 1
    beta: float   # metric-ball radius, > 0
    r0: float     # inward normal segment length, > 0

    def __post_init__(self):
        if not self.alpha > 1.0:
            raise ValueError("aperture alpha must exceed 1")
        if not self.beta > 0.0:
            raise ValueError("beta must be positive")
        if not self.r0 > 0.0:
            raise ValueError("r0 must be positive")


class Domain(ABC):
    """Immutable planar domain with boundary geometry queries."""

    @abstractmethod
    def contains(self, z: complex) -> bool: ...

    @abstractmethod
    def boundary_distance(self, z: complex) -> float: ...

    @abstractmethod
    def nearest_boundary_point(self, z: complex) -> complex: ...

    @abstractmethod
    def normals(self, p: complex) -> tuple[complex, complex]:
        """(outward, inward) unit normals at a boundary point."""

    @abstractmethod
    def sample_boundary(self, n: int) -> np.ndarray: ...

    @property
    @abstractmethod
    def diameter(self) -> float: ...

    def contains_many(self, z: np.ndarray) -> np.ndarray:
        return np.array([self.contains(zi) for zi in np.asarray(z).ravel()])

    def boundary_distance_many(self, z: np.ndarray) -> np.ndarray:
        return np.array([self.boundary_distance(zi) for zi in np.asarray(z).ravel()])

    def osculating_radii(self) -> tuple[float, float]:
        raise NotImplementedError(
            f"{type(self).__name__} has no osculating-circle data")

    def circumradius_about(self, z: complex) -> float:
        """max |w - z| over the boundary; the domain fits in D(z, result)."""
        raise NotImplementedError

    def in_nontangential_region(self, p: complex, alpha: float, z: complex) -> bool:
        """Membership of z in the aperture-alpha cone at boundary point p."""
        if not alpha > 1.0:
            raise ValueError("aperture alpha must exceed 1")
        if not self.contains(z):
            raise PointOutsideDomainError(f"{z} is not interior")
        return abs(z - p) < alpha * self.boundary_distance(z)

    def _require_interior(self, z: complex) -> complex:
        z = complex(z)
        if not self.contains(z):
            raise PointOutsideDomainError(f"{z} is not an interior point")
        return z


class UnitDisc(Domain):
    def contains(self, z: complex) -> bool:
        return abs(z) < 1.0 - INTERIOR_TOL

    def contains_many(self, z):
        return np.abs(np.asarray(z)) < 1.0 - INTERIOR_TOL

    def boundary_distance(self, z: complex) -> float:
        self._require_interior(z)
        return 1.0 - abs(z)

    def boundary_distance_many(self, z):
        return 1.0 - np.abs(np.asarray(z))

    def nearest_boundary_point(self, z: complex) -> complex:
        z = self._require_interior(z)
        if abs(z) < BOUNDARY_TOL:
            raise AmbiguousProjectionError(
                "every boundary point is equidistant from the disc center")
        return z / abs(z)

    def normals(self, p: complex) -> tuple[complex, complex]:
        if abs(abs(p) - 1.0) > BOUNDARY_TOL:
            raise ValueError(f"{p} is not on the unit circle")
        out = p / abs(p)
        return out, -out

    def sample_boundary(self, n: int) -> np.ndarray:
        return np.exp(2j * np.pi * np.arange(n) / n)

    @property
    def diameter(self) -> float:
        return 2.0

    def osculating_radii(self) -> tuple[float, float]:
        # the boundary is its own interior osculating circle; no finite
        # exterior circle exists, callers fall back to half-plane comparison
        return 1.0, UNBOUNDED_RADIUS

    def circumradius_about(self, z: complex) -> float:
        return 1.0 + abs(z)


class UpperHalfPlane(Domain):
    def contains(self, z: complex) -> bool:
        return complex(z).imag > INTERIOR_TOL

    def contains_many(self, z):
        return np.asarray(z).imag > INTERIOR_TOL

    def boundary_distance(self, z: complex) -> float:
        self._require_interior(z)
        return complex(z).imag

    def boundary_distance_many(self, z):
        return np.asarray(z).imag

    def nearest_boundary_point(self, z: complex) -> complex:
        z = self._require_interior(z)
        return complex(z.real, 0.0)

    def normals(self, p: complex) -> tuple[complex, complex]:
        if abs(complex(p).imag) > BOUNDARY_TOL:
            raise ValueError(f"{p} is not on the real axis")
        return -1j, 1j

    def sample_boundary(self, n: int) -> np.ndarray:
        return np.linspace(-1.0, 1.0, n).astype(complex)

    @property
    def diameter(self) -> float:
        return math.inf


class Annulus(Domain):
    """{z : r_inner < |z| < 1} with 0 < r_inner < 1."""

    def __init__(self, r_inner: float):
        r_inner = float(r_inner)
        if not 0.0 < r_inner < 1.0:
            raise ValueError("annulus requires 0 < r_inner < 1")
        self.r_inner = r_inner

    def contains(self, z: complex) -> bool:
        r = abs(z)
        return self.r_inner + INTERIOR_TOL < r < 1.0 - INTERIOR_TOL

    def contains_many(self, z):
        r = np.abs(np.asarray(z))
        return (r > self.r_inner + INTERIOR_TOL) & (r < 1.0 - INTERIOR_TOL)

    def boundary_distance(self, z: complex) -> float:
        self._require_interior(z)
        r = abs(z)
        return min(1.0 - r, r - self.r_inner)

    def boundary_distance_many(self, z):
        r = np.abs(np.asarray(z))
        return np.minimum(1.0 - r, r - self.r_inner)

    def nearest_boundary_point(self, z: complex) -> complex:
        z = self._require_interior(z)
        r = abs(z)
        if abs((1.0 - r) - (r - self.r_inner)) < BOUNDARY_TOL:
            raise AmbiguousProjectionError(
                "both boundary circles are equidistant within tolerance")
        if 1.0 - r < r - self.r_inner:
            return z / r
        return self.r_inner * z / r

    def normals(self, p: complex) -> tuple[complex, complex]:
        r = abs(p)
        if abs(r - 1.0) <= BOUNDARY_TOL:
            out = p / r
            return out, -out
        if abs(r - self.r_inner) <= BOUNDARY_TOL:
            out = -p / r  # outward points into the hole
            return out, -out
        raise ValueError(f"{p} is not on either boundary circle")

    def sample_boundary(self, n: int) -> np.ndarray:
        half = n // 2
        outer = np.exp(2j * np.pi * np.arange(n - half) / max(n - half, 1))
        inner = self.r_inner * np.exp(2j * np.pi * np.arange(half) / max(half, 1))
        return np.concatenate([outer, inner])

    @property
    def diameter(self) -> float:
        return 2.0

    def osculating_radii(self) -> tuple[float, float]:
        # both radii governed by the inner circle
        return self.r_inner, self.r_inner

    def circumradius_about(self, z: complex) -> float:
        return 1.0 + abs(z)


class SmoothDomain(Domain):
    """Jordan domain bounded by a closed C^2 curve given as uniform samples.

    The parameter lives on [0, 1).  Derivative estimates use 5-point central
    differences; between samples the curve is a cubic Hermite interpolant.
    """

    DENSE_FACTOR = 8

    def __init__(self, boundary: np.ndarray, basepoint: complex):
        pts = np.asarray(boundary, dtype=complex).ravel()
        if len(pts) < 16:
            raise ValueError("need at least 16 boundary samples")
        self._g = pts
        self._n = len(pts)
        self._d1 = _central_diff(pts, 1) * self._n
        self._d2 = _central_diff(pts, 2) * self._n**2
        if not (np.all(np.isfinite(self._d1.view(float)))
                and np.all(np.isfinite(self._d2.view(float)))):
            raise ValueError("boundary derivative estimates are not finite")
        coords = np.column_stack([pts.real, pts.imag])
        if not Polygon(coords).is_valid:
            raise ValueError("boundary curve is not simple")
        if _shoelace_area(pts) <= 0:
            raise ValueError("boundary must be oriented counterclockwise")

        dense = self._eval_param(
            np.arange(self._n * self.DENSE_FACTOR)
            / (self._n * self.DENSE_FACTOR))[0]
        self._dense = dense
        self._dense_tree = cKDTree(np.column_stack([dense.real, dense.imag]))
        dense_poly = Polygon(np.column_stack([dense.real, dense.imag]))
        shapely.prepare(dense_poly)
        self._dense_polygon = dense_poly

        self.basepoint = complex(basepoint)
        self._diameter = None
        if not self.contains(self.basepoint):
            raise ValueError("basepoint must be strictly interior")

    @classmethod
    def from_parametrization(cls, fn: Callable[[np.ndarray], np.ndarray],
                             basepoint: complex, n: int = 512) -> "SmoothDomain":
        """Sample a closed curve fn : [0, 1) -> C at n uniform parameters."""
        t = np.arange(n) / n
        return cls(np.asarray(fn(t), dtype=complex), basepoint)

    @classmethod
    def ellipse(cls, a: float, b: float, n: int = 512) -> "SmoothDomain":
        return cls.from_parametrization(
            lambda t: a * np.cos(2 * np.pi * t) + 1j * b * np.sin(2 * np.pi * t),
            basepoint=0j, n=n)

    # -- curve evaluation -------------------------------------------------

    def _eval_param(self, s: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Hermite value and d/ds at global parameters s (mod 1)."""
        s = np.asarray(s, dtype=float) % 1.0
        x = s * self._n
        i = np.minimum(x.astype(int), self._n - 1)
        u = x - i
        j = (i + 1) % self._n
        h = 1.0 / self._n
        p0, p1 = self._g[i], self._g[j]
        m0, m1 = self._d1[i] * h, self._d1[j] * h
        u2, u3 = u * u, u * u * u
        val = ((2 * u3 - 3 * u2 + 1) * p0 + (u3 - 2 * u2 + u) * m0
               + (-2 * u3 + 3 * u2) * p1 + (u3 - u2) * m1)
        dval = ((6 * u2 - 6 * u) * p0 + (3 * u2 - 4 * u + 1) * m0
                + (-6 * u2 + 6 * u) * p1 + (3 * u2 - 2 * u) * m1)
        return val, dval * self._n

    def boundary_point(self, s: float) -> complex:
        return complex(self._eval_param(np.array([s]))[0][0])

    def boundary_tangent(self, s: float) -> complex:
        return complex(self._eval_param(np.array([s]))[1][0])

    def curvature_samples(self) -> np.ndarray:
        """Signed curvature at the parameter samples (ccw convex arcs > 0)."""
        cross = (self._d1.conjugate() * self._d2).imag
        return cross / np.abs(self._d1) ** 3

    # -- queries ----------------------------------------------------------

    def contains(self, z: complex) -> bool:
        z = complex(z)
        if not shapely.contains_xy(self._dense_polygon, z.real, z.imag):
            return False
        d, _ = self._dense_tree.query([z.real, z.imag])
        if d < 1e-10:  # only refine when the cheap bound is suspicious
            return self.boundary_distance_unchecked(z) > INTERIOR_TOL
        return True

    def contains_many(self, z):
        z = np.asarray(z).ravel()
        return shapely.contains_xy(self._dense_polygon, z.real, z.imag)

    def boundary_distance(self, z: complex) -> float:
        self._require_interior(z)
        return self.boundary_distance_unchecked(z)

    def boundary_distance_unchecked(self, z: complex) -> float:
        s, p = self._project(complex(z))
        return abs(complex(z) - p)

    def boundary_distance_many(self, z):
        """Vectorized distance to the boundary polyline (dense chords)."""
        z = np.asarray(z, dtype=complex).ravel()
        pts = np.column_stack([z.real, z.imag])
        _, idx = self._dense_tree.query(pts)
        m = len(self._dense)
        best = np.full(len(z), np.inf)
        for off in (-1, 0):
            a = self._dense[(idx + off) % m]
            b = self._dense[(idx + off + 1) % m]
            ab = b - a
            t = np.clip(((z - a) * ab.conjugate()).real / np.abs(ab) ** 2, 0.0, 1.0)
            best = np.minimum(best, np.abs(z - (a + t * ab)))
        return best

    def nearest_boundary_point(self, z: complex) -> complex:
        z = self._require_interior(z)
        s, p = self._project(z, check_ambiguity=True)
        return p

    def normals(self, p: complex) -> tuple[complex, complex]:
        s, q = self._project(complex(p))
        if abs(complex(p) - q) > BOUNDARY_TOL:
            raise ValueError(f"{p} is not on the boundary (within tolerance)")
        t = self.boundary_tangent(s)
        out = -1j * t / abs(t)  # ccw orientation: outward is tangent rotated -90deg
        return out, -out

    def sample_boundary(self, n: int) -> np.ndarray:
        return self._eval_param(np.arange(n) / n)[0]

    @property
    def diameter(self) -> float:
        if self._diameter is None:
            sub = self._g[:: max(1, self._n // 256)]
            self._diameter = float(np.max(np.abs(sub[:, None] - sub[None, :])))
        return self._diameter

    def osculating_radii(self) -> tuple[float, float]:
        kappa = self.curvature_samples()
        kmax = float(np.max(kappa))
        if kmax <= 0:
            raise ValueError("boundary has no convex arc; curvature data degenerate")
        r = 1.0 / kmax
        kmin = float(np.min(kappa))
        if kmin >= -1e-9:
            # no concave arc: any exterior tangent disc works, bigger only
            # weakens the comparison constants
            R = 10.0 * self.diameter
        else:
            R = 1.0 / abs(kmin)
        return r, R

    def circumradius_about(self, z: complex) -> float:
        return float(np.max(np.abs(self._g - complex(z))))

    # -- projection -------------------------------------------------------

    def _project(self, z: complex,
                 check_ambiguity: bool = False) -> tuple[float, complex]:
        """Nearest boundary parameter and point, by Newton on the Hermite curve."""
        d = np.abs(self._dense - z)
        i0 = int(np.argmin(d))
        m = len(self._dense)
        s, p, dist = self._refine_foot(i0 / m, z)
        if check_ambiguity:
            # a second local minimum at essentially the same distance means the
            # point is outside the tubular neighborhood
            sep = m // 16
            far = np.ones(m, dtype=bool)
            far[[(i0 + k) % m for k in range(-sep, sep + 1)]] = False
            if far.any():
                j0 = int(np.argmin(np.where(far, d, np.inf)))
                s2, _, dist2 = self._refine_foot(j0 / m, z)
                ds = abs(s2 - s) % 1.0
                ds = min(ds, 1.0 - ds)
                # ignore the candidate if Newton slid back into the same basin
                if ds > sep / (2.0 * m) and dist2 - dist < BOUNDARY_TOL:
                    raise AmbiguousProjectionError(
                        f"two boundary points achieve the minimum near {z}")
        return s, p

    def _refine_foot(self, s: float, z: complex) -> tuple[float, complex, float]:
        for _ in range(30):
            val, dval = (arr[0] for arr in self._eval_param(np.array([s])))
            diff = val - z
            f = (diff.conjugate() * dval).real  # d/ds of |gamma(s)-z|^2 / 2
            # second derivative of the objective, Hermite curvature via samples
            eps = 0.25 / self._n
            vp = self._eval_param(np.array([s + eps]))[1][0]
            vm = self._eval_param(np.array([s - eps]))[1][0]
            d2val = (vp - vm) / (2 * eps)
            fp = (dval.conjugate() * dval).real + (diff.conjugate() * d2val).real
            if fp <= 0:
                break
            step = f / fp
            s -= step
            if abs(step) < 1e-14:
                break
        val = self._eval_param(np.array([s]))[0][0]
        return s % 1.0, complex(val), abs(val - z)


def _central_diff(values: np.ndarray, order: int) -> np.ndarray:
    """5-point periodic central differences (per unit sample spacing)."""
    v = values
    if order == 1:
        return (-np.roll(v, -2) + 8 * np.roll(v, -1)
                - 8 * np.roll(v, 1) + np.roll(v, 2)) / 12.0
    if order == 2:
        return (-np.roll(v, -2) + 16 * np.roll(v, -1) - 30 * v
                + 16 * np.roll(v, 1) - np.roll(v, 2)) / 12.0
    raise ValueError("order must be 1 or 2")


def _shoelace_area(pts: np.ndarray) -> float:
    nxt = np.roll(pts, -1)
    return 0.5 * float(np.sum(pts.real * nxt.imag - pts.imag * nxt.real))


def domain_from_json(obj: dict) -> Domain:
    """Build a domain from the CLI JSON schema."""
    kind = obj.get("type")
    if kind == "disc":
        return UnitDisc()
    if kind == "halfplane":
        return UpperHalfPlane()
    if kind == "annulus":
        return Annulus(float(obj["r_inner"]))
    if kind == "smooth":
        boundary = np.array([complex(x, y) for x, y in obj["boundary"]])
        bx, by = obj["basepoint"]
        return SmoothDomain(boundary, complex(bx, by))
    raise ValueError(f"unknown domain type {kind!r}")


def domain_to_json(domain: Domain) -> dict:
    if isinstance(domain, UnitDisc):
        return {"type": "disc"}
    if isinstance(domain, UpperHalfPlane):
        return {"type": "halfplane"}
    if isinstance(domain, Annulus):
        return {"type": "annulus", "r_inner": domain.r_inner}
    if isinstance(domain, SmoothDomain):
        return {"type": "smooth",
                "boundary": [[p.real, p.imag] for p in domain._g],
                "basepoint": [domain.basepoint.real, domain.basepoint.imag]}
    raise TypeError(f"unsupported domain {type(domain).__name__}")
