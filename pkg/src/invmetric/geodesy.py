"""Curve lengths and integrated distances.

Closed forms on the disc and half-plane; elsewhere a graded-grid shortest
path (node spacing proportional to the local boundary distance) followed by
multiscale polyline refinement.  Estimated distances carry a witness path and
a [lower, upper] bracket: the upper bound integrates the metric's upper
density along the witness, the lower bound integrates the lower density.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra as _sparse_dijkstra
from scipy.spatial import cKDTree

from .densities import (DensityBound, DiscValuedMaps, MetricKind,
                        density_bound, pseudohyperbolic, vector_density)
from .domains import (Annulus, Domain, SmoothDomain, UnitDisc, UpperHalfPlane,
                      BOUNDARY_TOL)
from .errors import (CurveExitsDomainError, EmptyFamilyError,
                     GridDisconnectedError, PointOutsideDomainError,
                     QuadratureError)
from .maps import HolomorphicMap
from .mobius import cayley, cayley_inverse, mobius_to_zero

# 3-point Gauss-Legendre on [0, 1]
_GL3_T = (0.5 - math.sqrt(15.0) / 10.0, 0.5, 0.5 + math.sqrt(15.0) / 10.0)
_GL3_W = (5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0)
# 5-point, used for final reported lengths
_GL5_X, _GL5_W = np.polynomial.legendre.leggauss(5)
_GL5_T = 0.5 * (_GL5_X + 1.0)
_GL5_W = 0.5 * _GL5_W


class Segment:
    def point(self, t: float) -> complex: raise NotImplementedError
    def velocity(self, t: float) -> complex: raise NotImplementedError


class FunctionSegment(Segment):
    """Analytic segment given by callables for position and velocity."""

    def __init__(self, fn: Callable[[float], complex],
                 dfn: Callable[[float], complex]):
        self.fn, self.dfn = fn, dfn

    def point(self, t): return self.fn(t)
    def velocity(self, t): return self.dfn(t)


class LinearSegment(Segment):
    def __init__(self, p0: complex, p1: complex):
        self.p0, self.p1 = complex(p0), complex(p1)

    def point(self, t): return self.p0 + t * (self.p1 - self.p0)
    def velocity(self, t): return self.p1 - self.p0


class Curve:
    """Piecewise C^1 curve; consecutive segments share endpoints."""

    def __init__(self, segments: Sequence[Segment]):
        segments = list(segments)
        if not segments:
            raise ValueError("curve needs at least one segment")
        for s, t in zip(segments, segments[1:]):
            if abs(s.point(1.0) - t.point(0.0)) > 1e-9:
                raise ValueError("consecutive segments must share endpoints")
        self.segments = tuple(segments)

    @classmethod
    def from_function(cls, fn, dfn) -> "Curve":
        return cls([FunctionSegment(fn, dfn)])

    @classmethod
    def from_points(cls, pts: Sequence[complex]) -> "Curve":
        pts = [complex(p) for p in pts]
        if len(pts) == 1:
            return cls([LinearSegment(pts[0], pts[0])])
        return cls([LinearSegment(a, b) for a, b in zip(pts, pts[1:])])

    @property
    def start(self) -> complex: return self.segments[0].point(0.0)

    @property
    def end(self) -> complex: return self.segments[-1].point(1.0)

    def sample(self, n_per_segment: int = 16) -> tuple[np.ndarray, np.ndarray]:
        """(global t, points) arrays for export."""
        ts, pts = [], []
        m = len(self.segments)
        for i, seg in enumerate(self.segments):
            local = np.linspace(0.0, 1.0, n_per_segment, endpoint=(i == m - 1))
            ts.append((i + local) / m)
            pts.append([seg.point(t) for t in local])
        return np.concatenate(ts), np.concatenate([np.asarray(p) for p in pts])

    def vertices(self) -> np.ndarray:
        """Segment endpoints (exact for polyline curves)."""
        v = [seg.point(0.0) for seg in self.segments]
        v.append(self.end)
        return np.asarray(v)


@dataclass(frozen=True)
class DistanceResult:
    value: float
    lower: float
    upper: float
    path: Curve
    method: str  # "closed-form" | "grid+refine"
    raw_grid_value: float | None = None  # shortest-path value before refinement

    def __post_init__(self):
        if not (self.lower <= self.value * (1 + 1e-12) + 1e-300
                and self.value <= self.upper * (1 + 1e-12) + 1e-300):
            raise ValueError("distance bracket must satisfy lower <= value <= upper")


def adaptive_simpson(f: Callable[[float], float], a: float, b: float,
                     tol: float = 1e-9, max_depth: int = 40) -> float:
    """Adaptive Simpson quadrature with interval bisection; deterministic."""
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0

    def recur(a, b, fa, fm, fb, whole, tol, depth):
        m = 0.5 * (a + b)
        lm, rm = 0.5 * (a + m), 0.5 * (m + b)
        flm, frm = f(lm), f(rm)
        left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
        right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
        if depth >= max_depth:
            raise QuadratureError("adaptive Simpson exceeded maximum depth")
        if abs(left + right - whole) <= 15.0 * tol:
            return left + right + (left + right - whole) / 15.0
        # floor the per-child tolerance: strict halving underflows against the
        # 1/delta blow-up at boundary-adjacent endpoints
        child = max(0.5 * tol, 1e-13)
        return (recur(a, m, fa, flm, fm, left, child, depth + 1)
                + recur(m, b, fm, frm, fb, right, child, depth + 1))

    return recur(a, b, fa, fm, fb, whole, tol, 0)


def curve_length(domain: Domain, metric: MetricKind, curve: Curve,
                 side: str = "upper", tol: float = 1e-9) -> float:
    """Length of a curve by adaptive quadrature of the density along it."""
    total = 0.0
    seg_tol = tol / len(curve.segments)
    for seg in curve.segments:
        def integrand(t: float) -> float:
            z, v = seg.point(t), seg.velocity(t)
            try:
                b = density_bound(domain, metric, z, v)
            except PointOutsideDomainError as exc:
                raise CurveExitsDomainError(str(exc)) from exc
            return b.upper if side == "upper" else b.lower
        total += adaptive_simpson(integrand, 0.0, 1.0, seg_tol)
    return total


# -- closed forms ------------------------------------------------------------


def poincare_disc_distance(p: complex, q: complex) -> float:
    """(1/2) log((1 + rho)/(1 - rho)) with rho the pseudohyperbolic distance."""
    return math.atanh(pseudohyperbolic(p, q))


def _disc_geodesic(z: complex, w: complex) -> Curve:
    m = mobius_to_zero(z)
    minv = m.inverse()
    q = m.apply(w)
    return Curve.from_function(
        lambda t: minv.apply(t * q),
        lambda t: minv.derivative(t * q) * q)


def _halfplane_geodesic(z: complex, w: complex) -> Curve:
    inner = _disc_geodesic(cayley(z), cayley(w)).segments[0]
    return Curve.from_function(
        lambda t: cayley_inverse(inner.point(t)),
        lambda t: 2j / (1.0 - inner.point(t)) ** 2 * inner.velocity(t))


def _closed_form(domain: Domain, z: complex, w: complex) -> DistanceResult:
    if isinstance(domain, UnitDisc):
        d = poincare_disc_distance(z, w)
        path = _disc_geodesic(z, w)
    else:
        d = poincare_disc_distance(cayley(z), cayley(w))
        path = _halfplane_geodesic(z, w)
    return DistanceResult(d, d, d, path, "closed-form")


# -- graded grid -------------------------------------------------------------

_NEIGHBOR_FACTOR = 3.25  # covers the (1,1), (2,1) and (3,1) lattice offsets
_grid_cache: dict = {}


def _workers() -> int:
    """Thread cap for internal parallelism (INVMETRIC_THREADS; -1 = all)."""
    raw = os.environ.get("INVMETRIC_THREADS", "")
    try:
        n = int(raw)
        return n if n > 0 else -1
    except ValueError:
        return -1


def _spacing_params(domain: Domain, delta_floor: float):
    h0 = domain.diameter / 6.0
    kmax = max(0, math.ceil(math.log2(8.0 * h0 / delta_floor)))
    return h0, kmax


def _node_levels(delta: np.ndarray, h0: float, kmax: int) -> np.ndarray:
    target = np.maximum(delta, 1e-300) / 8.0
    with np.errstate(divide="ignore"):
        lev = np.round(np.log2(h0 / target))
    return np.clip(lev, 0, kmax).astype(int)


def _bounding_box(domain: Domain) -> tuple[float, float, float, float]:
    if isinstance(domain, (UnitDisc, Annulus)):
        return -1.0, 1.0, -1.0, 1.0
    if isinstance(domain, SmoothDomain):
        b = domain.sample_boundary(1024)
        return (float(b.real.min()), float(b.real.max()),
                float(b.imag.min()), float(b.imag.max()))
    raise TypeError("grid solver needs a bounded domain")


def _build_grid(domain: Domain, metric: MetricKind, delta_floor: float):
    key = (id(domain), metric, round(math.log2(delta_floor), 6))
    hit = _grid_cache.get(key)
    if hit is not None:
        return hit[1]  # hit[0] pins the domain so its id stays unique

    h0, kmax = _spacing_params(domain, delta_floor)
    x0, x1, y0, y1 = _bounding_box(domain)
    nodes, levels = [], []
    for k in range(kmax + 1):
        h = h0 / 2**k
        off = 0.5 * h if k % 2 else 0.0  # decorrelate successive levels
        xs = np.arange(x0 - h, x1 + h, h) + off
        ys = np.arange(y0 - h, y1 + h, h) + off
        zz = (xs[:, None] + 1j * ys[None, :]).ravel()
        zz = zz[domain.contains_many(zz)]
        if len(zz) == 0:
            continue
        delta = domain.boundary_distance_many(zz)
        keep = (delta >= delta_floor) & (_node_levels(delta, h0, kmax) == k)
        zz = zz[keep]
        nodes.append(zz)
        levels.append(np.full(len(zz), k))
    if not nodes:
        raise GridDisconnectedError("grid is empty; delta_floor too large")
    nodes = np.concatenate(nodes)
    levels = np.concatenate(levels)
    spac = h0 / 2.0**levels

    tree = cKDTree(np.column_stack([nodes.real, nodes.imag]))
    balls = tree.query_ball_point(np.column_stack([nodes.real, nodes.imag]),
                                  _NEIGHBOR_FACTOR * spac, workers=_workers())
    src = np.repeat(np.arange(len(nodes)), [len(b) for b in balls])
    dst = np.concatenate([np.asarray(b, dtype=int) for b in balls])
    keep = src < dst
    src, dst = src[keep], dst[keep]

    dens = _edge_density(domain, metric)
    wts = _segment_quadrature(dens, nodes[src], nodes[dst])
    ok = np.isfinite(wts)
    src, dst, wts = src[ok], dst[ok], wts[ok]

    entry = (nodes, spac, tree, src, dst, wts)
    _grid_cache[key] = (domain, entry)
    return entry


def _edge_density(domain: Domain, metric: MetricKind):
    """Vectorized upper density with an inside-the-domain guard."""
    return _edge_density_side(domain, metric, "upper")


def _segment_quadrature(dens, a: np.ndarray, b: np.ndarray,
                        rule: str = "gl3") -> np.ndarray:
    """Per-segment metric lengths; one batched density call per invocation."""
    ts, ws = (_GL3_T, _GL3_W) if rule == "gl3" else (_GL5_T, _GL5_W)
    a = np.atleast_1d(a)
    d = np.atleast_1d(b) - a
    zq = (a[None, :] + np.asarray(ts)[:, None] * d[None, :]).ravel()
    xq = np.broadcast_to(d, (len(ts), len(d))).ravel()
    vals = dens(zq, xq).reshape(len(ts), len(d))
    return np.asarray(ws) @ vals


def _polyline_length(dens, pts: np.ndarray, rule: str = "gl3") -> float:
    return float(np.sum(_segment_quadrature(dens, pts[:-1], pts[1:], rule)))


def _resample_by_length(dens, pts: np.ndarray, n: int) -> np.ndarray:
    mid = 0.5 * (pts[:-1] + pts[1:])
    seg = dens(mid, pts[1:] - pts[:-1])
    seg = np.where(np.isfinite(seg), seg, 0.0)
    cum = np.concatenate([[0.0], np.cumsum(seg)])
    if cum[-1] <= 0:
        cum = np.arange(len(pts), dtype=float)
    s = cum / cum[-1]
    target = np.linspace(0.0, 1.0, n)
    return np.interp(target, s, pts.real) + 1j * np.interp(target, s, pts.imag)


def _refine_polyline(domain: Domain, dens, pts: np.ndarray,
                     target_spacing: float = 0.02, max_sweeps: int = 50,
                     sweep_tol: float = 1e-6) -> np.ndarray:
    """Multiscale perpendicular descent on interior vertices.

    Alternates dyadic resampling to finer polylines with red-black
    golden-section minimization of each interior vertex along the normal to
    the chord of its neighbors; stops a level when the per-sweep improvement
    drops below sweep_tol or the global sweep budget runs out.
    """
    total = _polyline_length(dens, pts)
    n_final = int(np.clip(total / target_spacing, 16, 256))
    schedule = [16]
    while schedule[-1] < n_final:
        schedule.append(min(2 * schedule[-1], n_final))
    sweeps_left = max_sweeps
    for n in schedule:
        pts = _resample_by_length(dens, pts, n)
        prev = _polyline_length(dens, pts)
        while sweeps_left > 0:
            sweeps_left -= 1
            for parity in (1, 0):
                pts = _rb_pass(dens, pts, parity)
            cur = _polyline_length(dens, pts)
            if prev - cur < sweep_tol:
                break
            prev = cur
    return pts


_GOLD = (math.sqrt(5.0) - 1.0) / 2.0


def _rb_pass(dens, pts: np.ndarray, parity: int) -> np.ndarray:
    idx = np.arange(1, len(pts) - 1)
    idx = idx[idx % 2 == parity]
    if len(idx) == 0:
        return pts
    prev, cur, nxt = pts[idx - 1], pts[idx], pts[idx + 1]
    chord = nxt - prev
    mag = np.abs(chord)
    mag[mag == 0] = 1.0
    normal = 1j * chord / mag

    def cost(s):
        cand = cur + s * normal
        both = _segment_quadrature(dens, np.concatenate([prev, cand]),
                                   np.concatenate([cand, nxt]))
        return both[:len(cand)] + both[len(cand):]

    half = 0.35 * mag
    a, b = -half, half.copy()
    for _ in range(20):
        x1 = b - _GOLD * (b - a)
        x2 = a + _GOLD * (b - a)
        keep_left = cost(x1) < cost(x2)
        b = np.where(keep_left, x2, b)
        a = np.where(keep_left, a, x1)
    best = 0.5 * (a + b)
    moved = cur + best * normal
    improved = cost(best) <= cost(np.zeros_like(best))
    out = pts.copy()
    out[idx] = np.where(improved, moved, cur)
    return out


def _grid_distance(domain: Domain, metric: MetricKind, z: complex, w: complex,
                   refine: bool = True) -> DistanceResult:
    default_floor = 1e-3 * domain.diameter
    dz, dw = domain.boundary_distance(z), domain.boundary_distance(w)
    floor = max(default_floor, 0.25 * min(dz, dw))
    # quantize dyadically so pairs share cached grids
    floor = default_floor * 2.0 ** max(
        0, math.floor(math.log2(floor / default_floor)))

    nodes, spac, tree, src, dst, wts = _build_grid(domain, metric, floor)
    dens = _edge_density(domain, metric)
    h0, kmax = _spacing_params(domain, floor)

    n = len(nodes)
    ends = np.array([z, w])
    end_lev = _node_levels(domain.boundary_distance_many(ends), h0, kmax)
    e_src, e_dst, e_wts = [], [], []
    for t_i, (pt, lev) in enumerate(zip(ends, end_lev)):
        rad = _NEIGHBOR_FACTOR * h0 / 2**int(lev)
        nbr = tree.query_ball_point([pt.real, pt.imag], rad)
        while not nbr and rad < domain.diameter:
            rad *= 2.0
            nbr = tree.query_ball_point([pt.real, pt.imag], rad)
        if not nbr:
            raise GridDisconnectedError("endpoint connects to no grid node")
        nbr = np.asarray(nbr, dtype=int)
        ww = _segment_quadrature(dens, np.full(len(nbr), pt), nodes[nbr])
        ok = np.isfinite(ww)
        e_src.append(np.full(ok.sum(), n + t_i))
        e_dst.append(nbr[ok])
        e_wts.append(ww[ok])
    # direct chord between the endpoints, when it stays inside; composite
    # rule, since a single low-order panel underestimates the boundary blow-up
    cp = np.linspace(z, w, 65)
    chord_w = float(np.sum(_segment_quadrature(dens, cp[:-1], cp[1:],
                                               rule="gl5")))
    e_src.append(np.array([n]))
    e_dst.append(np.array([n + 1]))
    e_wts.append(np.array([chord_w]))

    all_src = np.concatenate([src, np.concatenate(e_src)])
    all_dst = np.concatenate([dst, np.concatenate(e_dst)])
    all_wts = np.concatenate([wts, np.concatenate(e_wts)])
    ok = np.isfinite(all_wts)
    all_src, all_dst, all_wts = all_src[ok], all_dst[ok], all_wts[ok]

    graph = coo_matrix(
        (np.concatenate([all_wts, all_wts]),
         (np.concatenate([all_src, all_dst]), np.concatenate([all_dst, all_src]))),
        shape=(n + 2, n + 2)).tocsr()
    dist, pred = _sparse_dijkstra(graph, indices=n, return_predecessors=True)
    if not np.isfinite(dist[n + 1]):
        raise GridDisconnectedError(
            "no grid route between the endpoints; grid too coarse")

    path_idx = []
    i = n + 1
    while i >= 0 and i != n:
        path_idx.append(i)
        i = pred[i]
    path_idx.append(n)
    path_idx.reverse()
    all_pts = np.concatenate([nodes, ends])
    pts = all_pts[path_idx]
    raw_value = float(dist[n + 1])

    if refine:
        pts = _refine_polyline(domain, dens, pts)
    upper = _polyline_length(dens, pts, rule="gl5")
    lower_dens = _edge_density_side(domain, metric, "lower")
    lower = _polyline_length(lower_dens, pts, rule="gl5")
    value = min(upper, raw_value) if not refine else upper
    return DistanceResult(value, min(lower, value), max(upper, value),
                          Curve.from_points(pts), "grid+refine",
                          raw_grid_value=raw_value)


def _edge_density_side(domain: Domain, metric: MetricKind, side: str):
    dens = vector_density(domain, metric, side)

    def guarded(z, xi):
        out = np.full(np.shape(z), np.inf)
        inside = domain.contains_many(z)
        if inside.any():
            out[inside] = dens(np.asarray(z)[inside],
                               np.broadcast_to(xi, np.shape(z))[inside])
        return out
    return guarded


# -- public distance API ------------------------------------------------------


def distance(domain: Domain, metric: MetricKind, z: complex, w: complex,
             refine: bool = True) -> DistanceResult:
    """Integrated distance with bracket and witness path."""
    z = domain._require_interior(z)
    w = domain._require_interior(w)
    if z == w:
        zero = Curve.from_points([z])
        return DistanceResult(0.0, 0.0, 0.0, zero, "closed-form")
    if isinstance(domain, (UnitDisc, UpperHalfPlane)) and metric in (
            MetricKind.POINCARE, MetricKind.KOBAYASHI, MetricKind.CARATHEODORY):
        return _closed_form(domain, z, w)
    # canonical argument order keeps the estimate exactly symmetric
    if (w.real, w.imag) < (z.real, z.imag):
        return distance(domain, metric, w, z, refine)
    return _grid_distance(domain, metric, z, w, refine)


def geodesic_witness(domain: Domain, metric: MetricKind, z: complex,
                     w: complex) -> Curve:
    return distance(domain, metric, z, w).path


def completeness_probe(domain: Domain, metric: MetricKind, z0: complex,
                       boundary_target: complex, epsilons: Sequence[float],
                       side: str = "lower", tol: float = 1e-9,
                       ) -> list[tuple[float, float]]:
    """Lengths of truncated segments from z0 toward a boundary point.

    The segment is cut at parameter 1 - eps for each requested eps; bracket
    metrics integrate the lower density (certified divergence evidence).
    """
    z0 = domain._require_interior(z0)
    p = complex(boundary_target)
    if not _on_boundary(domain, p):
        raise ValueError(f"{p} is not on the boundary")
    out = []
    for eps in sorted(epsilons, reverse=True):
        if not 0.0 < eps <= 1.0:
            raise ValueError("epsilons must lie in (0, 1]")
        endpoint = z0 + (1.0 - eps) * (p - z0)
        if eps == 1.0:
            out.append((eps, 0.0))
            continue
        seg = Curve.from_points([z0, endpoint])
        out.append((eps, curve_length(domain, metric, seg, side=side, tol=tol)))
    return out


def _on_boundary(domain: Domain, p: complex, tol: float = 1e-6) -> bool:
    if isinstance(domain, UnitDisc):
        return abs(abs(p) - 1.0) <= BOUNDARY_TOL
    if isinstance(domain, UpperHalfPlane):
        return abs(p.imag) <= BOUNDARY_TOL
    if isinstance(domain, Annulus):
        return (abs(abs(p) - 1.0) <= BOUNDARY_TOL
                or abs(abs(p) - domain.r_inner) <= BOUNDARY_TOL)
    if isinstance(domain, SmoothDomain):
        _, foot = domain._project(p)
        return abs(foot - p) <= tol
    return False


def caratheodory_distance_lower(domain: Domain, z: complex, w: complex,
                                family: DiscValuedMaps | None = None) -> float:
    """max over disc-valued maps f of the disc distance of f(z), f(w).

    A certified lower bound for the sup-defined distance, and hence for the
    Kobayashi distance as well.
    """
    z = domain._require_interior(z)
    w = domain._require_interior(w)
    if family is None:
        family = DiscValuedMaps.for_domain(domain, z)
    if not family.maps:
        raise EmptyFamilyError("disc-valued family is empty")
    if z == w:
        return 0.0
    return max(poincare_disc_distance(f(z), f(w)) for f in family.maps)
