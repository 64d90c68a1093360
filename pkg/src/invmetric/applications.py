"""Applications of the invariant metrics on the disc.

Contraction fixed points for strictly interior self-maps, approach-region
comparability near a boundary point, boundary escape of automorphism orbits,
and Euclidean diameter decay of metric balls near the boundary.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .densities import MetricKind
from .domains import Domain, UnitDisc, ApproachRegionParams
from .errors import (NonEscapingOrbitError, NotSelfMapError,
                     NumericError, PointOutsideDomainError)
from .geodesy import distance, poincare_disc_distance
from .maps import HolomorphicMap, disc_image_bound
from .mobius import MobiusTransform

_ITERATION_CAP = 10_000


@dataclass(frozen=True)
class FixedPointReport:
    point: complex
    iterations: int
    residual: float
    epsilon_margin: float
    observed_contraction: float
    restart_points: tuple = ()
    restart_iterations: tuple = ()


@dataclass(frozen=True)
class OrbitReport:
    escape_index: int | None  # 1-based J, or None
    steps: tuple  # (j, euclidean diameter of phi_j(K), contained-in-V)


@dataclass(frozen=True)
class RegionComparisonReport:
    alphas: tuple
    betas: tuple
    n_samples: int
    gamma_counts: tuple  # samples falling in each cone region
    m_counts: tuple  # samples falling in each metric-ball region
    gamma_in_m_ratio: tuple  # [i][j]: fraction of Gamma_alpha_i inside M_beta_j
    m_in_gamma_ratio: tuple  # [j][i]: fraction of M_beta_j inside Gamma_alpha_i
    beta_for_alpha: tuple  # smallest sampled beta covering each cone, or None
    alpha_for_beta: tuple  # smallest sampled alpha covering each M region, or None

    def __post_init__(self):
        for row in self.gamma_in_m_ratio + self.m_in_gamma_ratio:
            for v in row:
                if not 0.0 <= v <= 1.0:
                    raise ValueError("inclusion ratios must lie in [0, 1]")


def epsilon_margin(f: HolomorphicMap, n_samples: int = 512) -> float:
    """Half the gap between the image's sampled sup modulus and 1."""
    bound = disc_image_bound(f, n_samples)
    if bound >= 1.0 - 1e-9:
        raise NotSelfMapError(
            f"image is not relatively compact in the disc (bound {bound:.6g})")
    return 0.5 * (1.0 - bound)


def contraction_factor_estimate(f: HolomorphicMap, n_pairs: int = 10_000,
                                seed: int = 0) -> float:
    """Sampled sup of d(f(z), f(w)) / d(z, w) over random disc pairs."""
    epsilon_margin(f)  # precondition: strictly interior image
    rng = np.random.default_rng(seed)
    worst = 0.0
    z = _uniform_disc(rng, n_pairs, 0.97)
    w = _uniform_disc(rng, n_pairs, 0.97)
    for zi, wi in zip(z, w):
        d0 = poincare_disc_distance(zi, wi)
        if d0 < 1e-12:
            continue
        worst = max(worst, poincare_disc_distance(f(zi), f(wi)) / d0)
    return worst


def _uniform_disc(rng, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, n))
    t = rng.uniform(0.0, 2.0 * math.pi, n)
    return r * np.exp(1j * t)


def _iterate_to_fixed_point(f: HolomorphicMap, z0: complex,
                            tol: float) -> tuple[complex, int]:
    z = complex(z0)
    for n in range(1, _ITERATION_CAP + 1):
        zn = f(z)
        if poincare_disc_distance(zn, z) < tol:
            return zn, n
        z = zn
    raise NumericError(f"fixed-point iteration exceeded {_ITERATION_CAP} steps")


def farkas_ritt_fixed_point(f: HolomorphicMap, tol: float = 1e-12,
                            n_contraction_pairs: int = 2000) -> FixedPointReport:
    """Fixed point of a disc self-map whose image has compact closure.

    Iterates z -> f(z) from 0, stopping when the disc distance between
    successive iterates falls below tol; 8 restarts at radius 0.9 (8th roots
    of unity) must land on the same point within 10*tol.
    """
    eps = epsilon_margin(f)
    point, iters = _iterate_to_fixed_point(f, 0.0, tol)
    starts = [0.9 * np.exp(2j * math.pi * k / 8) for k in range(8)]
    restart_pts, restart_its = [], []
    for s in starts:
        p, n = _iterate_to_fixed_point(f, s, tol)
        restart_pts.append(p)
        restart_its.append(n)
        if poincare_disc_distance(p, point) > 10.0 * tol:
            raise NumericError(
                "restarts disagree on the fixed point; contraction hypothesis "
                "violated numerically")
    factor = contraction_factor_estimate(f, n_contraction_pairs)
    return FixedPointReport(
        point=point, iterations=iters, residual=abs(f(point) - point),
        epsilon_margin=eps, observed_contraction=factor,
        restart_points=tuple(restart_pts), restart_iterations=tuple(restart_its))


def lindelof_region_comparison(domain: Domain, p: complex,
                               params: ApproachRegionParams,
                               n_samples: int = 400, seed: int = 0,
                               n_alphas: int = 4, n_betas: int = 8,
                               ) -> RegionComparisonReport:
    """Empirical inclusion thresholds between cone regions and metric-ball
    unions at a boundary point.

    Gamma_alpha = {z : |z - p| < alpha * delta(z)};  M_beta is the union of
    metric balls of radius beta centered along the inward normal segment of
    length r0.  Reports, per alpha, the smallest sampled beta whose region
    contains every sampled cone point, and vice versa.
    """
    if not isinstance(domain, UnitDisc):
        raise PointOutsideDomainError(
            "region comparison uses closed-form disc distances")
    if abs(abs(p) - 1.0) > 1e-9:
        raise ValueError(f"{p} is not a boundary point of the disc")

    rng = np.random.default_rng(seed)
    _, inward = domain.normals(p)
    # discretized normal segment; reaches far shallower than any sample so the
    # union-of-balls region is not truncated at its inner end
    spine = p + inward * np.geomspace(1e-8 * params.r0, params.r0, 256)

    alphas = tuple(map(float, np.linspace(1.25, params.alpha, n_alphas)))
    betas = tuple(map(float, np.linspace(params.beta / n_betas, params.beta,
                                         n_betas)))

    # sample near p, biased toward the boundary where the regions differ
    samples = []
    while len(samples) < n_samples:
        r = params.r0 * rng.uniform(0.0, 1.0) ** 2
        ang = rng.uniform(-math.pi / 2, math.pi / 2)
        z = p + r * inward * np.exp(1j * ang)
        if domain.contains(z) and domain.boundary_distance(complex(z)) > 1e-7:
            samples.append(complex(z))

    in_gamma = np.zeros((n_alphas, n_samples), dtype=bool)
    in_m = np.zeros((n_betas, n_samples), dtype=bool)
    for s_i, z in enumerate(samples):
        delta = domain.boundary_distance(z)
        rho = np.abs(z - spine) / np.abs(1.0 - np.conj(spine) * z)
        d_spine = float(np.arctanh(np.min(rho)))
        for a_i, a in enumerate(alphas):
            in_gamma[a_i, s_i] = abs(z - p) < a * delta
        for b_i, b in enumerate(betas):
            in_m[b_i, s_i] = d_spine < b

    def ratio(mask_a, mask_b):
        n = int(mask_a.sum())
        return 1.0 if n == 0 else float((mask_a & mask_b).sum()) / n

    g_in_m = tuple(tuple(ratio(in_gamma[i], in_m[j]) for j in range(n_betas))
                   for i in range(n_alphas))
    m_in_g = tuple(tuple(ratio(in_m[j], in_gamma[i]) for i in range(n_alphas))
                   for j in range(n_betas))
    beta_for_alpha = tuple(
        next((betas[j] for j in range(n_betas) if g_in_m[i][j] == 1.0), None)
        for i in range(n_alphas))
    alpha_for_beta = tuple(
        next((alphas[i] for i in range(n_alphas) if m_in_g[j][i] == 1.0), None)
        for j in range(n_betas))
    return RegionComparisonReport(
        alphas=alphas, betas=betas, n_samples=n_samples,
        gamma_counts=tuple(int(m.sum()) for m in in_gamma),
        m_counts=tuple(int(m.sum()) for m in in_m),
        gamma_in_m_ratio=g_in_m, m_in_gamma_ratio=m_in_g,
        beta_for_alpha=beta_for_alpha, alpha_for_beta=alpha_for_beta)


def orbit_boundary_escape(domain: Domain, phis, P: complex, K_samples,
                          V: tuple[complex, float]) -> OrbitReport:
    """First index J from which every listed automorphism maps K into V.

    K is a finite sample of a compact set; V = (center, radius) is a
    Euclidean ball.  The tracked point P must escape to the boundary along
    the list, otherwise the orbit is rejected.
    """
    if not isinstance(domain, UnitDisc):
        raise PointOutsideDomainError("orbit escape uses disc automorphisms")
    P = domain._require_interior(P)
    K = np.asarray([complex(k) for k in K_samples])
    if not domain.contains_many(K).all():
        raise PointOutsideDomainError("K sample leaves the disc")
    center, radius = complex(V[0]), float(V[1])

    track = np.array([abs(phi.apply(P)) for phi in phis])
    if len(track) < 2 or track[-1] < 1.0 - 0.25 * (1.0 - track[0]) \
            or np.any(np.diff(track) < -1e-12):
        raise NonEscapingOrbitError(
            "|phi_j(P)| does not increase toward the boundary")

    steps = []
    for j, phi in enumerate(phis, start=1):
        img = np.array([phi.apply(k) for k in K])
        diam = float(np.max(np.abs(img[:, None] - img[None, :])))
        contained = bool(np.all(np.abs(img - center) <= radius))
        steps.append((j, diam, contained))
    escape = None
    for j, _, contained in steps:
        if contained and all(c for jj, _, c in steps if jj >= j):
            escape = j
            break
    return OrbitReport(escape_index=escape, steps=tuple(steps))


def metric_ball_diameter(domain: Domain, center: complex, radius: float,
                         n_directions: int = 64,
                         metric: MetricKind = MetricKind.KOBAYASHI) -> float:
    """Euclidean diameter of the metric ball, by bisection along rays."""
    center = domain._require_interior(center)
    if radius <= 0.0:
        raise ValueError("radius must be positive")
    closed = isinstance(domain, UnitDisc) and metric in (
        MetricKind.POINCARE, MetricKind.KOBAYASHI, MetricKind.CARATHEODORY)

    def dist_to(z: complex) -> float:
        if closed:
            return poincare_disc_distance(center, z)
        return distance(domain, metric, center, z).value

    extremes = []
    for k in range(n_directions):
        e = np.exp(2j * math.pi * k / n_directions)
        # furthest interior point along the ray
        lo, hi = 0.0, domain.diameter
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if domain.contains(center + mid * e):
                lo = mid
            else:
                hi = mid
        t_edge = lo
        if dist_to(center + t_edge * e) <= radius:
            extremes.append(center + t_edge * e)  # ball reaches the boundary
            continue
        lo, hi = 0.0, t_edge
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if dist_to(center + mid * e) <= radius:
                lo = mid
            else:
                hi = mid
        extremes.append(center + lo * e)
    pts = np.asarray(extremes)
    return float(np.max(np.abs(pts[:, None] - pts[None, :])))
