"""Acceptance criteria, one test per criterion, one pass/fail line each."""

import math

import numpy as np
import pytest

from invmetric import (Annulus, Curve, MetricKind, MobiusMap, MobiusTransform,
                       Polynomial, SmoothDomain, UnitDisc, annulus_density,
                       caratheodory_density, completeness_probe,
                       contraction_factor_estimate, curve_length, distance,
                       epsilon_margin, farkas_ritt_fixed_point,
                       metric_ball_diameter, orbit_boundary_escape,
                       poincare_disc_distance, pseudohyperbolic)
from invmetric.densities import (AnalyticDiscs, DiscValuedMaps,
                                 annulus_covering_search,
                                 boundary_bracket_constants,
                                 caratheodory_lower_from_family, density_bound,
                                 kobayashi_upper_from_family)
from invmetric.geodesy import _grid_distance
from invmetric.maps import BlaschkeProduct

DISC = UnitDisc()


def report(index, ok, detail):
    print(f"[{'PASS' if ok else 'FAIL'}] criterion {index}: {detail}")
    assert ok, detail


def uniform_disc(rng, n, radius):
    r = radius * np.sqrt(rng.uniform(size=n))
    return r * np.exp(1j * rng.uniform(0, 2 * math.pi, n))


def test_criterion_01_radial_length():
    worst = 0.0
    for eps in (0.5, 0.1, 0.01, 1e-4):
        seg = Curve.from_points([0.0, 1.0 - eps])
        got = curve_length(DISC, MetricKind.POINCARE, seg)
        worst = max(worst, abs(got - 0.5 * math.log((2 - eps) / eps)))
    report(1, worst <= 1e-8,
           f"radial quadrature vs closed form, max err {worst:.3e} (tol 1e-8)")


def test_criterion_02_grid_vs_closed_form():
    rng = np.random.default_rng(2024)
    zs = uniform_disc(rng, 100, 0.9)
    ws = uniform_disc(rng, 100, 0.9)
    worst_raw, worst_ref = 0.0, 0.0
    for z, w in zip(zs, ws):
        exact = poincare_disc_distance(complex(z), complex(w))
        if exact < 1e-9:
            continue
        r = _grid_distance(DISC, MetricKind.KOBAYASHI, complex(z), complex(w))
        worst_raw = max(worst_raw, abs(r.raw_grid_value - exact) / exact)
        worst_ref = max(worst_ref, abs(r.value - exact))
    report(2, worst_raw <= 0.02 and worst_ref <= 1e-3,
           f"100 pairs: raw {worst_raw:.4f} (tol 0.02), "
           f"refined {worst_ref:.2e} (tol 1e-3)")


def test_criterion_03_disc_density_families():
    worst = 0.0
    for z in (0j, 0.5 + 0j, 0.9j):
        exact = 1.0 / (1.0 - abs(z) ** 2)
        up = kobayashi_upper_from_family(
            DISC, z, 1.0, AnalyticDiscs.for_domain(DISC, z))
        lo = caratheodory_lower_from_family(
            DISC, z, 1.0, DiscValuedMaps.for_domain(DISC, z))
        worst = max(worst, abs(up - exact), abs(lo - exact))
    report(3, worst <= 1e-6,
           f"candidate-search densities vs |xi|/(1-|z|^2), err {worst:.2e} "
           "(tol 1e-6)")


def test_criterion_04_schwarz_pick_suite():
    rng = np.random.default_rng(4)
    min_slack = math.inf
    for _ in range(1000):
        deg = int(rng.integers(1, 5))
        zeros = uniform_disc(rng, deg, 0.9)
        f = BlaschkeProduct(list(zeros), float(rng.uniform(0, 2 * math.pi)))
        a, b = map(complex, uniform_disc(rng, 2, 0.95))
        # (a) integrated form, (b) infinitesimal form
        slack_a = pseudohyperbolic(a, b) - pseudohyperbolic(f(a), f(b))
        fa = f(a)
        slack_b = (1.0 / (1.0 - abs(a) ** 2)
                   - abs(f.derivative(a)) / (1.0 - abs(fa) ** 2))
        min_slack = min(min_slack, slack_a, slack_b)
    worst_eq = 0.0
    for _ in range(50):
        m = MobiusMap(MobiusTransform(complex(uniform_disc(rng, 1, 0.9)[0]),
                                      float(rng.uniform(0, 2 * math.pi))))
        a, b = map(complex, uniform_disc(rng, 2, 0.95))
        worst_eq = max(
            worst_eq,
            abs(pseudohyperbolic(m(a), m(b)) - pseudohyperbolic(a, b)),
            abs(abs(m.derivative(a)) / (1.0 - abs(m(a)) ** 2)
                - 1.0 / (1.0 - abs(a) ** 2)))
    report(4, min_slack >= -1e-12 and worst_eq <= 1e-10,
           f"1000 Blaschke products: min slack {min_slack:.2e} (>= -1e-12); "
           f"Mobius equality err {worst_eq:.2e} (tol 1e-10)")


def test_criterion_05_distance_decreasing():
    from invmetric.maps import random_disc_self_map
    rng = np.random.default_rng(5)
    worst = -math.inf
    for _ in range(200):
        f = random_disc_self_map(rng)
        z, w = map(complex, uniform_disc(rng, 2, 0.95))
        worst = max(worst, poincare_disc_distance(f(z), f(w))
                    - poincare_disc_distance(z, w))
    report(5, worst <= 1e-9,
           f"200 random self-maps: max d(f z, f w) - d(z, w) = {worst:.2e} "
           "(tol 1e-9)")


def test_criterion_06_majorization_and_gap():
    ann = Annulus(0.2)
    rng = np.random.default_rng(6)
    worst = -math.inf
    for _ in range(64):
        rho = rng.uniform(0.25, 0.95)
        z = complex(rho * np.exp(1j * rng.uniform(0, 2 * math.pi)))
        worst = max(worst, caratheodory_density(ann, z, 1.0).lower
                    - annulus_density(0.2, z))
    min_gap = math.inf
    for k in range(64):
        z = complex(math.sqrt(0.2) * np.exp(2j * math.pi * k / 64))
        min_gap = min(min_gap, annulus_density(0.2, z)
                      - caratheodory_density(ann, z, 1.0).lower)
    report(6, worst <= 1e-9 and min_gap > 0.0,
           f"annulus: max (Car lower - Kob) = {worst:.2e} (tol 1e-9); "
           f"min gap on the core circle {min_gap:.3f} (> 0)")


def test_criterion_07_boundary_bracket():
    ell = SmoothDomain.ellipse(2.0, 1.0)
    c, C = boundary_bracket_constants(ell)
    rng = np.random.default_rng(7)
    lo, hi, inversions = math.inf, -math.inf, 0
    for _ in range(500):
        p = ell._eval_param(np.array([rng.uniform()]))[0][0]
        _, inward = ell.normals(p)
        z = complex(p + rng.uniform(1e-3, 0.1) * inward)
        b = density_bound(ell, MetricKind.KOBAYASHI, z, 1.0)
        if b.lower > b.upper:
            inversions += 1
        delta = ell.boundary_distance(z)
        lo = min(lo, b.lower * delta)
        hi = max(hi, b.upper * delta)
    report(7, lo >= c and hi <= C + 1e-12 and inversions == 0,
           f"ellipse bracket * delta in [{lo:.4f}, {hi:.4f}] vs "
           f"[c, C] = [{c:.4f}, {C:.1f}]; inversions {inversions}")


def test_criterion_08_fixed_point():
    f = Polynomial([0.15, 0.0, 0.5])  # (z^2 + 0.3)/2
    rep = farkas_ritt_fixed_point(f, tol=1e-12)
    target = 1.0 - math.sqrt(0.7)
    errs = [abs(rep.point - target)] + [abs(p - target)
                                        for p in rep.restart_points]
    iters = [rep.iterations, *rep.restart_iterations]
    bound = 1.0 / (1.0 + 0.175) + 1e-6
    ok = (max(errs) <= 1e-10 and max(iters) <= 60
          and rep.observed_contraction <= bound)
    report(8, ok,
           f"fixed point 1 - sqrt(0.7): max err {max(errs):.2e} (tol 1e-10), "
           f"max iters {max(iters)} (<= 60), contraction "
           f"{rep.observed_contraction:.4f} (<= {bound:.4f})")


def test_criterion_09_completeness():
    eps_list = [10.0 ** -k for k in range(1, 7)]
    table = completeness_probe(DISC, MetricKind.POINCARE, 0, 1, eps_list)
    lengths = [v for _, v in table]
    disc_ok = (lengths == sorted(lengths) and lengths[-1] > 7.25)

    ell = SmoothDomain.ellipse(2.0, 1.0)
    c, _ = boundary_bracket_constants(ell)
    p = complex(ell._eval_param(np.array([0.1]))[0][0])
    _, inward = ell.normals(p)
    z0 = p + 0.8 * inward
    etab = completeness_probe(ell, MetricKind.KOBAYASHI, z0, p,
                              [1e-1, 1e-2, 1e-3, 1e-4], tol=1e-6)
    ell_ok = all(v > c * math.log(1.0 / e) - 5.0 for e, v in etab)
    margin = min(v - (c * math.log(1.0 / e) - 5.0) for e, v in etab)
    report(9, disc_ok and ell_ok,
           f"disc length at 1e-6 = {lengths[-1]:.3f} (> 7.25), increasing; "
           f"ellipse min margin over c*log(1/eps)-5 is {margin:.3f} (> 0)")


def test_criterion_10_ball_diameter_decay():
    diams = [metric_ball_diameter(DISC, 1.0 - 2.0 ** -k, 1.0,
                                  n_directions=64) for k in range(1, 11)]
    decreasing = all(a > b for a, b in zip(diams, diams[1:]))
    report(10, decreasing and diams[7] < 0.05,
           f"ball diameters strictly decreasing, k=8 value {diams[7]:.4f} "
           "(< 0.05)")


def test_criterion_11_orbit_escape():
    phis = [MobiusTransform(-(1.0 - 2.0 ** -j), 0.0) for j in range(1, 13)]
    K = [0.5 * np.exp(2j * math.pi * k / 64) for k in range(64)]
    K += [0.25 * np.exp(2j * math.pi * k / 32) for k in range(32)] + [0.0]
    rep = orbit_boundary_escape(DISC, phis, 0.0, K, (1.0, 0.1))
    diams = [d for _, d, _ in rep.steps]
    tail_ok = rep.escape_index is not None and all(
        a > b for a, b in zip(diams[rep.escape_index - 1:],
                              diams[rep.escape_index:]))
    report(11, tail_ok,
           f"escape index J = {rep.escape_index}, image diameters strictly "
           "decreasing from J onward")


def test_criterion_12_annulus_oracle_self_consistency():
    rng = np.random.default_rng(12)
    worst = 0.0
    for _ in range(32):
        rho = rng.uniform(0.25, 0.95)
        z = complex(rho * np.exp(1j * rng.uniform(0, 2 * math.pi)))
        worst = max(worst, abs(annulus_covering_search(0.2, z)
                               - annulus_density(0.2, z)))
    report(12, worst <= 1e-4,
           f"covering-map formula vs extremal search, max err {worst:.2e} "
           "(tol 1e-4)")
