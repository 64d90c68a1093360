import math

import numpy as np
import pytest

from invmetric import (AffineMap, ApproachRegionParams, MetricKind, MobiusMap,
                       MobiusTransform, Polynomial, UnitDisc,
                       contraction_factor_estimate, epsilon_margin,
                       farkas_ritt_fixed_point, lindelof_region_comparison,
                       metric_ball_diameter, orbit_boundary_escape)
from invmetric.errors import NonEscapingOrbitError, NotSelfMapError

DISC = UnitDisc()


def test_epsilon_margin_examples():
    assert epsilon_margin(AffineMap(0.5, 0.2)) == pytest.approx(0.15, abs=1e-6)
    assert epsilon_margin(Polynomial([0.0])) == pytest.approx(0.5)
    assert epsilon_margin(Polynomial([0.15, 0, 0.5])) == pytest.approx(
        0.175, abs=1e-6)


def test_epsilon_margin_rejects_isometry():
    with pytest.raises(NotSelfMapError):
        epsilon_margin(MobiusMap(MobiusTransform(0.3, 0.0)))


def test_fixed_point_affine():
    rep = farkas_ritt_fixed_point(AffineMap(0.5, 0.2), tol=1e-13,
                                  n_contraction_pairs=200)
    assert rep.point == pytest.approx(0.4, abs=1e-10)
    assert rep.residual <= 1e-10
    for p in rep.restart_points:
        assert abs(p - 0.4) < 1e-10


def test_fixed_point_constant_map():
    rep = farkas_ritt_fixed_point(Polynomial([0.3 - 0.1j]), tol=1e-13,
                                  n_contraction_pairs=100)
    assert rep.point == pytest.approx(0.3 - 0.1j)
    assert rep.iterations <= 2


def test_contraction_chain():
    f = AffineMap(0.5, 0.2)
    eps = epsilon_margin(f)
    factor = contraction_factor_estimate(f, n_pairs=2000)
    assert factor <= 1.0 / (1.0 + eps) + 1e-6


def test_contraction_rejects_mobius():
    with pytest.raises(NotSelfMapError):
        contraction_factor_estimate(MobiusMap(MobiusTransform(0.2, 0.0)), 100)


def test_orbit_escape_trivial_example():
    # phi_j(0) = a_j = 1 - 2^{-j}; K = {0}; V = ball(1, 0.1) gives J = 4
    phis = [MobiusTransform(-(1 - 2.0 ** -j), 0.0) for j in range(1, 9)]
    rep = orbit_boundary_escape(DISC, phis, 0.0, [0.0], (1.0, 0.1))
    assert rep.escape_index == 4
    for j, diam, contained in rep.steps:
        assert diam == 0.0
        assert contained == (j >= 4)


def test_orbit_escape_compact_set():
    phis = [MobiusTransform(-(1 - 2.0 ** -j), 0.0) for j in range(1, 13)]
    K = [0.5 * np.exp(2j * math.pi * k / 32) for k in range(32)] + [0.0]
    rep = orbit_boundary_escape(DISC, phis, 0.0, K, (1.0, 0.1))
    assert rep.escape_index is not None
    diams = [d for _, d, _ in rep.steps]
    tail = diams[rep.escape_index - 1:]
    assert all(x > y for x, y in zip(tail, tail[1:]))
    # containment is monotone once achieved
    contained = [c for _, _, c in rep.steps]
    assert all(contained[rep.escape_index - 1:])


def test_orbit_rejects_non_escaping():
    phis = [MobiusTransform(0.0, 0.1 * j) for j in range(1, 6)]  # rotations
    with pytest.raises(NonEscapingOrbitError):
        orbit_boundary_escape(DISC, phis, 0.5, [0.0], (1.0, 0.1))


def test_region_comparison_report():
    rep = lindelof_region_comparison(
        DISC, 1.0, ApproachRegionParams(3.0, 3.0, 0.5), n_samples=200, seed=1)
    for row in rep.gamma_in_m_ratio:
        for v in row:
            assert 0.0 <= v <= 1.0
    # the cone regions nest, so the covering beta thresholds are monotone
    finite = [b for b in rep.beta_for_alpha if b is not None]
    assert finite == sorted(finite)
    # points on the inward normal lie in every sampled M region
    assert rep.m_counts[-1] >= rep.m_counts[0]


def test_metric_ball_diameter_disc():
    d1 = metric_ball_diameter(DISC, 0.0, 1.0, n_directions=16)
    # closed-form inversion: the ball of radius 1 at 0 is |z| < tanh(1)
    assert d1 == pytest.approx(2 * math.tanh(1.0), abs=1e-6)
    d_small = metric_ball_diameter(DISC, 0.0, 0.25, n_directions=16)
    assert d_small < d1


def test_metric_ball_requires_interior_center():
    with pytest.raises(Exception):
        metric_ball_diameter(DISC, 1.0, 1.0)
