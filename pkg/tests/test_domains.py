import math

import numpy as np
import pytest

from invmetric import (Annulus, ApproachRegionParams, SmoothDomain, UnitDisc,
                       UpperHalfPlane, domain_from_json, domain_to_json)
from invmetric.errors import AmbiguousProjectionError, PointOutsideDomainError


def test_disc_basic():
    d = UnitDisc()
    assert d.contains(0.5j) and not d.contains(1.0)
    assert d.boundary_distance(0.3) == pytest.approx(0.7)
    assert d.nearest_boundary_point(0.5j) == pytest.approx(1j)
    assert d.diameter == 2.0
    out, inward = d.normals(1.0)
    assert out == pytest.approx(1.0) and inward == pytest.approx(-1.0)


def test_disc_center_projection_ambiguous():
    with pytest.raises(AmbiguousProjectionError):
        UnitDisc().nearest_boundary_point(0.0)


def test_disc_requires_interior():
    with pytest.raises(PointOutsideDomainError):
        UnitDisc().boundary_distance(1.2)


def test_halfplane():
    h = UpperHalfPlane()
    assert h.contains(2 + 1j) and not h.contains(2 - 1j)
    assert h.boundary_distance(3 + 0.25j) == pytest.approx(0.25)
    assert h.nearest_boundary_point(3 + 0.25j) == pytest.approx(3.0)
    assert math.isinf(h.diameter)


def test_annulus():
    a = Annulus(0.2)
    assert a.contains(0.5) and not a.contains(0.1) and not a.contains(1.1)
    assert a.boundary_distance(0.9) == pytest.approx(0.1)
    assert a.boundary_distance(0.25) == pytest.approx(0.05)
    assert a.nearest_boundary_point(0.25) == pytest.approx(0.2)
    # equidistant from both circles
    with pytest.raises(AmbiguousProjectionError):
        a.nearest_boundary_point(0.6j)
    out, _ = a.normals(0.2j)
    assert out == pytest.approx(-1j)  # inner circle: outward points inward
    assert a.osculating_radii() == (0.2, 0.2)


def test_annulus_validation():
    for bad in (0.0, 1.0, -0.5):
        with pytest.raises(ValueError):
            Annulus(bad)


@pytest.fixture(scope="module")
def ellipse():
    return SmoothDomain.ellipse(2.0, 1.0)


def test_ellipse_geometry(ellipse):
    assert ellipse.contains(0j) and ellipse.contains(1.9 + 0j)
    assert not ellipse.contains(0 + 1.05j)
    assert ellipse.diameter == pytest.approx(4.0, abs=1e-3)
    r, R = ellipse.osculating_radii()
    assert r == pytest.approx(0.5, abs=1e-4)  # a*b/max curvature radius b^2/a
    assert R == pytest.approx(10 * ellipse.diameter)


def test_ellipse_boundary_distance(ellipse):
    # on the minor axis the nearest boundary point is (0, +-1)
    assert ellipse.boundary_distance(0.9j) == pytest.approx(0.1, abs=1e-6)
    assert ellipse.nearest_boundary_point(0.9j) == pytest.approx(1j, abs=1e-6)
    many = ellipse.boundary_distance_many(np.array([0.9j, 1.9 + 0j]))
    assert many[0] == pytest.approx(0.1, abs=1e-4)
    assert many[1] == pytest.approx(0.1, abs=1e-4)


def test_ellipse_normals(ellipse):
    out, inward = ellipse.normals(2.0 + 0j)
    assert out == pytest.approx(1.0, abs=1e-6)
    assert inward == pytest.approx(-1.0, abs=1e-6)


def test_ellipse_center_ambiguous():
    circle = SmoothDomain.from_parametrization(
        lambda t: np.exp(2j * np.pi * t), 0.1, n=256)
    with pytest.raises(AmbiguousProjectionError):
        circle.nearest_boundary_point(0j)


def test_self_intersecting_boundary_rejected():
    t = np.arange(64) / 64
    bowtie = np.cos(2 * np.pi * t) + 1j * np.sin(4 * np.pi * t)
    with pytest.raises(ValueError):
        SmoothDomain(bowtie, 0.5 + 0j)


def test_clockwise_boundary_rejected():
    t = np.arange(64) / 64
    cw = np.exp(-2j * np.pi * t)
    with pytest.raises(ValueError):
        SmoothDomain(cw, 0j)


def test_nontangential_region():
    d = UnitDisc()
    assert d.in_nontangential_region(1.0, 2.0, 0.9)  # radial point
    # nearly tangential point at the same boundary distance
    z = (1 - 0.05) * np.exp(0.6j)
    assert not d.in_nontangential_region(1.0, 2.0, complex(z))


def test_approach_region_params_validation():
    ApproachRegionParams(2.0, 1.0, 0.5)
    with pytest.raises(ValueError):
        ApproachRegionParams(0.5, 1.0, 0.5)  # alpha must exceed 1
    with pytest.raises(ValueError):
        ApproachRegionParams(2.0, -1.0, 0.5)


def test_json_round_trip(ellipse):
    for dom in (UnitDisc(), UpperHalfPlane(), Annulus(0.3), ellipse):
        back = domain_from_json(domain_to_json(dom))
        assert type(back) is type(dom)
    with pytest.raises(ValueError):
        domain_from_json({"type": "pac-man"})
