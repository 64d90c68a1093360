import math

import numpy as np
import pytest

from invmetric import (AffineMap, BlaschkeProduct, Composition, MobiusMap,
                       MobiusTransform, Polynomial, RationalMap, compose,
                       disc_image_bound)
from invmetric.errors import PoleError
from invmetric.maps import maps_equal, random_disc_self_map

RNG = np.random.default_rng(23)


def fd(f, z, h=1e-6):
    return (f(z + h) - f(z - h)) / (2 * h)


def test_polynomial_horner():
    p = Polynomial([1, -2, 3])  # 1 - 2z + 3z^2
    assert p(2.0) == pytest.approx(9.0)
    assert p.derivative(2.0) == pytest.approx(10.0)


def test_polynomial_identity():
    p = Polynomial.identity()
    assert p(0.37 - 0.2j) == 0.37 - 0.2j
    assert p.derivative(0.5) == 1.0


def test_blaschke_values_on_circle():
    b = BlaschkeProduct([0.3, -0.2 + 0.4j], phase=0.7)
    for t in np.linspace(0, 2 * math.pi, 13):
        assert abs(abs(b(np.exp(1j * t))) - 1.0) < 1e-12


def test_blaschke_derivative():
    b = BlaschkeProduct([0.3, -0.2 + 0.4j, 0.1j], phase=1.1)
    z = 0.4 - 0.25j
    assert abs(b.derivative(z) - fd(b, z)) < 1e-8


def test_blaschke_rejects_outside_zero():
    with pytest.raises(ValueError):
        BlaschkeProduct([1.2])


def test_rational_map_and_pole():
    r = RationalMap([1, 1], [1, -0.5])  # (1+z)/(1-z/2)
    assert r(0.0) == pytest.approx(1.0)
    assert abs(r.derivative(0.3) - fd(r, 0.3)) < 1e-8
    with pytest.raises(PoleError):
        r(2.0)
    assert any(abs(p - 2.0) < 1e-9 for p in r.poles())


def test_mobius_map_wraps_transform():
    t = MobiusTransform(0.2 + 0.1j, 0.4)
    m = MobiusMap(t)
    z = 0.3 - 0.6j
    assert m(z) == t.apply(z)
    assert m.derivative(z) == t.derivative(z)


def test_composition_order_and_chain_rule():
    f = Polynomial([0, 0, 1])  # z^2
    g = AffineMap(0.5, 0.1)
    c = Composition([f, g])  # f(g(z))
    z = 0.4 + 0.2j
    assert c(z) == pytest.approx((0.5 * z + 0.1) ** 2)
    assert abs(c.derivative(z) - fd(c, z)) < 1e-8
    assert compose(f, g)(z) == c(z)


def test_disc_image_bound():
    assert disc_image_bound(AffineMap(0.5, 0.2)) == pytest.approx(0.7, abs=1e-6)
    assert disc_image_bound(Polynomial([0.0])) == 0.0
    # (z^2 + 0.3)/2 peaks at 0.65 on the boundary
    f = Polynomial([0.15, 0, 0.5])
    assert disc_image_bound(f) == pytest.approx(0.65, abs=1e-6)


def test_maps_equal():
    assert maps_equal(Polynomial.identity(), Polynomial([0, 1]))
    assert maps_equal(Polynomial([0, 1]), BlaschkeProduct([0.0], phase=0.0))
    assert not maps_equal(Polynomial([0, 1]), Polynomial([0, 1, 1e-6]))


def test_random_disc_self_map_is_self_map():
    for _ in range(25):
        f = random_disc_self_map(RNG)
        assert disc_image_bound(f, 128) <= 1.0 + 1e-12
