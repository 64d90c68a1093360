"""Holomorphic maps with exact evaluation and exact analytic derivatives.

Derivatives come from the representation (term-wise, product and chain rules);
finite differences are used only as a test oracle elsewhere.  The metric
computations amplify derivative error near the boundary, so nothing here
differentiates numerically.
"""

from __future__ import annotations

import cmath
import math
from abc import ABC, abstractmethod
from typing import Sequence

import numpy as np

from .errors import PoleError
from .mobius import MobiusTransform, _require_finite

POLE_TOL = 1e-300


class HolomorphicMap(ABC):
    @abstractmethod
    def __call__(self, z: complex) -> complex: ...

    @abstractmethod
    def derivative(self, z: complex) -> complex: ...


class Polynomial(HolomorphicMap):
    """Coefficients in ascending degree: c0 + c1 z + c2 z^2 + ..."""

    def __init__(self, coefficients: Sequence[complex]):
        coeffs = [complex(c) for c in coefficients]
        if not coeffs:
            coeffs = [0j]
        self.coefficients = tuple(coeffs)

    def __call__(self, z: complex) -> complex:
        z = _require_finite(z, "point")
        acc = 0j
        for c in reversed(self.coefficients):
            acc = acc * z + c
        return acc

    def derivative(self, z: complex) -> complex:
        z = _require_finite(z, "point")
        acc = 0j
        for k in range(len(self.coefficients) - 1, 0, -1):
            acc = acc * z + k * self.coefficients[k]
        return acc

    @classmethod
    def identity(cls) -> "Polynomial":
        return cls([0, 1])


class BlaschkeProduct(HolomorphicMap):
    """e^{i*phase} * prod_k (z - a_k)/(1 - conj(a_k) z), all |a_k| < 1."""

    def __init__(self, zeros: Sequence[complex], phase: float = 0.0):
        zeros = [complex(a) for a in zeros]
        for a in zeros:
            if abs(a) >= 1.0:
                raise ValueError("Blaschke zeros must lie strictly inside the disc")
        self.zeros = tuple(zeros)
        self.phase = float(phase)
        self._factors = tuple(MobiusTransform(a, 0.0) for a in zeros)

    def __call__(self, z: complex) -> complex:
        out = cmath.exp(1j * self.phase)
        for f in self._factors:
            out *= f.apply(z)
        return out

    def derivative(self, z: complex) -> complex:
        # product rule; the log-derivative shortcut fails at the zeros
        vals = [f.apply(z) for f in self._factors]
        ders = [f.derivative(z) for f in self._factors]
        total = 0j
        for k in range(len(vals)):
            term = ders[k]
            for j, v in enumerate(vals):
                if j != k:
                    term *= v
            total += term
        return cmath.exp(1j * self.phase) * total


class RationalMap(HolomorphicMap):
    """Quotient of two polynomials given by ascending coefficient lists."""

    def __init__(self, numerator: Sequence[complex], denominator: Sequence[complex]):
        self.numerator = Polynomial(numerator)
        self.denominator = Polynomial(denominator)
        if all(c == 0 for c in self.denominator.coefficients):
            raise ValueError("denominator is identically zero")

    def __call__(self, z: complex) -> complex:
        den = self.denominator(z)
        if abs(den) < POLE_TOL:
            raise PoleError(f"denominator vanishes at z = {z}")
        return self.numerator(z) / den

    def derivative(self, z: complex) -> complex:
        den = self.denominator(z)
        if abs(den) < POLE_TOL:
            raise PoleError(f"denominator vanishes at z = {z}")
        num = self.numerator(z)
        dnum = self.numerator.derivative(z)
        dden = self.denominator.derivative(z)
        return (dnum * den - num * dden) / den**2

    def poles(self) -> np.ndarray:
        coeffs = np.array(self.denominator.coefficients)
        nz = np.nonzero(np.abs(coeffs) > 0)[0]
        if len(nz) == 0 or nz[-1] == 0:
            return np.array([], dtype=complex)
        return np.roots(coeffs[: nz[-1] + 1][::-1])


class MobiusMap(HolomorphicMap):
    def __init__(self, transform: MobiusTransform):
        self.transform = transform

    def __call__(self, z: complex) -> complex:
        return self.transform.apply(z)

    def derivative(self, z: complex) -> complex:
        return self.transform.derivative(z)


class AffineMap(HolomorphicMap):
    def __init__(self, scale: complex, offset: complex = 0j):
        self.scale = complex(scale)
        self.offset = complex(offset)

    def __call__(self, z: complex) -> complex:
        return self.scale * z + self.offset

    def derivative(self, z: complex) -> complex:
        return self.scale


class Composition(HolomorphicMap):
    """Composition of maps, outermost first: Composition([f, g])(z) = f(g(z))."""

    def __init__(self, maps: Sequence[HolomorphicMap]):
        maps = list(maps)
        if not maps:
            raise ValueError("Composition requires at least one map")
        self.maps = tuple(maps)

    def __call__(self, z: complex) -> complex:
        for f in reversed(self.maps):
            z = f(z)
        return z

    def derivative(self, z: complex) -> complex:
        # chain rule, innermost outward
        der = 1.0 + 0j
        for f in reversed(self.maps):
            der *= f.derivative(z)
            z = f(z)
        return der


def compose(f: HolomorphicMap, g: HolomorphicMap) -> HolomorphicMap:
    """The map z -> f(g(z)); flattens nested compositions."""
    parts = []
    for m in (f, g):
        if isinstance(m, Composition):
            parts.extend(m.maps)
        else:
            parts.append(m)
    return Composition(parts)


def disc_image_bound(f: HolomorphicMap, n_boundary_samples: int = 512) -> float:
    """max |f| over uniformly spaced boundary samples of the unit circle.

    By the maximum principle this bounds sup over the disc, up to the sampling
    error of the grid.  Rational components must have their poles strictly
    outside the closed disc.
    """
    if n_boundary_samples < 1:
        raise ValueError("need at least one boundary sample")
    _check_poles_outside_closed_disc(f)
    thetas = 2.0 * math.pi * np.arange(n_boundary_samples) / n_boundary_samples
    best = 0.0
    for t in thetas:
        best = max(best, abs(f(cmath.exp(1j * t))))
    return best


def _check_poles_outside_closed_disc(f: HolomorphicMap, tol: float = 1e-9) -> None:
    if isinstance(f, RationalMap):
        poles = f.poles()
        if len(poles) and np.min(np.abs(poles)) <= 1.0 + tol:
            raise PoleError("rational map has a pole on or inside the closed disc")
    elif isinstance(f, Composition):
        for m in f.maps:
            _check_poles_outside_closed_disc(m, tol)


def maps_equal(f: HolomorphicMap, g: HolomorphicMap, tol: float = 1e-12) -> bool:
    """Extensional equality on a fixed 64-point sample of the disc."""
    for zr in _EQUALITY_SAMPLE:
        if abs(f(zr) - g(zr)) > tol:
            return False
    return True


_EQUALITY_SAMPLE = tuple(
    (0.1 + 0.8 * i / 7.0) * cmath.exp(2j * math.pi * j / 8.0)
    for i in range(8)
    for j in range(8)
)


def random_disc_self_map(rng: np.random.Generator, max_degree: int = 4,
                         allow_scale: bool = True) -> HolomorphicMap:
    """Random Blaschke product of degree 1..max_degree, optionally scaled.

    Zeros are uniform in the disc of radius 0.9, the phase is uniform, so the
    result is a disc self-map with no rejection sampling.
    """
    degree = int(rng.integers(1, max_degree + 1))
    radii = 0.9 * np.sqrt(rng.uniform(0.0, 1.0, degree))
    angles = rng.uniform(0.0, 2.0 * math.pi, degree)
    zeros = radii * np.exp(1j * angles)
    b = BlaschkeProduct(zeros, phase=float(rng.uniform(0.0, 2.0 * math.pi)))
    if allow_scale and rng.uniform() < 0.5:
        return compose(AffineMap(float(rng.uniform(0.1, 1.0))), b)
    return b
