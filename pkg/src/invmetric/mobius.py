"""Disc automorphisms in canonical (center, rotation) form, plus the Cayley map.

Every conformal self-map of the unit disc is stored as

    z  ->  e^{i*theta} * (z - a) / (1 - conj(a) * z),        |a| < 1,

which gives a unique (a, theta) pair and therefore cheap equality testing.
Composition and inversion re-derive the canonical parameters in closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import NumericError, PointOutsideDomainError

DENOM_FLOOR = 1e-300
TWO_PI = 2.0 * math.pi


def _require_finite(z: complex, what: str = "value") -> complex:
    z = complex(z)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        raise ValueError(f"{what} must have finite components, got {z!r}")
    return z


@dataclass(frozen=True)
class MobiusTransform:
    """Disc automorphism z -> e^{i*theta} (z - a)/(1 - conj(a) z)."""

    a: complex = 0j
    theta: float = 0.0

    def __post_init__(self):
        a = _require_finite(self.a, "Mobius center")
        if abs(a) >= 1.0:
            raise ValueError(f"Mobius center must satisfy |a| < 1, got |a| = {abs(a)}")
        if not math.isfinite(self.theta):
            raise ValueError("rotation angle must be finite")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "theta", float(self.theta) % TWO_PI)

    @classmethod
    def identity(cls) -> "MobiusTransform":
        return cls(0j, 0.0)

    @property
    def is_identity(self) -> bool:
        return self.a == 0 and (self.theta == 0.0 or abs(self.theta - TWO_PI) < 1e-15)

    def apply(self, z: complex, strict_disc: bool = False) -> complex:
        """Evaluate the transform.  With strict_disc, reject |z| >= 1."""
        z = _require_finite(z, "point")
        if strict_disc and abs(z) >= 1.0:
            raise PointOutsideDomainError(f"|z| = {abs(z)} >= 1 in strict-disc mode")
        denom = 1.0 - self.a.conjugate() * z
        if abs(denom) < DENOM_FLOOR:
            raise NumericError("Mobius denominator magnitude below machine threshold")
        return cmath.exp(1j * self.theta) * (z - self.a) / denom

    __call__ = apply

    def derivative(self, z: complex) -> complex:
        """e^{i*theta} (1 - |a|^2) / (1 - conj(a) z)^2."""
        z = _require_finite(z, "point")
        denom = 1.0 - self.a.conjugate() * z
        if abs(denom) < DENOM_FLOOR:
            raise NumericError("Mobius denominator magnitude below machine threshold")
        return cmath.exp(1j * self.theta) * (1.0 - abs(self.a) ** 2) / denom**2

    def inverse(self) -> "MobiusTransform":
        """Closed-form inverse, again in canonical form.

        Solving w = e^{i*theta} (z - a)/(1 - conj(a) z) for z gives
        z = e^{-i*theta} (w + a e^{i*theta}) / (1 + conj(a) e^{-i*theta} w),
        i.e. canonical parameters a' = -a e^{i*theta}, theta' = -theta.
        """
        rot = cmath.exp(1j * self.theta)
        return MobiusTransform(-self.a * rot, -self.theta)

    def compose(self, other: "MobiusTransform") -> "MobiusTransform":
        """self after other: (self.compose(other))(z) == self(other(z))."""
        # Work in the matrix model g(z) = (A z + B)/(C z + D); canonical form
        # corresponds to [[e^{i*th}, -e^{i*th} a], [-conj(a), 1]].
        a1, a2 = self._matrix(), other._matrix()
        A = a1[0] * a2[0] + a1[1] * a2[2]
        B = a1[0] * a2[1] + a1[1] * a2[3]
        C = a1[2] * a2[0] + a1[3] * a2[2]
        D = a1[2] * a2[1] + a1[3] * a2[3]
        return _from_matrix(A, B, C, D)

    def _matrix(self):
        rot = cmath.exp(1j * self.theta)
        return (rot, -rot * self.a, -self.a.conjugate(), 1.0 + 0j)


def _from_matrix(A: complex, B: complex, C: complex, D: complex) -> MobiusTransform:
    """Recover canonical (a, theta) from a matrix known to be a disc automorphism."""
    if abs(D) < DENOM_FLOOR or abs(A) < DENOM_FLOOR:
        raise NumericError("degenerate automorphism matrix")
    rot = A / D
    rot /= abs(rot)  # force unimodular against roundoff
    a = -B / A
    if abs(a) >= 1.0:
        # roundoff can push |a| to 1 only for near-degenerate inputs
        if abs(a) > 1.0 + 1e-9:
            raise NumericError("composed transform left the automorphism group")
        a = a / abs(a) * (1.0 - 1e-16)
    return MobiusTransform(a, cmath.phase(rot))


def mobius_to_zero(p: complex) -> MobiusTransform:
    """The automorphism z -> (z - p)/(1 - conj(p) z) sending p to 0."""
    return MobiusTransform(p, 0.0)


def cayley(z: complex) -> complex:
    """Upper half-plane -> disc, z -> (z - i)/(z + i); sends i to 0."""
    z = _require_finite(z, "point")
    if z.imag <= 0:
        raise PointOutsideDomainError("cayley is defined on the upper half-plane")
    return (z - 1j) / (z + 1j)


def cayley_derivative(z: complex) -> complex:
    z = _require_finite(z, "point")
    if z.imag <= 0:
        raise PointOutsideDomainError("cayley is defined on the upper half-plane")
    return 2j / (z + 1j) ** 2


def cayley_inverse(w: complex) -> complex:
    """Disc -> upper half-plane, w -> i (1 + w)/(1 - w); sends 0 to i."""
    w = _require_finite(w, "point")
    if abs(w) >= 1.0:
        raise PointOutsideDomainError("cayley_inverse is defined on the unit disc")
    return 1j * (1.0 + w) / (1.0 - w)


def cayley_inverse_derivative(w: complex) -> complex:
    w = _require_finite(w, "point")
    if abs(w) >= 1.0:
        raise PointOutsideDomainError("cayley_inverse is defined on the unit disc")
    return 2j / (1.0 - w) ** 2
