"""Exact algebra of PSL(2, R).

Elements act on the upper half plane by homographies and on the projective
line RP^1.  Points of RP^1 are carried by an angle ``theta`` in [0, 1) with
``x = tan(pi * theta)``; ``theta = 1/2`` is the point at infinity.  Up to the
constant factor ``2*pi`` this chart is the visual metric of the boundary seen
from ``i``, so rotations about ``i`` act on it by translations.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

CLASSIFY_EPS = 1e-10
IDENTITY_EPS = 1e-12


class GroupError(ValueError):
    """Raised on inputs outside the domain of a group operation."""


class Kind(enum.Enum):
    IDENTITY = "identity"
    ELLIPTIC = "elliptic"
    PARABOLIC = "parabolic"
    HYPERBOLIC = "hyperbolic"


class Stability(enum.Enum):
    ATTRACTING = "attracting"
    REPELLING = "repelling"
    NEUTRAL = "neutral"


def _canonical(a: float, b: float, c: float, d: float) -> tuple[float, float, float, float]:
    det = a * d - b * c
    if not det > 0.0 or not math.isfinite(det):
        raise GroupError(f"matrix has non-positive or non-finite determinant {det!r}")
    s = 1.0 / math.sqrt(det)
    for e in (a, b, c, d):
        if e != 0.0:
            if e < 0.0:
                s = -s
            break
    return a * s, b * s, c * s, d * s


# Above this size the computed determinant of a product is mostly rounding
# noise, so products of normalized factors are only sign-fixed.
_RENORMALIZE_LIMIT = 1e6


def _product(a: float, b: float, c: float, d: float) -> "MoebiusElement":
    if abs(a * d) + abs(b * c) < _RENORMALIZE_LIMIT:
        return MoebiusElement(*_canonical(a, b, c, d))
    for e in (a, b, c, d):
        if e != 0.0:
            if e < 0.0:
                a, b, c, d = -a, -b, -c, -d
            break
    return MoebiusElement(a, b, c, d)


@dataclass(frozen=True, slots=True)
class MoebiusElement:
    """A determinant-one 2x2 real matrix taken up to sign.

    Use :meth:`from_entries` (or :func:`moebius`) to build one from arbitrary
    entries with positive determinant; the raw constructor trusts its input.
    """

    a: float
    b: float
    c: float
    d: float

    @classmethod
    def from_entries(cls, a: float, b: float, c: float, d: float) -> "MoebiusElement":
        return cls(*_canonical(float(a), float(b), float(c), float(d)))

    @classmethod
    def identity(cls) -> "MoebiusElement":
        return cls(1.0, 0.0, 0.0, 1.0)

    def normalized(self) -> "MoebiusElement":
        return MoebiusElement.from_entries(self.a, self.b, self.c, self.d)

    def __matmul__(self, other: "MoebiusElement") -> "MoebiusElement":
        a, b, c, d = self.a, self.b, self.c, self.d
        e, f, g, h = other.a, other.b, other.c, other.d
        return _product(a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h)

    def inverse(self) -> "MoebiusElement":
        return _product(self.d, -self.b, -self.c, self.a)

    def __pow__(self, k: int) -> "MoebiusElement":
        base = self if k >= 0 else self.inverse()
        result = MoebiusElement.identity()
        n = abs(k)
        while n:
            if n & 1:
                result = result @ base
            base = base @ base
            n >>= 1
        return result

    @property
    def trace(self) -> float:
        return self.a + self.d

    @property
    def det(self) -> float:
        return self.a * self.d - self.b * self.c

    def entries(self) -> tuple[float, float, float, float]:
        return (self.a, self.b, self.c, self.d)

    def distance_to(self, other: "MoebiusElement") -> float:
        """Entrywise max distance, minimized over the sign ambiguity."""
        p = self.entries()
        q = other.entries()
        plus = max(abs(x - y) for x, y in zip(p, q))
        minus = max(abs(x + y) for x, y in zip(p, q))
        return min(plus, minus)

    def is_identity(self, tol: float = IDENTITY_EPS) -> bool:
        return self.distance_to(MoebiusElement.identity()) <= tol

    def is_rotation(self) -> bool:
        """True when the matrix lies exactly in SO(2), i.e. fixes ``i``."""
        return self.a == self.d and self.b == -self.c

    def __call__(self, z: complex) -> complex:
        return act_halfplane(self, z)


def moebius(a: float, b: float, c: float, d: float) -> MoebiusElement:
    """Normalized element from matrix entries (any positive determinant)."""
    return MoebiusElement.from_entries(a, b, c, d)


def rotation(angle: float) -> MoebiusElement:
    """The matrix [[cos, -sin], [sin, cos]]; rotates directions at i by 2*angle."""
    co, si = math.cos(angle), math.sin(angle)
    return MoebiusElement.from_entries(co, -si, si, co)


def hyperbolic_translation(length: float) -> MoebiusElement:
    """diag(e^{l/2}, e^{-l/2}): translation by ``length`` along the imaginary axis."""
    return MoebiusElement.from_entries(math.exp(length / 2), 0.0, 0.0, math.exp(-length / 2))


def compose(elements: Iterable[MoebiusElement]) -> MoebiusElement:
    result = MoebiusElement.identity()
    for g in elements:
        result = result @ g
    return result


def classify(g: MoebiusElement) -> Kind:
    if g.is_identity():
        return Kind.IDENTITY
    t = abs(g.trace)
    if abs(t - 2.0) <= CLASSIFY_EPS:
        return Kind.PARABOLIC
    return Kind.ELLIPTIC if t < 2.0 else Kind.HYPERBOLIC


def translation_length(g: MoebiusElement) -> float:
    if classify(g) is not Kind.HYPERBOLIC:
        return 0.0
    return 2.0 * math.acosh(abs(g.trace) / 2.0)


def hyperbolic_distance(z: complex, w: complex) -> float:
    return math.acosh(1.0 + abs(z - w) ** 2 / (2.0 * z.imag * w.imag))


def act_halfplane(g: MoebiusElement, z: complex) -> complex:
    if not z.imag > 0.0:
        raise GroupError(f"point {z!r} is not in the upper half plane")
    return (g.a * z + g.b) / (g.c * z + g.d)


# --- the projective line -------------------------------------------------

def angle_to_x(theta: float) -> float:
    """Chart value ``tan(pi*theta)``; returns ``inf`` at theta = 1/2."""
    theta = theta % 1.0
    if theta == 0.5:
        return math.inf
    return math.tan(math.pi * theta)


def x_to_angle(x: float) -> float:
    if math.isinf(x):
        return 0.5
    return (math.atan(x) / math.pi) % 1.0


def vector_to_angle(u0: float, u1: float) -> float:
    """Angle of the projective point [u0 : u1] (i.e. x = u0/u1)."""
    theta = math.atan2(u0, u1) / math.pi
    theta %= 1.0
    if theta >= 1.0:
        theta = 0.0
    return theta


def angle_vector(theta: float) -> tuple[float, float]:
    t = math.pi * theta
    return math.sin(t), math.cos(t)


def act_circle(g: MoebiusElement, theta: float) -> tuple[float, float]:
    """Image angle and log-derivative of the circle map at ``theta``.

    In the angle chart the induced map has derivative ``1/|g u|^2`` where
    ``u`` is the unit vector representing ``theta``.
    """
    if g.is_rotation():
        shift = -math.atan2(g.c, g.a) / math.pi
        out = (theta + shift) % 1.0
        return (0.0 if out >= 1.0 else out), 0.0
    s, co = angle_vector(theta)
    w0 = g.a * s + g.b * co
    w1 = g.c * s + g.d * co
    return vector_to_angle(w0, w1), -math.log(w0 * w0 + w1 * w1)


def circle_distance(s: float, t: float) -> float:
    """Distance between two angles on R/Z."""
    d = abs(s - t) % 1.0
    return min(d, 1.0 - d)


def fixed_points_circle(g: MoebiusElement) -> list[tuple[float, Stability]]:
    kind = classify(g)
    if kind is Kind.IDENTITY:
        raise GroupError("the identity fixes every point")
    if kind is Kind.ELLIPTIC:
        return []
    a, b, c, d = g.entries()
    if kind is Kind.PARABOLIC:
        mu = 1.0 if g.trace > 0 else -1.0
        return [(_eigen_angle(a, b, c, d, mu), Stability.NEUTRAL)]
    disc = math.sqrt(g.trace * g.trace - 4.0)
    points = []
    for mu in ((g.trace + disc) / 2.0, (g.trace - disc) / 2.0):
        theta = _eigen_angle(a, b, c, d, mu)
        logderiv = act_circle(g, theta)[1]
        points.append((theta, Stability.REPELLING if logderiv > 0 else Stability.ATTRACTING))
    points.sort(key=lambda p: p[0])
    return points


def _eigen_angle(a: float, b: float, c: float, d: float, mu: float) -> float:
    # two candidate eigenvectors; the longer one is the better conditioned
    v1 = (b, mu - a)
    v2 = (mu - d, c)
    u = v1 if math.hypot(*v1) >= math.hypot(*v2) else v2
    return vector_to_angle(*u)


def frame_from_points(first: float, last: float) -> MoebiusElement:
    """Orientation-preserving element sending 0 to ``first`` and infinity to ``last``."""
    f0, f1 = angle_vector(first)
    l0, l1 = angle_vector(last)
    det = l0 * f1 - f0 * l1
    if abs(det) < 1e-15:
        raise GroupError("points coincide")
    if det < 0:
        f0, f1 = -f0, -f1
    return MoebiusElement.from_entries(l0, f0, l1, f1)


# --- lifts to the real line ----------------------------------------------

@dataclass(frozen=True, slots=True)
class LiftedCircleMap:
    """A lift of an element to a degree-one homeomorphism of R.

    ``offset`` is the integer added to the canonical lift, the one whose value
    at 0 lies in [0, 1).
    """

    base: MoebiusElement
    offset: int = 0

    def _canonical_at_zero(self) -> float:
        return act_circle(self.base, 0.0)[0]

    def __call__(self, t: float) -> float:
        n = math.floor(t)
        frac = t - n
        f0 = self._canonical_at_zero()
        image = act_circle(self.base, frac)[0]
        return f0 + ((image - f0) % 1.0) + n + self.offset

    def inverse(self) -> "LiftedCircleMap":
        inv = LiftedCircleMap(self.base.inverse(), 0)
        y = self(0.0)
        return LiftedCircleMap(inv.base, -round(inv(y)))

    def __matmul__(self, other: "LiftedCircleMap") -> "LiftedCircleMap":
        """Lift of the product, normalized against the canonical lift."""
        base = self.base @ other.base
        canonical = LiftedCircleMap(base, 0)
        return LiftedCircleMap(base, round(self(other(0.0)) - canonical(0.0)))


SAMPLE_ANGLES = tuple((k + 0.3183098861837907) / 8.0 for k in range(8))


def lift_relator(maps: Sequence[LiftedCircleMap], residual_tol: float = 1e-8,
                 spread_tol: float = 1e-6) -> int:
    """Integer translation of the composed lift of a word projecting to the identity.

    ``maps[0]`` is applied last, matching matrix products in word order.
    """
    if not maps:
        return 0
    product = compose(m.base for m in maps)
    residual = product.distance_to(MoebiusElement.identity())
    if residual > residual_tol:
        raise GroupError(f"composition is not the identity (residual {residual:.3g})")
    shifts = []
    for t in SAMPLE_ANGLES:
        y = t
        for m in reversed(maps):
            y = m(y)
        shifts.append(y - t)
    n = round(sum(shifts) / len(shifts))
    spread = max(abs(s - n) for s in shifts)
    if spread >= spread_tol:
        raise GroupError(f"lifted word does not translate by an integer (spread {spread:.3g})")
    return n
