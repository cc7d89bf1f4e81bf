"""Geodesic flow on the unit tangent bundle of a hyperbolic surface.

A unit tangent vector of the upper half plane is stored as the group element
``g`` carrying the upward unit vector at ``i`` to it.  The geodesic flow is
right multiplication by ``diag(e^{t/2}, e^{-t/2})``; the deck group acts on
the left.  Frames are brought back to the Dirichlet domain centered at ``i``
by greedy distance descent over the domain's side pairings.
"""

from __future__ import annotations

import cmath
import csv
import functools
import io
import math
from dataclasses import dataclass, field

import numpy as np

from .moebius import (
    GroupError,
    Kind,
    MoebiusElement,
    Stability,
    act_circle,
    angle_to_x,
    classify,
    fixed_points_circle,
    frame_from_points,
    hyperbolic_distance,
    rotation,
    translation_length,
)
from .surface_rep import Representation, Word, evaluate, format_word

MAX_REDUCTION_STEPS = 10_000
DESCENT_EPS = 1e-12
# x-coordinate of the middle point of the identity frame's triple; with the
# angle orientation of RP^1 the triple (0, 1, inf) is positively ordered
XI_ZERO_X = 1.0


class ReductionError(RuntimeError):
    """Reduction failed to terminate or the base group is not cocompact."""


@dataclass(frozen=True)
class Frame:
    g: MoebiusElement
    deck_log: Word = field(default_factory=Word)

    @property
    def basepoint(self) -> complex:
        return basepoint(self)


def basepoint(f: Frame) -> complex:
    g = f.g
    return (g.a * 1j + g.b) / (g.c * 1j + g.d)


def direction_angle(f: Frame) -> float:
    """Angle of the tangent vector at the basepoint, measured from the positive real axis."""
    g = f.g
    return (math.pi / 2 - 2 * cmath.phase(g.c * 1j + g.d)) % (2 * math.pi)


def cosh_distance_to_i(g: MoebiusElement) -> float:
    return (g.a * g.a + g.b * g.b + g.c * g.c + g.d * g.d) / 2.0


def frame_at(z: complex, direction: float) -> Frame:
    """Frame with basepoint ``z`` pointing along ``direction`` (radians from the real axis)."""
    y = math.sqrt(z.imag)
    n = MoebiusElement.from_entries(y, z.real / y, 0.0, 1.0 / y)
    # rotation(alpha) turns the upward vector at i by -2*alpha
    return Frame(n @ rotation((math.pi / 2 - direction) / 2))


def flow(f: Frame, t: float) -> Frame:
    if abs(t) > 1.0 + 1e-12:
        raise ValueError("flow steps are limited to |t| <= 1; chunk longer times")
    e = math.exp(t / 2)
    g = f.g
    return Frame(MoebiusElement.from_entries(g.a * e, g.b / e, g.c * e, g.d / e), f.deck_log)


def flow_long(f: Frame, t: float, step: float = 1.0) -> Frame:
    n = max(1, math.ceil(abs(t) / step))
    h = t / n
    for _ in range(n):
        f = flow(f, h)
    return f


# --- Dirichlet domain ----------------------------------------------------

def _hyperboloid(z: complex) -> tuple[float, float, float]:
    x, y = z.real, z.imag
    r2 = x * x + y * y
    return (r2 + 1) / (2 * y), (r2 - 1) / (2 * y), x / y


def _klein_to_hyperboloid(k: np.ndarray) -> np.ndarray:
    s = 1.0 / math.sqrt(1.0 - float(k @ k))
    return np.array([s, s * k[0], s * k[1]])


def _minkowski(x: np.ndarray, y: np.ndarray) -> float:
    return float(x[0] * y[0] - x[1] * y[1] - x[2] * y[2])


def _clip(poly: list[np.ndarray], n: np.ndarray, c: float) -> list[np.ndarray]:
    """Keep the part of a convex polygon with n.k <= c."""
    out = []
    m = len(poly)
    for i in range(m):
        p, q = poly[i], poly[(i + 1) % m]
        fp, fq = n @ p - c, n @ q - c
        if fp <= 0:
            out.append(p)
        if (fp < 0 < fq) or (fq < 0 < fp):
            out.append(p + (q - p) * (fp / (fp - fq)))
    return out


def _triangle_area(x: np.ndarray, y: np.ndarray, z: np.ndarray) -> float:
    def side(u, v):
        return max(_minkowski(u, v), 1.0)

    a, b, c = side(y, z), side(x, z), side(x, y)
    sa, sb, sc = (math.sqrt(max(t * t - 1.0, 0.0)) for t in (a, b, c))
    if min(sa, sb, sc) == 0.0:
        return 0.0

    def angle(opp, s1, s2, c1, c2):
        return math.acos(max(-1.0, min(1.0, (c1 * c2 - opp) / (s1 * s2))))

    total = angle(a, sb, sc, b, c) + angle(b, sa, sc, a, c) + angle(c, sa, sb, a, b)
    return max(math.pi - total, 0.0)


@dataclass(frozen=True)
class DirichletDomain:
    """Dirichlet polygon centered at i, described in the Klein model.

    ``pairings`` holds the words whose images ``S`` move the domain to its
    neighbours; a point beyond the bisector of ``i`` and ``S i`` is brought
    closer to ``i`` by ``S^-1``, which is again a pairing.
    """

    pairings: tuple[Word, ...]
    elements: tuple[MoebiusElement, ...]
    normals: np.ndarray
    offsets: np.ndarray
    vertices: np.ndarray
    area: float
    circumradius: float

    @functools.cached_property
    def inverse_entries(self) -> tuple[tuple[float, float, float, float], ...]:
        return tuple(s.inverse().entries() for s in self.elements)

    def contains(self, z: complex, margin: float = 1e-9) -> bool:
        x0, x1, x2 = _hyperboloid(z)
        k = np.array([x1 / x0, x2 / x0])
        return bool(np.all(self.normals @ k <= self.offsets + margin))


def _words_up_to(ngens: int, depth: int):
    letters = [s * i for i in range(1, ngens + 1) for s in (1, -1)]
    level = [(x,) for x in letters]
    for _ in range(depth):
        yield from level
        level = [w + (x,) for w in level for x in letters if x != -w[-1]]


def _polygon(points: dict):
    poly = [np.array(v, dtype=float) for v in ((-1, -1), (1, -1), (1, 1), (-1, 1))]
    for p0, p1, p2 in points.values():
        poly = _clip(poly, np.array([p1, p2]), p0 - 1.0)
    # many bisectors pass through each vertex; drop near-duplicate corners
    out: list[np.ndarray] = []
    for v in poly:
        if not out or np.linalg.norm(v - out[-1]) > 1e-10:
            out.append(v)
    if len(out) > 1 and np.linalg.norm(out[0] - out[-1]) <= 1e-10:
        out.pop()
    return out


@functools.lru_cache(maxsize=32)
def dirichlet_domain(rep: Representation, max_depth: int = 6) -> DirichletDomain:
    """Dirichlet polygon of the image group, certified by its area.

    Orbit points of words up to a growing depth are added until the polygon
    has area 4*pi*(g-1); any missing side would leave the area too large.
    """
    target = 4 * math.pi * (rep.genus - 1)
    points: dict = {}
    words: dict = {}
    for depth in range(1, max_depth + 1):
        for w in _words_up_to(len(rep.gens), depth):
            if len(w) != depth:
                continue
            g = evaluate(rep, w)
            if cosh_distance_to_i(g) < 1.0 + 1e-9:
                continue
            z = (g.a * 1j + g.b) / (g.c * 1j + g.d)
            key = (round(z.real, 9), round(z.imag, 9))
            if key not in points:
                points[key] = _hyperboloid(z)
                words[key] = (Word(w), g)
        poly = _polygon(points)
        if not poly or any(float(v @ v) >= 1.0 - 1e-12 for v in poly):
            continue
        hyp = [_klein_to_hyperboloid(v) for v in poly]
        o = np.array([1.0, 0.0, 0.0])
        area = sum(_triangle_area(o, hyp[i], hyp[(i + 1) % len(hyp)]) for i in range(len(hyp)))
        if abs(area - target) < 1e-6:
            return _finish(points, words, poly, area)
        if area < target - 1e-6:
            raise ReductionError(f"Dirichlet polygon area {area:.6f} below {target:.6f}: "
                                 "image group is not a faithful cocompact surface group")
    raise ReductionError(f"no bounded Dirichlet polygon of area {target:.6f} "
                         f"from words of length <= {max_depth}")


def _finish(points, words, poly, area) -> DirichletDomain:
    active = []
    for key, (p0, p1, p2) in points.items():
        n = np.array([p1, p2])
        c = p0 - 1.0
        if sum(1 for v in poly if abs(n @ v - c) < 1e-9) >= 2:
            active.append(key)
    pairings = tuple(words[k][0] for k in active)
    elements = tuple(words[k][1] for k in active)
    normals = np.array([[points[k][1], points[k][2]] for k in active])
    offsets = np.array([points[k][0] - 1.0 for k in active])
    radius = max(math.atanh(math.sqrt(float(v @ v))) for v in poly)
    return DirichletDomain(pairings, elements, normals, offsets, np.array(poly), area, radius)


# --- reduction -----------------------------------------------------------

def reduce_element(domain: DirichletDomain, g: MoebiusElement) -> tuple[MoebiusElement, list[int]]:
    """Greedy descent; returns the reduced element and the indices of the pairings used.

    Pairing ``j`` is applied as the inverse of ``domain.elements[j]``.
    """
    used: list[int] = []
    inverses = domain.inverse_entries
    a, b, c, d = g.a, g.b, g.c, g.d
    current = a * a + b * b + c * c + d * d
    for _ in range(MAX_REDUCTION_STEPS):
        best = -1
        best_val = current * (1.0 - 2.0 * DESCENT_EPS)
        for j, (p, q, r, s) in enumerate(inverses):
            e, f, h, k = p * a + q * c, p * b + q * d, r * a + s * c, r * b + s * d
            val = e * e + f * f + h * h + k * k
            if val < best_val:
                best, best_val, best_g = j, val, (e, f, h, k)
        if best < 0:
            return (MoebiusElement.from_entries(a, b, c, d) if used else g), used
        a, b, c, d = best_g
        current = best_val
        used.append(best)
    raise ReductionError(f"reduction did not terminate within {MAX_REDUCTION_STEPS} steps")


def reduce(rep: Representation, f: Frame) -> tuple[Frame, Word]:
    """Move a frame into the Dirichlet domain.

    Returns the reduced frame and the word ``applied`` with
    ``reduced.g == evaluate(rep, applied) @ f.g``; the frame's ``deck_log`` is
    extended on the left by ``applied``.
    """
    domain = dirichlet_domain(rep)
    g, used = reduce_element(domain, f.g)
    applied = Word()
    for j in used:
        applied = domain.pairings[j].inverse() * applied
    return Frame(g, applied * f.deck_log), applied


# --- closed geodesics ----------------------------------------------------

@dataclass(frozen=True)
class PeriodicOrbit:
    word: Word
    axis_frame: Frame
    length: float


def axis_frame(P: MoebiusElement) -> MoebiusElement:
    """Frame on the translation axis of ``P``, pointing along it, closest to i."""
    if classify(P) is not Kind.HYPERBOLIC:
        raise GroupError("element is not hyperbolic")
    pts = {s: th for th, s in fixed_points_circle(P)}
    m = frame_from_points(pts[Stability.REPELLING], pts[Stability.ATTRACTING])
    a, b, c, d = m.entries()
    s = 0.5 * math.log((b * b + d * d) / (a * a + c * c))
    e = math.exp(s / 2)
    return MoebiusElement.from_entries(a * e, b / e, c * e, d / e)


def closed_geodesic(rep: Representation, w) -> PeriodicOrbit:
    """Periodic orbit in the free homotopy class of ``w``.

    The axis frame is reduced into the Dirichlet domain, so it sits on the
    axis of a conjugate of the image of ``w``.
    """
    w = Word(w)
    P = evaluate(rep, w)
    if classify(P) is not Kind.HYPERBOLIC:
        raise GroupError(f"image of {format_word(w)} is not hyperbolic")
    length = translation_length(P)
    f, _ = reduce(rep, Frame(axis_frame(P)))
    # start from the sample of the orbit deepest inside the domain, so that
    # the start is not a boundary point with several reduced representatives
    n = max(8, math.ceil(length / 0.25))
    best = Frame(f.g)
    for _ in range(n):
        f, _ = reduce(rep, flow(Frame(f.g), length / n))
        if cosh_distance_to_i(f.g) < cosh_distance_to_i(best.g):
            best = Frame(f.g)
    return PeriodicOrbit(w, best, length)


# --- triples -------------------------------------------------------------

@dataclass(frozen=True)
class Triple:
    """Backward endpoint, orthogonal endpoint and forward endpoint, as angles."""

    xi_plus: float
    xi_zero: float
    xi_minus: float


XI_ZERO_ANGLE = math.atan(XI_ZERO_X) / math.pi


def triple_coords(f: Frame) -> Triple:
    return Triple(act_circle(f.g, 0.0)[0], act_circle(f.g, XI_ZERO_ANGLE)[0],
                  act_circle(f.g, 0.5)[0])


def positively_oriented(t: Triple) -> bool:
    a = (t.xi_zero - t.xi_plus) % 1.0
    b = (t.xi_minus - t.xi_plus) % 1.0
    return 0.0 < a < b


def frame_from_triple(t: Triple) -> Frame:
    if not positively_oriented(t):
        raise GroupError("triple is degenerate or negatively oriented")
    m = frame_from_points(t.xi_plus, t.xi_minus)
    lam = angle_to_x(act_circle(m.inverse(), t.xi_zero)[0]) / XI_ZERO_X
    if not lam > 0:
        raise GroupError("triple is degenerate or negatively oriented")
    r = math.sqrt(lam)
    return Frame(m @ MoebiusElement.from_entries(r, 0.0, 0.0, 1.0 / r))


# --- sampling and traces -------------------------------------------------

def liouville_sample(rep: Representation, rng: np.random.Generator) -> Frame:
    """Frame distributed by the Liouville measure of the quotient.

    Basepoints are drawn by area in the hyperbolic disk of the domain's
    circumradius and rejected outside the domain; directions are uniform.
    """
    domain = dirichlet_domain(rep)
    ch = math.cosh(domain.circumradius)
    while True:
        r = math.acosh(1.0 + rng.random() * (ch - 1.0))
        phi = 2 * math.pi * rng.random()
        # point at distance r from i in direction phi
        f = frame_at(1j, phi)
        e = math.exp(r / 2)
        z = basepoint(Frame(MoebiusElement.from_entries(f.g.a * e, f.g.b / e, f.g.c * e, f.g.d / e)))
        if domain.contains(z, margin=0.0):
            return frame_at(z, 2 * math.pi * rng.random())


def orbit_trace(rep: Representation, f: Frame, T: float, dt: float = 0.5) -> list[tuple]:
    """Rows (t, Re z, Im z, direction, deck word length) along a reduced orbit."""
    rows = []
    f, _ = reduce(rep, f)
    n = max(1, math.ceil(T / dt))
    h = T / n
    rows.append((0.0, f.basepoint.real, f.basepoint.imag, direction_angle(f), len(f.deck_log)))
    for k in range(1, n + 1):
        f, _ = reduce(rep, flow(f, h))
        z = f.basepoint
        rows.append((k * h, z.real, z.imag, direction_angle(f), len(f.deck_log)))
    return rows


def trace_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["t", "re_z", "im_z", "theta_direction", "deck_word_length"])
    for row in rows:
        writer.writerow([repr(float(x)) if isinstance(x, float) else x for x in row])
    return buf.getvalue()


def distance_to_center(f: Frame) -> float:
    return hyperbolic_distance(f.basepoint, 1j)
