"""Foliated geodesic flow of a suspension as a projective skew product.

A state is a reduced base frame together with a point of the fiber RP^1.
In the universal cover the fiber coordinate is constant along the flow;
whenever reduction moves the base by the rho-image of a deck element, the
fiber is moved by the hol-image of the same element.  The transverse
log-derivative is measured in the angle chart at the reduced frame, so its
time average is the transverse Lyapunov exponent.
"""

from __future__ import annotations

import csv
import enum
import io
import json
import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .geoflow import (
    Frame,
    dirichlet_domain,
    flow,
    liouville_sample,
    reduce_element,
    triple_coords,
)
from .moebius import (
    GroupError,
    Kind,
    MoebiusElement,
    act_circle,
    circle_distance,
    classify,
    fixed_points_circle,
    translation_length,
)
from .surface_rep import Representation, Word, evaluate

MAX_DT = 0.5
MIN_BATCHES = 20
CONTRACTION_LIMIT = 0.01
RETURN_TOL = 1e-8


@dataclass(frozen=True)
class SkewState:
    base: Frame
    fiber: float
    log_deriv_sum: float = 0.0
    elapsed: float = 0.0
    n_deck: int = 0


class _Cocycle:
    """Per-pairing fiber maps of a (rho, hol) pair, in an optional conjugated chart."""

    def __init__(self, rho: Representation, hol: Representation,
                 chart: MoebiusElement | None = None):
        if rho.genus != hol.genus:
            raise ValueError(f"genus mismatch: {rho.genus} vs {hol.genus}")
        self.rho, self.hol = rho, hol
        self.domain = dirichlet_domain(rho)
        maps = []
        lengths = []
        for w in self.domain.pairings:
            # reduction applies rho(w)^-1, so the fiber moves by hol(w)^-1
            h = evaluate(hol, w).inverse()
            if chart is not None:
                h = chart @ h @ chart.inverse()
            maps.append(h)
            lengths.append(len(w))
        self.maps = tuple(maps)
        self.lengths = tuple(lengths)

    def step(self, s: SkewState, dt: float) -> tuple[SkewState, list[int]]:
        if not 0.0 < dt <= MAX_DT:
            raise ValueError(f"dt must lie in (0, {MAX_DT}], got {dt}")
        g = flow(s.base, dt).g
        g, used = reduce_element(self.domain, g)
        fiber, total, n = s.fiber, s.log_deriv_sum, s.n_deck
        for j in used:
            fiber, ld = act_circle(self.maps[j], fiber)
            total += ld
            n += self.lengths[j]
        return SkewState(Frame(g), fiber, total, s.elapsed + dt, n), used


def skew_step(rho: Representation, hol: Representation, s: SkewState, dt: float,
              chart: MoebiusElement | None = None) -> SkewState:
    return _Cocycle(rho, hol, chart).step(s, dt)[0]


def run(rho: Representation, hol: Representation, s: SkewState, T: float,
        dt: float = MAX_DT, chart: MoebiusElement | None = None) -> SkewState:
    """Advance ``s`` by total time ``T`` in equal steps of at most ``dt``."""
    cocycle = _Cocycle(rho, hol, chart)
    if T <= 0:
        return s
    n = max(1, math.ceil(T / dt - 1e-12))
    h = T / n
    for _ in range(n):
        s, _ = cocycle.step(s, h)
    return s


def initial_state(rho: Representation, f: Frame, fiber: float) -> SkewState:
    g, _ = reduce_element(dirichlet_domain(rho), f.g)
    return SkewState(Frame(g), fiber % 1.0)


# --- exponents -----------------------------------------------------------

@dataclass(frozen=True)
class ExponentEstimate:
    value: float
    stderr: float
    horizon: float
    batches: int
    seed: int | None = None
    dt: float = MAX_DT
    labels: tuple[str, str] = ("", "")
    series: tuple[tuple[float, float, int], ...] = field(default=(), repr=False)

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "stderr": self.stderr,
            "horizon": self.horizon,
            "batches": self.batches,
            "provenance": {"seed": self.seed, "T": self.horizon, "dt": self.dt,
                           "rho": self.labels[0], "hol": self.labels[1]},
        }

    def series_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["t", "running_mean", "batch_id"])
        for t, mean, b in self.series:
            writer.writerow([repr(t), repr(mean), b])
        return buf.getvalue()


def batch_means(increments: np.ndarray, durations: np.ndarray) -> tuple[float, float]:
    """Ratio estimate and batch-means standard error from per-batch totals."""
    means = increments / durations
    total = float(increments.sum() / durations.sum())
    if len(means) < 2:
        return total, 0.0
    return total, float(np.std(means, ddof=1) / math.sqrt(len(means)))


def transverse_exponent(rho: Representation, hol: Representation, T: float, seed: int = 0,
                        dt: float = MAX_DT, batches: int = MIN_BATCHES,
                        chart: MoebiusElement | None = None,
                        record_every: float = 0.0) -> ExponentEstimate:
    """Time average of the transverse log-derivative along one Liouville-random orbit."""
    if T < 100:
        raise ValueError("horizon must be at least 100")
    if batches < MIN_BATCHES:
        raise ValueError(f"at least {MIN_BATCHES} batches are required")
    rng = np.random.default_rng(seed)
    f = liouville_sample(rho, rng)
    s = SkewState(f, float(rng.random()))
    cocycle = _Cocycle(rho, hol, chart)
    per_batch = max(1, math.ceil(T / (dt * batches) - 1e-12))
    h = T / (per_batch * batches)
    increments = np.zeros(batches)
    durations = np.full(batches, per_batch * h)
    series = []
    stride = max(1, round(record_every / h)) if record_every > 0 else 0
    k = 0
    for b in range(batches):
        start = s.log_deriv_sum
        for _ in range(per_batch):
            s, _ = cocycle.step(s, h)
            k += 1
            if stride and k % stride == 0:
                series.append((k * h, s.log_deriv_sum / (k * h), b))
        increments[b] = s.log_deriv_sum - start
    _, stderr = batch_means(increments, durations)
    value = s.log_deriv_sum / T
    return ExponentEstimate(value, stderr, T, batches, seed, h, (rho.label, hol.label),
                            tuple(series))


def periodic_exponent(rho: Representation, hol: Representation, w) -> list[float]:
    """Exact transverse exponents on the closed orbit of ``w``.

    For a hyperbolic holonomy image these are -l_hol/l_rho (attracting fiber
    point) and +l_hol/l_rho (repelling one); otherwise the single value 0.
    """
    P = evaluate(rho, w)
    if classify(P) is not Kind.HYPERBOLIC:
        raise GroupError("base image is not hyperbolic")
    H = evaluate(hol, w)
    if classify(H) is not Kind.HYPERBOLIC:
        return [0.0]
    r = translation_length(H) / translation_length(P)
    return [-r, r]


def simulated_periodic_exponents(rho: Representation, hol: Representation, w,
                                 dt: float = MAX_DT) -> list[float]:
    """Run the skew product once around the closed orbit of ``w`` from each fiber fixed point.

    Elliptic holonomy has no fixed fiber point and yields an empty list.
    """
    from .geoflow import closed_geodesic

    orbit = closed_geodesic(rho, w)
    cocycle = _Cocycle(rho, hol)
    deck = _Cocycle(rho, rho)
    target = abs(evaluate(rho, w).trace)
    n = max(1, math.ceil(orbit.length / dt - 1e-12))
    h = orbit.length / n

    def loop(fiber: float) -> tuple[SkewState, MoebiusElement]:
        s = SkewState(orbit.axis_frame, fiber)
        total = MoebiusElement.identity()
        hol_total = MoebiusElement.identity()
        for _ in range(n):
            s, used = cocycle.step(s, h)
            for j in used:
                total = deck.maps[j] @ total
                hol_total = cocycle.maps[j] @ hol_total
        # The closed orbit is unstable, so round-off in the start frame grows
        # like exp(length) and the end frame drifts off it.  What the fiber
        # sees is the sequence of deck crossings; that is right exactly when
        # the accumulated deck element is conjugate to the inverse image of w.
        if abs(abs(total.trace) - target) > RETURN_TOL * target:
            raise GroupError("closed orbit did not close up in the deck group")
        return s, hol_total

    _, holonomy = loop(0.0)
    kind = classify(holonomy)
    if kind is Kind.ELLIPTIC:
        return []
    points = [0.0] if kind is Kind.IDENTITY else [p for p, _ in fixed_points_circle(holonomy)]
    values = []
    for p in points:
        s, _ = loop(p)
        values.append(s.log_deriv_sum / orbit.length)
    return sorted(values)


# --- empirical SRB measures ----------------------------------------------

class FiberChart(enum.Enum):
    ABSOLUTE = "absolute"
    FRAME = "frame"


def base_cell(f: Frame, cells: int) -> int:
    z = f.basepoint
    w = (z - 1j) / (z + 1j)
    phi = math.atan2(w.imag, w.real) % (2 * math.pi)
    return min(int(phi / (2 * math.pi) * cells), cells - 1)


def fiber_coordinate(f: Frame, fiber: float, chart: FiberChart) -> float:
    if chart is FiberChart.FRAME:
        return act_circle(f.g.inverse(), fiber)[0]
    return fiber


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * float(np.abs(p / p.sum() - q / q.sum()).sum())


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Occupation counts on (base cell x fiber bin) cells, per orbit and pooled."""

    counts: np.ndarray
    per_orbit: np.ndarray
    tv: np.ndarray
    spread: np.ndarray
    chart: FiberChart
    horizon: float
    seed: int

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def normalized(self) -> np.ndarray:
        return self.counts / self.counts.sum()

    def fiber_marginal(self) -> np.ndarray:
        return self.normalized().sum(axis=0)

    def to_dict(self) -> dict:
        return {
            "grid": {"base_cells": int(self.counts.shape[0]), "fiber_bins": int(self.counts.shape[1]),
                     "fiber_chart": self.chart.value},
            "counts": self.counts.astype(int).tolist(),
            "total": self.total,
            "max_pairwise_tv": float(self.tv.max()),
            "provenance": {"seed": self.seed, "T": self.horizon},
        }


def _circular_spread(angles: Sequence[float]) -> float:
    """One minus the mean resultant length of the angles on R/Z."""
    if len(angles) == 0:
        return 0.0
    z = np.exp(2j * np.pi * np.asarray(angles))
    return float(1.0 - abs(z.mean()))


def srb_histogram(rho: Representation, hol: Representation, T: float, n_orbits: int,
                  bins: int, seed: int = 0, base_cells: int = 4, dt: float = MAX_DT,
                  chart: FiberChart | str = FiberChart.ABSOLUTE) -> EmpiricalMeasure:
    """Occupation statistics over [T/2, T] of ``n_orbits`` Liouville-random orbits."""
    if T < 100:
        raise ValueError("horizon must be at least 100")
    if n_orbits < 2:
        raise ValueError("at least two orbits are required")
    chart = FiberChart(chart)
    rng = np.random.default_rng(seed)
    cocycle = _Cocycle(rho, hol)
    n = max(1, math.ceil(T / dt - 1e-12))
    h = T / n
    burn = n // 2
    per_orbit = np.zeros((n_orbits, base_cells, bins))
    samples: list[list[list[float]]] = [[[] for _ in range(base_cells)] for _ in range(n_orbits)]
    for o in range(n_orbits):
        s = SkewState(liouville_sample(rho, rng), float(rng.random()))
        for k in range(n):
            s, _ = cocycle.step(s, h)
            if k >= burn:
                cell = base_cell(s.base, base_cells)
                x = fiber_coordinate(s.base, s.fiber, chart)
                per_orbit[o, cell, min(int(x * bins), bins - 1)] += 1
                samples[o][cell].append(x)
    tv = np.zeros((n_orbits, n_orbits))
    for i in range(n_orbits):
        for j in range(i + 1, n_orbits):
            tv[i, j] = tv[j, i] = tv_distance(per_orbit[i], per_orbit[j])
    spread = np.array([_circular_spread([x for o in range(n_orbits) for x in samples[o][c]])
                       for c in range(base_cells)])
    return EmpiricalMeasure(per_orbit.sum(axis=0), per_orbit, tv, spread, chart, T, seed)


# --- attracting sections -------------------------------------------------

class ContractionError(RuntimeError):
    """Fiber samples failed to contract along an orbit."""


def attracting_section(rho: Representation, hol: Representation, f: Frame, T_back: float,
                       n_samples: int = 16, dt: float = MAX_DT) -> float:
    """Forward limit point of the fiber over ``f``, in the cover coordinates of ``f``.

    The base orbit is followed backward for ``T_back``; a uniform fiber sample
    placed there is carried forward along the same path with the holonomy.
    """
    if T_back < 10:
        raise ValueError("T_back must be at least 10")
    cocycle = _Cocycle(rho, hol)
    n = max(1, math.ceil(T_back / dt - 1e-12))
    h = T_back / n
    applied: list[MoebiusElement] = []
    # first reduction of f itself also moves the fiber coordinates
    g, used = reduce_element(cocycle.domain, f.g)
    applied += [cocycle.maps[j] for j in used]
    for _ in range(n):
        e = math.exp(-h / 2)
        g = MoebiusElement.from_entries(g.a * e, g.b / e, g.c * e, g.d / e)
        g, used = reduce_element(cocycle.domain, g)
        applied += [cocycle.maps[j] for j in used]
    images = []
    for k in range(n_samples):
        y = (k + 0.5 + 0.1234567 * math.sqrt(2)) / n_samples % 1.0
        for m in reversed(applied):
            y = act_circle(m.inverse(), y)[0]
        images.append(y)
    center = _circular_median(images)
    spread = max(circle_distance(y, center) for y in images)
    if spread > CONTRACTION_LIMIT:
        raise ContractionError(f"non-contraction detected (sample spread {spread:.3g})")
    return center


def _circular_median(points: Sequence[float]) -> float:
    best, best_cost = points[0], math.inf
    for p in points:
        cost = sum(circle_distance(p, q) for q in points)
        if cost < best_cost:
            best, best_cost = p, cost
    return best


def canonical_section(f: Frame) -> float:
    """Backward endpoint of the geodesic through ``f``: the attracting section when hol = rho."""
    return triple_coords(f).xi_plus


# --- invariant measures --------------------------------------------------

class WitnessKind(enum.Enum):
    COMMON_FIXED_POINT = "CommonFixedPoint"
    COMMON_FIXED_PAIR = "CommonFixedPair"
    ELLIPTIC_COMMON_CENTER = "EllipticCommonCenter"
    NONE_DETECTED = "NoneDetected"


@dataclass(frozen=True)
class InvariantMeasureWitness:
    kind: WitnessKind
    points: tuple = ()

    def to_dict(self) -> dict:
        pts = [[p.real, p.imag] if isinstance(p, complex) else p for p in self.points]
        return {"witness": self.kind.value, "points": pts}


WITNESS_TOL = 1e-8


def _fixes(g: MoebiusElement, theta: float) -> bool:
    return circle_distance(act_circle(g, theta)[0], theta) < WITNESS_TOL


def _center(g: MoebiusElement) -> complex:
    # fixed point in H of an elliptic element: c z^2 + (d - a) z - b = 0
    a, b, c, d = g.entries()
    if c == 0:
        return complex("nan")
    disc = complex((d - a) ** 2 + 4 * b * c)
    z = (-(d - a) + disc ** 0.5) / (2 * c)
    return z if z.imag > 0 else (-(d - a) - disc ** 0.5) / (2 * c)


def detect_invariant_measure(hol: Representation) -> InvariantMeasureWitness:
    """Search for a holonomy-invariant probability on the fiber.

    A witness certifies an invariant measure (a Dirac mass, an atomic pair or
    the rotation-invariant measure around a common center); ``NoneDetected``
    certifies nothing.
    """
    gens = [g for g in hol.gens if not g.is_identity()]
    if not gens:
        return InvariantMeasureWitness(WitnessKind.COMMON_FIXED_POINT, (0.0,))
    kinds = [classify(g) for g in gens]
    pairs = []
    for g, kind in zip(gens, kinds):
        if kind is Kind.ELLIPTIC:
            continue
        pts = [p for p, _ in fixed_points_circle(g)]
        for p in pts:
            if all(_fixes(h, p) for h in gens):
                return InvariantMeasureWitness(WitnessKind.COMMON_FIXED_POINT, (p,))
        if len(pts) == 2:
            pairs.append(tuple(pts))
    for p, q in pairs:
        ok = True
        for h in gens:
            hp, hq = act_circle(h, p)[0], act_circle(h, q)[0]
            fixed = circle_distance(hp, p) < WITNESS_TOL and circle_distance(hq, q) < WITNESS_TOL
            swapped = circle_distance(hp, q) < WITNESS_TOL and circle_distance(hq, p) < WITNESS_TOL
            if not (fixed or swapped):
                ok = False
                break
        if ok:
            return InvariantMeasureWitness(WitnessKind.COMMON_FIXED_PAIR, (p, q))
    if all(k is Kind.ELLIPTIC for k in kinds):
        z = _center(gens[0])
        if all(abs(h(z) - z) < WITNESS_TOL * max(1.0, abs(z)) for h in gens):
            return InvariantMeasureWitness(WitnessKind.ELLIPTIC_COMMON_CENTER, (z,))
    return InvariantMeasureWitness(WitnessKind.NONE_DETECTED)


def with_fiber(s: SkewState, fiber: float) -> SkewState:
    return replace(s, fiber=fiber % 1.0)


def to_json(obj) -> str:
    return json.dumps(obj.to_dict(), indent=2, sort_keys=True)
