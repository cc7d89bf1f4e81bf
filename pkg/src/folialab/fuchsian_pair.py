"""Comparison of two Fuchsian representations of the same surface group.

The average reparametrization chi between the geodesic flows of rho and hol
is estimated from closed geodesics: for a class ``c`` the ratio
``l_hol(c) / l_rho(c)`` approximates chi when the closed rho-geodesic of
``c`` is long and typical.  The estimate averages the ratio over the census
classes in the top unit window of rho-lengths.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .length_spectrum import ClassCensus, enumerate_classes, marked_length
from .moebius import Kind, Stability, act_circle, classify, fixed_points_circle
from .skewflow import transverse_exponent
from .surface_rep import Representation, Word, euler_number, evaluate, format_word

GATE_LEN = 6
GATE_FLOOR = 1e-9
THIN_CENSUS = 10
MIN_HORIZON = 1e4


class FuchsianGateError(ValueError):
    """A representation failed the Fuchsian-quality gate."""


@lru_cache(maxsize=8)
def _census(genus: int, max_len: int) -> ClassCensus:
    return enumerate_classes(genus, max_len)


@lru_cache(maxsize=32)
def _gate(rep: Representation) -> str | None:
    e = euler_number(rep)
    if abs(e) != 2 * rep.genus - 2:
        return f"Euler number {e} is not maximal"
    for w in _census(rep.genus, GATE_LEN):
        if marked_length(rep, w) < GATE_FLOOR:
            return f"class {format_word(w)} has zero length"
    return None


def fuchsian_gate(*reps: Representation) -> None:
    """Heuristic discreteness test: maximal Euler number and no short census class of length 0."""
    for rep in reps:
        reason = _gate(rep)
        if reason is not None:
            raise FuchsianGateError(f"{rep.label or 'representation'}: {reason}")
    if len({r.genus for r in reps}) > 1:
        raise ValueError("genus mismatch")


@dataclass(frozen=True)
class ChiEstimate:
    value: float
    census_len: int
    n_classes: int
    length_window: tuple[float, float]
    spread: float

    @property
    def thin(self) -> bool:
        return self.n_classes < THIN_CENSUS

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "census_len": self.census_len,
            "n_classes": self.n_classes,
            "length_window": list(self.length_window),
            "spread": self.spread,
            "thin": self.thin,
        }


def chi_estimate(rho: Representation, hol: Representation, max_len: int) -> ChiEstimate:
    """Mean of l_hol / l_rho over census classes with l_rho in [L_max - 1, L_max].

    ``L_max`` is the largest rho-length in the census of words up to ``max_len``.
    """
    fuchsian_gate(rho, hol)
    census = _census(rho.genus, max_len)
    lr = np.array([marked_length(rho, w) for w in census])
    top = float(lr.max())
    idx = np.flatnonzero(lr >= top - 1.0)
    ratios = np.array([marked_length(hol, census.classes[i]) for i in idx]) / lr[idx]
    return ChiEstimate(float(ratios.mean()), max_len, len(idx), (top - 1.0, top),
                       float(ratios.std()))


@dataclass(frozen=True)
class BoundaryPair:
    xi: float
    h_xi: float
    word: Word


def attracting_point(g) -> float:
    for theta, kind in fixed_points_circle(g):
        if kind is Stability.ATTRACTING:
            return theta
    raise ValueError("element has no attracting fixed point")


def boundary_pair(rho: Representation, hol: Representation, w) -> BoundaryPair:
    return BoundaryPair(attracting_point(evaluate(rho, w)), attracting_point(evaluate(hol, w)),
                        Word(w))


def boundary_samples(rho: Representation, hol: Representation,
                     max_len: int) -> list[BoundaryPair]:
    """Attracting fixed points of rho(c) and hol(c), one pair per census class.

    Samples of the boundary map h, which sends the first angle to the second.
    """
    fuchsian_gate(rho, hol)
    out = []
    for w in _census(rho.genus, max_len):
        if (classify(evaluate(rho, w)) is Kind.HYPERBOLIC
                and classify(evaluate(hol, w)) is Kind.HYPERBOLIC):
            out.append(boundary_pair(rho, hol, w))
    return out


def cyclic_descents(values, tol: float = 1e-12) -> int:
    """Number of cyclic descents larger than ``tol``; 1 for a cyclically increasing sequence.

    Powers of one class share their fixed points, so near-ties are ignored.
    """
    v = list(values)
    return sum(1 for i in range(len(v)) if v[i] > v[(i + 1) % len(v)] + tol)


def is_monotone(pairs: list[BoundaryPair]) -> bool:
    """True when ordering by xi also orders h_xi cyclically (h preserves orientation)."""
    if len(pairs) < 3:
        return True
    ordered = sorted(pairs, key=lambda p: p.xi)
    return cyclic_descents(p.h_xi for p in ordered) == 1


def equivariance_defect(rho: Representation, hol: Representation, gamma, delta) -> float:
    """Largest circle distance between the pair of gamma delta gamma^-1 and the images of delta's pair."""
    from .moebius import circle_distance

    gamma, delta = Word(gamma), Word(delta)
    p = boundary_pair(rho, hol, delta)
    q = boundary_pair(rho, hol, gamma * delta * gamma.inverse())
    x = act_circle(evaluate(rho, gamma), p.xi)[0]
    y = act_circle(evaluate(hol, gamma), p.h_xi)[0]
    return max(circle_distance(x, q.xi), circle_distance(y, q.h_xi))


def theorem_e_check(rho: Representation, hol: Representation, T: float, max_len: int,
                    seed: int = 0) -> dict:
    """Compare the simulated transverse exponent with minus the census estimate of chi."""
    if T < MIN_HORIZON:
        raise ValueError(f"horizon must be at least {MIN_HORIZON:g}")
    chi = chi_estimate(rho, hol, max_len)
    lam = transverse_exponent(rho, hol, T, seed)
    discrepancy = abs(lam.value + chi.value)
    tol = max(0.05 * chi.value, 3 * lam.stderr + chi.spread)
    return {
        "lambda_hat": lam.value,
        "stderr": lam.stderr,
        "chi_hat": chi.value,
        "spread": chi.spread,
        "discrepancy": discrepancy,
        "tolerance": tol,
        "pass": bool(discrepancy <= tol),
        "chi": chi.to_dict(),
        "provenance": {"seeds": [seed], "T": T, "max_len": max_len,
                       "rho": rho.label, "hol": hol.label},
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
