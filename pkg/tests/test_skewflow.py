import math

import numpy as np
import pytest

from folialab.cli import free_quotient_pair
from folialab.geoflow import Frame, closed_geodesic, flow, frame_at, liouville_sample, reduce, triple_coords
from folialab.length_spectrum import marked_length
from folialab.moebius import MoebiusElement, act_circle, circle_distance, moebius
from folialab.skewflow import (
    ContractionError,
    FiberChart,
    SkewState,
    WitnessKind,
    attracting_section,
    canonical_section,
    detect_invariant_measure,
    initial_state,
    periodic_exponent,
    run,
    simulated_periodic_exponents,
    skew_step,
    srb_histogram,
    transverse_exponent,
    tv_distance,
)
from folialab.surface_rep import Word, bolza, free_quotient_rep, rotation_rep, trivial_rep, twist

B = bolza()
ROT = rotation_rep(2, [0.3, 0.7, 1.1, 0.2])
FQ = free_quotient_rep(*free_quotient_pair(0.5, 0.4))


def start(seed=0, fiber=0.37):
    rng = np.random.default_rng(seed)
    return initial_state(B, liouville_sample(B, rng), fiber)


def test_rotation_holonomy_keeps_zero_log_derivative():
    s = run(B, ROT, start(), 200.0)
    assert s.log_deriv_sum == 0.0
    assert s.n_deck > 0


def test_trivial_holonomy_fiber_frozen():
    s0 = start()
    s = run(B, trivial_rep(), s0, 100.0)
    assert s.fiber == s0.fiber and s.log_deriv_sum == 0.0


def test_step_validation():
    with pytest.raises(ValueError):
        skew_step(B, B, start(), 0.6)
    with pytest.raises(ValueError):
        skew_step(B, trivial_rep(3), start(), 0.1)


def test_canonical_a1_loop_pins_sign_convention():
    orbit = closed_geodesic(B, Word([1]))
    fiber = canonical_section(orbit.axis_frame)
    s = run(B, B, SkewState(orbit.axis_frame, fiber), orbit.length)
    assert s.log_deriv_sum == pytest.approx(-marked_length(B, [1]), abs=1e-6)
    assert circle_distance(s.fiber, fiber) < 1e-8


def test_periodic_exponent_examples():
    assert periodic_exponent(B, B, [1]) == pytest.approx([-1.0, 1.0], abs=1e-12)
    assert periodic_exponent(B, ROT, [1, 2]) == [0.0]
    ex = periodic_exponent(B, FQ, [1])
    r = marked_length(FQ, [1]) / marked_length(B, [1])
    assert ex == pytest.approx([-r, r]) and r < 1
    # regression value
    assert r == pytest.approx(0.5 / (2 * math.acosh(1 + math.sqrt(2))), rel=1e-12)


@pytest.mark.parametrize("w", [Word([1]), Word([2, -3]), Word([1, 2, 3]), Word([3, -1, -4])])
def test_simulation_reproduces_periodic_exponents(w):
    for hol in (B, twist(B, 1), FQ):
        exact = periodic_exponent(B, hol, w)
        sim = simulated_periodic_exponents(B, hol, w)
        assert len(sim) == len(exact)
        for a, b in zip(sim, exact):
            assert a == pytest.approx(b, rel=1e-6)


def test_periodic_exponent_homogeneous():
    for k in (2, 3):
        assert periodic_exponent(B, twist(B, 1), Word([2, -1]) ** k) == pytest.approx(
            periodic_exponent(B, twist(B, 1), Word([2, -1])), rel=1e-9)


def test_backward_period_negates():
    w = Word([2, -3])
    orbit = closed_geodesic(B, w)
    hol = twist(B, 1)
    fwd = simulated_periodic_exponents(B, hol, w)
    bwd = simulated_periodic_exponents(B, hol, w.inverse())
    assert sorted(-x for x in fwd) == pytest.approx(bwd, rel=1e-6)
    assert orbit.length > 0


def test_cocycle_additivity():
    rng = np.random.default_rng(8)
    s0 = start(1)
    for _ in range(5):
        t1, t2 = (float(x) for x in rng.integers(1, 40, 2) * 0.5)
        a = run(B, twist(B, 1), run(B, twist(B, 1), s0, t1), t2)
        b = run(B, twist(B, 1), s0, t1 + t2)
        assert circle_distance(a.fiber, b.fiber) < 1e-8
        assert a.log_deriv_sum == pytest.approx(b.log_deriv_sum, abs=1e-8)


def test_transverse_exponent_examples():
    e = transverse_exponent(B, ROT, 500, seed=3)
    assert e.value == 0.0 and e.stderr == 0.0
    assert e.batches == 20 and e.horizon == 500
    with pytest.raises(ValueError):
        transverse_exponent(B, B, 50)


def test_exponent_series_csv():
    e = transverse_exponent(B, B, 200, seed=0, record_every=10)
    lines = e.series_csv().splitlines()
    assert lines[0] == "t,running_mean,batch_id"
    assert len(lines) == 21


def test_srb_trivial_holonomy_is_dirac():
    m = srb_histogram(B, trivial_rep(), 200, 3, 10, seed=2)
    for o in range(3):
        marg = m.per_orbit[o].sum(axis=0)
        assert marg.max() == marg.sum()
    assert m.normalized().sum() == pytest.approx(1.0, abs=1e-12)


def test_srb_canonical_spread_shrinks():
    # in frame coordinates the canonical attracting section is the constant 0
    spreads = []
    for T in (1e2, 1e3, 1e4):
        m = srb_histogram(B, B, T, 2, 16, seed=0, chart=FiberChart.FRAME)
        spreads.append(float(m.spread.max()))
    assert spreads[0] >= spreads[1] - 1e-6 >= spreads[2] - 2e-6
    assert spreads[2] < 1e-6


def test_attracting_section_canonical():
    rng = np.random.default_rng(9)
    for _ in range(5):
        f = liouville_sample(B, rng)
        s = attracting_section(B, B, f, 30.0)
        assert circle_distance(s, triple_coords(f).xi_plus) < 1e-6


def test_attracting_section_rotation_fails():
    with pytest.raises(ContractionError, match="non-contraction detected"):
        attracting_section(B, ROT, frame_at(1j, 0.2), 30.0)


def test_attracting_section_flow_equivariance():
    hol = twist(B, 1)
    f = liouville_sample(B, np.random.default_rng(10))
    f, _ = reduce(B, f)
    s0 = attracting_section(B, hol, f, 40.0)
    state = SkewState(f, s0)
    state = run(B, hol, state, 3.0)
    s1 = attracting_section(B, hol, state.base, 40.0)
    assert circle_distance(state.fiber, s1) < 1e-6


def test_detect_invariant_measure_examples():
    assert detect_invariant_measure(ROT).kind is WitnessKind.ELLIPTIC_COMMON_CENTER
    w = detect_invariant_measure(trivial_rep())
    assert w.kind is WitnessKind.COMMON_FIXED_POINT and w.points == (0.0,)
    assert detect_invariant_measure(B).kind is WitnessKind.NONE_DETECTED
    assert detect_invariant_measure(FQ).kind is WitnessKind.NONE_DETECTED
    # a common fixed point of two hyperbolics sharing an endpoint
    g1 = moebius(2, 0, 0, 0.5)
    g2 = moebius(1.5, 1, 0, 1 / 1.5)
    w = detect_invariant_measure(free_quotient_rep(g1, g2))
    assert w.kind is WitnessKind.COMMON_FIXED_POINT and w.points[0] == pytest.approx(0.5)
    # a common pair
    w = detect_invariant_measure(free_quotient_rep(g1, moebius(3, 0, 0, 1 / 3)))
    assert w.kind in (WitnessKind.COMMON_FIXED_POINT, WitnessKind.COMMON_FIXED_PAIR)


def test_chart_independence_short_horizon():
    C = moebius(1.3, 0.4, 0.2, 1.0)
    a = transverse_exponent(B, twist(B, 1), 2000, seed=4)
    b = transverse_exponent(B, twist(B, 1), 2000, seed=4, chart=C)
    # same orbit, different metric: the sums differ by a bounded coboundary
    assert abs(a.value - b.value) * a.horizon < 20


def test_tv_distance():
    p = np.array([1.0, 0, 0])
    q = np.array([0, 1.0, 0])
    assert tv_distance(p, q) == 1.0 and tv_distance(p, p) == 0.0


def test_long_closed_orbit_exponent():
    # period about 18.7: round-off in the start frame grows by exp(18.7) over
    # one period, yet the crossing sequence and so the exponents stay exact
    w = Word([1, 1, 4, 1, -2, -2])
    hol = twist(B, 1)
    sim = simulated_periodic_exponents(B, hol, w)
    assert sim == pytest.approx(periodic_exponent(B, hol, w), rel=1e-8)
