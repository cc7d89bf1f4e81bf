import json

import numpy as np
import pytest

from folialab.fuchsian_pair import (
    FuchsianGateError,
    boundary_samples,
    chi_estimate,
    cyclic_descents,
    equivariance_defect,
    is_monotone,
    report_json,
    theorem_e_check,
)
from folialab.length_spectrum import enumerate_classes
from folialab.moebius import act_circle, circle_distance, moebius
from folialab.surface_rep import bolza, rotation_rep, trivial_rep, twist

B = bolza()
T1 = twist(B, 1)
H0 = moebius(1.4, 0.3, -0.2, 0.9)


def test_chi_identical_representations():
    c = chi_estimate(B, B, 5)
    assert c.value == 1.0 and c.spread == 0.0
    assert c.n_classes >= 10 and not c.thin
    lo, hi = c.length_window
    assert hi - lo == pytest.approx(1.0)


def test_chi_conjugate():
    c = chi_estimate(B, B.conjugate(H0), 5)
    assert c.value == pytest.approx(1.0, abs=1e-9)


def test_chi_twist_strictly_above_one():
    c = chi_estimate(B, T1, 6)
    assert c.value > 1 + c.spread
    # regression value of the census estimate
    assert c.value == pytest.approx(1.0990466, abs=1e-6)


def test_chi_at_least_one_minus_spread():
    for hol in (T1, twist(B, -2), twist(B, 2)):
        c = chi_estimate(B, hol, 5)
        assert c.value >= 1 - c.spread


def test_gate():
    with pytest.raises(FuchsianGateError):
        chi_estimate(B, rotation_rep(2, [0.3, 0.7, 1.1, 0.2]), 4)
    with pytest.raises(FuchsianGateError):
        chi_estimate(trivial_rep(), B, 4)


def test_boundary_identity():
    for p in boundary_samples(B, B, 3):
        assert p.xi == p.h_xi


def test_boundary_conjugate_forced():
    hol = B.conjugate(H0)
    for p in boundary_samples(B, hol, 4):
        assert circle_distance(act_circle(H0, p.xi)[0], p.h_xi) < 1e-9


def test_boundary_monotone():
    pairs = boundary_samples(B, T1, 5)
    assert len(pairs) == len(enumerate_classes(2, 5))
    assert is_monotone(pairs)
    # a scrambled sample is detected
    scrambled = [type(p)(p.xi, (p.h_xi * 7.3) % 1.0, p.word) for p in pairs]
    assert not is_monotone(scrambled)


def test_cyclic_descents():
    assert cyclic_descents([0.1, 0.2, 0.3]) == 1
    assert cyclic_descents([0.3, 0.1, 0.2]) == 1
    assert cyclic_descents([0.1, 0.3, 0.2]) == 2


def test_boundary_equivariance():
    rng = np.random.default_rng(0)
    classes = enumerate_classes(2, 4).classes
    for _ in range(50):
        g = classes[rng.integers(len(classes))]
        d = classes[rng.integers(len(classes))]
        assert equivariance_defect(B, T1, g, d) < 1e-8


def test_theorem_e_canonical():
    r = theorem_e_check(B, B, 1e4, 5, seed=0)
    assert r["pass"]
    assert r["chi_hat"] == 1.0
    assert r["lambda_hat"] == pytest.approx(-1.0, abs=0.02)
    doc = json.loads(report_json(r))
    for key in ("lambda_hat", "stderr", "chi_hat", "spread", "discrepancy", "pass", "provenance"):
        assert key in doc
    assert doc["provenance"] == {"seeds": [0], "T": 1e4, "max_len": 5, "rho": "bolza", "hol": "bolza"}


def test_theorem_e_conjugate():
    r = theorem_e_check(B, B.conjugate(H0), 1e4, 5, seed=1)
    assert r["pass"]


def test_theorem_e_horizon_guard():
    with pytest.raises(ValueError):
        theorem_e_check(B, B, 500, 5)


@pytest.mark.xfail(strict=True, reason="top-window census average is biased for the twist pair; "
                                        "product measured at 0.902")
def test_chi_inversion_product():
    a, b = chi_estimate(B, T1, 6), chi_estimate(T1, B, 6)
    assert a.value * b.value >= 1 - 0.05


def test_exponent_matches_displacement_growth():
    # an estimate of chi that shares no code with the fiber simulation
    from folialab.skewflow import transverse_exponent
    from oracles import chi_displacement

    lam = transverse_exponent(B, T1, 1e4, seed=0)
    chi = chi_displacement(B, T1, 1e4, seed=5)
    assert abs(lam.value + chi) < 3 * lam.stderr + 0.02
    assert chi > 1.15
