import json
import math

import pytest

from folialab.cli import free_quotient_pair
from folialab.length_spectrum import (
    Verdict,
    canonical_form,
    domination_report,
    enumerate_classes,
    marked_length,
)
from folialab.moebius import moebius
from folialab.surface_rep import Word, bolza, free_quotient_rep, rotation_rep, trivial_rep, twist

from oracles import brute_force_classes

SYSTOLE = 2 * math.acosh(1 + math.sqrt(2))


def test_census_small_counts():
    c1 = enumerate_classes(2, 1)
    assert len(c1) == 4
    assert set(c1) == {(1,), (2,), (3,), (4,)}
    c2 = enumerate_classes(2, 2)
    assert (1, 2) in c2.classes and (2, 1) not in c2.classes


@pytest.mark.parametrize("max_len", [1, 2, 3, 4])
def test_census_matches_brute_force(max_len):
    census = enumerate_classes(2, max_len)
    oracle = brute_force_classes(4, max_len)
    assert len(census) == len(oracle)
    assert {canonical_form(w) for w in census} == {canonical_form(Word(w)) for w in oracle}


def test_census_invariants():
    census = enumerate_classes(2, 5)
    seen = set()
    for w in census:
        assert w.cyclically_reduced and w == Word(w)
        assert canonical_form(w) == w
        assert w not in seen
        seen.add(w)
    lengths = [len(w) for w in census]
    assert lengths == sorted(lengths)


def test_census_caps():
    with pytest.raises(ValueError):
        enumerate_classes(2, 17)
    with pytest.raises(ValueError):
        enumerate_classes(2, 0)


def test_marked_length_examples():
    b = bolza()
    assert all(marked_length(trivial_rep(), w) == 0 for w in enumerate_classes(2, 2))
    w = Word([1, -2, 3])
    for k in (1, 2, 5):
        assert marked_length(b, w ** k) == pytest.approx(k * marked_length(b, w), rel=1e-9)
    shortest = min(marked_length(b, w) for w in enumerate_classes(2, 4))
    assert shortest == pytest.approx(SYSTOLE, abs=1e-9)


def test_domination_examples():
    b = bolza()
    r = domination_report(b, rotation_rep(2, [0.3, 0.7, 1.1, 0.2]), 4)
    assert r.kappa_hat == 0 and r.verdict is Verdict.DOMINATED_AT_CENSUS
    r = domination_report(b, b, 4)
    assert r.kappa_hat == pytest.approx(1.0, abs=1e-9) and r.verdict is Verdict.NOT_DOMINATED


def test_domination_short_free_quotient():
    # generators of lengths 0.08 and 0.06 with perpendicular axes
    hol = free_quotient_rep(*free_quotient_pair(0.08, 0.06))
    r = domination_report(bolza(), hol, 6)
    assert r.kappa_hat < 1
    assert r.verdict is Verdict.DOMINATED_AT_CENSUS
    # regression value
    assert r.kappa_hat == pytest.approx(0.034900113041, abs=1e-9)


def test_report_consistency_and_export():
    b = bolza()
    hol = free_quotient_rep(*free_quotient_pair(1.5, 1.2, 1.0))
    r = domination_report(b, hol, 4)
    recomputed = marked_length(hol, r.worst_class) / marked_length(b, r.worst_class)
    assert r.kappa_hat == pytest.approx(recomputed, abs=1e-12)
    doc = json.loads(r.to_json())
    assert set(doc) == {"kappa_hat", "worst_class", "census_size", "excluded", "verdict"}
    lines = r.to_csv().splitlines()
    assert lines[0] == "class,l_rho,l_hol,ratio" and len(lines) == r.census_size + 1


def test_exclusions_are_counted():
    r = domination_report(trivial_rep(), bolza(), 2)
    assert r.excluded == r.census_size
    assert r.verdict is Verdict.INCONCLUSIVE
    with pytest.raises(ValueError):
        domination_report(bolza(), trivial_rep(3), 2)


def test_kappa_nondecreasing_in_max_len():
    b = bolza()
    for hol in (twist(b, 1), free_quotient_rep(*free_quotient_pair(1.5, 1.2, 1.0)),
                rotation_rep(2, [0.3, 0.7, 1.1, 0.2])):
        ks = [domination_report(b, hol, n).kappa_hat for n in range(1, 6)]
        assert all(x <= y for x, y in zip(ks, ks[1:]))


def test_ratios_invariant_under_conjugation():
    b = bolza()
    hol = twist(b, 1)
    h = moebius(1.2, 0.3, -0.2, 0.8)
    r1 = domination_report(b, hol, 3)
    r2 = domination_report(b.conjugate(h), hol.conjugate(h.inverse()), 3)
    for x, y in zip(r1.rows, r2.rows):
        assert x[3] == pytest.approx(y[3], rel=1e-9)


def test_fuchsian_pairs_never_dominate():
    b = bolza()
    for k in (1, 2, -1):
        r = domination_report(b, twist(b, k), 6)
        assert r.kappa_hat >= 1 - 1e-6
        assert r.verdict is Verdict.NOT_DOMINATED
