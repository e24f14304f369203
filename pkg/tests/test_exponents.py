import math

import pytest
from hypothesis import given, strategies as st

from diffavoid.constructions import build_ruzsa
from diffavoid.exponents import (
    SUBPOLYNOMIAL,
    CompareRow,
    chain_partial_sum,
    compare_report,
    gamma_chain,
    gamma_chain_pair,
    gamma_inhom,
    gamma_multivariate,
    gamma_ruzsa,
    observed_exponent,
    report,
    terms_for_epsilon,
)
from diffavoid.residues import ResidueSet


def test_headline_values():
    assert gamma_chain(65, 2, [65], [7, 17]) == pytest.approx(0.7685, abs=1e-4)
    assert gamma_inhom(5, 3, 2) == pytest.approx(0.8102, abs=1e-4)
    assert gamma_multivariate(3, 2, 3) == 0.5
    assert gamma_multivariate(2, 4, 2) == 0.25


def test_chain_closed_form_matches_pair_formula():
    for m, r1, r2 in [(65, 7, 17), (5, 2, 2), (13, 3, 5)]:
        for k in (2, 3):
            assert gamma_chain(m, k, [m], [r1, r2]) == pytest.approx(gamma_chain_pair(m, k, r1, r2), abs=1e-12)


def test_chain_closed_form_matches_long_partial_sum():
    sizes = [65] + [7, 17] * 40
    assert gamma_chain(65, 2, [65], [7, 17]) == pytest.approx(chain_partial_sum(65, 2, sizes), abs=1e-12)


@given(st.integers(2, 100), st.integers(2, 5), st.data())
def test_constant_chain_telescopes(m, k, data):
    r = data.draw(st.integers(1, m))
    assert gamma_chain(m, k, [m], [r]) == pytest.approx(gamma_ruzsa(m, k, r), abs=1e-12)


@given(st.integers(3, 60), st.integers(2, 6), st.data())
def test_inhom_monotone(m, d, data):
    r = data.draw(st.integers(1, m - 1))
    assert gamma_inhom(m, d, r + 1) > gamma_inhom(m, d, r)
    assert gamma_inhom(m, d + 1, r) > gamma_inhom(m, d, r)


def test_ruzsa_examples():
    assert gamma_ruzsa(5, 2, 2) == pytest.approx((1 + math.log(2, 5)) / 2)
    assert gamma_ruzsa(7, 3, 7) == 1.0
    assert gamma_ruzsa(7, 3, 1) == pytest.approx(2 / 3)


def test_inhom_d_equals_k_case():
    assert gamma_inhom(5, 2, 2) == gamma_ruzsa(5, 2, 2)
    assert gamma_inhom(9, 4, 1) == 0.75


def test_multivariate_trivial():
    assert gamma_multivariate(7, 2, 1) == 0.0


@pytest.mark.parametrize(
    "fn, args",
    [(gamma_ruzsa, (5, 2, 0)), (gamma_ruzsa, (5, 2, 6)), (gamma_ruzsa, (1, 2, 1)), (gamma_inhom, (5, 1, 2)),
     (gamma_multivariate, (3, 2, 10)), (gamma_chain, (5, 2, [5], []))],
)
def test_domain_errors(fn, args):
    with pytest.raises(ValueError):
        fn(*args)


def test_tail_bound():
    assert terms_for_epsilon(1.0) == 1
    assert terms_for_epsilon(0.25) == 3
    n = terms_for_epsilon(1e-6)
    assert 2.0 ** (1 - n) <= 1e-6 < 2.0 ** (2 - n)


def test_observed_exponent_coincides_with_formula_at_y4():
    cs = build_ruzsa(5, 2, ResidueSet.of(5, [0, 2]), 4)
    obs = observed_exponent(cs.size, cs.N)
    assert obs == pytest.approx(math.log(100) / math.log(625))
    assert obs == pytest.approx(gamma_ruzsa(5, 2, 2), abs=1e-12)


def test_report():
    rep = report("chain_periodic2", m=65, k=2, r1=7, r2=17)
    assert rep.value == pytest.approx(0.7685038229, abs=1e-10)
    assert report("greedy", d=3).value == pytest.approx(2 / 3)
    with pytest.raises(ValueError):
        report("nope")


def test_compare_report_sorted():
    rows = [
        CompareRow("b", 2 / 3, 0.8102, 0.75, 50000, 5**9),
        CompareRow("a", SUBPOLYNOMIAL, 0.5, 0.5, 729, 531441),
    ]
    text = compare_report(rows).splitlines()
    assert text[0].split()[:3] == ["instance", "greedy", "predicted"]
    assert text[1].startswith("a") and "sub-polynomial" in text[1]
    assert text[2].startswith("b") and "0.6667" in text[2] and "0.8102" in text[2]
