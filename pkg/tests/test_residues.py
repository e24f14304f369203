import itertools

import pytest
from hypothesis import given, settings, strategies as st

from diffavoid.polynomials import HomogeneousForm, UnivariatePolynomial as U
from diffavoid.residues import (
    CostBudgetError,
    HypothesisError,
    NotARootError,
    NotSquareFreeError,
    ResidueSet,
    SingularRootError,
    form_image_mod,
    form_image_mod_enumerated,
    hensel_lift,
    is_kth_power_residue_stable,
    is_prime,
    is_squarefree,
    lemma_divide_check,
    poly_image_mod,
    power_residues,
    root_condition_form,
    root_condition_form_enumerated,
    root_condition_univariate,
)


def S(m, *xs):
    return ResidueSet.of(m, xs)


class TestResidueSet:
    def test_validation(self):
        with pytest.raises(ValueError):
            ResidueSet(5, (0, 5))
        with pytest.raises(ValueError):
            ResidueSet(5, (2, 1))
        with pytest.raises(ValueError):
            ResidueSet(1, (0,))

    def test_of_reduces_and_sorts(self):
        assert ResidueSet.of(5, [7, 2, -3]).elements == (2,)
        assert ResidueSet.of(65, [31, 39, 8]).elements == (8, 31, 39)

    def test_render_and_parse(self):
        R = S(5, 0, 2)
        assert R.render() == "m=5:{0,2}"
        assert ResidueSet.parse(R.render()) == R

    def test_differences_are_ordered(self):
        assert S(5, 0, 2).nonzero_differences() == {2, 3}
        assert S(5, 0, 2).differences() == {0, 2, 3}

    def test_scaled_and_shifted(self):
        assert S(5, 0, 2).scaled(3) == S(5, 0, 1)
        assert S(5, 0, 2).shifted(4) == S(5, 1, 4)


class TestImages:
    def test_power_residues(self):
        assert power_residues(5, 2) == S(5, 0, 1, 4)
        assert power_residues(16, 4) == S(16, 0, 1)
        assert power_residues(7, 1) == ResidueSet.full(7)
        with pytest.raises(ValueError):
            power_residues(1, 2)

    def test_poly_image(self):
        assert poly_image_mod(U.parse("x^2+5x^3"), 5) == S(5, 0, 1, 4)
        assert poly_image_mod(U.parse("x^2"), 5) == S(5, 0, 1, 4)
        assert poly_image_mod(U.parse("x^2+1"), 3) == S(3, 1, 2)

    @settings(max_examples=40)
    @given(
        st.sampled_from([5, 6, 7, 10, 13, 15]),
        st.integers(2, 4),
        st.dictionaries(st.integers(0, 5), st.integers(-3, 3), max_size=3),
    )
    def test_multiples_of_m_vanish(self, m, k, g):
        coeffs = {k: 1}
        for e, c in g.items():
            coeffs[e] = coeffs.get(e, 0) + m * c
        if not any(coeffs.values()):
            return
        assert poly_image_mod(U.from_coefficients(coeffs), m) == power_residues(m, k)

    def test_form_image(self):
        F = HomogeneousForm.parse("x1^2+x2^2")
        assert form_image_mod(F, 9) == S(9, 0, 1, 2, 4, 5, 7, 8)
        assert form_image_mod(F, 2) == S(2, 0, 1)
        assert form_image_mod(HomogeneousForm.power_sum(7, 4), 16) == S(16, *range(8))

    @settings(max_examples=30, deadline=None)
    @given(st.lists(st.integers(-3, 3).filter(bool), min_size=1, max_size=3), st.integers(2, 3), st.integers(2, 12))
    def test_fast_path_matches_enumeration(self, coeffs, k, M):
        F = HomogeneousForm.diagonal(coeffs, k)
        assert form_image_mod(F, M) == form_image_mod_enumerated(F, M)

    def test_general_form_budget(self):
        F = HomogeneousForm.parse("x1*x2+x3^2+x4^2+x5^2+x6^2+x7^2+x8^2")
        with pytest.raises(CostBudgetError):
            form_image_mod(F, 16, budget=10**6)


class TestRootConditions:
    def test_univariate(self):
        assert root_condition_univariate(U.parse("x^2+5x^3"), 5)
        assert not root_condition_univariate(U.parse("x^2+x"), 2)
        assert root_condition_univariate(U.parse("x^2"), 15)

    def test_univariate_needs_squarefree(self):
        with pytest.raises(NotSquareFreeError):
            root_condition_univariate(U.parse("x^2"), 12)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_monomials_on_squarefree_moduli(self, k):
        f = U.monomial(k)
        for m in range(2, 101):
            if is_squarefree(m):
                assert root_condition_univariate(f, m)

    def test_forms(self):
        F = HomogeneousForm.parse("x1^2+x2^2")
        assert root_condition_form(F, 3, 2)
        assert not root_condition_form(F, 5, 2)
        assert root_condition_form(HomogeneousForm.power_sum(7, 4), 2, 4)
        with pytest.raises(ValueError):
            root_condition_form(F, 3, 3)

    def test_form_root_brute_force(self):
        # independent scan of every vector mod m^k
        F = HomogeneousForm.parse("x1^2+2x2^2")
        for m in (2, 3, 5, 7):
            M = m * m
            expect = all(
                x % m == 0 and y % m == 0
                for x, y in itertools.product(range(M), repeat=2)
                if (x * x + 2 * y * y) % M == 0
            )
            assert root_condition_form(F, m, 2) == expect == root_condition_form_enumerated(F, m, 2)

    def test_lemma_divide(self):
        assert lemma_divide_check(U.parse("x^2+5x^3"), 5, 2, 10**4)
        assert lemma_divide_check(U.parse("x^2"), 5, 3, 10**4)
        with pytest.raises(HypothesisError):
            lemma_divide_check(U.parse("x^2+x"), 2, 1, 100)


class TestHensel:
    def test_examples(self):
        f = U.parse("x^2-2")
        assert hensel_lift(f, 3, 7, 2) == 10
        assert hensel_lift(f, 3, 7, 1) == 3
        with pytest.raises(SingularRootError):
            hensel_lift(U.parse("x^2-1"), 1, 2, 3)
        with pytest.raises(NotARootError):
            hensel_lift(f, 2, 7, 2)

    def test_matches_brute_force(self):
        f = U.parse("x^2-2")
        roots = [x for x in range(49) if (x * x - 2) % 49 == 0 and x % 7 == 3]
        assert roots == [hensel_lift(f, 3, 7, 2)]

    @settings(max_examples=60)
    @given(st.sampled_from([3, 5, 7, 11, 13]), st.integers(2, 3), st.integers(1, 200), st.integers(2, 5))
    def test_tower_consistency(self, p, k, w, N):
        if w % p == 0 or k % p == 0:
            return
        base = next((x for x in range(1, p) if pow(x, k, p) == w % p), None)
        if base is None:
            return
        f = U(((k, 1), (0, -w)))
        top = hensel_lift(f, base, p, N)
        assert top % p ** (N - 1) == hensel_lift(f, base, p, N - 1)
        assert pow(top, k, p**N) == w % p**N

    def test_stability_examples(self):
        assert is_kth_power_residue_stable(2, 7, 2, 3)
        assert not is_kth_power_residue_stable(3, 7, 2, 1)
        assert is_kth_power_residue_stable(1, 5, 2, 4)
        with pytest.raises(HypothesisError):
            is_kth_power_residue_stable(3, 3, 2, 2)
        with pytest.raises(HypothesisError):
            is_kth_power_residue_stable(2, 2, 2, 2)

    @pytest.mark.parametrize(
        "p, k", [(p, k) for p in (3, 5, 7, 11, 13) for k in (2, 3) if p % k]
    )
    def test_stability_is_independent_of_N(self, p, k):
        for w in range(1, 3 * p):
            if w % p == 0:
                continue
            answers = {is_kth_power_residue_stable(w, p, k, N) for N in range(1, 5)}
            assert len(answers) == 1
            assert answers.pop() == ((w % p**3) in power_residues(p**3, k))


def test_is_prime():
    assert [n for n in range(30) if is_prime(n)] == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
