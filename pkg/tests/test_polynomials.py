import pytest
from hypothesis import given, strategies as st

from diffavoid.polynomials import (
    HomogeneousForm,
    PolynomialSyntaxError,
    UnivariatePolynomial as U,
    parse_int_list,
)


def test_parse_mixed_coefficients():
    f = U.parse("x^2+5x^3")
    assert f.terms == ((2, 1), (3, 5))
    assert (f.low_degree, f.degree, f.leading_coefficient) == (2, 3, 5)
    assert f(1) == 6 and f(2) == 44 and f(-1) == -4 and f(-2) == -36


@pytest.mark.parametrize(
    "text, terms",
    [
        ("x", ((1, 1),)),
        ("-x^2", ((2, -1),)),
        ("3*x**4 - 2x + 7", ((0, 7), (1, -2), (4, 3))),
        ("x^2 + x^2", ((2, 2),)),
        ("x*x", ((2, 1),)),
        ("12", ((0, 12),)),
    ],
)
def test_parse_grammar(text, terms):
    assert U.parse(text).terms == terms


@pytest.mark.parametrize("bad", ["", "x^", "x+", "y^2", "x^2 x1", "2^3", "x^-1", "(x+1)^2", "x^2 - x^2", "x*"])
def test_parse_rejects(bad):
    with pytest.raises(PolynomialSyntaxError):
        U.parse(bad)


def test_derivative_is_formal():
    assert U.parse("x^2-2").derivative() == U.parse("2x")
    assert U.parse("7").derivative() is None


def test_zero_polynomial_rejected():
    with pytest.raises(ValueError):
        U(((2, 0),))


terms = st.dictionaries(st.integers(0, 8), st.integers(-50, 50).filter(bool), min_size=1, max_size=5)


@given(terms)
def test_render_parse_round_trip(coeffs):
    f = U.from_coefficients(coeffs)
    assert U.parse(str(f)) == f


@given(terms, st.integers(-1000, 1000), st.integers(2, 200))
def test_eval_mod_matches_exact(coeffs, x, m):
    f = U.from_coefficients(coeffs)
    assert f.eval_mod(x, m) == f(x) % m


@given(st.text(alphabet="x0123456789^*+- ", max_size=20))
def test_parser_fuzz_never_crashes_unexpectedly(text):
    try:
        f = U.parse(text)
    except PolynomialSyntaxError:
        return
    assert U.parse(str(f)) == f


def test_large_arguments_are_exact():
    f = U.parse("x^2+5x^3")
    x = 2**40
    assert f(x) == x**2 + 5 * x**3


def test_form_parse_and_render():
    F = HomogeneousForm.parse("x1^2+x2^2")
    assert (F.arity, F.degree) == (2, 2)
    assert str(F) == "x1^2+x2^2"
    assert F.is_diagonal and F.diagonal_coefficients() == [1, 1]
    assert F((3, 4)) == 25
    G = HomogeneousForm.parse("x1^2+3x1*x2-x2^2")
    assert not G.is_diagonal
    assert G((2, 1)) == 4 + 6 - 1
    assert HomogeneousForm.parse(str(G)) == G


def test_form_power_sum():
    F = HomogeneousForm.power_sum(7, 4)
    assert F.arity == 7 and F.degree == 4
    assert F((1,) * 7) == 7


@pytest.mark.parametrize("bad", ["x1^2+x2", "x^2+y^2", "x0^2", "x1"])
def test_form_rejects(bad):
    with pytest.raises(PolynomialSyntaxError):
        HomogeneousForm.parse(bad)


def test_form_arity_padding():
    F = HomogeneousForm.parse("x1^2", arity=3)
    assert F.arity == 3 and F((2, 5, 7)) == 4


def test_parse_int_list():
    assert parse_int_list("0,3,6") == [0, 3, 6]
    assert parse_int_list("{0, 2}") == [0, 2]
    assert parse_int_list("") == []
