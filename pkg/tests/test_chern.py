"""Atiyah classes and Chern data, checked against sympy polynomial arithmetic."""

from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import rationals
from voacoinv.chern import (AtiyahCombination, TautPolynomial, baer_sum, character_from_total_chern,
                            chern_character, first_chern, moduli_dimension, scalar_mul, taut_exp,
                            taut_log, total_chern, total_chern_from_character)
from voacoinv.errors import DimensionError, DomainError

EPS = sp.symbols("eps")


def sympy_truncated(expr_of_eps, lam, psis, top):
    """Coefficients of a sympy expression in lambda, psi scaled by eps, through eps^top."""
    ser = sp.expand(sp.series(expr_of_eps, EPS, 0, top + 1).removeO())
    poly = sp.Poly(ser.subs(EPS, 1), lam, *psis)
    return {m: Fraction(str(c)) for m, c in poly.terms() if c}


def symbols(n):
    lam = sp.symbols("lam")
    return lam, sp.symbols(f"psi1:{n + 1}")


def q(x):
    return sp.Rational(x.numerator, x.denominator)


stable = st.sampled_from([(0, 3), (0, 4), (0, 5), (1, 1), (1, 2), (2, 0)])


@given(stable, st.integers(0, 4), rationals(), st.data())
def test_chern_character_matches_sympy_exponential(gn, rank, c, data):
    g, n = gn
    a = data.draw(st.lists(rationals(), min_size=n, max_size=n))
    lam, psis = symbols(n)
    top = moduli_dimension(g, n)
    x = EPS * (q(c) / 2 * lam + sum(q(ai) * p for ai, p in zip(a, psis)))
    assert chern_character(rank, c, a, g, n).coeffs == sympy_truncated(rank * sp.exp(x), lam, psis, top)
    assert total_chern(rank, c, a, g, n).coeffs == sympy_truncated((1 + x) ** rank, lam, psis, top)


@given(stable, st.integers(1, 4), rationals(), st.data())
def test_newton_identities_round_trip(gn, rank, c, data):
    g, n = gn
    a = data.draw(st.lists(rationals(), min_size=n, max_size=n))
    ch = chern_character(rank, c, a, g, n)
    ct = total_chern(rank, c, a, g, n)
    assert total_chern_from_character(ch) == ct
    assert character_from_total_chern(ct, rank) == ch


def test_newton_identities_on_distinct_roots():
    # roots lambda and psi_1 (rank 2): c = (1 + lambda)(1 + psi_1)
    lam = TautPolynomial.linear(0, 5, 1, [0] * 5)
    psi = TautPolynomial.linear(0, 5, 0, [1, 0, 0, 0, 0])
    ch = taut_exp(lam) + taut_exp(psi)
    assert total_chern_from_character(ch) == (lam + 1) * (psi + 1)
    assert character_from_total_chern((lam + 1) * (psi + 1), 2) == ch


@given(stable, st.data())
def test_exp_log_inverse(gn, data):
    g, n = gn
    lamc = data.draw(rationals())
    a = data.draw(st.lists(rationals(), min_size=n, max_size=n))
    y = TautPolynomial.linear(g, n, lamc, a)
    y = y + y * y.scale(Fraction(1, 3))
    assert taut_log(taut_exp(y)) == y


def test_known_renderings():
    assert chern_character(1, 1, [Fraction(1, 2)], 1, 1).to_text() == "1 + 1/2·λ + 1/2·ψ₁"
    assert total_chern(2, 1, [Fraction(1, 2)], 1, 1).to_text() == "1 + λ + ψ₁"
    ising = chern_character(1, Fraction(1, 2), [Fraction(1, 16)] * 2 + [Fraction(1, 2)] * 2, 0, 4)
    assert ising.to_text() == "1 + 1/4·λ + 1/16·ψ₁ + 1/16·ψ₂ + 1/2·ψ₃ + 1/2·ψ₄"


def test_atiyah_combinations_form_a_vector_space():
    x = AtiyahCombination.of_module_data(Fraction(1, 2), [Fraction(1, 16), Fraction(1, 2)])
    y = AtiyahCombination(1, (2, -3))
    assert baer_sum(x, y) == AtiyahCombination(Fraction(5, 4), (Fraction(33, 16), Fraction(-5, 2)))
    assert (x + (-x)).is_trivial()
    assert scalar_mul(2, x) == x + x == 2 * x
    assert first_chern(3, x, 1) == TautPolynomial.linear(1, 2, Fraction(3, 4), [Fraction(3, 16), Fraction(3, 2)])
    with pytest.raises(DimensionError):
        baer_sum(x, AtiyahCombination.zero(3))


def test_degree_truncation_and_domain_errors():
    assert moduli_dimension(0, 3) == 0
    assert chern_character(4, 1, [1, 2, 3], 0, 3) == TautPolynomial.constant(0, 3, 4)
    with pytest.raises(DomainError):
        moduli_dimension(0, 2)
    with pytest.raises(DomainError):
        chern_character(-1, 1, [1], 1, 1)
    with pytest.raises(DimensionError):
        chern_character(1, 1, [1, 2], 1, 1)
    with pytest.raises(DomainError):
        taut_log(TautPolynomial.constant(1, 1, 2))
