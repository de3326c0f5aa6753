import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from iwalog.iwasawa_coeff import (LaurentElement, PowerSeriesElement, PrecisionError, divide_by_p,
                                  invert_laurent, invert_series, phi_series)
from iwalog.padic_core import ArithmeticContext, UnramifiedElement, frobenius

CTX3 = ArithmeticContext(p=3, N=5, M=8, guard=2, L_neg=6)
CTX2 = ArithmeticContext(p=2, N=6, M=8, guard=2, L_neg=6)
MOD3 = 3 ** CTX3.K

coef3 = st.lists(st.integers(0, MOD3 - 1), min_size=1, max_size=CTX3.M)


def series(cs, ctx=CTX3):
    return PowerSeriesElement.from_coeffs(ctx, cs)


def coeffs(x, ctx=CTX3):
    return [x.coefficient(n)[0] for n in range(ctx.M)]


def test_phi_on_constants_is_frobenius():
    ctx = ArithmeticContext(p=3, f=2, N=5, M=8, guard=2)
    c = (5, 7)
    x = PowerSeriesElement.from_coeffs(ctx, [c])
    want = frobenius(UnramifiedElement(ctx.ring(), c))
    assert phi_series(x).coefficient(0) == want.c


def test_phi_of_T_p2():
    T = PowerSeriesElement.T(CTX2)
    assert phi_series(T).equals(T * T + T * 2)


@given(coef3)
def test_phi_is_T_to_the_p_mod_p(cs):
    # oracle: (1+T)^3 - 1 = T^3 mod 3, so phi(x)(T) = x(T^3) mod 3 for f = 1
    x = series(cs)
    got = [c % 3 for c in coeffs(phi_series(x))]
    want = [0] * CTX3.M
    for n, c in enumerate(cs):
        if 3 * n < CTX3.M:
            want[3 * n] = c % 3
    assert got == want


@given(coef3, coef3)
def test_product_matches_sympy(a, b):
    T = sympy.symbols("T")
    pa = sum(c * T ** i for i, c in enumerate(a))
    pb = sum(c * T ** i for i, c in enumerate(b))
    prod = sympy.Poly(sympy.expand(pa * pb), T)
    want = [int(prod.coeff_monomial(T ** n)) % MOD3 for n in range(CTX3.M)]
    assert coeffs(series(a) * series(b)) == want


@given(coef3, coef3, coef3)
def test_ring_axioms(a, b, c):
    x, y, z = series(a), series(b), series(c)
    assert ((x * y) * z).equals(x * (y * z))
    assert (x * (y + z)).equals(x * y + x * z)
    assert (x * y).equals(y * x)


def test_invert_series_examples():
    one = series([1])
    assert invert_series(one).equals(one)
    geo = invert_series(series([1, -1]))
    assert coeffs(geo) == [1] * CTX3.M
    four = series([4])
    assert (invert_series(four) * four).equals(one)


@given(coef3, coef3)
def test_inverse_of_product(a, b):
    x = series([1] + a)
    y = series([2] + b)
    assert invert_series(x * y).equals(invert_series(y) * invert_series(x))
    assert (x * invert_series(x)).equals(series([1]))


def test_invert_series_rejects_non_units():
    with pytest.raises(ZeroDivisionError):
        invert_series(series([3, 1]))


def test_invert_laurent_examples():
    T = LaurentElement.T(CTX3)
    one = LaurentElement.from_terms(CTX3, {0: 1})
    assert (invert_laurent(T) * T).equals(one)
    assert invert_laurent(T).equals(LaurentElement.from_terms(CTX3, {-1: 1}))
    with pytest.raises(ZeroDivisionError):
        invert_laurent(LaurentElement.from_terms(CTX3, {0: 3}))


def test_invert_T_plus_p():
    # (T + p)^{-1} = sum_k (-p)^k T^{-1-k}
    x = LaurentElement.T(CTX3) + 3
    z = invert_laurent(x)
    want = LaurentElement.from_terms(CTX3, {-1 - k: (-3) ** k for k in range(CTX3.K)})
    assert z.equals(want)
    assert (x * z).equals(LaurentElement.from_terms(CTX3, {0: 1}))


@given(st.dictionaries(st.integers(-CTX3.L_neg, 3), st.integers(0, MOD3 - 1), min_size=1))
def test_laurent_inverse_round_trip(terms):
    x = LaurentElement.from_terms(CTX3, terms)
    if all(c % 3 == 0 for c in terms.values()):
        return
    z = invert_laurent(x)
    assert (x * z).equals(LaurentElement.from_terms(CTX3, {0: 1}))


def test_divide_by_p_examples():
    T = PowerSeriesElement.T(CTX3)
    y = divide_by_p(T * 3, 1)
    assert y.dexp == 0 and y.equals(T)
    z = divide_by_p(T, 1)
    assert z.dexp == 1
    with pytest.raises(PrecisionError):
        divide_by_p(T, CTX3.K)
