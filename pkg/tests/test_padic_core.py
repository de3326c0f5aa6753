import itertools

import pytest
import sympy
from hypothesis import given
from hypothesis import strategies as st

from iwalog.padic_core import (ArithmeticContext, IntModOps, ModMatrix, UnramifiedElement, UnramifiedRing,
                               default_modulus, det_division_free, det_elimination, frobenius, howell_solve,
                               teichmuller, trace_to_base)


def ring(p, f=1, W=12, modulus=None):
    return UnramifiedRing.get(p, modulus or default_modulus(p, f), W)


# frobenius / teichmuller / trace


@given(st.integers(min_value=0, max_value=3 ** 12 - 1))
def test_frobenius_is_identity_when_f_is_1(a):
    x = UnramifiedElement(ring(3), a)
    assert frobenius(x) == x


def test_frobenius_fixes_one():
    R = ring(3, 2, modulus=(1, 0, 1))
    assert frobenius(UnramifiedElement(R, 1)) == 1


def test_frobenius_of_root_of_u2_plus_1():
    # oracle: the unique root of g(u) = u^2 + 1 congruent to u^3 mod 3 is -u
    R = ring(3, 2, modulus=(1, 0, 1))
    u = UnramifiedElement(R, (0, 1))
    fu = frobenius(u)
    assert fu * fu + 1 == 0
    assert all((a - b) % 3 == 0 for a, b in zip(fu.c, (u ** 3).c))
    assert fu == -u


@given(st.tuples(st.integers(0, 3 ** 12 - 1), st.integers(0, 3 ** 12 - 1)),
       st.tuples(st.integers(0, 3 ** 12 - 1), st.integers(0, 3 ** 12 - 1)))
def test_frobenius_is_a_ring_map(a, b):
    R = ring(3, 2)
    x, y = UnramifiedElement(R, a), UnramifiedElement(R, b)
    assert frobenius(x * y) == frobenius(x) * frobenius(y)
    assert frobenius(x + y) == frobenius(x) + frobenius(y)
    assert frobenius(frobenius(x)) == x


def test_teichmuller_small_cases():
    assert teichmuller(ring(3), 1) == 1
    R3 = ring(3, W=8)
    assert teichmuller(R3, 2) == -1
    # oracle: iterate x <- x^5 mod 125 to its fixed point
    R5 = UnramifiedRing.get(5, (0, 1), 3)
    assert teichmuller(R5, 2).c == (57,)


@pytest.mark.parametrize("p,f", [(2, 1), (2, 2), (3, 1), (3, 2), (5, 2)])
def test_teichmuller_is_a_root_of_unity(p, f):
    R = ring(p, f)
    for r in itertools.product(range(p), repeat=f):
        if any(r):
            t = teichmuller(R, r)
            assert t ** (p ** f - 1) == 1
            assert tuple(c % p for c in t.c) == r


def test_trace_examples():
    assert trace_to_base(UnramifiedElement(ring(3), 7)) == 7
    assert trace_to_base(UnramifiedElement(ring(2, 2), 1)) == 2
    R = ring(3, 2, modulus=(1, 0, 1))
    assert trace_to_base(UnramifiedElement(R, (0, 1))) == 0


def test_context_rejects_bad_input():
    with pytest.raises(ValueError):
        ArithmeticContext(p=4)
    with pytest.raises(ValueError):
        ArithmeticContext(p=3, f=2, modulus=(2, 0, 1))  # u^2 + 2 = (u-1)(u+1) mod 3
    assert ArithmeticContext(p=3, N=5, guard=2).K == 7


# Howell solving


def test_howell_examples():
    A = ModMatrix([[1, 0], [0, 1]], 2, 3)
    assert howell_solve(A, [0, 0]) == ([0, 0], True)
    assert howell_solve(A, [5, 3]) == ([5, 3], True)
    A = ModMatrix([[2]], 2, 3)
    x, ok = howell_solve(A, [4])
    assert ok and x[0] % 4 == 2
    assert howell_solve(A, [1]) == (None, False)


mat_entry = st.integers(0, 8)


@given(st.lists(st.lists(mat_entry, min_size=2, max_size=2), min_size=1, max_size=3),
       st.lists(mat_entry, min_size=3, max_size=3))
def test_howell_membership_matches_exhaustive_search(rows, b):
    # oracle: enumerate every x in (Z/9)^2
    A = ModMatrix(rows, 3, 2)
    b = b[:len(rows)]
    reach = {tuple(A.apply(list(x))) for x in itertools.product(range(9), repeat=2)}
    x, ok = howell_solve(A, b)
    assert ok == (tuple(v % 9 for v in b) in reach)
    if ok:
        assert A.apply(x) == [v % 9 for v in b]


# determinants


def test_det_small():
    ops = IntModOps(3, 5)
    assert det_division_free([[7]], ops) == 7
    a, b, c, d = 4, 11, 2, 9
    assert det_division_free([[a, b], [c, d]], ops) == (a * d - b * c) % 243


@given(st.integers(1, 6), st.integers(0, 2 ** 32), st.sampled_from([(2, 6), (3, 5)]))
def test_det_matches_sympy(n, seed, pk):
    import random
    p, k = pk
    rng = random.Random(seed)
    A = [[rng.randrange(p ** k) for _ in range(n)] for _ in range(n)]
    want = int(sympy.Matrix(A).det()) % p ** k
    ops = IntModOps(p, k)
    assert det_division_free(A, ops) == want
    assert det_elimination(A, ops) == want


def test_berkowitz_equals_elimination_4x4(rng):
    ops = IntModOps(3, 5)
    for _ in range(20):
        A = [[rng.randrange(243) for _ in range(4)] for _ in range(4)]
        assert det_division_free(A, ops) == det_elimination(A, ops)
