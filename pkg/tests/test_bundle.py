import random
from fractions import Fraction
from math import comb

import numpy as np
import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy.parsing.sympy_parser import (
    convert_xor,
    implicit_multiplication_application,
    parse_expr,
    standard_transformations,
)

from ternwaring.bundle import (
    BundlePoint,
    ChowParseError,
    InvalidPointError,
    ambient_dim,
    chow_degree,
    chow_reduce,
    embed,
    expected_secant_dimension,
    is_defective,
    parse_chow_expr,
    random_point,
    secant_dimension,
    tangent_frame,
    terracini_rank,
    trial_rng,
)
from ternwaring.linalg import ScalarDomain, rank

FP = ScalarDomain.prime_field()
Q = ScalarDomain.rational()


def test_embed_examples():
    v = embed(BundlePoint((1, 0, 0), (1, 1)), 2, 3, Q)
    assert len(v) == 16
    assert v[0] == 1 and v[6] == 1 and sum(abs(x) for x in v) == 2
    z = embed(BundlePoint((3, -1, 2), (0, 1)), 2, 3, Q)
    assert all(x == 0 for x in z[:6]) and any(z[6:])
    assert embed(BundlePoint((1, 1, 0), (1, 0)), 2, 3, Q) == [1, 2, 0, 1, 0, 0] + [0] * 10


def test_invalid_points():
    with pytest.raises(InvalidPointError):
        embed(BundlePoint((0, 0, 0), (1, 1)), 2, 3)
    with pytest.raises(InvalidPointError):
        tangent_frame(BundlePoint((1, 0, 0), (0, 0)), 2, 3)
    with pytest.raises(InvalidPointError):
        BundlePoint((1, 0), (1, 1))


@pytest.mark.parametrize("c,d", [(1, 1), (2, 3), (3, 3), (4, 8), (2, 10)])
def test_frame_rank_four(c, d):
    rng = trial_rng(4, 0)
    for _ in range(3):
        pt = random_point(rng, FP.p)
        assert rank(tangent_frame(pt, c, d, FP), FP) == 4
        zpt = random_point(rng, FP.p, on_section=True)
        assert rank(tangent_frame(zpt, c, d, FP), FP) == 4


def test_frame_on_section_shape():
    c, d = 2, 3
    frame = tangent_frame(BundlePoint((1, 2, 3), (0, 1)), c, d, Q)
    nc = comb(c + 2, 2)
    for vec in frame[2:]:
        assert all(x == 0 for x in vec[:nc])
    assert all(x == 0 for x in frame[0][nc:])
    assert ambient_dim(1, 1) + 1 == 6


@settings(max_examples=40, deadline=None)
@given(
    st.integers(1, 5), st.integers(0, 4),
    st.lists(st.integers(-50, 50), min_size=3, max_size=3).filter(any),
    st.lists(st.integers(-50, 50), min_size=2, max_size=2).filter(any),
)
def test_embed_in_frame_span(c, extra, u, a):
    d = c + extra
    pt = BundlePoint(u, a)
    frame = tangent_frame(pt, c, d, Q)
    assert rank(frame + [embed(pt, c, d, Q)], Q) == rank(frame, Q)


def test_rational_and_prime_frames_agree():
    pt = BundlePoint((2, -1, 3), (5, 7))
    assert terracini_rank(3, 4, [pt], Q) == terracini_rank(3, 4, [pt], FP) == 4
    exact = embed(BundlePoint((Fraction(1, 2), 1, 0), (1, 1)), 2, 2, Q)
    assert exact[0] == Fraction(1, 4)


def test_secant_examples():
    assert secant_dimension(3, 3, 5) == 18
    assert secant_dimension(2, 2, 3) == 11 == ambient_dim(2, 2)
    assert secant_dimension(1, 5, 6) < 23
    assert secant_dimension(2, 3, 4) == 15


def test_defective_examples():
    assert is_defective(3, 3, 5)
    assert not is_defective(4, 8, 14)
    assert not is_defective(2, 3, 4)
    assert is_defective(1, 5, 6)


@pytest.mark.parametrize("c,d", [(2, 3), (3, 3), (1, 5), (3, 5)])
def test_secant_monotone_and_bounded(c, d):
    N = ambient_dim(c, d)
    prev = -1
    for k in range(1, (N + 1) // 4 + 3):
        s = secant_dimension(c, d, k)
        assert prev <= s <= expected_secant_dimension(c, d, k)
        prev = s


def test_secant_seed_stability():
    for c, d, k in [(3, 3, 5), (2, 3, 4), (4, 5, 7)]:
        assert len({secant_dimension(c, d, k, seed=s) for s in (0, 1, 2)}) == 1


def test_secant_other_prime():
    assert secant_dimension(3, 3, 5, p=1_000_003) == 18


# Chow ring. Oracle: integral of T^(1+i) H^(2-i) is the complete homogeneous
# symmetric polynomial h_i(c, d), applied to a sympy expansion.

def h(i, c, d):
    return sum(c**j * d ** (i - j) for j in range(i + 1))


def oracle_degree(expr, c, d):
    T, H = sympy.symbols("T H")
    tr = standard_transformations + (implicit_multiplication_application, convert_xor)
    poly = sympy.Poly(sympy.expand(parse_expr(expr, local_dict={"T": T, "H": H}, transformations=tr)), T, H)
    total = 0
    for (a, b), coeff in poly.terms():
        if a + b == 3 and b <= 2:
            total += int(coeff) * h(a - 1, c, d)
        elif a + b == 3:
            pass  # H^3 = 0
        else:
            raise ValueError("not top-dimensional")
    return total


def test_chow_examples():
    for c, d in [(3, 3), (4, 8), (1, 1), (2, 7)]:
        assert chow_degree("T^3", c, d) == c * c + c * d + d * d
        assert chow_degree(f"(T-{c}H)*T*H", c, d) == d
        assert chow_degree("H^3", c, d) == 0
    assert chow_degree("T^3", 3, 3) == 27


def test_chow_fundamental_relation():
    for c, d in [(1, 2), (3, 5), (6, 6)]:
        r = chow_reduce(f"T^2 - {c + d}T H + {c * d}H^2", c, d)
        assert all(x == 0 for x in r.coeffs)
        assert all(x == 0 for x in chow_reduce("H^3", c, d).coeffs)


def test_chow_against_oracle():
    rnd = random.Random(2)
    exprs = ["T^3", "T^2 H", "T H^2", "(T - 2H)^2 T", "(2T + H)^3", "(T+H)(T-H)(3T-5H)", "-T^3 + 7 T H^2"]
    for _ in range(20):
        c = rnd.randint(1, 20)
        d = rnd.randint(c, 20)
        for e in exprs:
            assert chow_degree(e, c, d) == oracle_degree(e, c, d)


def test_chow_hilbert_polynomial():
    # h^0(X, mT) = sum_j dim C[x]_{(m-j)c + jd}; its third difference is deg X = T^3
    for c, d in [(1, 1), (2, 3), (4, 8), (7, 9)]:
        h0 = [sum(comb((m - j) * c + j * d + 2, 2) for j in range(m + 1)) for m in range(8)]
        third = np.diff(h0, 3)
        assert set(third.tolist()) == {chow_degree("T^3", c, d)}


def test_chow_confluence():
    for c, d in [(2, 5), (4, 8), (10, 10)]:
        z = chow_reduce(f"T - {c}H", c, d)
        t = chow_reduce("T", c, d)
        a = (z * z) * t
        b = z * (z * t)
        assert a == b == chow_reduce(f"(T-{c}H)^2*T", c, d)
        assert a.degree() == chow_reduce(f"T^3 - {2 * c}T^2 H + {c * c}T H^2", c, d).degree()


def test_chow_parser():
    assert parse_chow_expr("2T H") == {(1, 1): 2}
    assert parse_chow_expr("T**2 - T^2") in ({}, {(2, 0): 0})
    with pytest.raises(ChowParseError):
        parse_chow_expr("T^")
    with pytest.raises(ChowParseError):
        parse_chow_expr("X")
    assert not chow_reduce("T", 2, 3).is_top()
    with pytest.raises(ValueError):
        chow_reduce("T", 2, 3).degree()
