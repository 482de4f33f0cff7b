from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from ratblowup.links import (
    ContinuedFraction,
    FramedLink,
    LinkError,
    MalformedCFError,
    ParseError,
    PlumbingChain,
    cf_value,
    chain_to_link,
    neg_cf_expand,
    parse_document,
    parse_link,
    serialize_link,
)


def naive_value(coeffs):
    # independent evaluation from the front with explicit numerator/denominator
    # recurrences: p_k = a_k p_{k-1} - p_{k-2}
    p_prev, p = 1, coeffs[0]
    q_prev, q = 0, 1
    for a in coeffs[1:]:
        p_prev, p = p, a * p - p_prev
        q_prev, q = q, a * q - q_prev
    return Fraction(p, q)


def test_chain_single():
    assert chain_to_link([-4]).matrix == ((-4,),)


def test_chain_two():
    assert chain_to_link([-5, -2]).matrix == ((-5, 1), (1, -2))


def test_chain_lens_n2():
    link = chain_to_link([1, -1, -2, -2])
    assert link.framings == (1, -1, -2, -2)
    for i in range(4):
        for j in range(4):
            if abs(i - j) == 1:
                assert link.matrix[i][j] == 1
            elif i != j:
                assert link.matrix[i][j] == 0


def test_plumbing_chain_needs_component():
    with pytest.raises(LinkError):
        PlumbingChain(())


@pytest.mark.parametrize(
    "coeffs, value",
    [([-4], Fraction(-4)), ([-5, -2], Fraction(-9, 2)), ([-2, -2, -2], Fraction(-4, 3))],
)
def test_cf_value(coeffs, value):
    assert cf_value(coeffs) == value
    assert ContinuedFraction(coeffs).value() == value


def test_cf_value_zero_division():
    with pytest.raises(MalformedCFError):
        cf_value([3, 1, 1])  # 1 - 1/1 = 0 in the tail


@pytest.mark.parametrize(
    "p, q, coeffs", [(4, 3, [-2, -2, -2]), (9, 2, [-5, -2]), (4, 1, [-4])]
)
def test_neg_cf_expand(p, q, coeffs):
    assert list(neg_cf_expand(p, q)) == coeffs


@pytest.mark.parametrize("p, q", [(4, 2), (3, 3), (3, 0), (2, 5), (-3, 1)])
def test_neg_cf_expand_rejects(p, q):
    with pytest.raises(ValueError):
        neg_cf_expand(p, q)


@given(st.integers(2, 400), st.integers(1, 399))
def test_neg_cf_expand_property(p, q):
    from math import gcd

    if not (q < p and gcd(p, q) == 1):
        return
    cf = list(neg_cf_expand(p, q))
    assert all(c <= -2 for c in cf)
    assert naive_value(cf) == Fraction(-p, q)
    assert cf_value(cf) == Fraction(-p, q)


def test_cn_chain_determinant():
    for n in range(2, 20):
        link = chain_to_link(neg_cf_expand(n * n, n - 1).coefficients)
        assert abs(link.determinant()) == n * n


def test_parse_chain_equals_constructor():
    assert parse_link("chain -5 -2") == chain_to_link([-5, -2])


def test_parse_literal():
    link = parse_link("comp K1 0; comp K2 −4; lk K1 K2 −2")
    assert link.labels == ("K1", "K2")
    assert link.matrix == ((0, -2), (-2, -4))


def test_parse_undeclared_label():
    with pytest.raises(ParseError) as err:
        parse_link("comp A 1; lk A B 1")
    assert err.value.line == 1
    assert err.value.col == 16


def test_parse_duplicate_label():
    with pytest.raises(ParseError, match="duplicate"):
        parse_link("comp A 1\ncomp A 2")


def test_parse_asymmetric():
    with pytest.raises(ParseError, match="symmetry"):
        parse_link("comp A 1\ncomp B 1\nlk A B 1\nlk B A 2")


def test_parse_unknown_keyword_position():
    with pytest.raises(ParseError) as err:
        parse_link("comp A 1\n  frob A")
    assert (err.value.line, err.value.col) == (2, 3)


def test_parse_bad_integer():
    with pytest.raises(ParseError, match="integer"):
        parse_link("comp A x")


def test_comments_and_extras():
    doc = parse_document("# header\ncomp A 0  # trailing\nrot A 0\nl0 A\n")
    assert doc.link.labels == ("A",)
    assert [s.keyword for s in doc.extras] == ["rot", "l0"]


def test_framed_link_rejects_asymmetry():
    with pytest.raises(LinkError):
        FramedLink(("a", "b"), ((0, 1), (2, 0)))


def test_framed_link_rejects_duplicates():
    with pytest.raises(LinkError):
        FramedLink(("a", "a"), ((0, 0), (0, 0)))


@st.composite
def links(draw):
    k = draw(st.integers(1, 6))
    mat = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            mat[i][j] = mat[j][i] = draw(st.integers(-9, 9))
    return FramedLink(tuple(f"K{i}" for i in range(k)), tuple(map(tuple, mat)))


@given(links())
def test_round_trip(link):
    assert parse_link(serialize_link(link)) == link


def test_reorder_and_relabel():
    link = chain_to_link([-5, -2], ["a", "b"])
    assert link.reorder(["b", "a"]).matrix == ((-2, 1), (1, -5))
    assert link.relabel({"a": "x"}).labels == ("x", "b")
    assert link.mirror().matrix == ((5, -1), (-1, 2))
