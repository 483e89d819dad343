import pytest
from hypothesis import given
from hypothesis import strategies as st

from secwgt.steenrod import (AdmissibleSum, Poly, adem_rewrite, admissible_basis, binom_mod2, compose,
                             format_word, is_admissible, parse_poly, parse_word, poly_action, square)


def nf(text: str) -> str:
    return str(adem_rewrite(parse_word(text)))


@pytest.mark.parametrize("word, expected", [
    ("Sq2 Sq2", "Sq3 Sq1"),
    ("Sq1 Sq2", "Sq3"),
    ("Sq1 Sq1", "0"),
    ("Sq3 Sq2", "0"),
    ("Sq2 Sq3", "Sq5 + Sq4 Sq1"),
    ("Sq2 Sq4", "Sq6 + Sq5 Sq1"),
    ("Sq4 Sq4", "Sq7 Sq1 + Sq6 Sq2"),
    ("Sq3 Sq1", "Sq3 Sq1"),
    ("Sq1 Sq2 Sq1", "Sq3 Sq1"),
    ("1", "1"),
])
def test_known_relations(word, expected):
    assert nf(word) == expected


def test_parse_word():
    assert parse_word("Sq3 Sq1") == (3, 1)
    assert parse_word("sq2 SQ2") == (2, 2)
    assert parse_word("") == ()
    for bad in ("Sq0", "Sq", "Foo2", "Sq-1", "Sq2Sq2"):
        with pytest.raises(ValueError):
            parse_word(bad)
    assert format_word(()) == "1"


def test_admissible_sum_rejects_bad_input():
    with pytest.raises(ValueError):
        AdmissibleSum.of((1, 1))
    with pytest.raises(ValueError):
        AdmissibleSum.of((2,), (3,))
    assert not AdmissibleSum.of((2,), (2,))


def test_binomials_lucas():
    from math import comb
    for n in range(40):
        for k in range(n + 1):
            assert binom_mod2(n, k) == comb(n, k) % 2


def milnor_count(n: int) -> int:
    # dim A_n is the number of partitions of n into parts 2^k - 1
    parts = [2**k - 1 for k in range(1, 8) if 2**k - 1 <= n]
    ways = [1] + [0] * n
    for p in parts:
        for i in range(p, n + 1):
            ways[i] += ways[i - p]
    return ways[n]


def test_admissible_basis_dimensions():
    for n in range(25):
        basis = admissible_basis(n)
        assert len(basis) == milnor_count(n)
        assert all(is_admissible(w) and sum(w) == n for w in basis)


words = st.lists(st.integers(1, 6), min_size=0, max_size=3).map(tuple)


@given(words)
def test_normal_form_is_admissible_and_stable(w):
    s = adem_rewrite(w)
    assert all(is_admissible(t) for t in s)
    assert adem_rewrite(list(s)) == s
    if is_admissible(w):
        assert s == AdmissibleSum.of(w)


@given(words, words, words)
def test_composition_associative(a, b, c):
    x, y, z = adem_rewrite(a), adem_rewrite(b), adem_rewrite(c)
    assert compose(compose(x, y), z) == compose(x, compose(y, z))


@st.composite
def polys(draw):
    degs = tuple(draw(st.lists(st.sampled_from([1, 1, 1, 2, 4]), min_size=1, max_size=3)))
    total = draw(st.integers(0, 8))
    exps = []
    rest = total
    for g in degs:
        e = draw(st.integers(0, rest // g))
        exps.append(e)
        rest -= e * g
    return Poly.monomial(exps, degs)


@given(words, polys())
def test_rewrite_agrees_with_action(w, p):
    assert poly_action(adem_rewrite(w), p) == poly_action(w, p)


@given(polys(), polys())
def test_cartan_formula(p, q):
    if p.degrees != q.degrees:
        return
    for k in range(5):
        rhs = Poly.zero(p.degrees)
        for i in range(k + 1):
            rhs = rhs + square(i, p) * square(k - i, q)
        assert square(k, p * q) == rhs


@given(polys())
def test_unstable_and_top_square(p):
    n = p.degree
    if n is None:
        return
    assert square(n, p) == p * p
    assert not square(n + 1, p)
    assert square(0, p) == p


def test_parse_poly_and_action():
    p, names = parse_poly("x^3")
    assert names == ["x"]
    assert poly_action((2,), p).format(names) == "x^5"
    q, names = parse_poly("b", {"b": 2})
    assert poly_action((2,), q).format(names) == "b^2"
    assert not poly_action((1,), q)
    r, names = parse_poly("x2 + x1^2", {})
    assert names == ["x1", "x2"]
    with pytest.raises(ValueError):
        poly_action((1,), r)
    with pytest.raises(ValueError):
        parse_poly("x +")
