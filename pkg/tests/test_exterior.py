import pytest
from hypothesis import given
from hypothesis import strategies as st

from nonreduced.algebra import ParseError, Ring
from nonreduced.exterior import (
    complement,
    differential,
    form_add,
    labels,
    parse_label,
    render_form,
    render_label,
    sort_sign,
    wedge,
    wedge_sign,
)

S = Ring(("z1", "z2"), ("w1", "w2"))

index_lists = st.lists(st.integers(0, 3), max_size=4)


def test_labels_are_lexicographic():
    assert labels(4, 2) == [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]
    assert labels(4, 0) == [()]
    with pytest.raises(ValueError):
        labels(4, 5)


def test_sort_sign_examples():
    assert sort_sign((1, 0)) == (-1, (0, 1))
    assert sort_sign((2, 0, 1)) == (1, (0, 1, 2))
    assert sort_sign((1, 1))[0] == 0


@given(index_lists, index_lists)
def test_wedge_sign_graded_commutative(a, b):
    s1, c1 = sort_sign(a + b)
    s2, c2 = sort_sign(b + a)
    assert c1 == c2
    assert s1 == s2 * (-1) ** (len(a) * len(b))


def test_complement_and_volume_sign():
    L = (0, 2)
    K = complement(L, 4)
    assert K == (1, 3)
    assert wedge_sign(L, K) == (-1, (0, 1, 2, 3))


def test_label_rendering_round_trip():
    for p in range(5):
        for L in labels(4, p):
            assert parse_label(S, render_label(S, L)) == L
            assert parse_label(S, render_label(S, L, "names")) == L
    assert render_label(S, (0, 1, 3)) == "dz[1,2]^dw[2]"
    assert render_label(S, (0, 3), "names") == "dz1^dw2"


def test_label_parse_errors():
    with pytest.raises(ParseError):
        parse_label(S, "dz[3]")
    with pytest.raises(ParseError):
        parse_label(S, "dw[2]^dw[1]")
    with pytest.raises(ParseError):
        parse_label(S, "dq")


def test_differential_leibniz():
    f = S.parse("z1*w2 - z2*w1")
    g = S.parse("w1^2 + z2")
    lhs = differential(f * g)
    rhs = form_add({L: q * g for L, q in differential(f).items()}, {L: q * f for L, q in differential(g).items()})
    assert lhs == rhs
    assert render_form(S, differential(S.parse("w1*w2"))) == "(w2)*dw[1] + (w1)*dw[2]"


def test_wedge_of_differentials_antisymmetric():
    a, b = differential(S.parse("z1*w1")), differential(S.parse("w2^2"))
    ab, ba = wedge(a, b), wedge(b, a)
    assert ab == {L: -q for L, q in ba.items()}
    assert wedge(a, a) == {}
