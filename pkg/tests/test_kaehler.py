import dataclasses

import pytest

from nonreduced.algebra import Ideal
from nonreduced.exterior import differential, parse_label
from nonreduced.homalg import PresentedModule, free_resolution, purity_test
from nonreduced.kaehler import (
    KaehlerError,
    jhat_forms,
    jhat_presentation,
    kaehler_module,
    nullstellensatz_exponent,
    oz_generators,
    presentation_from_forms,
    strong_forms,
    w_exponents_below,
)


def form(ring, **parts):
    """``form(S, dz1="w1", ...)`` with real variable names as keys."""
    return {parse_label(ring, "^".join("d" + v for v in k.split("_"))): ring.parse(q) for k, q in parts.items()}


def same_span(ring, p, a, b):
    return presentation_from_forms(ring, p, a).same_submodule(presentation_from_forms(ring, p, b))


# -- Ĵ^p and the Kähler modules --------------------------------------


def test_jhat_cross(R1, J_cross):
    expected = [form(R1, z="z*w"), form(R1, w="z*w"), form(R1, z="w", w="z")]
    assert sorted(map(str, jhat_forms(J_cross, 1))) == sorted(map(str, expected))


def test_jhat_degree_zero_is_the_ideal(J_monomial):
    pres = jhat_presentation(J_monomial, 0)
    assert pres.basis == [()]
    assert [pres.matrix[0, j] for j in range(pres.matrix.ncols)] == list(J_monomial.gens)


def test_jhat_monomial_contains_differentials(S, J_monomial):
    pres = jhat_presentation(J_monomial, 1)
    for f in (form(S, w1="w1"), form(S, w2="w2"), form(S, w1="w2", w2="w1"), form(S, z1="w1^2"), form(S, w2="w1*w2")):
        assert pres.contains(f)
    assert not pres.contains(form(S, w1="1"))


def test_p_out_of_range(J_monomial):
    with pytest.raises(KaehlerError):
        jhat_presentation(J_monomial, 5)
    with pytest.raises(KaehlerError):
        strong_forms(J_monomial, -1)


def test_cross_torsion_elements_survive_in_kaehler(R1, J_cross):
    km = kaehler_module(J_cross, 1)
    for f in (form(R1, w="z"), form(R1, z="w")):
        assert km.normal_form(f)


# -- strong forms ----------------------------------------------------


def test_cross_torsion(R1, J_cross):
    st = strong_forms(J_cross, 1)
    jh = jhat_forms(J_cross, 1)
    reference = [form(R1, w="z"), form(R1, z="w")]
    assert same_span(R1, 1, jh + st.torsion, jh + reference)
    assert same_span(R1, 1, st.forms(), jh + reference)
    # Omega^1_X = O_z dz + O_w dw: dz and dw themselves are not killed
    assert not st.contains(form(R1, z="1")) and not st.contains(form(R1, w="1"))


def test_twisted_torsion(S, J_twisted):
    st = strong_forms(J_twisted, 1)
    jh = jhat_forms(J_twisted, 1)
    reference = [form(S, w2="w1"), form(S, w1="w2")]
    assert st.torsion
    assert same_span(S, 1, jh + st.torsion, jh + reference)
    for f in reference:
        assert not jhat_presentation(J_twisted, 1).contains(f)
        assert st.contains(f)


def test_monomial_is_torsion_free(J_monomial):
    for p in range(3):
        st = strong_forms(J_monomial, p)
        assert st.torsion == []
        assert st.same_submodule(jhat_presentation(J_monomial, p))


@pytest.mark.parametrize("p", [0, 1, 2])
def test_jhat_inside_strong_and_pure(J_twisted, p):
    st = strong_forms(J_twisted, p)
    for f in jhat_forms(J_twisted, p):
        assert st.contains(f)
    res = free_resolution(st.module())
    assert purity_test(res, 2)[0]


def test_degree_zero_is_quotient_ring(J_twisted, J_cross):
    for J in (J_twisted, J_cross):
        st = strong_forms(J, 0)
        assert st.module().equals(PresentedModule.quotient_ring(J))
        assert st.torsion == []


def test_non_pure_rejected(S):
    J = Ideal.parse(S, ["w1*w2", "w1*z1"])
    with pytest.raises(KaehlerError, match="pure dimension required"):
        strong_forms(J, 1)


# -- O_Z structure ---------------------------------------------------


def test_nullstellensatz_exponents(S, J_monomial, J_reduced):
    assert nullstellensatz_exponent(J_monomial) == 2
    assert nullstellensatz_exponent(J_reduced) == 1
    assert nullstellensatz_exponent(Ideal.parse(S, ["w1^3", "w2"])) == 3
    with pytest.raises(KaehlerError, match="Z is not"):
        nullstellensatz_exponent(Ideal.parse(S, ["w1^2"]))


def test_w_exponents_order():
    assert w_exponents_below(2, 2) == [(0, 0), (1, 0), (0, 1)]
    assert len(w_exponents_below(2, 3)) == 6


def test_oz_functions(J_monomial):
    oz = oz_generators(J_monomial, 0)
    assert oz.render() == ["1", "w1", "w2"]
    assert oz.free and oz.nu == 3


def test_oz_one_forms_match_display(S, J_monomial):
    oz = oz_generators(J_monomial, 1)
    assert oz.free and oz.nu == 9
    reference = [form(S, **{z: m}) for z in ("z1", "z2") for m in ("1", "w1", "w2")]
    reference += [form(S, w1="1"), form(S, w2="1"), form(S, w2="w1", w1="-w2")]
    theirs = dataclasses.replace(oz, generators=reference)
    for b in oz.generators:
        assert theirs.spans(b)
    for b in reference:
        assert oz.spans(b)


def test_oz_two_forms(J_monomial):
    oz = oz_generators(J_monomial, 2)
    assert oz.free and oz.nu == 10
    assert "dw1^dw2" in oz.render()


@pytest.mark.parametrize("p", [0, 1, 2])
def test_oz_spanning(J_twisted, p):
    oz = oz_generators(J_twisted, p)
    n = J_twisted.ring.n
    for L, a in oz.slots:
        assert oz.spans({L: J_twisted.ring.monomial((0,) * n + a)})


@pytest.mark.parametrize("p", [0, 1, 2])
def test_free_means_no_generic_relations(J_monomial, p):
    oz = oz_generators(J_monomial, p)
    assert oz.free and oz.generic_rank == oz.nu


def test_twisted_not_free(J_twisted):
    oz = oz_generators(J_twisted, 0)
    assert not oz.free and oz.generic_rank == 2 and oz.nu == 3


def test_symmetric_differential_in_jhat(S, J_monomial):
    # d(w1 w2) lies in Ĵ^1, so w1 dw2 - w2 dw1 agrees with 2 w1 dw2 modulo it
    pres = jhat_presentation(J_monomial, 1)
    assert pres.contains(differential(S.parse("w1*w2")))
    assert pres.normal_form(form(S, w2="w1", w1="-w2")) == pres.normal_form(form(S, w2="2*w1"))
