import random

import pytest

from nonreduced.algebra import Ideal, Matrix, Ring
from nonreduced.barlet import (
    BarletError,
    DiffOperator,
    OpTerm,
    barlet_data,
    barlet_generators,
    check_annihilation,
    completeness_check,
    dual_kernel_generators,
    koszul_lift,
    koszul_matrices,
    make_monic,
    modules_equal,
    noetherian_operators,
    oz_module_contains,
    random_member,
    to_diff_operators,
)
from nonreduced.currents import CHExpression
from nonreduced.homalg import PresentedModule, free_resolution
from nonreduced.kaehler import KaehlerError
from reference_lists import MONOMIAL_BA2, TWISTED, build

CASES = [("monomial", 0), ("monomial", 1), ("monomial", 2), ("twisted", 0), ("twisted", 1), ("twisted", 2)]


@pytest.fixture(scope="module")
def data(J_monomial, J_twisted):
    cache = {}

    def get(name, p):
        if (name, p) not in cache:
            cache[(name, p)] = barlet_data(J_monomial if name == "monomial" else J_twisted, p)
        return cache[(name, p)]

    return get


def up_to_sign(op_a, op_b):
    neg = DiffOperator(op_b.ring, op_b.p, [OpTerm(-t.coeff, t.label, t.gamma) for t in op_b.terms])
    return op_a.key() in (op_b.key(), neg.key())


# -- Koszul complexes and chain maps ---------------------------------


@pytest.mark.parametrize("k,copies", [(2, 1), (2, 3), (3, 1), (3, 2)])
def test_koszul_is_complex(k, copies):
    ring = Ring(("z",), tuple(f"w{i}" for i in range(1, k + 1)))
    elems = [ring.gens()[1 + i] ** 2 for i in range(k)]
    g = koszul_matrices(ring, elems, copies)
    assert [m.shape for m in g][0] == (copies, copies * k)
    for a, b in zip(g, g[1:]):
        assert (a * b).is_zero()


def test_koszul_resolves_regular_sequence(S):
    g = koszul_matrices(S, [S.var("w1"), S.var("w2")])
    res = free_resolution(PresentedModule(g[0]))
    assert res.ranks == (1, 2, 1)


@pytest.mark.parametrize("name,p", CASES)
def test_chain_maps_verify(data, name, p):
    d = data(name, p)
    assert d.chain.verify()
    assert d.chain.maps[0] == Matrix.identity(d.resolution.ring, d.resolution.rank0)
    res = d.resolution
    for j in range(1, len(d.chain.maps)):
        assert res.f(j) * d.chain.maps[j] == d.chain.maps[j - 1] * d.chain.source[j - 1]


def test_chain_map_reduced_case(J_reduced):
    res = free_resolution(PresentedModule.quotient_ring(J_reduced), keep_base=True)
    cm = koszul_lift(res, 1)
    assert cm.verify()
    # both complexes are Koszul on (w1, w2): every a_j is invertible over Q
    for a in cm.maps:
        assert a.nrows == a.ncols and all(q.is_constant() for row in a.rows for q in row)


def test_chain_map_higher_exponent(J_twisted):
    d = barlet_data(J_twisted, 0, M=3)
    assert d.chain.verify() and d.M == 3
    assert modules_equal(d.generators, barlet_generators(J_twisted, 0))


def test_lift_requires_powers_in_relations(S):
    res = free_resolution(PresentedModule.quotient_ring(Ideal.parse(S, ["w1^3", "w2"])), keep_base=True)
    with pytest.raises(BarletError):
        koszul_lift(res, 2)


# -- dual kernel -----------------------------------------------------


def test_dual_kernel_counts(J_reduced, data):
    res = free_resolution(PresentedModule.quotient_ring(J_reduced))
    assert len(dual_kernel_generators(res, 2)) == 1
    assert len(data("twisted", 0).xis) == 2
    # two classes on E_2 of the Hilbert-Burch resolution; their w-multiples give three generators
    assert len(data("monomial", 0).xis) == 2
    assert len(data("monomial", 0).generators) == 3


# -- generators ------------------------------------------------------


def test_reduced_generator(J_reduced, S):
    (mu,) = barlet_generators(J_reduced, 0)
    assert mu.render() == "(1) * dz[1,2]^dw[1,2] * dbar(1/w1)^dbar(1/w2)"


def test_monomial_generators_match_reference(S, data):
    assert modules_equal(data("monomial", 0).generators, build(S, MONOMIAL_BA2))


@pytest.mark.parametrize("p,count", [(0, 2), (1, 5), (2, 4)])
def test_twisted_generators_match_reference(S, data, p, count):
    ref = build(S, TWISTED[p])
    assert len(ref) == count
    gens = data("twisted", p).generators
    assert oz_module_contains(gens, ref)
    assert oz_module_contains(ref, gens)
    assert len(gens) == count


def test_module_equality_detects_difference(S):
    a = build(S, MONOMIAL_BA2)
    assert not modules_equal(a[:1], a)
    assert modules_equal(a[1:], a)  # the w-multiples recover the first


@pytest.mark.parametrize("name,p", CASES)
def test_generators_annihilate(data, name, p):
    d = data(name, p)
    assert all(r.passed for r in check_annihilation(d))
    for mu in d.generators:
        assert mu.is_canonical()
        assert mu.degree() == d.J.ring.N - p


def test_generator_order_deterministic(J_twisted):
    a = [g.render() for g in barlet_generators(J_twisted, 1)]
    b = [g.render() for g in barlet_generators(J_twisted, 1)]
    assert a == b


def test_make_monic(S):
    e = CHExpression(S, [(S.parse("3*z1 + 6"), (0, 1, 2, 3), (0, 0))])
    m = make_monic(e)
    assert m == e.mul(S.parse("1/3"))
    assert make_monic(m) == m


def test_barlet_errors(S):
    with pytest.raises(BarletError, match="coordinate subspace"):
        barlet_data(Ideal.parse(S, ["w1^2"]), 0)
    with pytest.raises(BarletError, match="Nullstellensatz"):
        barlet_data(Ideal.parse(S, ["w1^2", "w1*w2", "w2^2"]), 0, M=1)
    with pytest.raises(KaehlerError, match="pure dimension required"):
        barlet_data(Ideal.parse(S, ["w1*w2", "w1*z1"]), 0)


# -- operators -------------------------------------------------------


def test_twisted_direct_operators(S, data):
    ops = to_diff_operators(data("twisted", 0).generators, 0)
    renders = [op.render() for op in ops]
    assert renders[0] == "dz1^dz2"
    second = ops[1]
    target = DiffOperator(S, 0, [OpTerm(S.parse("z1"), (), (1, 0)), OpTerm(S.parse("z2"), (), (0, 1))])
    assert up_to_sign(second, target)


def test_twisted_functions_identity_operator(data):
    ops = to_diff_operators(data("twisted", 2).generators, 2)
    assert "1" in [op.render() for op in ops]


def test_monomial_operators(S, data, J_monomial):
    ops = noetherian_operators(J_monomial, 0, data=data("monomial", 0))
    keys = {op.key() for op in ops}
    for gamma in ((0, 0), (1, 0), (0, 1)):
        assert DiffOperator(S, 0, [OpTerm(S.one(), (), gamma)]).key() in keys
    assert len(ops) == 3
    assert sorted(op.render() for op in ops) == ["dz1^dz2", "dz1^dz2 * d/dw1", "dz1^dz2 * d/dw2"]


def test_reduced_single_operator(J_reduced, S):
    ops = noetherian_operators(J_reduced, 0)
    assert len(ops) == 1
    assert ops[0].apply({(): S.parse("z1 + w1*z2")}) == S.parse("z1")


def test_operator_orders_bounded(data, J_twisted):
    d = data("twisted", 1)
    ops = noetherian_operators(J_twisted, 1, data=d)
    assert max(op.order() for op in ops) <= 2


def test_symbol_convention(S):
    op = DiffOperator(S, 1, [OpTerm(S.one(), (3,), (0, 0))])
    # contracting dw2 leaves the full dz volume to be wedged on
    assert op.symbol((3,)) == "dz1^dz2 ^ (dw2 _|)"
    assert op.symbol((0, 3)) == "dz2 ^ (dw2 _|)"
    assert op.symbol_sign((1,)) == -1 and op.symbol_sign((0,)) == 1


# -- completeness ----------------------------------------------------


@pytest.mark.parametrize("name,p", CASES)
def test_completeness(data, J_monomial, J_twisted, name, p):
    J = J_monomial if name == "monomial" else J_twisted
    d = data(name, p)
    ops = noetherian_operators(J, p, data=d)
    rep = completeness_check(ops, J, p, trials=25, seed=1, strong=d.strong)
    assert rep.passed, rep.member_failures[:1] + rep.nonmember_failures[:1]
    assert rep.members_checked == rep.nonmembers_checked == 25


def test_w1_detected(S, J_twisted, data):
    ops = noetherian_operators(J_twisted, 0, data=data("twisted", 0))
    values = [op.apply({(): S.var("w1")}) for op in ops]
    assert S.var("z1") in values or -S.var("z1") in values
    for g in J_twisted.gens:
        assert all(not op.apply({(): g}) for op in ops)


def test_members_killed_exactly(data, J_twisted):
    d = data("twisted", 2)
    ops = noetherian_operators(J_twisted, 2, data=d)
    rng = random.Random(5)
    for _ in range(10):
        phi = random_member(d.strong, rng)
        assert all(op.apply(phi).is_zero() for op in ops)


def test_completeness_reports_missing_operator(data, J_twisted):
    d = data("twisted", 0)
    ops = noetherian_operators(J_twisted, 0, data=d)[:1]
    rep = completeness_check(ops, J_twisted, 0, trials=20, seed=0, strong=d.strong)
    assert not rep.passed and rep.nonmember_failures
