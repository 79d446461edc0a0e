import dataclasses
import random

import pytest

from nonreduced.algebra import Ideal, Matrix
from nonreduced.barlet import barlet_data, modules_equal, noetherian_operators, random_form
from nonreduced.currents import parse_ch
from nonreduced.pairing import (
    PairingError,
    duality_report,
    duality_trials,
    generic_injectivity,
    membership_duality,
    pairing_entry,
    t_matrix,
)
from reference_lists import TWISTED, build

SHAPES = {
    ("reduced", 0): (1, 1), ("reduced", 1): (2, 2), ("reduced", 2): (1, 1),
    ("monomial", 0): (9, 3), ("monomial", 1): (27, 9), ("monomial", 2): (30, 10),
    ("twisted", 0): (6, 2), ("twisted", 1): (15, 5), ("twisted", 2): (12, 4),
}


@pytest.fixture(scope="module")
def ideals(J_reduced, J_monomial, J_twisted):
    return {"reduced": J_reduced, "monomial": J_monomial, "twisted": J_twisted}


@pytest.fixture(scope="module")
def tmat(ideals):
    cache = {}

    def get(name, p):
        if (name, p) not in cache:
            cache[(name, p)] = t_matrix(ideals[name], p)
        return cache[(name, p)]

    return get


@pytest.mark.parametrize("name,p", sorted(SHAPES))
def test_shapes_and_rank(tmat, name, p):
    T = tmat(name, p)
    assert T.shape == SHAPES[(name, p)]
    assert T.matrix.nrows == T.row_count_expected()
    assert T.basis_kind == ("generic" if name == "twisted" else "free")
    v = generic_injectivity(T)
    assert v.injective and v.rank == T.nu


def test_reduced_matrix_is_one(tmat, S):
    assert tmat("reduced", 0).matrix == Matrix.identity(S, 1)


def test_monomial_entries(tmat, S):
    T = tmat("monomial", 0)
    j = next(i for i, mu in enumerate(T.currents) if list(mu.terms) == [((0, 1, 2, 3), (0, 0))])
    assert T.matrix[T.rows.index(((0, 0), j)), 0] == S.one()
    # each entry is a residue pairing of a basis function against a generator
    for i, (alpha, j) in enumerate(T.rows):
        for k, b in enumerate(T.basis):
            assert T.matrix[i, k] == pairing_entry(b, T.currents[j], alpha)


def test_entries_are_z_polynomials(tmat):
    for key in SHAPES:
        T = tmat(*key)
        assert all(not q.involves_w() for row in T.matrix.rows for q in row)


def test_pairing_entry_needs_top_degree(S):
    mu = parse_ch(S, "(1) * dz[1]^dw[1,2] * dbar(1/w1)^dbar(1/w2)")
    with pytest.raises(PairingError):
        pairing_entry({(): S.one()}, mu, (0, 0))


def test_zero_matrix_not_injective(S):
    v = generic_injectivity(Matrix.zero(S, 3, 2))
    assert v.rank == 0 and not v.injective


def test_rank_invariant_under_scaling_and_shuffle(tmat, ideals, S):
    rng = random.Random(11)
    for name, p in (("monomial", 1), ("twisted", 0), ("twisted", 2)):
        T = tmat(name, p)
        base = generic_injectivity(T).rank
        rows = [list(r) for r in T.matrix.rows]
        scales = [S.parse(s) for s in ("z1", "z2 + 3", "z1*z2 - 1", "2")]
        scaled = Matrix(S, [[q * scales[i % len(scales)] for q in r] for i, r in enumerate(rows)], T.nu)
        assert generic_injectivity(scaled).rank == base
        rng.shuffle(rows)
        assert generic_injectivity(Matrix(S, rows, T.nu)).rank == base
        data = barlet_data(ideals[name], p)
        gens = list(data.generators)
        rng.shuffle(gens)
        T2 = t_matrix(ideals[name], p, data=dataclasses.replace(data, generators=gens))
        assert generic_injectivity(T2).rank == base


def test_generic_basis_for_twisted(tmat, S):
    T = tmat("twisted", 0)
    assert [b[()].render() for b in T.basis] == ["1", "w1"]


@pytest.mark.parametrize("name,p", [("monomial", 0), ("monomial", 1), ("twisted", 0), ("twisted", 1), ("twisted", 2)])
def test_membership_duality(tmat, ideals, name, p):
    T = tmat(name, p)
    ops = noetherian_operators(ideals[name], p)
    checks = duality_trials(T, ops, count=20, seed=2)
    assert all(c.consistent for c in checks)
    assert sum(c.member for c in checks) == 10


def test_membership_duality_on_forms(tmat, ideals, S):
    T = tmat("twisted", 1)
    ops = noetherian_operators(ideals["twisted"], 1)
    rng = random.Random(4)
    for _ in range(10):
        c = membership_duality(T, random_form(S, 1, rng), ops)
        assert c.consistent and not c.denominator.is_zero()


def test_prerequisites_missing(S):
    with pytest.raises(PairingError, match="prerequisites"):
        t_matrix(Ideal.parse(S, ["w1^2"]), 0)


# -- report ----------------------------------------------------------


def test_report_monomial(J_monomial):
    rep = duality_report(J_monomial, 0, trials=20)
    assert rep["pure"] and rep["cm"]["cm"] and rep["cm"]["consistent"]
    assert rep["ext_zero"] == {3: True, 4: True}
    assert rep["barlet"]["count"] == 3
    assert rep["noetherian"]["passed"]
    assert rep["pairing"]["injective"]
    assert rep["betti"] == [1, 3, 2]


def test_report_reduced(J_reduced):
    rep = duality_report(J_reduced, 0, trials=10)
    assert rep["betti"] == [1, 2, 1] and rep["barlet"]["count"] == 1
    assert rep["pairing"]["rows"] == rep["pairing"]["cols"] == 1
    assert rep["torsion"] == 0


def test_report_twisted_one_forms(J_twisted, S):
    rep = duality_report(J_twisted, 1, trials=10)
    assert rep["pure"] and not rep["cm"]["cm"] and rep["cm"]["consistent"]
    assert rep["ext_zero"][3] is False
    assert rep["barlet"]["count"] == 5
    gens = [parse_ch(S, g) for g in rep["barlet"]["generators"]]
    assert modules_equal(gens, build(S, TWISTED[1]))


def test_report_rejects_non_pure(S):
    with pytest.raises(PairingError, match="pure dimension required"):
        duality_report(Ideal.parse(S, ["w1*w2", "w1*z1"]), 0)
