"""The pairing matrix between O_Z-generators of ``Omega^p_X`` and Barlet
generators, and the combined duality report.

Entry ``((alpha, j), k)`` of the matrix is the coefficient of ``dz_1^...^dz_n``
in ``pi_*(w^alpha b_k ^ mu_j)``, i.e. ``project(b_k ^ mu_j, alpha)`` with the
volume label stripped.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

from .algebra.ideal import Ideal
from .algebra.matrix import Matrix, rank_fraction_field, solve_fraction_free
from .algebra.ring import Polynomial, Ring
from .barlet import (
    BarletData,
    BarletError,
    DiffOperator,
    barlet_data,
    completeness_check,
    noetherian_operators,
    random_member,
    random_nonmember,
)
from .currents import CHExpression
from .exterior import Form, Label
from .homalg import (
    ext_module,
    free_resolution,
    purity_test,
    rank_loci,
)
from .homalg import cm_report as _cm_report
from .kaehler import KaehlerError, OZGeneratingSet, oz_generators, w_exponents_below


class PairingError(ValueError):
    pass


@dataclass
class PairingMatrix:
    """Rows ``(alpha, j)``, columns the O_Z-generators ``b_k``.

    ``basis_kind`` is ``"free"`` when the ``b_k`` are a basis of
    ``Omega^p_X`` over O_Z, and ``"generic"`` when ``Omega^p_X`` is not free
    and ``b_k`` is a subset that is a basis over the fraction field.
    """

    ring: Ring
    p: int
    matrix: Matrix
    rows: List[Tuple[Tuple[int, ...], int]]
    basis: List[Form]
    basis_slots: List[Tuple[Label, Tuple[int, ...]]]
    currents: List[CHExpression]
    basis_kind: str
    M: int
    oz: Optional[OZGeneratingSet] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return self.matrix.shape

    @property
    def nu(self) -> int:
        return self.matrix.ncols

    def row_count_expected(self) -> int:
        return len(self.currents) * len(w_exponents_below(self.ring.kappa, self.M))

    def render(self) -> List[str]:
        out = []
        for (alpha, j), row in zip(self.rows, self.matrix.rows):
            out.append(f"alpha={alpha} j={j}: [" + ", ".join(q.render() for q in row) + "]")
        return out


def pairing_entry(b: Form, mu: CHExpression, alpha: Tuple[int, ...]) -> Polynomial:
    ring = mu.ring
    proj = mu.wedge_form(b).project(alpha)
    top = tuple(range(ring.n))
    extra = [L for L in proj if L != top]
    if extra:
        raise PairingError("pairing does not land in top-degree forms on Z")
    return proj.get(top, ring.zero())


def generic_basis(oz: OZGeneratingSet) -> List[Tuple[Label, Tuple[int, ...]]]:
    """Slots of ``oz.chosen`` (then remaining slots) whose unit vectors extend
    the relations to full rank over the fraction field."""
    ring = oz.ring
    K = oz.relations
    target = oz.generic_rank
    cols = [list(K.column(j)) for j in range(K.ncols)]
    base = rank_fraction_field(K) if K.ncols else 0
    picked: List[Tuple[Label, Tuple[int, ...]]] = []
    order = list(oz.chosen) + [s for s in oz.slots if s not in oz.chosen]
    for s in order:
        if len(picked) == target:
            break
        e = [ring.zero()] * len(oz.slots)
        e[oz.slots.index(s)] = ring.one()
        trial = Matrix.from_columns(ring, len(oz.slots), cols + [e])
        r = rank_fraction_field(trial)
        if r > base:
            cols.append(e)
            base = r
            picked.append(s)
    return picked


def t_matrix(J: Ideal, p: int, seed: int = 0, data: Optional[BarletData] = None,
             oz: Optional[OZGeneratingSet] = None, M: Optional[int] = None) -> PairingMatrix:
    ring = J.ring
    try:
        data = data or barlet_data(J, p, seed, M=M)
        oz = oz or oz_generators(J, p, strong=data.strong, seed=seed)
    except (KaehlerError, BarletError) as exc:
        raise PairingError(f"prerequisites missing: {exc}") from None
    if oz.free:
        slots, kind = list(oz.chosen), "free"
    else:
        slots, kind = generic_basis(oz), "generic"
    n = ring.n
    basis = [{L: ring.monomial((0,) * n + a)} for L, a in slots]
    mus = data.generators
    top = max((sum(beta) for mu in mus for (_, beta) in mu.terms), default=0)
    Mt = max(data.M, top + 1)
    rows = [(alpha, j) for alpha in w_exponents_below(ring.kappa, Mt) for j in range(len(mus))]
    entries = [[pairing_entry(b, mus[j], alpha) for b in basis] for alpha, j in rows]
    mat = Matrix(ring, entries, len(basis))
    return PairingMatrix(ring, p, mat, rows, basis, slots, list(mus), kind, Mt, oz)


@dataclass
class InjectivityVerdict:
    rank: int
    nu: int

    @property
    def injective(self) -> bool:
        return self.nu > 0 and self.rank == self.nu


def generic_injectivity(T) -> InjectivityVerdict:
    """Rank over the fraction field of the z-polynomials (Bareiss elimination)."""
    mat = T.matrix if isinstance(T, PairingMatrix) else T
    r = rank_fraction_field(mat) if mat.nrows and mat.ncols else 0
    return InjectivityVerdict(r, mat.ncols)


# ---------------------------------------------------------------------------
# membership duality


@dataclass
class DualityCheck:
    member: bool
    pairing_zero: bool
    operators_zero: bool
    denominator: Polynomial

    @property
    def consistent(self) -> bool:
        return self.member == self.pairing_zero == self.operators_zero


def basis_coordinates(T: PairingMatrix, phi: Form) -> Tuple[Polynomial, List[Polynomial]]:
    """``(d, y)`` with ``d phi = sum y_k b_k`` modulo ``J^p`` over the z-polynomials."""
    oz = T.oz
    ring = T.ring
    coords = oz.coordinates(phi)
    B = Matrix.from_columns(ring, len(oz.slots), [oz.coordinates(b) for b in T.basis])
    A = B.hstack(oz.relations) if oz.relations.ncols else B
    sol = solve_fraction_free(A, coords)
    if sol is None:
        raise PairingError("form not in the span of the chosen basis")
    d, y = sol
    return d, y[: len(T.basis)]


def membership_duality(T: PairingMatrix, phi: Form, ops: Sequence[DiffOperator]) -> DualityCheck:
    """Compare ``phi in J^p`` (Gröbner), ``T y = 0`` for the basis coordinates
    ``y`` and the vanishing of every Noetherian operator on ``phi``."""
    ring = T.ring
    member = T.oz.strong.contains(phi)
    d, y = basis_coordinates(T, phi)
    ycol = Matrix.from_columns(ring, len(y), [y]) if y else Matrix.zero(ring, 0, 1)
    Ty = T.matrix * ycol if T.nu else Matrix.zero(ring, T.matrix.nrows, 1)
    pz = Ty.is_zero()
    oz_ = all(not op.apply(phi) for op in ops)
    return DualityCheck(member, pz, oz_, d)


def duality_trials(T: PairingMatrix, ops: Sequence[DiffOperator], count: int = 50, seed: int = 0) -> List[DualityCheck]:
    """Half members of ``J^p``, half random forms (certified non-members)."""
    rng = random.Random(seed)
    strong = T.oz.strong
    out = []
    for i in range(count):
        if i % 2 == 0:
            phi = random_member(strong, rng)
        else:
            phi = random_nonmember(strong, rng)
        out.append(membership_duality(T, phi, ops))
    return out


# ---------------------------------------------------------------------------
# report


def duality_report(J: Ideal, p: int, seed: int = 0, trials: int = 100, M: Optional[int] = None) -> Dict[str, Any]:
    """Nested dict (sorted keys when serialized) with purity, the CM triangle,
    Betti numbers, Ext vanishing, Barlet generators, completeness and the
    pairing rank."""
    ring = J.ring
    try:
        data = barlet_data(J, p, seed, M=M)
    except KaehlerError as exc:
        raise PairingError(str(exc)) from None
    except BarletError as exc:
        raise PairingError(f"barlet: {exc}") from None
    kappa = ring.kappa
    mod = data.strong.module()
    res = free_resolution(mod)
    loci = rank_loci(res)
    pure, codims = purity_test(res, kappa, loci)
    cm = _cm_report(mod, res)
    ext = {}
    for q in range(1, ring.N - kappa + 1):
        ext[kappa + q] = ext_module(res, kappa + q).is_zero
    ops = noetherian_operators(J, p, data=data)
    comp = completeness_check(ops, J, p, trials=trials, seed=seed, strong=data.strong)
    T = t_matrix(J, p, seed, data=data)
    inj = generic_injectivity(T)
    return {
        "ideal": [g.render() for g in J.gens],
        "p": p,
        "pure": pure,
        "loci_codims": {j: c for j, c in codims},
        "betti": list(res.ranks),
        "cm": {
            "cm": cm.cm,
            "length": cm.length,
            "kappa": cm.kappa,
            "ext_vanishing": cm.ext_vanishing,
            "exact_flag": cm.exact_flag,
            "consistent": cm.consistent,
        },
        "ext_zero": ext,
        "torsion": len(data.strong.torsion),
        "barlet": {
            "count": len(data.generators),
            "generators": [g.render() for g in data.generators],
            "M": data.M,
        },
        "noetherian": {
            "operators": len(ops),
            "members_checked": comp.members_checked,
            "nonmembers_checked": comp.nonmembers_checked,
            "passed": comp.passed,
        },
        "pairing": {
            "rows": T.matrix.nrows,
            "cols": T.nu,
            "basis": T.basis_kind,
            "rank": inj.rank,
            "injective": inj.injective,
        },
    }
