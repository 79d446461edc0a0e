"""Kähler differentials and strongly holomorphic forms of ``X = V(J)``,
and their structure as modules over the functions on ``Z = {w = 0}``."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra.groebner import ModuleGB
from .algebra.ideal import Ideal
from .algebra.matrix import (
    Matrix,
    column_to_vec,
    image_contains,
    image_gb,
    minimal_generators,
    rank_fraction_field,
)
from .algebra.orders import DEGREVLEX
from .algebra.ring import Polynomial, Ring
from .exterior import (
    Form,
    Label,
    column_to_form,
    differential,
    form_to_column,
    labels,
    render_label,
    wedge,
)
from .homalg import PresentedModule, equidim_hull, free_resolution, purity_test


class KaehlerError(ValueError):
    pass


@dataclass
class FormModulePresentation:
    """Submodule of ``Omega^p_D`` (columns of ``matrix``) over the labels
    ``dx_L``, ``|L| = p``, in lexicographic order; the module of interest is
    the quotient ``Omega^p_D / im(matrix)``."""

    ring: Ring
    p: int
    basis: List[Label]
    matrix: Matrix
    torsion: List[Form] = field(default_factory=list)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def module(self) -> PresentedModule:
        return PresentedModule(self.matrix)

    def forms(self) -> List[Form]:
        return [column_to_form(self.matrix.column(j), self.basis) for j in range(self.matrix.ncols)]

    def gb(self) -> ModuleGB:
        if not hasattr(self, "_gb_cache"):
            self._gb_cache = image_gb(self.matrix)
        return self._gb_cache

    def contains(self, f: Form) -> bool:
        """Membership of a p-form in the submodule."""
        v = column_to_vec(form_to_column(f, self.basis, self.ring))
        return not v or self.gb().contains(v)

    def normal_form(self, f: Form) -> Form:
        from .algebra.matrix import vec_to_column

        v = column_to_vec(form_to_column(f, self.basis, self.ring))
        r = self.gb().reduce(v)
        return column_to_form(vec_to_column(self.ring, r, self.rank), self.basis)

    def column(self, f: Form) -> List[Polynomial]:
        return form_to_column(f, self.basis, self.ring)

    def same_submodule(self, other: "FormModulePresentation") -> bool:
        return image_contains(self.matrix, other.matrix) and image_contains(other.matrix, self.matrix)


def _check_p(ring: Ring, p: int) -> None:
    if not 0 <= p <= ring.N:
        raise KaehlerError(f"form degree {p} out of range 0..{ring.N}")


def jhat_forms(J: Ideal, p: int) -> List[Form]:
    """Generators ``g dx_L`` and ``dg ^ dx_L'`` of ``J Omega^p + dJ ^ Omega^{p-1}``."""
    ring = J.ring
    _check_p(ring, p)
    out: List[Form] = []
    for g in J.gens:
        for L in labels(ring.N, p):
            out.append({L: g})
    if p >= 1:
        for g in J.gens:
            dg = differential(g)
            for L in labels(ring.N, p - 1):
                f = wedge(dg, {L: ring.one()})
                if f:
                    out.append(f)
    return out


def presentation_from_forms(ring: Ring, p: int, forms: Sequence[Form]) -> FormModulePresentation:
    basis = labels(ring.N, p)
    cols = [form_to_column(f, basis, ring) for f in forms if f]
    return FormModulePresentation(ring, p, basis, Matrix.from_columns(ring, len(basis), cols))


def jhat_presentation(J: Ideal, p: int) -> FormModulePresentation:
    return presentation_from_forms(J.ring, p, jhat_forms(J, p))


def kaehler_module(J: Ideal, p: int) -> FormModulePresentation:
    """``Omega^p_{X,Kähler} = Omega^p_D / Ĵ^p`` (presented by the Ĵ^p columns)."""
    return jhat_presentation(J, p)


def ideal_is_pure(J: Ideal) -> Tuple[bool, int]:
    M = PresentedModule.quotient_ring(J)
    kappa = M.codim()
    res = free_resolution(M)
    return purity_test(res, kappa)[0], kappa


def strong_forms(J: Ideal, p: int, seed: int = 0) -> FormModulePresentation:
    """``Omega^p_X = Omega^p_D / J^p`` with ``J^p`` the pure hull of ``Ĵ^p``.

    The returned presentation has the ``J^p`` generators as columns and the
    torsion generators (of ``J^p / Ĵ^p``) in ``torsion``.
    """
    ring = J.ring
    _check_p(ring, p)
    pure, kappa = ideal_is_pure(J)
    if not pure:
        raise KaehlerError("pure dimension required")
    jh = jhat_presentation(J, p)
    M = jh.module()
    c = M.codim()
    basis = jh.basis
    if c > kappa:
        # Kähler module supported in higher codimension: everything is torsion
        ident = Matrix.identity(ring, len(basis))
        tors = [column_to_form(ident.column(j), basis) for j in range(len(basis))]
        tors = [t for t in tors if not jh.contains(t)]
        return FormModulePresentation(ring, p, basis, ident, tors)
    hull = equidim_hull(M, kappa, seed=seed)
    A = hull.module.A
    A = Matrix.from_vecs(ring, len(basis), minimal_generators(A.col_vecs(), ring.N))
    tors_cols = _prune_modulo(jh.matrix, [list(c) for c in hull.torsion])
    tors = [_monic(jh.normal_form(column_to_form(c, basis))) for c in tors_cols]
    return FormModulePresentation(ring, p, basis, A, tors)


def _monic(f: Form) -> Form:
    if not f:
        return f
    lead = f[min(f)]
    c = lead.terms[max(lead.terms, key=DEGREVLEX.key)]
    return {L: q * (1 / c) for L, q in f.items()}


def _prune_modulo(base: Matrix, cols: List[List[Polynomial]]) -> List[List[Polynomial]]:
    """Greedy subset of ``cols`` generating ``(im base + <cols>) / im base``."""
    gb = image_gb(base)
    vecs = sorted((column_to_vec(c) for c in cols), key=lambda v: (max(sum(e) for _, e in v), len(v)))
    kept = []
    ring = base.ring
    from .algebra.matrix import vec_to_column

    for v in vecs:
        if gb.add(v):
            kept.append(vec_to_column(ring, v, base.nrows))
    return kept


def nullstellensatz_exponent(J: Ideal) -> int:
    """Least ``M`` with every w-monomial of degree ``M`` in ``J``."""
    ring = J.ring
    if ring.kappa == 0:
        raise KaehlerError("no w-variables: Z is the whole space")
    n = ring.n
    for g in J.gens:
        if g.restrict_w0():
            raise KaehlerError("Z is not {w = 0}: a generator does not vanish on w = 0")
    for i in ring.w_indices:
        xi = ring.gens()[i]
        if not J.saturate_element(xi).is_unit():
            raise KaehlerError("Z is not {w = 0}: no power of %s lies in J" % ring.variables[i])
    M = 1
    while True:
        if all(J.contains(ring.monomial((0,) * n + a)) for a in _w_exponents(ring.kappa, M)):
            return M
        M += 1


def _w_exponents(kappa: int, degree: int) -> List[Tuple[int, ...]]:
    out = []
    for c in itertools.combinations_with_replacement(range(kappa), degree):
        a = [0] * kappa
        for i in c:
            a[i] += 1
        out.append(tuple(a))
    return sorted(set(out), reverse=True)


def w_exponents_below(kappa: int, M: int) -> List[Tuple[int, ...]]:
    """All ``alpha`` with ``|alpha| < M``, by degree then reverse lex (1, w1, w2, w1^2, ...)."""
    out = []
    for d in range(M):
        out.extend(_w_exponents(kappa, d))
    return out


@dataclass
class OZGeneratingSet:
    """Generators ``b_k`` of ``Omega^p_X`` over the functions on Z.

    ``coords`` index the truncated ambient space ``V = sum O_Z w^alpha dx_L``
    (``|alpha| < M``); ``relations`` is the matrix (over the z-variables)
    whose columns span the image ``K`` of ``J^p`` in ``V``.
    """

    ring: Ring
    p: int
    M: int
    generators: List[Form]
    slots: List[Tuple[Label, Tuple[int, ...]]]
    chosen: List[Tuple[Label, Tuple[int, ...]]]
    relations: Matrix
    free: bool
    nu: int
    generic_rank: int
    strong: FormModulePresentation

    def coordinates(self, f: Form) -> List[Polynomial]:
        return truncated_coordinates(self.ring, f, self.slots)

    def spans(self, f: Form) -> bool:
        """``f`` is an O_Z-combination of the ``b_k`` modulo ``J^p`` (graded
        membership in ``V``)."""
        B = self.chosen_matrix().hstack(self.relations) if self.relations.ncols else self.chosen_matrix()
        gb = image_gb(B)
        v = column_to_vec(self.coordinates(f))
        return not v or gb.contains(v)

    def chosen_matrix(self) -> Matrix:
        return Matrix.from_columns(self.ring, len(self.slots), [self.coordinates(b) for b in self.generators])

    def render(self) -> List[str]:
        out = []
        for L, a in self.chosen:
            mono = self.ring.monomial((0,) * self.ring.n + a).render()
            lab = render_label(self.ring, L, "names")
            if mono == "1":
                out.append(lab)
            elif lab == "1":
                out.append(mono)
            else:
                out.append(f"{mono}*{lab}")
        return out


def truncated_coordinates(ring: Ring, f: Form, slots) -> List[Polynomial]:
    """Coefficients of ``w^alpha dx_L`` (functions of z) for each slot."""
    z = ring.zero()
    out = []
    for L, a in slots:
        q = f.get(L)
        out.append(q.w_coefficient(a) if q is not None else z)
    return out


def oz_generators(J: Ideal, p: int, strong: Optional[FormModulePresentation] = None,
                  seed: int = 0) -> OZGeneratingSet:
    """Minimal O_Z-generators of ``Omega^p_X`` at the origin and a freeness verdict."""
    ring = J.ring
    M = nullstellensatz_exponent(J)
    strong = strong or strong_forms(J, p, seed=seed)
    basis = strong.basis
    alphas = w_exponents_below(ring.kappa, M)
    slots = [(L, a) for L in basis for a in alphas]
    n = ring.n
    # K = O_Z-span of truncations of w^alpha * phi for generators phi of J^p
    rel_cols = []
    for phi in strong.forms():
        for a in alphas:
            shifted = {L: q.mul_term((0,) * n + a) for L, q in phi.items()}
            col = truncated_coordinates(ring, shifted, slots)
            if any(col):
                rel_cols.append(col)
    K = Matrix.from_columns(ring, len(slots), rel_cols) if rel_cols else Matrix.zero(ring, len(slots), 0)
    K = Matrix.from_vecs(ring, len(slots), minimal_generators(K.col_vecs(), ring.N)) if rel_cols else K
    # Nakayama at z = 0: greedy over unit vectors modulo K(0)
    K0 = [[_at_z0(q) for q in K.column(j)] for j in range(K.ncols)]
    span = _RationalSpan(len(slots))
    for col in K0:
        span.add([q.constant_term() for q in col])
    chosen = []
    for i, s in enumerate(slots):
        e = [0] * len(slots)
        e[i] = 1
        if span.add(e):
            chosen.append(s)
    rk = rank_fraction_field(K) if K.ncols else 0
    nu = len(chosen)
    gens = [{L: ring.monomial((0,) * n + a)} for L, a in chosen]
    free = nu == len(slots) - rk
    return OZGeneratingSet(ring, p, M, gens, slots, chosen, K, free, nu, len(slots) - rk, strong)


def _at_z0(q: Polynomial) -> Polynomial:
    n = q.ring.n
    return Polynomial._raw(q.ring, {e: c for e, c in q.terms.items() if not any(e[:n])})


class _RationalSpan:
    """Incremental row echelon form over Q."""

    def __init__(self, dim: int):
        self.dim = dim
        self.rows: Dict[int, list] = {}

    def reduce(self, v):
        from fractions import Fraction

        v = [Fraction(x) for x in v]
        for piv, row in self.rows.items():
            if v[piv]:
                c = v[piv]
                v = [a - c * b for a, b in zip(v, row)]
        return v

    def add(self, v) -> bool:
        v = self.reduce(v)
        piv = next((i for i, x in enumerate(v) if x), None)
        if piv is None:
            return False
        inv = 1 / v[piv]
        v = [x * inv for x in v]
        for k, row in self.rows.items():
            if row[piv]:
                c = row[piv]
                self.rows[k] = [a - c * b for a, b in zip(row, v)]
        self.rows[piv] = v
        return True
