"""Barlet-sheaf generators as Coleff–Herrera expressions, and the Noetherian
operators they induce.

For a resolution ``(E, f)`` of ``Omega^p_X`` with ``E_0 = Omega^p_D`` and a
chain map ``a`` from ``r_0`` copies of the Koszul complex of
``(w_1^M, ..., w_k^M)`` with ``a_0 = id``, every ``xi`` in ``ker f*_{k+1}``
gives the current-valued form

    mu_xi = sum_L eps_L (xi a_k)_L dx_{L^c} ^ dbar(1/w_1^M) ^ ... ^ dbar(1/w_k^M),

where ``dx_L ^ dx_{L^c} = eps_L dx_1 ^ ... ^ dx_N``, so that
``dx_L ^ mu_xi = (xi a_k)_L dbar(...)``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra.groebner import ModuleGB
from .algebra.ideal import Ideal
from .algebra.matrix import (
    LiftingGB,
    Matrix,
    NotInModule,
    syzygies,
    vec_to_column,
)
from .algebra.orders import DEGREVLEX, ModuleOrder
from .algebra.ring import Polynomial, Ring
from .currents import CHExpression, annihilation_test
from .exterior import Form, Label, complement, labels, wedge_sign
from .homalg import FreeResolution, free_resolution
from .kaehler import (
    FormModulePresentation,
    KaehlerError,
    nullstellensatz_exponent,
    strong_forms,
    w_exponents_below,
)


class BarletError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Koszul complexes and the comparison map


def koszul_matrices(ring: Ring, elements: Sequence[Polynomial], copies: int = 1) -> List[Matrix]:
    """Differentials ``g_1, ..., g_k`` of ``copies`` stacked Koszul complexes.

    Basis of ``K_j``: pairs ``(copy, S)`` with ``S`` a j-subset in lex order,
    copy-major; ``g(e_S) = sum_t (-1)^t x_{S_t} e_{S - S_t}``.
    """
    k = len(elements)
    subsets = [list(itertools.combinations(range(k), j)) for j in range(k + 1)]
    mats = []
    for j in range(1, k + 1):
        rows = [(c, S) for c in range(copies) for S in subsets[j - 1]]
        cols = [(c, S) for c in range(copies) for S in subsets[j]]
        ridx = {key: i for i, key in enumerate(rows)}
        entries = [[ring.zero()] * len(cols) for _ in rows]
        for jj, (c, S) in enumerate(cols):
            for t, s in enumerate(S):
                T = S[:t] + S[t + 1:]
                entries[ridx[(c, T)]][jj] = elements[s] if t % 2 == 0 else -elements[s]
        mats.append(Matrix(ring, entries, len(cols)))
    return mats


@dataclass
class ChainMap:
    """``a_0, ..., a_k`` with ``f_j a_j = a_{j-1} g_j``."""

    maps: List[Matrix]
    source: List[Matrix]
    target: FreeResolution
    M: int

    def verify(self) -> bool:
        if not self.maps[0] == Matrix.identity(self.target.ring, self.target.rank0):
            return False
        for j in range(1, len(self.maps)):
            if not (self.target.f(j) * self.maps[j] == self.maps[j - 1] * self.source[j - 1]):
                return False
        return True


def koszul_lift(resE: FreeResolution, M: int, kappa: Optional[int] = None) -> ChainMap:
    """Chain map from ``r_0`` Koszul complexes of ``(w_i^M)`` into ``resE``."""
    ring = resE.ring
    kappa = ring.kappa if kappa is None else kappa
    if resE.length < kappa:
        raise BarletError("resolution shorter than the codimension")
    powers = [ring.gens()[i] ** M for i in ring.w_indices][:kappa]
    g = koszul_matrices(ring, powers, resE.rank0)
    a = [Matrix.identity(ring, resE.rank0)]
    for j in range(1, kappa + 1):
        target = a[j - 1] * g[j - 1]
        try:
            lg = LiftingGB(resE.f(j))
            cols = [vec_to_column(ring, lg.lift_vec(target.col_vec(c)), resE.f(j).ncols)
                    for c in range(target.ncols)]
        except NotInModule:
            if j == 1:
                raise BarletError("w_i^M is not in the relation module") from None
            raise BarletError(f"chain map does not lift at step {j}: the resolution is not exact") from None
        a.append(Matrix.from_columns(ring, resE.f(j).ncols, cols))
    cm = ChainMap(a, g, resE, M)
    if not cm.verify():
        raise BarletError("chain-map equations fail")
    return cm


# ---------------------------------------------------------------------------
# dual kernel


def dual_kernel_generators(res: FreeResolution, kappa: int) -> List[List[Polynomial]]:
    """Row vectors generating ``ker f*_{kappa+1} / im f*_kappa``."""
    ring = res.ring
    if res.length < kappa:
        raise BarletError("resolution shorter than the codimension")
    rk = res.ranks[kappa]
    if res.length > kappa:
        K = syzygies(res.f(kappa + 1).transpose())
    else:
        K = Matrix.identity(ring, rk)
    img = res.f(kappa).transpose()
    gb = ModuleGB(ring.N, ModuleOrder(DEGREVLEX))
    gb.add_many(v for v in img.col_vecs() if v)
    gb.run()
    vecs = sorted((v for v in K.col_vecs() if v), key=lambda v: (max(sum(e) for _, e in v), len(v)))
    out = []
    for v in vecs:
        if gb.add(v):
            out.append(vec_to_column(ring, v, rk))
    return out


# ---------------------------------------------------------------------------
# generators


@dataclass
class BarletData:
    """Everything computed on the way to the Barlet generators."""

    J: Ideal
    p: int
    M: int
    strong: FormModulePresentation
    resolution: FreeResolution
    chain: ChainMap
    xis: List[List[Polynomial]]
    currents: List[CHExpression]
    generators: List[CHExpression]


def current_from_row(ring: Ring, p: int, row: Sequence[Polynomial], M: int) -> CHExpression:
    N = ring.N
    beta = (M - 1,) * ring.kappa
    terms = []
    for L, q in zip(labels(N, p), row):
        if not q:
            continue
        Lc = complement(L, N)
        eps, _ = wedge_sign(L, Lc)
        terms.append((q * eps, Lc, beta))
    return CHExpression(ring, terms)


def make_monic(e: CHExpression) -> CHExpression:
    """Scale so the first term in rendering order has leading coefficient 1."""
    e = e.normalize()
    if not e.terms:
        return e
    key = min(e.terms, key=lambda k: (k[1], k[0]))
    q = e.terms[key]
    c = q.terms[max(q.terms)]
    return e.mul(e.ring.const(1 / c))


def ch_weight(e: CHExpression) -> int:
    """Degree with z and w of weight 1 and ``dbar(1/w^(beta+1))`` of weight ``-|beta|``."""
    return min((q.total_degree() - sum(beta) for (_, beta), q in e.terms.items()), default=0)


def w_multiples(e: CHExpression) -> List[CHExpression]:
    """All nonzero ``w^alpha e``."""
    ring = e.ring
    n = ring.n
    top = e.max_beta()
    out = []
    for alpha in itertools.product(*(range(b + 1) for b in top)):
        m = ring.monomial((0,) * n + alpha)
        f = e.mul(m)
        if not f.is_zero():
            out.append(f)
    return out


class OZSpan:
    """Span over the z-polynomials of CH expressions, via coordinates indexed
    by ``(label, beta)``."""

    def __init__(self, ring: Ring):
        self.ring = ring
        self.index: Dict[Tuple[Label, Tuple[int, ...]], int] = {}
        self.gb = ModuleGB(ring.N, ModuleOrder(DEGREVLEX))

    def _vec(self, e: CHExpression):
        v = {}
        for key, q in e.normalize().terms.items():
            if key not in self.index:
                self.index[key] = len(self.index)
            c = self.index[key]
            for ex, x in q.terms.items():
                v[(c, ex)] = x
        return v

    def add(self, e: CHExpression) -> bool:
        v = self._vec(e)
        return bool(v) and self.gb.add(v)

    def contains(self, e: CHExpression) -> bool:
        v = self._vec(e)
        return not v or self.gb.contains(v)


def prune_oz(gens: Sequence[CHExpression]) -> List[CHExpression]:
    """Greedy O_Z-irredundant subset ordered by (weight, text)."""
    if not gens:
        return []
    span = OZSpan(gens[0].ring)
    kept = []
    for e in sorted(gens, key=lambda e: (ch_weight(e), e.render())):
        if span.add(e):
            kept.append(e)
    return kept


def oz_module_contains(big: Sequence[CHExpression], small: Sequence[CHExpression]) -> bool:
    """Each element of ``small`` is an O_Z-combination of the w-multiples of ``big``."""
    if not small:
        return True
    span = OZSpan(small[0].ring)
    for e in big:
        for f in w_multiples(e):
            span.add(f)
    return all(span.contains(e) for e in small)


def modules_equal(a: Sequence[CHExpression], b: Sequence[CHExpression]) -> bool:
    """Equality of the generated O_D-submodules of CH currents."""
    return oz_module_contains(a, b) and oz_module_contains(b, a)


def barlet_data(J: Ideal, p: int, seed: int = 0, strong: Optional[FormModulePresentation] = None,
                M: Optional[int] = None) -> BarletData:
    """Resolution, Koszul comparison map, dual kernel and the pruned
    generators; ``M`` may be raised above the Nullstellensatz exponent."""
    ring = J.ring
    strong = strong or strong_forms(J, p, seed=seed)
    try:
        M0 = nullstellensatz_exponent(J)
    except KaehlerError as exc:
        raise BarletError(f"Z is not a coordinate subspace: {exc}") from None
    if M is not None and M < M0:
        raise BarletError(f"M = {M} is below the Nullstellensatz exponent {M0}")
    M = M0 if M is None else M
    kappa = ring.kappa
    mod = strong.module()
    res = free_resolution(mod, keep_base=True)
    if res.rank0 != strong.rank:
        raise BarletError("internal: ambient module changed")
    chain = koszul_lift(res, M, kappa)
    xis = dual_kernel_generators(res, kappa)
    ak = chain.maps[kappa]
    currents = []
    for xi in xis:
        rowm = Matrix(ring, [list(xi)], len(xi)) * ak
        mu = current_from_row(ring, p, rowm.rows[0], M)
        if not mu.is_zero():
            currents.append(mu)
    pool = [f for mu in currents for f in w_multiples(mu)]
    gens = [make_monic(g) for g in prune_oz(pool)]
    return BarletData(J, p, M, strong, res, chain, xis, currents, gens)


def barlet_generators(J: Ideal, p: int, seed: int = 0) -> List[CHExpression]:
    """O_Z-generators of the Barlet sheaf ``i_* Ba^{n-p}_X`` as CH expressions."""
    return barlet_data(J, p, seed).generators


# ---------------------------------------------------------------------------
# differential operators


@dataclass(frozen=True)
class OpTerm:
    """``coeff * (1/gamma!) d^gamma/dw^gamma`` applied to the ``dx_label``
    coefficient of the input form, then restricted to ``w = 0``."""

    coeff: Polynomial
    label: Label
    gamma: Tuple[int, ...]


@dataclass
class DiffOperator:
    """Operator from p-forms on D to z-polynomials (the ``dz_1^...^dz_n``
    coefficient of the value)."""

    ring: Ring
    p: int
    terms: List[OpTerm]
    source: Optional[Tuple[int, Tuple[int, ...]]] = None

    def apply(self, phi: Form) -> Polynomial:
        acc = self.ring.zero()
        for t in self.terms:
            f = phi.get(t.label)
            if f is None:
                continue
            c = f.w_coefficient(t.gamma)
            if c:
                acc = acc + t.coeff * c
        return acc

    def is_zero(self) -> bool:
        return not self.terms

    def order(self) -> int:
        return max((sum(t.gamma) for t in self.terms), default=0)

    def key(self):
        return tuple(sorted((t.label, t.gamma, tuple(sorted(t.coeff.terms.items()))) for t in self.terms))

    def symbol(self, label: Label) -> str:
        """Symbol reading off the ``dx_label`` coefficient.

        ``dz_I ^ (dw_K _|)`` means: contract ``dw_K`` from the right, then
        wedge ``dz_I`` (the dz's missing from ``label``) on the right, so that
        ``dx_label`` goes to ``symbol_sign(label) * dz_1 ^ ... ^ dz_n``.
        """
        ring = self.ring
        zs_in, ws_in, missing = self._split(label)
        parts = []
        if missing:
            parts.append("^".join("d" + ring.variables[i] for i in missing))
        if ws_in:
            parts.append("(" + "^".join("d" + ring.variables[i] for i in ws_in) + " _|)")
        return " ^ ".join(parts) if parts else "1"

    def _split(self, label: Label):
        n = self.ring.n
        zs_in = tuple(i for i in label if i < n)
        ws_in = tuple(i for i in label if i >= n)
        missing = tuple(i for i in range(n) if i not in zs_in)
        return zs_in, ws_in, missing

    def symbol_sign(self, label: Label) -> int:
        zs_in, _, missing = self._split(label)
        return wedge_sign(zs_in, missing)[0]

    def render(self) -> str:
        if not self.terms:
            return "0"
        ring = self.ring
        out = []
        for t in sorted(self.terms, key=lambda t: (t.label, t.gamma)):
            denom = 1
            for g in t.gamma:
                denom *= factorial(g)
            coeff = t.coeff * Fraction(self.symbol_sign(t.label), denom)
            pieces = []
            if coeff != 1:
                pieces.append(f"({coeff.render()})")
            sym = self.symbol(t.label)
            if sym != "1" or not any(t.gamma):
                pieces.append(sym)
            deriv = []
            for i, g in zip(ring.w_indices, t.gamma):
                if g == 1:
                    deriv.append(f"d/d{ring.variables[i]}")
                elif g > 1:
                    deriv.append(f"d^{g}/d{ring.variables[i]}^{g}")
            if deriv:
                pieces.append("*".join(deriv))
            out.append(" * ".join(pieces) if pieces else "1")
        return " + ".join(out)

    def __repr__(self):
        return f"DiffOperator({self.render()!r})"


def _op_from_current(mu: CHExpression, p: int, alpha: Tuple[int, ...]) -> DiffOperator:
    """``phi -> project(w^alpha phi ^ mu, 0)`` restricted to the top label."""
    ring = mu.ring
    N = ring.N
    acc: Dict[Tuple[Label, Tuple[int, ...]], Polynomial] = {}
    for (L, beta), q in mu.normalize().terms.items():
        if len(L) != N - p:
            continue
        gamma = tuple(b - a for b, a in zip(beta, alpha))
        if any(g < 0 for g in gamma):
            continue
        K = complement(L, N)
        s, _ = wedge_sign(K, L)
        key = (K, gamma)
        v = q * s
        acc[key] = acc[key] + v if key in acc else v
    terms = [OpTerm(q, K, g) for (K, g), q in sorted(acc.items()) if q]
    return DiffOperator(ring, p, terms)


def to_diff_operators(gens: Sequence[CHExpression], p: Optional[int] = None) -> List[DiffOperator]:
    """Operator ``phi -> dz-coefficient of pi_*(phi ^ mu)`` for each generator."""
    out = []
    for j, mu in enumerate(gens):
        deg = mu.degree()
        pp = p if p is not None else (mu.ring.N - deg if deg is not None else 0)
        op = _op_from_current(mu, pp, (0,) * mu.ring.kappa)
        op.source = (j, (0,) * mu.ring.kappa)
        out.append(op)
    return out


def noetherian_operators(J: Ideal, p: int, seed: int = 0, data: Optional[BarletData] = None) -> List[DiffOperator]:
    """``L_{j,alpha} phi = project(phi ^ mu_j, alpha)`` for ``|alpha| < M``,
    with M large enough that ``w^alpha mu_j = 0`` beyond it."""
    data = data or barlet_data(J, p, seed)
    ring = J.ring
    top = max((sum(beta) for mu in data.generators for (_, beta) in mu.terms), default=0)
    Mop = max(data.M, top + 1)
    ops = []
    seen = set()
    for j, mu in enumerate(data.generators):
        for alpha in w_exponents_below(ring.kappa, Mop):
            op = _op_from_current(mu, p, alpha)
            if op.is_zero():
                continue
            k = op.key()
            if k in seen:
                continue
            seen.add(k)
            op.source = (j, alpha)
            ops.append(op)
    return ops


# ---------------------------------------------------------------------------
# completeness


@dataclass
class CompletenessReport:
    trials: int
    seed: int
    member_failures: List[str] = field(default_factory=list)
    nonmember_failures: List[str] = field(default_factory=list)
    members_checked: int = 0
    nonmembers_checked: int = 0

    @property
    def passed(self) -> bool:
        return not self.member_failures and not self.nonmember_failures


def random_polynomial(ring: Ring, rng: random.Random, degree: int = 3, terms: int = 4) -> Polynomial:
    out = {}
    for _ in range(terms):
        d = rng.randint(0, degree)
        e = [0] * ring.N
        for _ in range(d):
            e[rng.randrange(ring.N)] += 1
        c = rng.randint(-5, 5)
        if c:
            out[tuple(e)] = out.get(tuple(e), 0) + c
    return Polynomial(ring, out)


def random_member(strong: FormModulePresentation, rng: random.Random, degree: int = 3) -> Form:
    ring = strong.ring
    acc: Form = {}
    for phi in strong.forms():
        h = random_polynomial(ring, rng, degree, 2)
        if not h:
            continue
        for L, q in phi.items():
            v = acc.get(L, ring.zero()) + q * h
            if v:
                acc[L] = v
            else:
                acc.pop(L, None)
    return acc


def random_form(ring: Ring, p: int, rng: random.Random, degree: int = 3) -> Form:
    out: Form = {}
    for L in labels(ring.N, p):
        if rng.random() < 0.6:
            q = random_polynomial(ring, rng, degree, 3)
            if q:
                out[L] = q
    return out


def random_nonmember(strong: FormModulePresentation, rng: random.Random, degree: int = 3) -> Form:
    ring = strong.ring
    while True:
        phi = random_form(ring, strong.p, rng, degree)
        if phi and strong.normal_form(phi):
            # mix in a member so non-members are not all of low degree
            mem = random_member(strong, rng, degree)
            total = dict(phi)
            for L, q in mem.items():
                v = total.get(L, ring.zero()) + q
                if v:
                    total[L] = v
                else:
                    total.pop(L, None)
            if strong.normal_form(total):
                return total


def completeness_check(ops: Sequence[DiffOperator], J: Ideal, p: int, trials: int = 100, seed: int = 0,
                       strong: Optional[FormModulePresentation] = None, nonmember_trials: Optional[int] = None
                       ) -> CompletenessReport:
    """Members of ``J^p`` must be killed by every operator; certified
    non-members must be detected by at least one."""
    from .exterior import render_form

    strong = strong or strong_forms(J, p, seed=seed)
    rng = random.Random(seed)
    rep = CompletenessReport(trials, seed)
    for t in range(trials):
        phi = random_member(strong, rng)
        bad = [op for op in ops if op.apply(phi)]
        rep.members_checked += 1
        if bad:
            rep.member_failures.append(f"trial {t}: {render_form(J.ring, phi)} not killed by {bad[0].render()}")
    for t in range(trials if nonmember_trials is None else nonmember_trials):
        phi = random_nonmember(strong, rng)
        rep.nonmembers_checked += 1
        if not any(op.apply(phi) for op in ops):
            rep.nonmember_failures.append(f"trial {t}: {render_form(J.ring, phi)} undetected")
    return rep


def check_annihilation(data: BarletData):
    """Annihilation report for every emitted generator."""
    forms = data.strong.forms()
    return [annihilation_test(mu, data.J, forms) for mu in data.generators]
