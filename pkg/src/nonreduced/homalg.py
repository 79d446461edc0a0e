"""Free resolutions, rank loci, purity and Cohen–Macaulay tests, Ext modules
and the equidimensional hull of a presented module."""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from math import comb
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra.groebner import ModuleGB
from .algebra.ideal import Ideal, codim as ideal_codim, iter_minors, minors_ideal, monomial_dimension
from .algebra.matrix import (
    LiftingGB,
    Matrix,
    image_contains,
    image_gb,
    minimal_generators,
    syzygies,
)
from .algebra.ring import Polynomial, Ring

log = logging.getLogger(__name__)

# beyond this many minors, rank loci fall back to the Ext-support description
MINOR_LIMIT = 4000


class HomalgError(ValueError):
    pass


class PresentedModule:
    """The cokernel of ``A: R^c -> R^r``."""

    def __init__(self, A: Matrix, shifts: Optional[Sequence[int]] = None):
        self.A = A
        self.ring = A.ring
        self.shifts = list(shifts) if shifts else None
        self._gb: Optional[ModuleGB] = None

    @classmethod
    def free(cls, ring: Ring, rank: int) -> "PresentedModule":
        return cls(Matrix.zero(ring, rank, 0))

    @classmethod
    def quotient_ring(cls, I: Ideal) -> "PresentedModule":
        return cls(Matrix(I.ring, [list(I.gens)], len(I.gens)))

    @property
    def rank(self) -> int:
        return self.A.nrows

    def gb(self) -> ModuleGB:
        if self._gb is None:
            self._gb = image_gb(self.A)
        return self._gb

    def relations_contain(self, col: Sequence[Polynomial]) -> bool:
        from .algebra.matrix import column_to_vec

        v = column_to_vec(col)
        return not v or self.gb().contains(v)

    def is_zero(self) -> bool:
        one, zero = self.ring.one(), self.ring.zero()
        for i in range(self.rank):
            if not self.relations_contain([one if k == i else zero for k in range(self.rank)]):
                return False
        return True

    def dimension(self) -> int:
        """Krull dimension of the module; -1 for the zero module."""
        N = self.ring.N
        leads: Dict[int, list] = {c: [] for c in range(self.rank)}
        if self.A.ncols:
            for c, e in self.gb().leading_terms():
                leads[c].append(e)
        return max((monomial_dimension(v, N) for v in leads.values()), default=-1)

    def codim(self) -> int:
        """Codimension of the support; ``N + 1`` for the zero module."""
        d = self.dimension()
        return self.ring.N + 1 if d < 0 else self.ring.N - d

    def annihilator(self) -> Ideal:
        ring = self.ring
        if self.rank == 0:
            return Ideal.unit(ring)
        result = None
        for i in range(self.rank):
            e = [[ring.one() if k == i else ring.zero()] for k in range(self.rank)]
            B = Matrix(ring, e, 1).hstack(self.A) if self.A.ncols else Matrix(ring, e, 1)
            lg = LiftingGB(B)
            gens = []
            for v in lg.syzygy_vecs():
                part = {(0, ex): c for (comp, ex), c in v.items() if comp == 0}
                if part:
                    gens.append(Polynomial._raw(ring, {ex: c for (_, ex), c in part.items()}))
            ann = Ideal(ring, gens)
            result = ann if result is None else result.intersect(ann)
        return result

    def equals(self, other: "PresentedModule") -> bool:
        """Same submodule of relations in the same free module."""
        return self.rank == other.rank and image_contains(self.A, other.A) and image_contains(other.A, self.A)

    def __repr__(self):
        return f"PresentedModule(rank {self.rank}, {self.A.ncols} relations)"


@dataclass
class FreeResolution:
    """``0 <- E_0 <-f_1- E_1 <- ... <-f_L- E_L``.

    ``ranks[j]`` is the rank of ``E_j``; ``complete`` says the last map is
    injective; ``minimal`` says no entry has a nonzero constant term.
    """

    ring: Ring
    maps: List[Matrix]
    rank0: int
    complete: bool = True
    meta: Dict[str, object] = field(default_factory=dict)

    @property
    def length(self) -> int:
        return len(self.maps)

    @property
    def ranks(self) -> Tuple[int, ...]:
        return (self.rank0,) + tuple(f.ncols for f in self.maps)

    def f(self, j: int) -> Matrix:
        return self.maps[j - 1]

    @property
    def minimal(self) -> bool:
        return all(not p.constant_term() for f in self.maps for r in f.rows for p in r)

    def is_complex(self) -> bool:
        return all((self.maps[j] * self.maps[j + 1]).is_zero() for j in range(self.length - 1))

    def verify_exactness(self) -> bool:
        """Recompute ``ker f_j`` and check it lies in ``im f_{j+1}``."""
        if not self.is_complex():
            return False
        for j, f in enumerate(self.maps):
            K = syzygies(f, minimal=False)
            nxt = self.maps[j + 1] if j + 1 < self.length else Matrix.zero(self.ring, f.ncols, 0)
            if not image_contains(nxt, K):
                return False
        return True

    def presented(self) -> PresentedModule:
        if not self.maps:
            return PresentedModule.free(self.ring, self.rank0)
        return PresentedModule(self.maps[0])


def _free_degrees(f: Matrix, row_shifts: Sequence[int]) -> List[int]:
    return f.column_degrees(row_shifts)


def free_resolution(M: PresentedModule, max_len: Optional[int] = None, keep_base: bool = False) -> FreeResolution:
    """Iterated syzygies (pruned to minimal generators at each step), then
    :func:`minimalize`; ``keep_base`` keeps ``E_0`` equal to the ambient module."""
    ring = M.ring
    if max_len is None:
        max_len = ring.N + 1
    if max_len < 1:
        raise HomalgError("max_len must be at least 1")
    rs = list(M.shifts) if M.shifts else [0] * M.rank
    if M.A.ncols == 0:
        return FreeResolution(ring, [], M.rank, True)
    f1 = Matrix.from_vecs(ring, M.rank, minimal_generators(M.A.col_vecs(), ring.N, rs))
    if f1.ncols == 0:
        return FreeResolution(ring, [], M.rank, True)
    maps = [f1]
    # row degrees of the last map
    shifts = rs
    complete = False
    while len(maps) < max_len:
        K = syzygies(maps[-1], row_shifts=shifts)
        shifts = _free_degrees(maps[-1], shifts)
        if K.ncols == 0:
            complete = True
            break
        maps.append(K)
    else:
        complete = not syzygies(maps[-1], row_shifts=shifts).ncols
    res = FreeResolution(ring, maps, M.rank, complete)
    return minimalize(res, keep_base=keep_base)


def _unit_entry(f: Matrix):
    best = None
    for i, r in enumerate(f.rows):
        for k, p in enumerate(r):
            if p and p.is_constant():
                cand = (i, k)
                if best is None:
                    best = cand
    return best


def minimalize(res: FreeResolution, keep_base: bool = False) -> FreeResolution:
    """Cancel unit entries (nonzero constants) until none remain.

    With ``keep_base`` no cancellation touches ``f_1``, so ``E_0`` and the
    presentation of the resolved module stay literally the same.
    """
    maps = list(res.maps)
    ring = res.ring
    rank0 = res.rank0
    changed = True
    while changed:
        changed = False
        for j in range(len(maps)):
            if keep_base and j == 0:
                continue
            f = maps[j]
            hit = _unit_entry(f)
            if hit is None:
                continue
            r, c = hit
            u = f[r, c]
            inv = 1 / u.constant_term()
            rows_keep = [i for i in range(f.nrows) if i != r]
            cols_keep = [k for k in range(f.ncols) if k != c]
            new_rows = []
            for i in rows_keep:
                fic = f[i, c]
                row = []
                for k in cols_keep:
                    val = f[i, k]
                    if fic and f[r, k]:
                        val = val - fic * f[r, k] * inv
                    row.append(val)
                new_rows.append(row)
            maps[j] = Matrix(ring, new_rows, len(cols_keep))
            if j > 0:
                maps[j - 1] = maps[j - 1].select_columns(rows_keep)
            else:
                rank0 -= 1
            if j + 1 < len(maps):
                maps[j + 1] = maps[j + 1].select_rows(cols_keep)
            changed = True
            break
    # drop trailing zero-rank terms
    while maps and maps[-1].ncols == 0:
        maps.pop()
    # a zero map in the middle of a resolution means an empty free module
    residual = any(p and p.constant_term() for f in maps for r in f.rows for p in r)
    meta = dict(res.meta)
    meta["minimal_at_origin"] = not residual
    return FreeResolution(ring, maps, rank0, res.complete, meta)


# ---------------------------------------------------------------------------
# rank loci


@dataclass
class SingularityLoci:
    """``ideals[j]`` cuts out ``Z_j`` (index 0 unused); ``codims`` likewise."""

    ideals: Dict[int, Ideal]
    codims: Dict[int, int]
    expected_ranks: Dict[int, int]
    method: Dict[int, str]

    def items(self):
        return sorted(self.codims.items())


def expected_ranks(res: FreeResolution) -> Dict[int, int]:
    rho: Dict[int, int] = {}
    nxt = 0
    for j in range(res.length, 0, -1):
        rho[j] = res.ranks[j] - nxt
        nxt = rho[j]
    return rho


def _ext_support_ideal(res: FreeResolution, j: int) -> Ideal:
    ring = res.ring
    out = None
    for k in range(j, res.length + 1):
        E = ext_module(res, k)
        if E.is_zero:
            continue
        ann = E.module.annihilator()
        out = ann if out is None else out * ann
    return out if out is not None else Ideal.unit(ring)


def rank_loci(res: FreeResolution) -> SingularityLoci:
    if not res.complete:
        raise HomalgError("rank loci need a complete resolution")
    rho = expected_ranks(res)
    ideals, codims, method = {}, {}, {}
    for j in range(1, res.length + 1):
        f = res.f(j)
        r = rho[j]
        if comb(f.nrows, r) * comb(f.ncols, r) <= MINOR_LIMIT:
            I = minors_ideal(f, r)
            method[j] = "minors"
        else:
            I = _ext_support_ideal(res, j)
            method[j] = "ext-support"
        ideals[j] = I
        codims[j] = ideal_codim(I) if I.gens else 0
    return SingularityLoci(ideals, codims, rho, method)


def purity_test(res: FreeResolution, kappa: int, loci: Optional[SingularityLoci] = None):
    """Pure iff ``codim Z_j >= j + 1`` for all ``j >= kappa + 1``.

    Returns ``(verdict, certificate)`` with certificate a list of
    ``(j, codim Z_j)``.
    """
    M = res.presented()
    c = M.codim()
    if c != kappa:
        raise HomalgError(f"support has codimension {c}, not {kappa}")
    loci = loci or rank_loci(res)
    cert = [(j, loci.codims[j]) for j in range(kappa + 1, res.length + 1)]
    return all(cz >= j + 1 for j, cz in cert), cert


def is_pure(M: PresentedModule, kappa: Optional[int] = None) -> bool:
    kappa = M.codim() if kappa is None else kappa
    res = free_resolution(M)
    return purity_test(res, kappa)[0]


@dataclass
class CMReport:
    cm: bool
    length: int
    kappa: int
    ext_vanishing: bool
    exact_flag: bool

    @property
    def consistent(self) -> bool:
        return self.cm == self.ext_vanishing == self.exact_flag


def cm_test(M: PresentedModule, res: Optional[FreeResolution] = None):
    """Cohen–Macaulay iff the minimal resolution has length ``codim M``.

    Returns ``(verdict, (length, kappa))``.
    """
    if M.rank == 0 or M.is_zero():
        raise HomalgError("zero module")
    kappa = M.codim()
    res = res or free_resolution(M)
    return res.length == kappa, (res.length, kappa)


def ext_vanishing(res: FreeResolution, kappa: int) -> bool:
    """``Ext^{kappa+q} = 0`` for all ``q >= 1``, by kernel-mod-image membership."""
    return all(ext_module(res, k).is_zero for k in range(kappa + 1, res.length + 1))


def dual_exactness_flag(res: FreeResolution, kappa: int) -> bool:
    """Exactness of the dual complex beyond ``kappa`` by the determinantal
    criterion: ``E*_kappa -> ... -> E*_L -> 0`` is exact at ``kappa+1..L`` iff
    the expected-rank minors of ``f_{kappa+1}`` generate the unit ideal.
    """
    if res.length <= kappa:
        return True
    f = res.f(kappa + 1)
    r = expected_ranks(res)[kappa + 1]
    if r == 0:
        return True
    # minors of a matrix with entries in the maximal ideal stay in it
    if all(not p.constant_term() for row in f.rows for p in row):
        return False
    acc: List[Polynomial] = []
    for m in iter_minors(f, r):
        acc.append(m)
        if len(acc) % 50 == 0 and Ideal(res.ring, acc).is_unit():
            return True
    return Ideal(res.ring, acc).is_unit()


def cm_report(M: PresentedModule, res: Optional[FreeResolution] = None) -> CMReport:
    res = res or free_resolution(M)
    verdict, (L, kappa) = cm_test(M, res)
    return CMReport(verdict, L, kappa, ext_vanishing(res, kappa), dual_exactness_flag(res, kappa))


# ---------------------------------------------------------------------------
# Ext


@dataclass
class ExtModule:
    """``Ext^k(M, R) = ker f*_{k+1} / im f*_k`` inside ``E*_k``.

    ``kernel`` has the kernel generators as columns, ``image`` the columns of
    ``f*_k``; ``module`` presents the quotient on the kernel generators.
    """

    k: int
    kernel: Matrix
    image: Matrix
    module: PresentedModule
    is_zero: bool
    beyond_length: bool = False


def dual_map(res: FreeResolution, k: int) -> Matrix:
    """Transpose of ``f_k``; zero maps outside ``1..L``."""
    ring = res.ring
    ranks = res.ranks
    if 1 <= k <= res.length:
        return res.f(k).transpose()
    if k == 0:
        return Matrix.zero(ring, ranks[0], 0)
    # k = L + 1
    return Matrix.zero(ring, 0, ranks[-1])


def ext_module(res: FreeResolution, k: int) -> ExtModule:
    ring = res.ring
    if k < 0 or k > res.length:
        z = Matrix.zero(ring, 0, 0)
        return ExtModule(k, z, z, PresentedModule(z), True, beyond_length=k > res.length)
    rk = res.ranks[k]
    nxt = dual_map(res, k + 1) if k < res.length else None
    if nxt is None:
        K = Matrix.identity(ring, rk)
    else:
        K = syzygies(nxt)
    img = dual_map(res, k) if k >= 1 else Matrix.zero(ring, rk, 0)
    if K.ncols == 0:
        return ExtModule(k, K, img, PresentedModule(Matrix.zero(ring, 0, 0)), True)
    zero = image_contains(img, K)
    if img.ncols:
        rel = syzygies(K.hstack(img))
        pres = rel.select_rows(range(K.ncols))
    else:
        pres = Matrix.zero(ring, K.ncols, 0)
    return ExtModule(k, K, img, PresentedModule(pres), zero)


def ext_modules(M, ks: Sequence[int]) -> List[ExtModule]:
    res = M if isinstance(M, FreeResolution) else free_resolution(M)
    return [ext_module(res, k) for k in ks]


# ---------------------------------------------------------------------------
# equidimensional hull


def module_colon(A: Matrix, g: Polynomial) -> Matrix:
    """Columns generating ``{v : g v in im A}``."""
    r = A.nrows
    ring = A.ring
    gI = Matrix.identity(ring, r).scale(g)
    S = syzygies(gI.hstack(A) if A.ncols else gI)
    return S.select_rows(range(r))


def module_saturate(A: Matrix, g: Polynomial) -> Matrix:
    cur = A
    while True:
        nxt = module_colon(cur, g)
        if image_contains(cur, nxt):
            return cur
        cur = nxt


@dataclass
class Hull:
    """``M / T`` presented as ``F / N'`` with ``N' = N : I^∞``."""

    module: PresentedModule
    torsion: List[Tuple[Polynomial, ...]]
    annihilator: Optional[Ideal]
    multiplier: Optional[Polynomial] = None

    @property
    def is_pure_input(self) -> bool:
        return not self.torsion


def _seeded_combo(I: Ideal, rng: random.Random) -> Polynomial:
    acc = I.ring.zero()
    for g in I.gens:
        acc = acc + g * rng.randint(1, 7)
    return acc


def equidim_hull(M: PresentedModule, kappa: Optional[int] = None, seed: int = 0) -> Hull:
    """Quotient of ``M`` by the submodule of sections supported in codim > kappa.

    The torsion is ``H^0_I(M)`` for ``I`` the product of the annihilators of
    ``Ext^j(M, R)``, ``j > kappa``; we saturate by one element of ``I`` and
    certify the choice (torsion small, quotient pure), falling back to the
    generators of ``I`` and seeded combinations.
    """
    c = M.codim()
    if kappa is None:
        kappa = c
    if c != kappa:
        raise HomalgError(f"support has codimension {c}, not {kappa}")
    res = free_resolution(M)
    I = None
    for k in range(kappa + 1, res.length + 1):
        E = ext_module(res, k)
        if not E.is_zero:
            ann = E.module.annihilator()
            I = ann if I is None else I * ann
    if I is None:
        return Hull(M, [], None)
    ring = M.ring
    rng = random.Random(seed)
    # sparse generators not vanishing on w = 0 are the likeliest to avoid the
    # codim-kappa associated primes; seeded combinations are the fallback
    simple = sorted(I.minimal().gens, key=lambda g: (g.restrict_w0().is_zero(), len(g), g.total_degree()))
    combos = [_seeded_combo(I, rng) for _ in range(4)]
    for g in simple[:4] + combos:
        Np = module_saturate(M.A, g)
        Np = Matrix.from_vecs(ring, M.rank, minimal_generators(Np.col_vecs(), ring.N))
        hull = PresentedModule(Np)
        torsion = [Np.column(j) for j in range(Np.ncols) if not M.relations_contain(Np.column(j))]
        # torsion supported in codim > kappa
        tor_ok = True
        if torsion:
            sub = _subquotient_codim(M.A, torsion)
            tor_ok = sub > kappa
        if tor_ok and is_pure(hull, kappa):
            return Hull(hull, torsion, I, g)
    raise HomalgError("equidimensional hull: no certified saturating element found")


def _subquotient_codim(A: Matrix, cols) -> int:
    """Codimension of the support of ``(im A + <cols>) / im A``."""
    ring = A.ring
    ann = None
    for col in cols:
        colm = Matrix.from_columns(ring, A.nrows, [list(col)])
        # ann of the class of col: {g : g col in im A}
        S = syzygies(colm.hstack(A) if A.ncols else colm)
        gens = [S[0, j] for j in range(S.ncols) if S[0, j]]
        a = Ideal(ring, gens)
        ann = a if ann is None else ann * a
    return ideal_codim(ann)
