"""Polynomial ideals: Gröbner bases, normal forms, quotients, saturation,
determinantal ideals and codimension."""

from __future__ import annotations

import itertools
import threading
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

from .groebner import ModuleGB, divide
from .matrix import LiftingGB, Matrix
from .orders import DEGREVLEX, ModuleOrder, MonomialOrder
from .ring import Polynomial, Ring, RingMismatch


def _vec(p: Polynomial):
    return {(0, e): c for e, c in p.terms.items()}


def _poly(ring: Ring, v) -> Polynomial:
    return Polynomial._raw(ring, {e: c for (_, e), c in v.items()})


def _check_ring(ring: Ring, polys: Iterable[Polynomial]) -> None:
    for p in polys:
        if p.ring != ring:
            raise RingMismatch(f"polynomial over {p.ring}, expected {ring}")


class Ideal:
    """Ideal of ``ring`` given by generators.

    Zero generators are dropped and recorded in ``dropped_zero``.  Gröbner
    bases are cached per monomial order behind a lock.
    """

    def __init__(self, ring: Ring, gens: Iterable[Polynomial]):
        gens = list(gens)
        _check_ring(ring, gens)
        self.ring = ring
        self.gens: Tuple[Polynomial, ...] = tuple(g for g in gens if not g.is_zero())
        self.dropped_zero = len(gens) - len(self.gens)
        self._gb: Dict[MonomialOrder, ModuleGB] = {}
        self._lock = threading.Lock()

    @classmethod
    def parse(cls, ring: Ring, texts: Sequence[str]) -> "Ideal":
        return cls(ring, [ring.parse(t) for t in texts])

    @classmethod
    def unit(cls, ring: Ring) -> "Ideal":
        return cls(ring, [ring.one()])

    def __repr__(self):
        return "Ideal<" + ", ".join(g.render() for g in self.gens) + ">"

    # -- Gröbner data --------------------------------------------------
    def _engine(self, order: MonomialOrder = DEGREVLEX) -> ModuleGB:
        with self._lock:
            gb = self._gb.get(order)
            if gb is None:
                gb = ModuleGB(self.ring.N, ModuleOrder(order))
                gb.add_many(_vec(g) for g in self.gens)
                gb.run()
                self._gb[order] = gb
            return gb

    def groebner_basis(self, order: MonomialOrder = DEGREVLEX) -> List[Polynomial]:
        return [_poly(self.ring, v) for v in self._engine(order).basis()]

    def leading_monomials(self, order: MonomialOrder = DEGREVLEX) -> List[Tuple[int, ...]]:
        return [e for _, e in self._engine(order).leading_terms()]

    def reduce(self, f: Polynomial, order: MonomialOrder = DEGREVLEX) -> Polynomial:
        _check_ring(self.ring, [f])
        if not self.gens:
            return f
        return _poly(self.ring, self._engine(order).reduce(_vec(f)))

    def contains(self, f: Polynomial) -> bool:
        _check_ring(self.ring, [f])
        if f.is_zero():
            return True
        if not self.gens:
            return False
        return not self._engine().reduce(_vec(f), full=False)

    __contains__ = contains

    def is_unit(self) -> bool:
        return self.contains(self.ring.one())

    def is_zero(self) -> bool:
        return not self.gens

    def issubset(self, other: "Ideal") -> bool:
        return all(other.contains(g) for g in self.gens)

    def __le__(self, other: "Ideal") -> bool:
        return self.issubset(other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.ring == other.ring and self.issubset(other) and other.issubset(self)

    __hash__ = None  # equality is mathematical, not structural

    # -- operations ----------------------------------------------------
    def __add__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, self.gens + other.gens)

    def __mul__(self, other: "Ideal") -> "Ideal":
        return Ideal(self.ring, [a * b for a in self.gens for b in other.gens])

    def power(self, k: int) -> "Ideal":
        out = Ideal.unit(self.ring)
        for _ in range(k):
            out = out * self
        return out.minimal()

    def minimal(self) -> "Ideal":
        """Same ideal with an irredundant generating subset."""
        from .matrix import minimal_generators

        vecs = minimal_generators([_vec(g) for g in self.gens], self.ring.N)
        return Ideal(self.ring, [_poly(self.ring, v) for v in vecs])

    def reduced(self) -> "Ideal":
        """Ideal generated by its reduced Gröbner basis."""
        return Ideal(self.ring, self.groebner_basis())

    def quotient_element(self, g: Polynomial) -> "Ideal":
        """``I : g``."""
        if g.is_zero():
            return Ideal.unit(self.ring)
        if not self.gens:
            return Ideal(self.ring, [])
        A = Matrix(self.ring, [[g] + list(self.gens)])
        lg = LiftingGB(A)
        first = []
        for v in lg.syzygy_vecs():
            part = {(0, e): c for (comp, e), c in v.items() if comp == 0}
            if part:
                first.append(_poly(self.ring, part))
        return Ideal(self.ring, first).minimal()

    def quotient(self, other: "Ideal") -> "Ideal":
        """``I : J``."""
        result = None
        for g in other.gens:
            q = self.quotient_element(g)
            result = q if result is None else result.intersect(q)
        return result if result is not None else Ideal.unit(self.ring)

    def saturate_element(self, g: Polynomial) -> "Ideal":
        cur = self
        while True:
            nxt = cur.quotient_element(g)
            if nxt.issubset(cur):
                return cur
            cur = nxt

    def saturate(self, other: "Ideal") -> "Ideal":
        """``I : J^∞``."""
        return saturate(self, other)

    def intersect(self, other: "Ideal") -> "Ideal":
        if not self.gens or not other.gens:
            return Ideal(self.ring, [])
        k = len(self.gens)
        A = Matrix(self.ring, [list(self.gens) + [-g for g in other.gens]])
        lg = LiftingGB(A)
        out = []
        for v in lg.syzygy_vecs():
            acc = self.ring.zero()
            for (comp, e), c in v.items():
                if comp < k:
                    acc = acc + self.gens[comp].mul_term(e, c)
            if acc:
                out.append(acc)
        return Ideal(self.ring, out).minimal()

    def codim(self) -> int:
        return codim(self)

    def dimension(self) -> int:
        if not self.gens:
            return self.ring.N
        if self.is_unit():
            return -1
        return monomial_dimension(self.leading_monomials(), self.ring.N)


# ---------------------------------------------------------------------------
# functional interface


def groebner_basis(I: Ideal, order: MonomialOrder = DEGREVLEX) -> List[Polynomial]:
    if not I.gens:
        raise ValueError("Gröbner basis of the zero ideal requested")
    return I.groebner_basis(order)


def division(f: Polynomial, G: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX
             ) -> Tuple[List[Polynomial], Polynomial]:
    """Quotients ``q`` and remainder ``r`` with ``f = sum(q_i G_i) + r``."""
    _check_ring(f.ring, G)
    qs, rem = divide(_vec(f), [_vec(g) for g in G], ModuleOrder(order))
    return [Polynomial._raw(f.ring, q) for q in qs], _poly(f.ring, rem)


def normal_form(f: Polynomial, G: Sequence[Polynomial], order: MonomialOrder = DEGREVLEX) -> Polynomial:
    return division(f, G, order)[1]


def saturate(I: Ideal, J: Ideal) -> Ideal:
    if I.ring != J.ring:
        raise RingMismatch("saturation across rings")
    if not J.gens:
        raise ValueError("saturation by the zero ideal")
    if J.is_unit():
        return I
    result = None
    for g in J.gens:
        s = I.saturate_element(g)
        result = s if result is None else result.intersect(s)
    return result


def minors_ideal(A: Matrix, r: int) -> Ideal:
    """Ideal of ``r x r`` minors; minors already in the ideal built so far are skipped."""
    if r < 0 or r > min(A.nrows, A.ncols):
        raise ValueError(f"minor size {r} out of range for a {A.nrows}x{A.ncols} matrix")
    return ideal_from_stream(A.ring, iter_minors(A, r))


def ideal_from_stream(ring: Ring, polys: Iterable[Polynomial]) -> Ideal:
    gb = ModuleGB(ring.N, ModuleOrder(DEGREVLEX))
    kept = []
    for f in polys:
        if f and gb.add(_vec(f)):
            kept.append(f)
            if gb.contains({(0, (0,) * ring.N): Fraction(1)}):
                break
    I = Ideal(ring, kept)
    I._gb[DEGREVLEX] = gb.run()
    return I


def iter_minors(A: Matrix, r: int):
    """All nonzero ``r x r`` minors, by Laplace expansion with shared sub-minors."""
    if r == 0:
        yield A.ring.one()
        return
    nz_rows = [i for i in range(A.nrows) if any(A.rows[i])]
    nz_cols = [j for j in range(A.ncols) if any(A.rows[i][j] for i in range(A.nrows))]
    memo: Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], Polynomial] = {}
    zero = A.ring.zero()

    def det(rows: Tuple[int, ...], cols: Tuple[int, ...]) -> Polynomial:
        if len(rows) == 1:
            return A.rows[rows[0]][cols[0]]
        key = (rows, cols)
        got = memo.get(key)
        if got is not None:
            return got
        top = A.rows[rows[0]]
        acc = zero
        for k, c in enumerate(cols):
            a = top[c]
            if not a:
                continue
            sub = det(rows[1:], cols[:k] + cols[k + 1:])
            if sub:
                acc = acc + a * sub if k % 2 == 0 else acc - a * sub
        memo[key] = acc
        return acc

    for rows in itertools.combinations(nz_rows, r):
        for cols in itertools.combinations(nz_cols, r):
            d = det(rows, cols)
            if d:
                yield d


def monomial_dimension(leads: Sequence[Tuple[int, ...]], nvars: int) -> int:
    """Krull dimension of ``k[x]/<x^e : e in leads>`` via maximal independent sets."""
    if not leads:
        return nvars
    if any(not any(e) for e in leads):
        return -1
    supports = [frozenset(i for i, x in enumerate(e) if x) for e in leads]
    for size in range(nvars, -1, -1):
        for S in itertools.combinations(range(nvars), size):
            s = set(S)
            if all(not sup <= s for sup in supports):
                return size
    return 0


def codim(I: Ideal) -> int:
    """Codimension of V(I); the unit ideal gives ``N + 1``, the zero ideal 0."""
    N = I.ring.N
    if not I.gens:
        return 0
    d = I.dimension()
    return N + 1 if d < 0 else N - d
