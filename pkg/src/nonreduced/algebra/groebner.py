"""Buchberger's algorithm for submodules of free modules over Q[x].

Internally a module element is a dict ``{(component, exponent): Fraction}``;
an ideal is simply a submodule of the rank-one free module.  The public
helpers in :mod:`nonreduced.algebra.ideal` and :mod:`nonreduced.algebra.matrix`
convert to and from :class:`~nonreduced.algebra.ring.Polynomial`.
"""

from __future__ import annotations

import heapq
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .orders import DEGREVLEX, ModuleOrder

Term = Tuple[int, Tuple[int, ...]]
Vec = Dict[Term, Fraction]


def _divides(a: Tuple[int, ...], b: Tuple[int, ...]) -> bool:
    for x, y in zip(a, b):
        if x > y:
            return False
    return True


def _lcm(a, b):
    return tuple(x if x > y else y for x, y in zip(a, b))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _coprime(a, b):
    for x, y in zip(a, b):
        if x and y:
            return False
    return True


def _neg(key: tuple) -> tuple:
    return tuple(-x for x in key)


def leading_term(vec: Vec, order: ModuleOrder) -> Term:
    return max(vec, key=lambda t: order.key(*t))


def vec_add_scaled(f: Vec, g: Vec, coeff: Fraction, shift: Tuple[int, ...]) -> None:
    """In place: f += coeff * x^shift * g."""
    for (c, e), v in g.items():
        t = (c, tuple(a + b for a, b in zip(e, shift)))
        s = f.get(t, 0) + coeff * v
        if s:
            f[t] = s
        else:
            del f[t]


def vec_scale(g: Vec, coeff: Fraction, shift: Tuple[int, ...]) -> Vec:
    return {(c, tuple(a + b for a, b in zip(e, shift))): coeff * v for (c, e), v in g.items()}


class _Elem:
    __slots__ = ("vec", "comp", "lexp", "sugar", "single", "active")

    def __init__(self, vec: Vec, lead: Term, sugar: int):
        self.vec = vec
        self.comp, self.lexp = lead
        self.sugar = sugar
        self.single = len({c for c, _ in vec}) == 1
        self.active = True


class ModuleGB:
    """Incrementally built Gröbner basis of a submodule of R^rank.

    ``shifts`` are degree shifts of the free-module components; they only
    influence pair selection (sugar), never correctness.
    """

    def __init__(self, nvars: int, order: Optional[ModuleOrder] = None, shifts: Optional[Dict[int, int]] = None):
        self.nvars = nvars
        self.order = order or ModuleOrder(DEGREVLEX)
        self.shifts = shifts or {}
        self.elems: List[_Elem] = []
        self._by_comp: Dict[int, List[int]] = {}
        self._pairs: list = []
        self._pending: set = set()
        self._created: set = set()
        self.complete = True

    # -- helpers -------------------------------------------------------
    def degree(self, vec: Vec) -> int:
        sh = self.shifts
        return max(sum(e) + sh.get(c, 0) for c, e in vec) if vec else 0

    def _find_reducer(self, comp: int, e) -> Optional[_Elem]:
        for idx in self._by_comp.get(comp, ()):
            el = self.elems[idx]
            if el.active and _divides(el.lexp, e):
                return el
        return None

    def reduce(self, vec: Vec, full: bool = True, stop_block: Optional[int] = None) -> Vec:
        """Remainder of ``vec`` modulo the current basis.

        With ``full=False`` only the leading term is reduced repeatedly.  With
        ``stop_block`` set, reduction stops as soon as the leading term lies in
        a component whose priority is below ``stop_block`` (used for lifts).
        """
        order = self.order
        f = dict(vec)
        rem: Vec = {}
        heap = [(_neg(order.key(c, e)), c, e) for (c, e) in f]
        heapq.heapify(heap)
        while heap:
            _, c, e = heapq.heappop(heap)
            t = (c, e)
            coeff = f.get(t)
            if coeff is None:
                continue
            if stop_block is not None and order.priority[c] < stop_block:
                rem.update(f)
                return rem
            g = self._find_reducer(c, e)
            if g is None:
                rem[t] = f.pop(t)
                if not full:
                    rem.update(f)
                    return rem
                continue
            shift = _sub(e, g.lexp)
            for (c2, e2), v in g.vec.items():
                t2 = (c2, tuple(a + b for a, b in zip(e2, shift)))
                old = f.get(t2)
                s = (old or 0) - coeff * v
                if s:
                    f[t2] = s
                    if old is None:
                        heapq.heappush(heap, (_neg(order.key(*t2)), t2[0], t2[1]))
                elif old is not None:
                    del f[t2]
        return rem

    def contains(self, vec: Vec) -> bool:
        self.run()
        return not self.reduce(vec, full=False)

    # -- construction --------------------------------------------------
    def _insert(self, vec: Vec, sugar: int) -> None:
        order = self.order
        lead = leading_term(vec, order)
        lc = vec[lead]
        if lc != 1:
            inv = 1 / lc
            vec = {t: v * inv for t, v in vec.items()}
        el = _Elem(vec, lead, sugar)
        k = len(self.elems)
        for idx in self._by_comp.get(el.comp, ()):
            old = self.elems[idx]
            if not old.active:
                continue
            self._created.add((idx, k))
            if el.single and old.single and _coprime(el.lexp, old.lexp):
                continue
            l = _lcm(el.lexp, old.lexp)
            s = max(old.sugar + sum(l) - sum(old.lexp), sugar + sum(l) - sum(el.lexp))
            heapq.heappush(self._pairs, (s, order.key(el.comp, l), idx, k))
            self._pending.add((idx, k))
        # old elements whose lead is a multiple of the new lead stop spawning pairs
        for idx in self._by_comp.get(el.comp, ()):
            old = self.elems[idx]
            if old.active and _divides(el.lexp, old.lexp):
                old.active = False
        self.elems.append(el)
        self._by_comp.setdefault(el.comp, []).append(k)
        self.complete = False

    def add(self, vec: Vec) -> bool:
        """Add a generator; returns False when it already lies in the module."""
        self.run()
        r = self.reduce(vec)
        if not r:
            return False
        self._insert(r, max(self.degree(vec), self.degree(r)))
        return True

    def add_many(self, vecs: Iterable[Vec]) -> None:
        for v in vecs:
            if v:
                self._insert(dict(v), self.degree(v))

    def _criterion(self, i: int, j: int, l) -> bool:
        comp = self.elems[i].comp
        pend = self._pending
        done = self._created
        for k in self._by_comp.get(comp, ()):
            if k == i or k == j:
                continue
            if _divides(self.elems[k].lexp, l):
                a = (i, k) if i < k else (k, i)
                b = (j, k) if j < k else (k, j)
                if a in done and b in done and a not in pend and b not in pend:
                    return True
        return False

    def run(self) -> "ModuleGB":
        if self.complete:
            return self
        while self._pairs:
            s, _, i, j = heapq.heappop(self._pairs)
            self._pending.discard((i, j))
            gi, gj = self.elems[i], self.elems[j]
            l = _lcm(gi.lexp, gj.lexp)
            if self._criterion(i, j, l):
                continue
            sv = vec_scale(gi.vec, Fraction(1), _sub(l, gi.lexp))
            vec_add_scaled(sv, gj.vec, Fraction(-1), _sub(l, gj.lexp))
            if not sv:
                continue
            r = self.reduce(sv)
            if r:
                self._insert(r, s)
        self.complete = True
        return self

    def basis(self) -> List[Vec]:
        """Reduced Gröbner basis (monic, inter-reduced), sorted by leading term."""
        self.run()
        act = []
        # raw generators from add_many may have redundant leads; keep minimal ones
        for el in self.elems:
            if not el.active:
                continue
            if any(o.comp == el.comp and _divides(o.lexp, el.lexp) for o in act):
                continue
            act = [o for o in act if not (o.comp == el.comp and _divides(el.lexp, o.lexp))]
            act.append(el)
        tmp = ModuleGB(self.nvars, self.order, self.shifts)
        for el in act:
            tmp.elems.append(_Elem(el.vec, (el.comp, el.lexp), el.sugar))
            tmp._by_comp.setdefault(el.comp, []).append(len(tmp.elems) - 1)
        out = []
        for idx, el in enumerate(tmp.elems):
            el.active = False
            r = tmp.reduce(el.vec)
            el.active = True
            # leading term is irreducible by the others, so r keeps it
            lt = (el.comp, el.lexp)
            if r.get(lt) != 1:
                inv = 1 / r[lt]
                r = {t: v * inv for t, v in r.items()}
            out.append(r)
        out.sort(key=lambda v: self.order.key(*leading_term(v, self.order)))
        return out

    def leading_terms(self) -> List[Term]:
        self.run()
        return sorted({(el.comp, el.lexp) for el in self.elems if el.active})


def s_vector(f: Vec, g: Vec, order: ModuleOrder) -> Optional[Vec]:
    """S-vector of two module elements, or None when their leads lie in different components."""
    cf, ef = leading_term(f, order)
    cg, eg = leading_term(g, order)
    if cf != cg:
        return None
    l = _lcm(ef, eg)
    sv = vec_scale(f, 1 / f[(cf, ef)], _sub(l, ef))
    vec_add_scaled(sv, g, -1 / g[(cg, eg)], _sub(l, eg))
    return sv


def divide(f: Vec, divisors: Sequence[Vec], order: ModuleOrder) -> Tuple[List[Dict[Tuple[int, ...], Fraction]], Vec]:
    """Classical multivariate division; returns (quotients, remainder).

    The first divisor (in list order) whose leading term divides the current
    leading term is used.  Quotients are polynomials as ``{exp: coeff}``.
    """
    leads = [leading_term(g, order) if g else None for g in divisors]
    q: List[Dict] = [dict() for _ in divisors]
    p = dict(f)
    rem: Vec = {}
    while p:
        c, e = leading_term(p, order)
        coeff = p[(c, e)]
        for i, lt in enumerate(leads):
            if lt is not None and lt[0] == c and _divides(lt[1], e):
                g = divisors[i]
                factor = coeff / g[lt]
                shift = _sub(e, lt[1])
                q[i][shift] = q[i].get(shift, 0) + factor
                vec_add_scaled(p, g, -factor, shift)
                break
        else:
            rem[(c, e)] = p.pop((c, e))
    return [{k: v for k, v in qi.items() if v} for qi in q], rem
