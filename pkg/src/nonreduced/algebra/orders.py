"""Monomial orders on exponent vectors and term orders on free modules.

Every order is exposed through a ``key`` function: a larger key is a larger
monomial.  Keys are plain tuples of ints so they can be compared, cached and
negated component-wise (negation reverses the order, which the reducer's heap
relies on).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

Exp = Tuple[int, ...]


@dataclass(frozen=True)
class MonomialOrder:
    """``kind`` is ``"degrevlex"``, ``"lex"`` or ``"elim"``.

    For ``"elim"`` the first ``block`` variables form the eliminated block:
    any monomial involving them beats every monomial that does not.  Inside
    each block degrevlex breaks ties.
    """

    kind: str = "degrevlex"
    block: int = 0
    _cache: Dict[Exp, tuple] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in ("degrevlex", "lex", "elim"):
            raise ValueError(f"unknown monomial order {self.kind!r}")

    def key(self, e: Exp) -> tuple:
        k = self._cache.get(e)
        if k is None:
            k = self._cache[e] = self._key(e)
        return k

    def _key(self, e: Exp) -> tuple:
        if self.kind == "lex":
            return tuple(e)
        if self.kind == "degrevlex":
            return (sum(e),) + tuple(-x for x in reversed(e))
        a, b = e[: self.block], e[self.block :]
        return (sum(a),) + tuple(-x for x in reversed(a)) + (sum(b),) + tuple(-x for x in reversed(b))


DEGREVLEX = MonomialOrder("degrevlex")
LEX = MonomialOrder("lex")


def elimination(block: int) -> MonomialOrder:
    return MonomialOrder("elim", block)


@dataclass(frozen=True)
class ModuleOrder:
    """Term order on a free module with basis e_0, e_1, ...

    ``priority`` (optional) assigns each component a block weight compared
    before anything else; this is how elimination of a block of components is
    expressed (syzygy and lift computations put the original components in a
    higher block than the tag components).  Within a block the order is
    term-over-position (``"top"``) or position-over-term (``"pot"``); lower
    component indices are larger.
    """

    monomial: MonomialOrder = DEGREVLEX
    kind: str = "top"
    priority: Optional[Tuple[int, ...]] = None
    _cache: Dict[tuple, tuple] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def key(self, comp: int, e: Exp) -> tuple:
        ck = (comp, e)
        k = self._cache.get(ck)
        if k is None:
            pr = self.priority[comp] if self.priority is not None else 0
            mk = self.monomial.key(e)
            if self.kind == "top":
                k = (pr,) + mk + (-comp,)
            else:
                k = (pr, -comp) + mk
            self._cache[ck] = k
        return k


def block_order(sizes: Sequence[int], monomial: MonomialOrder = DEGREVLEX, kind: str = "top") -> ModuleOrder:
    """Module order whose first ``sizes[0]`` components dominate the next block, etc."""
    pr = []
    nblocks = len(sizes)
    for b, s in enumerate(sizes):
        pr.extend([nblocks - b] * s)
    return ModuleOrder(monomial, kind, tuple(pr))
