"""Exterior-algebra bookkeeping shared by forms and currents.

A label is an increasing tuple of variable indices (z-variables first, then
w-variables, as in :class:`~nonreduced.algebra.ring.Ring`) and stands for
``dx_{i1} ^ ... ^ dx_{ip}``.  Labels of one degree are ordered
lexicographically.
"""

from __future__ import annotations

import itertools
import re
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra.ring import ParseError, Polynomial, Ring

Label = Tuple[int, ...]
Form = Dict[Label, Polynomial]


def labels(nvars: int, p: int) -> List[Label]:
    if p < 0 or p > nvars:
        raise ValueError(f"form degree {p} out of range 0..{nvars}")
    return list(itertools.combinations(range(nvars), p))


def sort_sign(seq: Sequence[int]) -> Tuple[int, Label]:
    """Sign of the permutation sorting ``seq`` and the sorted tuple; sign 0 on repeats."""
    s = list(seq)
    if len(set(s)) != len(s):
        return 0, ()
    sign = 1
    # bubble sort counts transpositions; labels are tiny
    for i in range(len(s)):
        for j in range(len(s) - 1 - i):
            if s[j] > s[j + 1]:
                s[j], s[j + 1] = s[j + 1], s[j]
                sign = -sign
    return sign, tuple(s)


def wedge_sign(a: Label, b: Label) -> Tuple[int, Label]:
    """``dx_a ^ dx_b = sign * dx_c``."""
    return sort_sign(tuple(a) + tuple(b))


def complement(L: Label, nvars: int) -> Label:
    return tuple(i for i in range(nvars) if i not in L)


def form_zero(ring: Ring) -> Form:
    return {}


def form_add(a: Form, b: Form, scale=1) -> Form:
    out = dict(a)
    for L, p in b.items():
        v = out.get(L)
        v = p * scale if v is None else v + p * scale
        if v:
            out[L] = v
        else:
            out.pop(L, None)
    return out


def form_scale(a: Form, q: Polynomial) -> Form:
    out = {}
    for L, p in a.items():
        v = p * q
        if v:
            out[L] = v
    return out


def wedge(a: Form, b: Form) -> Form:
    out: Form = {}
    for La, pa in a.items():
        for Lb, pb in b.items():
            s, L = wedge_sign(La, Lb)
            if s:
                v = pa * pb * s
                cur = out.get(L)
                v = v if cur is None else cur + v
                if v:
                    out[L] = v
                else:
                    out.pop(L, None)
    return out


def differential(g: Polynomial) -> Form:
    out: Form = {}
    for i in range(g.ring.N):
        d = g.diff(i)
        if d:
            out[(i,)] = d
    return out


def form_to_column(f: Form, basis: Sequence[Label], ring: Ring) -> List[Polynomial]:
    z = ring.zero()
    idx = {L: k for k, L in enumerate(basis)}
    col = [z] * len(basis)
    for L, p in f.items():
        col[idx[L]] = p
    return col


def column_to_form(col: Sequence[Polynomial], basis: Sequence[Label]) -> Form:
    return {L: p for L, p in zip(basis, col) if p}


def form_degree(f: Form) -> Optional[int]:
    degs = {len(L) for L in f}
    if len(degs) > 1:
        raise ValueError("form of mixed degree")
    return degs.pop() if degs else None


def split_label(ring: Ring, L: Label) -> Tuple[Label, Label]:
    """1-based z- and w-indices occurring in ``L``."""
    n = ring.n
    return tuple(i + 1 for i in L if i < n), tuple(i - n + 1 for i in L if i >= n)


def render_label(ring: Ring, L: Label, style: str = "compact") -> str:
    """``compact``: ``dz[1,2]^dw[1]``; ``names``: ``dz1^dz2^dw1`` with actual names."""
    if not L:
        return "1"
    if style == "names":
        return "^".join("d" + ring.variables[i] for i in L)
    zs, ws = split_label(ring, L)
    parts = []
    if zs:
        parts.append("dz[" + ",".join(map(str, zs)) + "]")
    if ws:
        parts.append("dw[" + ",".join(map(str, ws)) + "]")
    return "^".join(parts)


_LABEL_PART = re.compile(r"d([zw])\[(\d+(?:,\d+)*)\]$")


def parse_label(ring: Ring, text: str) -> Label:
    """Inverse of the compact rendering (also accepts ``dz1^dw2`` with real names)."""
    text = text.strip()
    if text == "1":
        return ()
    idx: List[int] = []
    for part in text.split("^"):
        part = part.strip()
        m = _LABEL_PART.match(part)
        if m:
            kind, nums = m.groups()
            base = 0 if kind == "z" else ring.n
            limit = ring.n if kind == "z" else ring.kappa
            for s in nums.split(","):
                k = int(s)
                if not 1 <= k <= limit:
                    raise ParseError(f"form index {k} out of range in {part!r}")
                idx.append(base + k - 1)
        elif part.startswith("d") and part[1:] in ring.variables:
            idx.append(ring.index(part[1:]))
        else:
            raise ParseError(f"malformed form label {part!r}")
    sign, L = sort_sign(idx)
    if sign != 1:
        raise ParseError(f"form label {text!r} is not in increasing order")
    return L


def render_form(ring: Ring, f: Form) -> str:
    if not f:
        return "0"
    parts = []
    for L in sorted(f):
        parts.append(f"({f[L].render()})*{render_label(ring, L)}")
    return " + ".join(parts)
