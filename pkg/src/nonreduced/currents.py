"""Coleff–Herrera currents supported on ``{w = 0}`` in monomial form.

A term ``q * dx_L ^ dbar(1/w^(beta+1))`` stands for
``q dx_L ^ dbar(1/w_1^(beta_1+1)) ^ ... ^ dbar(1/w_k^(beta_k+1))``.  Constants
``(2 pi i)^k`` are normalized away, so pairing with a holomorphic ``psi``
returns the Taylor coefficient of ``w^beta`` in ``q psi``.

Multiplication by ``w_i^m`` lowers ``beta_i`` by ``m`` and kills the term when
``m > beta_i``; the canonical form therefore has coefficients in ``z`` only.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .algebra.ideal import Ideal
from .algebra.ring import ParseError, Polynomial, Ring, parse_polynomial
from .exterior import Form, Label, differential, parse_label, render_label, wedge_sign

Beta = Tuple[int, ...]
Key = Tuple[Label, Beta]


class CHExpression:
    """Finite sum of CH monomials; ``terms`` maps ``(label, beta)`` to a coefficient."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Optional[Iterable[Tuple[Polynomial, Label, Beta]]] = None,
                 canonical: bool = True):
        self.ring = ring
        raw: Dict[Key, Polynomial] = {}
        for q, L, beta in terms or ():
            if any(b < 0 for b in beta) or len(beta) != ring.kappa:
                raise ValueError(f"bad residue exponent {beta}")
            key = (tuple(L), tuple(beta))
            cur = raw.get(key)
            raw[key] = q if cur is None else cur + q
        self.terms = {k: v for k, v in raw.items() if v}
        if canonical:
            self.terms = _canonical(ring, self.terms)

    @classmethod
    def _from_dict(cls, ring: Ring, terms: Dict[Key, Polynomial]) -> "CHExpression":
        e = object.__new__(cls)
        e.ring = ring
        e.terms = terms
        return e

    @classmethod
    def monomial(cls, ring: Ring, beta: Beta, label: Label = (), coeff: Optional[Polynomial] = None):
        return cls(ring, [(coeff if coeff is not None else ring.one(), label, beta)])

    # -- algebra -------------------------------------------------------
    def normalize(self) -> "CHExpression":
        return CHExpression._from_dict(self.ring, _canonical(self.ring, self.terms))

    def is_canonical(self) -> bool:
        return all(not q.involves_w() for q in self.terms.values())

    def is_zero(self) -> bool:
        return not self.normalize().terms

    def __add__(self, other: "CHExpression") -> "CHExpression":
        t = dict(self.terms)
        for k, q in other.terms.items():
            v = t.get(k)
            v = q if v is None else v + q
            if v:
                t[k] = v
            else:
                t.pop(k, None)
        return CHExpression._from_dict(self.ring, t).normalize()

    def __neg__(self):
        return CHExpression._from_dict(self.ring, {k: -q for k, q in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def __eq__(self, other):
        if not isinstance(other, CHExpression):
            return NotImplemented
        return self.ring == other.ring and self.normalize().terms == other.normalize().terms

    def __hash__(self):
        return hash(frozenset(self.normalize().terms.items()))

    def mul(self, f: Polynomial) -> "CHExpression":
        """``f * e`` (shift rule applied)."""
        t = {k: q * f for k, q in self.terms.items()}
        return CHExpression._from_dict(self.ring, _canonical(self.ring, {k: v for k, v in t.items() if v}))

    def wedge_form(self, phi: Form) -> "CHExpression":
        """``phi ^ e``; the residue factors sit to the right of every form."""
        out: Dict[Key, Polynomial] = {}
        for K, a in phi.items():
            for (L, beta), q in self.terms.items():
                s, lab = wedge_sign(K, L)
                if not s:
                    continue
                key = (lab, beta)
                v = a * q * s
                cur = out.get(key)
                v = v if cur is None else cur + v
                if v:
                    out[key] = v
                else:
                    out.pop(key, None)
        return CHExpression._from_dict(self.ring, _canonical(self.ring, out))

    def degree(self) -> Optional[int]:
        degs = {len(L) for L, _ in self.terms}
        if len(degs) > 1:
            raise ValueError("mixed form degree")
        return degs.pop() if degs else None

    def labels(self) -> List[Label]:
        return sorted({L for L, _ in self.terms})

    def max_beta(self) -> Beta:
        k = self.ring.kappa
        out = [0] * k
        for _, beta in self.terms:
            out = [max(a, b) for a, b in zip(out, beta)]
        return tuple(out)

    # -- functionals ---------------------------------------------------
    def evaluate(self, psi: Polynomial) -> Form:
        """Pair with a holomorphic test function: for each label, the sum of
        ``q * (1/beta!) d^beta psi / dw^beta`` at ``w = 0``."""
        e = self.normalize()
        out: Form = {}
        for (L, beta), q in e.terms.items():
            v = q * psi.w_coefficient(beta)
            if v:
                cur = out.get(L)
                v = v if cur is None else cur + v
                if v:
                    out[L] = v
                else:
                    out.pop(L, None)
        return out

    def evaluate_scalar(self, psi: Polynomial) -> Polynomial:
        vals = self.evaluate(psi)
        acc = self.ring.zero()
        for v in vals.values():
            acc = acc + v
        return acc

    def project(self, alpha: Beta) -> Form:
        """Coefficient form of ``dbar(1/w^(alpha+1))``; a full ``dw`` factor is
        stripped from labels that contain it."""
        if any(a < 0 for a in alpha):
            raise ValueError("negative exponent")
        alpha = tuple(alpha)
        e = self.normalize()
        full = set(self.ring.w_indices)
        out: Form = {}
        seen: Dict[Label, Label] = {}
        for (L, beta), q in e.terms.items():
            if beta != alpha:
                continue
            K = tuple(i for i in L if i not in full) if full <= set(L) else L
            if K in seen and seen[K] != L:
                raise ValueError("projection of an expression of mixed degree")
            seen[K] = L
            out[K] = out[K] + q if K in out else q
        return {k: v for k, v in out.items() if v}

    def projections(self) -> Dict[Beta, Form]:
        out = {}
        for _, beta in self.normalize().terms:
            if beta not in out:
                out[beta] = self.project(beta)
        return out

    # -- text ----------------------------------------------------------
    def render(self) -> str:
        e = self.normalize()
        if not e.terms:
            return "0"
        parts = []
        for (L, beta) in sorted(e.terms, key=lambda k: (k[1], k[0])):
            q = e.terms[(L, beta)]
            items = [f"({q.render()})"]
            if L:
                items.append(render_label(self.ring, L))
            items.append(_render_residue(self.ring, beta))
            parts.append(" * ".join(items))
        return " + ".join(parts)

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"CHExpression({self.render()!r})"


def from_projections(ring: Ring, parts: Dict[Beta, Form], degree: int) -> CHExpression:
    """Inverse of :meth:`CHExpression.projections` for an expression of one form degree."""
    w = tuple(ring.w_indices)
    terms = []
    for beta, form in parts.items():
        for K, q in form.items():
            L = K
            if len(K) != degree:
                s, L = wedge_sign(K, w)
                q = q * s
            terms.append((q, L, beta))
    return CHExpression(ring, terms)


def _canonical(ring: Ring, terms: Dict[Key, Polynomial]) -> Dict[Key, Polynomial]:
    n = ring.n
    zpad = (0,) * ring.kappa
    out: Dict[Key, dict] = {}
    for (L, beta), q in terms.items():
        for e, c in q.terms.items():
            m = e[n:]
            nb = []
            for b, k in zip(beta, m):
                if k > b:
                    break
                nb.append(b - k)
            else:
                key = (L, tuple(nb))
                ze = e[:n] + zpad
                d = out.setdefault(key, {})
                s = d.get(ze, 0) + c
                if s:
                    d[ze] = s
                else:
                    del d[ze]
    return {k: Polynomial._raw(ring, d) for k, d in out.items() if d}


def _render_residue(ring: Ring, beta: Beta) -> str:
    parts = []
    for i, b in zip(ring.w_indices, beta):
        name = ring.variables[i]
        parts.append(f"dbar(1/{name})" if b == 0 else f"dbar(1/{name}^{b + 1})")
    return "^".join(parts)


def parse_ch(ring: Ring, text: str) -> CHExpression:
    """Parse the rendering produced by :meth:`CHExpression.render`."""
    text = text.strip()
    if text == "0":
        return CHExpression(ring, [])
    terms = []
    pos = 0
    while pos < len(text):
        while pos < len(text) and text[pos] in " +":
            pos += 1
        if pos >= len(text):
            break
        if text[pos] != "(":
            raise ParseError(f"expected '(' at column {pos + 1}", 1, pos + 1)
        depth, end = 0, pos
        for end in range(pos, len(text)):
            if text[end] == "(":
                depth += 1
            elif text[end] == ")":
                depth -= 1
                if depth == 0:
                    break
        q = parse_polynomial(ring, text[pos + 1:end], 1, pos + 2)
        pos = end + 1
        nxt = text.find(" + (", pos)
        chunk = text[pos:] if nxt < 0 else text[pos:nxt]
        pos = len(text) if nxt < 0 else nxt
        items = [s.strip() for s in chunk.split(" * ") if s.strip()]
        if not items or items[-1].startswith("*"):
            raise ParseError("missing residue factor", 1, pos + 1)
        L: Label = ()
        beta = None
        for it in items:
            it = it.lstrip("*").strip()
            if it.startswith("dbar("):
                beta = _parse_residue(ring, it)
            else:
                L = parse_label(ring, it)
        if beta is None:
            raise ParseError("missing residue factor", 1, pos + 1)
        terms.append((q, L, beta))
    return CHExpression(ring, terms)


def _parse_residue(ring: Ring, text: str) -> Beta:
    beta = [None] * ring.kappa
    for part in text.split("^dbar("):
        part = part.strip()
        if part.startswith("dbar("):
            part = part[5:]
        if not part.endswith(")") or not part.startswith("1/"):
            raise ParseError(f"malformed residue factor {text!r}")
        body = part[2:-1]
        name, _, exp = body.partition("^")
        if name not in ring.wvars:
            raise ParseError(f"unknown variable {name!r} in residue factor")
        k = ring.wvars.index(name)
        try:
            e = int(exp) if exp else 1
        except ValueError:
            raise ParseError(f"malformed exponent in {text!r}") from None
        if e < 1:
            raise ParseError(f"malformed exponent in {text!r}")
        beta[k] = e - 1
    if any(b is None for b in beta):
        raise ParseError("every w-variable needs a residue factor")
    return tuple(beta)


@dataclass
class AnnihilationReport:
    passed: bool
    witnesses: List[Tuple[str, str]] = field(default_factory=list)


def annihilation_test(e: CHExpression, J: Ideal, forms: Sequence[Form] = ()) -> AnnihilationReport:
    """Check ``g e = 0``, ``dg ^ e = 0`` for generators ``g`` of ``J`` and
    ``phi ^ e = 0`` for the given forms."""
    wit = []
    ring = e.ring
    for g in J.gens:
        if not e.mul(g).is_zero():
            wit.append(("J", g.render()))
        dg = differential(g)
        if dg and not e.wedge_form(dg).is_zero():
            wit.append(("dJ", g.render()))
    for phi in forms:
        if not e.wedge_form(phi).is_zero():
            from .exterior import render_form

            wit.append(("form", render_form(ring, phi)))
    return AnnihilationReport(not wit, wit)
