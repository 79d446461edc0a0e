"""Polynomial rings over Q with split variables (z; w) and their elements."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Iterator, Mapping, Sequence, Tuple, Union

Exp = Tuple[int, ...]
Coeff = Union[int, Fraction]


class RingMismatch(ValueError):
    pass


class ParseError(ValueError):
    """Polynomial/problem text could not be parsed.

    ``line`` and ``col`` are 1-based positions into the offending text.
    """

    def __init__(self, message: str, line: int = 1, col: int = 1):
        super().__init__(f"{message} (line {line}, column {col})")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Ring:
    """Q[z_1..z_n, w_1..w_k]; the z-variables come first in exponent vectors."""

    zvars: Tuple[str, ...]
    wvars: Tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "zvars", tuple(self.zvars))
        object.__setattr__(self, "wvars", tuple(self.wvars))
        names = self.zvars + self.wvars
        if not names:
            raise ValueError("a ring needs at least one variable")
        if len(set(names)) != len(names):
            raise ValueError(f"duplicate variable names in {names}")
        for name in names:
            if not re.fullmatch(r"[A-Za-z_][A-Za-z_0-9]*", name):
                raise ValueError(f"invalid variable name {name!r}")

    @property
    def variables(self) -> Tuple[str, ...]:
        return self.zvars + self.wvars

    @property
    def n(self) -> int:
        return len(self.zvars)

    @property
    def kappa(self) -> int:
        return len(self.wvars)

    @property
    def N(self) -> int:
        return len(self.zvars) + len(self.wvars)

    @property
    def w_indices(self) -> range:
        return range(self.n, self.N)

    @property
    def z_indices(self) -> range:
        return range(self.n)

    def index(self, name: str) -> int:
        try:
            return self.variables.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None

    def zero(self) -> "Polynomial":
        return Polynomial(self, {})

    def one(self) -> "Polynomial":
        return self.const(1)

    def const(self, c: Coeff) -> "Polynomial":
        return Polynomial(self, {(0,) * self.N: Fraction(c)})

    def var(self, name: str) -> "Polynomial":
        e = [0] * self.N
        e[self.index(name)] = 1
        return Polynomial(self, {tuple(e): Fraction(1)})

    def gens(self) -> Tuple["Polynomial", ...]:
        return tuple(self.var(v) for v in self.variables)

    def monomial(self, exp: Sequence[int], coeff: Coeff = 1) -> "Polynomial":
        exp = tuple(exp)
        if len(exp) != self.N or any(e < 0 for e in exp):
            raise ValueError(f"bad exponent vector {exp}")
        return Polynomial(self, {exp: Fraction(coeff)})

    def parse(self, text: str) -> "Polynomial":
        return parse_polynomial(self, text)

    def z_subring(self) -> "Ring":
        """The coordinate ring of Z; variables keep their names."""
        return Ring(self.zvars, ())

    def __str__(self) -> str:
        return f"QQ[{', '.join(self.zvars)}; {', '.join(self.wvars)}]"


class Polynomial:
    """Immutable sparse polynomial: exponent vector -> nonzero Fraction."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring: Ring, terms: Mapping[Exp, Coeff]):
        self.ring = ring
        self.terms: Dict[Exp, Fraction] = {
            e: Fraction(c) for e, c in terms.items() if c != 0
        }
        self._hash = None

    @classmethod
    def _raw(cls, ring: Ring, terms: Dict[Exp, Fraction]) -> "Polynomial":
        # trusted constructor: caller guarantees nonzero Fraction coefficients
        p = object.__new__(cls)
        p.ring = ring
        p.terms = terms
        p._hash = None
        return p

    # -- basic queries -------------------------------------------------
    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.N, Fraction(0))

    def total_degree(self) -> int:
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def w_degree(self) -> int:
        n = self.ring.n
        if not self.terms:
            return -1
        return max(sum(e[n:]) for e in self.terms)

    def is_homogeneous(self) -> bool:
        return len({sum(e) for e in self.terms}) <= 1

    def involves_w(self) -> bool:
        n = self.ring.n
        return any(any(e[n:]) for e in self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __iter__(self) -> Iterator[Tuple[Exp, Fraction]]:
        return iter(self.terms.items())

    # -- arithmetic ----------------------------------------------------
    def _check(self, other: "Polynomial") -> None:
        if other.ring != self.ring:
            raise RingMismatch(f"{self.ring} vs {other.ring}")

    def _coerce(self, other) -> "Polynomial":
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t = dict(self.terms)
        for e, c in other.terms.items():
            v = t.get(e, 0) + c
            if v:
                t[e] = v
            else:
                t.pop(e, None)
        return Polynomial._raw(self.ring, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial._raw(self.ring, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return self.ring.zero()
            c0 = Fraction(other)
            return Polynomial._raw(self.ring, {e: c * c0 for e, c in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        t: Dict[Exp, Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                v = t.get(e, 0) + c1 * c2
                if v:
                    t[e] = v
                else:
                    t.pop(e, None)
        return Polynomial._raw(self.ring, t)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroDivisionError("division by zero")
            return self * (Fraction(1) / Fraction(other))
        return NotImplemented

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative exponent")
        result = self.ring.one()
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def mul_term(self, exp: Exp, coeff: Coeff = 1) -> "Polynomial":
        c0 = Fraction(coeff)
        if not c0:
            return self.ring.zero()
        return Polynomial._raw(
            self.ring,
            {tuple(a + b for a, b in zip(e, exp)): c * c0 for e, c in self.terms.items()},
        )

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.ring == other.ring and self.terms == other.terms
        if isinstance(other, (int, Fraction)):
            if other == 0:
                return not self.terms
            return self.terms == {(0,) * self.ring.N: Fraction(other)}
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, frozenset(self.terms.items())))
        return self._hash

    # -- calculus ------------------------------------------------------
    def diff(self, var: Union[int, str], k: int = 1) -> "Polynomial":
        i = self.ring.index(var) if isinstance(var, str) else var
        t: Dict[Exp, Fraction] = {}
        for e, c in self.terms.items():
            if e[i] >= k:
                f = 1
                for j in range(k):
                    f *= e[i] - j
                ne = list(e)
                ne[i] -= k
                t[tuple(ne)] = c * f
        return Polynomial._raw(self.ring, t)

    def w_coefficient(self, beta: Sequence[int]) -> "Polynomial":
        """Coefficient of w^beta, as a w-free polynomial of the same ring."""
        n = self.ring.n
        beta = tuple(beta)
        zeros = (0,) * len(beta)
        t = {e[:n] + zeros: c for e, c in self.terms.items() if e[n:] == beta}
        return Polynomial._raw(self.ring, t)

    def taylor_coefficient(self, beta: Sequence[int]) -> "Polynomial":
        """(1/beta!) d^beta/dw^beta restricted to w = 0, via derivatives."""
        p = self
        for j, b in zip(self.ring.w_indices, beta):
            p = p.diff(j, b)
        p = p.restrict_w0()
        denom = 1
        for b in beta:
            denom *= factorial(b)
        return p / denom

    def restrict_w0(self) -> "Polynomial":
        n = self.ring.n
        t = {e: c for e, c in self.terms.items() if not any(e[n:])}
        return Polynomial._raw(self.ring, t)

    def truncate_w(self, m: int) -> "Polynomial":
        """Drop all terms of w-degree >= m."""
        n = self.ring.n
        t = {e: c for e, c in self.terms.items() if sum(e[n:]) < m}
        return Polynomial._raw(self.ring, t)

    def evaluate(self, values: Mapping[str, Coeff]) -> "Polynomial":
        """Substitute rational values for some variables."""
        idx = {self.ring.index(k): Fraction(v) for k, v in values.items()}
        t: Dict[Exp, Fraction] = {}
        for e, c in self.terms.items():
            coeff = c
            ne = list(e)
            for i, v in idx.items():
                if ne[i]:
                    coeff *= v ** ne[i]
                    ne[i] = 0
            if coeff:
                key = tuple(ne)
                s = t.get(key, 0) + coeff
                if s:
                    t[key] = s
                else:
                    t.pop(key, None)
        return Polynomial._raw(self.ring, t)

    def change_ring(self, ring: Ring) -> "Polynomial":
        """Re-embed into a ring sharing variable names (missing ones must not occur)."""
        src = self.ring.variables
        pos = []
        for i, name in enumerate(src):
            pos.append(ring.variables.index(name) if name in ring.variables else None)
        t: Dict[Exp, Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * ring.N
            for i, a in enumerate(e):
                if a:
                    if pos[i] is None:
                        raise RingMismatch(f"variable {src[i]} not in {ring}")
                    ne[pos[i]] = a
            t[tuple(ne)] = c
        return Polynomial._raw(ring, t)

    # -- rendering -----------------------------------------------------
    def render(self, order=None) -> str:
        from .orders import DEGREVLEX

        order = order or DEGREVLEX
        if not self.terms:
            return "0"
        names = self.ring.variables
        out = []
        for e in sorted(self.terms, key=order.key, reverse=True):
            c = self.terms[e]
            mono = "*".join(
                names[i] if a == 1 else f"{names[i]}^{a}" for i, a in enumerate(e) if a
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            elif a == 1:
                body = mono
            else:
                body = f"{a}*{mono}"
            out.append((sign, body))
        first_sign, first = out[0]
        s = ("-" if first_sign == "-" else "") + first
        for sign, body in out[1:]:
            s += f" {sign} {body}"
        return s

    def __str__(self):
        return self.render()

    def __repr__(self):
        return f"Polynomial({self.render()!r})"


# ---------------------------------------------------------------------------
# parsing

_TOKEN = re.compile(r"\s*(?:(\d+)|([A-Za-z_][A-Za-z_0-9]*)|(\*\*|[-+*/^()]))")


def _tokenize(text: str, line: int, col0: int):
    pos = 0
    tokens = []
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            j = pos
            while j < len(text) and text[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {text[j]!r}", line, col0 + j)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            tokens.append(("num", int(m.group(1)), col0 + start))
        elif m.group(2) is not None:
            tokens.append(("name", m.group(2), col0 + start))
        else:
            op = m.group(3)
            tokens.append(("op", "^" if op == "**" else op, col0 + start))
        pos = m.end()
    tokens.append(("end", None, col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, ring: Ring, text: str, line: int, col0: int):
        self.ring = ring
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.line = line

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ParseError(msg, self.line, tok[2])

    def parse(self) -> Polynomial:
        if self.peek()[0] == "end":
            raise self.error("empty polynomial")
        p = self.expr()
        if self.peek()[0] != "end":
            raise self.error(f"unexpected token {self.peek()[1]!r}")
        return p

    def expr(self) -> Polynomial:
        sign = 1
        if self.peek()[:2] == ("op", "-"):
            self.take()
            sign = -1
        elif self.peek()[:2] == ("op", "+"):
            self.take()
        p = self.term() * sign
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            t = self.term()
            p = p + t if op == "+" else p - t
        return p

    def term(self) -> Polynomial:
        p = self.factor()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()
            if op[1] == "*":
                p = p * self.factor()
            else:
                q = self.factor()
                if not q.is_constant() or q.is_zero():
                    raise self.error("division only by nonzero constants", op)
                p = p / q.constant_term()
        return p

    def factor(self) -> Polynomial:
        base = self.atom()
        if self.peek()[:2] == ("op", "^"):
            self.take()
            tok = self.peek()
            if tok[0] != "num":
                raise self.error("malformed exponent", tok)
            self.take()
            base = base ** tok[1]
        return base

    def atom(self) -> Polynomial:
        tok = self.take()
        kind, val, col = tok
        if kind == "num":
            return self.ring.const(val)
        if kind == "name":
            if val not in self.ring.variables:
                raise ParseError(f"unknown variable {val!r}", self.line, col)
            return self.ring.var(val)
        if kind == "op" and val == "(":
            p = self.expr()
            if self.peek()[:2] != ("op", ")"):
                raise self.error("expected ')'")
            self.take()
            return p
        if kind == "op" and val == "-":
            return -self.factor()
        raise ParseError(f"unexpected token {val!r}" if val else "unexpected end", self.line, col)


def parse_polynomial(ring: Ring, text: str, line: int = 1, col0: int = 1) -> Polynomial:
    """Parse ``text`` such as ``"z1*w2 - 3/2*w1^2"`` into a polynomial of ``ring``."""
    return _Parser(ring, text, line, col0).parse()


def polys(ring: Ring, texts: Iterable[str]) -> list:
    return [parse_polynomial(ring, t) for t in texts]
