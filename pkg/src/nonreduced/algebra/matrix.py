"""Polynomial matrices and submodules of free modules.

A :class:`Matrix` with ``r`` rows stands for the map ``R^c -> R^r`` given by
left multiplication; its columns generate the image submodule of ``R^r``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .groebner import ModuleGB, Vec, divide
from .orders import DEGREVLEX, ModuleOrder, block_order
from .ring import Polynomial, Ring, RingMismatch


class NotInModule(ValueError):
    pass


class Matrix:
    """Immutable matrix of polynomials, stored row-major."""

    __slots__ = ("ring", "nrows", "ncols", "rows")

    def __init__(self, ring: Ring, rows: Sequence[Sequence[Polynomial]], ncols: Optional[int] = None):
        self.ring = ring
        self.rows: Tuple[Tuple[Polynomial, ...], ...] = tuple(tuple(r) for r in rows)
        self.nrows = len(self.rows)
        if ncols is None:
            ncols = len(self.rows[0]) if self.rows else 0
        self.ncols = ncols
        for r in self.rows:
            if len(r) != ncols:
                raise ValueError("ragged matrix")
            for p in r:
                if p.ring != ring:
                    raise RingMismatch(f"entry in {p.ring}, matrix over {ring}")

    # -- constructors --------------------------------------------------
    @classmethod
    def zero(cls, ring: Ring, nrows: int, ncols: int) -> "Matrix":
        z = ring.zero()
        return cls(ring, [[z] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, ring: Ring, n: int) -> "Matrix":
        z, o = ring.zero(), ring.one()
        return cls(ring, [[o if i == j else z for j in range(n)] for i in range(n)], n)

    @classmethod
    def from_columns(cls, ring: Ring, nrows: int, cols: Sequence[Sequence[Polynomial]]) -> "Matrix":
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(nrows)]
        return cls(ring, rows, len(cols))

    @classmethod
    def from_vecs(cls, ring: Ring, nrows: int, vecs: Sequence[Vec], offset: int = 0) -> "Matrix":
        cols = [vec_to_column(ring, v, nrows, offset) for v in vecs]
        return cls.from_columns(ring, nrows, cols)

    @classmethod
    def parse(cls, ring: Ring, rows: Sequence[Sequence[str]]) -> "Matrix":
        return cls(ring, [[ring.parse(s) if isinstance(s, str) else s for s in r] for r in rows])

    # -- access --------------------------------------------------------
    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def column(self, j: int) -> Tuple[Polynomial, ...]:
        return tuple(r[j] for r in self.rows)

    def columns(self) -> List[Tuple[Polynomial, ...]]:
        return [self.column(j) for j in range(self.ncols)]

    def col_vec(self, j: int, offset: int = 0) -> Vec:
        return column_to_vec(self.column(j), offset)

    def col_vecs(self, offset: int = 0) -> List[Vec]:
        return [self.col_vec(j, offset) for j in range(self.ncols)]

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def is_zero(self) -> bool:
        return all(p.is_zero() for r in self.rows for p in r)

    def __eq__(self, other):
        return isinstance(other, Matrix) and self.shape == other.shape and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    # -- algebra -------------------------------------------------------
    def __mul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} * {other.shape}")
        z = self.ring.zero()
        out = []
        for r in self.rows:
            row = []
            for j in range(other.ncols):
                acc = z
                for k, a in enumerate(r):
                    if a and other.rows[k][j]:
                        acc = acc + a * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return Matrix(self.ring, out, other.ncols)

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.ring, [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.ring, [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)], self.ncols)

    def scale(self, c) -> "Matrix":
        return Matrix(self.ring, [[a * c for a in r] for r in self.rows], self.ncols)

    def transpose(self) -> "Matrix":
        return Matrix(self.ring, [list(self.column(j)) for j in range(self.ncols)], self.nrows)

    T = property(transpose)

    def hstack(self, other: "Matrix") -> "Matrix":
        if self.nrows != other.nrows:
            raise ValueError("row mismatch")
        return Matrix(self.ring, [a + b for a, b in zip(self.rows, other.rows)], self.ncols + other.ncols)

    def vstack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column mismatch")
        return Matrix(self.ring, self.rows + other.rows, self.ncols)

    def select_columns(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, [[r[j] for j in idx] for r in self.rows], len(idx))

    def select_rows(self, idx: Sequence[int]) -> "Matrix":
        return Matrix(self.ring, [self.rows[i] for i in idx], self.ncols)

    def map(self, fn) -> "Matrix":
        return Matrix(self.ring, [[fn(a) for a in r] for r in self.rows], self.ncols)

    def column_degrees(self, row_shifts: Optional[Sequence[int]] = None) -> List[int]:
        out = []
        for j in range(self.ncols):
            d = None
            for i, r in enumerate(self.rows):
                if r[j]:
                    v = r[j].total_degree() + (row_shifts[i] if row_shifts else 0)
                    d = v if d is None else max(d, v)
            out.append(0 if d is None else d)
        return out

    def render(self) -> str:
        return "[" + "; ".join(", ".join(p.render() for p in r) for r in self.rows) + "]"

    def __repr__(self):
        return f"Matrix({self.nrows}x{self.ncols} {self.render()})"


# ---------------------------------------------------------------------------
# vector conversions


def column_to_vec(col: Sequence[Polynomial], offset: int = 0) -> Vec:
    v: Vec = {}
    for i, p in enumerate(col):
        for e, c in p.terms.items():
            v[(i + offset, e)] = c
    return v


def vec_to_column(ring: Ring, v: Vec, nrows: int, offset: int = 0) -> List[Polynomial]:
    parts: List[Dict] = [dict() for _ in range(nrows)]
    for (c, e), x in v.items():
        i = c - offset
        if 0 <= i < nrows:
            parts[i][e] = x
    return [Polynomial._raw(ring, d) for d in parts]


def split_vec(v: Vec, at: int) -> Tuple[Vec, Vec]:
    lo = {t: x for t, x in v.items() if t[0] < at}
    hi = {(t[0] - at, t[1]): x for t, x in v.items() if t[0] >= at}
    return lo, hi


# ---------------------------------------------------------------------------
# submodules


def image_gb(A: Matrix, order: Optional[ModuleOrder] = None, row_shifts=None) -> ModuleGB:
    """Gröbner basis of the column span of ``A``."""
    shifts = {i: s for i, s in enumerate(row_shifts)} if row_shifts else None
    gb = ModuleGB(A.ring.N, order or ModuleOrder(DEGREVLEX), shifts)
    gb.add_many(v for v in A.col_vecs() if v)
    return gb.run()


class LiftingGB:
    """Gröbner basis of the graph of ``A`` (columns ``(a_j, e_j)``) under an
    order eliminating the ``A``-components.

    Gives syzygies (elements with vanishing ``A``-part) and lifts of image
    elements (reduce ``(b, 0)`` until only tag terms remain).
    """

    def __init__(self, A: Matrix, row_shifts: Optional[Sequence[int]] = None):
        self.A = A
        r, c = A.shape
        self.r, self.c = r, c
        rs = list(row_shifts) if row_shifts else [0] * r
        self.col_degrees = A.column_degrees(rs)
        shifts = {i: rs[i] for i in range(r)}
        shifts.update({r + j: self.col_degrees[j] for j in range(c)})
        self.order = block_order([r, c], DEGREVLEX, "top")
        self.gb = ModuleGB(A.ring.N, self.order, shifts)
        vecs = []
        for j in range(c):
            v = A.col_vec(j)
            v[(r + j, (0,) * A.ring.N)] = Fraction(1)
            vecs.append(v)
        self.gb.add_many(vecs)
        self.gb.run()

    def syzygy_vecs(self) -> List[Vec]:
        out = []
        for v in self.gb.basis():
            if all(t[0] >= self.r for t in v):
                out.append({(t[0] - self.r, t[1]): x for t, x in v.items()})
        return out

    def lift_vec(self, b: Vec) -> Vec:
        rem = self.gb.reduce(b, full=True, stop_block=self.order.priority[0])
        main, tag = split_vec(rem, self.r)
        if main:
            raise NotInModule("vector not in the image")
        return {t: -x for t, x in tag.items()}


def syzygies(A: Matrix, row_shifts: Optional[Sequence[int]] = None, minimal: bool = True) -> Matrix:
    """Matrix whose columns generate ``ker(A: R^c -> R^r)``."""
    if A.ncols == 0:
        raise ValueError("syzygies of an empty matrix")
    lg = LiftingGB(A, row_shifts)
    vecs = lg.syzygy_vecs()
    if minimal:
        vecs = minimal_generators(vecs, A.ring.N, shifts=lg.col_degrees)
    return Matrix.from_vecs(A.ring, A.ncols, vecs)


def lift(A: Matrix, B: Matrix) -> Matrix:
    """``Q`` with ``A * Q == B``; raises :class:`NotInModule` otherwise."""
    if A.nrows != B.nrows:
        raise ValueError("row mismatch")
    if A.ncols == 0:
        if B.is_zero():
            return Matrix.zero(A.ring, 0, B.ncols)
        raise NotInModule("nonzero vector in the zero module")
    lg = LiftingGB(A)
    cols = [vec_to_column(A.ring, lg.lift_vec(B.col_vec(j)), A.ncols) for j in range(B.ncols)]
    return Matrix.from_columns(A.ring, A.ncols, cols)


def vec_degree(v: Vec, shifts: Optional[Sequence[int]] = None) -> int:
    if not v:
        return -1
    return max(sum(e) + (shifts[c] if shifts else 0) for c, e in v)


def minimal_generators(vecs: Sequence[Vec], nvars: int, shifts: Optional[Sequence[int]] = None,
                       order: Optional[ModuleOrder] = None) -> List[Vec]:
    """Greedy irredundant subset: process by increasing degree and keep a
    vector only when it is not in the span of those kept so far.

    For graded input this is a minimal generating set.
    """
    from .orders import ModuleOrder as _MO

    order = order or _MO(DEGREVLEX)
    sh = {i: s for i, s in enumerate(shifts)} if shifts else None
    gb = ModuleGB(nvars, order, sh)
    keyed = sorted(
        (v for v in vecs if v),
        key=lambda v: (vec_degree(v, shifts), len(v), sorted(order.key(*t) for t in v)),
    )
    kept = []
    for v in keyed:
        if gb.add(v):
            kept.append(v)
    return kept


def prune_columns(A: Matrix, row_shifts: Optional[Sequence[int]] = None) -> Matrix:
    vecs = minimal_generators(A.col_vecs(), A.ring.N, row_shifts)
    return Matrix.from_vecs(A.ring, A.nrows, vecs)


def in_image(A: Matrix, col: Sequence[Polynomial], gb: Optional[ModuleGB] = None) -> bool:
    gb = gb or image_gb(A)
    return gb.contains(column_to_vec(col))


def image_contains(A: Matrix, B: Matrix) -> bool:
    """im B ⊆ im A."""
    if B.ncols == 0:
        return True
    if A.ncols == 0:
        return B.is_zero()
    gb = image_gb(A)
    return all(gb.contains(B.col_vec(j)) for j in range(B.ncols))


def images_equal(A: Matrix, B: Matrix) -> bool:
    return image_contains(A, B) and image_contains(B, A)


# ---------------------------------------------------------------------------
# Bareiss elimination over the fraction field


def exact_div(a: Polynomial, b: Polynomial) -> Polynomial:
    if b.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if a.is_zero():
        return a
    if b.is_constant():
        return a * (1 / b.constant_term())
    qs, rem = divide(column_to_vec([a]), [column_to_vec([b])], ModuleOrder(DEGREVLEX))
    if rem:
        raise ArithmeticError(f"{b} does not divide {a}")
    return Polynomial(a.ring, qs[0])


def _choose_pivot(rows, col, start):
    best = None
    for i in range(start, len(rows)):
        p = rows[i][col]
        if p:
            cand = (len(p), p.total_degree(), i)
            if best is None or cand < best:
                best = cand
    return None if best is None else best[2]


def bareiss_echelon(M: Matrix) -> Tuple[List[List[Polynomial]], List[int]]:
    """Fraction-free row echelon form; returns rows and pivot columns.

    Every division performed is exact (Sylvester's identity), so all entries
    stay polynomial.
    """
    rows = [list(r) for r in M.rows]
    nr, nc = M.nrows, M.ncols
    prev = M.ring.one()
    pivots: List[int] = []
    r = 0
    for c in range(nc):
        if r >= nr:
            break
        piv = _choose_pivot(rows, c, r)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        p = rows[r][c]
        for i in range(r + 1, nr):
            a = rows[i][c]
            new = []
            for j in range(nc):
                if j < c:
                    new.append(rows[i][j])
                    continue
                val = p * rows[i][j] - a * rows[r][j]
                new.append(exact_div(val, prev) if val else val)
            rows[i] = new
        prev = p
        pivots.append(c)
        r += 1
    return rows, pivots


def rank_fraction_field(M: Matrix) -> int:
    if M.nrows == 0 or M.ncols == 0:
        return 0
    _, piv = bareiss_echelon(M)
    return len(piv)


def determinant(M: Matrix) -> Polynomial:
    if M.nrows != M.ncols:
        raise ValueError("square matrix required")
    n = M.nrows
    if n == 0:
        return M.ring.one()
    rows = [list(r) for r in M.rows]
    sign = 1
    prev = M.ring.one()
    for k in range(n - 1):
        if not rows[k][k]:
            sw = next((i for i in range(k + 1, n) if rows[i][k]), None)
            if sw is None:
                return M.ring.zero()
            rows[k], rows[sw] = rows[sw], rows[k]
            sign = -sign
        p = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                val = p * rows[i][j] - rows[i][k] * rows[k][j]
                rows[i][j] = exact_div(val, prev) if val else val
            rows[i][k] = M.ring.zero()
        prev = p
    return rows[n - 1][n - 1] * sign


def solve_fraction_free(A: Matrix, b: Sequence[Polynomial]) -> Optional[Tuple[Polynomial, List[Polynomial]]]:
    """Solve ``A x = b`` over Frac(R) without fractions.

    Returns ``(d, y)`` with ``d != 0`` and ``A y = d b`` (polynomial ``y``), or
    None when the system is inconsistent over the fraction field.
    """
    ring = A.ring
    aug = A.hstack(Matrix.from_columns(ring, A.nrows, [list(b)]))
    rows, piv = bareiss_echelon(aug)
    nc = A.ncols
    if nc in piv:
        return None
    piv = [c for c in piv if c < nc]
    den = ring.one()
    num = [ring.zero()] * nc
    for k in range(len(piv) - 1, -1, -1):
        row = rows[k]
        c = piv[k]
        acc = row[nc] * den
        for j in range(c + 1, nc):
            if row[j] and num[j]:
                acc = acc - row[j] * num[j]
        p = row[c]
        num = [x * p for x in num]
        den = den * p
        num[c] = acc
    return den, num
