"""Exact arithmetic kernel: truncated polynomials over Q and dense matrices.

The coefficient ring is k[x_1..x_N] / (monomials of total degree >= bound)
with k = Q.  Everything is immutable after construction and every operation
is a pure function, so concurrent reads are safe and reruns are bit-identical.
No floating point exists anywhere in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

Exponent = Tuple[int, ...]


class RingMismatch(ValueError):
    """Operands do not share variables and truncation bound."""


class DimensionMismatch(ValueError):
    """Matrix/vector shapes are incompatible."""


def fraction_to_str(x: Fraction) -> str:
    """Canonical "p/q" with q > 0 and gcd(p, q) = 1."""
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def fraction_from_str(s: str) -> Fraction:
    return Fraction(s)


@dataclass(frozen=True)
class RingContext:
    """Shared context: ordered variables plus the total-degree bound."""

    variables: Tuple[str, ...]
    bound: int

    def __post_init__(self):
        if self.bound < 1:
            raise ValueError("bound must be positive")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")

    @property
    def nvars(self) -> int:
        return len(self.variables)

    def zero_exp(self) -> Exponent:
        return (0,) * self.nvars


class TruncPoly:
    """Polynomial with exact rational coefficients, truncated by total degree.

    coeffs maps exponent tuples (total degree < bound) to nonzero Fractions.
    """

    __slots__ = ("ctx", "coeffs", "_key")

    def __init__(self, ctx: RingContext, coeffs: Dict[Exponent, Fraction]):
        clean: Dict[Exponent, Fraction] = {}
        for exp, c in coeffs.items():
            c = Fraction(c)
            if c == 0:
                continue
            if len(exp) != ctx.nvars:
                raise ValueError(f"exponent {exp} has wrong arity")
            if any(e < 0 for e in exp):
                raise ValueError(f"negative exponent in {exp}")
            if sum(exp) >= ctx.bound:
                continue
            clean[exp] = c
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "coeffs", clean)
        object.__setattr__(self, "_key", tuple(sorted(clean.items())))

    def __setattr__(self, *a):  # immutable
        raise AttributeError("TruncPoly is immutable")

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(ctx: RingContext) -> "TruncPoly":
        return TruncPoly(ctx, {})

    @staticmethod
    def const(ctx: RingContext, c) -> "TruncPoly":
        return TruncPoly(ctx, {ctx.zero_exp(): Fraction(c)})

    @staticmethod
    def variable(ctx: RingContext, name: str) -> "TruncPoly":
        i = ctx.variables.index(name)
        exp = [0] * ctx.nvars
        exp[i] = 1
        return TruncPoly(ctx, {tuple(exp): Fraction(1)})

    @staticmethod
    def monomial(ctx: RingContext, exp: Sequence[int], c=1) -> "TruncPoly":
        return TruncPoly(ctx, {tuple(exp): Fraction(c)})

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def total_degree(self) -> int:
        """Max total degree of stored monomials (0 for the zero polynomial)."""
        return max((sum(e) for e in self.coeffs), default=0)

    def constant_term(self) -> Fraction:
        return self.coeffs.get(self.ctx.zero_exp(), Fraction(0))

    def __eq__(self, other) -> bool:
        return (isinstance(other, TruncPoly) and self.ctx == other.ctx
                and self._key == other._key)

    def __hash__(self) -> int:
        return hash((self.ctx, self._key))

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for exp, c in sorted(self.coeffs.items()):
            mon = "*".join(f"{v}^{e}" for v, e in zip(self.ctx.variables, exp) if e)
            parts.append(f"{c}" + (f"*{mon}" if mon else ""))
        return " + ".join(parts)

    def _check(self, other: "TruncPoly") -> None:
        if self.ctx != other.ctx:
            raise RingMismatch(f"ring contexts differ: {self.ctx} vs {other.ctx}")

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "TruncPoly") -> "TruncPoly":
        self._check(other)
        out = dict(self.coeffs)
        for exp, c in other.coeffs.items():
            out[exp] = out.get(exp, Fraction(0)) + c
        return TruncPoly(self.ctx, out)

    def __neg__(self) -> "TruncPoly":
        return TruncPoly(self.ctx, {e: -c for e, c in self.coeffs.items()})

    def __sub__(self, other: "TruncPoly") -> "TruncPoly":
        return self + (-other)

    def __mul__(self, other: "TruncPoly") -> "TruncPoly":
        self._check(other)
        bound = self.ctx.bound
        out: Dict[Exponent, Fraction] = {}
        for ea, ca in self.coeffs.items():
            da = sum(ea)
            for eb, cb in other.coeffs.items():
                if da + sum(eb) >= bound:
                    continue
                exp = tuple(x + y for x, y in zip(ea, eb))
                out[exp] = out.get(exp, Fraction(0)) + ca * cb
        return TruncPoly(self.ctx, out)

    def scale(self, c) -> "TruncPoly":
        c = Fraction(c)
        return TruncPoly(self.ctx, {e: c * v for e, v in self.coeffs.items()})

    def derivative(self, var: int = 0) -> "TruncPoly":
        out: Dict[Exponent, Fraction] = {}
        for exp, c in self.coeffs.items():
            if exp[var] == 0:
                continue
            nexp = list(exp)
            nexp[var] -= 1
            out[tuple(nexp)] = out.get(tuple(nexp), Fraction(0)) + c * exp[var]
        return TruncPoly(self.ctx, out)

    def inverse(self) -> "TruncPoly":
        """Multiplicative inverse of a unit (nonzero constant term)."""
        c0 = self.constant_term()
        if c0 == 0:
            raise ValueError("not a unit in the truncated ring")
        # u = c0(1 + m) with ord(m) > 0; invert by the finite geometric series
        m = TruncPoly(self.ctx, {e: c / c0 for e, c in self.coeffs.items()
                                 if sum(e) > 0})
        acc = TruncPoly.const(self.ctx, 1)
        term = TruncPoly.const(self.ctx, 1)
        sign = 1
        for _ in range(1, self.ctx.bound):
            term = term * m
            sign = -sign
            if term.is_zero():
                break
            acc = acc + term.scale(sign)
        return acc.scale(Fraction(1) / c0)

    def coefficient(self, exp: Sequence[int]) -> Fraction:
        return self.coeffs.get(tuple(exp), Fraction(0))

    # -- serialization ------------------------------------------------------

    def to_doc(self) -> List[dict]:
        return [{"exponents": list(exp), "coeff": fraction_to_str(c)}
                for exp, c in sorted(self.coeffs.items())]

    @staticmethod
    def from_doc(ctx: RingContext, doc: Iterable[dict]) -> "TruncPoly":
        coeffs = {tuple(t["exponents"]): fraction_from_str(t["coeff"]) for t in doc}
        return TruncPoly(ctx, coeffs)


def poly_mul_trunc(a: TruncPoly, b: TruncPoly) -> TruncPoly:
    """Product in the truncated ring (monomials of degree >= bound dropped)."""
    return a * b


class PolyMatrix:
    """Dense matrix of TruncPoly entries sharing one ring context."""

    __slots__ = ("ctx", "rows", "cols", "entries")

    def __init__(self, ctx: RingContext, entries: Sequence[Sequence[TruncPoly]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        for row in entries:
            if len(row) != cols:
                raise DimensionMismatch("ragged rows")
            for p in row:
                if p.ctx != ctx:
                    raise RingMismatch("entry from a different ring context")
        object.__setattr__(self, "ctx", ctx)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(tuple(row) for row in entries))

    def __setattr__(self, *a):
        raise AttributeError("PolyMatrix is immutable")

    @staticmethod
    def zero(ctx: RingContext, rows: int, cols: int) -> "PolyMatrix":
        z = TruncPoly.zero(ctx)
        return PolyMatrix(ctx, [[z] * cols for _ in range(rows)])

    @staticmethod
    def identity(ctx: RingContext, n: int) -> "PolyMatrix":
        one = TruncPoly.const(ctx, 1)
        z = TruncPoly.zero(ctx)
        return PolyMatrix(ctx, [[one if i == j else z for j in range(n)]
                                for i in range(n)])

    @staticmethod
    def from_scalars(ctx: RingContext, grid: Sequence[Sequence]) -> "PolyMatrix":
        """Build from raw polynomials given as {exp: coeff} dicts or TruncPoly."""
        rows = []
        for row in grid:
            out = []
            for cell in row:
                if isinstance(cell, TruncPoly):
                    out.append(cell)
                else:
                    out.append(TruncPoly(ctx, cell))
            rows.append(out)
        return PolyMatrix(ctx, rows)

    def __eq__(self, other) -> bool:
        return (isinstance(other, PolyMatrix) and self.ctx == other.ctx
                and self.entries == other.entries)

    def __hash__(self):
        return hash((self.ctx, self.entries))

    def __repr__(self):
        body = "; ".join(", ".join(repr(p) for p in row) for row in self.entries)
        return f"PolyMatrix[{body}]"

    def __add__(self, other: "PolyMatrix") -> "PolyMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise DimensionMismatch("shape mismatch in addition")
        return PolyMatrix(self.ctx, [[a + b for a, b in zip(r1, r2)]
                                     for r1, r2 in zip(self.entries, other.entries)])

    def __neg__(self) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[-p for p in row] for row in self.entries])

    def __sub__(self, other: "PolyMatrix") -> "PolyMatrix":
        return self + (-other)

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch(
                f"cannot multiply {self.rows}x{self.cols} by {other.rows}x{other.cols}")
        z = TruncPoly.zero(self.ctx)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = z
                for k in range(self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(self.ctx, out)

    def scale(self, c) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[p.scale(c) for p in row] for row in self.entries])

    def scale_poly(self, p: TruncPoly) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[p * q for q in row] for row in self.entries])

    def is_zero(self) -> bool:
        return all(p.is_zero() for row in self.entries for p in row)

    def trace(self) -> TruncPoly:
        if self.rows != self.cols:
            raise DimensionMismatch("trace of a non-square matrix")
        acc = TruncPoly.zero(self.ctx)
        for i in range(self.rows):
            acc = acc + self.entries[i][i]
        return acc

    def derivative(self, var: int = 0) -> "PolyMatrix":
        return PolyMatrix(self.ctx, [[p.derivative(var) for p in row]
                                     for row in self.entries])

    def max_entry_degree(self) -> int:
        return max((p.total_degree() for row in self.entries for p in row
                    if not p.is_zero()), default=0)

    @staticmethod
    def block(ctx: RingContext, grid: Sequence[Sequence[Optional["PolyMatrix"]]],
              row_sizes: Sequence[int], col_sizes: Sequence[int]) -> "PolyMatrix":
        """Assemble a block matrix; None blocks are zero."""
        z = TruncPoly.zero(ctx)
        total_r, total_c = sum(row_sizes), sum(col_sizes)
        entries = [[z] * total_c for _ in range(total_r)]
        r0 = 0
        for bi, rs in enumerate(row_sizes):
            c0 = 0
            for bj, cs in enumerate(col_sizes):
                blk = grid[bi][bj]
                if blk is not None:
                    if (blk.rows, blk.cols) != (rs, cs):
                        raise DimensionMismatch("block size mismatch")
                    for i in range(rs):
                        for j in range(cs):
                            entries[r0 + i][c0 + j] = blk.entries[i][j]
                c0 += cs
            r0 += rs
        return PolyMatrix(ctx, entries)

    def to_doc(self) -> List[List[List[dict]]]:
        return [[p.to_doc() for p in row] for row in self.entries]

    @staticmethod
    def from_doc(ctx: RingContext, doc) -> "PolyMatrix":
        return PolyMatrix(ctx, [[TruncPoly.from_doc(ctx, cell) for cell in row]
                                for row in doc])


class RationalMatrix:
    """Dense exact rational matrix with deterministic echelon conventions."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: Optional[int] = None):
        rows = len(entries)
        if rows:
            cols = len(entries[0])
        elif cols is None:
            cols = 0
        grid = []
        for row in entries:
            if len(row) != cols:
                raise DimensionMismatch("ragged rows")
            grid.append(tuple(Fraction(x) for x in row))
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "entries", tuple(grid))

    def __setattr__(self, *a):
        raise AttributeError("RationalMatrix is immutable")

    @staticmethod
    def zero(rows: int, cols: int) -> "RationalMatrix":
        return RationalMatrix([[0] * cols for _ in range(rows)], cols=cols)

    @staticmethod
    def identity(n: int) -> "RationalMatrix":
        return RationalMatrix([[1 if i == j else 0 for j in range(n)]
                               for i in range(n)])

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.entries == other.entries

    def __hash__(self):
        return hash(self.entries)

    def __repr__(self):
        return f"RationalMatrix({[list(map(str, r)) for r in self.entries]})"

    def __mul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionMismatch("shape mismatch in multiplication")
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                row.append(sum((self.entries[i][k] * other.entries[k][j]
                                for k in range(self.cols)), Fraction(0)))
            out.append(row)
        return RationalMatrix(out)

    def apply(self, vec: Sequence[Fraction]) -> Tuple[Fraction, ...]:
        if len(vec) != self.cols:
            raise DimensionMismatch("vector length mismatch")
        return tuple(sum((self.entries[i][k] * Fraction(vec[k])
                          for k in range(self.cols)), Fraction(0))
                     for i in range(self.rows))

    def _rref(self) -> Tuple[List[List[Fraction]], List[int]]:
        """Reduced row echelon form; pivots are the first nonzero candidates
        scanning columns left to right (no pivot heuristics, so the result is
        deterministic)."""
        m = [list(row) for row in self.entries]
        pivots: List[int] = []
        r = 0
        for c in range(self.cols):
            pivot_row = None
            for i in range(r, self.rows):
                if m[i][c] != 0:
                    pivot_row = i
                    break
            if pivot_row is None:
                continue
            m[r], m[pivot_row] = m[pivot_row], m[r]
            pv = m[r][c]
            m[r] = [x / pv for x in m[r]]
            for i in range(self.rows):
                if i != r and m[i][c] != 0:
                    f = m[i][c]
                    m[i] = [a - f * b for a, b in zip(m[i], m[r])]
            pivots.append(c)
            r += 1
            if r == self.rows:
                break
        return m, pivots

    def rank(self) -> int:
        return len(self._rref()[1])

    def kernel_basis(self) -> List[Tuple[Fraction, ...]]:
        """Exact right-kernel basis, one vector per free column, ordered by
        free column index and sign-normalised (first nonzero coordinate > 0)."""
        m, pivots = self._rref()
        pivot_set = set(pivots)
        basis = []
        for free in range(self.cols):
            if free in pivot_set:
                continue
            v = [Fraction(0)] * self.cols
            v[free] = Fraction(1)
            for r, pc in enumerate(pivots):
                v[pc] = -m[r][free]
            for x in v:
                if x != 0:
                    if x < 0:
                        v = [-y for y in v]
                    break
            basis.append(tuple(v))
        return basis

    def solve(self, b: Sequence) -> Optional[Tuple[Fraction, ...]]:
        """One exact solution of M v = b (free variables zero), or None."""
        if len(b) != self.rows:
            raise DimensionMismatch("rhs length mismatch")
        aug = RationalMatrix([list(row) + [Fraction(bv)]
                              for row, bv in zip(self.entries, b)])
        m, pivots = aug._rref()
        if self.cols in pivots:
            return None  # inconsistent: pivot in the augmented column
        v = [Fraction(0)] * self.cols
        for r, pc in enumerate(pivots):
            v[pc] = m[r][self.cols]
        return tuple(v)

    def column_space_intersection_dim(self, other: "RationalMatrix") -> int:
        """dim(col(self) & col(other)); exact, used by hom-space quotients."""
        if self.rows != other.rows:
            raise DimensionMismatch("row count mismatch")
        joint = RationalMatrix([list(r1) + list(r2) for r1, r2 in
                                zip(self.entries, other.entries)])
        return self.rank() + other.rank() - joint.rank()


def mat_kernel_basis(m: RationalMatrix) -> List[Tuple[Fraction, ...]]:
    """Deterministic exact basis of the right kernel of m."""
    return m.kernel_basis()


def mat_solve(m: RationalMatrix, b: Sequence) -> Optional[Tuple[Fraction, ...]]:
    """One exact solution of m v = b, or None when unsolvable."""
    return m.solve(b)
