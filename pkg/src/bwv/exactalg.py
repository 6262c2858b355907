"""Exact arithmetic foundation.

Big rationals, dense univariate polynomials, normalized rational functions,
exact dense linear algebra with fraction-free (Bareiss) elimination,
Bernoulli numbers, extended binomial conventions, a differential-operator
algebra in right-normal form, and truncated bivariate series.

Conventions
-----------
* ``ExactScalar`` is :class:`fractions.Fraction`: arbitrary-size rationals
  with gcd-reduced representation and positive denominator.
* ``UniPoly`` stores dense coefficients from degree 0 upward with no
  trailing zeros; the zero polynomial has an empty coefficient tuple.
* ``RatFunc`` keeps ``gcd(num, den) = 1`` and ``den`` monic after every
  operation.
* ``DiffOp`` is Σ_j c_j(x)·D^j with rational-function coefficients, all
  D's pushed to the right (right-normal form).
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb, gcd
from typing import Iterable, Sequence, Union

__all__ = [
    "ExactScalar",
    "UniPoly",
    "RatFunc",
    "ExactMatrix",
    "DiffOp",
    "TruncBiSeries",
    "bernoulli",
    "binom_ext",
    "recip_fact_ext",
    "exact_det",
    "exact_inverse",
    "ratfunc_value_or_limit",
    "diffop_compose",
    "diffop_scale_mul",
    "diffop_poly_of",
    "diffop_adjoint",
    "series_apply",
]

ExactScalar = Fraction

ScalarLike = Union[int, Fraction]


# ---------------------------------------------------------------------------
# Bernoulli numbers and extended binomial conventions
# ---------------------------------------------------------------------------

_BERNOULLI_CACHE: list[Fraction] = [Fraction(1)]
_BERNOULLI_LOCK = threading.Lock()


def bernoulli(n: int) -> Fraction:
    """Bernoulli number B_n under the generating function t/(e^t - 1).

    In this convention B_1 = -1/2.  Values are memoized; the memo table is
    extended under a lock so concurrent callers are safe.
    """
    if n < 0:
        raise ValueError("Bernoulli index must be non-negative")
    if n < len(_BERNOULLI_CACHE):
        return _BERNOULLI_CACHE[n]
    with _BERNOULLI_LOCK:
        # Defining recurrence: sum_{k=0}^{m} C(m+1, k) B_k = 0 for m >= 1.
        while len(_BERNOULLI_CACHE) <= n:
            m = len(_BERNOULLI_CACHE)
            acc = Fraction(0)
            for k in range(m):
                acc += comb(m + 1, k) * _BERNOULLI_CACHE[k]
            _BERNOULLI_CACHE.append(-acc / (m + 1))
    return _BERNOULLI_CACHE[n]


def binom_ext(n: int, k: int) -> Fraction:
    """Binomial coefficient C(n, k) with C(n, k) = 0 for k outside [0, n].

    Negative upper index is rejected: it is never needed and silently
    accepting it would mask index bugs.
    """
    if n < 0:
        raise ValueError("binom_ext requires a non-negative upper index")
    if k < 0 or k > n:
        return Fraction(0)
    return Fraction(comb(n, k))


_FACT_CACHE: dict[int, int] = {0: 1}


def _factorial(n: int) -> int:
    if n not in _FACT_CACHE:
        _FACT_CACHE[n] = n * _factorial(n - 1)
    return _FACT_CACHE[n]


def recip_fact_ext(n: int) -> Fraction:
    """1/n! for n >= 0 and 0 for negative n (the reciprocal-factorial
    convention used throughout the matrix entry formulas)."""
    if n < 0:
        return Fraction(0)
    return Fraction(1, _factorial(n))


# ---------------------------------------------------------------------------
# Dense univariate polynomials over Q
# ---------------------------------------------------------------------------


def _as_fraction(x: ScalarLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to an exact scalar")


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial over Q, coefficients from degree 0 up."""

    var: str
    coeffs: tuple[Fraction, ...]

    @staticmethod
    def of(var: str, coeffs: Iterable[ScalarLike]) -> "UniPoly":
        cs = [_as_fraction(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return UniPoly(var, tuple(cs))

    @staticmethod
    def zero(var: str) -> "UniPoly":
        return UniPoly(var, ())

    @staticmethod
    def const(var: str, c: ScalarLike) -> "UniPoly":
        return UniPoly.of(var, [c])

    @staticmethod
    def x(var: str) -> "UniPoly":
        return UniPoly.of(var, [0, 1])

    # -- basic queries ------------------------------------------------------

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.coeffs) - 1

    @property
    def leading(self) -> Fraction:
        if self.is_zero:
            return Fraction(0)
        return self.coeffs[-1]

    def coeff(self, k: int) -> Fraction:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return Fraction(0)

    def is_integral(self) -> bool:
        """True iff every coefficient is an integer."""
        return all(c.denominator == 1 for c in self.coeffs)

    # -- arithmetic ---------------------------------------------------------

    def _check_var(self, other: "UniPoly") -> None:
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other: "UniPoly | ScalarLike") -> "UniPoly":
        if not isinstance(other, UniPoly):
            other = UniPoly.const(self.var, other)
        self._check_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly.of(
            self.var, [self.coeff(i) + other.coeff(i) for i in range(n)]
        )

    __radd__ = __add__

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.var, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly | ScalarLike") -> "UniPoly":
        if not isinstance(other, UniPoly):
            other = UniPoly.const(self.var, other)
        return self + (-other)

    def __rsub__(self, other: ScalarLike) -> "UniPoly":
        return (-self) + other

    def __mul__(self, other: "UniPoly | ScalarLike") -> "UniPoly":
        if not isinstance(other, UniPoly):
            c = _as_fraction(other)
            return UniPoly.of(self.var, [c * a for a in self.coeffs])
        self._check_var(other)
        if self.is_zero or other.is_zero:
            return UniPoly.zero(self.var)
        out = [Fraction(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly.of(self.var, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative polynomial power")
        result = UniPoly.const(self.var, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        self._check_var(other)
        if other.is_zero:
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dlen = len(other.coeffs)
        qdeg = len(rem) - dlen
        if qdeg < 0:
            return UniPoly.zero(self.var), self
        quo = [Fraction(0)] * (qdeg + 1)
        dlc = other.leading
        for k in range(qdeg, -1, -1):
            c = rem[dlen - 1 + k] / dlc
            if c != 0:
                quo[k] = c
                for j, b in enumerate(other.coeffs):
                    rem[j + k] -= c * b
        return UniPoly.of(self.var, quo), UniPoly.of(self.var, rem[: dlen - 1])

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero:
            raise ValueError("exact_div: division is not exact")
        return q

    # -- gcd via primitive pseudo-remainder sequences ----------------------

    def _int_primitive(self) -> tuple[int, ...]:
        """Integer primitive part (content and sign of leading term removed)."""
        if self.is_zero:
            return ()
        den_lcm = 1
        for c in self.coeffs:
            den_lcm = den_lcm * c.denominator // gcd(den_lcm, c.denominator)
        ints = [int(c * den_lcm) for c in self.coeffs]
        content = 0
        for v in ints:
            content = gcd(content, v)
        if ints[-1] < 0:
            content = -content
        return tuple(v // content for v in ints)

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd, computed by a primitive PRS over the integers to keep
        coefficient growth under control."""
        self._check_var(other)
        if self.is_zero:
            return other.monic()
        if other.is_zero:
            return self.monic()
        a = list(self._int_primitive())
        b = list(other._int_primitive())
        if len(a) < len(b):
            a, b = b, a
        while b:
            # pseudo-remainder of a by b
            rem = [Fraction(c) for c in a]
            lc = Fraction(b[-1])
            while len(rem) >= len(b):
                c = rem[-1] / lc
                k = len(rem) - len(b)
                for j, bj in enumerate(b):
                    rem[j + k] -= c * bj
                rem.pop()
                while rem and rem[-1] == 0:
                    rem.pop()
            a, b = b, list(UniPoly.of(self.var, rem)._int_primitive())
        return UniPoly.of(self.var, a).monic()

    def lcm(self, other: "UniPoly") -> "UniPoly":
        if self.is_zero or other.is_zero:
            return UniPoly.zero(self.var)
        return self.exact_div(self.gcd(other)) * other

    def monic(self) -> "UniPoly":
        if self.is_zero:
            return self
        lc = self.leading
        return UniPoly(self.var, tuple(c / lc for c in self.coeffs))

    # -- calculus and evaluation -------------------------------------------

    def deriv(self, order: int = 1) -> "UniPoly":
        if order < 0:
            raise ValueError("negative derivative order")
        p = self
        for _ in range(order):
            p = UniPoly.of(
                p.var, [i * c for i, c in enumerate(p.coeffs)][1:]
            )
        return p

    def eval(self, x: ScalarLike) -> Fraction:
        x = _as_fraction(x)
        acc = Fraction(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def compose_poly(self, inner: "UniPoly") -> "UniPoly":
        """Substitute another polynomial for the variable."""
        acc = UniPoly.zero(inner.var)
        for c in reversed(self.coeffs):
            acc = acc * inner + c
        return acc

    def shift_mul(self, k: int) -> "UniPoly":
        """Multiply by var**k."""
        if self.is_zero:
            return self
        return UniPoly(self.var, (Fraction(0),) * k + self.coeffs)

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            if i == 0:
                parts.append(str(c))
            elif i == 1:
                parts.append(f"{c}*{self.var}")
            else:
                parts.append(f"{c}*{self.var}^{i}")
        return " + ".join(parts)


# ---------------------------------------------------------------------------
# Rational functions over Q
# ---------------------------------------------------------------------------


class RatFunc:
    """Quotient of univariate polynomials, kept reduced with monic
    denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num: UniPoly, den: UniPoly | None = None):
        if den is None:
            den = UniPoly.const(num.var, 1)
        if num.var != den.var:
            raise ValueError("variable mismatch in RatFunc")
        if den.is_zero:
            raise ZeroDivisionError("zero denominator in RatFunc")
        if num.is_zero:
            num = UniPoly.zero(num.var)
            den = UniPoly.const(num.var, 1)
        else:
            g = num.gcd(den)
            if g.degree > 0:
                num = num.exact_div(g)
                den = den.exact_div(g)
            lc = den.leading
            if lc != 1:
                num = num * (1 / lc)
                den = den.monic()
        self.num = num
        self.den = den

    # -- constructors -------------------------------------------------------

    @staticmethod
    def of(var: str, value: ScalarLike) -> "RatFunc":
        return RatFunc(UniPoly.const(var, value))

    @staticmethod
    def from_poly(p: UniPoly) -> "RatFunc":
        return RatFunc(p)

    @staticmethod
    def x(var: str) -> "RatFunc":
        return RatFunc(UniPoly.x(var))

    @property
    def var(self) -> str:
        return self.num.var

    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    def is_polynomial(self) -> bool:
        return self.den.degree == 0

    def as_poly(self) -> UniPoly:
        if not self.is_polynomial():
            raise ValueError("rational function is not a polynomial")
        return self.num

    def _coerce(self, other: "RatFunc | UniPoly | ScalarLike") -> "RatFunc":
        if isinstance(other, RatFunc):
            return other
        if isinstance(other, UniPoly):
            return RatFunc(other)
        return RatFunc.of(self.var, other)

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other) -> "RatFunc":
        o = self._coerce(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self) -> "RatFunc":
        r = RatFunc.__new__(RatFunc)
        r.num = -self.num
        r.den = self.den
        return r

    def __sub__(self, other) -> "RatFunc":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "RatFunc":
        return (-self) + other

    def __mul__(self, other) -> "RatFunc":
        o = self._coerce(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other) -> "RatFunc":
        o = self._coerce(other)
        if o.is_zero:
            raise ZeroDivisionError("division by zero rational function")
        return RatFunc(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other) -> "RatFunc":
        return self._coerce(other) / self

    def __pow__(self, n: int) -> "RatFunc":
        if n < 0:
            return RatFunc(self.den, self.num) ** (-n)
        return RatFunc(self.num**n, self.den**n)

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction, UniPoly)):
            other = self._coerce(other)
        if not isinstance(other, RatFunc):
            return NotImplemented
        return self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    # -- calculus and evaluation -------------------------------------------

    def deriv(self, order: int = 1) -> "RatFunc":
        f = self
        for _ in range(order):
            f = RatFunc(
                f.num.deriv() * f.den - f.num * f.den.deriv(),
                f.den * f.den,
            )
        return f

    def eval(self, x: ScalarLike) -> Fraction:
        x = _as_fraction(x)
        d = self.den.eval(x)
        if d == 0:
            raise ZeroDivisionError(f"pole at {x}")
        return self.num.eval(x) / d

    def __str__(self) -> str:
        if self.is_polynomial():
            return str(self.num)
        return f"({self.num})/({self.den})"

    def __repr__(self) -> str:
        return f"RatFunc({self})"


def ratfunc_value_or_limit(f: RatFunc, u0: ScalarLike) -> Fraction:
    """Evaluate a rational function at u0 on its reduced representative.

    Since RatFunc is always kept reduced, this is the removable-singularity
    limit; a genuine pole (denominator zero after cancellation) raises.
    """
    return f.eval(u0)


# ---------------------------------------------------------------------------
# Exact dense matrices
# ---------------------------------------------------------------------------

Entry = Union[Fraction, RatFunc]


class ExactMatrix:
    """Dense rectangular matrix with uniform entry ring: all entries are
    either ExactScalar (ring tag "Q") or RatFunc ("Q(<var>)")."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence[Entry | int]]):
        rows = len(entries)
        cols = len(entries[0]) if rows else 0
        norm: list[tuple[Entry, ...]] = []
        has_rat = any(
            isinstance(e, RatFunc) for row in entries for e in row
        )
        var = None
        if has_rat:
            for row in entries:
                for e in row:
                    if isinstance(e, RatFunc):
                        var = e.var
                        break
                if var:
                    break
        for row in entries:
            if len(row) != cols:
                raise ValueError("ragged matrix")
            out: list[Entry] = []
            for e in row:
                if has_rat:
                    if isinstance(e, RatFunc):
                        out.append(e)
                    elif isinstance(e, UniPoly):
                        out.append(RatFunc(e))
                    else:
                        out.append(RatFunc.of(var, e))
                else:
                    out.append(_as_fraction(e))
            norm.append(tuple(out))
        self.rows = rows
        self.cols = cols
        self.entries = tuple(norm)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def identity(n: int, var: str | None = None) -> "ExactMatrix":
        if var is None:
            return ExactMatrix(
                [[1 if i == j else 0 for j in range(n)] for i in range(n)]
            )
        one = RatFunc.of(var, 1)
        zero = RatFunc.of(var, 0)
        return ExactMatrix(
            [[one if i == j else zero for j in range(n)] for i in range(n)]
        )

    @staticmethod
    def zeros(rows: int, cols: int) -> "ExactMatrix":
        return ExactMatrix([[0] * cols for _ in range(rows)])

    @staticmethod
    def from_fn(rows: int, cols: int, fn) -> "ExactMatrix":
        """Entries from fn(a, b) with 1-based indices, matching the
        conventional index ranges of the matrix definitions."""
        return ExactMatrix(
            [[fn(a, b) for b in range(1, cols + 1)] for a in range(1, rows + 1)]
        )

    # -- queries ------------------------------------------------------------

    @property
    def ring(self) -> str:
        if self.rows == 0 or self.cols == 0:
            return "Q"
        e = self.entries[0][0]
        return f"Q({e.var})" if isinstance(e, RatFunc) else "Q"

    def __getitem__(self, idx: tuple[int, int]) -> Entry:
        i, j = idx
        return self.entries[i][j]

    def at(self, a: int, b: int) -> Entry:
        """1-based entry access."""
        return self.entries[a - 1][b - 1]

    @property
    def is_square(self) -> bool:
        return self.rows == self.cols

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if (self.rows, self.cols) != (other.rows, other.cols):
            return False
        for r1, r2 in zip(self.entries, other.entries):
            for a, b in zip(r1, r2):
                if isinstance(a, RatFunc) != isinstance(b, RatFunc):
                    a, b = _entry_pair_promote(a, b)
                if a != b:
                    return False
        return True

    def __hash__(self) -> int:
        return hash((self.rows, self.cols, self.entries))

    # -- arithmetic ---------------------------------------------------------

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch")
        return ExactMatrix(
            [
                [a + b for a, b in zip(r1, r2)]
                for r1, r2 in zip(self.entries, other.entries)
            ]
        )

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        return self + (-other)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix([[-e for e in row] for row in self.entries])

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError("shape mismatch in matrix product")
        if self.cols == 0:
            return ExactMatrix.zeros(self.rows, other.cols)
        out = []
        for i in range(self.rows):
            row = []
            for j in range(other.cols):
                acc = self.entries[i][0] * other.entries[0][j]
                for k in range(1, self.cols):
                    acc = acc + self.entries[i][k] * other.entries[k][j]
                row.append(acc)
            out.append(row)
        return ExactMatrix(out)

    def scale(self, c: Entry | int) -> "ExactMatrix":
        return ExactMatrix([[e * c for e in row] for row in self.entries])

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(
            [
                [self.entries[i][j] for i in range(self.rows)]
                for j in range(self.cols)
            ]
        )

    def map(self, fn) -> "ExactMatrix":
        return ExactMatrix([[fn(e) for e in row] for row in self.entries])

    def submatrix(self, row_idx: Sequence[int], col_idx: Sequence[int]) -> "ExactMatrix":
        """Submatrix from 1-based row/column index lists."""
        if not row_idx or not col_idx:
            return ExactMatrix.zeros(len(row_idx), len(col_idx))
        return ExactMatrix(
            [[self.at(a, b) for b in col_idx] for a in row_idx]
        )

    def eval(self, x: ScalarLike) -> "ExactMatrix":
        """Evaluate a Q(u) matrix entrywise (value-or-limit semantics)."""
        return ExactMatrix(
            [
                [e.eval(x) if isinstance(e, RatFunc) else e for e in row]
                for row in self.entries
            ]
        )

    def det(self) -> Entry:
        return exact_det(self)

    def inv(self) -> "ExactMatrix":
        return exact_inverse(self)

    def __str__(self) -> str:
        return "[" + ",\n ".join(
            "[" + ", ".join(str(e) for e in row) + "]" for row in self.entries
        ) + "]"

    __repr__ = __str__


def _entry_pair_promote(a: Entry, b: Entry) -> tuple[Entry, Entry]:
    if isinstance(a, RatFunc) and not isinstance(b, RatFunc):
        return a, RatFunc.of(a.var, b)
    if isinstance(b, RatFunc) and not isinstance(a, RatFunc):
        return RatFunc.of(b.var, a), b
    return a, b


# -- fraction-free elimination ----------------------------------------------


def _cleared_rows(M: ExactMatrix):
    """Clear each row to ring elements suitable for Bareiss elimination.

    Returns (rows, row_scales, kind) where the original matrix satisfies
    M[i][j] = rows[i][j] / row_scales[i]; kind is "int" or "poly".
    """
    if M.rows and isinstance(M.entries[0][0], RatFunc):
        var = M.entries[0][0].var
        rows: list[list[UniPoly]] = []
        scales: list[UniPoly] = []
        for row in M.entries:
            d = UniPoly.const(var, 1)
            for e in row:
                d = d.lcm(e.den)
            rows.append([e.num * d.exact_div(e.den) for e in row])
            scales.append(d)
        return rows, scales, "poly"
    rows_i: list[list[int]] = []
    scales_i: list[int] = []
    for row in M.entries:
        d = 1
        for e in row:
            d = d * e.denominator // gcd(d, e.denominator)
        rows_i.append([int(e * d) for e in row])
        scales_i.append(d)
    return rows_i, scales_i, "int"


def _bareiss_forward(rows, kind: str):
    """In-place Bareiss forward elimination with row pivoting.

    Returns (sign, rows, singular): rows becomes upper triangular with
    rows[-1][-1] = sign-adjusted determinant of the input unless singular
    is True (a zero pivot column was found, so the determinant is 0).
    """
    n = len(rows)
    sign = 1
    if kind == "int":
        def is_zero(x):
            return x == 0

        def divide(a, b):
            q, r = divmod(a, b)
            if r:
                raise ArithmeticError("Bareiss division not exact")
            return q
    else:
        def is_zero(x):
            return x.is_zero

        def divide(a, b):
            return a.exact_div(b)

    prev = 1 if kind == "int" else None
    for k in range(n - 1):
        # pivot
        if is_zero(rows[k][k]):
            for r in range(k + 1, n):
                if not is_zero(rows[r][k]):
                    rows[k], rows[r] = rows[r], rows[k]
                    sign = -sign
                    break
            else:
                return sign, rows, True
        piv = rows[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, len(rows[i])):
                num = rows[i][j] * piv - rows[i][k] * rows[k][j]
                if prev is not None:
                    num = divide(num, prev)
                rows[i][j] = num
            rows[i][k] = UniPoly.zero(rows[k][k].var) if kind == "poly" else 0
        prev = piv
    return sign, rows, False


def exact_det(M: ExactMatrix) -> Entry:
    """Exact determinant by fraction-free (Bareiss) elimination.

    Rows are first cleared to integers (over Q) or to polynomials (over
    Q(u)); the Bareiss recurrence then keeps every intermediate value in
    the cleared ring, and the row-clearing factors are divided back at the
    end.
    """
    if not M.is_square:
        raise ValueError("determinant of a non-square matrix")
    n = M.rows
    if n == 0:
        return Fraction(1)
    rows, scales, kind = _cleared_rows(M)
    work = [list(r) for r in rows]
    sign, work, singular = _bareiss_forward(work, kind)
    if singular:
        if kind == "int":
            return Fraction(0)
        return RatFunc.of(M.entries[0][0].var, 0)
    if kind == "int":
        det_cleared = Fraction(sign * work[n - 1][n - 1])
        denom = Fraction(1)
        for s in scales:
            denom *= s
        return det_cleared / denom
    var = M.entries[0][0].var
    det_cleared = RatFunc(work[n - 1][n - 1]) * sign
    denom = RatFunc.of(var, 1)
    for s in scales:
        denom = denom * RatFunc(s)
    return det_cleared / denom


def exact_inverse(M: ExactMatrix) -> ExactMatrix:
    """Exact inverse via Bareiss forward elimination on the augmented
    matrix followed by back substitution."""
    if not M.is_square:
        raise ValueError("inverse of a non-square matrix")
    n = M.rows
    if n == 0:
        return M
    rows, scales, kind = _cleared_rows(M)
    over_poly = kind == "poly"
    if over_poly:
        var = M.entries[0][0].var

        def lift(p):
            return RatFunc(p)

        aug_id = [
            [
                RatFunc.from_poly(
                    scales[i] if i == j else UniPoly.zero(var)
                )
                for j in range(n)
            ]
            for i in range(n)
        ]
    else:
        def lift(p):
            return Fraction(p)

        aug_id = [
            [Fraction(scales[i]) if i == j else Fraction(0) for j in range(n)]
            for i in range(n)
        ]
    # Forward Bareiss on the coefficient block; mirror the same row
    # operations (in the fraction field) on the identity block.
    work = [list(r) for r in rows]
    if kind == "int":
        def divide(a, b):
            q, r = divmod(a, b)
            if r:
                raise ArithmeticError("Bareiss division not exact")
            return q

        def is_zero(x):
            return x == 0
    else:
        def divide(a, b):
            return a.exact_div(b)

        def is_zero(x):
            return x.is_zero

    prev = None
    for k in range(n - 1):
        if is_zero(work[k][k]):
            for r in range(k + 1, n):
                if not is_zero(work[r][k]):
                    work[k], work[r] = work[r], work[k]
                    aug_id[k], aug_id[r] = aug_id[r], aug_id[k]
                    break
            else:
                raise ZeroDivisionError(
                    "matrix is singular (determinant 0)"
                )
        piv = work[k][k]
        piv_f = lift(piv)
        for i in range(k + 1, n):
            fac = work[i][k]
            fac_f = lift(fac)
            for j in range(k + 1, n):
                num = work[i][j] * piv - work[i][k] * work[k][j]
                if prev is not None:
                    num = divide(num, prev)
                work[i][j] = num
            for j in range(n):
                aug_id[i][j] = aug_id[i][j] * piv_f - fac_f * aug_id[k][j]
                if prev is not None:
                    aug_id[i][j] = aug_id[i][j] / lift(prev)
            work[i][k] = work[i][k] * 0 if kind == "int" else UniPoly.zero(var)
        prev = piv
    if is_zero(work[n - 1][n - 1]):
        raise ZeroDivisionError("matrix is singular (determinant 0)")
    # Back substitution in the fraction field.
    inv_rows = [[None] * n for _ in range(n)]
    for col in range(n):
        sol = [None] * n
        for i in range(n - 1, -1, -1):
            acc = aug_id[i][col]
            for j in range(i + 1, n):
                acc = acc - lift(work[i][j]) * sol[j]
            sol[i] = acc / lift(work[i][i])
        for i in range(n):
            inv_rows[i][col] = sol[i]
    return ExactMatrix(inv_rows)


# ---------------------------------------------------------------------------
# Differential operators in right-normal form
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class DiffOp:
    """Linear differential operator Σ_j c_j(x)·D^j in right-normal form
    (coefficient functions to the left of all derivatives)."""

    var: str
    coeffs: tuple[RatFunc, ...]

    @staticmethod
    def of(var: str, coeffs: Iterable[RatFunc | UniPoly | ScalarLike]) -> "DiffOp":
        cs: list[RatFunc] = []
        for c in coeffs:
            if isinstance(c, RatFunc):
                cs.append(c)
            elif isinstance(c, UniPoly):
                cs.append(RatFunc(c))
            else:
                cs.append(RatFunc.of(var, c))
        while cs and cs[-1].is_zero:
            cs.pop()
        return DiffOp(var, tuple(cs))

    @staticmethod
    def zero(var: str) -> "DiffOp":
        return DiffOp(var, ())

    @staticmethod
    def identity(var: str) -> "DiffOp":
        return DiffOp.of(var, [1])

    @staticmethod
    def D(var: str) -> "DiffOp":
        return DiffOp.of(var, [0, 1])

    @staticmethod
    def mult(f: RatFunc | UniPoly) -> "DiffOp":
        var = f.var
        return DiffOp.of(var, [f])

    @staticmethod
    def theta_hat(var: str = "u") -> "DiffOp":
        """The operator f ↦ D[x·f(x)], i.e. x·D + 1 in normal form."""
        return DiffOp.of(var, [1, UniPoly.x(var)])

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> RatFunc:
        if 0 <= j < len(self.coeffs):
            return self.coeffs[j]
        return RatFunc.of(self.var, 0)

    def _check_var(self, other: "DiffOp") -> None:
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")

    def __add__(self, other: "DiffOp") -> "DiffOp":
        self._check_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return DiffOp.of(
            self.var, [self.coeff(j) + other.coeff(j) for j in range(n)]
        )

    def __neg__(self) -> "DiffOp":
        return DiffOp(self.var, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "DiffOp") -> "DiffOp":
        return self + (-other)

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.var == other.var and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.var, self.coeffs))

    def apply_ratfunc(self, f: RatFunc) -> RatFunc:
        """Apply the operator to a rational function."""
        acc = RatFunc.of(self.var, 0)
        df = f
        for j, c in enumerate(self.coeffs):
            if j > 0:
                df = df.deriv()
            acc = acc + c * df
        return acc

    def __str__(self) -> str:
        if self.is_zero:
            return "0"
        parts = []
        for j, c in enumerate(self.coeffs):
            if c.is_zero:
                continue
            if j == 0:
                parts.append(f"({c})")
            else:
                parts.append(f"({c})*D^{j}")
        return " + ".join(parts)


def diffop_compose(P: DiffOp, Q: DiffOp) -> DiffOp:
    """Normal-form composition P∘Q using D∘c(x) = c(x)∘D + c'(x)."""
    if P.var != Q.var:
        raise ValueError("variable mismatch in operator composition")
    var = P.var
    result = DiffOp.zero(var)
    # R_j = D^j ∘ Q in normal form, built incrementally.
    R = Q
    for j, c in enumerate(P.coeffs):
        if j > 0:
            # R ← D ∘ R = Σ (d_i' D^i + d_i D^{i+1})
            new = [RatFunc.of(var, 0)] * (len(R.coeffs) + 1)
            for i, d in enumerate(R.coeffs):
                new[i] = new[i] + d.deriv()
                new[i + 1] = new[i + 1] + d
            R = DiffOp.of(var, new)
        if not c.is_zero:
            result = result + DiffOp.of(var, [c * d for d in R.coeffs])
    return result


def diffop_scale_mul(p: RatFunc | UniPoly | ScalarLike, P: DiffOp) -> DiffOp:
    """Left multiplication by a function: p(x)·P."""
    if isinstance(p, UniPoly):
        p = RatFunc(p)
    elif not isinstance(p, RatFunc):
        p = RatFunc.of(P.var, p)
    return DiffOp.of(P.var, [p * c for c in P.coeffs])


def diffop_poly_of(op_poly: UniPoly, base: DiffOp) -> DiffOp:
    """Substitute a differential operator into a scalar polynomial
    (Horner evaluation in the operator algebra)."""
    var = base.var
    acc = DiffOp.zero(var)
    for c in reversed(op_poly.coeffs):
        acc = diffop_compose(acc, base) + DiffOp.of(var, [c])
    return acc


def diffop_adjoint(P: DiffOp) -> DiffOp:
    """Formal adjoint Σ_k (−1)^k D^k ∘ (c_k ·) in normal form.

    Expanded by the Leibniz rule: the D^i coefficient of the adjoint is
    Σ_{k≥i} (−1)^k C(k,i) c_k^{(k−i)}.
    """
    var = P.var
    n = len(P.coeffs)
    out = [RatFunc.of(var, 0)] * n
    for k, c in enumerate(P.coeffs):
        sign = -1 if k % 2 else 1
        d = c
        # i = k down to 0; c^{(k-i)}
        for i in range(k, -1, -1):
            out[i] = out[i] + d * (sign * comb(k, i))
            if i > 0:
                d = d.deriv()
    return DiffOp.of(var, out)


# ---------------------------------------------------------------------------
# Truncated bivariate series Σ_n a_n(u) t^n
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TruncBiSeries:
    """Series Σ_{n=0}^{N} a_n(u)·t^n truncated at order N in t, with
    polynomial coefficients in u."""

    order: int
    coeffs: tuple[UniPoly, ...]

    @staticmethod
    def of(order: int, coeffs: Sequence[UniPoly], uvar: str = "u") -> "TruncBiSeries":
        if order < 0:
            raise ValueError("negative truncation order")
        cs = list(coeffs[: order + 1])
        while len(cs) < order + 1:
            cs.append(UniPoly.zero(uvar))
        return TruncBiSeries(order, tuple(cs))

    @property
    def uvar(self) -> str:
        return self.coeffs[0].var

    def coeff(self, n: int) -> UniPoly:
        if 0 <= n <= self.order:
            return self.coeffs[n]
        return UniPoly.zero(self.uvar)

    def __add__(self, other: "TruncBiSeries") -> "TruncBiSeries":
        N = min(self.order, other.order)
        return TruncBiSeries.of(
            N, [self.coeff(n) + other.coeff(n) for n in range(N + 1)], self.uvar
        )

    def __sub__(self, other: "TruncBiSeries") -> "TruncBiSeries":
        return self + other.scale(Fraction(-1))

    def scale(self, c: ScalarLike) -> "TruncBiSeries":
        c = _as_fraction(c)
        return TruncBiSeries.of(
            self.order, [a * c for a in self.coeffs], self.uvar
        )

    def shift_t(self, k: int) -> "TruncBiSeries":
        """Multiply by t**k (k >= 0), truncating at the original order."""
        if k < 0:
            raise ValueError("negative t-shift")
        return TruncBiSeries.of(
            self.order,
            [UniPoly.zero(self.uvar)] * k + list(self.coeffs),
            self.uvar,
        )

    @property
    def is_zero(self) -> bool:
        return all(a.is_zero for a in self.coeffs)


def series_apply(P: DiffOp, s: TruncBiSeries) -> TruncBiSeries:
    """Apply a differential operator to a truncated bivariate series.

    A t-operator acts on the t-grading (D_t lowers degree, polynomial
    coefficients in t shift it up); a u-operator acts on each polynomial
    coefficient a_n(u).  Operator coefficients must be polynomial.
    """
    for c in P.coeffs:
        if not c.is_polynomial():
            raise ValueError(
                "series_apply requires polynomial operator coefficients; "
                "clear denominators first"
            )
    N = s.order
    uvar = s.uvar
    if P.var == uvar:
        out = []
        for a in s.coeffs:
            acc = UniPoly.zero(uvar)
            d = a
            for j, c in enumerate(P.coeffs):
                if j > 0:
                    d = d.deriv()
                acc = acc + c.as_poly() * d
            out.append(acc)
        return TruncBiSeries.of(N, out, uvar)
    if P.order > N:
        raise ValueError("truncation order too small for operator order")
    # t-operator: coefficients are polynomials in t with rational constants.
    total = TruncBiSeries.of(N, [], uvar)
    deriv = s  # D_t^j s
    for j, c in enumerate(P.coeffs):
        if j > 0:
            deriv = TruncBiSeries.of(
                N,
                [deriv.coeff(n + 1) * (n + 1) for n in range(N + 1)],
                uvar,
            )
        cp = c.as_poly()
        if cp.is_zero:
            continue
        for m, gamma in enumerate(cp.coeffs):
            if gamma == 0:
                continue
            total = total + deriv.scale(gamma).shift_t(m)
    return total
