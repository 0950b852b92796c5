"""Exact square and rectangular matrices over the rationals."""

from __future__ import annotations

import json
from fractions import Fraction

from ..core.families import Family, register_family
from ..rational import fmt, fmt_short, to_fraction


class QMatrix:
    __slots__ = ("rows", "_hash")

    def __init__(self, rows):
        rows = tuple(tuple(to_fraction(x) for x in r) for r in rows)
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("ragged or empty matrix")
        self.rows = rows
        self._hash = None

    # construction -------------------------------------------------------
    @classmethod
    def identity(cls, n):
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def zeros(cls, n, m=None):
        return cls([[0] * (n if m is None else m) for _ in range(n)])

    @classmethod
    def diag(cls, entries):
        n = len(entries)
        return cls([[entries[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def from_columns(cls, cols):
        return cls(list(zip(*cols)))

    @classmethod
    def from_json(cls, data):
        if isinstance(data, str):
            data = json.loads(data)
        return cls([[to_fraction(x) if not isinstance(x, float) else _reject_float(x) for x in r] for r in data])

    def to_json(self):
        return [[fmt(x) for x in r] for r in self.rows]

    # basic protocol ----------------------------------------------------
    @property
    def shape(self):
        return len(self.rows), len(self.rows[0])

    @property
    def n(self):
        return len(self.rows)

    def is_square(self):
        return self.shape[0] == self.shape[1]

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return isinstance(other, QMatrix) and self.rows == other.rows

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.rows)
        return self._hash

    def __repr__(self):
        return f"QMatrix({str(self)})"

    def __str__(self):
        return "[" + ",".join("[" + ",".join(fmt_short(x) for x in r) + "]" for r in self.rows) + "]"

    def tolist(self):
        return [list(r) for r in self.rows]

    def column(self, j):
        return [r[j] for r in self.rows]

    def columns(self):
        return [list(c) for c in zip(*self.rows)]

    @property
    def T(self):
        return QMatrix(list(zip(*self.rows)))

    # arithmetic --------------------------------------------------------
    def __add__(self, other):
        return QMatrix([[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        return QMatrix([[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return QMatrix([[-a for a in r] for r in self.rows])

    def __mul__(self, c):
        if isinstance(c, QMatrix):
            return self @ c
        c = to_fraction(c)
        return QMatrix([[c * a for a in r] for r in self.rows])

    __rmul__ = __mul__

    def __matmul__(self, other):
        cols = list(zip(*other.rows))
        if len(self.rows[0]) != len(cols[0]):
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        return QMatrix([[sum((a * b for a, b in zip(r, c)), Fraction(0)) for c in cols] for r in self.rows])

    def apply(self, v):
        return [sum((a * b for a, b in zip(r, v)), Fraction(0)) for r in self.rows]

    def __pow__(self, e):
        if not self.is_square():
            raise ValueError("power of a non-square matrix")
        base = self if e >= 0 else self.inverse()
        e = abs(e)
        out = QMatrix.identity(self.n)
        while e:
            if e & 1:
                out = out @ base
            base = base @ base
            e >>= 1
        return out

    def trace(self):
        return sum((self.rows[i][i] for i in range(self.n)), Fraction(0))

    # elimination -------------------------------------------------------
    def rref(self):
        """Reduced row echelon form and pivot columns."""
        A = [list(r) for r in self.rows]
        nr, nc = self.shape
        pivots, row = [], 0
        for col in range(nc):
            piv = next((i for i in range(row, nr) if A[i][col] != 0), None)
            if piv is None:
                continue
            A[row], A[piv] = A[piv], A[row]
            p = A[row][col]
            A[row] = [x / p for x in A[row]]
            for i in range(nr):
                if i != row and A[i][col] != 0:
                    f = A[i][col]
                    A[i] = [x - f * y for x, y in zip(A[i], A[row])]
            pivots.append(col)
            row += 1
            if row == nr:
                break
        return QMatrix(A), pivots

    def rank(self):
        return len(self.rref()[1])

    def nullspace(self):
        """Basis (list of column vectors) of {v : M v = 0}."""
        R, pivots = self.rref()
        nc = self.shape[1]
        free = [j for j in range(nc) if j not in pivots]
        basis = []
        for f in free:
            v = [Fraction(0)] * nc
            v[f] = Fraction(1)
            for i, p in enumerate(pivots):
                v[p] = -R[i, f]
            basis.append(v)
        return basis

    def det(self):
        if not self.is_square():
            raise ValueError("determinant of a non-square matrix")
        A = [list(r) for r in self.rows]
        n, d = self.n, Fraction(1)
        for c in range(n):
            piv = next((i for i in range(c, n) if A[i][c] != 0), None)
            if piv is None:
                return Fraction(0)
            if piv != c:
                A[c], A[piv] = A[piv], A[c]
                d = -d
            d *= A[c][c]
            for i in range(c + 1, n):
                if A[i][c]:
                    f = A[i][c] / A[c][c]
                    A[i] = [x - f * y for x, y in zip(A[i], A[c])]
        return d

    def inverse(self):
        n = self.n
        aug = QMatrix([list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(self.rows)])
        R, pivots = aug.rref()
        if pivots[:n] != list(range(n)):
            raise ZeroDivisionError("matrix is singular")
        return QMatrix([r[n:] for r in R.rows])

    def charpoly(self):
        """Coefficients [c0, c1, ..., cn] of det(x I - M), lowest degree first.

        Faddeev-LeVerrier recursion, exact over the rationals.
        """
        n = self.n
        coeffs = [Fraction(0)] * (n + 1)
        coeffs[n] = Fraction(1)
        Mk = QMatrix.zeros(n)
        I = QMatrix.identity(n)
        for k in range(1, n + 1):
            Mk = self @ Mk + I * coeffs[n - k + 1]
            coeffs[n - k] = -(self @ Mk).trace() / k
        return coeffs

    def is_integer(self):
        return all(x.denominator == 1 for r in self.rows for x in r)

    def int_rows(self):
        if not self.is_integer():
            raise ValueError("matrix has non-integer entries")
        return tuple(tuple(int(x) for x in r) for r in self.rows)


def _reject_float(x):
    raise TypeError(f"float entry {x!r} on the exact path; pass 'p/q' strings")


def parse_matrix(s: str) -> QMatrix:
    """Parse ``[[1,0],[1/2,1]]`` (quotes optional)."""
    s = s.replace('"', "").replace("'", "").replace(" ", "")
    if not (s.startswith("[[") and s.endswith("]]")):
        raise ValueError(f"not a matrix literal: {s!r}")
    rows = [r for r in s[2:-2].split("],[")]
    return QMatrix([[Fraction(t) for t in r.split(",")] for r in rows])


@register_family("matrix")
class MatrixFamily(Family):
    """GL_n over the rationals."""

    tag = "matrix"

    def __init__(self, n=2):
        self.n = int(n)

    def params(self):
        return {"n": self.n}

    def identity(self):
        return QMatrix.identity(self.n)

    def mul(self, x, y):
        return x @ y

    def inv(self, x):
        return x.inverse()

    def pow(self, x, e):
        return x ** e

    def contains(self, x):
        return isinstance(x, QMatrix) and x.shape == (self.n, self.n) and x.det() != 0

    def parse(self, s):
        M = parse_matrix(s)
        if M.shape != (self.n, self.n):
            raise ValueError(f"expected a {self.n}x{self.n} matrix, got {M.shape}")
        return M

    def format(self, x):
        return str(x)
