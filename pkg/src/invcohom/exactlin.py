"""Exact linear algebra over the rationals and the Gaussian rationals.

Everything here is exact.  Scalars are :class:`fractions.Fraction` or
:class:`GaussianRational`; matrices are dense :class:`ExactMatrix` objects.
Pivoting is deterministic (first nonzero column, smallest row index), so
kernel bases and right inverses are reproducible.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence


class GaussianRational:
    """A number ``re + im*i`` with rational real and imaginary parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is Fraction else Fraction(re)
        self.im = im if type(im) is Fraction else Fraction(im)

    @classmethod
    def coerce(cls, x) -> "GaussianRational":
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, complex):
            raise TypeError("floating point complex numbers are not exact")
        if isinstance(x, float):
            raise TypeError("floats are not exact; pass a Fraction or a 'p/q' string")
        if isinstance(x, str):
            return cls(parse_rational(x))
        return cls(x)

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        """Squared modulus, always rational."""
        return self.re * self.re + self.im * self.im

    def is_real(self) -> bool:
        return self.im == 0

    def __add__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o - self

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return GaussianRational(self.re * other, self.im * other)
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            return GaussianRational(self.re * o.re, self.im * o.re)
        if self.im == 0:
            return GaussianRational(self.re * o.re, self.re * o.im)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        if o.im == 0:
            if o.re == 0:
                raise ZeroDivisionError("division by zero Gaussian rational")
            return GaussianRational(self.re / o.re, self.im / o.re)
        n = o.abs2()
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return o / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        o = _coerce_or_none(other)
        if o is None:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __repr__(self):
        return f"GaussianRational({str(self.re)!r}, {str(self.im)!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        if self.re == 0:
            return f"{self.im}i"
        sign = "+" if self.im > 0 else "-"
        return f"{self.re}{sign}{abs(self.im)}i"


I = GaussianRational(0, 1)
ZERO = GaussianRational(0)
ONE = GaussianRational(1)


def _coerce_or_none(x):
    if isinstance(x, GaussianRational):
        return x
    if isinstance(x, (int, Fraction)):
        return GaussianRational(x)
    return None


def parse_rational(text) -> Fraction:
    """Parse ``"p/q"`` (or an integer string) into a Fraction.

    Floats are rejected: every rational in a config must be exact.
    """
    if isinstance(text, bool):
        raise ValueError("booleans are not rationals")
    if isinstance(text, (int, Fraction)):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"expected a 'p/q' string, got {text!r}")
    s = text.strip()
    if not s or any(c in s for c in ".eE"):
        raise ValueError(f"not an exact rational: {text!r}")
    return Fraction(s)


class ExactMatrix:
    """Dense matrix of Gaussian rationals."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, entries: Sequence[Sequence], cols: int | None = None):
        rows = [[GaussianRational.coerce(x) for x in row] for row in entries]
        if cols is None:
            cols = len(rows[0]) if rows else 0
        for row in rows:
            if len(row) != cols:
                raise ValueError("ragged matrix rows")
        self.rows = len(rows)
        self.cols = cols
        self.entries = rows

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ExactMatrix":
        return cls([[ZERO] * cols for _ in range(rows)], cols=cols)

    @classmethod
    def identity(cls, n: int) -> "ExactMatrix":
        return cls([[ONE if i == j else ZERO for j in range(n)] for i in range(n)], cols=n)

    @classmethod
    def column(cls, vec: Sequence) -> "ExactMatrix":
        return cls([[x] for x in vec], cols=1)

    @property
    def shape(self):
        return (self.rows, self.cols)

    def __getitem__(self, idx):
        i, j = idx
        return self.entries[i][j]

    def row(self, i: int) -> list:
        return list(self.entries[i])

    def col(self, j: int) -> list:
        return [r[j] for r in self.entries]

    def transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for i in range(self.rows)]
                            for j in range(self.cols)], cols=self.rows)

    def conjugate_transpose(self) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j].conjugate() for i in range(self.rows)]
                            for j in range(self.cols)], cols=self.rows)

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "ExactMatrix":
        return ExactMatrix([[self.entries[i][j] for j in cols] for i in rows], cols=len(cols))

    def is_zero(self) -> bool:
        return all(not x for row in self.entries for x in row)

    def is_rational(self) -> bool:
        return all(x.im == 0 for row in self.entries for x in row)

    def apply(self, vec: Sequence) -> list:
        """Matrix-vector product."""
        if len(vec) != self.cols:
            raise ValueError(f"vector of length {len(vec)} for {self.shape} matrix")
        v = [GaussianRational.coerce(x) for x in vec]
        out = []
        for row in self.entries:
            acc = ZERO
            for a, x in zip(row, v):
                if a and x:
                    acc = acc + a * x
            out.append(acc)
        return out

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.cols != other.rows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        ot = other.transpose().entries
        out = []
        for row in self.entries:
            new = []
            for col in ot:
                acc = ZERO
                for a, b in zip(row, col):
                    if a and b:
                        acc = acc + a * b
                new.append(acc)
            out.append(new)
        return ExactMatrix(out, cols=other.cols)

    def __mul__(self, scalar) -> "ExactMatrix":
        s = GaussianRational.coerce(scalar)
        return ExactMatrix([[x * s for x in row] for row in self.entries], cols=self.cols)

    __rmul__ = __mul__

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix([[a + b for a, b in zip(r, s)]
                            for r, s in zip(self.entries, other.entries)], cols=self.cols)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return ExactMatrix([[a - b for a, b in zip(r, s)]
                            for r, s in zip(self.entries, other.entries)], cols=self.cols)

    def __neg__(self):
        return self * -1

    def __eq__(self, other):
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self.shape == other.shape and self.entries == other.entries

    __hash__ = None

    def __repr__(self):
        body = "; ".join(", ".join(str(x) for x in row) for row in self.entries)
        return f"ExactMatrix({self.rows}x{self.cols}: [{body}])"


def rref(M: ExactMatrix) -> tuple[ExactMatrix, list[int]]:
    """Reduced row echelon form and pivot columns.

    Pivot rule: scan columns left to right, take the first row (from the
    current pivot row down) with a nonzero entry.
    """
    A = [list(r) for r in M.entries]
    rows, cols = M.rows, M.cols
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i][c]), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
        inv = ONE / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(rows):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
    return ExactMatrix(A, cols=cols), pivots


def _gauss_int_rows(M: ExactMatrix) -> list[list[tuple[int, int]]]:
    """Scale each row by the lcm of its denominators; entries become Gaussian integers."""
    out = []
    for row in M.entries:
        d = 1
        for x in row:
            d = lcm(d, x.re.denominator, x.im.denominator)
        out.append([(x.re.numerator * (d // x.re.denominator),
                     x.im.numerator * (d // x.im.denominator)) for x in row])
    return out


def _gmul(a, b):
    return (a[0] * b[0] - a[1] * b[1], a[0] * b[1] + a[1] * b[0])


def _gexact_div(a, b):
    n = b[0] * b[0] + b[1] * b[1]
    re = a[0] * b[0] + a[1] * b[1]
    im = a[1] * b[0] - a[0] * b[1]
    qr, rr = divmod(re, n)
    qi, ri = divmod(im, n)
    if rr or ri:
        raise ArithmeticError("inexact Gaussian integer division in Bareiss step")
    return (qr, qi)


def rank(M: ExactMatrix) -> int:
    """Exact rank by fraction-free (Bareiss) elimination over the Gaussian integers."""
    A = _gauss_int_rows(M)
    rows, cols = M.rows, M.cols
    prev = (1, 0)
    r = 0
    for c in range(cols):
        if r == rows:
            break
        p = next((i for i in range(r, rows) if A[i][c] != (0, 0)), None)
        if p is None:
            continue
        if p != r:
            A[r], A[p] = A[p], A[r]
        piv = A[r][c]
        for i in range(r + 1, rows):
            lead = A[i][c]
            row_i = A[i]
            row_r = A[r]
            for j in range(c + 1, cols):
                x = _gmul(row_i[j], piv)
                if lead != (0, 0):
                    y = _gmul(lead, row_r[j])
                    x = (x[0] - y[0], x[1] - y[1])
                row_i[j] = _gexact_div(x, prev)
            row_i[c] = (0, 0)
        prev = piv
        r += 1
    return r


def kernel_basis(M: ExactMatrix) -> list[list[GaussianRational]]:
    """Basis of the right kernel, one vector per free column of the RREF.

    Each vector has a 1 in its free column and zeros in the other free columns.
    """
    R, pivots = rref(M)
    free = [c for c in range(M.cols) if c not in pivots]
    basis = []
    for f in free:
        v = [ZERO] * M.cols
        v[f] = ONE
        for i, p in enumerate(pivots):
            v[p] = -R[i, f]
        basis.append(v)
    return basis


def inverse(M: ExactMatrix) -> ExactMatrix:
    if M.rows != M.cols:
        raise ValueError("inverse of a non-square matrix")
    n = M.rows
    aug = ExactMatrix([M.row(i) + [ONE if i == j else ZERO for j in range(n)]
                       for i in range(n)], cols=2 * n)
    R, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return R.submatrix(range(n), range(n, 2 * n))


def right_inverse_on_range(T: ExactMatrix) -> ExactMatrix:
    """A matrix S with ``T @ S @ T == T``.

    S is supported on the pivot columns of T (rows of S) and the first
    independent rows of T (columns of S), where it equals the inverse of the
    corresponding nonsingular block.  Hence ``T @ S`` is the identity on ran T.
    """
    S = ExactMatrix.zeros(T.cols, T.rows)
    _, pcols = rref(T)
    if pcols:
        _, prows = rref(T.transpose())
        block_inv = inverse(T.submatrix(prows, pcols))
        for a, j in enumerate(pcols):
            for b, i in enumerate(prows):
                S.entries[j][i] = block_inv[a, b]
    if T @ S @ T != T:
        raise ArithmeticError("right inverse failed post-hoc verification")
    return S


def solve(M: ExactMatrix, rhs: Sequence) -> list[GaussianRational] | None:
    """One exact solution of ``M x = rhs`` (free variables set to zero), or None."""
    aug = ExactMatrix([M.row(i) + [GaussianRational.coerce(rhs[i])] for i in range(M.rows)],
                      cols=M.cols + 1)
    R, pivots = rref(aug)
    if pivots and pivots[-1] == M.cols:
        return None
    x = [ZERO] * M.cols
    for i, p in enumerate(pivots):
        x[p] = R[i, M.cols]
    return x


def min_norm_solution(M: ExactMatrix, rhs: Sequence) -> list[GaussianRational] | None:
    """The least-Hermitian-norm solution of ``M x = rhs``, exactly.

    Writes ``x = M^H y`` with ``(M M^H) y = rhs``; returns None if inconsistent.
    """
    MH = M.conjugate_transpose()
    y = solve(M @ MH, rhs)
    if y is None:
        return None
    return MH.apply(y)


def _content(v: Iterable[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def hermite_normal_form(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row-style Hermite normal form of an integer matrix; zero rows dropped.

    Pivots are positive and entries above each pivot are reduced into
    ``[0, pivot)``.  The nonzero rows are a canonical basis of the row lattice.
    """
    A = [list(map(int, r)) for r in rows]
    if not A:
        return []
    ncols = len(A[0])
    r = 0
    pivots = []
    for c in range(ncols):
        if r == len(A):
            break
        while True:
            nz = [i for i in range(r, len(A)) if A[i][c] != 0]
            if not nz:
                break
            p = min(nz, key=lambda i: (abs(A[i][c]), i))
            A[r], A[p] = A[p], A[r]
            done = True
            for i in range(r + 1, len(A)):
                if A[i][c]:
                    q = A[i][c] // A[r][c]
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
                    if A[i][c]:
                        done = False
            if done:
                break
        if r < len(A) and A[r][c] != 0:
            if A[r][c] < 0:
                A[r] = [-x for x in A[r]]
            for i in range(r):
                q = A[i][c] // A[r][c]
                if q:
                    A[i] = [x - q * y for x, y in zip(A[i], A[r])]
            pivots.append(c)
            r += 1
    return [row for row in A[:r]]


def _integer_kernel(B: list[list[int]], ncols: int) -> list[list[int]]:
    """Lattice basis of {x in Z^ncols : B x = 0} by unimodular column operations."""
    B = [list(r) for r in B]
    U = [[1 if i == j else 0 for j in range(ncols)] for i in range(ncols)]  # columns of U track ops

    def colop(dst, src, q):
        # column dst -= q * column src
        for row in B:
            row[dst] -= q * row[src]
        for row in U:
            row[dst] -= q * row[src]

    def swap(a, b):
        for row in B:
            row[a], row[b] = row[b], row[a]
        for row in U:
            row[a], row[b] = row[b], row[a]

    start = 0
    for row in B:
        if start == ncols:
            break
        while True:
            nz = [c for c in range(start, ncols) if row[c] != 0]
            if len(nz) <= 1:
                break
            p = min(nz, key=lambda c: (abs(row[c]), c))
            for c in nz:
                if c != p:
                    colop(c, p, row[c] // row[p])
        nz = [c for c in range(start, ncols) if row[c] != 0]
        if nz:
            swap(start, nz[0])
            start += 1
    return [[U[i][j] for i in range(ncols)] for j in range(start, ncols)]


def integer_lattice_kernel(A: ExactMatrix) -> list[list[int]]:
    """Basis of the lattice ``{x in Z^N : A x = 0}`` for a rational matrix A.

    Denominators are cleared row by row, the integer kernel is computed with
    unimodular column operations and then put in Hermite normal form, so the
    output is canonical.  The kernel lattice is saturated, so every basis
    vector is primitive (content 1).
    """
    if not A.is_rational():
        raise ValueError("integer_lattice_kernel needs a matrix with rational entries")
    B = []
    for row in A.entries:
        d = 1
        for x in row:
            d = lcm(d, x.re.denominator)
        B.append([x.re.numerator * (d // x.re.denominator) for x in row])
    basis = _integer_kernel(B, A.cols)
    return hermite_normal_form(basis)

