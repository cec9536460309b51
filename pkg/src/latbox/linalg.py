"""Exact-first dense linear algebra for small square matrices.

Matrices are immutable, row-major tuples of scalars (see precision).
When every entry is exact (integer/rational) the eliminations run in
exact rational arithmetic, so determinants, inverses and dual bases of
rational lattices carry no rounding at all; otherwise everything runs
in mpfr at the working precision.

A LatticeBasis wraps a nonsingular matrix whose COLUMNS generate the
lattice, caches the determinant, and flags unimodularity.  The dual
basis is the inverse transpose, which keeps the pairing <dual_i,
primal_j> = delta_ij in the column convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import DegenerateLatticeError, LatboxError
from .precision import Scalar, as_mpfr, get_working_digits, is_exact, simplify, to_scalar

Vector = tuple


def vec(entries: Iterable) -> Vector:
    return tuple(to_scalar(e) for e in entries)


def dot(u: Sequence, v: Sequence) -> Scalar:
    if len(u) != len(v):
        raise LatboxError("dot: dimension mismatch %d vs %d" % (len(u), len(v)))
    acc = to_scalar(0)
    for a, b in zip(u, v):
        acc = acc + a * b
    return acc


def norm_sq(v: Sequence) -> Scalar:
    return dot(v, v)


def norm(v: Sequence) -> mpfr:
    return gmpy2.sqrt(as_mpfr(norm_sq(v)))


def vec_sub(u: Sequence, v: Sequence) -> Vector:
    return tuple(a - b for a, b in zip(u, v))


def vec_scale(c, v: Sequence) -> Vector:
    return tuple(c * a for a in v)


class Matrix:
    """Immutable square matrix of scalars, row-major storage."""

    __slots__ = ("rows", "n")

    def __init__(self, rows: Iterable[Iterable]):
        rws = tuple(tuple(to_scalar(e) for e in row) for row in rows)
        n = len(rws)
        if n == 0 or any(len(r) != n for r in rws):
            raise LatboxError("matrix must be square and nonempty")
        object.__setattr__(self, "rows", rws)
        object.__setattr__(self, "n", n)

    def __setattr__(self, *_):
        raise AttributeError("Matrix is immutable")

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def diagonal(cls, diag: Sequence) -> "Matrix":
        d = [to_scalar(x) for x in diag]
        n = len(d)
        return cls([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])

    def entry(self, i: int, j: int) -> Scalar:
        return self.rows[i][j]

    def row(self, i: int) -> Vector:
        return self.rows[i]

    def col(self, j: int) -> Vector:
        return tuple(r[j] for r in self.rows)

    def cols(self) -> tuple:
        return tuple(self.col(j) for j in range(self.n))

    def transpose(self) -> "Matrix":
        return Matrix(zip(*self.rows))

    def all_exact(self) -> bool:
        return all(is_exact(e) for r in self.rows for e in r)

    def is_diagonal(self) -> bool:
        """True when every off-diagonal entry is exactly zero."""
        return all(
            self.rows[i][j] == 0 for i in range(self.n) for j in range(self.n) if i != j
        )

    def max_abs(self) -> Scalar:
        return max(abs(e) for r in self.rows for e in r)

    def matvec(self, v: Sequence) -> Vector:
        if len(v) != self.n:
            raise LatboxError("matvec: dimension mismatch")
        return tuple(dot(r, v) for r in self.rows)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.n != other.n:
            raise LatboxError("matmul: dimension mismatch")
        ocols = other.cols()
        return Matrix([[dot(r, c) for c in ocols] for r in self.rows])

    def scale(self, c) -> "Matrix":
        c = to_scalar(c)
        return Matrix([[c * e for e in r] for r in self.rows])

    def __eq__(self, other) -> bool:
        return isinstance(other, Matrix) and self.rows == other.rows

    def __hash__(self):
        return hash(self.rows)

    def __repr__(self):
        return "Matrix(%r)" % (self.rows,)

    def to_lists(self) -> list:
        return [list(r) for r in self.rows]


def parse_matrix(data) -> Matrix:
    """Build a matrix from nested lists of numbers / decimal strings."""
    if not isinstance(data, (list, tuple)):
        raise LatboxError("matrix literal must be a list of rows")
    return Matrix(data)


def _exact_rows(m: Matrix) -> list:
    return [[mpq(e) for e in row] for row in m.rows]


def _mpfr_rows(m: Matrix) -> list:
    return [[as_mpfr(e) for e in row] for row in m.rows]


def determinant(m: Matrix) -> Scalar:
    """Determinant, exact when all entries are exact."""
    n = m.n
    exact = m.all_exact()
    a = _exact_rows(m) if exact else _mpfr_rows(m)
    sign = 1
    det_acc = mpq(1) if exact else mpfr(1)
    for k in range(n):
        piv = None
        if exact:
            for i in range(k, n):
                if a[i][k] != 0:
                    piv = i
                    break
        else:
            best = mpfr(0)
            for i in range(k, n):
                mag = abs(a[i][k])
                if mag > best:
                    best = mag
                    piv = i
            if piv is not None and best == 0:
                piv = None
        if piv is None:
            return mpz(0) if exact else mpfr(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        pivot = a[k][k]
        det_acc = det_acc * pivot
        for i in range(k + 1, n):
            if a[i][k] == 0:
                continue
            f = a[i][k] / pivot
            a[i][k] = type(pivot)(0)
            for j in range(k + 1, n):
                a[i][j] = a[i][j] - f * a[k][j]
    det_acc = sign * det_acc
    return simplify(det_acc) if exact else det_acc


def inverse(m: Matrix) -> Matrix:
    """Matrix inverse via Gauss-Jordan, exact when all entries are exact."""
    n = m.n
    exact = m.all_exact()
    a = _exact_rows(m) if exact else _mpfr_rows(m)
    one = mpq(1) if exact else mpfr(1)
    zero = mpq(0) if exact else mpfr(0)
    inv = [[one if i == j else zero for j in range(n)] for i in range(n)]
    if exact:
        tiny = None
    else:
        scale = as_mpfr(m.max_abs())
        tiny = scale * mpfr("1e-%d" % (get_working_digits() + 10))
    for k in range(n):
        piv = None
        best = zero
        for i in range(k, n):
            mag = abs(a[i][k])
            if mag > best:
                best = mag
                piv = i
                if exact:
                    break
        if piv is None or best == 0 or (tiny is not None and best <= tiny):
            raise DegenerateLatticeError("matrix is singular at the working precision")
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            inv[k], inv[piv] = inv[piv], inv[k]
        pivot = a[k][k]
        a[k] = [x / pivot for x in a[k]]
        inv[k] = [x / pivot for x in inv[k]]
        for i in range(n):
            if i == k or a[i][k] == 0:
                continue
            f = a[i][k]
            a[i] = [x - f * y for x, y in zip(a[i], a[k])]
            inv[i] = [x - f * y for x, y in zip(inv[i], inv[k])]
    if exact:
        return Matrix([[simplify(x) for x in row] for row in inv])
    return Matrix(inv)


@dataclass(frozen=True)
class LatticeBasis:
    """Nonsingular basis whose columns generate the lattice."""

    matrix: Matrix
    det: Scalar
    unimodular: bool

    @classmethod
    def create(cls, matrix_like) -> "LatticeBasis":
        m = matrix_like if isinstance(matrix_like, Matrix) else parse_matrix(matrix_like)
        d = determinant(m)
        if d == 0:
            raise DegenerateLatticeError("basis columns are linearly dependent")
        if not is_exact(d):
            scale = max(as_mpfr(m.max_abs()), mpfr(1)) ** m.n
            if abs(d) <= scale * mpfr("1e-%d" % (get_working_digits() + 10)):
                raise DegenerateLatticeError(
                    "basis is singular at the working precision (|det| ~ %s)" % d
                )
        uni = abs(abs(as_mpfr(d)) - 1) <= mpfr("1e-30") * max(mpfr(1), abs(as_mpfr(d)))
        return cls(matrix=m, det=d, unimodular=uni)

    @property
    def n(self) -> int:
        return self.matrix.n

    @property
    def covolume(self) -> Scalar:
        return abs(self.det)

    def generators(self) -> tuple:
        return self.matrix.cols()

    def vector(self, z: Sequence[int]) -> Vector:
        """The lattice vector with integer coordinates z in this basis."""
        return self.matrix.matvec(tuple(mpz(c) for c in z))

    def dual(self) -> "LatticeBasis":
        return dual_basis(self)


def dual_basis(basis: LatticeBasis) -> LatticeBasis:
    """Basis of the dual lattice: inverse transpose of the primal basis."""
    inv_t = inverse(basis.matrix).transpose()
    d = (mpq(1) if is_exact(basis.det) else mpfr(1)) / basis.det
    d = simplify(d) if is_exact(d) else d
    uni = abs(abs(as_mpfr(d)) - 1) <= mpfr("1e-30") * max(mpfr(1), abs(as_mpfr(d)))
    return LatticeBasis(matrix=inv_t, det=d, unimodular=uni)


def _sym_eig_max_newton(c2: mpfr, c1: mpfr, c0: mpfr, hi: mpfr) -> mpfr:
    """Largest root of x^3 - c2 x^2 + c1 x - c0 (all roots real),
    by Newton started from an upper bound hi of the largest root."""
    x = hi
    if x <= 0:
        return mpfr(0)
    rel = mpfr("1e-23")
    for _ in range(500):
        p = ((x - c2) * x + c1) * x - c0
        dp = (3 * x - 2 * c2) * x + c1
        if dp <= 0:
            break
        step = p / dp
        x_new = x - step
        if x_new < 0:
            x_new = mpfr(0)
        if abs(step) <= rel * max(mpfr(1), abs(x)):
            x = x_new
            break
        x = x_new
    return x


def operator_norm(m: Matrix) -> mpfr:
    """Spectral norm (largest singular value).

    Diagonal matrices short-circuit to max |d_i|.  For n <= 3 the
    largest eigenvalue of M^T M comes from a closed form / Newton on the
    characteristic polynomial; larger sizes use symmetric power
    iteration with a 1e-25 relative Rayleigh-change stop.
    """
    n = m.n
    if m.is_diagonal():
        return max(abs(as_mpfr(e)) for e in (m.entry(i, i) for i in range(n)))
    g_m = m.transpose() @ m
    g = _mpfr_rows(g_m)
    if n == 1:
        return abs(as_mpfr(m.entry(0, 0)))
    if n == 2:
        a, b, c = g[0][0], g[0][1], g[1][1]
        lam = ((a + c) + gmpy2.sqrt((a - c) ** 2 + 4 * b * b)) / 2
        return gmpy2.sqrt(max(lam, mpfr(0)))
    if n == 3:
        c2 = g[0][0] + g[1][1] + g[2][2]
        c1 = (
            g[0][0] * g[1][1]
            - g[0][1] * g[1][0]
            + g[0][0] * g[2][2]
            - g[0][2] * g[2][0]
            + g[1][1] * g[2][2]
            - g[1][2] * g[2][1]
        )
        c0 = as_mpfr(determinant(g_m))
        hi = max(sum(abs(x) for x in row) for row in g)
        lam = _sym_eig_max_newton(c2, c1, c0, hi)
        return gmpy2.sqrt(max(lam, mpfr(0)))
    # power iteration on the Gram matrix
    starts = [tuple(mpfr(1) for _ in range(n))]
    starts += [tuple(mpfr(1 if i == k else 0) for i in range(n)) for k in range(n)]
    thresh = mpfr("1e-25")
    for v in starts:
        r_old = mpfr(0)
        ok = False
        for _ in range(20000):
            w = tuple(sum(g[i][j] * v[j] for j in range(n)) for i in range(n))
            wn_sq = sum(x * x for x in w)
            if wn_sq == 0:
                break
            wn = gmpy2.sqrt(wn_sq)
            v = tuple(x / wn for x in w)
            r = sum(v[i] * sum(g[i][j] * v[j] for j in range(n)) for i in range(n))
            if abs(r - r_old) <= thresh * max(mpfr(1), abs(r)):
                r_old = r
                ok = True
                break
            r_old = r
        if ok or r_old > 0:
            return gmpy2.sqrt(max(r_old, mpfr(0)))
    return mpfr(0)
