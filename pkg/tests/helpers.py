"""Shared test utilities: seeded random instances and brute-force oracles.

The oracles here are deliberately written against the definitions, not
against the library's algorithms: box counting walks an integer preimage
hull with exact rational membership tests, and short-vector enumeration
scans a coordinate box derived from inverse row norms.  Agreement between
the two code paths is therefore meaningful evidence.
"""

import itertools
import random

import gmpy2
from gmpy2 import mpfr, mpq

from latbox import LatticeBasis, Matrix, as_mpfr, determinant, inverse

# ---------------------------------------------------------------------------
# random instances


def make_rng(seed: int) -> random.Random:
    return random.Random(seed)


def rand_mpq(rng: random.Random, hi: int = 3, den_hi: int = 7) -> mpq:
    num = rng.randrange(-hi * den_hi, hi * den_hi + 1)
    den = rng.randrange(1, den_hi + 1)
    return mpq(num, den)


def random_exact_matrix(rng: random.Random, n: int, hi: int = 3, den_hi: int = 7) -> Matrix:
    return Matrix([[rand_mpq(rng, hi, den_hi) for _ in range(n)] for _ in range(n)])


def random_exact_basis(rng: random.Random, n: int, det_floor=mpq(1, 4)) -> LatticeBasis:
    """Random exact rational basis with |det| bounded away from zero."""
    while True:
        m = random_exact_matrix(rng, n)
        d = determinant(m)
        if abs(d) >= det_floor:
            return LatticeBasis.create(m)


def random_unimodular_basis(rng: random.Random, n: int) -> LatticeBasis:
    """Random covolume-1 basis: rational draw rescaled by |det|^(-1/n).

    The rescale keeps the lattice "generic" (no integer structure), unlike
    drawing an integer unimodular matrix, which would always generate Z^n.
    """
    while True:
        m = random_exact_matrix(rng, n)
        d = determinant(m)
        if mpq(1, 4) <= abs(d) <= 4**n:
            break
    s = 1 / gmpy2.root(as_mpfr(abs(d)), n)
    basis = LatticeBasis.create(m.scale(s))
    assert basis.unimodular
    return basis


# ---------------------------------------------------------------------------
# box-count oracle


def _floor_q(x: mpq) -> int:
    return int(x.numerator // x.denominator)


def _ceil_q(x: mpq) -> int:
    return -int((-x.numerator) // x.denominator)


def brute_count_box(basis: LatticeBasis, box, limit=None):
    """Exact closed-box lattice point count by exhaustive preimage scan.

    The preimage of the box under the (exact rational) basis is contained
    in the convex hull of the preimages of the 2^n box corners, so integer
    coordinate ranges from that hull are complete.  Returns None when the
    scan would exceed `limit` candidate points.
    """
    assert basis.matrix.all_exact(), "oracle needs an exact basis"
    n = basis.n
    inv = inverse(basis.matrix)
    lows = [None] * n
    highs = [None] * n
    corner_axes = [(mpq(y), mpq(y) + mpq(t)) for y, t in zip(box.y, box.t)]
    for corner in itertools.product(*corner_axes):
        z = inv.matvec(corner)
        for i, c in enumerate(z):
            if lows[i] is None or c < lows[i]:
                lows[i] = c
            if highs[i] is None or c > highs[i]:
                highs[i] = c
    ranges = []
    total = 1
    for i in range(n):
        lo = _ceil_q(mpq(lows[i]))
        hi = _floor_q(mpq(highs[i]))
        ranges.append(range(lo, hi + 1))
        total *= max(0, hi - lo + 1)
    if limit is not None and total > limit:
        return None
    count = 0
    mat = basis.matrix
    for z in itertools.product(*ranges):
        x = mat.matvec(z)
        ok = True
        for xi, (lo_c, hi_c) in zip(x, corner_axes):
            if not (lo_c <= xi <= hi_c):
                ok = False
                break
        if ok:
            count += 1
    return count


# ---------------------------------------------------------------------------
# short-vector / nu oracles


def brute_short_vectors(basis: LatticeBasis, rho):
    """All canonical z with 0 < ||Bz|| < rho, by coordinate-box scan.

    |z_i| <= ||row_i(B^-1)|| * rho by Cauchy-Schwarz, so the scan box is
    complete.  Exact bases only; returns a set of coordinate tuples with
    the first nonzero coordinate positive.
    """
    assert basis.matrix.all_exact(), "oracle needs an exact basis"
    n = basis.n
    inv = inverse(basis.matrix)
    rho_f = as_mpfr(rho)
    rho_sq = mpq(rho) * mpq(rho) if not isinstance(rho, mpfr) else rho_f * rho_f
    ks = []
    for i in range(n):
        row_norm = gmpy2.sqrt(sum(as_mpfr(c) ** 2 for c in inv.row(i)))
        ks.append(int(gmpy2.ceil(row_norm * rho_f)))
    out = set()
    mat = basis.matrix
    for z in itertools.product(*(range(-k, k + 1) for k in ks)):
        if all(c == 0 for c in z):
            continue
        x = mat.matvec(z)
        nsq = sum(c * c for c in x)
        if isinstance(rho_sq, mpq):
            inside = 0 < nsq < rho_sq
        else:
            inside = 0 < as_mpfr(nsq) < rho_sq
        if inside:
            for c in z:
                if c != 0:
                    if c < 0:
                        z = tuple(-w for w in z)
                    break
            out.add(tuple(int(c) for c in z))
    return out


def brute_nu(basis: LatticeBasis, rho):
    """min |x_1 * ... * x_n| over 0 < ||x|| < rho, straight from the scan."""
    best = None
    for z in brute_short_vectors(basis, rho):
        x = basis.matrix.matvec(z)
        p = mpq(1)
        for c in x:
            p = p * abs(c)
        if best is None or p < best:
            best = p
    return best


# ---------------------------------------------------------------------------
# misc


def mpfr_close(a, b, tol) -> bool:
    return abs(as_mpfr(a) - as_mpfr(b)) <= as_mpfr(tol)
