"""Primal/dual product-minimum comparison machinery.

The headline fact being exercised: when A^T S A = R for a signed
permutation S and an integer matrix R of determinant +-1, the map
w -> R w carries the lattice onto its dual preserving both the
Euclidean norm and the coordinate product of A w, so the product
minimum profiles of lattice and dual coincide.  In dimension two every
unimodular lattice qualifies with S = R = J (the symplectic form),
because A^T J A = det(A) J identically for 2x2 matrices.

The counterexample generator builds an n x n matrix whose row swap /
rescale makes the dual contain a vector with an exactly vanishing last
coordinate (a structurally repeated row kills the (n,n) minor), while
the primal stays clear of the coordinate hyperplanes: dual weak
admissibility genuinely is not inherited.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import DegenerateLatticeError, LatboxError, RhoBelowThresholdError
from .linalg import LatticeBasis, Matrix, determinant, dual_basis
from .numetrics import hermite_constant, nu_values
from .precision import Scalar, as_mpfr, to_scalar
from .reduction import DEFAULT_NODE_BUDGET

_INT_TOL = mpfr("1e-30")
_ENTRY_TOL = mpfr("1e-25")


def is_signed_permutation(s: Matrix) -> bool:
    """True iff s has exactly one entry within 1e-30 of +-1 per row and
    per column and all other entries within 1e-30 of 0."""
    n = s.n
    row_hits = [0] * n
    col_hits = [0] * n
    for i in range(n):
        for j in range(n):
            e = as_mpfr(s.entry(i, j))
            if abs(e) <= _INT_TOL:
                continue
            if abs(abs(e) - 1) <= _INT_TOL:
                row_hits[i] += 1
                col_hits[j] += 1
            else:
                return False
    return all(h == 1 for h in row_hits) and all(h == 1 for h in col_hits)


def _is_unimodular_integer_matrix(r: Matrix) -> bool:
    n = r.n
    rounded = []
    for i in range(n):
        row = []
        for j in range(n):
            e = as_mpfr(r.entry(i, j))
            k = int(gmpy2.floor(e + mpfr("0.5")))
            if abs(e - k) > _INT_TOL:
                return False
            row.append(k)
        rounded.append(row)
    det = determinant(Matrix(rounded))
    return abs(det) == 1


def verify_prop_conditions(a: Matrix, s: Matrix, r: Matrix) -> bool:
    """Check A^T S A = R (entrywise within 1e-25), S a signed
    permutation, R integral of determinant +-1."""
    if a.n != s.n or a.n != r.n:
        raise LatboxError("dimension mismatch between A, S, R")
    if determinant(a) == 0:
        raise DegenerateLatticeError("A must be nonsingular")
    if not is_signed_permutation(s):
        return False
    if not _is_unimodular_integer_matrix(r):
        return False
    prod = a.transpose() @ s @ a
    for i in range(a.n):
        for j in range(a.n):
            d = abs(as_mpfr(prod.entry(i, j)) - as_mpfr(r.entry(i, j)))
            if d > _ENTRY_TOL:
                return False
    return True


def symplectic_form(m: int) -> Matrix:
    """The 2m x 2m block matrix [[0, I],[-I, 0]]."""
    if m < 1:
        raise LatboxError("symplectic_form needs m >= 1")
    n = 2 * m
    rows = [[0] * n for _ in range(n)]
    for i in range(m):
        rows[i][m + i] = 1
        rows[m + i][i] = -1
    return Matrix(rows)


@dataclass(frozen=True)
class CompareRow:
    rho: mpfr
    nu_primal: Scalar
    nu_dual: Scalar
    abs_diff: mpfr


def nu_profile_compare(
    basis: LatticeBasis, rho_grid, node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple:
    """(max |nu(L,rho) - nu(dual,rho)|, per-rho table) over the grid.

    Equality across the table is the dimension-two phenomenon; in
    higher dimensions the discrepancy is typically nonzero and is
    reported, not judged.
    """
    if not basis.unimodular:
        raise LatboxError("nu_profile_compare expects a unimodular basis")
    grid = [as_mpfr(to_scalar(r)) for r in rho_grid]
    if not grid:
        raise LatboxError("empty rho grid")
    thresh = gmpy2.sqrt(hermite_constant(basis.n).value)
    for g in grid:
        if not g > thresh:
            raise RhoBelowThresholdError(
                "grid radius %s does not exceed the Hermite threshold %s" % (g, thresh)
            )
    dual = dual_basis(basis)
    primal_vals = nu_values(basis, grid, node_budget=node_budget)
    dual_vals = nu_values(dual, grid, node_budget=node_budget)
    table = []
    worst = mpfr(0)
    for g, pv, dv in zip(grid, primal_vals, dual_vals):
        diff = abs(as_mpfr(pv.value) - as_mpfr(dv.value))
        if diff > worst:
            worst = diff
        table.append(
            CompareRow(rho=g, nu_primal=pv.value, nu_dual=dv.value, abs_diff=diff)
        )
    return worst, tuple(table)


_DIGITS = "0123456789"


def _random_decimal(rng: random.Random) -> mpq:
    """A 50-digit random decimal in (0,1), exact."""
    digits = "".join(rng.choice(_DIGITS) for _ in range(50))
    return mpq(int(digits), 10**50)


def example31_build(n: int, seed: int) -> LatticeBasis:
    """A unimodular lattice whose dual provably meets a coordinate
    hyperplane while the lattice itself is (generically) clear of them.

    Construction: draw an (n-1) x (n-1) block and an extra column from
    seeded 50-digit random decimals, repeat the block's last row as the
    bottom row (fresh last entry), swap first and last rows, rescale to
    determinant +-1.  The repeated row forces the (n,n) minor to vanish,
    so the dual basis has an exactly-zero (n,n) entry.
    """
    if n < 3:
        raise LatboxError("example31_build needs n >= 3")
    rng = random.Random(seed)
    for _ in range(10):
        block = [[_random_decimal(rng) for _ in range(n - 1)] for _ in range(n - 1)]
        x_col = [_random_decimal(rng) for _ in range(n - 1)]
        y_val = _random_decimal(rng)
        if y_val == x_col[-1]:
            continue
        rows = [list(block[i]) + [x_col[i]] for i in range(n - 1)]
        rows.append(list(block[-1]) + [y_val])
        a0 = Matrix(rows)
        det0 = determinant(a0)
        if abs(as_mpfr(det0)) < mpfr("1e-6"):
            continue
        swapped = [rows[-1]] + rows[1:-1] + [rows[0]]
        scale = 1 / gmpy2.root(abs(as_mpfr(det0)), n)
        scaled = Matrix([[scale * e for e in row] for row in swapped])
        basis = LatticeBasis.create(scaled)
        if not basis.unimodular:
            raise LatboxError("rescaled basis failed the unimodularity check")
        dual_entry = as_mpfr(dual_basis(basis).matrix.entry(n - 1, n - 1))
        if not abs(dual_entry) <= mpfr("1e-40"):
            raise LatboxError(
                "dual (n,n) entry %s did not vanish; construction bug" % dual_entry
            )
        return basis
    raise DegenerateLatticeError("degenerate draws 10 times in a row; bad seed")
