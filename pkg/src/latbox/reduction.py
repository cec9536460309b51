"""Basis reduction and complete short-vector enumeration.

LLL runs in exact rational arithmetic whenever the basis is exact, so
reduction introduces no rounding on rational lattices; irrational bases
reduce in mpfr at the working precision.  Enumeration is a depth-first
search over Gram-Schmidt coordinates of the LLL-reduced basis with the
radius inflated by (1 + 1e-20); candidates are then re-measured against
the original basis (exactly, when the data is exact) and filtered with
a strict norm < rho test, so the inflation can only add candidates that
the final filter re-judges.

Vectors come back as canonical +/- representatives: the reported
integer coordinate vector z (in the ORIGINAL basis) has its first
nonzero entry positive.  Sets are sorted by (norm, lexicographic z),
which pins down every downstream tie-break.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import BudgetExceededError, DegenerateLatticeError, LatboxError
from .linalg import LatticeBasis, Matrix, dot
from .precision import Scalar, as_mpfr, is_exact, to_scalar

DEFAULT_DELTA = mpq(99, 100)
DEFAULT_NODE_BUDGET = 10**8


@dataclass(frozen=True)
class LatticeVector:
    """One lattice vector: integer coordinates z in the original basis,
    the ambient vector v = B z, and its (squared) Euclidean length."""

    z: tuple
    v: tuple
    norm_sq: Scalar
    norm: mpfr

    def product(self) -> Scalar:
        """Product of all ambient coordinates (signed)."""
        p = to_scalar(1)
        for x in self.v:
            p = p * x
        return p


@dataclass(frozen=True)
class ShortVectorSet:
    """All canonical nonzero vectors with norm strictly below rho."""

    rho: Scalar
    entries: tuple

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)


def _iround(x) -> int:
    """Nearest integer, ties toward +infinity; exact for rationals."""
    if isinstance(x, (int, mpz)):
        return int(x)
    if isinstance(x, mpq):
        num, den = x.numerator, x.denominator
        return int((2 * num + den) // (2 * den))
    return int(gmpy2.floor(x + mpfr("0.5")))


def _gso(b: list) -> tuple:
    """Gram-Schmidt data of column list b (native arithmetic).

    Returns (mu, bstar, bstar_sq); mu[i][j] defined for j < i.
    """
    n = len(b)
    mu = [[None] * n for _ in range(n)]
    bstar: list = []
    bstar_sq: list = []
    for i in range(n):
        w = list(b[i])
        for j in range(i):
            if bstar_sq[j] == 0:
                raise DegenerateLatticeError("Gram-Schmidt hit a zero direction")
            m_ij = dot(b[i], bstar[j]) / bstar_sq[j]
            mu[i][j] = m_ij
            w = [wx - m_ij * sx for wx, sx in zip(w, bstar[j])]
        bstar.append(w)
        bstar_sq.append(dot(w, w))
    return mu, bstar, bstar_sq


def _lll_cols(cols: Sequence, delta) -> tuple:
    """LLL-reduce column vectors; returns (reduced_cols, U_cols) with
    reduced_j = sum_i U_cols[j][i] * original_i."""
    n = len(cols)
    exact = all(is_exact(x) for c in cols for x in c)
    if exact:
        b = [[mpq(x) for x in c] for c in cols]
        dl = mpq(to_scalar(delta))
    else:
        b = [[as_mpfr(x) for x in c] for c in cols]
        dl = as_mpfr(delta)
    u = [[mpz(1) if i == j else mpz(0) for i in range(n)] for j in range(n)]
    if n == 1:
        return [tuple(b[0])], [tuple(u[0])]
    k = 1
    guard = 20000 * n * n
    while k < n:
        guard -= 1
        if guard < 0:
            raise LatboxError("LLL failed to terminate (iteration guard hit)")
        mu, _, bsq = _gso(b)
        for j in range(k - 1, -1, -1):
            r = _iround(mu[k][j])
            if r != 0:
                b[k] = [x - r * y for x, y in zip(b[k], b[j])]
                u[k] = [x - r * y for x, y in zip(u[k], u[j])]
                mu, _, bsq = _gso(b)
        if bsq[k] >= (dl - mu[k][k - 1] * mu[k][k - 1]) * bsq[k - 1]:
            k += 1
        else:
            b[k], b[k - 1] = b[k - 1], b[k]
            u[k], u[k - 1] = u[k - 1], u[k]
            k = max(k - 1, 1)
    return [tuple(c) for c in b], [tuple(c) for c in u]


def lll_reduce(basis: LatticeBasis, delta=DEFAULT_DELTA) -> LatticeBasis:
    """LLL-reduced basis of the same lattice (delta defaults to 0.99)."""
    red, _ = _lll_cols(basis.matrix.cols(), delta)
    m = Matrix(list(zip(*red)))
    return LatticeBasis.create(m)


def _canonical_sign(z: tuple, v: tuple) -> tuple:
    for c in z:
        if c != 0:
            if c < 0:
                return tuple(-c for c in z), tuple(-x for x in v)
            break
    return z, v


def enumerate_below(
    basis: LatticeBasis, rho, node_budget: int = DEFAULT_NODE_BUDGET
) -> ShortVectorSet:
    """Every nonzero lattice vector with ||x||_2 < rho, one per +/- pair.

    Complete by the Gram-Schmidt pruning argument; the node budget
    aborts pathological searches with BudgetExceededError (partial
    count attached).
    """
    rho_s = to_scalar(rho)
    rho_f = as_mpfr(rho_s)
    if not rho_f > 0:
        raise LatboxError("enumeration radius must be positive")
    n = basis.n
    cols = basis.matrix.cols()
    red_cols, u_cols = _lll_cols(cols, DEFAULT_DELTA)
    fcols = [[as_mpfr(x) for x in c] for c in red_cols]
    mu, _, bsq = _gso(fcols)
    cap = (rho_f * (mpfr(1) + mpfr("1e-20"))) ** 2

    exact_filter = is_exact(rho_s) and basis.matrix.all_exact()
    rho_sq_native = rho_s * rho_s if exact_filter else rho_f * rho_f

    z_red = [0] * n
    found: list = []
    nodes = 0

    def descend(level: int, partial_sq: mpfr, all_zero: bool) -> None:
        nonlocal nodes
        if level < 0:
            if all_zero:
                return
            z_orig = tuple(
                int(sum(u_cols[j][i] * z_red[j] for j in range(n))) for i in range(n)
            )
            v = basis.matrix.matvec(tuple(mpz(c) for c in z_orig))
            nsq = dot(v, v)
            if (nsq if exact_filter else as_mpfr(nsq)) < rho_sq_native:
                zc, vc = _canonical_sign(z_orig, v)
                found.append((zc, vc, nsq))
            return
        room = cap - partial_sq
        if room < 0:
            return
        center = mpfr(0)
        for j in range(level + 1, n):
            if z_red[j]:
                center += mu[j][level] * z_red[j]
        half = gmpy2.sqrt(room / bsq[level])
        lo = int(gmpy2.ceil(-center - half))
        hi = int(gmpy2.floor(-center + half))
        if all_zero and lo < 0:
            lo = 0
        for zi in range(lo, hi + 1):
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceededError(
                    "enumeration node budget %d exceeded" % node_budget,
                    partial=len(found),
                )
            off = zi + center
            nxt = partial_sq + off * off * bsq[level]
            if nxt > cap:
                continue
            z_red[level] = zi
            descend(level - 1, nxt, all_zero and zi == 0)
        z_red[level] = 0

    descend(n - 1, mpfr(0), True)

    seen = {}
    for zc, vc, nsq in found:
        seen[zc] = (zc, vc, nsq)
    entries = [
        LatticeVector(z=zc, v=vc, norm_sq=nsq, norm=gmpy2.sqrt(as_mpfr(nsq)))
        for zc, vc, nsq in seen.values()
    ]
    entries.sort(key=lambda e: (as_mpfr(e.norm_sq), e.z))
    return ShortVectorSet(rho=rho_s, entries=tuple(entries))


def shortest_vector(basis: LatticeBasis, node_budget: int = DEFAULT_NODE_BUDGET) -> tuple:
    """(vector, lambda_1): a shortest nonzero lattice vector and its norm.

    Ties resolve to the lexicographically least canonical coordinate
    vector, so the answer is deterministic.
    """
    red_cols, _ = _lll_cols(basis.matrix.cols(), DEFAULT_DELTA)
    best = min(gmpy2.sqrt(sum(as_mpfr(x) ** 2 for x in c)) for c in red_cols)
    sv_set = enumerate_below(basis, best * (mpfr(1) + mpfr("1e-12")), node_budget=node_budget)
    if not sv_set.entries:
        raise LatboxError("enumeration lost the reduced basis vector (bug)")
    e = sv_set.entries[0]
    return e, e.norm


@dataclass(frozen=True)
class MinimaVector:
    """Successive minima lambda_1..lambda_n with witness vectors."""

    lambdas: tuple
    witnesses: tuple


def _echelon_add(echelon: list, z: tuple) -> bool:
    """Try to add integer vector z to a rational row echelon; True if it
    was independent (echelon extended)."""
    v = [mpq(c) for c in z]
    for lead, row in echelon:
        if v[lead] != 0:
            f = v[lead] / row[lead]
            v = [a - f * b for a, b in zip(v, row)]
    for idx, a in enumerate(v):
        if a != 0:
            echelon.append((idx, v))
            return True
    return False


def successive_minima(
    basis: LatticeBasis, node_budget: int = DEFAULT_NODE_BUDGET
) -> MinimaVector:
    """All n successive minima via one filtered enumeration.

    The max reduced-basis norm bounds lambda_n, so a single enumeration
    below it (slightly inflated) must contain n independent vectors; a
    greedy scan of the sorted list realizes each minimum.
    """
    n = basis.n
    red_cols, _ = _lll_cols(basis.matrix.cols(), DEFAULT_DELTA)
    radius = max(gmpy2.sqrt(sum(as_mpfr(x) ** 2 for x in c)) for c in red_cols)
    for _ in range(6):
        sv_set = enumerate_below(basis, radius * (mpfr(1) + mpfr("1e-12")), node_budget=node_budget)
        echelon: list = []
        chosen = []
        for e in sv_set.entries:
            if _echelon_add(echelon, e.z):
                chosen.append(e)
                if len(chosen) == n:
                    return MinimaVector(
                        lambdas=tuple(e.norm for e in chosen),
                        witnesses=tuple(chosen),
                    )
        radius = radius * 2
    raise LatboxError("failed to find n independent vectors (bug)")
