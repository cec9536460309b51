"""Product-minimum metrics: nu, dyadic dilation families, and their sums.

nu(L, rho) is the least |x_1 * ... * x_n| over nonzero lattice vectors
of Euclidean length below rho.  It is the quantitative measure of how
far the lattice stays from the coordinate hyperplanes: it is positive
for every rho exactly when no nonzero lattice vector lies on a
coordinate hyperplane.

Two evaluation strategies:

  * direct: enumerate every vector below rho and minimize.  Right
    whenever the ball holds a manageable number of lattice points.
  * dyadic rebalancing (n = 2 only): for huge rho the ball holds ~rho^2
    points but the minimizers are nearly balanced after a dyadic
    diagonal scaling.  Scaling by diag(2^-m, 2^m) preserves the
    coordinate product, and a vector x with |product| <= U lands within
    radius 2*sqrt(U) of the origin at its balance level m(x) ~
    log4|x1/x2|.  Searching levels |m| <= ceil(log2(rho/sqrt(U))) + 1
    with the running best U is complete: in-range ratios are caught at
    their balance level, and at the extreme level both coordinates of
    any remaining candidate are forced under the enumeration radius
    (coordinate 1 because 2^-m|x1| <= rho/2^m, coordinate 2 because the
    product cap makes it tiny).  The search re-extends the level range
    whenever the best value improves, so it terminates at a fixed point
    where range and value are mutually consistent.

The delta family for a radius r is the set of determinant-one integer
dyadic diagonal scalings diag(2^m1, ..., 2^mn), sum m_i = 0, |m| < r;
s_sum accumulates lambda_1(delta L)^-n over the family.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import (
    BudgetExceededError,
    EmptyCandidateSetError,
    LatboxError,
    RhoBelowThresholdError,
)
from .linalg import LatticeBasis, Matrix
from .precision import Scalar, as_mpfr, is_exact, to_scalar
from .reduction import (
    DEFAULT_NODE_BUDGET,
    LatticeVector,
    enumerate_below,
    shortest_vector,
)

# exact n-th powers of the Hermite constants, n = 1..8
_HERMITE_POWERS = {
    1: mpq(1),
    2: mpq(4, 3),
    3: mpq(2),
    4: mpq(4),
    5: mpq(8),
    6: mpq(64, 3),
    7: mpq(64),
    8: mpq(256),
}

_DIRECT_NODE_ESTIMATE_CAP = 250_000


@dataclass(frozen=True)
class HermiteConstant:
    n: int
    value: mpfr
    exact: bool


def hermite_constant(n: int) -> HermiteConstant:
    """gamma_n, exact for n <= 8; a classical upper bound above that,
    flagged exact=False because only the bound is certified."""
    if n < 1:
        raise LatboxError("hermite_constant needs n >= 1")
    if n in _HERMITE_POWERS:
        val = gmpy2.root(as_mpfr(_HERMITE_POWERS[n]), n)
        return HermiteConstant(n=n, value=val, exact=True)
    val = as_mpfr(mpq(4, 3)) ** (mpq(n - 1, 2))
    return HermiteConstant(n=n, value=val, exact=False)


def star(x, n: int) -> mpfr:
    """max(gamma_n, x), the floor applied to radii inside the bounds."""
    g = hermite_constant(n).value
    xf = as_mpfr(x)
    return xf if xf > g else g


@dataclass(frozen=True)
class NuResult:
    value: Scalar
    minimizer: LatticeVector
    rho: Scalar


def _abs_product(v: tuple) -> Scalar:
    p = to_scalar(1)
    for x in v:
        p = p * x
    return abs(p)


def _ball_point_estimate(n: int, rho_f: mpfr, covol: mpfr) -> float:
    try:
        r = float(rho_f)
        c = float(covol)
    except (OverflowError, ValueError):
        return float("inf")
    if c <= 0 or math.isinf(r):
        return float("inf")
    vol = math.pi ** (n / 2.0) / math.gamma(n / 2.0 + 1.0) * r**n
    return vol / (2.0 * c)


def _pow2(m: int) -> mpq:
    return mpq(2) ** m if m >= 0 else mpq(1, 2 ** (-m))


def dyadic_scale(basis: LatticeBasis, exponents) -> LatticeBasis:
    """Row-scale the basis by exact powers of two: row i by 2^exponents[i].

    Multiplying by a power of two is exact in binary floating point, so
    the scaled lattice carries no extra rounding even on mpfr bases.
    """
    exps = tuple(int(m) for m in exponents)
    if len(exps) != basis.n:
        raise LatboxError("dyadic_scale: need one exponent per dimension")
    rows = [
        tuple(_pow2(m) * e for e in row) for m, row in zip(exps, basis.matrix.rows)
    ]
    return LatticeBasis.create(Matrix(rows))


def _min_entry(entries, rho_sq_cmp, exact_cmp: bool):
    """Minimize (|product|, norm, z) over entries with norm < rho."""
    best = None
    best_key = None
    for e in entries:
        nsq = e.norm_sq
        if exact_cmp and is_exact(nsq):
            if not nsq < rho_sq_cmp:
                continue
        else:
            if not as_mpfr(nsq) < as_mpfr(rho_sq_cmp):
                continue
        val = _abs_product(e.v)
        key = (as_mpfr(val), as_mpfr(nsq), e.z)
        if best_key is None or key < best_key:
            best = (val, e)
            best_key = key
    return best


def _nu_direct(basis: LatticeBasis, rho_s, node_budget: int) -> NuResult:
    sv_set = enumerate_below(basis, rho_s, node_budget=node_budget)
    if not sv_set.entries:
        raise EmptyCandidateSetError(
            "no nonzero lattice vector below rho = %s" % rho_s
        )
    exact_cmp = is_exact(rho_s) and basis.matrix.all_exact()
    got = _min_entry(sv_set.entries, rho_s * rho_s, exact_cmp)
    val, e = got
    return NuResult(value=val, minimizer=e, rho=rho_s)


def _nu_dyadic_2d(basis: LatticeBasis, rho_s, node_budget: int) -> NuResult:
    """Large-radius nu for n = 2 via dyadic rebalancing (see module doc)."""
    rho_f = as_mpfr(rho_s)
    sv, lam1 = shortest_vector(basis)
    if not lam1 < rho_f:
        raise EmptyCandidateSetError(
            "no nonzero lattice vector below rho = %s" % rho_s
        )
    exact_cmp = is_exact(rho_s) and basis.matrix.all_exact()
    rho_sq_cmp = rho_s * rho_s if exact_cmp else rho_f * rho_f

    best_val = _abs_product(sv.v)
    best_entry = sv
    best_key = (as_mpfr(best_val), as_mpfr(sv.norm_sq), sv.z)

    def level_cap() -> int:
        if as_mpfr(best_val) <= 0:
            return 0
        ratio = rho_f / gmpy2.sqrt(as_mpfr(best_val))
        if ratio <= 1:
            return 1
        return int(gmpy2.ceil(gmpy2.log2(ratio))) + 1

    inflate = mpfr(1) + mpfr("1e-10")
    visited = set()
    i = 0
    while as_mpfr(best_val) > 0 and i <= level_cap():
        for m in ((i,) if i == 0 else (i, -i)):
            if m in visited:
                continue
            visited.add(m)
            scaled = dyadic_scale(basis, (-m, m))
            radius = 2 * gmpy2.sqrt(as_mpfr(best_val)) * inflate
            sub = enumerate_below(scaled, radius, node_budget=node_budget)
            for e in sub.entries:
                v = basis.matrix.matvec(tuple(mpz(c) for c in e.z))
                nsq = sum(x * x for x in v)
                if exact_cmp and is_exact(nsq):
                    if not nsq < rho_sq_cmp:
                        continue
                else:
                    if not as_mpfr(nsq) < as_mpfr(rho_sq_cmp):
                        continue
                val = _abs_product(v)
                key = (as_mpfr(val), as_mpfr(nsq), e.z)
                if key < best_key:
                    best_key = key
                    best_val = val
                    best_entry = LatticeVector(
                        z=e.z, v=v, norm_sq=nsq, norm=gmpy2.sqrt(as_mpfr(nsq))
                    )
            if as_mpfr(best_val) <= 0:
                break
        i += 1
    return NuResult(value=best_val, minimizer=best_entry, rho=rho_s)


def nu(basis: LatticeBasis, rho, node_budget: int = DEFAULT_NODE_BUDGET) -> NuResult:
    """Least |coordinate product| over nonzero lattice vectors shorter
    than rho, with the achieving vector.

    For unimodular bases rho must exceed sqrt(gamma_n); below that the
    ball can be empty and the quantity is not the one the bounds use.
    Ties resolve by (product, norm, lexicographic z).
    """
    rho_s = to_scalar(rho)
    rho_f = as_mpfr(rho_s)
    n = basis.n
    if basis.unimodular:
        thresh = gmpy2.sqrt(hermite_constant(n).value)
        if not rho_f > thresh:
            raise RhoBelowThresholdError(
                "rho = %s does not exceed the Hermite threshold %s" % (rho_f, thresh)
            )
    estimate = _ball_point_estimate(n, rho_f, abs(as_mpfr(basis.det)))
    if n == 2 and estimate > _DIRECT_NODE_ESTIMATE_CAP:
        return _nu_dyadic_2d(basis, rho_s, node_budget)
    return _nu_direct(basis, rho_s, node_budget)


@dataclass(frozen=True)
class DeltaFamily:
    """Integer exponent vectors m (sum zero, |m|_2 < r) of the dyadic
    diagonal scalings with determinant one."""

    n: int
    r: Scalar
    members: tuple

    def __len__(self) -> int:
        return len(self.members)


def delta_set(n: int, r) -> DeltaFamily:
    """All m in Z^n with sum(m) = 0 and ||m||_2 < r, sorted lex."""
    if n < 1:
        raise LatboxError("delta_set needs n >= 1")
    r_s = to_scalar(r)
    r_sq = r_s * r_s
    if as_mpfr(r_s) <= 0:
        return DeltaFamily(n=n, r=r_s, members=())
    # coordinate prefilter only; the strict norm test below decides
    k_max = int(gmpy2.ceil(as_mpfr(r_s)))

    def norm_ok(sq: int) -> bool:
        if is_exact(r_sq):
            return sq < r_sq
        return mpfr(sq) < as_mpfr(r_sq)

    members = []
    prefix = [0] * n

    def rec(idx: int, sq_acc: int, sum_acc: int) -> None:
        if idx == n - 1:
            last = -sum_acc
            tot = sq_acc + last * last
            if abs(last) <= k_max and norm_ok(tot):
                prefix[idx] = last
                members.append(tuple(prefix))
            return
        for m in range(-k_max, k_max + 1):
            sq = sq_acc + m * m
            if not norm_ok(sq):
                continue
            prefix[idx] = m
            rec(idx + 1, sq, sum_acc + m)

    rec(0, 0, 0)
    members.sort()
    return DeltaFamily(n=n, r=r_s, members=tuple(members))


@dataclass(frozen=True)
class SSumResult:
    total: mpfr
    member_count: int
    max_term: mpfr
    r: Scalar


def s_sum(basis: LatticeBasis, r, node_budget: int = DEFAULT_NODE_BUDGET) -> SSumResult:
    """sum over the delta family of lambda_1(delta L)^(-n)."""
    fam = delta_set(basis.n, r)
    if not fam.members:
        return SSumResult(total=mpfr(0), member_count=0, max_term=mpfr(0), r=fam.r)
    total = mpfr(0)
    max_term = mpfr(0)
    for m in fam.members:
        scaled = dyadic_scale(basis, m)
        try:
            _, lam1 = shortest_vector(scaled, node_budget=node_budget)
        except BudgetExceededError as exc:
            raise BudgetExceededError(
                "s_sum aborted at delta exponents %s: %s" % (m, exc), partial=total
            ) from exc
        term = lam1 ** (-basis.n)
        total += term
        if term > max_term:
            max_term = term
    return SSumResult(total=total, member_count=len(fam.members), max_term=max_term, r=fam.r)


def nu_values(
    basis: LatticeBasis, rho_list, node_budget: int = DEFAULT_NODE_BUDGET
) -> tuple:
    """nu at several radii from one shared enumeration.

    One enumeration at the largest radius plus an ascending running
    minimum reproduces the direct evaluator's value and tie-break on
    every grid point, because both minimize the same key over the same
    vector set.
    """
    radii = [as_mpfr(to_scalar(r)) for r in rho_list]
    if not radii:
        raise LatboxError("empty radius list")
    if basis.unimodular:
        thresh = gmpy2.sqrt(hermite_constant(basis.n).value)
        for g in radii:
            if not g > thresh:
                raise RhoBelowThresholdError(
                    "radius %s does not exceed the Hermite threshold %s" % (g, thresh)
                )
    hi = max(radii)
    sv_set = enumerate_below(basis, hi, node_budget=node_budget)
    entries = sv_set.entries
    order = sorted(range(len(radii)), key=lambda i: radii[i])
    results: list = [None] * len(radii)
    ptr = 0
    best = None
    best_key = None
    for idx in order:
        g = radii[idx]
        g_sq = g * g
        while ptr < len(entries) and as_mpfr(entries[ptr].norm_sq) < g_sq:
            e = entries[ptr]
            val = _abs_product(e.v)
            key = (as_mpfr(val), as_mpfr(e.norm_sq), e.z)
            if best_key is None or key < best_key:
                best_key = key
                best = (val, e)
            ptr += 1
        if best is None:
            raise EmptyCandidateSetError(
                "no nonzero lattice vector below radius %s" % g
            )
        results[idx] = NuResult(value=best[0], minimizer=best[1], rho=g)
    return tuple(results)


@dataclass(frozen=True)
class ProfileRow:
    rho: mpfr
    value: Scalar
    minimizer: LatticeVector
    zero_flag: bool


@dataclass(frozen=True)
class NuProfile:
    rows: tuple
    flagged: bool

    def flagged_rows(self) -> tuple:
        return tuple(row for row in self.rows if row.zero_flag)


_ZERO_COORD_REL = mpfr("1e-30")


def _has_tiny_coordinate(e: LatticeVector) -> bool:
    nrm = e.norm
    if nrm == 0:
        return True
    return any(abs(as_mpfr(x)) <= _ZERO_COORD_REL * nrm for x in e.v)


def weak_admissibility_probe(
    basis: LatticeBasis,
    rho_max,
    grid_points: int = 30,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> NuProfile:
    """nu along a geometric radius grid, flagging minimizers that sit on
    (or within 1e-30 relative of) a coordinate hyperplane.

    A flagged row is the numerical witness that the lattice is not
    weakly admissible; a clean profile up to rho_max is evidence (never
    proof) that it is.  Requires a unimodular basis so the grid can
    anchor at the Hermite threshold.
    """
    if not basis.unimodular:
        raise LatboxError("weak_admissibility_probe expects a unimodular basis")
    if grid_points < 1:
        raise LatboxError("grid_points must be positive")
    n = basis.n
    lo = gmpy2.sqrt(hermite_constant(n).value) * (mpfr(1) + mpfr("1e-3"))
    hi = as_mpfr(rho_max)
    if not hi > lo:
        raise RhoBelowThresholdError(
            "rho_max = %s does not exceed the Hermite threshold" % hi
        )
    if grid_points == 1:
        grid = [hi]
    else:
        step = (hi / lo) ** (mpfr(1) / (grid_points - 1))
        grid = [lo * step**i for i in range(grid_points - 1)] + [hi]
    values = nu_values(basis, grid, node_budget=node_budget)
    rows = []
    for rho_g, res in zip(grid, values):
        rows.append(
            ProfileRow(
                rho=rho_g,
                value=res.value,
                minimizer=res.minimizer,
                zero_flag=_has_tiny_coordinate(res.minimizer),
            )
        )
    return NuProfile(rows=tuple(rows), flagged=any(r.zero_flag for r in rows))
