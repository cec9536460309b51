"""Axis-aligned boxes, exact lattice point counts, and the two
error-bound evaluators.

A box is the closed product of [y_i, y_i + t_i]; all faces count.
Counting maps the box into integer coordinates z (via the basis
inverse), then runs a recursive coordinate-interval descent: at each
depth the next coordinate is bracketed by extremizing every row's
linear functional over the still-free coordinates' global ranges.  The
bracket only has to be complete, never tight, because each surviving
candidate is re-checked directly against every face at the end, in
exact arithmetic whenever the lattice and box are exact.

Membership is widened by 1e-25 * t_i per face: points inside the band
around a face are counted AND reported as boundary warnings, so a
caller can audit any judgment call the tolerance made.

The bound evaluators assemble, per the inhomogeneous error estimate,

    (vol^{1-1/n}/sqrt(rho) + R^{n-1}/nu(dual, 2^R T)) / nu(dual, T*)

with R = n^2 + ln(rho^n / nu(dual, rho T)), and, per the homogeneous
one at scale t with vol(B) = 1,

    (|dB| lambda_n)^n * (t^{n-1}/sqrt(rho) + S(dual, r)),

with r = n^2 + ln(rho^n / nu(dual, rho)).  Every intermediate quantity
is recorded in the report so each formula can be re-derived from its
own output.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Sequence

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .errors import (
    AssumptionViolationError,
    BudgetExceededError,
    LatboxError,
    NotWeaklyAdmissibleError,
    RhoBelowThresholdError,
)
from .linalg import LatticeBasis, Matrix, dual_basis, inverse
from .numetrics import hermite_constant, nu, s_sum, star
from .precision import Scalar, as_mpfr, is_exact, simplify, to_scalar
from .reduction import successive_minima

DEFAULT_COUNT_BUDGET = 10**9

_FACE_TOL = mpq(1, 10**25)


@dataclass(frozen=True)
class AlignedBox:
    """Closed axis-parallel box: product of [y_i, y_i + t_i], t_i > 0."""

    t: tuple
    y: tuple

    def __init__(self, t: Sequence, y: Sequence):
        tt = tuple(to_scalar(x) for x in t)
        yy = tuple(to_scalar(x) for x in y)
        if len(tt) != len(yy) or not tt:
            raise LatboxError("box needs matching nonempty t and y")
        if any(not as_mpfr(x) > 0 for x in tt):
            raise LatboxError("box side lengths must be positive")
        object.__setattr__(self, "t", tt)
        object.__setattr__(self, "y", yy)

    @property
    def n(self) -> int:
        return len(self.t)

    def all_exact(self) -> bool:
        return all(is_exact(x) for x in self.t) and all(is_exact(x) for x in self.y)

    def translate(self, v: Sequence) -> "AlignedBox":
        return AlignedBox(self.t, tuple(a + to_scalar(b) for a, b in zip(self.y, v)))

    def scale(self, c) -> "AlignedBox":
        """Homothety about the origin: c * B."""
        c = to_scalar(c)
        if not as_mpfr(c) > 0:
            raise LatboxError("scale factor must be positive")
        return AlignedBox(
            tuple(c * x for x in self.t), tuple(c * x for x in self.y)
        )


def volume(box: AlignedBox) -> Scalar:
    p = to_scalar(1)
    for x in box.t:
        p = p * x
    return simplify(p) if is_exact(p) else p


def t_quantity(box: AlignedBox) -> mpfr:
    """Anisotropy of the box: (product of sides)^{1/n} / shortest side."""
    n = box.n
    vol_f = as_mpfr(volume(box))
    tmin = min(as_mpfr(x) for x in box.t)
    val = gmpy2.root(vol_f, n) / tmin
    if not val > 1 - mpfr("1e-40"):
        raise LatboxError("t_quantity below 1: impossible for positive sides")
    return val


def surface_area(box: AlignedBox) -> Scalar:
    """2 * sum over i of the product of the other side lengths."""
    n = box.n
    total = to_scalar(0)
    for i in range(n):
        p = to_scalar(1)
        for j in range(n):
            if j != i:
                p = p * box.t[j]
        total = total + p
    total = 2 * total
    return simplify(total) if is_exact(total) else total


class CountResult(NamedTuple):
    count: int
    boundary_warnings: tuple


def _iceil(x) -> int:
    if isinstance(x, (int, mpz)):
        return int(x)
    if isinstance(x, mpq):
        return int(-((-x.numerator) // x.denominator))
    return int(gmpy2.ceil(x))


def _ifloor(x) -> int:
    if isinstance(x, (int, mpz)):
        return int(x)
    if isinstance(x, mpq):
        return int(x.numerator // x.denominator)
    return int(gmpy2.floor(x))


def count_points(
    basis: LatticeBasis, box: AlignedBox, node_budget: int = DEFAULT_COUNT_BUDGET
) -> CountResult:
    """Exact number of lattice points in the closed box.

    Points within 1e-25 * t_i of face i are counted and reported as
    (z, coordinate index, "low"/"high") warnings.  Candidate loops are
    capped by node_budget.
    """
    n = basis.n
    if box.n != n:
        raise LatboxError("lattice dimension %d vs box dimension %d" % (n, box.n))
    exact = basis.matrix.all_exact() and box.all_exact()
    if exact:
        a = [[mpq(e) for e in row] for row in basis.matrix.rows]
        lo = [mpq(v) for v in box.y]
        hi = [lo[j] + mpq(box.t[j]) for j in range(n)]
        tol = [mpq(box.t[j]) * _FACE_TOL for j in range(n)]
        pad = mpq(0)
    else:
        a = [[as_mpfr(e) for e in row] for row in basis.matrix.rows]
        lo = [as_mpfr(v) for v in box.y]
        hi = [lo[j] + as_mpfr(box.t[j]) for j in range(n)]
        tol = [as_mpfr(box.t[j]) * as_mpfr(_FACE_TOL) for j in range(n)]
        pad = mpfr("1e-30")
    lo_w = [lo[j] - tol[j] for j in range(n)]
    hi_w = [hi[j] + tol[j] for j in range(n)]

    c_inv = inverse(basis.matrix)
    c = (
        [[mpq(e) for e in row] for row in c_inv.rows]
        if exact
        else [[as_mpfr(e) for e in row] for row in c_inv.rows]
    )

    def hull(coef, xlo, xhi):
        p, q = coef * xlo, coef * xhi
        return (p, q) if p <= q else (q, p)

    z_lo = [0] * n
    z_hi = [0] * n
    for k in range(n):
        g_lo = to_scalar(0)
        g_hi = to_scalar(0)
        for j in range(n):
            h = hull(c[k][j], lo_w[j], hi_w[j])
            g_lo = g_lo + h[0]
            g_hi = g_hi + h[1]
        slack = pad * (1 + abs(g_lo) + abs(g_hi))
        z_lo[k] = _iceil(g_lo - slack)
        z_hi[k] = _ifloor(g_hi + slack)
        if z_lo[k] > z_hi[k]:
            return CountResult(count=0, boundary_warnings=())

    # w_free[j][k]: hull of sum_{i<k} a[j][i] * z_i over the global ranges
    w_free = [[None] * (n + 1) for _ in range(n)]
    for j in range(n):
        acc_lo = to_scalar(0)
        acc_hi = to_scalar(0)
        w_free[j][0] = (acc_lo, acc_hi)
        for i in range(n):
            h = hull(a[j][i], z_lo[i], z_hi[i])
            acc_lo = acc_lo + h[0]
            acc_hi = acc_hi + h[1]
            w_free[j][i + 1] = (acc_lo, acc_hi)

    rows_at = [
        [(j, a[j][k], 1 / a[j][k]) for j in range(n) if a[j][k] != 0] for k in range(n)
    ]

    f = [to_scalar(0)] * n
    z = [0] * n
    warnings: list = []
    count = 0
    nodes = 0

    def leaf_check() -> None:
        nonlocal count
        vals = [f[j] for j in range(n)]
        for j in range(n):
            if not (lo_w[j] <= vals[j] <= hi_w[j]):
                return
        count += 1
        zt = tuple(z)
        for j in range(n):
            if abs(vals[j] - lo[j]) <= tol[j]:
                warnings.append((zt, j, "low"))
            if abs(hi[j] - vals[j]) <= tol[j]:
                warnings.append((zt, j, "high"))

    def descend(k: int) -> None:
        nonlocal nodes
        lo_k, hi_k = z_lo[k], z_hi[k]
        for j, coef, coef_inv in rows_at[k]:
            wfree_lo, wfree_hi = w_free[j][k]
            num_lo = lo_w[j] - f[j] - wfree_hi
            num_hi = hi_w[j] - f[j] - wfree_lo
            bnd_a = num_lo * coef_inv
            bnd_b = num_hi * coef_inv
            if coef < 0:
                bnd_a, bnd_b = bnd_b, bnd_a
            slack = pad * (1 + abs(bnd_a) + abs(bnd_b))
            cand_lo = _iceil(bnd_a - slack)
            cand_hi = _ifloor(bnd_b + slack)
            if cand_lo > lo_k:
                lo_k = cand_lo
            if cand_hi < hi_k:
                hi_k = cand_hi
            if lo_k > hi_k:
                return
        saved = [f[j] for j in range(n)]
        for zk in range(lo_k, hi_k + 1):
            nodes += 1
            if nodes > node_budget:
                raise BudgetExceededError(
                    "count budget %d exceeded" % node_budget, partial=count
                )
            z[k] = zk
            for j in range(n):
                f[j] = saved[j] + a[j][k] * zk
            if k == 0:
                leaf_check()
            else:
                descend(k - 1)
        for j in range(n):
            f[j] = saved[j]

    descend(n - 1)
    return CountResult(count=count, boundary_warnings=tuple(warnings))


class NormalizedSystem(NamedTuple):
    u: Matrix
    lattice: LatticeBasis
    tbar: mpfr


def normalize(basis: LatticeBasis, box: AlignedBox) -> NormalizedSystem:
    """The cube-normalizing change of scale U = tbar * diag(1/t_i).

    U maps the box to a cube of side tbar = volume^{1/n} (translated to
    U y), and the lattice to U L with the same covolume; counting is
    invariant under the simultaneous transform.  ||U||_2 equals the
    box's t_quantity.
    """
    if basis.n != box.n:
        raise LatboxError("dimension mismatch")
    n = box.n
    tbar = gmpy2.root(as_mpfr(volume(box)), n)
    u = Matrix.diagonal([tbar / as_mpfr(x) for x in box.t])
    lam = LatticeBasis.create(u @ basis.matrix)
    return NormalizedSystem(u=u, lattice=lam, tbar=tbar)


@dataclass(frozen=True)
class BoundReport:
    """Every intermediate of the inhomogeneous error-bound evaluation."""

    count: int
    volume: Scalar
    abs_error: mpfr
    T: mpfr
    T_star: mpfr
    rho: mpfr
    rho_T: mpfr
    nu_Tstar: mpfr
    nu_rhoT: mpfr
    R: mpfr
    two_R_T: mpfr
    nu_2RT: mpfr
    term_volume: mpfr
    term_remainder: mpfr
    rhs_total: mpfr
    boundary_warning_count: int


@dataclass(frozen=True)
class HomogeneousBoundReport:
    """Every intermediate of the homogeneous (scaled unit-volume box)
    error-bound evaluation."""

    count: int
    volume: mpfr
    abs_error: mpfr
    t_scale: mpfr
    rho: mpfr
    nu_rho: mpfr
    r: mpfr
    surface_area: mpfr
    lambda_n: mpfr
    s_total: mpfr
    s_member_count: int
    s_max_term: mpfr
    term_main: mpfr
    prefactor: mpfr
    rhs_total: mpfr
    boundary_warning_count: int


def _require_bound_preconditions(basis: LatticeBasis, rho_f: mpfr) -> None:
    if basis.n < 2:
        raise LatboxError("error bounds need dimension n >= 2")
    if not basis.unimodular:
        raise AssumptionViolationError("bound requires a unimodular basis")
    thresh = gmpy2.sqrt(hermite_constant(basis.n).value)
    if not rho_f > thresh:
        raise RhoBelowThresholdError(
            "rho = %s must exceed the Hermite threshold %s" % (rho_f, thresh)
        )


def _dual_nu(dual: LatticeBasis, radius: mpfr, node_budget: int) -> mpfr:
    res = nu(dual, radius, node_budget=node_budget)
    val = as_mpfr(res.value)
    if not val > 0:
        raise NotWeaklyAdmissibleError(
            "dual not weakly admissible at radius %s (witness z=%s)"
            % (radius, res.minimizer.z)
        )
    return val


def skriganov_bound_inhomogeneous(
    basis: LatticeBasis,
    box: AlignedBox,
    rho,
    node_budget: int = DEFAULT_COUNT_BUDGET,
) -> BoundReport:
    """Exact count vs volume with the full inhomogeneous RHS assembly."""
    rho_f = as_mpfr(rho)
    _require_bound_preconditions(basis, rho_f)
    n = basis.n
    dual = dual_basis(basis)
    vol = volume(box)
    vol_f = as_mpfr(vol)
    t_val = t_quantity(box)
    t_star = star(t_val, n)
    nu_t_star = _dual_nu(dual, t_star, node_budget)
    rho_t = rho_f * t_val
    nu_rho_t = _dual_nu(dual, rho_t, node_budget)
    r_big = n * n + gmpy2.log(rho_f**n / nu_rho_t)
    two_r_t = gmpy2.exp2(r_big) * t_val
    nu_two_r_t = _dual_nu(dual, two_r_t, node_budget)
    term_volume = vol_f ** (mpfr(n - 1) / n) / gmpy2.sqrt(rho_f)
    term_remainder = r_big ** (n - 1) / nu_two_r_t
    rhs_total = (term_volume + term_remainder) / nu_t_star
    cres = count_points(basis, box, node_budget=node_budget)
    abs_error = abs(cres.count - vol_f)
    return BoundReport(
        count=cres.count,
        volume=vol,
        abs_error=abs_error,
        T=t_val,
        T_star=t_star,
        rho=rho_f,
        rho_T=rho_t,
        nu_Tstar=nu_t_star,
        nu_rhoT=nu_rho_t,
        R=r_big,
        two_R_T=two_r_t,
        nu_2RT=nu_two_r_t,
        term_volume=term_volume,
        term_remainder=term_remainder,
        rhs_total=rhs_total,
        boundary_warning_count=len(cres.boundary_warnings),
    )


def skriganov_bound_homogeneous(
    basis: LatticeBasis,
    box_unit: AlignedBox,
    t_scale,
    rho,
    node_budget: int = DEFAULT_COUNT_BUDGET,
) -> HomogeneousBoundReport:
    """Count over the t-scaled unit-volume box vs t^n, with the
    homogeneous RHS assembly."""
    rho_f = as_mpfr(rho)
    _require_bound_preconditions(basis, rho_f)
    n = basis.n
    vol_unit = as_mpfr(volume(box_unit))
    if not abs(vol_unit - 1) <= mpfr("1e-25"):
        raise AssumptionViolationError(
            "homogeneous bound requires vol(B) = 1, got %s" % vol_unit
        )
    t_f = as_mpfr(to_scalar(t_scale))
    if not t_f > 0:
        raise LatboxError("scale t must be positive")
    surf = as_mpfr(surface_area(box_unit))
    if not surf >= 1:
        raise AssumptionViolationError(
            "surface area %s below 1 contradicts vol(B) = 1" % surf
        )
    dual = dual_basis(basis)
    nu_rho = _dual_nu(dual, rho_f, node_budget)
    r_small = n * n + gmpy2.log(rho_f**n / nu_rho)
    s_res = s_sum(dual, r_small, node_budget=node_budget)
    minima = successive_minima(basis, node_budget=node_budget)
    lam_n = minima.lambdas[-1]
    scaled = box_unit.scale(to_scalar(t_scale))
    cres = count_points(basis, scaled, node_budget=node_budget)
    vol_t = t_f**n
    abs_error = abs(cres.count - vol_t)
    term_main = t_f ** (n - 1) / gmpy2.sqrt(rho_f)
    prefactor = (surf * lam_n) ** n
    rhs_total = prefactor * (term_main + s_res.total)
    return HomogeneousBoundReport(
        count=cres.count,
        volume=vol_t,
        abs_error=abs_error,
        t_scale=t_f,
        rho=rho_f,
        nu_rho=nu_rho,
        r=r_small,
        surface_area=surf,
        lambda_n=lam_n,
        s_total=s_res.total,
        s_member_count=s_res.member_count,
        s_max_term=s_res.max_term,
        term_main=term_main,
        prefactor=prefactor,
        rhs_total=rhs_total,
        boundary_warning_count=len(cres.boundary_warnings),
    )
