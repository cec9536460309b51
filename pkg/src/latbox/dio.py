"""Diophantine counting toolkit.

Counts solutions of the inhomogeneous approximation problem

    0 <= p + q*alpha - y <= eps,   1 <= q <= t,   (p, q) integers,

and relates the count to the volume eps*t through the box-counting
machinery: the pairs (p, q) correspond to points of a fixed unimodular
planar lattice inside an axis-aligned box, so the generic counting
bound applies verbatim.

The quantitative input is a positive lower bound phi with

    q * dist(q*alpha, Z) >= phi(q)   for every positive integer q,

built from the continued fraction of alpha.  Convergent denominators
are the best approximators, so a running minimum of q_i * dist(q_i *
alpha, Z) over convergents bounds every intermediate q from below.  For
a quadratic surd the expansion is computed by the exact integer P/Q
recurrence (no rounding anywhere), the state sequence is eventually
periodic, and the scan certifies a single constant valid for every q:
after the first two visits to each periodic state the later values are
sandwiched between the first two, so the minimum over a scan covering
the pre-period plus two full periods is the global infimum over all
convergents.  Decimal-literal inputs get a tabulated step function
instead, valid only as far as the literal's digits can support.

Floor computations that decide count boundaries use exact integer
predicates (compare u against B*sqrt(c) by squaring; c nonsquare means
ties are impossible), so counts never depend on binary rounding when
the inputs are exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import gmpy2
from gmpy2 import mpfr, mpq, mpz

from .boxes import DEFAULT_COUNT_BUDGET, AlignedBox, count_points, t_quantity
from .errors import (
    AssumptionViolationError,
    LatboxError,
    PrecisionExhaustedError,
)
from .linalg import LatticeBasis, Matrix
from .numetrics import nu_values
from .precision import Scalar, as_mpfr, is_exact, simplify, to_scalar
from .reduction import DEFAULT_NODE_BUDGET


@dataclass(frozen=True)
class IrrationalSpec:
    """A concrete irrational in (0,1): either (a + b*sqrt(c))/d with
    integer a, b, c, d (c > 1 nonsquare, b != 0, d > 0), or an exact
    decimal literal standing in for an irrational it truncates.

    Construct via surd_spec / decimal_spec / parse_irrational.
    """

    kind: str  # "surd" | "dec"
    value: Scalar  # mpfr at construction precision (surd) or exact mpq (dec)
    a: Optional[int] = None
    b: Optional[int] = None
    c: Optional[int] = None
    d: Optional[int] = None
    literal_places: Optional[int] = None


def surd_spec(a: int, b: int, c: int, d: int) -> IrrationalSpec:
    a, b, c, d = int(a), int(b), int(c), int(d)
    if c <= 1 or gmpy2.is_square(mpz(c)):
        raise LatboxError("surd radicand must be a nonsquare integer > 1 (got %d)" % c)
    if b == 0:
        raise LatboxError("surd coefficient b must be nonzero")
    if d == 0:
        raise LatboxError("surd denominator d must be nonzero")
    if d < 0:
        a, b, d = -a, -b, -d
    value = (as_mpfr(a) + as_mpfr(b) * gmpy2.sqrt(mpfr(c))) / d
    if not (value > 0 and value < 1):
        raise LatboxError(
            "surd value must lie in (0,1); (%d + %d*sqrt(%d))/%d = %s"
            % (a, b, c, d, value)
        )
    return IrrationalSpec(kind="surd", value=value, a=a, b=b, c=c, d=d)


def decimal_spec(text: str) -> IrrationalSpec:
    text = text.strip()
    if not text.startswith("0.") or len(text) < 3 or not text[2:].isdigit():
        raise LatboxError(
            "decimal literal must look like 0.ddd... (got %r)" % text
        )
    places = len(text) - 2
    value = mpq(int(text[2:]), 10**places)
    if value == 0:
        raise LatboxError("decimal literal must be positive")
    return IrrationalSpec(
        kind="dec", value=value, literal_places=places
    )


def parse_irrational(text: str) -> IrrationalSpec:
    """Parse "surd:a,b,c,d" (meaning (a + b*sqrt(c))/d) or "dec:0.ddd..."."""
    if text.startswith("surd:"):
        parts = text[len("surd:"):].split(",")
        if len(parts) != 4:
            raise LatboxError("surd spec needs four integers a,b,c,d")
        try:
            a, b, c, d = (int(p.strip()) for p in parts)
        except ValueError:
            raise LatboxError("surd spec %r has a non-integer field" % text)
        return surd_spec(a, b, c, d)
    if text.startswith("dec:"):
        return decimal_spec(text[len("dec:"):])
    raise LatboxError(
        "unrecognized irrational %r (expected surd:a,b,c,d or dec:0.ddd...)" % text
    )


# ---------------------------------------------------------------------------
# exact floor predicates


def _floor_sqrt_affine(P, D, Q):
    """floor((P + sqrt(D)) / Q) for integers, D > 0 nonsquare, Q != 0.

    Because D is nonsquare, k*Q - P never equals sqrt(D) exactly, so the
    squaring predicates are unambiguous.
    """
    s = gmpy2.isqrt(D)
    k = (P + s) // Q
    if Q > 0:
        # j <= x  <=>  j*Q - P <= sqrt(D)
        u = k * Q - P
        while not (u <= 0 or u * u < D):
            k -= 1
            u -= Q
        u = (k + 1) * Q - P
        while u <= 0 or u * u < D:
            k += 1
            u += Q
    else:
        # j <= x  <=>  j*Q - P >= sqrt(D)
        u = k * Q - P
        while not (u > 0 and u * u > D):
            k -= 1
            u -= Q
        u = (k + 1) * Q - P
        while u > 0 and u * u > D:
            k += 1
            u += Q
    return k


def _floor_int_quadratic(A, B, c, C, sqrt_c: float):
    """floor((A + B*sqrt(c)) / C) for integers, C > 0, c > 1 nonsquare.

    A float estimate seeds the answer; exact integer predicates fix it
    up, so the result is correct regardless of the estimate.
    """
    if B == 0:
        return A // C
    try:
        k = math.floor((A + B * sqrt_c) / C)
    except OverflowError:
        k = int(gmpy2.floor((as_mpfr(A) + as_mpfr(B) * gmpy2.sqrt(mpfr(c))) / C))
    D = B * B * c
    if B > 0:
        # j <= x  <=>  j*C - A <= B*sqrt(c)
        u = k * C - A
        while not (u <= 0 or u * u < D):
            k -= 1
            u -= C
        u = (k + 1) * C - A
        while u <= 0 or u * u < D:
            k += 1
            u += C
    else:
        # right side is negative: u <= B*sqrt(c)  <=>  u < 0 and u*u > D
        u = k * C - A
        while not (u < 0 and u * u > D):
            k -= 1
            u -= C
        u = (k + 1) * C - A
        while u < 0 and u * u > D:
            k += 1
            u += C
    return k


def _lt_b_sqrt_c(u, B, c) -> bool:
    """u < B*sqrt(c) for integers, c > 1 nonsquare."""
    if B > 0:
        return u < 0 or u * u < B * B * c
    if B < 0:
        return u < 0 and u * u > B * B * c
    return u < 0


def _floor_scalar(x):
    if isinstance(x, (int, mpz)):
        return mpz(x)
    if isinstance(x, mpq):
        return x.numerator // x.denominator
    return mpz(gmpy2.floor(as_mpfr(x)))


# ---------------------------------------------------------------------------
# continued fractions


@dataclass(frozen=True)
class CFExpansion:
    """Partial quotients a1..ak past a0, with convergents (p_i, q_i).

    period_start / period_length (surd inputs only) locate the periodic
    block inside `quotients`, 0-based, when the scan got far enough to
    see a repeated state.
    """

    a0: int
    quotients: tuple
    convergents: tuple
    terminated: bool
    period_start: Optional[int] = None
    period_length: Optional[int] = None


def _surd_terms(spec: IrrationalSpec):
    """Yield (a_i, state) for the exact expansion of a quadratic surd.

    state is the integer (P, Q) pair that generates the NEXT complete
    quotient (P + sqrt(D))/Q; a repeated state means the expansion has
    entered its periodic block.
    """
    a, b, c, d = spec.a, spec.b, spec.c, spec.d
    D = b * b * c
    if b > 0:
        P, Q = a, d
    else:
        P, Q = -a, -d
    if (D - P * P) % Q != 0:
        g = abs(Q)
        P *= g
        D *= g * g
        Q *= g
    while True:
        ai = _floor_sqrt_affine(P, D, Q)
        P = ai * Q - P
        Q = (D - P * P) // Q
        yield int(ai), (int(P), int(Q))


def _dec_terms(value: mpq):
    """Exact Euclid expansion of a rational; terminates."""
    num, den = value.numerator, value.denominator
    while den != 0:
        ai = num // den
        yield int(ai)
        num, den = den, num - ai * den


def continued_fraction(alpha: IrrationalSpec, k: int) -> CFExpansion:
    """First k partial quotients past a0, with their convergents.

    Surd expansions run on exact integer state and carry no precision
    limit.  Decimal-literal expansions are exact Euclid on the literal's
    rational value, but the quotients only reflect the number the
    literal abbreviates while sum(log10 q_i) stays below the literal's
    decimal places minus 10; past that, raises "precision exhausted".
    A literal whose expansion ends inside the trusted range comes back
    with terminated=True.
    """
    if k < 1:
        raise LatboxError("quotient count k must be >= 1")
    quotients = []
    convergents = []
    p_prev, q_prev = mpz(1), mpz(0)
    period_start = None
    period_length = None
    if alpha.kind == "surd":
        gen = _surd_terms(alpha)
        a0, state = next(gen)
        p_cur, q_cur = mpz(a0), mpz(1)
        seen = {state: 0}
        while len(quotients) < k:
            ai, state = next(gen)
            quotients.append(ai)
            p_cur, p_prev = ai * p_cur + p_prev, p_cur
            q_cur, q_prev = ai * q_cur + q_prev, q_cur
            convergents.append((int(p_cur), int(q_cur)))
            if period_start is None:
                idx = len(quotients)
                if state in seen:
                    period_start = seen[state]
                    period_length = idx - seen[state]
                else:
                    seen[state] = idx
        return CFExpansion(
            a0=a0,
            quotients=tuple(quotients),
            convergents=tuple(convergents),
            terminated=False,
            period_start=period_start,
            period_length=period_length,
        )
    budget = alpha.literal_places - 10
    log_sum = 0.0
    gen = _dec_terms(mpq(alpha.value))
    a0 = next(gen)
    p_cur, q_cur = mpz(a0), mpz(1)
    terminated = False
    while len(quotients) < k:
        try:
            ai = next(gen)
        except StopIteration:
            terminated = True
            break
        p_cur, p_prev = ai * p_cur + p_prev, p_cur
        q_cur, q_prev = ai * q_cur + q_prev, q_cur
        log_sum += math.log10(q_cur)
        if log_sum >= budget:
            raise PrecisionExhaustedError(
                "precision exhausted after %d quotients: the literal carries "
                "%d decimal places" % (len(quotients), alpha.literal_places)
            )
        quotients.append(ai)
        convergents.append((int(p_cur), int(q_cur)))
    return CFExpansion(
        a0=a0,
        quotients=tuple(quotients),
        convergents=tuple(convergents),
        terminated=terminated,
    )


# ---------------------------------------------------------------------------
# phi lower bounds


def _dist_to_int(x: mpfr) -> mpfr:
    f = gmpy2.floor(x)
    return min(x - f, f + 1 - x)


@dataclass(frozen=True)
class PhiBound:
    """Verified lower bound on q * dist(q*alpha, Z).

    kind "constant": a single clean-decimal constant; universal=True
    means the periodic-state argument certifies it for every q, not
    just q <= q_checked.  kind "table": a nonincreasing step function
    over convergent denominators, valid only up to q_checked.
    """

    kind: str  # "constant" | "table"
    constant: Optional[mpq]
    table: tuple  # ((q_i, running_min), ...) ascending, table kind
    q_checked: int
    observed_min: mpfr
    universal: bool = False

    def value_at(self, q) -> Scalar:
        qf = as_mpfr(to_scalar(q))
        if not qf > 0:
            raise LatboxError("phi argument must be positive (got %s)" % qf)
        if self.kind == "constant":
            if self.universal or qf <= self.q_checked:
                return self.constant
            raise LatboxError(
                "phi constant only certified for q <= %d (asked %s)"
                % (self.q_checked, qf)
            )
        if qf > self.q_checked:
            raise LatboxError(
                "phi table only covers q <= %d (asked %s)" % (self.q_checked, qf)
            )
        best = self.table[0][1]
        for q_i, val in self.table:
            if q_i <= qf:
                best = val
            else:
                break
        return best


# scan must reach pre-period + 2 periods + this margin before a constant
# is certified for all q (values at later visits of a periodic state are
# sandwiched between the first two visits)
_PERIOD_MARGIN = 2

# upper limit on expansion terms examined while hunting for the period
_MAX_SCAN_TERMS = 20000


def phi_from_cf(alpha: IrrationalSpec, q_max: int) -> PhiBound:
    """Lower bound on q * dist(q*alpha, Z) from the convergent scan.

    The running minimum of q_i * dist(q_i*alpha, Z) over convergents
    with q_i <= q_max bounds every q <= q_max from below, because for
    q_i <= q < q_{i+1} no q approximates better than q_i does.  Surds
    get the minimum floored to a clean decimal constant; the constant is
    marked universal when the scan covered the expansion's pre-period
    plus two full periods, which pins the infimum over all convergents.
    Decimal literals get a step-function table instead.
    """
    if q_max < 1:
        raise LatboxError("q_max must be >= 1")
    alpha_f = as_mpfr(alpha.value)
    rows = [(1, _dist_to_int(alpha_f))]
    m_evidence = rows[0][1]
    m_all = m_evidence

    if alpha.kind == "surd":
        gen = _surd_terms(alpha)
        next(gen)  # a0
        seen = {}
        period_start = None
        period_length = None
        p_prev, q_prev = mpz(1), mpz(0)
        p_cur, q_cur = _floor_scalar(alpha_f), mpz(1)
        horizon_reached = False
        terms = 0
        while True:
            ai, state = next(gen)
            terms += 1
            p_cur, p_prev = ai * p_cur + p_prev, p_cur
            q_cur, q_prev = ai * q_cur + q_prev, q_cur
            val = q_cur * _dist_to_int(q_cur * alpha_f)
            m_all = min(m_all, val)
            if q_cur <= q_max:
                m_evidence = min(m_evidence, val)
                rows.append((int(q_cur), m_evidence))
            else:
                horizon_reached = True
            if period_start is None:
                if state in seen:
                    period_start = seen[state]
                    period_length = terms - seen[state]
                else:
                    seen[state] = terms
            period_done = (
                period_start is not None
                and terms >= period_start + 2 * period_length + _PERIOD_MARGIN
            )
            if horizon_reached and (period_done or terms >= _MAX_SCAN_TERMS):
                break
        # clean-decimal floor strictly below the evidence minimum
        places = 2
        while True:
            scaled = int(gmpy2.floor(as_mpfr(m_evidence) * 10**places))
            if scaled > 0:
                break
            places += 1
        constant = mpq(scaled, 10**places)
        if not (constant > 0 and constant < 1):
            raise LatboxError("phi constant %s escaped (0,1)" % constant)
        universal = period_done and as_mpfr(constant) <= m_all
        return PhiBound(
            kind="constant",
            constant=constant,
            table=(),
            q_checked=q_max,
            observed_min=as_mpfr(m_evidence),
            universal=universal,
        )

    # decimal literal: tabulated step function, capped by literal digits
    budget = alpha.literal_places - 10
    log_sum = 0.0
    gen = _dec_terms(mpq(alpha.value))
    a0 = next(gen)
    p_prev, q_prev = mpz(1), mpz(0)
    p_cur, q_cur = mpz(a0), mpz(1)
    terminated = False
    while True:
        try:
            ai = next(gen)
        except StopIteration:
            terminated = True
            break
        p_cur, p_prev = ai * p_cur + p_prev, p_cur
        q_cur, q_prev = ai * q_cur + q_prev, q_cur
        log_sum += math.log10(q_cur)
        if log_sum >= budget:
            raise PrecisionExhaustedError(
                "precision exhausted at q = %s before covering q_max = %d "
                "(literal carries %d decimal places)"
                % (q_cur, q_max, alpha.literal_places)
            )
        if q_cur > q_max:
            break
        val = q_cur * _dist_to_int(q_cur * alpha_f)
        m_evidence = min(m_evidence, val)
        if rows[-1][0] == int(q_cur):
            rows[-1] = (int(q_cur), m_evidence)
        else:
            rows.append((int(q_cur), m_evidence))
    if terminated:
        raise LatboxError(
            "expansion terminated: the literal is exactly rational, so no "
            "positive lower bound on q*dist(q*alpha, Z) exists"
        )
    for _, val in rows:
        if not (val > 0 and val < 1):
            raise LatboxError("phi table value %s escaped (0,1)" % val)
    return PhiBound(
        kind="table",
        constant=None,
        table=tuple(rows),
        q_checked=q_max,
        observed_min=as_mpfr(m_evidence),
        universal=False,
    )


# ---------------------------------------------------------------------------
# the counter


def count_N(alpha: IrrationalSpec, y, eps, t) -> int:
    """Number of integer pairs (p, q) with 1 <= q <= t and
    0 <= p + q*alpha - y <= eps.

    For each q the admissible p fill [y - q*alpha, y + eps - q*alpha];
    the per-q count is floor(hi) - ceil(lo) + 1.  With exact y and eps
    the floors run on integer predicates, so boundary ties are decided
    exactly; inexact inputs fall back to working-precision floors.
    """
    y_s = to_scalar(y)
    e_s = to_scalar(eps)
    t_s = to_scalar(t)
    if not as_mpfr(e_s) > 0:
        raise AssumptionViolationError("requires eps > 0 (got %s)" % e_s)
    if not as_mpfr(t_s) > 0:
        raise AssumptionViolationError("requires t > 0 (got %s)" % t_s)
    q_hi = int(_floor_scalar(t_s))
    total = 0
    exact_ends = is_exact(y_s) and is_exact(e_s)

    if alpha.kind == "surd" and exact_ends:
        a, b, c, d = alpha.a, alpha.b, alpha.c, alpha.d
        y_q = mpq(y_s)
        hi_q = y_q + mpq(e_s)
        hn, hd = int(hi_q.numerator), int(hi_q.denominator)
        yn, yd = int(y_q.numerator), int(y_q.denominator)
        C_hi = hd * d
        C_lo = yd * d
        ah, bh = a * hd, b * hd
        ay, by = a * yd, b * yd
        A_hi0 = hn * d
        A_lo0 = yn * d
        sc = math.sqrt(c)
        for q in range(1, q_hi + 1):
            p_hi = _floor_int_quadratic(A_hi0 - q * ah, -q * bh, c, C_hi, sc)
            p_lo = -_floor_int_quadratic(q * ay - A_lo0, q * by, c, C_lo, sc)
            width = p_hi - p_lo
            if width >= 0:
                total += int(width) + 1
        return total

    if alpha.kind == "dec" and exact_ends:
        al = mpq(alpha.value)
        an, ad = int(al.numerator), int(al.denominator)
        y_q = mpq(y_s)
        hi_q = y_q + mpq(e_s)
        hn, hd = int(hi_q.numerator), int(hi_q.denominator)
        yn, yd = int(y_q.numerator), int(y_q.denominator)
        C_hi = hd * ad
        C_lo = yd * ad
        for q in range(1, q_hi + 1):
            p_hi = (hn * ad - q * an * hd) // C_hi
            p_lo = -((q * an * yd - yn * ad) // C_lo)
            width = p_hi - p_lo
            if width >= 0:
                total += int(width) + 1
        return total

    al_f = as_mpfr(alpha.value)
    y_f = as_mpfr(y_s)
    hi_f = y_f + as_mpfr(e_s)
    for q in range(1, q_hi + 1):
        shift = q * al_f
        p_hi = int(gmpy2.floor(hi_f - shift))
        p_lo = int(gmpy2.ceil(y_f - shift))
        if p_hi >= p_lo:
            total += p_hi - p_lo + 1
    return total


# ---------------------------------------------------------------------------
# the lattice/box embedding


def _validate_assumptions(alpha: IrrationalSpec, e_s, t_s) -> None:
    """Parameter domain: eps*t > 4 and 0 < eps < sqrt(alpha)."""
    if not as_mpfr(e_s) > 0:
        raise AssumptionViolationError(
            "requires 0 < eps < sqrt(alpha) (got eps = %s)" % e_s
        )
    if is_exact(e_s) and is_exact(t_s):
        ok_vol = mpq(e_s) * mpq(t_s) > 4
    else:
        ok_vol = as_mpfr(e_s) * as_mpfr(t_s) > 4
    if not ok_vol:
        raise AssumptionViolationError(
            "requires eps*t > 4 (got eps*t = %s)" % (as_mpfr(e_s) * as_mpfr(t_s))
        )
    if is_exact(e_s) and alpha.kind == "surd":
        # eps^2 < (a + b*sqrt(c))/d  <=>  d*eps^2 - a < b*sqrt(c)
        u_q = alpha.d * mpq(e_s) ** 2 - alpha.a
        un, ud = int(u_q.numerator), int(u_q.denominator)
        ok_eps = _lt_b_sqrt_c(un, ud * alpha.b, alpha.c)
    elif is_exact(e_s) and alpha.kind == "dec":
        ok_eps = mpq(e_s) ** 2 < mpq(alpha.value)
    else:
        ok_eps = as_mpfr(e_s) < gmpy2.sqrt(as_mpfr(alpha.value))
    if not ok_eps:
        raise AssumptionViolationError(
            "requires 0 < eps < sqrt(alpha) (got eps = %s, sqrt(alpha) = %s)"
            % (e_s, gmpy2.sqrt(as_mpfr(alpha.value)))
        )


def _application_basis(alpha: IrrationalSpec) -> LatticeBasis:
    """The unimodular planar lattice whose points inside the matching
    box are exactly the admissible (p, q) pairs: rows scaled by
    1/sqrt(alpha) so the determinant is alpha/alpha = 1."""
    al = as_mpfr(alpha.value)
    s = 1 / gmpy2.sqrt(al)
    m = Matrix([[s, s * al], [s, 2 * al * s]])
    return LatticeBasis.create(m)


def build_application(
    alpha: IrrationalSpec,
    y,
    eps,
    t,
    check: bool = True,
    count_budget: int = DEFAULT_COUNT_BUDGET,
):
    """The lattice/box pair whose point count matches count_N within 2.

    The box is (1/sqrt(alpha)) * ([y, y+eps] x [y, y+alpha*t]); its
    anisotropy T equals sqrt(alpha*t/eps), which stays above
    sqrt(eps*t) > 2 on the validated parameter domain.  check=True runs
    the cross count and insists on agreement within the audited slack
    of 2 (edge rows q = 0 and boundary ties account for it).
    """
    y_s = to_scalar(y)
    e_s = to_scalar(eps)
    t_s = to_scalar(t)
    if not as_mpfr(t_s) > 0:
        raise AssumptionViolationError("requires t > 0 (got %s)" % t_s)
    _validate_assumptions(alpha, e_s, t_s)
    al = as_mpfr(alpha.value)
    rt = gmpy2.sqrt(al)
    basis = _application_basis(alpha)
    y_f = as_mpfr(y_s)
    corner = (y_f / rt, y_f / rt)
    sides = (as_mpfr(e_s) / rt, rt * as_mpfr(t_s))
    box = AlignedBox(sides, corner)
    t_qty = t_quantity(box)
    target = gmpy2.sqrt(al * as_mpfr(t_s) / as_mpfr(e_s))
    if not abs(t_qty - target) <= mpfr("1e-20") * target:
        raise LatboxError(
            "box anisotropy %s drifted from sqrt(alpha*t/eps) = %s"
            % (t_qty, target)
        )
    vol_root = gmpy2.sqrt(as_mpfr(e_s) * as_mpfr(t_s))
    if not (t_qty > vol_root and vol_root > 2):
        raise AssumptionViolationError(
            "anisotropy chain T > sqrt(eps*t) > 2 failed (T = %s, "
            "sqrt(eps*t) = %s)" % (t_qty, vol_root)
        )
    if check:
        n_direct = count_N(alpha, y_s, e_s, t_s)
        res = count_points(basis, box, node_budget=count_budget)
        if abs(n_direct - res.count) > 2:
            raise LatboxError(
                "counter (%d) and box count (%d) disagree beyond the "
                "audited slack of 2" % (n_direct, res.count)
            )
    return basis, box


@dataclass(frozen=True)
class DioCountResult:
    count: int
    volume: Scalar  # eps*t
    abs_error: Scalar  # |count - eps*t|
    E: mpfr
    E_prime: mpfr
    bound: mpfr


def corollary_bound(
    alpha: IrrationalSpec, y, eps, t, phi: PhiBound
) -> DioCountResult:
    """Counter vs volume with the growth bound ln(E)/phi(E')^2, where
    E = eps*t / phi(4*t*sqrt(eps*t)) and E' = 168*sqrt(eps*t^3)*E.

    Every stored field recomputes identically from the inputs at the
    same working precision.
    """
    y_s = to_scalar(y)
    e_s = to_scalar(eps)
    t_s = to_scalar(t)
    _validate_assumptions(alpha, e_s, t_s)
    n_count = count_N(alpha, y_s, e_s, t_s)
    if is_exact(e_s) and is_exact(t_s):
        volume = simplify(mpq(e_s) * mpq(t_s))
        abs_error = simplify(abs(n_count - mpq(volume)))
    else:
        volume = as_mpfr(e_s) * as_mpfr(t_s)
        abs_error = abs(n_count - volume)
    vol_f = as_mpfr(volume)
    arg_inner = 4 * as_mpfr(t_s) * gmpy2.sqrt(vol_f)
    E = vol_f / as_mpfr(phi.value_at(arg_inner))
    E_prime = 168 * gmpy2.sqrt(as_mpfr(e_s) * as_mpfr(t_s) ** 3) * E
    bound = gmpy2.log(E) / as_mpfr(phi.value_at(E_prime)) ** 2
    return DioCountResult(
        count=n_count,
        volume=volume,
        abs_error=abs_error,
        E=E,
        E_prime=E_prime,
        bound=bound,
    )


def lemma41_check(
    alpha: IrrationalSpec,
    phi: PhiBound,
    rho_grid,
    node_budget: int = DEFAULT_NODE_BUDGET,
) -> mpfr:
    """Check, on the application lattice, that the primal and dual
    product minima agree (<= 1e-25) and both clear phi(4*rho/
    sqrt(alpha))/4 at every grid radius.  Returns the worst margin
    (lower bound minus observed value; <= 0 when everything holds).
    """
    basis = _application_basis(alpha)
    grid = [as_mpfr(to_scalar(r)) for r in rho_grid]
    primal = nu_values(basis, grid, node_budget=node_budget)
    dual = nu_values(basis.dual(), grid, node_budget=node_budget)
    rt = gmpy2.sqrt(as_mpfr(alpha.value))
    tol = mpfr("1e-25")
    worst = mpfr("-inf")
    for rho, pv, dv in zip(grid, primal, dual):
        diff = abs(as_mpfr(pv.value) - as_mpfr(dv.value))
        if diff > tol:
            raise LatboxError(
                "primal/dual product-minimum mismatch %s at rho = %s"
                % (diff, rho)
            )
        lower = as_mpfr(phi.value_at(4 * rho / rt)) / 4
        margin = lower - as_mpfr(pv.value)
        if margin > 0:
            raise LatboxError(
                "lower bound violated at rho = %s: nu = %s < %s"
                % (rho, pv.value, lower)
            )
        if margin > worst:
            worst = margin
    return worst
