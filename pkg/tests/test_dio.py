import gmpy2
import pytest
from gmpy2 import mpfr, mpq

from latbox import (
    AlignedBox,
    AssumptionViolationError,
    LatboxError,
    PrecisionExhaustedError,
    as_mpfr,
    count_points,
    set_working_digits,
    t_quantity,
)
from latbox.dio import (
    _floor_int_quadratic,
    _floor_sqrt_affine,
    build_application,
    continued_fraction,
    corollary_bound,
    count_N,
    decimal_spec,
    lemma41_check,
    parse_irrational,
    phi_from_cf,
    surd_spec,
)

from helpers import make_rng, mpfr_close

GOLDEN = surd_spec(-1, 1, 5, 2)  # (sqrt(5)-1)/2
SQRT2M1 = surd_spec(-1, 1, 2, 1)  # sqrt(2)-1
SQRT3M1 = surd_spec(-1, 1, 3, 1)  # sqrt(3)-1
GOLDEN_DEC = "0.61803398874989484820458683436563811772030917980576"


class TestParsing:
    def test_surd_round_trip(self):
        s = parse_irrational("surd:-1,1,5,2")
        assert (s.a, s.b, s.c, s.d) == (-1, 1, 5, 2)
        assert mpfr_close(s.value, (gmpy2.sqrt(mpfr(5)) - 1) / 2, "1e-45")

    def test_negative_denominator_normalized(self):
        s = surd_spec(1, -1, 5, -2)
        assert s.d > 0
        assert mpfr_close(s.value, GOLDEN.value, "1e-45")

    def test_decimal(self):
        s = parse_irrational("dec:" + GOLDEN_DEC)
        assert s.kind == "dec"
        assert s.literal_places == 50
        assert s.value == mpq(int(GOLDEN_DEC[2:]), 10**50)

    def test_rejects(self):
        for bad in (
            "surd:1,1,4,2",  # square c
            "surd:1,0,5,2",  # b = 0
            "surd:1,1,5,0",  # d = 0
            "surd:3,1,5,2",  # value > 1
            "dec:5",
            "dec:.5",
            "foo:1",
            "",
        ):
            with pytest.raises(LatboxError):
                parse_irrational(bad)


class TestExactFloors:
    def test_floor_int_quadratic_against_mpfr(self):
        set_working_digits(80)
        rng = make_rng(61)
        for _ in range(300):
            c = rng.choice([2, 3, 5, 7, 61])
            a = rng.randrange(-10**12, 10**12)
            b = rng.randrange(-10**10, 10**10)
            cc = rng.randrange(1, 10**9)
            import math

            got = _floor_int_quadratic(a, b, c, cc, math.sqrt(c))
            ref = int(gmpy2.floor((a + b * gmpy2.sqrt(mpfr(c))) / cc))
            assert got == ref

    def test_floor_sqrt_affine_against_mpfr(self):
        set_working_digits(80)
        rng = make_rng(67)
        for _ in range(300):
            d = rng.choice([2, 3, 5, 13, 2023])
            p = rng.randrange(-10**9, 10**9)
            q = rng.choice([1, -1]) * rng.randrange(1, 10**6)
            got = _floor_sqrt_affine(p, d, q)
            ref = int(gmpy2.floor((p + gmpy2.sqrt(mpfr(d))) / q))
            assert got == ref


class TestContinuedFraction:
    def test_golden_is_all_ones(self):
        cf = continued_fraction(GOLDEN, 10)
        assert cf.a0 == 0
        assert cf.quotients == (1,) * 10
        assert cf.convergents == (
            (1, 1),
            (1, 2),
            (2, 3),
            (3, 5),
            (5, 8),
            (8, 13),
            (13, 21),
            (21, 34),
            (34, 55),
            (55, 89),
        )
        assert cf.period_start == 0 and cf.period_length == 1
        assert not cf.terminated

    def test_sqrt2_and_sqrt3_periods(self):
        cf2 = continued_fraction(SQRT2M1, 8)
        assert cf2.quotients == (2,) * 8
        assert cf2.period_length == 1
        cf3 = continued_fraction(SQRT3M1, 9)
        assert cf3.quotients == (1, 2, 1, 2, 1, 2, 1, 2, 1)
        assert cf3.period_length == 2

    def test_convergent_quality(self):
        # |q_i alpha - p_i| < 1/q_{i+1}, alternating in sign
        for spec in (GOLDEN, SQRT2M1, SQRT3M1):
            cf = continued_fraction(spec, 15)
            al = as_mpfr(spec.value)
            errs = [q * al - p for p, q in cf.convergents]
            for i in range(len(errs) - 1):
                assert abs(errs[i]) < 1 / mpfr(cf.convergents[i + 1][1])
                assert errs[i] * errs[i + 1] < 0

    def test_decimal_prefix_matches_surd(self):
        dec = decimal_spec(GOLDEN_DEC)
        cf = continued_fraction(dec, 15)
        assert cf.quotients == (1,) * 15

    def test_decimal_precision_guard(self):
        dec = decimal_spec(GOLDEN_DEC)
        with pytest.raises(PrecisionExhaustedError):
            continued_fraction(dec, 25)

    def test_decimal_termination(self):
        cf = continued_fraction(decimal_spec("0.3750000000000000"), 10)
        assert cf.terminated
        assert cf.quotients == (2, 1, 2)

    def test_bad_k(self):
        with pytest.raises(LatboxError):
            continued_fraction(GOLDEN, 0)


class TestPhiBound:
    def test_golden_constant(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        assert phi.kind == "constant"
        assert phi.constant == mpq(19, 50)
        assert phi.universal
        assert phi.q_checked == 10**6
        assert mpfr_close(phi.observed_min, mpfr("0.3819660112501051"), "1e-12")
        # universal constants extrapolate arbitrarily far
        assert phi.value_at(10**18) == mpq(19, 50)

    def test_golden_brute_force(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        al = as_mpfr(GOLDEN.value)
        c = as_mpfr(phi.constant)
        for q in range(1, 301):
            x = q * al
            dist = min(x - gmpy2.floor(x), gmpy2.ceil(x) - x)
            assert q * dist >= c - mpfr("1e-30")

    def test_sqrt2_constant(self):
        phi = phi_from_cf(SQRT2M1, 10**4)
        assert phi.constant == mpq(17, 50)
        assert phi.universal
        al = as_mpfr(SQRT2M1.value)
        for q in range(1, 301):
            x = q * al
            dist = min(x - gmpy2.floor(x), gmpy2.ceil(x) - x)
            assert q * dist >= as_mpfr(phi.constant) - mpfr("1e-30")

    def test_decimal_table(self):
        phi = phi_from_cf(decimal_spec(GOLDEN_DEC), 10**3)
        assert phi.kind == "table"
        assert not phi.universal
        vals = [as_mpfr(phi.value_at(q)) for q in (1, 2, 10, 100, 1000)]
        assert all(a >= b for a, b in zip(vals, vals[1:]))
        with pytest.raises(LatboxError):
            phi.value_at(10**4)

    def test_decimal_table_is_valid_lower_bound(self):
        phi = phi_from_cf(decimal_spec(GOLDEN_DEC), 10**3)
        al = as_mpfr(decimal_spec(GOLDEN_DEC).value)
        for q_cap in (1, 7, 120):
            bound = as_mpfr(phi.value_at(q_cap))
            best = None
            for q in range(1, q_cap + 1):
                x = q * al
                d = q * min(x - gmpy2.floor(x), gmpy2.ceil(x) - x)
                best = d if best is None else min(best, d)
            assert best >= bound - mpfr("1e-30")

    def test_decimal_guard_propagates(self):
        with pytest.raises(PrecisionExhaustedError):
            phi_from_cf(decimal_spec(GOLDEN_DEC), 10**4)

    def test_value_at_rejects_nonpositive(self):
        phi = phi_from_cf(GOLDEN, 10**3)
        with pytest.raises(LatboxError):
            phi.value_at(0)


class TestCountN:
    def test_frozen_golden(self):
        assert count_N(GOLDEN, mpq(3, 10), mpq(1, 2), 100) == 50
        assert count_N(GOLDEN, mpq(3, 10), mpq(1, 2), 1000) == 500

    def test_matches_mpfr_oracle(self):
        set_working_digits(60)
        rng = make_rng(71)
        for spec in (GOLDEN, SQRT2M1, SQRT3M1):
            al = as_mpfr(spec.value)
            for _ in range(10):
                y = mpq(rng.randrange(-20, 20), 7)
                eps = mpq(rng.randrange(1, 30), 13)
                t = rng.randrange(1, 60)
                ref = 0
                for q in range(1, t + 1):
                    lo = as_mpfr(y) - q * al
                    hi = lo + as_mpfr(eps)
                    p_lo = int(gmpy2.ceil(lo))
                    p_hi = int(gmpy2.floor(hi))
                    ref += max(0, p_hi - p_lo + 1)
                assert count_N(spec, y, eps, t) == ref

    def test_decimal_path_matches_surd(self):
        dec = decimal_spec(GOLDEN_DEC)
        for t in (10, 100, 500):
            assert count_N(dec, mpq(3, 10), mpq(1, 2), t) == count_N(
                GOLDEN, mpq(3, 10), mpq(1, 2), t
            )

    def test_closed_interval_boundaries(self):
        q = decimal_spec("0.25000000000")
        assert count_N(q, "0.25", "0.1", 1) == 1  # lower edge hit exactly
        assert count_N(q, "0.15", "0.1", 1) == 1  # upper edge hit exactly
        assert count_N(q, "0.26", "0.98", 1) == 0  # open gap between integers

    def test_rejects_nonpositive(self):
        with pytest.raises(AssumptionViolationError):
            count_N(GOLDEN, 0, 0, 10)
        with pytest.raises(AssumptionViolationError):
            count_N(GOLDEN, 0, mpq(1, 2), 0)


class TestBuildApplication:
    def test_shape_and_anisotropy(self):
        basis, box = build_application(GOLDEN, mpq(3, 10), mpq(1, 2), 100)
        assert basis.unimodular
        al = as_mpfr(GOLDEN.value)
        assert mpfr_close(
            t_quantity(box), gmpy2.sqrt(al * 100 / mpfr("0.5")), "1e-18"
        )
        assert mpfr_close(box.t[0] * box.t[1], 50, "1e-40")

    def test_count_agreement_random(self):
        rng = make_rng(73)
        for _ in range(50):
            eps = mpq(rng.randrange(5, 60), 100)
            t = rng.randrange(int(5 / eps) + 1, int(80 / eps))
            y = mpq(rng.randrange(0, 100), 101)
            basis, box = build_application(GOLDEN, y, eps, t, check=False)
            n_exact = count_N(GOLDEN, y, eps, t)
            n_box = count_points(basis, box).count
            assert abs(n_exact - n_box) <= 2

    def test_assumption_eps_t(self):
        with pytest.raises(AssumptionViolationError, match=r"eps\*t > 4"):
            build_application(GOLDEN, 0, mpq(1, 2), 4)

    def test_assumption_eps_range(self):
        with pytest.raises(AssumptionViolationError, match=r"sqrt\(alpha\)"):
            build_application(GOLDEN, 0, mpq(4, 5), 100)


class TestCorollary:
    def test_frozen_t100(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        res = corollary_bound(GOLDEN, mpq(3, 10), mpq(1, 2), 100, phi)
        assert res.count == 50
        assert res.volume == 50
        assert res.abs_error == 0
        assert res.E == as_mpfr(mpq(2500, 19))
        assert mpfr_close(
            res.E_prime, 168 * gmpy2.sqrt(mpfr("0.5") * 100**3) * res.E, "1e-30"
        )
        expected_bound = gmpy2.log(res.E) / as_mpfr(mpq(19, 50)) ** 2
        assert mpfr_close(res.bound, expected_bound, "1e-30")
        assert as_mpfr(res.abs_error) <= res.bound

    def test_error_within_bound_sampled(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        for t in (50, 200, 1500):
            res = corollary_bound(GOLDEN, mpq(3, 10), mpq(1, 2), t, phi)
            assert as_mpfr(res.abs_error) <= res.bound

    def test_non_universal_phi_refused_beyond_scan(self):
        phi = phi_from_cf(decimal_spec(GOLDEN_DEC), 10**3)
        with pytest.raises(LatboxError):
            # E' is far beyond the tabulated range and must not extrapolate
            corollary_bound(decimal_spec(GOLDEN_DEC), mpq(3, 10), mpq(1, 2), 100, phi)


class TestLemma41:
    def test_golden_margin_nonpositive(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        worst = lemma41_check(GOLDEN, phi, [mpfr("1.2"), 2, 5, 10])
        assert worst <= 0
        assert worst > -1

    def test_threshold_guard(self):
        phi = phi_from_cf(GOLDEN, 10**6)
        from latbox import RhoBelowThresholdError

        with pytest.raises(RhoBelowThresholdError):
            lemma41_check(GOLDEN, phi, [1])
