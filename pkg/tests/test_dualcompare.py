import pytest
from gmpy2 import mpfr, mpq

from latbox import (
    LatboxError,
    LatticeBasis,
    Matrix,
    RhoBelowThresholdError,
    as_mpfr,
    dual_basis,
    enumerate_below,
    example31_build,
    is_signed_permutation,
    nu,
    nu_profile_compare,
    symplectic_form,
    verify_prop_conditions,
    weak_admissibility_probe,
)
from latbox.dio import _application_basis, surd_spec

from helpers import make_rng, random_unimodular_basis

GOLDEN = surd_spec(-1, 1, 5, 2)

J2 = Matrix([[0, 1], [-1, 0]])


class TestSignedPermutation:
    def test_accepts(self):
        assert is_signed_permutation(Matrix.identity(3))
        assert is_signed_permutation(J2)
        assert is_signed_permutation(Matrix([[0, 0, -1], [1, 0, 0], [0, -1, 0]]))

    def test_rejects(self):
        assert not is_signed_permutation(Matrix([[1, 1], [0, 1]]))
        assert not is_signed_permutation(Matrix([[0, 2], [1, 0]]))
        assert not is_signed_permutation(Matrix([[1, 0], [0, 0]]))


class TestSymplecticForm:
    def test_m1(self):
        assert symplectic_form(1).to_lists() == [[0, 1], [-1, 0]]

    def test_m2_blocks(self):
        j = symplectic_form(2)
        assert j.to_lists() == [
            [0, 0, 1, 0],
            [0, 0, 0, 1],
            [-1, 0, 0, 0],
            [0, -1, 0, 0],
        ]
        assert is_signed_permutation(j)

    def test_signed_permutation_all_small_orders(self):
        for m in range(1, 5):
            assert is_signed_permutation(symplectic_form(m))

    def test_bad_m(self):
        with pytest.raises(LatboxError):
            symplectic_form(0)


class TestPropConditions:
    def test_2d_always_satisfied_with_det_form(self):
        # A^T J A = det(A) J identically in dimension two
        rng = make_rng(13)
        for _ in range(6):
            b = random_unimodular_basis(rng, 2)
            a = b.matrix
            d = round(float(as_mpfr(b.det)))
            r = J2.scale(d)
            assert verify_prop_conditions(a, J2, r)

    def test_wrong_r_fails(self):
        a = Matrix([[mpq(3, 5), mpq(-4, 5)], [mpq(4, 5), mpq(3, 5)]])
        assert not verify_prop_conditions(a, J2, Matrix.identity(2))

    def test_non_signed_perm_s_fails(self):
        a = Matrix.identity(2)
        assert not verify_prop_conditions(a, Matrix([[1, 1], [0, 1]]), J2)

    def test_generic_4d_fails(self):
        rng = make_rng(19)
        b = random_unimodular_basis(rng, 4)
        j = symplectic_form(2)
        assert not verify_prop_conditions(b.matrix, j, j)

    def test_dimension_mismatch(self):
        with pytest.raises(LatboxError):
            verify_prop_conditions(Matrix.identity(3), J2, J2)


class TestNuProfileCompare:
    def test_2d_equality(self):
        rng = make_rng(37)
        for _ in range(3):
            b = random_unimodular_basis(rng, 2)
            worst, table = nu_profile_compare(b, [2, 5, 10])
            assert worst <= mpfr("1e-25")
            for row in table:
                assert row.abs_diff == abs(
                    as_mpfr(row.nu_primal) - as_mpfr(row.nu_dual)
                )

    def test_minimizers_map_to_dual_witnesses(self):
        # Constructive 2-D witness: coordinates w of a product minimizer
        # map through w -> (det A) J w to dual coordinates whose vector
        # has the same norm and the same |coordinate product|.
        rng = make_rng(43)
        tol = mpfr("1e-25")
        bases = [_application_basis(GOLDEN)]
        bases += [random_unimodular_basis(rng, 2) for _ in range(3)]
        for basis in bases:
            dual = dual_basis(basis)
            d = round(float(as_mpfr(basis.det)))
            for rho in (2, 5, 10):
                target = as_mpfr(nu(basis, rho).value)
                mapped = 0
                for entry in enumerate_below(basis, rho).entries:
                    prod = abs(as_mpfr(entry.v[0]) * as_mpfr(entry.v[1]))
                    if abs(prod - target) > tol * (1 + target):
                        continue
                    w = entry.z
                    rw = (d * w[1], -d * w[0])
                    u = dual.matrix.matvec(rw)
                    u_norm_sq = sum(as_mpfr(c) ** 2 for c in u)
                    v_norm_sq = sum(as_mpfr(c) ** 2 for c in entry.v)
                    assert abs(u_norm_sq - v_norm_sq) <= tol * (1 + v_norm_sq)
                    u_prod = abs(as_mpfr(u[0]) * as_mpfr(u[1]))
                    assert abs(u_prod - prod) <= tol * (1 + prod)
                    mapped += 1
                assert mapped >= 1

    def test_requires_unimodular(self):
        with pytest.raises(LatboxError):
            nu_profile_compare(LatticeBasis.create([[2, 0], [0, 1]]), [5])

    def test_grid_below_threshold(self):
        rng = make_rng(39)
        b = random_unimodular_basis(rng, 2)
        with pytest.raises(RhoBelowThresholdError):
            nu_profile_compare(b, [5, 1])


class TestExample31:
    def test_structure_n3(self):
        b = example31_build(3, seed=1)
        assert b.unimodular
        d = dual_basis(b)
        assert abs(as_mpfr(d.matrix.entry(2, 2))) <= mpfr("1e-40")

    def test_deterministic_per_seed(self):
        assert example31_build(3, seed=5).matrix == example31_build(3, seed=5).matrix
        assert example31_build(3, seed=5).matrix != example31_build(3, seed=6).matrix

    def test_dual_flagged_primal_clean(self):
        b = example31_build(3, seed=2)
        dual_profile = weak_admissibility_probe(dual_basis(b), 10, grid_points=6)
        assert dual_profile.flagged
        primal_profile = weak_admissibility_probe(b, 10, grid_points=6)
        assert not primal_profile.flagged

    def test_small_n_rejected(self):
        with pytest.raises(LatboxError):
            example31_build(2, seed=0)
