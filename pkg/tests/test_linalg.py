import gmpy2
import pytest
from gmpy2 import mpfr, mpq

from latbox import (
    DegenerateLatticeError,
    LatboxError,
    LatticeBasis,
    Matrix,
    as_mpfr,
    determinant,
    dot,
    dual_basis,
    inverse,
    norm,
    operator_norm,
    parse_matrix,
)

from helpers import make_rng, mpfr_close, random_exact_matrix


class TestMatrix:
    def test_decimal_strings_parse_exactly(self):
        m = Matrix([["0.5", 1], [2, "3"]])
        assert m.all_exact()
        assert m.entry(0, 0) == mpq(1, 2)
        assert determinant(m) == mpq(-1, 2)

    def test_parse_matrix_rejects_ragged_rows(self):
        with pytest.raises(LatboxError):
            parse_matrix([[1, 2], [3]])

    def test_parse_matrix_rejects_non_square(self):
        with pytest.raises(LatboxError):
            parse_matrix([[1, 2, 3], [4, 5, 6]])

    def test_transpose_and_matmul(self):
        a = Matrix([[1, 2], [3, 4]])
        b = Matrix([[0, 1], [1, 0]])
        assert (a @ b).to_lists() == [[2, 1], [4, 3]]
        assert a.transpose().to_lists() == [[1, 3], [2, 4]]

    def test_matvec(self):
        a = Matrix([[1, 2], [3, 4]])
        assert a.matvec((1, 1)) == (3, 7)

    def test_immutability(self):
        a = Matrix([[1, 2], [3, 4]])
        with pytest.raises(AttributeError):
            a.rows = ()


class TestDeterminantInverse:
    def test_hand_values(self):
        assert determinant(Matrix([[2, 1], [1, 2]])) == 3
        assert determinant(Matrix([[1, 2, 3], [4, 5, 6], [7, 8, 10]])) == -3

    def test_inverse_round_trip_exact(self):
        rng = make_rng(7)
        for _ in range(10):
            m = random_exact_matrix(rng, 3)
            if determinant(m) == 0:
                continue
            assert (m @ inverse(m)) == Matrix.identity(3)
            assert inverse(inverse(m)) == m

    def test_singular_raises(self):
        with pytest.raises(DegenerateLatticeError):
            inverse(Matrix([[1, 2], [2, 4]]))

    def test_float_path(self):
        m = Matrix([[mpfr("1.5"), 0], [0, 2]])
        assert not m.all_exact()
        assert mpfr_close(determinant(m), 3, "1e-45")


class TestLatticeBasis:
    def test_unimodular_flag_exact_rotation(self):
        b = LatticeBasis.create([[mpq(3, 5), mpq(-4, 5)], [mpq(4, 5), mpq(3, 5)]])
        assert b.unimodular
        assert b.covolume == 1

    def test_non_unimodular(self):
        b = LatticeBasis.create([[2, 0], [0, 1]])
        assert not b.unimodular
        assert b.covolume == 2

    def test_singular_rejected(self):
        with pytest.raises(DegenerateLatticeError):
            LatticeBasis.create([[1, 1], [1, 1]])

    def test_vector(self):
        b = LatticeBasis.create([[1, 2], [0, 1]])
        assert b.vector((1, -1)) == (-1, -1)


class TestDual:
    def test_biorthogonality_exact(self):
        rng = make_rng(11)
        for _ in range(8):
            m = random_exact_matrix(rng, 3)
            if determinant(m) == 0:
                continue
            b = LatticeBasis.create(m)
            d = dual_basis(b)
            for i, g in enumerate(b.generators()):
                for j, h in enumerate(d.generators()):
                    assert dot(g, h) == (1 if i == j else 0)

    def test_dual_of_dual_is_primal(self):
        b = LatticeBasis.create([[mpq(1, 2), 1], [0, 3]])
        assert dual_basis(dual_basis(b)).matrix == b.matrix

    def test_covolume_reciprocal(self):
        b = LatticeBasis.create([[mpq(1, 2), 1], [0, 3]])
        assert b.covolume * dual_basis(b).covolume == 1

    def test_double_dual_change_of_basis_integral_inexact(self):
        # With mpfr entries the double dual need not reproduce the matrix
        # bit-for-bit, but B^-1 B'' must be (near-)integral with det +/-1,
        # and det(dual) * det stays reciprocal.
        theta = mpfr("0.7")
        c, s = gmpy2.cos(theta), gmpy2.sin(theta)
        m = Matrix([[2 * c, -s], [2 * s, c]])
        b = LatticeBasis.create(m)
        dd = dual_basis(dual_basis(b))
        u = inverse(b.matrix) @ dd.matrix
        tol = mpfr("1e-25")
        for i in range(2):
            for j in range(2):
                e = as_mpfr(u.entry(i, j))
                assert abs(e - gmpy2.rint(e)) <= tol
        assert abs(abs(as_mpfr(determinant(u))) - 1) <= tol
        dd_det = as_mpfr(determinant(dual_basis(b).matrix))
        d_det = as_mpfr(determinant(b.matrix))
        assert abs(dd_det * d_det - 1) <= tol


class TestOperatorNorm:
    def test_diagonal(self):
        assert operator_norm(Matrix([[3, 0], [0, -5]])) == 5

    def test_symmetric_2x2(self):
        # eigenvalues of [[2,1],[1,2]] are 3 and 1
        assert mpfr_close(operator_norm(Matrix([[2, 1], [1, 2]])), 3, "1e-40")

    def test_newton_3x3_block(self):
        m = Matrix([[2, 1, 0], [1, 2, 0], [0, 0, 1]])
        assert mpfr_close(operator_norm(m), 3, "1e-20")

    def test_power_iteration_4x4_block(self):
        m = Matrix([[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])
        assert mpfr_close(operator_norm(m), 3, "1e-20")

    def test_bounds_random(self):
        rng = make_rng(3)
        for n in (2, 3, 4):
            m = random_exact_matrix(rng, n)
            op = operator_norm(m)
            frob = norm([m.entry(i, j) for i in range(n) for j in range(n)])
            assert op <= frob + mpfr("1e-30")
            for _ in range(5):
                v = [rng.uniform(-1, 1) for _ in range(n)]
                img = m.matvec([as_mpfr(repr(c)) for c in v])
                vn = norm([as_mpfr(repr(c)) for c in v])
                if vn > 0:
                    assert norm(img) <= op * vn * (1 + mpfr("1e-30"))

    def test_dominates_every_column_norm(self):
        # ||M e_j|| <= ||M||_2 for each standard basis vector e_j.
        rng = make_rng(17)
        for n in (2, 3, 4):
            for _ in range(4):
                m = random_exact_matrix(rng, n)
                op = operator_norm(m)
                for j in range(n):
                    assert norm(m.col(j)) <= op * (1 + mpfr("1e-30"))

    def test_diagonal_equals_max_column_norm(self):
        m = Matrix([[mpq(1, 2), 0, 0], [0, -7, 0], [0, 0, 3]])
        assert operator_norm(m) == max(norm(m.col(j)) for j in range(3))
