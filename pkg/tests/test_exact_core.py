"""
src.exact（円分体・多項式・行列・格子）のユニットテスト
"""

import cmath
import unittest
from fractions import Fraction

import numpy as np
import sympy

from src.exact.cyclotomic import Cyclotomic, cyclotomic_eval
from src.exact.errors import InputError
from src.exact.lattice import (
    determinant,
    hermite_normal_form,
    int_matmul,
    invariant_factors,
    lattice_intersection,
    lattice_kernel,
    lattice_rank,
    same_lattice,
    saturate_lattice,
    smith_normal_form,
    torsion_order,
    unimodular_completion,
)
from src.exact.matrices import (
    intersect_spaces,
    nullspace,
    object_matrix,
    rank_exact,
    rank_numeric,
    rank_over_fraction_field,
)
from src.exact.poly import LaurentPoly, MultiPoly, parse_monomial


XY = ("x", "y")


def poly(text_terms, variables=XY):
    """{"x*y": 2, "1": -1} 形式から多項式を作るヘルパー"""
    return MultiPoly(variables, {parse_monomial(m, variables): c
                                 for m, c in text_terms.items()})


class TestCyclotomic(unittest.TestCase):
    """円分体の元のテスト"""

    def test_root_order_is_exact(self):
        """ζ_N の乗法的位数がちょうど N"""
        for n in range(1, 13):
            z = Cyclotomic.root(n)
            self.assertEqual(z ** n, 1)
            for k in range(1, n):
                self.assertNotEqual(z ** k, 1, f"N={n}, k={k}")

    def test_embedding(self):
        self.assertEqual(Cyclotomic.root(2), -1)
        self.assertEqual(Cyclotomic.root(6, 2), Cyclotomic.root(3, 1))
        i = Cyclotomic.root(4)
        self.assertEqual(i * i, -1)

    def test_sum_of_roots_is_zero(self):
        for n in (3, 5, 8, 12):
            total = sum((Cyclotomic.root(n, k) for k in range(n)), Fraction(0))
            self.assertTrue(total.is_zero())

    def test_conjugate_involution(self):
        rng = np.random.default_rng(3)
        for _ in range(30):
            n = int(rng.integers(1, 16))
            x = Cyclotomic(n, [int(c) for c in rng.integers(-5, 6, size=n)])
            self.assertEqual(x.conjugate().conjugate(), x)
            self.assertAlmostEqual(x.conjugate().to_complex(),
                                   x.to_complex().conjugate(), places=9)

    def test_inverse(self):
        x = Cyclotomic(5, [1, 2, 0, -1])
        self.assertEqual(x * x.inverse(), 1)
        self.assertEqual(Cyclotomic.gaussian(1, 1) / Cyclotomic.gaussian(1, 1), 1)

    def test_zero_test_agrees_with_numeric(self):
        """零判定が数値評価（1e-10）と一致する"""
        rng = np.random.default_rng(11)
        for trial in range(100):
            n = int(rng.integers(2, 13))
            if trial % 3 == 0:
                k = int(rng.integers(1, 4))
                x = Cyclotomic(n, [k] * n)
            else:
                x = Cyclotomic(n, [int(c) for c in rng.integers(-3, 4, size=n)])
            self.assertEqual(x.is_zero(), abs(x.to_complex()) < 1e-10)


class TestCyclotomicEval(unittest.TestCase):
    """指標の単項式評価のテスト"""

    def test_examples(self):
        self.assertEqual(cyclotomic_eval([Fraction(1, 2)], [2]), 1)
        self.assertEqual(cyclotomic_eval([Fraction(1, 3)], [1]), Cyclotomic.root(3))
        value = cyclotomic_eval([Fraction(1, 4), Fraction(1, 2)], [1, 1])
        self.assertEqual(value, -Cyclotomic.root(4))
        self.assertLess(abs(value.to_complex() - cmath.exp(2j * cmath.pi * 0.75)), 1e-12)

    def test_length_mismatch(self):
        with self.assertRaises(InputError):
            cyclotomic_eval([Fraction(1, 2)], [1, 1])


class TestPolynomials(unittest.TestCase):
    """疎多項式のテスト"""

    def test_printing_is_grlex(self):
        p = poly({"y": 1, "x^2": 3, "1": -2, "x*y": -1})
        self.assertEqual(str(p), "3*x^2 - x*y + y - 2")

    def test_exquo(self):
        x, y = MultiPoly.variable(XY, "x"), MultiPoly.variable(XY, "y")
        self.assertEqual((x ** 2 - y ** 2).exquo(x - y), x + y)
        with self.assertRaises(ArithmeticError):
            x.exquo(y)

    def test_laurent_exquo(self):
        T = ("t1", "t2")
        t1, t2 = LaurentPoly.variable(T, "t1"), LaurentPoly.variable(T, "t2")
        p = (t1 ** -2 - t2) * (t1 * t2 ** -1 + 1)
        self.assertEqual(p.exquo(t1 * t2 ** -1 + 1), t1 ** -2 - t2)
        self.assertEqual((t1 ** -3).exquo(t1 ** 2), t1 ** -5)
        self.assertEqual((t1 ** 2 - 1).exquo(t1 ** -1 - t1), -t1)

    def test_laurent_exquo_not_divisible(self):
        T = ("t1", "t2")
        t1, t2 = LaurentPoly.variable(T, "t1"), LaurentPoly.variable(T, "t2")
        with self.assertRaises(ArithmeticError):
            (t1 ** -1 + t2).exquo(t1 - 1)
        with self.assertRaises(ArithmeticError):
            (t2 ** -4 + 1).exquo(t2 ** -1 + 2)

    def test_cyclotomic_coefficients(self):
        z = Cyclotomic.root(3)
        x = MultiPoly.variable(XY, "x")
        p = x * z + 1
        self.assertEqual((p * p).evaluate([Fraction(0), Fraction(0)]), 1)
        self.assertEqual(p.evaluate([Cyclotomic.root(3, 2), Fraction(5)]), 2)

    def test_laurent_inverse_power(self):
        t = LaurentPoly.variable(("t",), "t")
        self.assertEqual(t ** -2 * t ** 2, 1)
        self.assertEqual(parse_monomial("t1^2*t2^-1", ("t1", "t2")), (2, -1))

    def test_negative_exponent_rejected_for_multipoly(self):
        with self.assertRaises(InputError):
            MultiPoly(XY, {(-1, 0): 1})

    def test_parse_errors(self):
        with self.assertRaises(InputError):
            parse_monomial("q^2", XY)
        with self.assertRaises(InputError):
            parse_monomial("x^", XY)


class TestRankOverFractionField(unittest.TestCase):
    """Bareiss 消去による階数のテスト"""

    def test_examples(self):
        x, y = MultiPoly.variable(XY, "x"), MultiPoly.variable(XY, "y")
        zero = MultiPoly.zero(XY)
        self.assertEqual(rank_over_fraction_field(object_matrix([[x, zero], [zero, x]])), 2)
        self.assertEqual(rank_over_fraction_field(object_matrix([[x, y], [x, y]])), 1)
        self.assertEqual(rank_over_fraction_field(object_matrix([[x, y], [y, x]])), 2)
        sx, sy = sympy.symbols("x y")
        self.assertNotEqual(sympy.expand(sympy.Matrix([[sx, sy], [sy, sx]]).det()), 0)

    def test_mismatched_variables(self):
        x = MultiPoly.variable(XY, "x")
        z = MultiPoly.variable(("z",), "z")
        with self.assertRaises(InputError):
            rank_over_fraction_field(object_matrix([[x, z]]))

    def test_empty(self):
        self.assertEqual(rank_over_fraction_field(object_matrix([], ncols=3)), 0)

    def test_generic_rank_is_max_of_specializations(self):
        """20 個の有理点での特殊化階数の最大値と一致する"""
        rng = np.random.default_rng(5)
        for trial in range(15):
            rows = []
            for _ in range(3):
                rows.append([poly({"x": int(rng.integers(-3, 4)), "y": int(rng.integers(-3, 4)),
                                   "1": int(rng.integers(-3, 4))}) for _ in range(3)])
            if trial % 2 == 0:
                rows[2] = [a + b for a, b in zip(rows[0], rows[1])]
            m = object_matrix(rows)
            generic = rank_over_fraction_field(m)
            best = 0
            for _ in range(20):
                pt = [Fraction(int(rng.integers(-50, 51)), int(rng.integers(1, 7))) for _ in XY]
                specialized = object_matrix([[e.evaluate(pt) for e in row] for row in rows])
                r = rank_exact(specialized)
                self.assertLessEqual(r, generic)
                best = max(best, r)
            self.assertEqual(best, generic)
            expected = sympy.Matrix([[sympy.sympify(str(e).replace("^", "**")) for e in row]
                                     for row in rows]).rank()
            self.assertEqual(generic, expected)

    def test_laurent_rows_are_cleared(self):
        names = ("t",)
        t = LaurentPoly.variable(names, "t")
        m = object_matrix([[t ** -1, LaurentPoly.constant(names, 1)],
                           [LaurentPoly.constant(names, 1), t]])
        self.assertEqual(rank_over_fraction_field(m), 1)

    def test_cache_is_used(self):
        class DictCache:
            def __init__(self):
                self.data = {}

            def get(self, key):
                return self.data.get(key)

            def put(self, key, value):
                self.data[key] = value

        cache = DictCache()
        x, y = MultiPoly.variable(XY, "x"), MultiPoly.variable(XY, "y")
        m = object_matrix([[x, y], [y, x]])
        self.assertEqual(rank_over_fraction_field(m, cache=cache), 2)
        self.assertEqual(len(cache.data), 1)
        self.assertEqual(rank_over_fraction_field(m, cache=cache), 2)


class TestFieldLinearAlgebra(unittest.TestCase):
    """体上の線形代数のテスト"""

    def test_nullspace(self):
        m = object_matrix([[Fraction(1), Fraction(2), Fraction(3)]])
        basis = nullspace(m)
        self.assertEqual(len(basis), 2)
        for v in basis:
            self.assertEqual(sum(a * b for a, b in zip(m[0], v)), 0)

    def test_intersect_spaces(self):
        a = [[Fraction(1), Fraction(0), Fraction(0)], [Fraction(0), Fraction(1), Fraction(0)]]
        b = [[Fraction(1), Fraction(1), Fraction(1)], [Fraction(0), Fraction(1), Fraction(0)]]
        inter = intersect_spaces(a, b, 3)
        self.assertEqual(inter, [[Fraction(0), Fraction(1), Fraction(0)]])

    def test_rank_over_gaussian_rationals(self):
        i = Cyclotomic.gaussian(0, 1)
        m = object_matrix([[Fraction(1), i], [Fraction(1), -i]])
        self.assertEqual(rank_exact(m), 2)
        m2 = object_matrix([[Fraction(1), i], [i, Fraction(-1)]])
        self.assertEqual(rank_exact(m2), 1)

    def test_numeric_rank(self):
        self.assertEqual(rank_numeric(np.array([[1.0, 2.0], [2.0, 4.0 + 1e-14]])), 1)
        self.assertEqual(rank_numeric(np.zeros((0, 3))), 0)


class TestSmithNormalForm(unittest.TestCase):
    """スミス標準形のテスト"""

    def _check(self, a):
        U, D, V = smith_normal_form(a)
        self.assertEqual(int_matmul(int_matmul(U, a), V), D)
        self.assertEqual(abs(determinant(U)), 1)
        self.assertEqual(abs(determinant(V)), 1)
        diag = []
        for i in range(len(D)):
            for j in range(len(D[0])):
                if i != j:
                    self.assertEqual(D[i][j], 0)
        diag = [D[i][i] for i in range(min(len(D), len(D[0])))]
        self.assertTrue(all(d >= 0 for d in diag))
        nonzero = [d for d in diag if d]
        self.assertEqual(nonzero, diag[:len(nonzero)])
        for d1, d2 in zip(nonzero, nonzero[1:]):
            self.assertEqual(d2 % d1, 0)
        return D

    def test_examples(self):
        D = self._check([[2, 0], [0, 3]])
        self.assertEqual(D, [[1, 0], [0, 6]])
        self.assertEqual(self._check([[1, 0], [0, 1]]), [[1, 0], [0, 1]])
        self.assertEqual(self._check([[2, 4], [6, 8]]), [[2, 0], [0, 4]])

    def test_random_suite(self):
        """ランダム整数行列 500 個（6×6 まで、成分 [-20, 20]）"""
        rng = np.random.default_rng(2024)
        for _ in range(500):
            m, n = int(rng.integers(1, 7)), int(rng.integers(1, 7))
            a = [[int(x) for x in row] for row in rng.integers(-20, 21, size=(m, n))]
            D = self._check(a)
            expected = sympy.Matrix(a).rank()
            self.assertEqual(sum(1 for i in range(min(m, n)) if D[i][i]), expected)

    def test_known_invariants(self):
        a = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
        self.assertEqual(invariant_factors(a), [2, 6, 12])
        self.assertEqual(torsion_order(a), 144)
        self.assertEqual(abs(determinant(a)), 144)
        self.assertEqual(invariant_factors([[0, 0], [0, 0]]), [])
        self.assertEqual(invariant_factors([], 3), [])

    def test_rank_deficient_and_empty_shapes(self):
        U, D, V = smith_normal_form([[0, 2], [0, 4]])
        self.assertEqual(D, [[2, 0], [0, 0]])
        self.assertEqual(int_matmul(int_matmul(U, [[0, 2], [0, 4]]), V), D)
        U, D, V = smith_normal_form([], 2)
        self.assertEqual((U, D, V), ([], [], [[1, 0], [0, 1]]))


class TestLattices(unittest.TestCase):
    """格子演算のテスト"""

    def test_saturation_examples(self):
        self.assertEqual(saturate_lattice([[2, 0], [0, 2]]), [[1, 0], [0, 1]])
        self.assertEqual(saturate_lattice([[2, 4]]), [[1, 2]])
        sat = saturate_lattice([[1, 1, 0], [0, 2, 2]])
        self.assertTrue(same_lattice(sat, [[1, 1, 0], [0, 1, 1]], 3))

    def test_saturation_idempotent_and_span(self):
        rng = np.random.default_rng(8)
        for _ in range(60):
            n = int(rng.integers(1, 5))
            k = int(rng.integers(1, n + 1))
            b = [[int(x) for x in row] for row in rng.integers(-6, 7, size=(k, n))]
            sat = saturate_lattice(b, n)
            self.assertEqual(saturate_lattice(sat, n), sat)
            self.assertEqual(lattice_rank(sat, n), lattice_rank(b, n))
            self.assertEqual(lattice_rank(sat + b, n), lattice_rank(b, n))

    def test_hnf_shape(self):
        h = hermite_normal_form([[4, 6, 2], [2, 2, 0]])
        self.assertTrue(same_lattice(h, [[2, 2, 0], [0, 2, 2]], 3))
        self.assertGreater(h[0][0], 0)

    def test_hnf_reduced_form(self):
        self.assertEqual(hermite_normal_form([[2, 7], [0, 3]]), [[2, 1], [0, 3]])
        self.assertEqual(hermite_normal_form([[0, 3], [2, 7]]), [[2, 1], [0, 3]])
        self.assertEqual(hermite_normal_form([[0, 0, -5]]), [[0, 0, 5]])
        self.assertEqual(hermite_normal_form([[1, 2], [2, 4]]), [[1, 2]])
        self.assertEqual(hermite_normal_form([[0, 0]]), [])

    def test_hnf_echelon_random(self):
        rng = np.random.default_rng(13)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            k = int(rng.integers(1, 5))
            b = [[int(x) for x in row] for row in rng.integers(-9, 10, size=(k, n))]
            h = hermite_normal_form(b, n)
            self.assertEqual(len(h), lattice_rank(b, n))
            pivots = [next(j for j, x in enumerate(row) if x) for row in h]
            self.assertEqual(pivots, sorted(set(pivots)))
            for r, c in enumerate(pivots):
                self.assertGreater(h[r][c], 0)
                for above in range(r):
                    self.assertTrue(0 <= h[above][c] < h[r][c])
            self.assertEqual(hermite_normal_form(b + h, n), h)
            self.assertEqual(hermite_normal_form(h, n), h)

    def test_kernel(self):
        ker = lattice_kernel([[1, 1, 1]])
        self.assertEqual(ker, [[1, 0, -1], [0, 1, -1]])
        for v in lattice_kernel([[2, 4, 6], [1, 0, 1]]):
            self.assertEqual(2 * v[0] + 4 * v[1] + 6 * v[2], 0)
            self.assertEqual(v[0] + v[2], 0)

    def test_intersection(self):
        inter = lattice_intersection([[1, 0], [0, 2]], [[2, 0], [0, 1]], 2)
        self.assertTrue(same_lattice(inter, [[2, 0], [0, 2]], 2))
        self.assertEqual(lattice_intersection([[1, 1]], [[1, -1]], 2), [])

    def test_unimodular_completion(self):
        P, Pinv = unimodular_completion([[1, 1, 0]], 3)
        self.assertEqual(abs(determinant(P)), 1)
        self.assertEqual(int_matmul(P, Pinv), [[1, 0, 0], [0, 1, 0], [0, 0, 1]])
        self.assertTrue(same_lattice([P[0]], [[1, 1, 0]], 3))
        with self.assertRaises(InputError):
            unimodular_completion([[2, 0, 0]], 3)


if __name__ == "__main__":
    unittest.main()
