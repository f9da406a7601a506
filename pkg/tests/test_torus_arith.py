"""
src.torus（部分トーラスの演算・指数像・消滅判定）のユニットテスト
"""

import itertools
import unittest
from fractions import Fraction

import numpy as np

from src.exact.errors import InputError
from src.exact.lattice import invariant_factors, lattice_kernel
from src.exact.poly import LaurentPoly
from src.torus.subtorus import (
    AffineSubspaceQ,
    Subtorus,
    TranslatedSubtorus,
    canonical_translate,
    containment,
    exp_image,
    generated_subtorus,
    intersection,
    membership,
)
from src.torus.vanishing import (
    LaurentZeroSet,
    ax_lindemann_report,
    numeric_vanishing_check,
    vanishes_on_exp_image,
)


Z2 = ("z1", "z2")


def z(name: str, variables=Z2) -> LaurentPoly:
    return LaurentPoly.variable(variables, name)


def random_fraction(rng, bound: int = 12) -> Fraction:
    return Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, bound + 1)))


def random_affine(rng) -> AffineSubspaceQ:
    """n ≤ 4・階数 ≤ 3・分母 ≤ 12 の有理アフィン部分空間"""
    n = int(rng.integers(1, 5))
    d = int(rng.integers(0, min(n, 3) + 1))
    while True:
        dirs = [[random_fraction(rng) for _ in range(n)] for _ in range(d)]
        try:
            return AffineSubspaceQ(n, [random_fraction(rng) for _ in range(n)], dirs)
        except InputError:
            continue


def represent_again(V: AffineSubspaceQ, rng) -> AffineSubspaceQ:
    """基点と方向基底を取り替えた同じ部分空間"""
    base = V.random_point(rng)
    dirs = []
    for k in range(V.dim):
        scale = random_fraction(rng, 5) or Fraction(1)
        v = [scale * x for x in V.directions[k]]
        for j in range(k + 1, V.dim):
            c = random_fraction(rng, 5)
            v = [a + c * b for a, b in zip(v, V.directions[j])]
        dirs.append(v)
    return AffineSubspaceQ(V.n, base, dirs)


class TestExpImage(unittest.TestCase):
    """指数像のテスト"""

    def test_diagonal(self):
        T = exp_image(AffineSubspaceQ(2, [0, 0], [[1, 1]]))
        self.assertEqual(T.lattice, [[1, 1]])
        self.assertEqual(T.translate, [0, 0])

    def test_translate_kept(self):
        T = exp_image(AffineSubspaceQ(2, [Fraction(1, 3), 0], [[0, 1]]))
        self.assertEqual(T.lattice, [[0, 1]])
        self.assertEqual(T.translate, [Fraction(1, 3), 0])

    def test_saturation(self):
        T = exp_image(AffineSubspaceQ(2, [0, 0], [[2, 4]]))
        self.assertEqual(T.lattice, [[1, 2]])
        self.assertTrue(membership([Fraction(1, 5), Fraction(2, 5)], T)["member"])

    def test_rational_directions(self):
        T = exp_image(AffineSubspaceQ(2, [0, 0], [[Fraction(1, 2), Fraction(1, 3)]]))
        self.assertEqual(T.lattice, [[3, 2]])

    def test_float_rejected(self):
        with self.assertRaises(InputError):
            AffineSubspaceQ(2, [0.5, 0], [])

    def test_dependent_directions_rejected(self):
        with self.assertRaises(InputError):
            AffineSubspaceQ(2, [0, 0], [[1, 1], [2, 2]])

    def test_representation_invariance(self):
        rng = np.random.default_rng(40)
        for _ in range(200):
            V = random_affine(rng)
            self.assertEqual(exp_image(V), exp_image(represent_again(V, rng)))

    def test_points_are_members(self):
        rng = np.random.default_rng(41)
        for _ in range(40):
            V = random_affine(rng)
            T = exp_image(V)
            for _ in range(50):
                self.assertTrue(membership(V.random_point(rng), T)["member"])


class TestCanonicalTranslate(unittest.TestCase):
    """並進の正準化のテスト"""

    def test_modulo_diagonal(self):
        self.assertEqual(canonical_translate([[1, 1]], [Fraction(1, 2), 0], 2),
                         [0, Fraction(1, 2)])

    def test_point_reduced_mod_one(self):
        self.assertEqual(canonical_translate([], [Fraction(-1, 3), Fraction(7, 4)], 2),
                         [Fraction(2, 3), Fraction(3, 4)])

    def test_full_lattice(self):
        self.assertEqual(canonical_translate([[1, 0], [0, 1]], [Fraction(1, 3), 5], 2), [0, 0])

    def test_equality_is_coset_equality(self):
        T = TranslatedSubtorus(Subtorus(2, [[1, 2]]), [Fraction(1, 7), 0])
        S = TranslatedSubtorus(Subtorus(2, [[1, 2]]), [Fraction(1, 7) + 3, Fraction(5, 2) * 2])
        self.assertEqual(T, S)
        U = TranslatedSubtorus(Subtorus(2, [[1, 2]]), [Fraction(1, 7) + Fraction(1, 3), Fraction(2, 3)])
        self.assertEqual(T, U)
        self.assertNotEqual(T, TranslatedSubtorus(Subtorus(2, [[1, 2]]), [Fraction(1, 2), 0]))

    def test_lex_smallest_in_box(self):
        rng = np.random.default_rng(42)
        for _ in range(50):
            V = random_affine(rng)
            T = exp_image(V)
            self.assertTrue(all(0 <= x < 1 for x in T.translate))


class TestMembershipAndContainment(unittest.TestCase):
    """所属・包含のテスト"""

    def setUp(self):
        self.diagonal = TranslatedSubtorus(Subtorus(2, [[1, 1]]))
        self.full = TranslatedSubtorus(Subtorus(2, [[1, 0], [0, 1]]))

    def test_membership_examples(self):
        self.assertTrue(membership([Fraction(1, 2), Fraction(1, 2)], self.diagonal)["member"])
        self.assertFalse(membership([Fraction(1, 2), 0], self.diagonal)["member"])
        T = TranslatedSubtorus(Subtorus(2, [[0, 1]]), [Fraction(1, 3), 0])
        self.assertTrue(membership(T.translate, T)["member"])

    def test_membership_brute_force(self):
        """分母 6 の点すべてで定義方程式と比べる"""
        T = TranslatedSubtorus(Subtorus(3, [[1, 1, 0]]), [Fraction(1, 2), 0, Fraction(1, 3)])
        for a in itertools.product(range(6), repeat=3):
            w = [Fraction(x, 6) for x in a]
            expected = all(
                (sum((u_j * (w_j - v_j) for u_j, w_j, v_j in zip(u, w, T.translate)),
                     Fraction(0))).denominator == 1
                for u in ([1, -1, 0], [0, 0, 1]))
            self.assertEqual(membership(w, T)["member"], expected)

    def test_numeric_translate(self):
        T = TranslatedSubtorus(Subtorus(2, [[1, 1]]), numeric_translate=[1j, 1j])
        result = membership([Fraction(1, 8), Fraction(1, 8)], T)
        self.assertEqual(result["certificate"], "numeric")
        self.assertTrue(result["member"])

    def test_containment_examples(self):
        self.assertTrue(containment(self.diagonal, self.diagonal))
        self.assertTrue(containment(self.diagonal, self.full))
        self.assertFalse(containment(self.full, self.diagonal))
        point = TranslatedSubtorus(Subtorus(2, []), [Fraction(1, 3), Fraction(1, 3)])
        self.assertTrue(containment(point, self.diagonal))
        other = TranslatedSubtorus(Subtorus(2, []), [Fraction(1, 3), 0])
        self.assertFalse(containment(other, self.diagonal))

    def test_containment_transitive(self):
        rng = np.random.default_rng(43)
        for _ in range(20):
            n = 3
            rows = [[int(x) for x in rng.integers(-2, 3, size=n)] for _ in range(2)]
            U = TranslatedSubtorus(Subtorus(n, rows), [random_fraction(rng) for _ in range(n)])
            if U.dim == 0:
                continue
            T = TranslatedSubtorus(Subtorus(n, U.lattice[:1]),
                                   U.point([random_fraction(rng) for _ in U.lattice]))
            S = TranslatedSubtorus(Subtorus(n, []),
                                   T.point([random_fraction(rng) for _ in T.lattice]))
            self.assertTrue(containment(S, T))
            self.assertTrue(containment(T, U))
            self.assertTrue(containment(S, U))
            self.assertTrue(containment(U, U))


class TestIntersection(unittest.TestCase):
    """共通部分と成分数のテスト"""

    def test_examples(self):
        S, c = intersection(Subtorus(2, [[1, 0]]), Subtorus(2, [[0, 1]]))
        self.assertEqual((S.dim, c), (0, 1))
        S, c = intersection(Subtorus(2, [[1, 1]]), Subtorus(2, [[1, -1]]))
        self.assertEqual((S.dim, c), (0, 2))
        S, c = intersection(Subtorus(2, [[1, 1]]), Subtorus(2, [[1, 1]]))
        self.assertEqual((S.lattice, c), ([[1, 1]], 1))

    def test_brute_force_counts(self):
        """位数 12 を割るねじれ点を数え上げて成分数と比べる"""
        rng = np.random.default_rng(44)
        N = 12
        checked = 0
        while checked < 15:
            n = int(rng.integers(2, 4))
            S = Subtorus(n, [[int(x) for x in rng.integers(-2, 3, size=n)]
                             for _ in range(int(rng.integers(1, n)))])
            T = Subtorus(n, [[int(x) for x in rng.integers(-2, 3, size=n)]
                             for _ in range(int(rng.integers(1, n)))])
            equations = S.annihilator() + T.annihilator()
            if any(N % d for d in invariant_factors(equations, n)):
                continue
            identity, count = intersection(S, T)
            points = sum(
                1 for a in itertools.product(range(N), repeat=n)
                if all(sum(u_j * a_j for u_j, a_j in zip(u, a)) % N == 0 for u in equations))
            self.assertEqual(points, count * N ** identity.dim, f"{S} ∩ {T}")
            checked += 1

    def test_generated(self):
        G = generated_subtorus([Subtorus(3, [[1, 0, 0]]), Subtorus(3, [[0, 2, 0]])])
        self.assertEqual(G.lattice, [[1, 0, 0], [0, 1, 0]])

    def test_characters(self):
        T = TranslatedSubtorus(Subtorus(2, [[0, 1]]), [Fraction(1, 3), 0])
        self.assertEqual(T.characters(), [([1, 0], Fraction(1, 3))])
        self.assertEqual(Subtorus(3, [[1, 1, 1]]).annihilator(), lattice_kernel([[1, 1, 1]], 3))


class TestVanishing(unittest.TestCase):
    """指数像上の消滅判定のテスト"""

    def test_examples(self):
        diag = AffineSubspaceQ(2, [0, 0], [[1, 1]])
        ok, _ = vanishes_on_exp_image(z("z1") * z("z2") ** -1 - 1, diag)
        self.assertTrue(ok)
        ok, cert = vanishes_on_exp_image(z("z1") + z("z2") - 2, diag)
        self.assertFalse(ok)
        self.assertIsNotNone(cert["witness"])
        shifted = AffineSubspaceQ(2, [Fraction(1, 2), 0], [[1, 1]])
        ok, _ = vanishes_on_exp_image(z("z1") + z("z2"), shifted)
        self.assertTrue(ok)

    def test_numeric_agreement(self):
        rng = np.random.default_rng(45)
        for trial in range(20):
            V = random_affine(rng)
            variables = tuple(f"z{j + 1}" for j in range(V.n))
            T = exp_image(V)
            if trial % 2 == 0 and T.dim < V.n:
                u, c = T.characters()[0]
                order = c.denominator
                f = LaurentPoly.monomial(variables, [order * x for x in u]) - 1
                f = f * (LaurentPoly.variable(variables, "z1") + 2)
            else:
                f = LaurentPoly(variables, {
                    tuple(int(e) for e in rng.integers(-2, 3, size=V.n)): int(rng.integers(1, 4))
                    for _ in range(3)}) - 1
            exact, _ = vanishes_on_exp_image(f, V)
            numeric = numeric_vanishing_check(f, V, samples=200, rng=rng)
            self.assertEqual(exact, numeric["vanishes"], f"{f} on {V.to_dict()}")


class TestAxLindemann(unittest.TestCase):
    """指数像と零点集合の報告のテスト"""

    def test_diagonal(self):
        V = AffineSubspaceQ(2, [0, 0], [[1, 1]])
        W = LaurentZeroSet([z("z1") - z("z2")])
        report = ax_lindemann_report(V, W, 1)
        self.assertEqual(report["result"], "success")
        self.assertEqual(report["predicted"]["lattice"], [[1, 1]])
        self.assertIn("W is irreducible", report["hypotheses"]["asserted"])

    def test_translated(self):
        V = AffineSubspaceQ(2, [Fraction(1, 3), 0], [[0, 1]])
        W = LaurentZeroSet([z("z1") ** 3 - 1])
        report = ax_lindemann_report(V, W, 1)
        self.assertEqual(report["result"], "success")
        self.assertEqual(report["predicted"]["translate"], ["1/3", "0"])

    def test_failing_generator(self):
        V = AffineSubspaceQ(2, [0, 0], [[1, 1]])
        W = LaurentZeroSet([z("z1") - z("z2"), z("z1") - 2])
        report = ax_lindemann_report(V, W, 1)
        self.assertEqual(report["result"], "hypothesis-failed")
        self.assertEqual(report["failing_generator"], 1)

    def test_dimension_mismatch(self):
        V = AffineSubspaceQ(2, [0, 0], [[1, 1]])
        report = ax_lindemann_report(V, LaurentZeroSet([z("z1") - z("z2")]), 2)
        self.assertEqual(report["result"], "dimension-mismatch")


if __name__ == "__main__":
    unittest.main()
