"""
有限次元の可換微分次数付き代数（CDGA）と DG 加群

代数は次数ごとの基底名・積の構造定数・微分で与える。
積は graded commutativity（x·y = (-1)^{|x||y|} y·x）で片側から補完し、
単位元（次数 0 の基底）との積は暗黙に定める。

検証は例外を投げず、破れている公理と基底の組を列挙したレポートを返す:
  connectedness / d0 / grading / d_squared / commutativity /
  associativity / leibniz / square_zero
"""

from fractions import Fraction
from itertools import combinations
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exact.cyclotomic import to_rational
from src.exact.errors import InputError
from src.exact.matrices import zeros


Element = Dict[str, Fraction]


def _clean(x: Element) -> Element:
    return {k: v for k, v in x.items() if v != 0}


def _add_into(acc: Element, x: Element, scale=Fraction(1)):
    for k, v in x.items():
        acc[k] = acc.get(k, Fraction(0)) + scale * v


def _failure(axiom: str, witness: Sequence[str], detail: str) -> Dict:
    return {"axiom": axiom, "witness": list(witness), "detail": detail}


# ---------------------------------------------------------------------------
# 次数付き代数
# ---------------------------------------------------------------------------

class GradedAlgebra:
    """
    有限次元の次数付き代数と微分。

    Args:
        basis: 次数 i の基底名リストのリスト（basis[0] は単位元 1 つ）
        products: (a, b) → {c: 係数}。片側のみ与えれば可換性で補完
        differential: a → {b: 係数}
    """

    def __init__(self, basis: Sequence[Sequence[str]],
                 products: Optional[Dict[Tuple[str, str], Dict]] = None,
                 differential: Optional[Dict[str, Dict]] = None):
        self.basis: List[List[str]] = [list(names) for names in basis]
        self.top_degree = len(self.basis) - 1
        self.degree_of: Dict[str, int] = {}
        self.index_of: Dict[str, int] = {}
        for deg, names in enumerate(self.basis):
            for idx, name in enumerate(names):
                if name in self.degree_of:
                    raise InputError(f"基底名が重複しています: {name}")
                self.degree_of[name] = deg
                self.index_of[name] = idx
        self.unit: Optional[str] = self.basis[0][0] if self.basis and self.basis[0] else None

        self.given_products: Dict[Tuple[str, str], Element] = {}
        for (a, b), value in (products or {}).items():
            self._check_names([a, b] + list(value))
            self.given_products[(a, b)] = _clean({k: to_rational(v) for k, v in value.items()})
        self.diff: Dict[str, Element] = {}
        for a, value in (differential or {}).items():
            self._check_names([a] + list(value))
            self.diff[a] = _clean({k: to_rational(v) for k, v in value.items()})

        self.products: Dict[Tuple[str, str], Element] = {}
        for (a, b), value in self.given_products.items():
            self.products[(a, b)] = value
        for (a, b), value in self.given_products.items():
            if (b, a) not in self.given_products:
                sign = (-1) ** (self.degree_of[a] * self.degree_of[b])
                self.products[(b, a)] = {k: sign * v for k, v in value.items()}

    def _check_names(self, names: Sequence[str]):
        for n in names:
            if n not in self.degree_of:
                raise InputError(f"未定義の基底名: {n}")

    @property
    def dims(self) -> List[int]:
        return [len(names) for names in self.basis]

    def dim(self, degree: int) -> int:
        if 0 <= degree <= self.top_degree:
            return len(self.basis[degree])
        return 0

    # --- 元の演算 ---

    def multiply(self, x: Element, y: Element) -> Element:
        out: Element = {}
        for a, ca in x.items():
            for b, cb in y.items():
                if a == self.unit:
                    _add_into(out, {b: cb}, ca)
                elif b == self.unit:
                    _add_into(out, {a: ca}, cb)
                else:
                    _add_into(out, self.products.get((a, b), {}), ca * cb)
        return _clean(out)

    def d(self, x: Element) -> Element:
        out: Element = {}
        for a, ca in x.items():
            _add_into(out, self.diff.get(a, {}), ca)
        return _clean(out)

    def degree_of_element(self, x: Element) -> Optional[int]:
        degrees = {self.degree_of[k] for k in x}
        return degrees.pop() if len(degrees) == 1 else None

    # --- 行列 ---

    def _matrix(self, degree: int, image) -> np.ndarray:
        rows, cols = self.dim(degree + 1), self.dim(degree)
        out = zeros(rows, cols)
        if rows == 0:
            return out
        for j, name in enumerate(self.basis[degree] if cols else []):
            for target, c in image(name).items():
                if self.degree_of[target] == degree + 1:
                    out[self.index_of[target], j] = c
        return out

    def diff_matrix(self, degree: int) -> np.ndarray:
        """d^i : A^i → A^{i+1}（列 = A^i の基底）"""
        return self._matrix(degree, lambda name: self.diff.get(name, {}))

    def left_mult_matrix(self, degree: int, omega: Element) -> np.ndarray:
        """x ↦ ω·x : A^i → A^{i+1}"""
        return self._matrix(degree, lambda name: self.multiply(omega, {name: Fraction(1)}))

    def vector(self, degree: int, x: Element) -> List[Fraction]:
        v = [Fraction(0)] * self.dim(degree)
        for k, c in x.items():
            if self.degree_of[k] == degree:
                v[self.index_of[k]] += c
        return v

    def element(self, degree: int, v: Sequence) -> Element:
        return _clean({name: to_rational(c) for name, c in zip(self.basis[degree], v)})


# ---------------------------------------------------------------------------
# 外積代数
# ---------------------------------------------------------------------------

def _sort_sign(word: Sequence[int]) -> Tuple[int, Tuple[int, ...]]:
    """次数 1 の生成元の語を整列したときの符号（重複があれば 0）"""
    if len(set(word)) != len(word):
        return 0, ()
    w = list(word)
    sign = 1
    for i in range(len(w)):
        for j in range(len(w) - 1 - i):
            if w[j] > w[j + 1]:
                w[j], w[j + 1] = w[j + 1], w[j]
                sign = -sign
    return sign, tuple(w)


def exterior_algebra(generators: Sequence[str],
                     differential: Optional[Dict[str, Dict]] = None) -> GradedAlgebra:
    """
    次数 1 の生成元による外積代数 Λ(generators) を作る。

    基底名は生成元を "*" で連結した単項式（例: "a*b"）。生成元の微分は
    単項式名（順不同、符号は並べ替えで調整）への係数辞書で与え、
    高次の単項式へは Leibniz 則 d(g·w) = dg·w − g·dw で延長する。

    Args:
        generators: 生成元名
        differential: 生成元 → {単項式名: 係数}

    Returns:
        GradedAlgebra
    """
    gens = list(generators)
    if len(set(gens)) != len(gens):
        raise InputError(f"生成元名が重複しています: {gens}")
    n = len(gens)
    index = {g: i for i, g in enumerate(gens)}

    def name_of(word: Tuple[int, ...]) -> str:
        return "*".join(gens[i] for i in word) if word else "1"

    words = [list(combinations(range(n), k)) for k in range(n + 1)]
    basis = [[name_of(w) for w in ws] for ws in words]

    def parse_word(text: str) -> Tuple[int, Tuple[int, ...]]:
        if text.strip() == "1":
            return 1, ()
        parts = [p.strip() for p in text.split("*")]
        for p in parts:
            if p not in index:
                raise InputError(f"未定義の生成元: {p}")
        return _sort_sign([index[p] for p in parts])

    def mult_words(u: Tuple[int, ...], v: Tuple[int, ...]) -> Element:
        sign, w = _sort_sign(u + v)
        return {name_of(w): Fraction(sign)} if sign else {}

    products: Dict[Tuple[str, str], Dict] = {}
    for k1 in range(1, n + 1):
        for k2 in range(1, n + 1 - k1):
            for u in words[k1]:
                for v in words[k2]:
                    value = mult_words(u, v)
                    if value:
                        products[(name_of(u), name_of(v))] = value

    gen_diff: Dict[int, Element] = {}
    for g, value in (differential or {}).items():
        if g not in index:
            raise InputError(f"未定義の生成元: {g}")
        elem: Element = {}
        for mono, c in value.items():
            sign, w = parse_word(mono)
            if sign:
                _add_into(elem, {name_of(w): Fraction(sign)}, to_rational(c))
        gen_diff[index[g]] = _clean(elem)

    def d_word(word: Tuple[int, ...]) -> Element:
        if not word:
            return {}
        head, rest = word[0], word[1:]
        out: Element = {}
        dg = gen_diff.get(head, {})
        rest_name = name_of(rest)
        for name, c in dg.items():
            _add_into(out, _mult_names(name, rest_name), c)
        for name, c in d_word(rest).items():
            _add_into(out, _mult_names(gens[head], name), -c)
        return _clean(out)

    def _mult_names(a: str, b: str) -> Element:
        if a == "1":
            return {b: Fraction(1)}
        if b == "1":
            return {a: Fraction(1)}
        return mult_words(parse_word(a)[1], parse_word(b)[1])

    differential_table: Dict[str, Element] = {}
    for k in range(1, n + 1):
        for w in words[k]:
            value = gen_diff.get(w[0], {}) if k == 1 else d_word(w)
            if value:
                differential_table[name_of(w)] = value
    return GradedAlgebra(basis, products, differential_table)


# ---------------------------------------------------------------------------
# 検証
# ---------------------------------------------------------------------------

def validate_cdga(A: GradedAlgebra) -> Dict:
    """
    CDGA の公理をすべて検査する。

    Returns:
        {"valid": bool, "failures": [{"axiom", "witness", "detail"}, ...]}
    """
    failures: List[Dict] = []
    if A.dim(0) != 1:
        failures.append(_failure("connectedness", A.basis[0] if A.basis else [],
                                 f"dim A^0 = {A.dim(0)}（1 であるべき）"))
    if A.unit is not None and A.d({A.unit: Fraction(1)}):
        failures.append(_failure("d0", [A.unit], "d(1) ≠ 0"))

    names = [n for names in A.basis for n in names]
    non_unit = [n for n in names if n != A.unit]

    for a in names:
        image = A.diff.get(a, {})
        bad = [t for t in image if A.degree_of[t] != A.degree_of[a] + 1]
        if bad:
            failures.append(_failure("grading", [a] + bad, f"d({a}) の次数が {A.degree_of[a] + 1} でない"))
        dd = A.d(A.d({a: Fraction(1)}))
        if dd:
            failures.append(_failure("d_squared", [a], f"d(d({a})) = {_format(dd)}"))

    for (a, b), value in A.products.items():
        bad = [t for t in value if A.degree_of[t] != A.degree_of[a] + A.degree_of[b]]
        if bad:
            failures.append(_failure("grading", [a, b] + bad, f"{a}·{b} の次数が不正"))

    for (a, b), value in A.given_products.items():
        sign = (-1) ** (A.degree_of[a] * A.degree_of[b])
        other = A.given_products.get((b, a))
        if other is None:
            continue
        expected = _clean({k: sign * v for k, v in other.items()})
        if _clean(value) != expected:
            failures.append(_failure("commutativity", [a, b],
                                     f"{a}·{b} ≠ (-1)^{{|{a}||{b}|}} {b}·{a}"))

    for a in A.basis[1] if A.top_degree >= 1 else []:
        sq = A.multiply({a: Fraction(1)}, {a: Fraction(1)})
        if sq:
            failures.append(_failure("square_zero", [a], f"{a}·{a} = {_format(sq)}"))

    for a in non_unit:
        for b in non_unit:
            if A.degree_of[a] + A.degree_of[b] > A.top_degree:
                continue
            for c in non_unit:
                if A.degree_of[a] + A.degree_of[b] + A.degree_of[c] > A.top_degree:
                    continue
                x, y, z = ({a: Fraction(1)}, {b: Fraction(1)}, {c: Fraction(1)})
                left = A.multiply(A.multiply(x, y), z)
                right = A.multiply(x, A.multiply(y, z))
                if left != right:
                    failures.append(_failure("associativity", [a, b, c],
                                             f"({a}·{b})·{c} ≠ {a}·({b}·{c})"))

    for a in non_unit:
        for b in non_unit:
            if A.degree_of[a] + A.degree_of[b] > A.top_degree:
                continue
            x, y = {a: Fraction(1)}, {b: Fraction(1)}
            left = A.d(A.multiply(x, y))
            right: Element = {}
            _add_into(right, A.multiply(A.d(x), y))
            _add_into(right, A.multiply(x, A.d(y)), Fraction((-1) ** A.degree_of[a]))
            if left != _clean(right):
                failures.append(_failure("leibniz", [a, b],
                                         f"d({a}·{b}) ≠ d{a}·{b} + (-1)^{{|{a}|}} {a}·d{b}"))
    return {"valid": not failures, "failures": failures}


def _format(x: Element) -> str:
    return " + ".join(f"{c}*{k}" for k, c in sorted(x.items())) or "0"


# ---------------------------------------------------------------------------
# DG 加群
# ---------------------------------------------------------------------------

class DGModule:
    """
    CDGA 上の有限次元 DG 加群。

    Args:
        algebra: 作用する代数
        basis: 次数ごとの基底名
        action: (代数の基底名, 加群の基底名) → {加群の基底名: 係数}
        differential: 加群の基底名 → {加群の基底名: 係数}
    """

    def __init__(self, algebra: GradedAlgebra, basis: Sequence[Sequence[str]],
                 action: Optional[Dict[Tuple[str, str], Dict]] = None,
                 differential: Optional[Dict[str, Dict]] = None):
        self.algebra = algebra
        self.basis = [list(names) for names in basis]
        self.top_degree = len(self.basis) - 1
        self.degree_of: Dict[str, int] = {}
        self.index_of: Dict[str, int] = {}
        for deg, names in enumerate(self.basis):
            for idx, name in enumerate(names):
                if name in self.degree_of or name in algebra.degree_of:
                    raise InputError(f"加群の基底名が重複しています: {name}")
                self.degree_of[name] = deg
                self.index_of[name] = idx
        self.action: Dict[Tuple[str, str], Element] = {}
        for (a, m), value in (action or {}).items():
            if a not in algebra.degree_of:
                raise InputError(f"未定義の代数の基底名: {a}")
            for n in [m] + list(value):
                if n not in self.degree_of:
                    raise InputError(f"未定義の加群の基底名: {n}")
            self.action[(a, m)] = _clean({k: to_rational(v) for k, v in value.items()})
        self.diff: Dict[str, Element] = {}
        for m, value in (differential or {}).items():
            for n in [m] + list(value):
                if n not in self.degree_of:
                    raise InputError(f"未定義の加群の基底名: {n}")
            self.diff[m] = _clean({k: to_rational(v) for k, v in value.items()})

    @property
    def dims(self) -> List[int]:
        return [len(names) for names in self.basis]

    def dim(self, degree: int) -> int:
        if 0 <= degree <= self.top_degree:
            return len(self.basis[degree])
        return 0

    def act(self, x: Element, m: Element) -> Element:
        out: Element = {}
        for a, ca in x.items():
            for b, cb in m.items():
                if a == self.algebra.unit:
                    _add_into(out, {b: cb}, ca)
                else:
                    _add_into(out, self.action.get((a, b), {}), ca * cb)
        return _clean(out)

    def d(self, m: Element) -> Element:
        out: Element = {}
        for b, c in m.items():
            _add_into(out, self.diff.get(b, {}), c)
        return _clean(out)

    def _matrix(self, degree: int, image) -> np.ndarray:
        rows, cols = self.dim(degree + 1), self.dim(degree)
        out = zeros(rows, cols)
        if rows == 0:
            return out
        for j, name in enumerate(self.basis[degree] if cols else []):
            for target, c in image(name).items():
                if self.degree_of[target] == degree + 1:
                    out[self.index_of[target], j] = c
        return out

    def diff_matrix(self, degree: int) -> np.ndarray:
        return self._matrix(degree, lambda name: self.diff.get(name, {}))

    def left_mult_matrix(self, degree: int, omega: Element) -> np.ndarray:
        return self._matrix(degree, lambda name: self.act(omega, {name: Fraction(1)}))


def validate_module(M: DGModule) -> Dict:
    """DG 加群の公理（次数・d²・結合性・Leibniz）を検査する"""
    A = M.algebra
    failures: List[Dict] = []
    for m in [n for names in M.basis for n in names]:
        bad = [t for t in M.diff.get(m, {}) if M.degree_of[t] != M.degree_of[m] + 1]
        if bad:
            failures.append(_failure("grading", [m] + bad, f"d({m}) の次数が不正"))
        dd = M.d(M.d({m: Fraction(1)}))
        if dd:
            failures.append(_failure("d_squared", [m], f"d(d({m})) = {_format(dd)}"))
    for (a, m), value in M.action.items():
        bad = [t for t in value if M.degree_of[t] != A.degree_of[a] + M.degree_of[m]]
        if bad:
            failures.append(_failure("grading", [a, m] + bad, f"{a}·{m} の次数が不正"))
    algebra_names = [n for names in A.basis for n in names if n != A.unit]
    module_names = [n for names in M.basis for n in names]
    for a in algebra_names:
        for m in module_names:
            x, v = {a: Fraction(1)}, {m: Fraction(1)}
            if A.degree_of[a] + M.degree_of[m] <= M.top_degree:
                left = M.d(M.act(x, v))
                right: Element = {}
                _add_into(right, M.act(A.d(x), v))
                _add_into(right, M.act(x, M.d(v)), Fraction((-1) ** A.degree_of[a]))
                if left != _clean(right):
                    failures.append(_failure("leibniz", [a, m], f"d({a}·{m}) が Leibniz 則を満たさない"))
            for b in algebra_names:
                if A.degree_of[a] + A.degree_of[b] + M.degree_of[m] > M.top_degree:
                    continue
                y = {b: Fraction(1)}
                if M.act(A.multiply(x, y), v) != M.act(x, M.act(y, v)):
                    failures.append(_failure("associativity", [a, b, m],
                                             f"({a}·{b})·{m} ≠ {a}·({b}·{m})"))
    return {"valid": not failures, "failures": failures}
