"""
群の表示と Fox 微分

表示 <g_1, ..., g_n' | r_1, ..., r_m> と可換化 Z^n' → Z^n から、極大自由
可換被覆の胞体鎖複体（ローラン多項式環上の 2 次元複体）を作る:

    ∂_1 = ( t^{[g_j]} − 1 )_j                 shape (1, n')
    ∂_2 = ( 可換化した Fox 微分 ∂r/∂g_j )      shape (n', m)

Fox 微分の規約: 文字 g_j が位置 p にあれば +t^{[接頭辞]}、g_j^{-1} なら
−t^{[g_j^{-1} を含む接頭辞]}。基本公式 Σ_j ∂r/∂g_j (t^{[g_j]} − 1) = t^{[r]} − 1
から ∂_1∂_2 = 0 が従う。
"""

import re
from typing import Dict, List, Optional, Sequence, Tuple

from src.exact.errors import InputError
from src.exact.lattice import int_matrix, invariant_factors
from src.exact.matrices import object_matrix
from src.exact.poly import LaurentPoly
from src.twisted.complex import LaurentComplex, torus_variables


Letter = Tuple[int, int]

_LETTER_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


# ---------------------------------------------------------------------------
# 語
# ---------------------------------------------------------------------------

def parse_word(tokens: Sequence[str], generators: Sequence[str]) -> List[Letter]:
    """
    "a", "b^-1", "c^2" の列を (生成元番号, ±1) の列に展開する。

    Raises:
        InputError: 未知の生成元・指数 0・書式不正
    """
    out: List[Letter] = []
    for token in tokens:
        m = _LETTER_RE.match(token.strip())
        if not m:
            raise InputError(f"語の文字の書式が不正です: {token!r}")
        name, power = m.group(1), int(m.group(2) or 1)
        if name not in generators:
            raise InputError(f"未知の生成元 {name!r}（宣言: {', '.join(generators)}）")
        if power == 0:
            raise InputError(f"指数 0 の文字は使えません: {token!r}")
        sign = 1 if power > 0 else -1
        out.extend([(list(generators).index(name), sign)] * abs(power))
    return out


def free_reduce(word: Sequence[Letter]) -> List[Letter]:
    """g g^{-1} の相殺を繰り返した既約語"""
    stack: List[Letter] = []
    for g, s in word:
        if stack and stack[-1] == (g, -s):
            stack.pop()
        else:
            stack.append((g, s))
    return stack


def word_text(word: Sequence[Letter], generators: Sequence[str]) -> str:
    if not word:
        return "1"
    return " ".join(generators[g] if s > 0 else f"{generators[g]}^-1" for g, s in word)


# ---------------------------------------------------------------------------
# 表示
# ---------------------------------------------------------------------------

class Presentation:
    """
    有限表示と可換化写像。

    Args:
        generators: 生成元の名前
        relators: 関係子（文字列トークンの列、または (番号, ±1) の列）
        abelianization: 生成元 j の像 [g_j] ∈ Z^n を行とする行列（既定は単位行列）
    """

    def __init__(self, generators: Sequence[str], relators: Sequence[Sequence] = (),
                 abelianization: Optional[Sequence[Sequence[int]]] = None):
        self.generators = list(generators)
        if len(set(self.generators)) != len(self.generators):
            raise InputError("生成元の名前が重複しています")
        self.relators: List[List[Letter]] = []
        for r in relators:
            word = r if r and not isinstance(r[0], str) else parse_word(r, self.generators)
            self.relators.append(free_reduce(word))
        if abelianization is None:
            abelianization = [[int(i == j) for j in range(len(self.generators))]
                              for i in range(len(self.generators))]
        self.abelianization = int_matrix(abelianization)
        if len(self.abelianization) != len(self.generators):
            raise InputError("可換化写像の行数が生成元の数と異なります")
        self.n = len(self.abelianization[0]) if self.abelianization else 0
        self._check_abelianization()

    def _check_abelianization(self):
        if self.n and invariant_factors(self.abelianization, self.n) != [1] * self.n:
            raise InputError("可換化写像が Z^n への全射ではありません")
        for idx, r in enumerate(self.relators):
            if any(self.image(r)):
                raise InputError(
                    f"関係子 {idx} の可換化像が 0 ではありません: {word_text(r, self.generators)}")

    def image(self, word: Sequence[Letter]) -> List[int]:
        """語の可換化像 [w] ∈ Z^n"""
        out = [0] * self.n
        for g, s in word:
            out = [a + s * b for a, b in zip(out, self.abelianization[g])]
        return out

    def to_dict(self) -> Dict:
        return {
            "generators": self.generators,
            "relators": [word_text(r, self.generators) for r in self.relators],
            "abelianization": self.abelianization,
        }


# ---------------------------------------------------------------------------
# Fox 微分
# ---------------------------------------------------------------------------

def fox_derivative(P: Presentation, word: Sequence[Letter], j: int,
                   variables: Sequence[str]) -> LaurentPoly:
    """可換化した Fox 微分 ∂w/∂g_j"""
    terms: Dict[Tuple[int, ...], int] = {}
    prefix = [0] * P.n
    for g, s in word:
        if s > 0:
            if g == j:
                key = tuple(prefix)
                terms[key] = terms.get(key, 0) + 1
            prefix = [a + b for a, b in zip(prefix, P.abelianization[g])]
        else:
            prefix = [a - b for a, b in zip(prefix, P.abelianization[g])]
            if g == j:
                key = tuple(prefix)
                terms[key] = terms.get(key, 0) - 1
    return LaurentPoly(variables, terms)


def presentation_to_complex(P: Presentation) -> LaurentComplex:
    """表示複体の同変鎖複体（C_0 = 1, C_1 = 生成元, C_2 = 関係子）"""
    variables = torus_variables(P.n)
    ng, nr = len(P.generators), len(P.relators)
    one = LaurentPoly.constant(variables, 1)
    d1 = object_matrix([[LaurentPoly.monomial(variables, P.abelianization[j]) - one
                         for j in range(ng)]], ng)
    boundaries = {1: d1}
    ranks = [1, ng]
    if nr:
        d2 = object_matrix([[fox_derivative(P, r, j, variables) for r in P.relators]
                            for j in range(ng)], nr)
        boundaries[2] = d2
        ranks.append(nr)
    return LaurentComplex(P.n, ranks, boundaries, variables)
