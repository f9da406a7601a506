"""
部分トーラスと並進部分トーラス

(C*)^n の部分トーラスは飽和部分格子 L ⊂ Z^n（方向格子）で表す:
    T_L = exp(L ⊗ C),  exp(z) = (e^{2πi z_1}, ..., e^{2πi z_n})
並進部分トーラスは exp(v0)·T_L（v0 ∈ Q^n はねじれ並進）。

並進の正準形: L の Q 上 RREF のピボット座標を 0 にし、残りの座標を
Z^m + span_Z{(r_k)_非ピボット} を法として HNF で簡約する。結果は [0,1)^n の
辞書式最小の代表元で、二つの並進部分トーラスはこの正準形が一致するとき等しい。
"""

import cmath
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exact.cyclotomic import common_order, to_rational
from src.exact.errors import InputError
from src.exact.lattice import (
    hermite_normal_form,
    int_matrix,
    is_saturated,
    lattice_intersection,
    lattice_kernel,
    lattice_rank,
    saturate_lattice,
    torsion_order,
)
from src.exact.matrices import object_matrix, rank_exact, rref


# ---------------------------------------------------------------------------
# 部分トーラス
# ---------------------------------------------------------------------------

class Subtorus:
    """
    (C*)^n の部分トーラス。

    Args:
        n: 外側の次元
        rows: 方向格子の生成元（飽和していなければ飽和化して保持）
    """

    def __init__(self, n: int, rows: Sequence[Sequence[int]] = ()):
        self.n = int(n)
        given = int_matrix(rows)
        for r in given:
            if len(r) != self.n:
                raise InputError(f"格子ベクトルの長さ {len(r)} が次元 {self.n} と異なります")
        self.given_rows: List[List[int]] = hermite_normal_form(given, self.n)
        self.given_saturated = is_saturated(given, self.n) if given else True
        self.lattice: List[List[int]] = saturate_lattice(given, self.n)
        self._annihilator: Optional[List[List[int]]] = None

    @property
    def dim(self) -> int:
        return len(self.lattice)

    def annihilator(self) -> List[List[int]]:
        """L^⊥ ∩ Z^n の基底（T_L を定める指標の指数）"""
        if self._annihilator is None:
            self._annihilator = lattice_kernel(self.lattice, self.n)
        return self._annihilator

    def __eq__(self, other):
        if not isinstance(other, Subtorus):
            return NotImplemented
        return self.n == other.n and self.lattice == other.lattice

    __hash__ = None

    def to_dict(self) -> Dict:
        return {"n": self.n, "lattice": self.lattice}

    def __repr__(self) -> str:
        return f"Subtorus(n={self.n}, lattice={self.lattice})"


# ---------------------------------------------------------------------------
# 並進の正準化
# ---------------------------------------------------------------------------

def canonical_translate(lattice: Sequence[Sequence[int]], v: Sequence, n: int) -> List[Fraction]:
    """
    v を L_Q + Z^n を法として [0,1)^n の辞書式最小の代表元に簡約する。

    Args:
        lattice: 方向格子（整数行）
        v: 有理ベクトル
        n: 次元

    Returns:
        正準な並進ベクトル
    """
    v = [to_rational(x) for x in v]
    if not lattice:
        return [x - math.floor(x) for x in v]
    rows, pivots = rref(object_matrix([[Fraction(x) for x in r] for r in lattice]))
    for row, p in zip(rows, pivots):
        c = v[p]
        if c:
            v = [a - c * b for a, b in zip(v, row)]
    free = [j for j in range(n) if j not in pivots]
    if not free:
        return [Fraction(0)] * n
    denom = common_order([row[j] for row in rows for j in free])
    gens = [[denom * int(i == j) for j in range(len(free))] for i in range(len(free))]
    gens += [[int(denom * row[j]) for j in free] for row in rows]
    H = hermite_normal_form(gens, len(free))
    x = [denom * v[j] for j in free]
    for k, hrow in enumerate(H):
        q = math.floor(x[k] / hrow[k])
        if q:
            x = [a - q * b for a, b in zip(x, hrow)]
    out = [Fraction(0)] * n
    for j, value in zip(free, x):
        out[j] = value / denom
    return out


# ---------------------------------------------------------------------------
# 並進部分トーラス
# ---------------------------------------------------------------------------

class TranslatedSubtorus:
    """
    並進部分トーラス exp(v0)·T_L。

    Args:
        torus: 方向の部分トーラス
        translate: ねじれ並進 v0（有理数、mod 1）
        numeric_translate: 数値の並進（複素数、証明には使わない）
    """

    def __init__(self, torus: Subtorus, translate: Optional[Sequence] = None,
                 numeric_translate: Optional[Sequence[complex]] = None):
        self.torus = torus
        self.n = torus.n
        self.numeric_translate: Optional[List[complex]] = None
        self.translate: Optional[List[Fraction]] = None
        if numeric_translate is not None:
            if len(numeric_translate) != self.n:
                raise InputError("数値並進の長さが次元と異なります")
            self.numeric_translate = [complex(z) for z in numeric_translate]
        else:
            v = translate if translate is not None else [0] * self.n
            if len(v) != self.n:
                raise InputError(f"並進ベクトルの長さ {len(v)} が次元 {self.n} と異なります")
            self.translate = canonical_translate(torus.lattice, v, self.n)

    @classmethod
    def from_rows(cls, n: int, rows: Sequence[Sequence[int]],
                  translate: Optional[Sequence] = None) -> "TranslatedSubtorus":
        return cls(Subtorus(n, rows), translate)

    @property
    def lattice(self) -> List[List[int]]:
        return self.torus.lattice

    @property
    def dim(self) -> int:
        return self.torus.dim

    @property
    def is_torsion(self) -> bool:
        return self.translate is not None

    @property
    def order(self) -> int:
        """並進の位数（数値並進では 0）"""
        return common_order(self.translate) if self.is_torsion else 0

    def characters(self) -> List[Tuple[List[int], Fraction]]:
        """定義方程式 z^u = e^{2πi c}（u ∈ L^⊥ の基底, c = u·v0 mod 1）"""
        self._require_torsion()
        out = []
        for u in self.torus.annihilator():
            c = sum((a * b for a, b in zip(u, self.translate)), Fraction(0))
            out.append((u, c - math.floor(c)))
        return out

    def point(self, s: Sequence[Fraction]) -> List[Fraction]:
        """v0 + Σ s_k c_k（mod 1 は取らない）"""
        self._require_torsion()
        out = list(self.translate)
        for sk, row in zip(s, self.lattice):
            out = [a + sk * b for a, b in zip(out, row)]
        return out

    def random_torsion_point(self, rng: np.random.Generator, max_denominator: int = 12
                             ) -> List[Fraction]:
        s = [Fraction(int(rng.integers(0, 60)), int(rng.integers(1, max_denominator + 1)))
             for _ in self.lattice]
        return [x - math.floor(x) for x in self.point(s)]

    def torsion_point_of_order(self, order: int, rng: np.random.Generator) -> List[Fraction]:
        """パラメータ s_k ∈ (1/order)Z の乱数点（mod 1）"""
        s = [Fraction(int(rng.integers(0, order)), order) for _ in self.lattice]
        return [x - math.floor(x) for x in self.point(s)]

    def numeric_point(self, theta: Sequence[float]) -> List[complex]:
        """exp(v0)·exp(Σ θ_k c_k) の数値"""
        if self.is_torsion:
            base = [cmath.exp(2j * cmath.pi * float(x)) for x in self.translate]
        else:
            base = list(self.numeric_translate)
        out = []
        for j in range(self.n):
            phase = sum(t * row[j] for t, row in zip(theta, self.lattice))
            out.append(base[j] * cmath.exp(2j * cmath.pi * phase))
        return out

    def _require_torsion(self):
        if not self.is_torsion:
            raise InputError("数値並進の部分トーラスでは厳密演算はできません")

    def __eq__(self, other):
        if not isinstance(other, TranslatedSubtorus):
            return NotImplemented
        if self.torus != other.torus or self.is_torsion != other.is_torsion:
            return False
        if self.is_torsion:
            return self.translate == other.translate
        return np.allclose(self.numeric_translate, other.numeric_translate)

    __hash__ = None

    def to_dict(self) -> Dict:
        out = {"n": self.n, "lattice": self.lattice}
        if self.is_torsion:
            out["translate"] = [str(x) for x in self.translate]
            out["order"] = self.order
        else:
            out["numeric_translate"] = [[z.real, z.imag] for z in self.numeric_translate]
        return out

    def __repr__(self) -> str:
        return f"TranslatedSubtorus({self.to_dict()})"


# ---------------------------------------------------------------------------
# 有理アフィン部分空間と指数写像
# ---------------------------------------------------------------------------

class AffineSubspaceQ:
    """
    C^n の有理アフィン部分空間 v0 + span_C(directions)。

    Args:
        n: 次元
        base: 基点 v0（有理数）
        directions: 一次独立な有理方向ベクトル
    """

    def __init__(self, n: int, base: Sequence, directions: Sequence[Sequence] = ()):
        self.n = int(n)
        self.base = [to_rational(x) for x in base]
        self.directions = [[to_rational(x) for x in d] for d in directions]
        if len(self.base) != self.n or any(len(d) != self.n for d in self.directions):
            raise InputError("アフィン部分空間のベクトルの長さが次元と異なります")
        if self.directions and rank_exact(object_matrix(self.directions)) != len(self.directions):
            raise InputError("方向ベクトルが一次従属です")

    @property
    def dim(self) -> int:
        return len(self.directions)

    def integer_directions(self) -> List[List[int]]:
        """分母を払い内容で割った原始的な整数方向"""
        out = []
        for d in self.directions:
            denom = common_order(d)
            row = [int(x * denom) for x in d]
            g = 0
            for x in row:
                g = math.gcd(g, x)
            out.append([x // g for x in row] if g else row)
        return out

    def point(self, t: Sequence[Fraction]) -> List[Fraction]:
        out = list(self.base)
        for tk, d in zip(t, self.directions):
            out = [a + tk * b for a, b in zip(out, d)]
        return out

    def random_point(self, rng: np.random.Generator, max_denominator: int = 12) -> List[Fraction]:
        t = [Fraction(int(rng.integers(-30, 31)), int(rng.integers(1, max_denominator + 1)))
             for _ in self.directions]
        return self.point(t)

    def to_dict(self) -> Dict:
        return {"n": self.n, "base": [str(x) for x in self.base],
                "directions": [[str(x) for x in d] for d in self.directions]}


def exp_image(V: AffineSubspaceQ) -> TranslatedSubtorus:
    """
    exp(V) の閉包（有理 V では exp(V) そのもの）。

    方向格子は整数化した方向ベクトルの張る格子の飽和、並進は v0 mod 1。
    """
    rows = V.integer_directions()
    return TranslatedSubtorus(Subtorus(V.n, rows), V.base)


# ---------------------------------------------------------------------------
# 所属・包含・共通部分
# ---------------------------------------------------------------------------

def membership(w: Sequence, T: TranslatedSubtorus, tol: float = 1e-8) -> Dict:
    """
    exp(w) ∈ T の判定。

    ねじれ並進なら u·(w − v0) ∈ Z（u は L^⊥ の基底）で厳密に判定する。
    数値並進では数値判定（証明力なし）。

    Returns:
        {"member": bool, "certificate": "exact" | "numeric"}
    """
    w = [to_rational(x) for x in w]
    if len(w) != T.n:
        raise InputError(f"点の長さ {len(w)} が次元 {T.n} と異なります")
    if T.is_torsion:
        for u in T.torus.annihilator():
            s = sum((a * (b - c) for a, b, c in zip(u, w, T.translate)), Fraction(0))
            if s.denominator != 1:
                return {"member": False, "certificate": "exact", "character": u}
        return {"member": True, "certificate": "exact"}
    z = [cmath.exp(2j * cmath.pi * float(x)) for x in w]
    ok = True
    for u in T.torus.annihilator():
        lhs = np.prod([zj ** a for zj, a in zip(z, u)])
        rhs = np.prod([bj ** a for bj, a in zip(T.numeric_translate, u)])
        ok = ok and abs(lhs - rhs) < tol
    return {"member": bool(ok), "certificate": "numeric"}


def containment(S: TranslatedSubtorus, T: TranslatedSubtorus) -> bool:
    """S ⊆ T（方向の階数判定 + 並進の所属判定）"""
    if S.n != T.n:
        raise InputError("次元が異なる部分トーラスは比較できません")
    if not (S.is_torsion and T.is_torsion):
        raise InputError("包含判定にはねじれ並進が必要です")
    if S.lattice and lattice_rank(T.lattice + S.lattice, S.n) != len(T.lattice):
        return False
    return membership(S.translate, T)["member"]


def intersection(S: Subtorus, T: Subtorus) -> Tuple[Subtorus, int]:
    """
    部分トーラスの共通部分。

    Returns:
        (単位成分, 連結成分の個数)。成分数は Z^n/(L_S + L_T) のねじれ位数
    """
    if S.n != T.n:
        raise InputError("次元が異なる部分トーラスの共通部分は取れません")
    n = S.n
    inter = lattice_intersection(S.lattice, T.lattice, n)
    identity = Subtorus(n, inter)
    stacked = S.lattice + T.lattice
    count = torsion_order(stacked, n) if stacked else 1
    return identity, count


def generated_subtorus(pieces: Sequence[Subtorus]) -> Subtorus:
    """部分トーラスたちを含む最小の部分トーラス（格子の和の飽和）"""
    if not pieces:
        raise InputError("部分トーラスが 1 つも与えられていません")
    n = pieces[0].n
    rows = [r for p in pieces for r in p.lattice]
    return Subtorus(n, rows)
