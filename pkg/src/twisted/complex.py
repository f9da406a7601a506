"""
ローラン多項式環上のねじれ鎖複体と特性多様体

鎖複体 C_0 ← C_1 ← ... の境界 ∂_i は shape (rank C_{i-1}, rank C_i) の
ローラン多項式行列（列ベクトルに作用）。階数 1 の指標 ρ で t_j ↦ ρ_j と
評価した複体のホモロジー次元

    dim H_i = rank C_i − rank ∂_i(ρ) − rank ∂_{i+1}(ρ)

を、ねじれ指標では Q(ζ_N) 上で厳密に、数値指標では特異値分解で求める。
コホモロジーの規約（--dual）は逆指標 ρ^{-1} で評価することに等しい
（転置は階数を変えない）。

並進部分トーラス T ⊂ Σ^i_k の証明は、T の単項式パラメータ表示を代入した
行列の有理関数体上の階数（生成的階数）で行う。点での階数は生成的階数以下
なので、生成的ベッチ数 ≥ k なら T 全体が Σ^i_k に含まれる。
"""

import cmath
import itertools
import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import numpy as np
from sympy import nextprime, primerange

from src.exact.cyclotomic import common_order, to_rational
from src.exact.errors import InputError
from src.exact.matrices import (
    NUMERIC_RANK_RTOL,
    apply_entries,
    matmul,
    rank_exact,
    rank_numeric,
    rank_over_fraction_field,
    zeros,
)
from src.exact.poly import LaurentPoly, MultiPoly
from src.torus.subtorus import TranslatedSubtorus


SWEEP_ORDER = 12
SWEEP_MAX_RANDOM_ORDER = 60
WITNESS_MAX_ORDER = 101


# ---------------------------------------------------------------------------
# 鎖複体
# ---------------------------------------------------------------------------

def torus_variables(n: int) -> List[str]:
    return [f"t{j + 1}" for j in range(n)]


class LaurentComplex:
    """
    ローラン多項式環 Q[t_1^{±1}, ..., t_n^{±1}] 上の自由鎖複体。

    Args:
        n: 指標トーラスの次元
        ranks: 各次数の自由加群の階数
        boundaries: 次数 i → ∂_i（shape (ranks[i-1], ranks[i])）。省略は零写像
        variables: 変数名（既定は t1..tn）
    """

    def __init__(self, n: int, ranks: Sequence[int], boundaries: Optional[Dict[int, np.ndarray]] = None,
                 variables: Optional[Sequence[str]] = None):
        self.n = int(n)
        self.ranks = [int(r) for r in ranks]
        if any(r < 0 for r in self.ranks):
            raise InputError(f"階数は非負整数です: {self.ranks}")
        self.variables = tuple(variables) if variables else tuple(torus_variables(self.n))
        if len(self.variables) != self.n:
            raise InputError(f"変数の数 {len(self.variables)} が次元 {self.n} と異なります")
        self.boundaries: Dict[int, np.ndarray] = {}
        for i in range(1, len(self.ranks)):
            shape = (self.ranks[i - 1], self.ranks[i])
            given = (boundaries or {}).get(i)
            if given is None:
                self.boundaries[i] = zeros(*shape, LaurentPoly.zero(self.variables))
                continue
            if given.shape != shape:
                raise InputError(f"∂{i} の形状 {given.shape} が階数から決まる {shape} と異なります")
            self.boundaries[i] = apply_entries(given, self._entry)
        for i in (boundaries or {}):
            if not 1 <= i < len(self.ranks):
                raise InputError(f"境界写像の次数 {i} が範囲外です")

    def _entry(self, x) -> LaurentPoly:
        if isinstance(x, MultiPoly):
            if x.variables != self.variables:
                raise InputError(f"変数リストが一致しません: {x.variables} と {self.variables}")
            return LaurentPoly(self.variables, x.terms)
        return LaurentPoly.constant(self.variables, to_rational(x))

    @property
    def length(self) -> int:
        return len(self.ranks)

    def boundary(self, i: int) -> np.ndarray:
        """∂_i（範囲外は空行列）"""
        if 1 <= i < len(self.ranks):
            return self.boundaries[i]
        rows = self.ranks[i - 1] if 1 <= i <= len(self.ranks) else 0
        cols = self.ranks[i] if 0 <= i < len(self.ranks) else 0
        return zeros(rows, cols, LaurentPoly.zero(self.variables))

    def evaluate(self, i: int, rho: "Character") -> np.ndarray:
        m = self.boundary(i)
        if rho.is_torsion:
            return apply_entries(m, lambda p: p.evaluate_torsion(rho.values))
        return apply_entries(m, lambda p: p.evaluate_numeric(rho.numeric))

    def to_dict(self) -> Dict:
        return {
            "n": self.n,
            "ranks": self.ranks,
            "boundaries": {
                str(i): [[str(m[r, c]) for c in range(m.shape[1])] for r in range(m.shape[0])]
                for i, m in sorted(self.boundaries.items())
            },
        }


def validate_complex(C: LaurentComplex) -> Dict:
    """∂_i ∘ ∂_{i+1} = 0 を記号的に確かめる"""
    failures = []
    zero = LaurentPoly.zero(C.variables)
    for i in range(1, C.length - 1):
        prod = matmul(C.boundaries[i], C.boundaries[i + 1], zero)
        for r, c in np.ndindex(*prod.shape):
            if not prod[r, c].is_zero():
                failures.append({"degree": i, "entry": [r, c], "value": str(prod[r, c])})
    return {"valid": not failures, "failures": failures}


def euler_characteristic(C: LaurentComplex) -> int:
    return sum((-1) ** i * r for i, r in enumerate(C.ranks))


# ---------------------------------------------------------------------------
# 指標
# ---------------------------------------------------------------------------

class Character:
    """
    階数 1 の指標 ρ ∈ (C*)^n。

    ねじれ指標は q ∈ (Q/Z)^n（ρ_j = e^{2πi q_j}、[0,1) に簡約）、
    数値指標は複素数の列で保持する。
    """

    def __init__(self, values: Optional[Sequence] = None, numeric: Optional[Sequence[complex]] = None):
        if (values is None) == (numeric is None):
            raise InputError("指標はねじれ値か数値のどちらか一方で与えてください")
        self.values: Optional[List[Fraction]] = None
        self.numeric: Optional[List[complex]] = None
        if values is not None:
            qs = [to_rational(x) for x in values]
            self.values = [x - math.floor(x) for x in qs]
        else:
            self.numeric = [complex(z) for z in numeric]
            if any(z == 0 for z in self.numeric):
                raise InputError("数値指標の成分は 0 にできません")

    @classmethod
    def trivial(cls, n: int) -> "Character":
        return cls([0] * n)

    @property
    def n(self) -> int:
        return len(self.values) if self.is_torsion else len(self.numeric)

    @property
    def is_torsion(self) -> bool:
        return self.values is not None

    @property
    def order(self) -> int:
        """位数（数値指標では 0）"""
        return common_order(self.values) if self.is_torsion else 0

    def is_trivial(self, tol: float = 1e-12) -> bool:
        if self.is_torsion:
            return not any(self.values)
        return all(abs(z - 1) < tol for z in self.numeric)

    def inverse(self) -> "Character":
        if self.is_torsion:
            return Character([-x for x in self.values])
        return Character(numeric=[1 / z for z in self.numeric])

    def conjugate(self) -> "Character":
        """複素共役（ねじれ指標では逆指標と一致）"""
        if self.is_torsion:
            return self.inverse()
        return Character(numeric=[z.conjugate() for z in self.numeric])

    def complex_values(self) -> List[complex]:
        if self.is_torsion:
            return [cmath.exp(2j * cmath.pi * float(x)) for x in self.values]
        return list(self.numeric)

    def __eq__(self, other):
        if not isinstance(other, Character):
            return NotImplemented
        if self.is_torsion and other.is_torsion:
            return self.values == other.values
        return np.allclose(self.complex_values(), other.complex_values())

    __hash__ = None

    def to_dict(self) -> Dict:
        if self.is_torsion:
            return {"kind": "torsion", "values": [str(x) for x in self.values], "order": self.order}
        return {"kind": "numeric", "values": [[z.real, z.imag] for z in self.numeric]}

    def __repr__(self) -> str:
        return f"Character({self.to_dict()})"


# ---------------------------------------------------------------------------
# ねじれベッチ数
# ---------------------------------------------------------------------------

def _check_character(C: LaurentComplex, rho: Character):
    if rho.n != C.n:
        raise InputError(f"指標の長さ {rho.n} が複体の次元 {C.n} と異なります")


def twisted_betti(C: LaurentComplex, rho: Character, dual: bool = False,
                  rtol: float = NUMERIC_RANK_RTOL) -> List[int]:
    """
    指標 ρ でのねじれベッチ数 dim H_i(C ⊗ C_ρ)。

    Args:
        C: 鎖複体
        rho: 指標（ねじれなら厳密、数値なら特異値階数）
        dual: True ならコホモロジー規約（逆指標で評価）
        rtol: 数値階数の相対許容誤差

    Returns:
        次数ごとのベッチ数
    """
    _check_character(C, rho)
    if dual:
        rho = rho.inverse()
    rank_fn = rank_exact if rho.is_torsion else (lambda m: rank_numeric(m, rtol))
    ranks = [0] * (C.length + 1)
    for i in range(1, C.length):
        ranks[i] = rank_fn(C.evaluate(i, rho))
    return [C.ranks[i] - ranks[i] - ranks[i + 1] for i in range(C.length)]


def charvar_membership(C: LaurentComplex, i: int, k: int, rho: Character,
                       dual: bool = False) -> bool:
    """ρ ∈ Σ^i_k ⟺ dim H_i(ρ) ≥ k"""
    if k <= 0:
        return True
    betti = twisted_betti(C, rho, dual)
    return 0 <= i < len(betti) and betti[i] >= k


# ---------------------------------------------------------------------------
# 並進部分トーラスの証明
# ---------------------------------------------------------------------------

def _restricted_ranks(C: LaurentComplex, T: TranslatedSubtorus, cache=None) -> List[int]:
    params = [f"s{k + 1}" for k in range(T.dim)]
    ranks = [0] * (C.length + 1)
    for i in range(1, C.length):
        m = apply_entries(C.boundaries[i],
                          lambda p: p.substitute_torus(T.translate, T.lattice, params))
        ranks[i] = rank_over_fraction_field(m, cache)
    return ranks


def generic_twisted_betti(C: LaurentComplex, T: TranslatedSubtorus, cache=None) -> List[int]:
    """T の生成点でのねじれベッチ数（有理関数体上の階数から）"""
    ranks = _restricted_ranks(C, T, cache)
    return [C.ranks[i] - ranks[i] - ranks[i + 1] for i in range(C.length)]


def _betti_in_degree(betti: List[int], i: int) -> int:
    return betti[i] if 0 <= i < len(betti) else 0


def _degree_span(p: LaurentPoly) -> int:
    if not p.terms:
        return 0
    low = p.min_exponents()
    return max(sum(a - b for a, b in zip(e, low)) for e in p.terms)


def restricted_degree_bound(C: LaurentComplex, T: TranslatedSubtorus, i: int) -> int:
    """T に制限した ∂_i, ∂_{i+1} の小行列式（単項式倍で多項式化）の全次数の上界"""
    params = [f"s{k + 1}" for k in range(T.dim)]
    bound = 0
    for j in (i, i + 1):
        if not 1 <= j < C.length:
            continue
        m = C.boundaries[j]
        if not m.size:
            continue
        spans = [_degree_span(p.substitute_torus(T.translate, T.lattice, params))
                 for p in m.flat]
        bound += min(m.shape) * max(spans)
    return bound


def find_torus_witness(C: LaurentComplex, T: TranslatedSubtorus, i: int, k: int,
                       dual: bool = False, rng: Optional[np.random.Generator] = None,
                       attempts: int = 4, max_order: int = WITNESS_MAX_ORDER) -> Dict:
    """
    生成的ベッチ数が k 未満の T 上で、ベッチ数 < k のねじれ点を探す。

    位数 p（素数）の点を max_order までの p で順に試す。次数の上界が大きいときは
    その 2 倍を超える最小の素数も試す。p が上界の 2 倍を超えると、1 回の試行が
    反例になる確率は 1/2 以上。

    Returns:
        {"witness": 指標 or None, "witness_order": int or None, "degree_bound": int}
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    bound = restricted_degree_bound(C, T, i)
    out = {"witness": None, "witness_order": None, "degree_bound": bound}
    if T.dim == 0:
        rho = Character(list(T.translate))
        if _betti_in_degree(twisted_betti(C, rho, dual), i) < k:
            out.update(witness=rho.to_dict(), witness_order=rho.order)
        return out
    orders = [int(p) for p in primerange(2, max_order + 1)]
    if 2 * bound >= max_order:
        orders.append(int(nextprime(2 * bound)))
    for p in orders:
        for _ in range(attempts):
            rho = Character(T.torsion_point_of_order(p, rng))
            if _betti_in_degree(twisted_betti(C, rho, dual), i) < k:
                out.update(witness=rho.to_dict(), witness_order=p)
                return out
    return out


def verify_torus_in_charvar(C: LaurentComplex, T: TranslatedSubtorus, i: int, k: int,
                            dual: bool = False, rng: Optional[np.random.Generator] = None,
                            cache=None, attempts: int = 4, samples: int = 30) -> Dict:
    """
    T ⊂ Σ^i_k を証明する。

    生成的ベッチ数 < k なら、ベッチ数 ≥ k の点は T の真の閉部分集合をなすので
    反証が確定する。反例の指標は find_torus_witness で探して添える。

    Args:
        C: 鎖複体
        T: 並進部分トーラス（ねじれ並進なら厳密、数値並進なら数値標本のみ）
        i, k: 次数と跳躍の閾値
        dual: コホモロジー規約
        rng: 反例探索・数値標本の乱数
        cache: 階数キャッシュ
        attempts: 反例探索での位数ごとの試行回数
        samples: 数値検査の標本数

    Returns:
        {"status": "success" | "refuted" | "numeric-only", ...}
    """
    if T.n != C.n:
        raise InputError(f"部分トーラスの次元 {T.n} が複体の次元 {C.n} と異なります")
    rng = rng if rng is not None else np.random.default_rng(0)
    base = {"query": "verify-torus", "torus": T.to_dict(), "degree": i, "jump": k, "dual": dual}

    if not T.is_torsion:
        worst = None
        for _ in range(samples):
            theta = rng.uniform(0, 1, size=T.dim)
            rho = Character(numeric=T.numeric_point(theta))
            b = _betti_in_degree(twisted_betti(C, rho, dual), i)
            worst = b if worst is None else min(worst, b)
        base.update({"status": "numeric-only", "certificate": "numeric",
                     "min_betti": worst, "samples": samples,
                     "passed": worst is None or worst >= k})
        return base

    target = TranslatedSubtorus(T.torus, [-x for x in T.translate]) if dual else T
    generic = generic_twisted_betti(C, target, cache)
    g = _betti_in_degree(generic, i)
    base["generic_betti"] = generic
    if g >= k:
        base.update({"status": "success", "certificate": "exact"})
        return base

    found = find_torus_witness(C, T, i, k, dual, rng, attempts)
    base.update({"status": "refuted", "certificate": "exact", **found})
    return base


# ---------------------------------------------------------------------------
# ねじれ点の掃引
# ---------------------------------------------------------------------------

def torsion_sweep(n: int, rng: Optional[np.random.Generator] = None, count: int = 50,
                  order: int = SWEEP_ORDER,
                  max_random_order: int = SWEEP_MAX_RANDOM_ORDER) -> List[Character]:
    """
    掃引に使うねじれ指標の集合。

    n ≤ 3 なら位数が order を割るすべての指標、それ以外は位数 max_random_order
    以下の乱数指標 count 個。
    """
    if n <= 3:
        return [Character([Fraction(a, order) for a in exps])
                for exps in itertools.product(range(order), repeat=n)]
    rng = rng if rng is not None else np.random.default_rng(0)
    return random_torsion_characters(n, rng, count, max_random_order)


def random_torsion_characters(n: int, rng: np.random.Generator, count: int,
                              max_order: int = SWEEP_MAX_RANDOM_ORDER) -> List[Character]:
    out = []
    for _ in range(count):
        N = int(rng.integers(1, max_order + 1))
        out.append(Character([Fraction(int(a), N) for a in rng.integers(0, N, size=n)]))
    return out


def charvar_sweep(C: LaurentComplex, i: int, k: int, characters: Sequence[Character],
                  dual: bool = False) -> Dict:
    """指標の集合で所属を数え、最初の所属点・非所属点を報告する"""
    members = 0
    first_member = None
    first_non_member = None
    for rho in characters:
        if charvar_membership(C, i, k, rho, dual):
            members += 1
            if first_member is None:
                first_member = rho.to_dict()
        elif first_non_member is None:
            first_non_member = rho.to_dict()
    return {
        "query": "sweep",
        "degree": i,
        "jump": k,
        "checked": len(characters),
        "members": members,
        "first_member": first_member,
        "first_non_member": first_non_member,
        "certificate": "exact" if all(rho.is_torsion for rho in characters) else "numeric",
    }
