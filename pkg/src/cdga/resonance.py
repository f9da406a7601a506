"""
アオモト複体とレゾナンス多様体

平坦接続の空間 F(A) = ker(d^1) の基底（ユーザ基底順で決定的）を座標 x1..xm とし、
d_ω = d + ω·(−) の行列 M^i = d^i + Σ x_j L_j^i を 1 次以下の多項式行列として作る。

- betti_at:                   点での dim H^i = dim A^i − rank M^i − rank M^{i−1}
- resonance_membership:       R^i_k への所属判定
- verify_subspace_in_resonance: 線形部分空間 x = P·t を代入した一般階数で証明
- probe_components:           ヒューリスティックな成分探索（網羅的ではない）
"""

from fractions import Fraction
from itertools import product as cartesian
from typing import Dict, List, Optional, Sequence, Union

import numpy as np

from src.cdga.algebra import DGModule, GradedAlgebra
from src.exact.cyclotomic import Cyclotomic, to_rational
from src.exact.errors import InputError
from src.exact.matrices import (
    apply_entries,
    matmul,
    nullspace,
    object_matrix,
    rank_exact,
    rank_over_fraction_field,
    is_zero,
)
from src.exact.poly import MultiPoly


PROBE_PARAMETERS = (Fraction(1), Fraction(2), Fraction(-1, 3))


# ---------------------------------------------------------------------------
# 平坦接続
# ---------------------------------------------------------------------------

class FlatConnectionBasis:
    """ker(d^1) ⊂ A^1 の基底と座標名 x1..xm"""

    def __init__(self, algebra: GradedAlgebra, vectors: List[List[Fraction]]):
        self.algebra = algebra
        self.vectors = vectors
        self.names = tuple(f"x{j + 1}" for j in range(len(vectors)))

    @property
    def m(self) -> int:
        return len(self.vectors)

    def omega(self, j: int) -> Dict[str, Fraction]:
        """j 番目の基底ベクトルを A^1 の元として返す"""
        return self.algebra.element(1, self.vectors[j])

    def to_dict(self) -> Dict:
        return {"coordinates": list(self.names),
                "vectors": [{name: str(c) for name, c in self.omega(j).items()}
                            for j in range(self.m)]}


def flat_connections(A: GradedAlgebra) -> FlatConnectionBasis:
    """F(A) = ker(d^1) の基底（dim = dim A^1 − rank d^1）"""
    if A.dim(1) == 0:
        return FlatConnectionBasis(A, [])
    d1 = A.diff_matrix(1)
    if d1.shape[0] == 0:
        vectors = nullspace(object_matrix([], ncols=A.dim(1)))
    else:
        vectors = nullspace(d1)
    return FlatConnectionBasis(A, vectors)


# ---------------------------------------------------------------------------
# アオモト複体
# ---------------------------------------------------------------------------

class AomotoComplex:
    """
    アオモト複体。

    Attributes:
        dims: 各次数の次元
        matrices: M^i（shape (dims[i+1], dims[i])、要素は x1..xm の MultiPoly）
        variables: 座標名
    """

    def __init__(self, dims: Sequence[int], matrices: List[np.ndarray],
                 variables: Sequence[str], flat: Optional[FlatConnectionBasis] = None):
        self.dims = list(dims)
        self.matrices = matrices
        self.variables = tuple(variables)
        self.flat = flat

    @property
    def m(self) -> int:
        return len(self.variables)

    def matrix(self, degree: int) -> np.ndarray:
        """M^degree（範囲外は空行列）"""
        if 0 <= degree < len(self.matrices):
            return self.matrices[degree]
        rows = self.dims[degree + 1] if 0 <= degree + 1 < len(self.dims) else 0
        cols = self.dims[degree] if 0 <= degree < len(self.dims) else 0
        return object_matrix([], ncols=cols) if rows == 0 else \
            object_matrix([[MultiPoly.zero(self.variables)] * cols for _ in range(rows)])

    def specialize(self, degree: int, point: Sequence) -> np.ndarray:
        values = _as_point(point, self.m)
        return apply_entries(self.matrix(degree), lambda p: p.evaluate(values))


def _as_point(point: Sequence, m: int) -> List:
    if len(point) != m:
        raise InputError(f"点の長さ {len(point)} が平坦接続の次元 {m} と異なります")
    return [p if isinstance(p, Cyclotomic) else to_rational(p) for p in point]


def aomoto(A: GradedAlgebra, module: Optional[DGModule] = None) -> AomotoComplex:
    """
    アオモト複体 M^i = d^i + Σ_j x_j L_j^i を作る。

    Args:
        A: CDGA
        module: 指定すれば DG 加群の行列（d_M + ω·(−)）を使う

    Returns:
        AomotoComplex
    """
    flat = flat_connections(A)
    variables = flat.names
    target = module if module is not None else A
    top = target.top_degree
    dims = [target.dim(i) for i in range(top + 1)]
    matrices = []
    for i in range(top + 1):
        d = target.diff_matrix(i)
        rows, cols = d.shape
        entries = [[MultiPoly.constant(variables, d[r, c]) for c in range(cols)]
                   for r in range(rows)]
        for j in range(flat.m):
            L = target.left_mult_matrix(i, flat.omega(j))
            xj = MultiPoly.variable(variables, variables[j])
            for r in range(rows):
                for c in range(cols):
                    if not is_zero(L[r, c]):
                        entries[r][c] = entries[r][c] + xj * L[r, c]
        matrices.append(object_matrix(entries, ncols=cols))
    return AomotoComplex(dims, matrices, variables, flat)


def validate_aomoto(C: AomotoComplex) -> Dict:
    """M^{i+1}·M^i = 0 を多項式行列として検査する"""
    failures = []
    zero = MultiPoly.zero(C.variables)
    for i in range(len(C.matrices) - 1):
        a, b = C.matrices[i + 1], C.matrices[i]
        if a.shape[0] == 0 or b.shape[1] == 0:
            continue
        prod = matmul(a, b, zero=zero)
        for r, c in np.ndindex(*prod.shape):
            if not is_zero(prod[r, c]):
                failures.append({"degree": i, "entry": [int(r), int(c)],
                                 "value": str(prod[r, c])})
    return {"valid": not failures, "failures": failures}


# ---------------------------------------------------------------------------
# 点での評価
# ---------------------------------------------------------------------------

def _rank_at(C: AomotoComplex, degree: int, point) -> int:
    m = C.specialize(degree, point)
    return rank_exact(m) if m.size else 0


def betti_at(C: AomotoComplex, point: Sequence) -> List[int]:
    """
    点 ω での (dim H^i(A, d_ω))_i。

    Args:
        C: アオモト複体
        point: 長さ m の有理数または円分体の元

    Returns:
        次数ごとのベッチ数
    """
    point = _as_point(point, C.m)
    ranks = [_rank_at(C, i, point) for i in range(len(C.dims))]
    return [C.dims[i] - ranks[i] - (ranks[i - 1] if i > 0 else 0)
            for i in range(len(C.dims))]


def resonance_membership(C: AomotoComplex, i: int, k: int, point: Sequence) -> bool:
    """ω ∈ R^i_k ⟺ dim H^i(A, d_ω) >= k"""
    if k <= 0:
        return True
    betti = betti_at(C, point)
    return 0 <= i < len(betti) and betti[i] >= k


def euler_characteristic(dims: Sequence[int]) -> int:
    return sum((-1) ** i * d for i, d in enumerate(dims))


# ---------------------------------------------------------------------------
# 線形部分空間
# ---------------------------------------------------------------------------

class LinearSubspaceQ:
    """Q^m の線形部分空間（基底は一次独立）"""

    def __init__(self, m: int, basis: Sequence[Sequence] = ()):
        self.m = int(m)
        self.basis = [[to_rational(c) for c in v] for v in basis]
        for v in self.basis:
            if len(v) != self.m:
                raise InputError(f"基底ベクトルの長さ {len(v)} が次元 {self.m} と異なります")
        if self.basis and rank_exact(object_matrix(self.basis)) != len(self.basis):
            raise InputError("部分空間の基底が一次従属です")

    @classmethod
    def from_equations(cls, m: int, equations: Sequence[Sequence]) -> "LinearSubspaceQ":
        """一次方程式 a·x = 0 の共通零点"""
        eqs = [[to_rational(c) for c in e] for e in equations]
        if not eqs:
            return cls(m, [[int(i == j) for i in range(m)] for j in range(m)])
        return cls(m, nullspace(object_matrix(eqs)))

    @property
    def dim(self) -> int:
        return len(self.basis)

    def point(self, t: Sequence[Fraction]) -> List[Fraction]:
        out = [Fraction(0)] * self.m
        for tk, v in zip(t, self.basis):
            out = [a + tk * b for a, b in zip(out, v)]
        return out

    def random_point(self, rng: np.random.Generator, bound: int = 9) -> List[Fraction]:
        t = [Fraction(int(rng.integers(-bound, bound + 1)), int(rng.integers(1, 6)))
             for _ in self.basis]
        return self.point(t)

    def contains(self, v: Sequence) -> bool:
        if not self.basis:
            return all(to_rational(c) == 0 for c in v)
        stacked = object_matrix(self.basis + [[to_rational(c) for c in v]])
        return rank_exact(stacked) == self.dim

    def contains_subspace(self, other: "LinearSubspaceQ") -> bool:
        return all(self.contains(v) for v in other.basis)

    def equals(self, other: "LinearSubspaceQ") -> bool:
        return self.m == other.m and self.dim == other.dim and self.contains_subspace(other)

    def extended(self, v: Sequence) -> "LinearSubspaceQ":
        return LinearSubspaceQ(self.m, self.basis + [list(v)])

    def to_dict(self) -> Dict:
        return {"ambient": self.m, "basis": [[str(c) for c in v] for v in self.basis]}


# ---------------------------------------------------------------------------
# 部分空間の証明
# ---------------------------------------------------------------------------

def _substituted(C: AomotoComplex, degree: int, L: LinearSubspaceQ) -> np.ndarray:
    t_names = tuple(f"t{k + 1}" for k in range(L.dim))
    ts = [MultiPoly.variable(t_names, t) for t in t_names]
    values = []
    for j in range(C.m):
        acc = MultiPoly.zero(t_names)
        for tk, v in zip(ts, L.basis):
            if v[j]:
                acc = acc + tk * v[j]
        values.append(acc)
    return apply_entries(C.matrix(degree), lambda p: p.compose(t_names, values))


def generic_betti_on(C: AomotoComplex, L: LinearSubspaceQ, i: int, cache=None) -> int:
    """部分空間 L 上の一般点での dim H^i"""
    if L.dim == 0:
        return betti_at(C, [Fraction(0)] * C.m)[i]
    ranks = []
    for degree in (i, i - 1):
        if degree < 0 or C.matrix(degree).size == 0:
            ranks.append(0)
        else:
            ranks.append(rank_over_fraction_field(_substituted(C, degree, L), cache=cache))
    return C.dims[i] - ranks[0] - ranks[1]


def verify_subspace_in_resonance(C: AomotoComplex, L: LinearSubspaceQ, i: int, k: int,
                                 rng: Optional[np.random.Generator] = None,
                                 cache=None, attempts: int = 50) -> Dict:
    """
    L ⊂ R^i_k を一般階数で証明する。失敗時は所属しない有理点を返す。

    ランクの上半連続性により、一般点で dim H^i >= k なら L の全点で成り立つ。

    Returns:
        {"status": "success" | "refuted", "certificate": "exact",
         "generic_betti": int, "witness": 点 or None}
    """
    if L.m != C.m:
        raise InputError(f"部分空間の次元 {L.m} が平坦接続の次元 {C.m} と異なります")
    if not 0 <= i < len(C.dims):
        raise InputError(f"次数 {i} は範囲外です（0..{len(C.dims) - 1}）")
    generic = generic_betti_on(C, L, i, cache=cache)
    result = {"certificate": "exact", "generic_betti": generic, "witness": None,
              "subspace": L.to_dict(), "degree": i, "jump": k}
    if generic >= k:
        result["status"] = "success"
        return result
    result["status"] = "refuted"
    rng = rng if rng is not None else np.random.default_rng(0)
    candidates = [list(v) for v in L.basis] or [[Fraction(0)] * C.m]
    candidates += [L.random_point(rng) for _ in range(attempts)]
    for pt in candidates:
        if not resonance_membership(C, i, k, pt):
            result["witness"] = [str(c) for c in pt]
            break
    return result


# ---------------------------------------------------------------------------
# 成分探索（ヒューリスティック）
# ---------------------------------------------------------------------------

def _probe_directions(m: int, trials: int, rng: np.random.Generator) -> List[List[Fraction]]:
    dirs: List[List[Fraction]] = []
    if m <= 4:
        for v in cartesian((-1, 0, 1), repeat=m):
            first = next((c for c in v if c), 0)
            if first == 1:
                dirs.append([Fraction(c) for c in v])
    for _ in range(trials):
        v = [Fraction(int(c)) for c in rng.integers(-2, 3, size=m)]
        if any(v):
            dirs.append(v)
    return dirs


def probe_components(C: AomotoComplex, i: int, k: int, trials: int = 20,
                     rng: Optional[np.random.Generator] = None, cache=None) -> Dict:
    """
    R^i_k の原点を通る成分の候補を探す（網羅的ではない）。

    原点を通る直線を有理格子点 t ∈ {1, 2, −1/3} で切り、所属する方向を集め、
    それらの張る空間を verify_subspace_in_resonance が通る限り貪欲に広げる。
    返す候補はすべて証明済みで、包含関係で極大なものだけを残す。

    Returns:
        {"candidates": [LinearSubspaceQ], "exhaustive": False, "member_directions": int}
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    m = C.m
    member_dirs = []
    for u in _probe_directions(m, trials, rng):
        if all(resonance_membership(C, i, k, [t * c for c in u]) for t in PROBE_PARAMETERS):
            member_dirs.append(u)

    accepted: List[LinearSubspaceQ] = []
    for u in member_dirs:
        if any(S.contains(u) for S in accepted):
            continue
        S = LinearSubspaceQ(m, [u])
        if verify_subspace_in_resonance(C, S, i, k, rng=rng, cache=cache)["status"] != "success":
            continue
        for w in member_dirs:
            if S.contains(w):
                continue
            bigger = S.extended(w)
            if verify_subspace_in_resonance(C, bigger, i, k, rng=rng, cache=cache)["status"] == "success":
                S = bigger
        accepted.append(S)

    maximal = [S for S in accepted
               if not any(T is not S and T.dim > S.dim and T.contains_subspace(S) for T in accepted)]
    if not maximal and resonance_membership(C, i, k, [Fraction(0)] * m):
        maximal = [LinearSubspaceQ(m, [])]
    return {"candidates": maximal, "exhaustive": False, "member_directions": len(member_dirs)}
