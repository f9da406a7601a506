"""
整数行列と格子

Z^n の部分格子は基底を行に並べた整数行列（List[List[int]]）で表す。
標準形の計算は sympy の DomainMatrix（係数環 ZZ）に任せる。

- スミス標準形 U·A·V = D（U, V はユニモジュラ、d1 | d2 | ...）
- エルミート標準形（行形式・被約: ピボット正、ピボットの上は [0, pivot)）
- 飽和・整数核・格子の共通部分・ユニモジュラ補完
"""

from typing import List, Sequence, Tuple

from sympy.polys.domains import ZZ
from sympy.polys.matrices import DomainMatrix
from sympy.polys.matrices.normalforms import (
    hermite_normal_form as _sympy_hnf,
    invariant_factors as _sympy_invariants,
    smith_normal_decomp,
)

from src.exact.errors import InputError


IntMatrix = List[List[int]]


# ---------------------------------------------------------------------------
# 基本操作
# ---------------------------------------------------------------------------

def identity(n: int) -> IntMatrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def int_matrix(rows: Sequence[Sequence[int]]) -> IntMatrix:
    """整数行列に変換する（非整数は拒否）"""
    out = []
    for r in rows:
        row = []
        for x in r:
            if isinstance(x, bool) or int(x) != x:
                raise InputError(f"整数ではありません: {x!r}")
            row.append(int(x))
        out.append(row)
    if out and any(len(r) != len(out[0]) for r in out):
        raise InputError("行の長さが揃っていません")
    return out


def to_domain_matrix(a: IntMatrix, ncols: int) -> DomainMatrix:
    return DomainMatrix([[ZZ(x) for x in row] for row in a], (len(a), ncols), ZZ)


def from_domain_matrix(m: DomainMatrix) -> IntMatrix:
    return [[int(x) for x in row] for row in m.to_list()]


def int_matmul(a: IntMatrix, b: IntMatrix, ncols: int = 0) -> IntMatrix:
    width = len(b[0]) if b else ncols
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(width)]
            for i in range(len(a))]


def transpose(a: IntMatrix, ncols: int = 0) -> IntMatrix:
    width = len(a[0]) if a else ncols
    return [[a[i][j] for i in range(len(a))] for j in range(width)]


def determinant(a: IntMatrix) -> int:
    a = int_matrix(a)
    if not a:
        return 1
    return int(to_domain_matrix(a, len(a)).det())


# ---------------------------------------------------------------------------
# スミス標準形
# ---------------------------------------------------------------------------

def smith_decomposition(a: Sequence[Sequence[int]], ncols: int = 0
                        ) -> Tuple[IntMatrix, IntMatrix, IntMatrix, IntMatrix]:
    """
    スミス標準形と V の逆行列を同時に求める。

    Args:
        a: m×n 整数行列
        ncols: m = 0 のときの列数

    Returns:
        (U, D, V, V^{-1})
    """
    A = int_matrix(a)
    m = len(A)
    n = len(A[0]) if A else ncols
    if m == 0 or n == 0:
        return identity(m), [[0] * n for _ in range(m)], identity(n), identity(n)
    D, U, V = smith_normal_decomp(to_domain_matrix(A, n))
    Vinv = V.convert_to(ZZ.get_field()).inv().convert_to(ZZ)
    return (from_domain_matrix(U), from_domain_matrix(D),
            from_domain_matrix(V), from_domain_matrix(Vinv))


def smith_normal_form(a: Sequence[Sequence[int]], ncols: int = 0
                      ) -> Tuple[IntMatrix, IntMatrix, IntMatrix]:
    """
    スミス標準形。

    Returns:
        (U, D, V)。U·A·V = D は対角で d1 | d2 | ...、すべて >= 0
    """
    U, D, V, _ = smith_decomposition(a, ncols)
    return U, D, V


def invariant_factors(a: Sequence[Sequence[int]], ncols: int = 0) -> List[int]:
    """非零の不変因子"""
    A = int_matrix(a)
    n = len(A[0]) if A else ncols
    if not A or n == 0:
        return []
    return [abs(int(d)) for d in _sympy_invariants(to_domain_matrix(A, n)) if d]


def torsion_order(a: Sequence[Sequence[int]], ncols: int = 0) -> int:
    """Z^n / rowspan(a) のねじれ部分の位数"""
    out = 1
    for d in invariant_factors(a, ncols):
        out *= d
    return out


# ---------------------------------------------------------------------------
# エルミート標準形
# ---------------------------------------------------------------------------

def hermite_normal_form(rows: Sequence[Sequence[int]], ncols: int = 0) -> IntMatrix:
    """
    行エルミート標準形（零行は除く）。

    ピボットは正、ピボットより上の成分は [0, pivot) に簡約される。
    sympy は列形式（ピボットは下の行から右の列へ）なので、列を反転した転置に適用し、
    結果を転置して行と列を反転する。
    """
    A = int_matrix(rows)
    n = len(A[0]) if A else ncols
    if not A or n == 0:
        return []
    flipped = [row[::-1] for row in A]
    W = from_domain_matrix(_sympy_hnf(to_domain_matrix(transpose(flipped, n), len(A))))
    out = [row[::-1] for row in transpose(W, 0)][::-1]
    return [row for row in out if any(row)]


# ---------------------------------------------------------------------------
# 格子演算
# ---------------------------------------------------------------------------

def saturate_lattice(rows: Sequence[Sequence[int]], ncols: int = 0) -> IntMatrix:
    """
    飽和 {v ∈ Z^n : m·v ∈ rowspan_Z(B), m > 0} の HNF 基底。

    A = U^{-1} D V^{-1} より、非零の不変因子に対応する V^{-1} の行が飽和の基底になる。
    """
    rows = int_matrix(rows)
    n = len(rows[0]) if rows else ncols
    if not rows:
        return []
    _, D, _, Vinv = smith_decomposition(rows, n)
    rank = sum(1 for i in range(min(len(D), n)) if D[i][i])
    return hermite_normal_form(Vinv[:rank], n)


def is_saturated(rows: Sequence[Sequence[int]], ncols: int = 0) -> bool:
    return all(d == 1 for d in invariant_factors(rows, ncols))


def lattice_rank(rows: Sequence[Sequence[int]], ncols: int = 0) -> int:
    return len(invariant_factors(rows, ncols)) if rows else 0


def lattice_kernel(rows: Sequence[Sequence[int]], ncols: int = 0) -> IntMatrix:
    """
    整数核 {x ∈ Z^n : B x = 0} の HNF 基底（飽和格子）。

    B x = 0 ⟺ D V^{-1} x = 0 なので V の後半の列が基底になる。
    """
    rows = int_matrix(rows)
    n = len(rows[0]) if rows else ncols
    if not rows:
        return identity(n)
    _, D, V, _ = smith_decomposition(rows, n)
    rank = sum(1 for i in range(min(len(D), n)) if D[i][i])
    basis = [[V[i][j] for i in range(n)] for j in range(rank, n)]
    return hermite_normal_form(basis, n)


def same_lattice(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], ncols: int) -> bool:
    return hermite_normal_form(a, ncols) == hermite_normal_form(b, ncols)


def lattice_intersection(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]],
                         ncols: int) -> IntMatrix:
    """
    Z-スパンの共通部分の HNF 基底。

    x·A = y·B を満たす整数ベクトル (x, y) は [A; -B]^T の整数核。
    """
    if not a or not b:
        return []
    stacked = [list(r) for r in a] + [[-x for x in r] for r in b]
    kernel = lattice_kernel(transpose(stacked, ncols), len(stacked))
    vectors = [[sum(x[i] * a[i][j] for i in range(len(a))) for j in range(ncols)]
               for x in kernel]
    return hermite_normal_form(vectors, ncols)


def contains_vector(rows: Sequence[Sequence[int]], v: Sequence[int], ncols: int) -> bool:
    """v が rowspan_Z(rows) に属するか"""
    base = hermite_normal_form(rows, ncols)
    return hermite_normal_form(base + [list(v)], ncols) == base


def unimodular_completion(rows: Sequence[Sequence[int]], ncols: int
                          ) -> Tuple[IntMatrix, IntMatrix]:
    """
    飽和格子 L の基底を含む Z^n の基底。

    Returns:
        (P, P^{-1})。P の先頭 rank(L) 行が L を張り、x の P 座標は x·P^{-1}
    """
    if not rows:
        return identity(ncols), identity(ncols)
    if not is_saturated(rows, ncols):
        raise InputError("飽和していない格子はユニモジュラ補完できません")
    _, _, V, Vinv = smith_decomposition(rows, ncols)
    return Vinv, V
