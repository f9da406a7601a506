"""
厳密行列演算

行列は dtype=object の numpy 配列で保持する（0 行・0 列の形状も保持できる）。
要素は Fraction / Cyclotomic（体）または MultiPoly / LaurentPoly（多項式環）。

- 体上: ガウス消去による階数・RREF・核・部分空間の共通部分
- 有理関数体上: Bareiss の分数なし消去（全ピボット選択、全次数最小のピボット）
- 数値: 特異値分解による階数（最大特異値 × 1e-9 未満を 0 とみなす、証明力なし）
"""

from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

import numpy as np

from src.exact.cyclotomic import Cyclotomic
from src.exact.errors import InputError
from src.exact.poly import LaurentPoly, MultiPoly


NUMERIC_RANK_RTOL = 1e-9


# ---------------------------------------------------------------------------
# 行列の構成
# ---------------------------------------------------------------------------

def object_matrix(rows: Sequence[Sequence], ncols: Optional[int] = None) -> np.ndarray:
    """
    行のリストから object 配列を作る。

    Args:
        rows: 行のリスト
        ncols: 行が 0 本のときの列数

    Returns:
        shape (len(rows), ncols) の object 配列
    """
    rows = [list(r) for r in rows]
    if not rows:
        return np.empty((0, ncols or 0), dtype=object)
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise InputError("行の長さが揃っていません")
    out = np.empty((len(rows), width), dtype=object)
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            out[i, j] = x
    return out


def zeros(nrows: int, ncols: int, fill=Fraction(0)) -> np.ndarray:
    out = np.empty((nrows, ncols), dtype=object)
    for idx in np.ndindex(nrows, ncols):
        out[idx] = fill
    return out


def matmul(a: np.ndarray, b: np.ndarray, zero=Fraction(0)) -> np.ndarray:
    """object 行列の積（内側の次元が 0 でも形状を保つ）"""
    if a.shape[1] != b.shape[0]:
        raise InputError(f"行列の形状が合いません: {a.shape} × {b.shape}")
    out = zeros(a.shape[0], b.shape[1], zero)
    for i in range(a.shape[0]):
        for j in range(b.shape[1]):
            acc = zero
            for k in range(a.shape[1]):
                x, y = a[i, k], b[k, j]
                if not is_zero(x) and not is_zero(y):
                    acc = acc + x * y
            out[i, j] = acc
    return out


def is_zero(x) -> bool:
    if isinstance(x, (MultiPoly, Cyclotomic)):
        return x.is_zero()
    return x == 0


def apply_entries(m: np.ndarray, fn) -> np.ndarray:
    out = np.empty(m.shape, dtype=object)
    for idx in np.ndindex(*m.shape):
        out[idx] = fn(m[idx])
    return out


def canonical_text(m: np.ndarray) -> str:
    """キャッシュ鍵用の正準文字列"""
    lines = [f"{m.shape[0]}x{m.shape[1]}"]
    for idx in np.ndindex(*m.shape):
        x = m[idx]
        if isinstance(x, MultiPoly):
            lines.append(f"{idx}:{','.join(x.variables)}:{x}")
        else:
            lines.append(f"{idx}:{x}")
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# 体上の消去
# ---------------------------------------------------------------------------

def rref(m: np.ndarray) -> Tuple[List[List], List[int]]:
    """
    被約行階段形を求める（体 Q または Q(ζ_N) 上）。

    Returns:
        (非零行のリスト, ピボット列のリスト)
    """
    rows = [[Fraction(x) if isinstance(x, int) else x for x in m[i, :]]
            for i in range(m.shape[0])]
    ncols = m.shape[1]
    pivots: List[int] = []
    r = 0
    for c in range(ncols):
        pivot = next((i for i in range(r, len(rows)) if not is_zero(rows[i][c])), None)
        if pivot is None:
            continue
        rows[r], rows[pivot] = rows[pivot], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and not is_zero(rows[i][c]):
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
        if r == len(rows):
            break
    return rows[:r], pivots


def rank_exact(m: np.ndarray) -> int:
    if m.size == 0:
        return 0
    return len(rref(m)[1])


def nullspace(m: np.ndarray) -> List[List]:
    """右核 {v : M v = 0} の基底（自由変数ごとに 1 本、列順で決定的）"""
    ncols = m.shape[1]
    if m.shape[0] == 0:
        return [[Fraction(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    rows, pivots = rref(m)
    basis = []
    for f in range(ncols):
        if f in pivots:
            continue
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, p in zip(rows, pivots):
            v[p] = -row[f]
        basis.append(v)
    return basis


def row_basis(rows: Sequence[Sequence]) -> List[List]:
    """行空間の基底（RREF の非零行）"""
    if not rows:
        return []
    return rref(object_matrix(rows))[0]


def intersect_spaces(a_rows: Sequence[Sequence], b_rows: Sequence[Sequence],
                     ncols: int) -> List[List]:
    """
    行空間どうしの共通部分の基底。

    x·A + y·B = 0 となる (x, y) から x·A を取り出す。
    """
    if not a_rows or not b_rows:
        return []
    stacked = object_matrix(list(a_rows) + list(b_rows))
    kernel = nullspace(stacked.T)
    p = len(a_rows)
    vectors = []
    for coeffs in kernel:
        v = [Fraction(0)] * ncols
        for x, row in zip(coeffs[:p], a_rows):
            if not is_zero(x):
                v = [acc + x * y for acc, y in zip(v, row)]
        vectors.append(v)
    return row_basis(vectors)


# ---------------------------------------------------------------------------
# 有理関数体上の階数（Bareiss）
# ---------------------------------------------------------------------------

def _common_variables(m: np.ndarray) -> Tuple[str, ...]:
    names = None
    for idx in np.ndindex(*m.shape):
        x = m[idx]
        if isinstance(x, MultiPoly):
            if names is None:
                names = x.variables
            elif x.variables != names:
                raise InputError(f"変数リストが一致しません: {names} と {x.variables}")
    return names or ()


def clear_laurent_rows(m: np.ndarray) -> np.ndarray:
    """
    ローラン多項式行列の各行に単項式を掛けて負指数を消す。

    単項式は有理関数体の単元なので階数は変わらない。
    """
    variables = _common_variables(m)
    out = np.empty(m.shape, dtype=object)
    for i in range(m.shape[0]):
        row = [x if isinstance(x, MultiPoly) else LaurentPoly.constant(variables, x)
               for x in m[i, :]]
        lows = [min((e[j] for x in row for e in x.terms), default=0)
                for j in range(len(variables))]
        offset = [-min(lo, 0) for lo in lows]
        for j, x in enumerate(row):
            shifted = LaurentPoly(variables, x.terms).shift(offset)
            out[i, j] = shifted.to_multipoly()
    return out


def _as_poly(x, variables) -> MultiPoly:
    if isinstance(x, LaurentPoly):
        return x.to_multipoly()
    if isinstance(x, MultiPoly):
        return x
    return MultiPoly.constant(variables, x)


def _pivot_weight(p: MultiPoly) -> Tuple[int, int]:
    return (p.total_degree(), len(p.terms))


def rank_over_fraction_field(m: np.ndarray, cache=None) -> int:
    """
    多項式行列の有理関数体上の階数を Bareiss 消去で求める。

    Args:
        m: MultiPoly / LaurentPoly を要素とする object 行列
        cache: get(key) / put(key, value) を持つ階数キャッシュ（任意）

    Returns:
        階数
    """
    if m.size == 0:
        return 0
    variables = _common_variables(m)
    key = None
    if cache is not None:
        key = "rank-ff\n" + canonical_text(m)
        hit = cache.get(key)
        if hit is not None:
            return int(hit)

    if any(isinstance(m[idx], LaurentPoly) for idx in np.ndindex(*m.shape)):
        m = clear_laurent_rows(m)
    a = [[_as_poly(x, variables) for x in m[i, :]] for i in range(m.shape[0])]
    nrows, ncols = m.shape
    prev = MultiPoly.constant(variables, 1)
    rank = 0
    for k in range(min(nrows, ncols)):
        best = None
        for i in range(k, nrows):
            for j in range(k, ncols):
                x = a[i][j]
                if not x.is_zero() and (best is None or _pivot_weight(x) < best[0]):
                    best = (_pivot_weight(x), i, j)
        if best is None:
            break
        _, pi, pj = best
        a[k], a[pi] = a[pi], a[k]
        for row in a:
            row[k], row[pj] = row[pj], row[k]
        pivot = a[k][k]
        for i in range(k + 1, nrows):
            aik = a[i][k]
            for j in range(k + 1, ncols):
                num = pivot * a[i][j]
                if not aik.is_zero() and not a[k][j].is_zero():
                    num = num - aik * a[k][j]
                a[i][j] = num.exquo(prev)
            a[i][k] = MultiPoly.zero(variables)
        prev = pivot
        rank += 1

    if cache is not None:
        cache.put(key, rank)
    return rank


# ---------------------------------------------------------------------------
# 数値階数（証明力なし）
# ---------------------------------------------------------------------------

def rank_numeric(m: np.ndarray, rtol: float = NUMERIC_RANK_RTOL) -> int:
    """特異値が最大特異値 × rtol 以下なら 0 とみなす数値階数"""
    arr = np.asarray(m, dtype=complex)
    if arr.size == 0:
        return 0
    s = np.linalg.svd(arr, compute_uv=False)
    if s.size == 0 or s[0] == 0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def to_complex_matrix(m: np.ndarray) -> np.ndarray:
    out = np.zeros(m.shape, dtype=complex)
    for idx in np.ndindex(*m.shape):
        x = m[idx]
        if isinstance(x, Cyclotomic):
            out[idx] = x.to_complex()
        elif isinstance(x, Fraction):
            out[idx] = float(x)
        else:
            out[idx] = complex(x)
    return out
