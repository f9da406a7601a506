"""
1-ホッジ構造

(Λ, W, F): Λ ≅ Z^r（ねじれなし）、W ⊂ Λ_Q（有理部分空間）、F ⊂ Λ_C（係数は Q(i)）で
    W_C = (W_C ∩ F) ⊕ (W_C ∩ F̄),   Λ_C = W_C + F
を満たすもの。ホッジ数は h10 = dim W_C∩F, h01 = dim W_C∩F̄, h11 = r − dim W。

部分構造は飽和部分格子 Λ' に W' = W ∩ Λ'_Q, F' = F ∩ Λ'_C を載せたもの。
座標は Λ' を含む Z^r のユニモジュラ基底 P で取り、x の P 座標 x·P^{-1} の
先頭 r' 成分を部分構造、残りを商構造の座標とする。
"""

import math
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

from src.exact.cyclotomic import Cyclotomic, to_rational
from src.exact.errors import InputError
from src.exact.lattice import (
    determinant,
    hermite_normal_form,
    int_matrix,
    is_saturated,
    saturate_lattice,
    unimodular_completion,
)
from src.exact.matrices import intersect_spaces, object_matrix, rank_exact, row_basis


def _scalar(x):
    if isinstance(x, Cyclotomic):
        if x.order not in (1, 2, 4):
            raise InputError(f"F の係数は Q(i) の元に限られます: {x}")
        return x
    return to_rational(x)


def _conj(x):
    return x.conjugate() if isinstance(x, Cyclotomic) else x


def _rank(rows: Sequence[Sequence]) -> int:
    return rank_exact(object_matrix(rows)) if rows else 0


def _text(x) -> str:
    if isinstance(x, Cyclotomic):
        z = x.lift(4) if 4 % x.order == 0 else x
        re, im = (list(z.coeffs) + [Fraction(0), Fraction(0)])[:2]
        return f"{re},{im}"
    return str(x)


def _project(rows: Sequence[Sequence], pinv: List[List[int]], start: int, stop: int) -> List[List]:
    """x ↦ (x·P^{-1})[start:stop]"""
    out = []
    for x in rows:
        out.append([sum((x[i] * pinv[i][j] for i in range(len(x)) if pinv[i][j]), Fraction(0))
                    for j in range(start, stop)])
    return out


# ---------------------------------------------------------------------------
# ホッジ数
# ---------------------------------------------------------------------------

class HodgeNumbers:
    """(h10, h01, h11)"""

    def __init__(self, h10: int, h01: int, h11: int):
        self.h10, self.h01, self.h11 = int(h10), int(h01), int(h11)

    def astuple(self):
        return (self.h10, self.h01, self.h11)

    def __add__(self, other: "HodgeNumbers") -> "HodgeNumbers":
        return HodgeNumbers(*(a + b for a, b in zip(self.astuple(), other.astuple())))

    def __sub__(self, other: "HodgeNumbers") -> "HodgeNumbers":
        return HodgeNumbers(*(a - b for a, b in zip(self.astuple(), other.astuple())))

    def __eq__(self, other):
        if isinstance(other, tuple):
            return self.astuple() == other
        if not isinstance(other, HodgeNumbers):
            return NotImplemented
        return self.astuple() == other.astuple()

    __hash__ = None

    def to_dict(self) -> Dict:
        return {"h10": self.h10, "h01": self.h01, "h11": self.h11}

    def __repr__(self) -> str:
        return f"HodgeNumbers{self.astuple()}"


# ---------------------------------------------------------------------------
# 1-ホッジ構造
# ---------------------------------------------------------------------------

class OneHodgeStructure:
    """
    1-ホッジ構造 (Z^r, W, F)。

    Args:
        rank: 格子の階数 r
        W_basis: W を張る有理ベクトル
        F_basis: F を張る Q(i) ベクトル（Fraction / Cyclotomic(4) の成分）
    """

    def __init__(self, rank: int, W_basis: Sequence[Sequence] = (), F_basis: Sequence[Sequence] = ()):
        self.rank = int(rank)
        if self.rank < 0:
            raise InputError("階数は非負です")
        self.W_basis = [[to_rational(x) for x in row] for row in W_basis]
        self.F_basis = [[_scalar(x) for x in row] for row in F_basis]
        for row in self.W_basis + self.F_basis:
            if len(row) != self.rank:
                raise InputError(f"ベクトルの長さ {len(row)} が階数 {self.rank} と異なります")

    @property
    def F_conjugate(self) -> List[List]:
        return [[_conj(x) for x in row] for row in self.F_basis]

    @property
    def dim_W(self) -> int:
        return _rank(self.W_basis)

    def to_dict(self) -> Dict:
        return {"rank": self.rank,
                "W": [[str(x) for x in row] for row in self.W_basis],
                "F": [[_text(x) for x in row] for row in self.F_basis]}


def _pieces(H: OneHodgeStructure):
    a = intersect_spaces(H.W_basis, H.F_basis, H.rank)
    b = intersect_spaces(H.W_basis, H.F_conjugate, H.rank)
    return a, b


def validate_1hs(H: OneHodgeStructure) -> Dict:
    """
    1-ホッジ構造の公理を検査する（常に報告を返す）。

    Returns:
        {"valid": bool, "failures": [...], "input_error": bool}
    """
    failures = []
    input_error = False
    for name, rows in (("W", H.W_basis), ("F", H.F_basis)):
        if _rank(rows) != len(rows):
            failures.append({"axiom": "independence", "detail": f"{name} の基底が一次従属です"})
            input_error = True
    if input_error:
        return {"valid": False, "failures": failures, "input_error": True}

    dim_w = len(H.W_basis)
    a, b = _pieces(H)
    if len(a) != len(b):
        failures.append({"axiom": "direct_sum",
                         "detail": f"dim W∩F = {len(a)} と dim W∩F̄ = {len(b)} が異なります"})
    if len(a) + len(b) != dim_w or _rank(a + b) != dim_w:
        failures.append({"axiom": "direct_sum",
                         "detail": f"W_C ≠ (W_C∩F) ⊕ (W_C∩F̄): {len(a)} + {len(b)} vs dim W = {dim_w}"})
    if _rank(H.W_basis + H.F_basis) != H.rank:
        failures.append({"axiom": "spanning",
                         "detail": f"dim(W_C + F) = {_rank(H.W_basis + H.F_basis)} < r = {H.rank}"})
    return {"valid": not failures, "failures": failures, "input_error": False}


def _require_valid(H: OneHodgeStructure):
    report = validate_1hs(H)
    if not report["valid"]:
        raise InputError("1-ホッジ構造の公理を満たしません: "
                         + "; ".join(f["detail"] for f in report["failures"]))


def hodge_numbers(H: OneHodgeStructure) -> HodgeNumbers:
    _require_valid(H)
    a, b = _pieces(H)
    return HodgeNumbers(len(a), len(b), H.rank - len(H.W_basis))


def lambda_zero(H: OneHodgeStructure) -> List[List[int]]:
    """Λ_0 = Λ ∩ W（分母を払って飽和化）"""
    rows = []
    for row in row_basis(H.W_basis):
        denom = 1
        for x in row:
            denom = denom * x.denominator // math.gcd(denom, x.denominator)
        rows.append([int(x * denom) for x in row])
    return saturate_lattice(rows, H.rank)


# ---------------------------------------------------------------------------
# 部分構造と商構造
# ---------------------------------------------------------------------------

class SubHSWitness:
    """
    部分 1-ホッジ構造の証人。

    Args:
        sublattice: 飽和部分格子 Λ'（HNF）
        W_rows, F_rows: W' と F'（Z^r の座標）
        structure: Λ' の基底 P[:r'] に関する座標での部分構造
    """

    def __init__(self, sublattice: List[List[int]], W_rows: List[List], F_rows: List[List],
                 structure: Optional[OneHodgeStructure] = None):
        self.sublattice = sublattice
        self.W_rows = W_rows
        self.F_rows = F_rows
        self.structure = structure

    @property
    def rank(self) -> int:
        return len(self.sublattice)

    def to_dict(self) -> Dict:
        out = {"sublattice": self.sublattice,
               "W": [[str(x) for x in row] for row in self.W_rows],
               "F": [[_text(x) for x in row] for row in self.F_rows]}
        if self.structure is not None:
            a, b = _pieces(self.structure)
            out["hodge_numbers"] = {"h10": len(a), "h01": len(b),
                                    "h11": self.rank - len(self.structure.W_basis)}
        return out


def _same_span(a: Sequence[Sequence], b: Sequence[Sequence]) -> bool:
    ra, rb = _rank(a), _rank(b)
    return ra == rb and _rank(list(a) + list(b)) == ra


def sub_hs(H: OneHodgeStructure, sublattice: Sequence[Sequence[int]]) -> Dict:
    """
    部分格子 Λ' 上の部分 1-ホッジ構造を作る。

    Returns:
        {"accepted": bool, "witness": SubHSWitness | None, "reason": str | None, "report": ...}
    """
    rows = int_matrix(sublattice)
    if any(len(r) != H.rank for r in rows):
        raise InputError(f"部分格子のベクトルの長さが階数 {H.rank} と異なります")
    if rows and not is_saturated(rows, H.rank):
        return {"accepted": False, "witness": None, "reason": "Λ/Λ' has torsion"}
    L = hermite_normal_form(rows, H.rank)
    r_sub = len(L)
    W_sub = intersect_spaces(H.W_basis, L, H.rank) if L else []
    F_sub = intersect_spaces(H.F_basis, L, H.rank) if L else []
    _, pinv = unimodular_completion(L, H.rank)
    structure = OneHodgeStructure(r_sub, _project(W_sub, pinv, 0, r_sub),
                                  _project(F_sub, pinv, 0, r_sub))
    report = validate_1hs(structure)
    witness = SubHSWitness(L, W_sub, F_sub, structure)
    if not report["valid"]:
        return {"accepted": False, "witness": None,
                "reason": "; ".join(f["detail"] for f in report["failures"]), "report": report}
    return {"accepted": True, "witness": witness, "reason": None, "report": report}


def quotient_hs(H: OneHodgeStructure, witness: SubHSWitness) -> OneHodgeStructure:
    """商 (Λ/Λ', W/W', F/F') を補完基底の座標で作る"""
    _require_valid(H)
    derived = sub_hs(H, witness.sublattice)
    if not derived["accepted"] or not witness_matches(derived["witness"], witness, H.rank):
        raise InputError("部分構造の証人が H と整合しません")
    r_sub = witness.rank
    _, pinv = unimodular_completion(witness.sublattice, H.rank)
    W_q = row_basis(_project(H.W_basis, pinv, r_sub, H.rank))
    F_q = row_basis(_project(H.F_basis, pinv, r_sub, H.rank))
    return OneHodgeStructure(H.rank - r_sub, W_q, F_q)


def witness_matches(derived: SubHSWitness, supplied: SubHSWitness, rank: int) -> bool:
    return (derived.sublattice == hermite_normal_form(supplied.sublattice, rank)
            and _same_span(derived.W_rows, supplied.W_rows)
            and _same_span(derived.F_rows, supplied.F_rows))


# ---------------------------------------------------------------------------
# 直和・基底変換・重み 1 部分
# ---------------------------------------------------------------------------

def direct_sum(H1: OneHodgeStructure, H2: OneHodgeStructure) -> OneHodgeStructure:
    r1, r2 = H1.rank, H2.rank
    zero1, zero2 = [Fraction(0)] * r1, [Fraction(0)] * r2
    W = [row + zero2 for row in H1.W_basis] + [zero1 + row for row in H2.W_basis]
    F = [row + zero2 for row in H1.F_basis] + [zero1 + row for row in H2.F_basis]
    return OneHodgeStructure(r1 + r2, W, F)


def base_change(H: OneHodgeStructure, U: Sequence[Sequence[int]]) -> OneHodgeStructure:
    """座標 x ↦ x·U（U はユニモジュラ）"""
    U = int_matrix(U)
    if len(U) != H.rank or any(len(row) != H.rank for row in U):
        raise InputError("基底変換行列の形状が階数と合いません")
    if H.rank and abs(determinant(U)) != 1:
        raise InputError("基底変換行列がユニモジュラではありません")
    return OneHodgeStructure(H.rank, _project(H.W_basis, U, 0, H.rank),
                             _project(H.F_basis, U, 0, H.rank))


def weight_one_part(H: OneHodgeStructure) -> SubHSWitness:
    """Λ_0 上の純粋な重み 1 の部分構造"""
    _require_valid(H)
    result = sub_hs(H, lambda_zero(H))
    if not result["accepted"]:
        raise InputError(f"Λ_0 上の部分構造が作れません: {result['reason']}")
    return result["witness"]


# ---------------------------------------------------------------------------
# 完全列の次元勘定
# ---------------------------------------------------------------------------

def ses_bookkeeping(H: OneHodgeStructure) -> Dict:
    """
    上段 0 → W_C → Λ_C → H^{1,1} → 0 と下段 0 → Λ_0 → Λ → Λ/Λ_0 → 0 の
    次元・階数の勘定を確かめる。

    h11 は F の像 F/(F ∩ W_C) の次元として W とは別に求め、Λ_0 の階数は
    dim_Q(W ∩ Λ_Q) と突き合わせる。公理を満たさない構造でも報告を返す。
    """
    dim_w = _rank(H.W_basis)
    h11 = _rank(H.F_basis) - len(intersect_spaces(H.W_basis, H.F_basis, H.rank))
    top = dim_w == len(H.W_basis) and dim_w + h11 == H.rank

    lam0 = lambda_zero(H)
    identity = [[int(i == j) for j in range(H.rank)] for i in range(H.rank)]
    rational_w = len(intersect_spaces(H.W_basis, identity, H.rank))
    rank0 = _rank(lam0)
    bottom = rank0 == len(lam0) == rational_w and (not lam0 or is_saturated(lam0, H.rank))

    inside = _rank(H.W_basis + lam0) == dim_w
    vertical = inside and rank0 == dim_w

    exact = top and bottom and vertical
    valid = validate_1hs(H)["valid"]
    pure = weight_one_part(H) if valid and exact else None
    has_pure = pure is not None
    return {
        "query": "ses",
        "rank": H.rank,
        "valid": valid,
        "top": {"dim_W": dim_w, "h11": h11, "exact": top},
        "bottom": {"rank_lambda0": rank0, "dim_W_rational": rational_w,
                   "rank_quotient": H.rank - rank0, "exact": bottom},
        "vertical_bijection": vertical,
        "weight_one_part": hodge_numbers(pure.structure).to_dict() if has_pure else None,
        "pure_quotient": {"h10": 0, "h01": 0, "h11": H.rank - pure.rank} if has_pure else None,
        "exact": exact,
    }
