"""
指数像上での消滅判定と Ax–Lindemann 型の報告

exp(V) 上で f が恒等的に消えるかは、単項式パラメータ表示を代入した
s のローラン多項式が零かどうかで厳密に決まる（相異なる指標 s ↦ s^e は
一次独立なので、指数群ごとの係数和が Q(ζ_N) で 0 になればよい）。
"""

import cmath
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.exact.errors import InputError
from src.exact.poly import LaurentPoly, _grlex_key
from src.torus.subtorus import AffineSubspaceQ, TranslatedSubtorus, exp_image


# ---------------------------------------------------------------------------
# 零点集合
# ---------------------------------------------------------------------------

class LaurentZeroSet:
    """
    ローラン多項式の共通零点 W ⊂ (C*)^n。既約性は検査しない。

    Args:
        generators: 定義方程式（同じ変数リストを持つこと）
    """

    def __init__(self, generators: Sequence[LaurentPoly]):
        if not generators:
            raise InputError("零点集合の生成元が 1 つもありません")
        self.variables = generators[0].variables
        for g in generators:
            if g.variables != self.variables:
                raise InputError("零点集合の生成元の変数リストが一致しません")
        self.generators: List[LaurentPoly] = list(generators)

    @property
    def n(self) -> int:
        return len(self.variables)

    def to_dict(self) -> Dict:
        return {"variables": list(self.variables), "generators": [str(g) for g in self.generators]}


def _parameters(d: int) -> List[str]:
    return [f"s{k + 1}" for k in range(d)]


def _first_group(p: LaurentPoly) -> Optional[Dict]:
    if p.is_zero():
        return None
    exp = min(p.terms, key=_grlex_key)
    return {"exponent": list(exp), "coefficient": str(p.terms[exp])}


# ---------------------------------------------------------------------------
# 厳密判定
# ---------------------------------------------------------------------------

def restrict_to_torus(f: LaurentPoly, T: TranslatedSubtorus) -> LaurentPoly:
    """f を T の単項式パラメータ表示に制限する"""
    if len(f.variables) != T.n:
        raise InputError(f"多項式の変数の数 {len(f.variables)} が次元 {T.n} と異なります")
    if not T.is_torsion:
        raise InputError("数値並進の部分トーラスには厳密な代入はできません")
    return f.substitute_torus(T.translate, T.lattice, _parameters(T.dim))


def vanishes_on_exp_image(f: LaurentPoly, V: AffineSubspaceQ) -> Tuple[bool, Dict]:
    """
    f が exp(V) 上で恒等的に 0 になるかを厳密に判定する。

    Returns:
        (判定, 証明書)。証明書は代入後の多項式と、非零なら最初の非零指数群
    """
    if len(f.variables) != V.n:
        raise InputError(f"多項式の変数の数 {len(f.variables)} が次元 {V.n} と異なります")
    rows = V.integer_directions()
    restricted = f.substitute_torus(V.base, rows, _parameters(len(rows)))
    ok = restricted.is_zero()
    cert = {
        "certificate": "exact",
        "directions": rows,
        "restricted": str(restricted),
        "witness": _first_group(restricted),
    }
    return ok, cert


def vanishes_on_torus(f: LaurentPoly, T: TranslatedSubtorus) -> Tuple[bool, Dict]:
    restricted = restrict_to_torus(f, T)
    return restricted.is_zero(), {"certificate": "exact", "restricted": str(restricted),
                                  "witness": _first_group(restricted)}


# ---------------------------------------------------------------------------
# 数値による照合（証明力なし）
# ---------------------------------------------------------------------------

def numeric_vanishing_check(f: LaurentPoly, V: AffineSubspaceQ, samples: int = 1000,
                            rng: Optional[np.random.Generator] = None,
                            tol: float = 1e-8) -> Dict:
    """
    exp(V) の標本点で f を数値評価する。

    パラメータは [-1,1] の実数から取る（|z_j| = 1 の点のみ）。
    """
    rng = rng if rng is not None else np.random.default_rng(0)
    base = [float(x) for x in V.base]
    dirs = [[float(x) for x in d] for d in V.directions]
    worst = 0.0
    for _ in range(samples):
        t = rng.uniform(-1, 1, size=len(dirs))
        z = []
        for j in range(V.n):
            w = base[j] + sum(tk * d[j] for tk, d in zip(t, dirs))
            z.append(cmath.exp(2j * cmath.pi * w))
        worst = max(worst, abs(f.evaluate_numeric(z)))
    return {"certificate": "numeric", "samples": samples, "max_abs": worst,
            "vanishes": worst < tol, "tolerance": tol}


# ---------------------------------------------------------------------------
# Ax–Lindemann 型の報告
# ---------------------------------------------------------------------------

def ax_lindemann_report(V: AffineSubspaceQ, W: LaurentZeroSet, claimed_dim_W: int) -> Dict:
    """
    exp(V) ⊆ W かつ dim V = dim W のとき W は exp(V) の並進部分トーラスになる、
    という主張の機械検査できる部分を検査する。

    Args:
        V: 有理アフィン部分空間
        W: 零点集合（既約性は利用者の主張）
        claimed_dim_W: 利用者が主張する dim W

    Returns:
        報告（検査した仮定・主張として受け取った仮定・予測される部分トーラス）
    """
    if W.n != V.n:
        raise InputError(f"零点集合の次元 {W.n} とアフィン部分空間の次元 {V.n} が異なります")
    report: Dict = {
        "query": "axl",
        "affine": V.to_dict(),
        "zeroset": W.to_dict(),
        "claimed_dim": int(claimed_dim_W),
        "hypotheses": {
            "machine_checked": ["exp(V) ⊆ W", "dim V = claimed dim W"],
            "asserted": ["W is irreducible", f"dim W = {int(claimed_dim_W)}"],
        },
        "certificate": "exact",
    }
    for idx, g in enumerate(W.generators):
        ok, cert = vanishes_on_exp_image(g, V)
        if not ok:
            report.update({"contained": False, "result": "hypothesis-failed",
                           "failing_generator": idx, "witness": cert["witness"]})
            return report
    report["contained"] = True
    if V.dim != claimed_dim_W:
        report.update({"result": "dimension-mismatch", "dim_V": V.dim})
        return report
    predicted = exp_image(V)
    checks = [vanishes_on_torus(g, predicted)[0] for g in W.generators]
    report.update({
        "result": "success" if all(checks) else "prediction-failed",
        "dim_V": V.dim,
        "predicted": predicted.to_dict(),
        "predicted_verified": all(checks),
    })
    return report
