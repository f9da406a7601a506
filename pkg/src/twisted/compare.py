"""
原点近傍でのレゾナンスと特性多様体の照合

有理点 ω（小さい分母、1/M 倍して原点に寄せる）ごとに
    ω ∈ R^i_k(A)  と  exp(ω) ∈ Σ^i_k(X)
を厳密に判定して一致を数える。解析的芽の同型そのものは主張しない。
"""

from fractions import Fraction
from typing import Dict, List, Optional

import numpy as np

from src.cdga.algebra import GradedAlgebra
from src.cdga.resonance import aomoto, resonance_membership
from src.exact.errors import InputError
from src.twisted.complex import Character, LaurentComplex, charvar_membership


DEFAULT_SCALE = 8


def sample_points(m: int, samples: int, denominator_bound: int, scale: int,
                  rng: np.random.Generator) -> List[List[Fraction]]:
    """原点を先頭に、分子 [-2,2]・分母 ≤ denominator_bound の点を 1/scale 倍して並べる"""
    points = [[Fraction(0)] * m]
    for _ in range(max(samples - 1, 0)):
        points.append([Fraction(int(rng.integers(-2, 3)),
                                int(rng.integers(1, denominator_bound + 1)) * scale)
                       for _ in range(m)])
    return points


def compare_exp(A: GradedAlgebra, C: LaurentComplex, i: int, k: int, samples: int = 30,
                denominator_bound: int = 6, scale: int = DEFAULT_SCALE, dual: bool = True,
                rng: Optional[np.random.Generator] = None) -> Dict:
    """
    resonance_membership(ω) と charvar_membership(exp(ω)) を標本点で比べる。

    Args:
        A: CDGA（H¹(A) の座標が指標トーラスの座標と同一視されていること）
        C: 鎖複体
        i, k: 次数と閾値
        samples: 標本数（原点を含む）
        denominator_bound: 分母の上限
        scale: 原点へ寄せる倍率 M
        dual: 特性多様体をコホモロジー規約で評価するか

    Returns:
        一致・不一致の集計
    """
    aom = aomoto(A)
    if aom.m != C.n:
        raise InputError(f"平坦接続の座標数 {aom.m} と指標トーラスの次元 {C.n} が異なります")
    rng = rng if rng is not None else np.random.default_rng(0)
    agreements = 0
    disagreements = []
    for omega in sample_points(aom.m, samples, denominator_bound, scale, rng):
        res = resonance_membership(aom, i, k, omega)
        char = charvar_membership(C, i, k, Character(omega), dual)
        if res == char:
            agreements += 1
        else:
            disagreements.append({"omega": [str(x) for x in omega],
                                  "resonance": res, "charvar": char})
    total = agreements + len(disagreements)
    return {
        "query": "compare-exp",
        "degree": i,
        "jump": k,
        "samples": total,
        "scale": scale,
        "agreements": agreements,
        "disagreements": disagreements,
        "agree": not disagreements,
        "certificate": "exact",
        "scope": "sampled points only",
    }
