"""
ベッチ–ド・ラーム集合の結論の証明書

証明書は (並進部分トーラス, 部分 1-ホッジ構造の証人) の組の列。
各組について方向格子が飽和していること、証人の格子と一致すること、
sub_hs で再導出した証人と一致することを確かめる。和集合が解析的に
定義された集合と一致するかは扱わない。
"""

from typing import Dict, List, Optional, Sequence, Tuple

from src.exact.errors import InputError
from src.exact.lattice import hermite_normal_form, is_saturated
from src.hodge.structure import OneHodgeStructure, SubHSWitness, sub_hs, witness_matches
from src.torus.subtorus import TranslatedSubtorus


class BdrCertificate:
    """
    Args:
        pieces: (並進部分トーラス, 証人) の列。証人が None なら格子から自動で作る
    """

    def __init__(self, pieces: Sequence[Tuple[TranslatedSubtorus, Optional[SubHSWitness]]]):
        self.pieces: List[Tuple[TranslatedSubtorus, Optional[SubHSWitness]]] = list(pieces)


def verify_bdr_certificate(H: OneHodgeStructure, cert: BdrCertificate) -> Dict:
    """
    各組が部分 1-ホッジ構造で定まる部分トーラスであることを確かめる。

    Args:
        H: 1-ホッジ構造
        cert: 証明書

    Returns:
        {"valid": bool, "certified": [番号], "failures": [{"piece", "reason"}]}
    """
    certified = []
    failures = []
    for idx, (T, witness) in enumerate(cert.pieces):
        if T.n != H.rank:
            raise InputError(f"組 {idx} の部分トーラスの次元 {T.n} が階数 {H.rank} と異なります")
        if not T.torus.given_saturated or (
                witness is not None and witness.sublattice
                and not is_saturated(witness.sublattice, H.rank)):
            failures.append({"piece": idx, "reason": "torsion quotient"})
            continue
        if witness is not None and hermite_normal_form(witness.sublattice, H.rank) != T.lattice:
            failures.append({"piece": idx, "reason": "lattice mismatch"})
            continue
        derived = sub_hs(H, T.lattice)
        if not derived["accepted"]:
            failures.append({"piece": idx, "reason": f"not a sub 1-Hodge structure: {derived['reason']}"})
            continue
        if witness is not None and not witness_matches(derived["witness"], witness, H.rank):
            failures.append({"piece": idx, "reason": "witness mismatch"})
            continue
        certified.append(idx)
    return {
        "query": "bdr-verify",
        "valid": not failures,
        "certified": certified,
        "failures": failures,
        "certificate": "exact",
        "scope": "union vs analytic Betti-de Rham set not checked",
    }
