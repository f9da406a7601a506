"""
JSON レポート

レポートは {"command", "arguments", "result", "certificate", "timing"} の辞書。
キーを整列して書き出すので、同じ入力からは同じバイト列が得られる
（timing だけは比較から除く）。
"""

import json
from fractions import Fraction
from typing import Dict, Optional

import numpy as np

from src.exact.cyclotomic import Cyclotomic


CERTIFICATE_KINDS = ("exact", "numeric", "heuristic")


def jsonable(obj):
    """Fraction・円分体の元・numpy のスカラーを JSON に載る形へ変換する"""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return str(obj)
    if isinstance(obj, Cyclotomic):
        return str(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, (int, float)):
        return obj
    if hasattr(obj, "to_dict"):
        return jsonable(obj.to_dict())
    return str(obj)


def make_report(command: str, arguments: Dict, result: Dict,
                certificate: Optional[str] = None, seconds: float = 0.0) -> Dict:
    """
    レポート辞書を組み立てる。

    Args:
        command: サブコマンド（例 "charvar verify-torus"）
        arguments: 解釈済みの引数
        result: 計算結果
        certificate: 証明の種類。省略時は result["certificate"]、なければ "exact"
        seconds: 計算時間
    """
    kind = certificate or result.get("certificate") or "exact"
    if kind not in CERTIFICATE_KINDS:
        raise ValueError(f"未知の証明の種類: {kind}")
    return {
        "command": command,
        "arguments": arguments,
        "result": result,
        "certificate": kind,
        "timing": {"seconds": round(float(seconds), 6)},
    }


def comparable(report: Dict) -> Dict:
    """比較用に timing を除いたレポート"""
    return {k: v for k, v in report.items() if k != "timing"}


def dumps(report: Dict) -> str:
    return json.dumps(jsonable(report), ensure_ascii=False, sort_keys=True, indent=2)
