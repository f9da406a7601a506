"""
jumploci: コホモロジー跳躍軌跡の計算と証明書の検証（CLI）

使い方:
    python -m src.cli.jumploci resonance member --workspace ws.txt --algebra heis --i 1 --k 1 --point 0,0
    python -m src.cli.jumploci charvar verify-torus --workspace ws.txt --complex pencil --torus T111 --i 1 --k 1
    python -m src.cli.jumploci torus axl --workspace ws.txt --affine V1 --zeroset W1 --dim 1
    python -m src.cli.jumploci hodge bdr-verify --workspace ws.txt --bdr cert

出力:
    標準出力に JSON レポート、標準エラーに日本語の要約と警告。
    終了コード 0 = 計算完了・証明成功、1 = 検証が反証された（証人付き）、2 = 入力エラー
"""

import argparse
import sys
import time
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from src.cdga.resonance import (
    aomoto,
    betti_at,
    probe_components,
    resonance_membership,
    verify_subspace_in_resonance,
)
from src.cli.cache import open_cache
from src.cli.report import dumps, make_report
from src.cli.workspace import Workspace, parse_workspace
from src.exact.cyclotomic import to_rational
from src.exact.errors import InputError
from src.exact.lattice import int_matrix
from src.hodge.bdr import verify_bdr_certificate
from src.hodge.structure import (
    hodge_numbers,
    lambda_zero,
    quotient_hs,
    ses_bookkeeping,
    sub_hs,
    validate_1hs,
)
from src.torus.subtorus import containment, exp_image, intersection, membership
from src.torus.vanishing import (
    ax_lindemann_report,
    numeric_vanishing_check,
    vanishes_on_exp_image,
)
from src.twisted.compare import DEFAULT_SCALE, compare_exp
from src.twisted.complex import (
    Character,
    charvar_membership,
    charvar_sweep,
    torsion_sweep,
    twisted_betti,
    verify_torus_in_charvar,
)


EXIT_OK = 0
EXIT_REFUTED = 1
EXIT_INPUT_ERROR = 2

# (結果, 終了コード, 要約)
Outcome = Tuple[Dict, int, str]


# ---------------------------------------------------------------------------
# 引数の解釈
# ---------------------------------------------------------------------------

def parse_vector(text: Optional[str], option: str) -> List[Fraction]:
    """"1/2,0,1/3" を有理数のリストにする"""
    if text is None:
        raise InputError(f"{option} を指定してください")
    return [to_rational(t) for t in text.replace(",", " ").split()]


def parse_lattice(text: Optional[str], option: str) -> List[List[int]]:
    """"1 0 0; 0 1 0" を整数行列にする（空文字列は零格子）"""
    if text is None:
        raise InputError(f"{option} を指定してください")
    rows = []
    for chunk in text.split(";"):
        if chunk.strip():
            rows.append([to_rational(t) for t in chunk.replace(",", " ").split()])
    return int_matrix(rows)


def _require(value, option: str):
    if value is None:
        raise InputError(f"{option} を指定してください")
    return value


def _degrees(args):
    """--i と --k（どちらも非負整数）"""
    i, k = _require(args.i, "--i"), _require(args.k, "--k")
    if i < 0:
        raise InputError(f"--i は非負整数です: {i}")
    if k < 0:
        raise InputError(f"--k は非負整数です: {k}")
    return i, k


def _bool_text(flag: bool) -> str:
    return "はい" if flag else "いいえ"


# ---------------------------------------------------------------------------
# resonance
# ---------------------------------------------------------------------------

def run_resonance(args, ws: Workspace, cache, rng) -> Outcome:
    A = ws.get("algebra", _require(args.algebra, "--algebra"))
    module = ws.get("module", args.module) if args.module else None
    C = aomoto(A, module)
    base = {"algebra": args.algebra, "coordinates": list(C.variables),
            "flat_connections": C.flat.to_dict() if C.flat else None}

    if args.action in ("member", "betti"):
        point = parse_vector(args.point, "--point")
        betti = betti_at(C, point)
        result = dict(base, query=args.action, point=point, betti=betti, certificate="exact")
        if args.action == "betti":
            return result, EXIT_OK, f"ベッチ数: {betti}"
        i, k = _degrees(args)
        member = resonance_membership(C, i, k, point)
        result.update(degree=i, jump=k, member=member)
        return result, EXIT_OK, f"ω ∈ R^{i}_{k}: {_bool_text(member)}（dim H^{i} = {betti[i] if i < len(betti) else 0}）"

    i, k = _degrees(args)
    if args.action == "verify":
        L = ws.get("subspace", _require(args.subspace, "--subspace"))
        result = verify_subspace_in_resonance(C, L, i, k, rng=rng, cache=cache)
        result = dict(base, query="verify", **result)
        code = EXIT_OK if result["status"] == "success" else EXIT_REFUTED
        return result, code, f"部分空間 {args.subspace} ⊂ R^{i}_{k}: {result['status']}"

    probed = probe_components(C, i, k, trials=args.trials, rng=rng, cache=cache)
    result = dict(base, query="probe", degree=i, jump=k,
                  candidates=[S.to_dict() for S in probed["candidates"]],
                  exhaustive=False, member_directions=probed["member_directions"],
                  certificate="heuristic")
    return result, EXIT_OK, f"成分候補 {len(probed['candidates'])} 個（網羅的ではありません）"


# ---------------------------------------------------------------------------
# charvar
# ---------------------------------------------------------------------------

def run_charvar(args, ws: Workspace, cache, rng) -> Outcome:
    C = ws.get("complex", _require(args.complex, "--complex"))
    base = {"complex": args.complex, "dual": args.dual}

    if args.action in ("member", "betti"):
        rho = Character(parse_vector(args.rho, "--rho"))
        betti = twisted_betti(C, rho, args.dual)
        result = dict(base, query=args.action, character=rho.to_dict(), betti=betti,
                      certificate="exact")
        if args.action == "betti":
            return result, EXIT_OK, f"ねじれベッチ数: {betti}"
        i, k = _degrees(args)
        member = charvar_membership(C, i, k, rho, args.dual)
        result.update(degree=i, jump=k, member=member)
        return result, EXIT_OK, f"ρ ∈ Σ^{i}_{k}: {_bool_text(member)}"

    i, k = _degrees(args)
    if args.action == "verify-torus":
        T = ws.get("torus", _require(args.torus, "--torus"))
        result = verify_torus_in_charvar(C, T, i, k, dual=args.dual, rng=rng, cache=cache)
        result = dict(base, **result)
        status = result["status"]
        if status == "refuted" and result.get("witness") is None:
            print("警告: 反証は確定していますが、反例の指標は探索範囲で見つかりませんでした", file=sys.stderr)
        code = EXIT_REFUTED if status == "refuted" else EXIT_OK
        if status == "numeric-only" and not result["passed"]:
            code = EXIT_REFUTED
        return result, code, f"部分トーラス {args.torus} ⊂ Σ^{i}_{k}: {status}"

    characters = torsion_sweep(C.n, rng, count=args.count)
    result = dict(base, **charvar_sweep(C, i, k, characters, args.dual))
    return result, EXIT_OK, f"{result['checked']} 個の指標のうち {result['members']} 個が Σ^{i}_{k} に所属"


# ---------------------------------------------------------------------------
# compare-exp
# ---------------------------------------------------------------------------

def run_compare(args, ws: Workspace, cache, rng) -> Outcome:
    A = ws.get("algebra", _require(args.algebra, "--algebra"))
    C = ws.get("complex", _require(args.complex, "--complex"))
    result = compare_exp(A, C, *_degrees(args),
                         samples=args.samples, denominator_bound=args.denominator_bound,
                         scale=args.scale, dual=not args.homology, rng=rng)
    result.update(algebra=args.algebra, complex=args.complex)
    code = EXIT_OK if result["agree"] else EXIT_REFUTED
    return result, code, f"{result['samples']} 点中 {result['agreements']} 点で一致"


# ---------------------------------------------------------------------------
# torus
# ---------------------------------------------------------------------------

def run_torus(args, ws: Workspace, cache, rng) -> Outcome:
    if args.action == "exp-image":
        V = ws.get("affine", _require(args.affine, "--affine"))
        T = exp_image(V)
        result = {"query": "exp-image", "affine": V.to_dict(), "torus": T.to_dict(),
                  "certificate": "exact"}
        return result, EXIT_OK, f"exp({args.affine}) は {T.dim} 次元の並進部分トーラス"

    if args.action == "member":
        T = ws.get("torus", _require(args.torus, "--torus"))
        w = parse_vector(args.point, "--point")
        result = dict(membership(w, T), query="member", torus=T.to_dict(), point=w)
        return result, EXIT_OK, f"exp(w) ∈ {args.torus}: {_bool_text(result['member'])}"

    if args.action == "contain":
        S = ws.get("torus", _require(args.torus, "--torus"))
        T = ws.get("torus", _require(args.other, "--other"))
        contained = containment(S, T)
        result = {"query": "contain", "torus": S.to_dict(), "other": T.to_dict(),
                  "contained": contained, "certificate": "exact"}
        return result, EXIT_OK, f"{args.torus} ⊆ {args.other}: {_bool_text(contained)}"

    if args.action == "intersect":
        S = ws.get("torus", _require(args.torus, "--torus"))
        T = ws.get("torus", _require(args.other, "--other"))
        identity, count = intersection(S.torus, T.torus)
        result = {"query": "intersect", "identity_component": identity.to_dict(),
                  "components": count, "certificate": "exact"}
        return result, EXIT_OK, f"共通部分: 単位成分の次元 {identity.dim}、成分数 {count}"

    V = ws.get("affine", _require(args.affine, "--affine"))
    W = ws.get("zeroset", _require(args.zeroset, "--zeroset"))
    if args.action == "vanish":
        generators = []
        for idx, g in enumerate(W.generators):
            ok, cert = vanishes_on_exp_image(g, V)
            entry = {"generator": str(g), "vanishes": ok, **cert}
            if args.numeric_samples:
                entry["numeric"] = numeric_vanishing_check(g, V, samples=args.numeric_samples, rng=rng)
            generators.append(entry)
        vanishes = all(e["vanishes"] for e in generators)
        result = {"query": "vanish", "affine": V.to_dict(), "zeroset": W.to_dict(),
                  "generators": generators, "vanishes": vanishes, "certificate": "exact"}
        return result, EXIT_OK, f"exp({args.affine}) ⊆ {args.zeroset}: {_bool_text(vanishes)}"

    result = ax_lindemann_report(V, W, _require(args.dim, "--dim"))
    code = EXIT_OK if result["result"] == "success" else EXIT_REFUTED
    return result, code, f"Ax–Lindemann の検査: {result['result']}"


# ---------------------------------------------------------------------------
# hodge
# ---------------------------------------------------------------------------

def run_hodge(args, ws: Workspace, cache, rng) -> Outcome:
    if args.action == "bdr-verify":
        hodge_name, cert = ws.get("bdr", _require(args.bdr, "--bdr"))
        H = ws.get("hodge", hodge_name)
        result = dict(verify_bdr_certificate(H, cert), hodge=hodge_name)
        code = EXIT_OK if result["valid"] else EXIT_REFUTED
        return result, code, f"証明書 {args.bdr}: 成立 {len(result['certified'])} 組、失敗 {len(result['failures'])} 組"

    H = ws.get("hodge", _require(args.hodge, "--hodge"))
    if args.action == "check":
        result = dict(validate_1hs(H), query="check", structure=H.to_dict(), certificate="exact")
        if result["input_error"]:
            raise InputError("W または F の基底が一次従属です")
        code = EXIT_OK if result["valid"] else EXIT_REFUTED
        return result, code, f"1-ホッジ構造の公理: {_bool_text(result['valid'])}"

    if args.action == "numbers":
        numbers = hodge_numbers(H)
        result = {"query": "numbers", "hodge_numbers": numbers.to_dict(), "certificate": "exact"}
        return result, EXIT_OK, f"(h10, h01, h11) = {numbers.astuple()}"

    if args.action == "lambda0":
        rows = lambda_zero(H)
        result = {"query": "lambda0", "lattice": rows, "rank": len(rows), "certificate": "exact"}
        return result, EXIT_OK, f"Λ_0 の階数 {len(rows)}"

    if args.action == "ses":
        result = dict(ses_bookkeeping(H), certificate="exact")
        code = EXIT_OK if result["exact"] else EXIT_REFUTED
        return result, code, f"完全列の勘定: {_bool_text(result['exact'])}"

    rows = parse_lattice(args.lattice, "--lattice")
    sub = sub_hs(H, rows)
    result = {"query": args.action, "sublattice": rows, "accepted": sub["accepted"],
              "reason": sub["reason"], "certificate": "exact"}
    if not sub["accepted"]:
        return result, EXIT_REFUTED, f"部分 1-ホッジ構造ではありません: {sub['reason']}"
    witness = sub["witness"]
    result["witness"] = witness.to_dict()
    if args.action == "sub":
        return result, EXIT_OK, f"部分 1-ホッジ構造（階数 {witness.rank}）"
    Q = quotient_hs(H, witness)
    result.update(quotient=Q.to_dict(), quotient_hodge_numbers=hodge_numbers(Q).to_dict())
    return result, EXIT_OK, f"商構造（階数 {Q.rank}）"


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------

def run_validate(args, ws: Workspace, cache, rng) -> Outcome:
    summary = ws.to_dict()
    invalid = [v for v in summary["validation"] if not v["valid"]]
    result = dict(summary, query="validate", valid=not invalid, certificate="exact")
    code = EXIT_OK if not invalid else EXIT_REFUTED
    return result, code, f"{len(summary['validation'])} 個のオブジェクトのうち {len(invalid)} 個が不正"


RUNNERS: Dict[str, Callable] = {
    "resonance": run_resonance,
    "charvar": run_charvar,
    "compare-exp": run_compare,
    "torus": run_torus,
    "hodge": run_hodge,
    "validate": run_validate,
}


# ---------------------------------------------------------------------------
# CLI エントリポイント
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--workspace", action="append", default=[],
                        help="ワークスペースファイル（複数指定可）")
    common.add_argument("--json", action="store_true",
                        help="標準エラーへの要約を出さない（警告は出す）")
    common.add_argument("--dual", action="store_true",
                        help="逆指標で評価する（コホモロジー規約）")
    common.add_argument("--seed", type=int, default=0,
                        help="乱数シード（デフォルト: 0）")
    common.add_argument("--cache-dir", default=None,
                        help="階数キャッシュのディレクトリ（環境変数 JUMPLOCI_CACHE が優先）")

    parser = argparse.ArgumentParser(
        prog="jumploci",
        description="レゾナンス多様体・特性多様体・1-ホッジ構造の計算と証明書の検証",
    )
    subparsers = parser.add_subparsers(dest="command", help="実行コマンド")

    # --- サブコマンド: resonance ---
    res_parser = subparsers.add_parser("resonance", parents=[common],
                                       help="アオモト複体とレゾナンス多様体")
    res_parser.add_argument("action", nargs="?", default="member",
                            choices=["member", "betti", "verify", "probe"],
                            help="処理（デフォルト: member）")
    res_parser.add_argument("--algebra", help="CDGA の名前")
    res_parser.add_argument("--module", help="DG 加群の名前（省略時は代数自身）")
    res_parser.add_argument("--i", type=int, help="次数")
    res_parser.add_argument("--k", type=int, help="跳躍の閾値")
    res_parser.add_argument("--point", help="平坦接続の座標（例: 0,1/2）")
    res_parser.add_argument("--subspace", help="線形部分空間の名前（verify）")
    res_parser.add_argument("--trials", type=int, default=20,
                            help="probe の乱数方向の数（デフォルト: 20）")

    # --- サブコマンド: charvar ---
    cv_parser = subparsers.add_parser("charvar", parents=[common],
                                      help="ねじれ係数のホモロジーと特性多様体")
    cv_parser.add_argument("action", nargs="?", default="member",
                           choices=["member", "betti", "verify-torus", "sweep"],
                           help="処理（デフォルト: member）")
    cv_parser.add_argument("--complex", help="鎖複体または群の表示の名前")
    cv_parser.add_argument("--i", type=int, help="次数")
    cv_parser.add_argument("--k", type=int, help="跳躍の閾値")
    cv_parser.add_argument("--rho", help="ねじれ指標 ρ_j = exp(2πi q_j) の q（例: 1/2,0）")
    cv_parser.add_argument("--torus", help="並進部分トーラスの名前（verify-torus）")
    cv_parser.add_argument("--count", type=int, default=50,
                           help="n > 3 での掃引の指標数（デフォルト: 50）")

    # --- サブコマンド: compare-exp ---
    cmp_parser = subparsers.add_parser("compare-exp", parents=[common],
                                       help="原点の近くで R と Σ を exp で比べる")
    cmp_parser.add_argument("--algebra", help="CDGA の名前")
    cmp_parser.add_argument("--complex", help="鎖複体または群の表示の名前")
    cmp_parser.add_argument("--i", type=int, help="次数")
    cmp_parser.add_argument("--k", type=int, help="跳躍の閾値")
    cmp_parser.add_argument("--samples", type=int, default=30,
                            help="標本数（デフォルト: 30）")
    cmp_parser.add_argument("--denominator-bound", type=int, default=6,
                            help="標本の分母の上限（デフォルト: 6）")
    cmp_parser.add_argument("--scale", type=int, default=DEFAULT_SCALE,
                            help=f"原点へ寄せる倍率（デフォルト: {DEFAULT_SCALE}）")
    cmp_parser.add_argument("--homology", action="store_true",
                            help="特性多様体をホモロジー規約で評価する")

    # --- サブコマンド: torus ---
    tor_parser = subparsers.add_parser("torus", parents=[common],
                                       help="部分トーラスと指数写像の計算")
    tor_parser.add_argument("action",
                            choices=["exp-image", "member", "contain", "intersect", "vanish", "axl"],
                            help="処理")
    tor_parser.add_argument("--affine", help="有理アフィン部分空間の名前")
    tor_parser.add_argument("--torus", help="並進部分トーラスの名前")
    tor_parser.add_argument("--other", help="比較相手の並進部分トーラスの名前")
    tor_parser.add_argument("--point", help="点 w（exp(w) を判定、例: 1/2,0）")
    tor_parser.add_argument("--zeroset", help="零点集合の名前")
    tor_parser.add_argument("--dim", type=int, help="主張する dim W（axl）")
    tor_parser.add_argument("--numeric-samples", type=int, default=0,
                            help="vanish で数値照合する標本数（デフォルト: 0 = しない）")

    # --- サブコマンド: hodge ---
    hs_parser = subparsers.add_parser("hodge", parents=[common], help="1-ホッジ構造")
    hs_parser.add_argument("action",
                           choices=["check", "numbers", "lambda0", "sub", "quotient",
                                    "bdr-verify", "ses"],
                           help="処理")
    hs_parser.add_argument("--hodge", help="1-ホッジ構造の名前")
    hs_parser.add_argument("--lattice", help="部分格子（例: \"1 0 0; 0 1 0\"）")
    hs_parser.add_argument("--bdr", help="BdR 証明書の名前（bdr-verify）")

    # --- サブコマンド: validate ---
    subparsers.add_parser("validate", parents=[common],
                          help="ワークスペースの全オブジェクトを検証")
    return parser


def _arguments(args) -> Dict:
    """レポートに残す引数（出力先に依存するものは除く）"""
    skip = {"json", "cache_dir"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}


def main(argv: Optional[List[str]] = None) -> int:
    """コマンドラインエントリポイント（サブコマンド方式）"""
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.command not in RUNNERS:
        parser.print_help()
        return 1

    started = time.perf_counter()
    try:
        ws = parse_workspace(args.workspace, strict=args.command != "validate")
        cache = open_cache(args.cache_dir)
        ws.cache_dir = str(cache.directory) if cache else None
        rng = np.random.default_rng(args.seed)
        result, code, summary = RUNNERS[args.command](args, ws, cache, rng)
    except InputError as e:
        print(f"エラー: {e}", file=sys.stderr)
        return EXIT_INPUT_ERROR

    command = args.command if not hasattr(args, "action") else f"{args.command} {args.action}"
    report = make_report(command, _arguments(args), result,
                         seconds=time.perf_counter() - started)
    print(dumps(report))
    if report["certificate"] == "numeric":
        print("警告: 数値計算による結果で、証明としての効力はありません", file=sys.stderr)
    if not args.json:
        print(f"{command}: {summary}", file=sys.stderr)
        if cache is not None:
            stats = cache.stats()
            print(f"キャッシュ: {stats['hits']} 件ヒット / {stats['misses']} 件ミス", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
