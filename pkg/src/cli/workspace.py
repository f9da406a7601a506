"""
ワークスペース（宣言的な入力ファイル）の読み込み

書式:
    # コメント
    [algebra heis]
    generators = a b c
    d c = a*b

    [complex wedge]
    n = 2
    ranks = 1 2
    d 1 = 0 0 t1 1, 0 0 1 -1, 0 1 t2 1, 0 1 1 -1

- `[種類 名前]` で節を始め、以降の `キー [引数...] = 値` 行がその節に属する
- 行列は `;` で行を区切り、成分は空白区切りの有理数（"1/2" 可）
- 一次結合は `係数 名前` の項を ` + ` / ` - `（前後に空白）でつなぐ（例: `e1e3 - e1e2`）
- 鎖複体の境界写像は疎な項の列 `行 列 単項式 係数` をカンマで区切る
- F の成分は "実部,虚部"（Q(i) の元）

種類: algebra / module / complex / presentation / torus / affine /
      subspace / zeroset / hodge / bdr
presentation は complex と同じ名前空間に置き、Fox 微分で鎖複体に変換する。
"""

import re
from contextlib import contextmanager
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from src.cdga.algebra import DGModule, GradedAlgebra, exterior_algebra, validate_cdga, validate_module
from src.cdga.resonance import LinearSubspaceQ
from src.exact.cyclotomic import Cyclotomic, to_rational
from src.exact.errors import InputError
from src.exact.lattice import int_matrix, lattice_kernel
from src.exact.matrices import intersect_spaces, object_matrix
from src.exact.poly import LaurentPoly, parse_monomial
from src.hodge.bdr import BdrCertificate
from src.hodge.structure import OneHodgeStructure, SubHSWitness, validate_1hs
from src.torus.subtorus import AffineSubspaceQ, Subtorus, TranslatedSubtorus
from src.torus.vanishing import LaurentZeroSet
from src.twisted.complex import LaurentComplex, torus_variables, validate_complex
from src.twisted.fox import Presentation, presentation_to_complex


KINDS = ("algebra", "module", "complex", "presentation", "torus", "affine",
         "subspace", "zeroset", "hodge", "bdr")

# presentation は complex の名前空間を共有する
NAMESPACE = {kind: kind for kind in KINDS}
NAMESPACE["presentation"] = "complex"

# 参照先が先に組み立てられる順序
BUILD_ORDER = ("algebra", "presentation", "complex", "torus", "affine",
               "subspace", "zeroset", "hodge", "module", "bdr")

LABEL = {
    "algebra": "代数", "module": "DG 加群", "complex": "鎖複体", "presentation": "群の表示",
    "torus": "部分トーラス", "affine": "アフィン部分空間", "subspace": "線形部分空間",
    "zeroset": "零点集合", "hodge": "1-ホッジ構造", "bdr": "BdR 証明書",
}

_SECTION_RE = re.compile(r"^\[\s*([A-Za-z]+)\s+([A-Za-z_][A-Za-z0-9_.\-]*)\s*\]$")
_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


# ---------------------------------------------------------------------------
# 構文
# ---------------------------------------------------------------------------

class Entry:
    """節の中の 1 行 `キー 引数... = 値`"""

    def __init__(self, key: str, args: List[str], value: str, line: int, column: int):
        self.key = key
        self.args = args
        self.value = value
        self.line = line
        self.column = column


class Section:
    """`[種類 名前]` で始まる節"""

    def __init__(self, kind: str, name: str, source: str, line: int):
        self.kind = kind
        self.name = name
        self.source = source
        self.line = line
        self.entries: List[Entry] = []

    def all(self, key: str) -> List[Entry]:
        return [e for e in self.entries if e.key == key]

    def one(self, key: str, required: bool = True) -> Optional[Entry]:
        found = self.all(key)
        if len(found) > 1:
            raise InputError(f"キー {key!r} が複数回指定されています", found[1].line,
                             found[1].column, self.source)
        if not found:
            if required:
                raise InputError(f"{LABEL[self.kind]} {self.name} にキー {key!r} がありません",
                                 self.line, None, self.source)
            return None
        return found[0]

    def check_keys(self, allowed: Sequence[str]):
        for e in self.entries:
            if e.key not in allowed:
                raise InputError(f"{LABEL[self.kind]} に未知のキー {e.key!r}（使えるキー: {', '.join(allowed)}）",
                                 e.line, e.column, self.source)


def parse_text(text: str, source: str = "<text>") -> List[Section]:
    """ワークスペースのテキストを節のリストに分解する"""
    sections: List[Section] = []
    current: Optional[Section] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        indent = len(line) - len(line.lstrip()) + 1
        if stripped.startswith("["):
            m = _SECTION_RE.match(stripped)
            if not m:
                raise InputError(f"節の見出しの書式が不正です: {stripped!r}", lineno, indent, source)
            kind, name = m.group(1).lower(), m.group(2)
            if kind not in KINDS:
                raise InputError(f"未知の種類 {kind!r}（使える種類: {', '.join(KINDS)}）",
                                 lineno, indent + 1, source)
            current = Section(kind, name, source, lineno)
            sections.append(current)
            continue
        if "=" not in stripped:
            raise InputError("`キー = 値` の形ではありません", lineno, indent, source)
        if current is None:
            raise InputError("節の見出しより前に値があります", lineno, indent, source)
        lhs, value = stripped.split("=", 1)
        words = lhs.split()
        if not words or not _KEY_RE.match(words[0]):
            raise InputError(f"キーの書式が不正です: {lhs.strip()!r}", lineno, indent, source)
        column = indent + len(lhs) + 1
        current.entries.append(Entry(words[0], words[1:], value.strip(), lineno, column))
    return sections


@contextmanager
def _located(entry: Entry, source: str):
    """位置を持たない InputError に行・列を付ける"""
    try:
        yield
    except InputError as e:
        raise e.located(entry.line, entry.column, source) from None


# ---------------------------------------------------------------------------
# 値の解釈
# ---------------------------------------------------------------------------

def _integer(text: str) -> int:
    try:
        return int(text.strip())
    except ValueError:
        raise InputError(f"整数ではありません: {text.strip()!r}")


def _names(text: str) -> List[str]:
    return text.split()


def _rationals(text: str) -> List[Fraction]:
    return [to_rational(tok) for tok in text.split()]


def _rows(text: str, parse: Callable[[str], List] = _rationals) -> List[List]:
    return [parse(chunk) for chunk in text.split(";") if chunk.strip()]


def _integers(text: str) -> List[int]:
    return [_integer(tok) for tok in text.split()]


def _gaussian(token: str):
    if "," not in token:
        return to_rational(token)
    re_part, im_part = token.split(",", 1)
    return Cyclotomic.gaussian(re_part, im_part)


def _gaussians(text: str) -> List:
    return [_gaussian(tok) for tok in text.split()]


def _is_rational(token: str) -> bool:
    try:
        to_rational(token)
    except InputError:
        return False
    return True


def parse_combination(text: str) -> List[Tuple[Fraction, str]]:
    """
    一次結合 "2 a*b - 1/2 c + 1" を (係数, 名前) のリストにする。

    係数だけの項は名前 "1"（単位元・定数項）になる。"0" は空の和。
    """
    tokens = text.split()
    if tokens == ["0"]:
        return []
    terms: List[Tuple[Fraction, str]] = []
    sign = 1
    current: List[str] = []

    def flush():
        if not current:
            raise InputError(f"一次結合の項が空です: {text!r}")
        if len(current) == 1:
            tok = current[0]
            if _is_rational(tok):
                terms.append((sign * to_rational(tok), "1"))
            elif tok.startswith("-"):
                terms.append((Fraction(-sign), tok[1:]))
            else:
                terms.append((Fraction(sign), tok))
        elif len(current) == 2:
            terms.append((sign * to_rational(current[0]), current[1]))
        else:
            raise InputError(f"一次結合の項の書式が不正です: {' '.join(current)!r}")

    for tok in tokens:
        if tok in ("+", "-"):
            if current:
                flush()
                current = []
            elif terms:
                raise InputError(f"演算子が連続しています: {text!r}")
            sign = -1 if tok == "-" else 1
            continue
        current.append(tok)
    flush()
    return terms


def _combination_dict(text: str) -> Dict[str, Fraction]:
    out: Dict[str, Fraction] = {}
    for c, name in parse_combination(text):
        out[name] = out.get(name, Fraction(0)) + c
    return out


def parse_laurent(text: str, variables: Sequence[str]) -> LaurentPoly:
    """"t1*t2^-1 - 1" をローラン多項式にする"""
    terms: Dict[Tuple[int, ...], Fraction] = {}
    for c, mono in parse_combination(text):
        exp = parse_monomial(mono, variables)
        terms[exp] = terms.get(exp, Fraction(0)) + c
    return LaurentPoly(variables, terms)


# ---------------------------------------------------------------------------
# 各種オブジェクトの組み立て
# ---------------------------------------------------------------------------

def _graded_basis(sec: Section, default_unit: bool) -> List[List[str]]:
    degrees: Dict[int, List[str]] = {}
    for e in sec.entries:
        m = re.match(r"^degree(\d+)$", e.key)
        if m:
            degrees[int(m.group(1))] = _names(e.value)
    if default_unit:
        degrees.setdefault(0, ["1"])
    top = max(degrees) if degrees else -1
    return [degrees.get(k, []) for k in range(top + 1)]


def _degree_keys(sec: Section) -> List[str]:
    return sorted({e.key for e in sec.entries if re.match(r"^degree\d+$", e.key)})


def _build_algebra(sec: Section, ws: "Workspace") -> GradedAlgebra:
    if sec.all("generators"):
        sec.check_keys(["generators", "d"])
        gens = _names(sec.one("generators").value)
        diff = {}
        for e in sec.all("d"):
            with _located(e, sec.source):
                if len(e.args) != 1:
                    raise InputError("`d 生成元 = 一次結合` の形で書いてください")
                diff[e.args[0]] = _combination_dict(e.value)
        return exterior_algebra(gens, diff)

    sec.check_keys(_degree_keys(sec) + ["product", "d"])
    basis = _graded_basis(sec, default_unit=True)
    products = {}
    diff = {}
    for e in sec.entries:
        with _located(e, sec.source):
            if e.key == "product":
                if len(e.args) != 2:
                    raise InputError("`product a b = 一次結合` の形で書いてください")
                products[(e.args[0], e.args[1])] = _combination_dict(e.value)
            elif e.key == "d":
                if len(e.args) != 1:
                    raise InputError("`d a = 一次結合` の形で書いてください")
                diff[e.args[0]] = _combination_dict(e.value)
    return GradedAlgebra(basis, products, diff)


def _build_module(sec: Section, ws: "Workspace") -> DGModule:
    sec.check_keys(_degree_keys(sec) + ["algebra", "action", "d"])
    A = ws.lookup("algebra", sec.one("algebra").value.strip(), sec.one("algebra"), sec.source)
    basis = _graded_basis(sec, default_unit=False)
    action = {}
    diff = {}
    for e in sec.entries:
        with _located(e, sec.source):
            if e.key == "action":
                if len(e.args) != 2:
                    raise InputError("`action 代数の基底 加群の基底 = 一次結合` の形で書いてください")
                action[(e.args[0], e.args[1])] = _combination_dict(e.value)
            elif e.key == "d":
                if len(e.args) != 1:
                    raise InputError("`d m = 一次結合` の形で書いてください")
                diff[e.args[0]] = _combination_dict(e.value)
    return DGModule(A, basis, action, diff)


def _build_complex(sec: Section, ws: "Workspace") -> LaurentComplex:
    sec.check_keys(["n", "ranks", "variables", "d"])
    entry = sec.one("n")
    with _located(entry, sec.source):
        n = _integer(entry.value)
    entry = sec.one("ranks")
    with _located(entry, sec.source):
        ranks = _integers(entry.value)
    var_entry = sec.one("variables", required=False)
    variables = _names(var_entry.value) if var_entry else torus_variables(n)

    terms: Dict[int, Dict[Tuple[int, int], Dict]] = {}
    for e in sec.all("d"):
        with _located(e, sec.source):
            if len(e.args) != 1:
                raise InputError("`d 次数 = 行 列 単項式 係数, ...` の形で書いてください")
            i = _integer(e.args[0])
            if not 1 <= i < len(ranks):
                raise InputError(f"境界写像の次数 {i} が範囲外です（1..{len(ranks) - 1}）")
            for chunk in e.value.split(","):
                if not chunk.strip():
                    continue
                parts = chunk.split()
                if len(parts) != 4:
                    raise InputError(f"項は `行 列 単項式 係数` の 4 つ組です: {chunk.strip()!r}")
                r, c = _integer(parts[0]), _integer(parts[1])
                if not (0 <= r < ranks[i - 1] and 0 <= c < ranks[i]):
                    raise InputError(f"成分 ({r}, {c}) が ∂{i} の形状 ({ranks[i - 1]}, {ranks[i]}) の外です")
                exp = parse_monomial(parts[2], variables)
                cell = terms.setdefault(i, {}).setdefault((r, c), {})
                cell[exp] = cell.get(exp, Fraction(0)) + to_rational(parts[3])

    boundaries = {}
    for i, cells in terms.items():
        rows = [[LaurentPoly(variables, cells.get((r, c), {})) for c in range(ranks[i])]
                for r in range(ranks[i - 1])]
        boundaries[i] = object_matrix(rows, ncols=ranks[i])
    return LaurentComplex(n, ranks, boundaries, variables)


def _build_presentation(sec: Section, ws: "Workspace") -> LaurentComplex:
    sec.check_keys(["generators", "relator", "abelianization"])
    gens = _names(sec.one("generators").value)
    relators = []
    for e in sec.all("relator"):
        relators.append(e.value.split())
    ab_entry = sec.one("abelianization", required=False)
    abelianization = None
    if ab_entry is not None:
        with _located(ab_entry, sec.source):
            abelianization = _rows(ab_entry.value, _integers)
    P = Presentation(gens, relators, abelianization)
    ws.presentations[sec.name] = P
    return presentation_to_complex(P)


def _build_torus(sec: Section, ws: "Workspace") -> TranslatedSubtorus:
    sec.check_keys(["n", "lattice", "annihilator", "translate"])
    n = _integer(sec.one("n").value)
    lat = sec.one("lattice", required=False)
    ann = sec.one("annihilator", required=False)
    if (lat is None) == (ann is None):
        raise InputError("lattice と annihilator のどちらか一方を指定してください",
                         sec.line, None, sec.source)
    with _located(lat or ann, sec.source):
        rows = _rows((lat or ann).value, _integers)
        if ann is not None:
            rows = lattice_kernel(rows, n)
    translate = None
    tr = sec.one("translate", required=False)
    if tr is not None:
        with _located(tr, sec.source):
            translate = _rationals(tr.value)
    return TranslatedSubtorus(Subtorus(n, rows), translate)


def _build_affine(sec: Section, ws: "Workspace") -> AffineSubspaceQ:
    sec.check_keys(["n", "base", "directions"])
    n = _integer(sec.one("n").value)
    base = sec.one("base")
    with _located(base, sec.source):
        base_vec = _rationals(base.value)
    dirs = sec.one("directions", required=False)
    directions = []
    if dirs is not None:
        with _located(dirs, sec.source):
            directions = _rows(dirs.value)
    return AffineSubspaceQ(n, base_vec, directions)


def _build_subspace(sec: Section, ws: "Workspace") -> LinearSubspaceQ:
    sec.check_keys(["m", "basis", "equations"])
    m = _integer(sec.one("m").value)
    basis = sec.one("basis", required=False)
    eqs = sec.one("equations", required=False)
    if basis is not None and eqs is not None:
        raise InputError("basis と equations は同時に指定できません", sec.line, None, sec.source)
    if eqs is not None:
        with _located(eqs, sec.source):
            return LinearSubspaceQ.from_equations(m, _rows(eqs.value))
    if basis is not None:
        with _located(basis, sec.source):
            return LinearSubspaceQ(m, _rows(basis.value))
    return LinearSubspaceQ(m, [])


def _build_zeroset(sec: Section, ws: "Workspace") -> LaurentZeroSet:
    sec.check_keys(["variables", "generator"])
    variables = _names(sec.one("variables").value)
    gens = []
    for e in sec.all("generator"):
        with _located(e, sec.source):
            gens.append(parse_laurent(e.value, variables))
    return LaurentZeroSet(gens)


def _build_hodge(sec: Section, ws: "Workspace") -> OneHodgeStructure:
    sec.check_keys(["rank", "W", "F"])
    rank = _integer(sec.one("rank").value)
    W = sec.one("W", required=False)
    F = sec.one("F", required=False)
    with _located(W or F or sec.one("rank"), sec.source):
        return OneHodgeStructure(rank, _rows(W.value) if W else [],
                                 _rows(F.value, _gaussians) if F else [])


def _build_bdr(sec: Section, ws: "Workspace") -> Tuple[str, BdrCertificate]:
    sec.check_keys(["hodge", "piece", "witness", "witness_W", "witness_F"])
    hodge_entry = sec.one("hodge")
    hodge_name = hodge_entry.value.strip()
    H = ws.lookup("hodge", hodge_name, hodge_entry, sec.source)
    overrides: Dict[str, Dict[str, Entry]] = {}
    for e in sec.entries:
        if e.key.startswith("witness"):
            if len(e.args) != 1:
                raise InputError(f"`{e.key} 部分トーラス名 = ...` の形で書いてください",
                                 e.line, e.column, sec.source)
            overrides.setdefault(e.args[0], {})[e.key] = e
    pieces = []
    for e in sec.all("piece"):
        name = e.value.strip()
        T = ws.lookup("torus", name, e, sec.source)
        given = overrides.pop(name, {})
        witness = None
        if "witness" in given:
            w = given["witness"]
            with _located(w, sec.source):
                rows = int_matrix(_rows(w.value, _integers))
                W_rows = intersect_spaces(H.W_basis, rows, H.rank) if rows else []
                F_rows = intersect_spaces(H.F_basis, rows, H.rank) if rows else []
                if "witness_W" in given:
                    W_rows = _rows(given["witness_W"].value)
                if "witness_F" in given:
                    F_rows = _rows(given["witness_F"].value, _gaussians)
            witness = SubHSWitness(rows, W_rows, F_rows)
        elif given:
            e2 = next(iter(given.values()))
            raise InputError("witness_W / witness_F には witness が必要です", e2.line, e2.column, sec.source)
        pieces.append((T, witness))
    for name, given in overrides.items():
        e2 = next(iter(given.values()))
        raise InputError(f"証人が参照する部分トーラス {name!r} は piece にありません",
                         e2.line, e2.column, sec.source)
    return hodge_name, BdrCertificate(pieces)


BUILDERS = {
    "algebra": _build_algebra,
    "module": _build_module,
    "complex": _build_complex,
    "presentation": _build_presentation,
    "torus": _build_torus,
    "affine": _build_affine,
    "subspace": _build_subspace,
    "zeroset": _build_zeroset,
    "hodge": _build_hodge,
    "bdr": _build_bdr,
}


def _check_object(kind: str, obj) -> Dict:
    """種類ごとの検証（構成時に検査済みの種類は常に valid）"""
    if kind == "algebra":
        return validate_cdga(obj)
    if kind == "module":
        return validate_module(obj)
    if kind in ("complex", "presentation"):
        return validate_complex(obj)
    if kind == "hodge":
        return validate_1hs(obj)
    return {"valid": True, "failures": []}


# ---------------------------------------------------------------------------
# ワークスペース
# ---------------------------------------------------------------------------

class Workspace:
    """
    名前付きオブジェクトの集まり。

    Attributes:
        objects: 名前空間 → 名前 → オブジェクト
        presentations: 群の表示（鎖複体と同じ名前で参照）
        reports: (種類, 名前) → 検証レポート
        cache_dir: 階数キャッシュのディレクトリ（CLI が設定）
    """

    def __init__(self):
        self.objects: Dict[str, Dict[str, object]] = {NAMESPACE[k]: {} for k in KINDS}
        self.presentations: Dict[str, Presentation] = {}
        self.reports: Dict[Tuple[str, str], Dict] = {}
        self.cache_dir: Optional[str] = None

    def get(self, kind: str, name: str):
        table = self.objects[NAMESPACE[kind]]
        if name not in table:
            known = ", ".join(sorted(table)) or "なし"
            raise InputError(f"未定義の{LABEL[kind]} {name!r}（定義済み: {known}）")
        return table[name]

    def lookup(self, kind: str, name: str, entry: Entry, source: str):
        """節の中の参照を解決する（失敗は参照行の位置付きエラー）"""
        try:
            return self.get(kind, name)
        except InputError as e:
            raise e.located(entry.line, entry.column, source) from None

    def names(self) -> Dict[str, List[str]]:
        return {ns: sorted(table) for ns, table in self.objects.items() if table}

    def is_empty(self) -> bool:
        return not any(self.objects.values())

    def to_dict(self) -> Dict:
        return {
            "objects": self.names(),
            "validation": [
                {"kind": kind, "name": name, "valid": report["valid"],
                 "failures": report["failures"]}
                for (kind, name), report in sorted(self.reports.items())
            ],
        }


def _strict_failure(kind: str, report: Dict) -> bool:
    """厳密読み込みで拒否する検証結果か（ホッジ構造は入力エラーのみ拒否）"""
    if kind == "hodge":
        return report.get("input_error", False)
    return not report["valid"]


def parse_workspace(paths: Sequence[str], strict: bool = True) -> Workspace:
    """
    ワークスペースファイル群を読み込み、検証済みの Workspace を返す。

    Args:
        paths: UTF-8 のファイルパス（複数可、名前は全ファイルを通じて一意）
        strict: True なら検証に失敗したオブジェクトで InputError を投げる。
                False なら検証結果を Workspace.reports に残して続ける

    Returns:
        Workspace

    Raises:
        InputError: 構文エラー（行・列付き）、名前の重複・未解決の参照、検証失敗
    """
    sections: List[Section] = []
    for path in paths:
        try:
            text = Path(path).read_text(encoding="utf-8")
        except FileNotFoundError:
            raise InputError(f"ファイルが見つかりません: {path}")
        except UnicodeDecodeError:
            raise InputError(f"UTF-8 として読めません: {path}")
        sections.extend(parse_text(text, str(path)))

    seen: Dict[Tuple[str, str], Section] = {}
    for sec in sections:
        key = (NAMESPACE[sec.kind], sec.name)
        if key in seen:
            first = seen[key]
            raise InputError(
                f"名前の重複: {LABEL[sec.kind]} {sec.name!r} は {first.source} の {first.line}行目で定義済みです",
                sec.line, None, sec.source)
        seen[key] = sec

    ws = Workspace()
    for kind in BUILD_ORDER:
        for sec in (s for s in sections if s.kind == kind):
            try:
                obj = BUILDERS[kind](sec, ws)
            except InputError as e:
                raise e.located(sec.line, None, sec.source) from None
            checked = obj[1] if kind == "bdr" else obj
            report = _check_object(kind, checked)
            ws.reports[(kind, sec.name)] = report
            if strict and _strict_failure(kind, report):
                axioms = sorted({str(f.get("axiom", "d∘d = 0")) for f in report["failures"]})
                raise InputError(
                    f"{LABEL[kind]} {sec.name} が検証に失敗しました（{', '.join(axioms)}）",
                    sec.line, None, sec.source)
            ws.objects[NAMESPACE[kind]][sec.name] = obj
    return ws
