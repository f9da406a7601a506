"""
疎な多変数多項式・ローラン多項式

項は「指数ベクトル（タプル）→ 係数」の辞書で保持する。係数体は
Fraction（Q）または Cyclotomic（Q(ζ_N)）で、零係数は保持しない。
表示は次数付き辞書式順序（grlex）の降順で、実行ごとに同一の文字列になる。

ローラン多項式は指数に負を許す点だけが異なり、部分トーラスの単項式
パラメータ表示（z_j = ζ^{N v0_j} Π s_k^{(c_k)_j}）を代入できる。
"""

import re
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

from src.exact.cyclotomic import Cyclotomic, cyclotomic_eval, to_rational
from src.exact.errors import InputError


Exponent = Tuple[int, ...]
Coeff = Union[Fraction, Cyclotomic]


def _coeff(value) -> Coeff:
    if isinstance(value, Cyclotomic):
        return value
    return to_rational(value)


def _grlex_key(exp: Exponent):
    return (sum(exp), exp)


# ---------------------------------------------------------------------------
# 多変数多項式
# ---------------------------------------------------------------------------

class MultiPoly:
    """非負指数の疎多変数多項式

    Args:
        variables: 変数名の列
        terms: 指数タプル → 係数 の辞書
    """

    allow_negative = False
    __hash__ = None

    def __init__(self, variables: Sequence[str], terms: Optional[Dict] = None):
        self.variables: Tuple[str, ...] = tuple(variables)
        cleaned: Dict[Exponent, Coeff] = {}
        for exp, c in (terms or {}).items():
            exp = tuple(int(e) for e in exp)
            if len(exp) != len(self.variables):
                raise InputError(
                    f"指数ベクトルの長さ {len(exp)} が変数の数 {len(self.variables)} と異なります")
            if not self.allow_negative and any(e < 0 for e in exp):
                raise InputError(f"多項式に負の指数は使えません: {exp}")
            c = _coeff(c)
            if exp in cleaned:
                c = cleaned[exp] + c
            if c == 0:
                cleaned.pop(exp, None)
            else:
                cleaned[exp] = c
        self.terms: Dict[Exponent, Coeff] = cleaned

    # --- 構成 ---

    @classmethod
    def constant(cls, variables: Sequence[str], value) -> "MultiPoly":
        return cls(variables, {(0,) * len(variables): value})

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "MultiPoly":
        return cls(variables)

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "MultiPoly":
        if name not in variables:
            raise InputError(f"未知の変数: {name}")
        exp = tuple(1 if v == name else 0 for v in variables)
        return cls(variables, {exp: 1})

    @classmethod
    def monomial(cls, variables: Sequence[str], exp: Sequence[int],
                 coeff=1) -> "MultiPoly":
        return cls(variables, {tuple(exp): coeff})

    def _like(self, terms: Dict) -> "MultiPoly":
        return type(self)(self.variables, terms)

    # --- 情報 ---

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self.terms)

    def constant_value(self) -> Coeff:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        """全次数（零多項式は -1）"""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def leading_term(self) -> Tuple[Exponent, Coeff]:
        exp = max(self.terms, key=_grlex_key)
        return exp, self.terms[exp]

    def coefficient_orders(self) -> List[int]:
        return sorted({c.order for c in self.terms.values() if isinstance(c, Cyclotomic)})

    # --- 算術 ---

    def _check(self, other: "MultiPoly"):
        if other.variables != self.variables:
            raise InputError(
                f"変数リストが一致しません: {self.variables} と {other.variables}")

    def _lift(self, other):
        if isinstance(other, MultiPoly):
            self._check(other)
            return other
        return self._like({(0,) * len(self.variables): other})

    def __add__(self, other):
        other = self._lift(other)
        terms = dict(self.terms)
        for exp, c in other.terms.items():
            terms[exp] = terms[exp] + c if exp in terms else c
        return self._like(terms)

    __radd__ = __add__

    def __neg__(self):
        return self._like({e: -c for e, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, MultiPoly):
            c = _coeff(other)
            return self._like({e: v * c for e, v in self.terms.items()})
        self._check(other)
        out: Dict[Exponent, Coeff] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                c = c1 * c2
                out[e] = out[e] + c if e in out else c
        return self._like(out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise InputError("多項式の負冪は定義されません")
        result = self._like({(0,) * len(self.variables): 1})
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, MultiPoly):
            if isinstance(other, (int, Fraction, Cyclotomic)):
                other = self._like({(0,) * len(self.variables): other})
            else:
                return NotImplemented
        if other.variables != self.variables or set(self.terms) != set(other.terms):
            return False
        return all(self.terms[e] == other.terms[e] for e in self.terms)

    def __bool__(self):
        return bool(self.terms)

    def exquo(self, divisor: "MultiPoly") -> "MultiPoly":
        """
        厳密な多変数除算（割り切れない場合は ArithmeticError）。

        grlex の先頭項どうしを順に割っていく。割り切れるなら
        先頭単項式は常に整除されるので、余りが出た時点で不正と判定できる。
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("零多項式での除算")
        lead_e, lead_c = divisor.leading_term()
        remainder = self
        quotient: Dict[Exponent, Coeff] = {}
        while not remainder.is_zero():
            e, c = remainder.leading_term()
            diff = tuple(a - b for a, b in zip(e, lead_e))
            if any(d < 0 for d in diff):
                raise ArithmeticError(f"多項式が割り切れません: {self} / {divisor}")
            q = c / lead_c
            quotient[diff] = q
            remainder = remainder - divisor * self._like({diff: q})
        return self._like(quotient)

    # --- 代入 ---

    def evaluate(self, point: Sequence):
        """各変数に値（Fraction / Cyclotomic / MultiPoly）を代入する"""
        if len(point) != len(self.variables):
            raise InputError(
                f"代入点の長さ {len(point)} が変数の数 {len(self.variables)} と異なります")
        point = [Fraction(v) if isinstance(v, int) else v for v in point]
        total = Fraction(0)
        for exp, c in self.terms.items():
            term = c
            for v, e in zip(point, exp):
                if e:
                    term = term * (v ** e)
            total = term + total
        return total

    def evaluate_numeric(self, point: Sequence[complex]) -> complex:
        total = 0j
        for exp, c in self.terms.items():
            term = c.to_complex() if isinstance(c, Cyclotomic) else complex(float(c))
            for v, e in zip(point, exp):
                if e:
                    term *= complex(v) ** e
            total += term
        return total

    def compose(self, new_variables: Sequence[str], values: Sequence["MultiPoly"]) -> "MultiPoly":
        """変数を new_variables 上の多項式で置き換える"""
        result = self.evaluate(values)
        if isinstance(result, MultiPoly):
            return result
        return MultiPoly.constant(new_variables, result)

    # --- 表示 ---

    def _monomial_str(self, exp: Exponent) -> str:
        parts = []
        for v, e in zip(self.variables, exp):
            if e == 1:
                parts.append(v)
            elif e:
                parts.append(f"{v}^{e}")
        return "*".join(parts)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        out: List[Tuple[str, str]] = []
        for exp in sorted(self.terms, key=_grlex_key, reverse=True):
            c = self.terms[exp]
            mono = self._monomial_str(exp)
            if isinstance(c, Cyclotomic) and not c.is_rational():
                text = f"({c})" + (f"*{mono}" if mono else "")
                sign = "+"
            else:
                r = c.rational_value() if isinstance(c, Cyclotomic) else c
                sign = "-" if r < 0 else "+"
                r = abs(r)
                if not mono:
                    text = str(r)
                elif r == 1:
                    text = mono
                else:
                    text = f"{r}*{mono}"
            out.append((sign, text))
        first_sign, first = out[0]
        head = f"-{first}" if first_sign == "-" else first
        return head + "".join(f" {s} {t}" for s, t in out[1:])

    def __repr__(self) -> str:
        return f"{type(self).__name__}({', '.join(self.variables)}: {self})"


# ---------------------------------------------------------------------------
# ローラン多項式
# ---------------------------------------------------------------------------

class LaurentPoly(MultiPoly):
    """負の指数を許す疎多変数多項式"""

    allow_negative = True

    def __pow__(self, k: int):
        if k >= 0:
            return MultiPoly.__pow__(self, k)
        if len(self.terms) != 1:
            raise InputError("単項式以外のローラン多項式の負冪は定義されません")
        (exp, c), = self.terms.items()
        return self._like({tuple(-e for e in exp): 1 / c}) ** (-k)

    def min_exponents(self) -> Exponent:
        if not self.terms:
            return (0,) * len(self.variables)
        return tuple(min(e[j] for e in self.terms) for j in range(len(self.variables)))

    def shift(self, offset: Sequence[int]) -> "LaurentPoly":
        """単項式 t^offset を掛ける"""
        return self._like({tuple(a + b for a, b in zip(e, offset)): c
                           for e, c in self.terms.items()})

    def exquo(self, divisor: "MultiPoly") -> "LaurentPoly":
        """
        ローラン多項式環での厳密な除算（割り切れない場合は ArithmeticError）。

        両方を単項式倍して各変数の最小指数を 0 にそろえ、多項式として割る。
        そろえた除数はどの変数でも割り切れないので、商も多項式になる。
        """
        self._check(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("零多項式での除算")
        if self.is_zero():
            return self._like({})
        divisor = LaurentPoly(divisor.variables, divisor.terms)
        low, low_div = self.min_exponents(), divisor.min_exponents()
        num = self.shift([-e for e in low]).to_multipoly()
        den = divisor.shift([-e for e in low_div]).to_multipoly()
        try:
            q = num.exquo(den)
        except ArithmeticError:
            raise ArithmeticError(f"ローラン多項式が割り切れません: {self} / {divisor}") from None
        return LaurentPoly(self.variables, q.terms).shift([a - b for a, b in zip(low, low_div)])

    def to_multipoly(self) -> MultiPoly:
        """負指数がないことを確認して MultiPoly に変換する"""
        return MultiPoly(self.variables, self.terms)

    def substitute_torus(self, translate: Sequence, lattice_rows: Sequence[Sequence[int]],
                         new_variables: Sequence[str]) -> "LaurentPoly":
        """
        並進部分トーラスの単項式パラメータ表示を代入する。

        z^a は s^{(a·c_1, ..., a·c_d)} と係数 ζ_N^{N(a·v0)} に写る。

        Args:
            translate: 並進ベクトル v0（有理数）
            lattice_rows: 方向格子の基底 c_1..c_d
            new_variables: パラメータ s_1..s_d の名前

        Returns:
            s についてのローラン多項式（係数は Q(ζ_N)）
        """
        if len(translate) != len(self.variables):
            raise InputError("並進ベクトルの長さが変数の数と異なります")
        out: Dict[Exponent, Coeff] = {}
        for exp, c in self.terms.items():
            e = tuple(sum(a * int(r) for a, r in zip(exp, row)) for row in lattice_rows)
            value = c * cyclotomic_eval(translate, exp)
            out[e] = out[e] + value if e in out else value
        return LaurentPoly(new_variables, out)

    def evaluate_torsion(self, q: Sequence):
        """ねじれ指標 exp(q) での値（負冪も逆元計算なしで求まる）"""
        total = Fraction(0)
        for exp, c in self.terms.items():
            total = c * cyclotomic_eval(q, exp) + total
        return total


# ---------------------------------------------------------------------------
# 単項式の構文
# ---------------------------------------------------------------------------

_FACTOR_RE = re.compile(r"^([A-Za-z_][A-Za-z0-9_]*)(?:\^(-?\d+))?$")


def parse_monomial(text: str, variables: Sequence[str],
                   allow_negative: bool = True) -> Exponent:
    """
    単項式 "t1^2*t2^-1" / "1" を指数タプルに変換する。

    Raises:
        InputError: 未知の変数・不正な書式
    """
    text = text.strip()
    exp = [0] * len(variables)
    if text == "1":
        return tuple(exp)
    for factor in text.split("*"):
        m = _FACTOR_RE.match(factor.strip())
        if not m:
            raise InputError(f"単項式の書式が不正です: {text!r}")
        name, power = m.group(1), int(m.group(2) or 1)
        if name not in variables:
            raise InputError(f"未知の変数 {name!r}（宣言: {', '.join(variables)}）")
        exp[list(variables).index(name)] += power
    if not allow_negative and any(e < 0 for e in exp):
        raise InputError(f"負の指数は使えません: {text!r}")
    return tuple(exp)
