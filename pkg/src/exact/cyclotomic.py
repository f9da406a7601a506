"""
円分体 Q(ζ_N) の厳密演算

元は冪基底 {ζ_N^j : 0 <= j < φ(N)} に関する有理数係数ベクトルで表し、
演算のたびに N 次円分多項式 Φ_N で割った余りに正規化する。
したがって零判定は係数ごとの比較だけで済む。

異なる位数の元どうしの演算は、位数の最小公倍数へ持ち上げてから行う
（Q(ζ_M) ⊂ Q(ζ_N), M | N の埋め込み ζ_M = ζ_N^{N/M}）。
"""

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from typing import List, Sequence, Tuple, Union

import numpy as np
from sympy import Poly, QQ, Rational, Symbol, cyclotomic_poly, totient

from src.exact.errors import InputError


Scalar = Union[int, Fraction, "Cyclotomic"]

_X = Symbol("x")


# ---------------------------------------------------------------------------
# 有理数への変換
# ---------------------------------------------------------------------------

def to_rational(value) -> Fraction:
    """int / Fraction / "p/q" 文字列を Fraction に変換する（float は拒否）"""
    if isinstance(value, bool):
        raise InputError(f"有理数ではありません: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except ValueError:
            raise InputError(f"有理数として解釈できません: {value!r}")
    raise InputError(f"厳密演算には有理数が必要です（浮動小数は不可）: {value!r}")


def _sympy_rational(c) -> Fraction:
    return Fraction(int(c.p), int(c.q))


# ---------------------------------------------------------------------------
# 円分多項式のキャッシュ
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _phi_coeffs(order: int) -> Tuple[int, ...]:
    """Φ_N の係数（低次から）"""
    poly = cyclotomic_poly(order, _X, polys=True)
    return tuple(int(c) for c in reversed(poly.all_coeffs()))


@lru_cache(maxsize=None)
def _phi_poly(order: int) -> Poly:
    return Poly(cyclotomic_poly(order, _X), _X, domain=QQ)


@lru_cache(maxsize=None)
def degree(order: int) -> int:
    """φ(N)"""
    return int(totient(order))


@lru_cache(maxsize=4096)
def _inverse_coeffs(order: int, coeffs: Tuple[Fraction, ...]) -> Tuple[Fraction, ...]:
    """Q[x]/Φ_N での逆元（係数は低次から）"""
    f = Poly([Rational(c.numerator, c.denominator) for c in reversed(coeffs)], _X, domain=QQ)
    inv = f.invert(_phi_poly(order))
    return tuple(_sympy_rational(c) for c in reversed(inv.all_coeffs()))


def _reduce(order: int, raw: Sequence[Fraction]) -> Tuple[Fraction, ...]:
    """ζ^N = 1 で指数を畳み込み、Φ_N で割った余りを返す"""
    folded = [Fraction(0)] * order
    for j, c in enumerate(raw):
        if c:
            folded[j % order] += c
    phi = _phi_coeffs(order)
    deg = len(phi) - 1
    # Φ_N はモニック
    for j in range(order - 1, deg - 1, -1):
        c = folded[j]
        if c:
            shift = j - deg
            for t, p in enumerate(phi):
                if p:
                    folded[shift + t] -= c * p
    return tuple(folded[:deg])


# ---------------------------------------------------------------------------
# 円分体の元
# ---------------------------------------------------------------------------

class Cyclotomic:
    """Q(ζ_N) の元（不変値）

    Args:
        order: 位数 N
        coeffs: ζ_N^j の係数（長さ任意、正規化される）
    """

    __slots__ = ("order", "coeffs")
    __hash__ = None

    def __init__(self, order: int, coeffs: Sequence = ()):
        if order < 1:
            raise InputError(f"円分体の位数は正の整数: {order}")
        object.__setattr__(self, "order", int(order))
        object.__setattr__(
            self, "coeffs", _reduce(self.order, [to_rational(c) for c in coeffs]))

    def __setattr__(self, name, value):
        raise AttributeError("Cyclotomic は不変です")

    # --- 構成 ---

    @classmethod
    def root(cls, order: int, k: int = 1) -> "Cyclotomic":
        """ζ_N^k"""
        raw = [Fraction(0)] * order
        raw[k % order] = Fraction(1)
        return cls(order, raw)

    @classmethod
    def rational(cls, value, order: int = 1) -> "Cyclotomic":
        return cls(order, [to_rational(value)])

    @classmethod
    def gaussian(cls, re, im) -> "Cyclotomic":
        """Q(i) の元 re + im·i（i = ζ_4）"""
        return cls(4, [to_rational(re), to_rational(im)])

    # --- 基本情報 ---

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def is_rational(self) -> bool:
        return not any(self.coeffs[1:])

    def rational_value(self) -> Fraction:
        if not self.is_rational():
            raise ValueError(f"有理数ではありません: {self}")
        return self.coeffs[0] if self.coeffs else Fraction(0)

    def lift(self, order: int) -> "Cyclotomic":
        """位数 order（self.order の倍数）へ持ち上げる"""
        if order == self.order:
            return self
        if order % self.order:
            raise ValueError(f"位数 {self.order} は {order} を割り切りません")
        step = order // self.order
        raw = [Fraction(0)] * (step * len(self.coeffs) or 1)
        for j, c in enumerate(self.coeffs):
            raw[j * step] = c
        return Cyclotomic(order, raw)

    def to_complex(self) -> complex:
        if not self.coeffs:
            return 0j
        powers = np.exp(2j * np.pi * np.arange(len(self.coeffs)) / self.order)
        weights = np.array([float(c) for c in self.coeffs])
        return complex(np.dot(weights, powers))

    def conjugate(self) -> "Cyclotomic":
        """複素共役（ζ^j → ζ^{N-j}）"""
        raw = [Fraction(0)] * self.order
        for j, c in enumerate(self.coeffs):
            raw[(-j) % self.order] += c
        return Cyclotomic(self.order, raw)

    def inverse(self) -> "Cyclotomic":
        if self.is_zero():
            raise ZeroDivisionError("円分体の 0 の逆元")
        if self.is_rational():
            return Cyclotomic(self.order, [1 / self.coeffs[0]])
        return Cyclotomic(self.order, _inverse_coeffs(self.order, self.coeffs))

    # --- 算術 ---

    @staticmethod
    def _coerce(a: Scalar, b: Scalar) -> Tuple["Cyclotomic", "Cyclotomic"]:
        if not isinstance(a, Cyclotomic):
            a = Cyclotomic(b.order, [to_rational(a)])
        if not isinstance(b, Cyclotomic):
            b = Cyclotomic(a.order, [to_rational(b)])
        if a.order != b.order:
            n = a.order * b.order // math.gcd(a.order, b.order)
            a, b = a.lift(n), b.lift(n)
        return a, b

    def __add__(self, other):
        if not isinstance(other, (int, Fraction, Cyclotomic)):
            return NotImplemented
        a, b = self._coerce(self, other)
        return Cyclotomic(a.order, [x + y for x, y in zip(a.coeffs, b.coeffs)])

    __radd__ = __add__

    def __neg__(self):
        return Cyclotomic(self.order, [-c for c in self.coeffs])

    def __sub__(self, other):
        if not isinstance(other, (int, Fraction, Cyclotomic)):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c * other for c in self.coeffs])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        a, b = self._coerce(self, other)
        raw = [Fraction(0)] * (max(len(a.coeffs) + len(b.coeffs) - 1, 1))
        for i, x in enumerate(a.coeffs):
            if x:
                for j, y in enumerate(b.coeffs):
                    if y:
                        raw[i + j] += x * y
        return Cyclotomic(a.order, raw)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return Cyclotomic(self.order, [c / other for c in self.coeffs])
        if not isinstance(other, Cyclotomic):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = Cyclotomic(self.order, [1])
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __eq__(self, other):
        if not isinstance(other, (int, Fraction, Cyclotomic)):
            return NotImplemented
        a, b = self._coerce(self, other)
        return a.coeffs == b.coeffs

    def __bool__(self):
        return not self.is_zero()

    # --- 表示 ---

    def __str__(self) -> str:
        parts: List[str] = []
        for j, c in enumerate(self.coeffs):
            if not c:
                continue
            if j == 0:
                parts.append(str(c))
            else:
                mono = f"z{self.order}" if j == 1 else f"z{self.order}^{j}"
                parts.append(mono if c == 1 else f"-{mono}" if c == -1 else f"{c}*{mono}")
        if not parts:
            return "0"
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"Cyclotomic({self.order}, {self})"


# ---------------------------------------------------------------------------
# 指標の評価
# ---------------------------------------------------------------------------

def common_order(q: Sequence[Fraction]) -> int:
    """有理数ベクトルの分母の最小公倍数"""
    n = 1
    for x in q:
        d = to_rational(x).denominator
        n = n * d // math.gcd(n, d)
    return n


def cyclotomic_eval(q: Sequence, a: Sequence[int]) -> Cyclotomic:
    """
    指標 exp(q) を単項式 z^a で評価する。

    Args:
        q: 有理数ベクトル（mod 1 で意味を持つ）
        a: 整数指数ベクトル

    Returns:
        ζ_N^{N·(a·q)}（N は q の分母の最小公倍数）
    """
    if len(q) != len(a):
        raise InputError(f"長さが一致しません: {len(q)} != {len(a)}")
    qs = [to_rational(x) for x in q]
    order = common_order(qs)
    s = sum((int(ai) * qi for ai, qi in zip(a, qs)), Fraction(0))
    k = int(s * order) % order
    return Cyclotomic.root(order, k)


def exp_2pi_i(q) -> complex:
    """e^{2πi q} の数値"""
    return cmath.exp(2j * cmath.pi * float(q))
