"""
入力エラー

ワークスペースの構文エラー・意味エラー、および型不変条件の違反を表す。
数学的な判定結果（検証失敗など）は例外にせず、レポート辞書で返す。
"""

from typing import Optional


class InputError(ValueError):
    """入力エラー（CLI の終了コード 2 に対応）

    Args:
        message: 日本語のエラーメッセージ
        line: 構文エラーの行番号（1始まり）
        column: 構文エラーの列番号（1始まり）
        source: 入力ファイルのパス
    """

    def __init__(self, message: str, line: Optional[int] = None,
                 column: Optional[int] = None, source: Optional[str] = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        if line is not None:
            loc = f"{line}行目" if column is None else f"{line}行目 {column}列"
            if source:
                loc = f"{source}: {loc}"
            message = f"{loc}: {message}"
        super().__init__(message)

    def located(self, line: int, column: Optional[int] = None,
                source: Optional[str] = None) -> "InputError":
        """位置情報を持たないエラーに位置を付けた複製を返す"""
        if self.line is not None:
            return self
        return InputError(self.message, line, column, source)
