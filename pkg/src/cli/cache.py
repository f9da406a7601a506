"""
有理関数体上の階数のキャッシュ

鍵（行列の正準文字列と問い合わせの種類）の SHA-256 をファイル名とした
JSON ファイルに保存する。書き込みは一時ファイルからの os.replace なので、
読み手が書きかけのファイルを見ることはない。
"""

import hashlib
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import Optional


CACHE_ENV = "JUMPLOCI_CACHE"


class RankCache:
    """
    ディレクトリ上の階数キャッシュ（get / put）。

    Args:
        directory: 保存先（なければ作る）
    """

    def __init__(self, directory: str):
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self.hits = 0
        self.misses = 0

    @staticmethod
    def digest(key: str) -> str:
        return hashlib.sha256(key.encode("utf-8")).hexdigest()

    def _path(self, key: str) -> Path:
        return self.directory / f"{self.digest(key)}.json"

    def get(self, key: str) -> Optional[int]:
        path = self._path(key)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            self.misses += 1
            return None
        except (json.JSONDecodeError, UnicodeDecodeError):
            print(f"警告: 壊れたキャッシュファイルを無視します: {path}", file=sys.stderr)
            self.misses += 1
            return None
        # 鍵そのものも照合する
        if data.get("key") != key:
            self.misses += 1
            return None
        self.hits += 1
        return int(data["value"])

    def put(self, key: str, value: int) -> None:
        path = self._path(key)
        fd, tmp = tempfile.mkstemp(dir=self.directory, prefix=".tmp-", suffix=".json")
        try:
            with os.fdopen(fd, "w", encoding="utf-8") as f:
                json.dump({"key": key, "value": int(value)}, f, ensure_ascii=False)
            os.replace(tmp, path)
        except OSError:
            if os.path.exists(tmp):
                os.remove(tmp)
            raise

    def stats(self) -> dict:
        return {"directory": str(self.directory), "hits": self.hits, "misses": self.misses}


def resolve_cache_dir(cli_value: Optional[str]) -> Optional[str]:
    """環境変数 JUMPLOCI_CACHE が --cache-dir より優先される。どちらもなければ None"""
    env = os.environ.get(CACHE_ENV)
    if env:
        return env
    return cli_value or None


def open_cache(cli_value: Optional[str]) -> Optional[RankCache]:
    directory = resolve_cache_dir(cli_value)
    return RankCache(directory) if directory else None
