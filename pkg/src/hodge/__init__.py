# 1-ホッジ構造
