# テスト
