# コマンドライン（ワークスペース・レポート・キャッシュ）
