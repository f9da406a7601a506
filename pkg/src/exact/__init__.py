# 厳密演算の基盤（有理数・円分体・多項式・整数行列）
