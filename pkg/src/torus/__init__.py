# 部分トーラスと指数写像の像
