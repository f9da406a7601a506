# 微分次数付き代数とレゾナンス多様体
