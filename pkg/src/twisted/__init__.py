# ねじれ鎖複体と特性多様体
