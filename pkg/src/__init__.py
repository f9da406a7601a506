# コホモロジー跳躍軌跡の厳密計算
