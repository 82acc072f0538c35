"""Independent brute-force oracle for the ranking-gain metric.

Kept deliberately separate from the library implementation: explicit sort
with the same tie rule (candidate descending, index ascending) and a direct
evaluation of the gain formula with math.log2. Used to freeze expected
values and to cross-check the kernels exhaustively.
"""

from __future__ import annotations

import math
from typing import Sequence


def oracle_ndcg(reference: Sequence[float], candidate: Sequence[float]) -> float:
    n = len(reference)
    assert len(candidate) == n and n >= 1
    assert all(r >= 0 for r in reference)
    assert any(r > 0 for r in reference)
    order = sorted(range(n), key=lambda j: (-candidate[j], j))
    ideal = sorted(range(n), key=lambda j: (-reference[j], j))
    dcg = sum(reference[order[i]] / math.log2(i + 2) for i in range(n))
    idcg = sum(reference[ideal[i]] / math.log2(i + 2) for i in range(n))
    return dcg / idcg
