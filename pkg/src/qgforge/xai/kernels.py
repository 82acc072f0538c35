"""Numeric kernels for explanation scoring, with two interchangeable backends.

The hot loops (ranking-gain evaluation over permutation batches, logistic
training) carry numba ``@njit`` compilation. A pure-numpy path is always
available; select it with ``QGFORGE_KERNELS=numpy`` (default is numba when
importable). ``benchmarks/bench_kernels.py`` compares the two.

Both backends rank with a stable sort, so tie handling (equal candidate
values resolve by ascending feature index) is identical everywhere.
"""

from __future__ import annotations

import os

import numpy as np

ENV_FLAG = "QGFORGE_KERNELS"


# ---------------------------------------------------------------------------
# numpy backend
# ---------------------------------------------------------------------------

def ndcg_numpy(reference: np.ndarray, candidate: np.ndarray) -> float:
    """DCG of the candidate-induced ranking over IDCG of the ideal ranking."""
    n = reference.shape[0]
    discounts = 1.0 / np.log2(np.arange(2, n + 2, dtype=np.float64))
    order = np.argsort(-candidate, kind="stable")
    ideal = np.argsort(-reference, kind="stable")
    dcg = float(reference[order] @ discounts)
    idcg = float(reference[ideal] @ discounts)
    return dcg / idcg


def ndcg_many_numpy(reference: np.ndarray, candidates: np.ndarray) -> np.ndarray:
    """Row-wise ndcg of many candidates against one reference."""
    n = reference.shape[0]
    discounts = 1.0 / np.log2(np.arange(2, n + 2, dtype=np.float64))
    orders = np.argsort(-candidates, axis=1, kind="stable")
    dcg = reference[orders] @ discounts
    ideal = np.argsort(-reference, kind="stable")
    idcg = float(reference[ideal] @ discounts)
    return dcg / idcg


def logistic_fit_numpy(
    x: np.ndarray, y: np.ndarray, learning_rate: float, iterations: int
) -> tuple[np.ndarray, float]:
    """Plain gradient descent on the logistic loss; weights start at zero."""
    n, d = x.shape
    weights = np.zeros(d, dtype=np.float64)
    bias = 0.0
    for _ in range(iterations):
        z = x @ weights + bias
        p = 1.0 / (1.0 + np.exp(-z))
        err = p - y
        grad = (err @ x) / n
        weights = weights - learning_rate * grad
        bias = bias - learning_rate * float(np.mean(err))
    return weights, bias


# ---------------------------------------------------------------------------
# numba backend
# ---------------------------------------------------------------------------

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    njit = None
    _HAVE_NUMBA = False


if _HAVE_NUMBA:

    @njit(cache=True)
    def _ndcg_numba(reference, candidate):
        n = reference.shape[0]
        order = np.argsort(-candidate, kind="mergesort")
        ideal = np.argsort(-reference, kind="mergesort")
        dcg = 0.0
        idcg = 0.0
        for i in range(n):
            discount = 1.0 / np.log2(i + 2.0)
            dcg += reference[order[i]] * discount
            idcg += reference[ideal[i]] * discount
        return dcg / idcg

    @njit(cache=True)
    def _ndcg_many_numba(reference, candidates):
        m = candidates.shape[0]
        n = reference.shape[0]
        discounts = np.empty(n, dtype=np.float64)
        for i in range(n):
            discounts[i] = 1.0 / np.log2(i + 2.0)
        ideal = np.argsort(-reference, kind="mergesort")
        idcg = 0.0
        for i in range(n):
            idcg += reference[ideal[i]] * discounts[i]
        out = np.empty(m, dtype=np.float64)
        negated = -candidates
        for row in range(m):
            order = np.argsort(negated[row], kind="mergesort")
            dcg = 0.0
            for i in range(n):
                dcg += reference[order[i]] * discounts[i]
            out[row] = dcg / idcg
        return out

    @njit(cache=True)
    def _logistic_fit_numba(x, y, learning_rate, iterations):
        n, d = x.shape
        weights = np.zeros(d, dtype=np.float64)
        bias = 0.0
        for _ in range(iterations):
            z = x @ weights + bias
            p = 1.0 / (1.0 + np.exp(-z))
            err = p - y
            grad = (err @ x) / n
            weights = weights - learning_rate * grad
            bias = bias - learning_rate * err.mean()
        return weights, bias

    def ndcg_numba(reference: np.ndarray, candidate: np.ndarray) -> float:
        return float(_ndcg_numba(reference, candidate))

    def ndcg_many_numba(reference: np.ndarray, candidates: np.ndarray) -> np.ndarray:
        return _ndcg_many_numba(reference, np.ascontiguousarray(candidates))

    def logistic_fit_numba(
        x: np.ndarray, y: np.ndarray, learning_rate: float, iterations: int
    ) -> tuple[np.ndarray, float]:
        weights, bias = _logistic_fit_numba(
            np.ascontiguousarray(x), np.ascontiguousarray(y), learning_rate, iterations
        )
        return weights, float(bias)


_BACKENDS = {
    "numpy": (ndcg_numpy, ndcg_many_numpy, logistic_fit_numpy),
}
if _HAVE_NUMBA:
    _BACKENDS["numba"] = (ndcg_numba, ndcg_many_numba, logistic_fit_numba)


def _pick_backend() -> str:
    requested = os.environ.get(ENV_FLAG, "").strip().lower()
    if requested:
        if requested not in ("numpy", "numba"):
            raise ValueError(f"{ENV_FLAG} must be 'numpy' or 'numba', got {requested!r}")
        if requested == "numba" and not _HAVE_NUMBA:
            raise ValueError("numba backend requested but numba is not importable")
        return requested
    return "numba" if _HAVE_NUMBA else "numpy"


_ACTIVE = _pick_backend()
ndcg_kernel, ndcg_many_kernel, logistic_fit_kernel = _BACKENDS[_ACTIVE]


def active_backend() -> str:
    return _ACTIVE
