"""Distribution distances between embedding sets"""
from typing import Tuple

import numpy as np

from .embedding import EmbeddingStats

EIGEN_FLOOR = -1e-8


def _sqrt_psd(matrix: np.ndarray, name: str) -> np.ndarray:
    sym = (matrix + matrix.T) / 2
    eigvals, eigvecs = np.linalg.eigh(sym)
    if eigvals.min() < EIGEN_FLOOR * max(1.0, abs(eigvals).max()):
        raise ValueError(f"{name} is not positive semi-definite (min eigenvalue {eigvals.min():.3e})")
    return (eigvecs * np.sqrt(np.clip(eigvals, 0.0, None))) @ eigvecs.T


def frechet_distance(a: EmbeddingStats, b: EmbeddingStats) -> float:
    """
    Frechet distance between two Gaussians fitted to embeddings.

    ||mu_a - mu_b||^2 + Tr(S_a + S_b - 2 (S_a S_b)^(1/2)). The cross term is
    evaluated as the trace of the square root of S_a^(1/2) S_b S_a^(1/2),
    which is symmetric, with eigenvalues floored at 0.

    Returns:
        Non-negative distance
    """
    if a.mu.shape != b.mu.shape:
        raise ValueError(f"Dimension mismatch: {a.mu.shape} vs {b.mu.shape}")
    if a.n < 2 or b.n < 2:
        raise ValueError("Frechet distance needs at least 2 samples per set")
    sqrt_a = _sqrt_psd(a.sigma, "covariance a")
    _sqrt_psd(b.sigma, "covariance b")
    middle = sqrt_a @ b.sigma @ sqrt_a
    eigvals = np.linalg.eigvalsh((middle + middle.T) / 2)
    cross = np.sqrt(np.clip(eigvals, 0.0, None)).sum()
    diff = a.mu - b.mu
    value = float(diff @ diff + np.trace(a.sigma) + np.trace(b.sigma) - 2.0 * cross)
    return max(value, 0.0)


def polynomial_kernel(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """(x . y / d + 1)^3"""
    d = x.shape[1]
    return (x @ y.T / d + 1.0) ** 3


def kernel_distance(a: np.ndarray, b: np.ndarray) -> float:
    """
    Unbiased MMD^2 estimate with a cubic polynomial kernel.

    May be slightly negative.
    """
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    m, n = a.shape[0], b.shape[0]
    if m < 2 or n < 2:
        raise ValueError("Kernel distance needs at least 2 samples per set")
    if a.shape[1] != b.shape[1]:
        raise ValueError(f"Dimension mismatch: {a.shape[1]} vs {b.shape[1]}")
    k_aa = polynomial_kernel(a, a)
    k_bb = polynomial_kernel(b, b)
    k_ab = polynomial_kernel(a, b)
    term_aa = (k_aa.sum() - np.trace(k_aa)) / (m * (m - 1))
    term_bb = (k_bb.sum() - np.trace(k_bb)) / (n * (n - 1))
    return float(term_aa + term_bb - 2.0 * k_ab.mean())


def pairwise_distances(a: np.ndarray, b: np.ndarray, chunk: int = 64) -> np.ndarray:
    """Euclidean distances between every row of ``a`` and every row of ``b``"""
    rows = [
        np.linalg.norm(a[i:i + chunk, None, :] - b[None, :, :], axis=-1)
        for i in range(0, a.shape[0], chunk)
    ]
    return np.concatenate(rows, axis=0)


def _kth_neighbour_radii(points: np.ndarray, k: int) -> np.ndarray:
    # column 0 of each sorted row is the point itself
    return np.sort(pairwise_distances(points, points), axis=1)[:, k]


def _coverage(manifold: np.ndarray, radii: np.ndarray, queries: np.ndarray) -> float:
    inside = pairwise_distances(queries, manifold) <= radii[None, :]
    return float(inside.any(axis=1).mean())


def precision_recall(real: np.ndarray, gen: np.ndarray, k: int = 3) -> Tuple[float, float]:
    """
    k-NN manifold precision and recall.

    Precision is the share of generated points inside some real point's
    k-th-neighbour ball; recall swaps the roles.

    Returns:
        (precision, recall)
    """
    real = np.asarray(real, dtype=np.float64)
    gen = np.asarray(gen, dtype=np.float64)
    if real.shape[0] < k + 1 or gen.shape[0] < k + 1:
        raise ValueError(f"Precision/recall with k={k} needs at least {k + 1} points per set")
    precision = _coverage(real, _kth_neighbour_radii(real, k), gen)
    recall = _coverage(gen, _kth_neighbour_radii(gen, k), real)
    return precision, recall
