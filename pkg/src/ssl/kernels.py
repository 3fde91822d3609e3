"""
Numerical kernels for the self-supervised objectives.

Every kernel promotes its inputs to float64 and returns float64 results;
autograd casts gradients back to the caller's dtype.
"""
import torch
import torch.nn.functional as F

STD_EPS = 1e-12


def _as_embedding_batch(z: torch.Tensor, name: str = "embedding") -> torch.Tensor:
    if z.dim() != 2:
        raise ValueError(f"{name} must be a (batch, dim) matrix, got shape {tuple(z.shape)}")
    if z.shape[0] < 2:
        raise ValueError(f"{name} needs at least 2 samples, got {z.shape[0]}")
    if z.shape[1] < 1:
        raise ValueError(f"{name} needs at least 1 dimension")
    if not torch.isfinite(z).all():
        raise ValueError("non-finite embedding")
    return z.to(torch.float64)


def _check_same_shape(za: torch.Tensor, zb: torch.Tensor):
    if za.shape != zb.shape:
        raise ValueError(f"Shape mismatch: {tuple(za.shape)} vs {tuple(zb.shape)}")


def off_diagonal(x: torch.Tensor) -> torch.Tensor:
    """Return a flattened view of the off-diagonal elements of a square matrix"""
    n, m = x.shape
    if n != m:
        raise ValueError(f"Expected a square matrix, got {n}x{m}")
    return x.flatten()[:-1].view(n - 1, n + 1)[:, 1:].flatten()


def standardize_columns(z: torch.Tensor, eps: float = STD_EPS) -> torch.Tensor:
    """
    Center each column and divide by its population standard deviation.

    Columns whose standard deviation falls below ``eps`` are divided by
    ``eps`` instead, so a constant column maps to zeros.

    Args:
        z: Embedding batch, rows are samples
        eps: Floor on the per-column standard deviation

    Returns:
        Standardized float64 batch of the same shape
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    z = _as_embedding_batch(z)
    centered = z - z.mean(dim=0, keepdim=True)
    var = centered.pow(2).mean(dim=0, keepdim=True)
    # clamp before sqrt keeps the backward pass finite on constant columns
    std = torch.sqrt(torch.clamp_min(var, eps * eps))
    return centered / std


def cross_correlation(za: torch.Tensor, zb: torch.Tensor, eps: float = STD_EPS) -> torch.Tensor:
    """
    Cross-correlation matrix between the columns of two embedding batches.

    Entry (i, j) is the dot product of column i of ``za`` with column j of
    ``zb`` divided by both column norms. For standardized inputs this is the
    usual ``za.T @ zb / batch_size``.

    Args:
        za: First view, (batch, dim)
        zb: Second view, same shape

    Returns:
        (dim, dim) float64 matrix with entries in [-1, 1]
    """
    _check_same_shape(za, zb)
    za = _as_embedding_batch(za, "za")
    zb = _as_embedding_batch(zb, "zb")
    norm_a = torch.sqrt(torch.clamp_min(za.pow(2).sum(dim=0), eps * eps))
    norm_b = torch.sqrt(torch.clamp_min(zb.pow(2).sum(dim=0), eps * eps))
    return (za / norm_a).T @ (zb / norm_b)


def barlow_twins_loss(c: torch.Tensor, lambda1: float = 0.005) -> torch.Tensor:
    """
    Redundancy-reduction loss on a cross-correlation matrix.

    Args:
        c: Square cross-correlation matrix
        lambda1: Weight of the off-diagonal term

    Returns:
        sum_i (1 - C_ii)^2 + lambda1 * sum_{i != j} C_ij^2
    """
    if lambda1 <= 0:
        raise ValueError(f"lambda1 must be positive, got {lambda1}")
    if c.dim() != 2 or c.shape[0] != c.shape[1]:
        raise ValueError(f"Cross-correlation must be square, got shape {tuple(c.shape)}")
    c = c.to(torch.float64)
    on_diag = (1.0 - torch.diagonal(c)).pow(2).sum()
    if c.shape[0] == 1:
        return on_diag
    off_diag = off_diagonal(c).pow(2).sum()
    return on_diag + lambda1 * off_diag


def barlow_twins_objective(za: torch.Tensor, zb: torch.Tensor, lambda1: float = 0.005) -> torch.Tensor:
    """Standardize both views, correlate them and apply the Barlow Twins loss"""
    _check_same_shape(za, zb)
    c = cross_correlation(standardize_columns(za), standardize_columns(zb))
    return barlow_twins_loss(c, lambda1)


def _variance_hinge(z: torch.Tensor, eps: float) -> torch.Tensor:
    std = torch.sqrt(torch.clamp_min(z.var(dim=0, unbiased=True), eps * eps))
    return F.relu(1.0 - std).mean()


def _covariance_penalty(z: torch.Tensor) -> torch.Tensor:
    n, d = z.shape
    if d == 1:
        return z.new_zeros(())
    centered = z - z.mean(dim=0, keepdim=True)
    cov = centered.T @ centered / (n - 1)
    return off_diagonal(cov).pow(2).sum() / d


def vicreg_loss(
    za: torch.Tensor,
    zb: torch.Tensor,
    invariance_weight: float = 25.0,
    variance_weight: float = 25.0,
    covariance_weight: float = 1.0,
    eps: float = STD_EPS,
) -> torch.Tensor:
    """
    Variance-invariance-covariance loss.

    The variance and covariance terms are summed over both views, so a pair
    of all-zero batches scores ``2 * variance_weight`` on the variance term.

    Args:
        za: First view, (batch, dim)
        zb: Second view, same shape
        invariance_weight: Weight of the mean squared error between views
        variance_weight: Weight of the unit-std hinge
        covariance_weight: Weight of the off-diagonal covariance penalty
        eps: Floor inside the standard deviation

    Returns:
        Scalar float64 loss
    """
    _check_same_shape(za, zb)
    za = _as_embedding_batch(za, "za")
    zb = _as_embedding_batch(zb, "zb")
    invariance = F.mse_loss(za, zb)
    variance = _variance_hinge(za, eps) + _variance_hinge(zb, eps)
    covariance = _covariance_penalty(za) + _covariance_penalty(zb)
    return invariance_weight * invariance + variance_weight * variance + covariance_weight * covariance


def ntxent_loss(za: torch.Tensor, zb: torch.Tensor, temperature: float = 0.1) -> torch.Tensor:
    """
    Normalized-temperature cross entropy over the 2N views.

    Row b of ``za`` and row b of ``zb`` are positives; every other row of
    both batches is a negative.

    Args:
        za: First view, (batch, dim)
        zb: Second view, same shape
        temperature: Softmax temperature

    Returns:
        Mean cross entropy over all 2N anchors
    """
    if temperature <= 0:
        raise ValueError(f"temperature must be positive, got {temperature}")
    _check_same_shape(za, zb)
    za = _as_embedding_batch(za, "za")
    zb = _as_embedding_batch(zb, "zb")
    features = torch.cat([za, zb], dim=0)
    norms = features.norm(dim=1, keepdim=True)
    if (norms == 0).any():
        raise ValueError("degenerate embedding")
    features = features / norms

    n = za.shape[0]
    logits = features @ features.T / temperature
    self_mask = torch.eye(2 * n, dtype=torch.bool, device=features.device)
    logits = logits.masked_fill(self_mask, float("-inf"))
    targets = torch.cat([torch.arange(n, 2 * n), torch.arange(0, n)]).to(features.device)
    return F.cross_entropy(logits, targets)
