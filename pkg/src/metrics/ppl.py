"""Perceptual path length in latent space"""
from typing import Callable, Tuple

import numpy as np
import torch
from torch import nn

from ..augment.rng import RngStream

PPL_MODES = ("full", "end")


def slerp(a: torch.Tensor, b: torch.Tensor, t: torch.Tensor) -> torch.Tensor:
    """
    Spherical interpolation of directions with linear interpolation of norms.

    Args:
        a: Start latents (N, D)
        b: End latents (N, D)
        t: Positions (N,)
    """
    t = t.view(-1, 1)
    norm_a = a.norm(dim=1, keepdim=True)
    norm_b = b.norm(dim=1, keepdim=True)
    unit_a = a / norm_a
    unit_b = b / norm_b
    cos = (unit_a * unit_b).sum(dim=1, keepdim=True).clamp(-1.0, 1.0)
    omega = torch.acos(cos)
    ortho = unit_b - cos * unit_a
    ortho = ortho / ortho.norm(dim=1, keepdim=True).clamp_min(1e-12)
    direction = unit_a * torch.cos(t * omega) + ortho * torch.sin(t * omega)
    return direction * (norm_a + t * (norm_b - norm_a))


def sample_path_points(n_paths: int, z_dim: int, epsilon: float, mode: str,
                       rng: RngStream) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor, torch.Tensor]:
    """
    Draw path endpoints and positions.

    Draw order: start latents, end latents, positions. In ``end`` mode the
    position is 0 or 1 - epsilon with equal probability.

    Returns:
        (start, end, t, t + epsilon)
    """
    if mode not in PPL_MODES:
        raise ValueError(f"Unknown PPL mode '{mode}', expected one of {PPL_MODES}")
    z1 = rng.normal((n_paths, z_dim))
    z2 = rng.normal((n_paths, z_dim))
    if mode == "full":
        t = rng.uniform((n_paths,), 0.0, 1.0 - epsilon)
    else:
        t = rng.integers(0, 2, (n_paths,)).to(torch.float64) * (1.0 - epsilon)
    return z1, z2, t, t + epsilon


@torch.no_grad()
def perceptual_path_length(generator: nn.Module, embed: Callable[[torch.Tensor], torch.Tensor],
                           z_dim: int, rng: RngStream, epsilon: float = 1e-4, n_paths: int = 10_000,
                           mode: str = "full", batch_size: int = 64) -> float:
    """
    Mean squared embedding displacement per squared latent step.

    Args:
        generator: Generator (use the EMA copy)
        embed: Images to feature vectors; distance is squared Euclidean
        z_dim: Latent dimension
        rng: Stream for endpoints and positions
        epsilon: Interpolation step
        n_paths: Number of sampled paths
        mode: "full" samples t uniformly, "end" uses the path endpoints

    Returns:
        Mean path length
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    z1, z2, t0, t1 = sample_path_points(n_paths, z_dim, epsilon, mode, rng)
    dtype = next(generator.parameters()).dtype
    device = next(generator.parameters()).device
    lengths = []
    for i in range(0, n_paths, batch_size):
        s = slice(i, i + batch_size)
        za = slerp(z1[s], z2[s], t0[s]).to(device=device, dtype=dtype)
        zb = slerp(z1[s], z2[s], t1[s]).to(device=device, dtype=dtype)
        fa = embed(generator(za)).to(torch.float64).reshape(za.shape[0], -1)
        fb = embed(generator(zb)).to(torch.float64).reshape(zb.shape[0], -1)
        lengths.append(((fa - fb).pow(2).sum(dim=1) / epsilon ** 2).cpu().numpy())
    return float(np.concatenate(lengths).mean())
