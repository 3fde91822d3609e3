"""Latent-code perturbation and dataset mirroring"""
import torch

from .rng import RngStream


def latent_perturb(z: torch.Tensor, l1: float, rng: RngStream, deterministic: bool = False) -> torch.Tensor:
    """
    Perturb latent codes with noise scaled by their own magnitude.

    Each component receives Gaussian noise with standard deviation
    ``l1 * |z|``. With ``deterministic`` the shift ``l1 * |z|`` is added
    instead and no draw is consumed.

    Args:
        z: Latent batch (B, z_dim)
        l1: Noise coefficient, 0 disables the perturbation
        rng: Stream the noise is drawn from

    Returns:
        Perturbed latents, same shape and dtype
    """
    if l1 < 0:
        raise ValueError(f"l1 must be non-negative, got {l1}")
    scale = l1 * z.abs()
    if deterministic:
        return z + scale
    noise = rng.normal(tuple(z.shape), dtype=z.dtype).to(z.device)
    return z + noise * scale


def xflip_amplify(images: torch.Tensor) -> torch.Tensor:
    """
    Append horizontal mirrors: item N + i is the mirror of item i.

    Args:
        images: Dataset tensor (N, C, H, W)

    Returns:
        Tensor (2N, C, H, W)
    """
    return torch.cat([images, images.flip(-1)], dim=0)
