"""Gaussian blur for discriminator inputs and its schedule"""
import math
from typing import TYPE_CHECKING

import torch
import torch.nn.functional as F

if TYPE_CHECKING:
    from ..core.train_config import TrainConfig


def gaussian_kernel1d(sigma: float, radius: int, dtype: torch.dtype = torch.float64) -> torch.Tensor:
    """Normalized 1-D Gaussian weights on [-radius, radius]"""
    offsets = torch.arange(-radius, radius + 1, dtype=dtype)
    weights = torch.exp(-0.5 * (offsets / sigma) ** 2)
    return weights / weights.sum()


def gaussian_blur(batch: torch.Tensor, sigma: float) -> torch.Tensor:
    """
    Separable Gaussian blur with reflect padding.

    The kernel radius is ceil(3 * sigma), capped at size - 1 because reflect
    padding cannot exceed the image.

    Args:
        batch: Images (B, C, H, W)
        sigma: Standard deviation in pixels; 0 returns the input

    Returns:
        Blurred batch of the same shape
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return batch
    _, channels, h, w = batch.shape
    radius = min(int(math.ceil(3 * sigma)), h - 1, w - 1)
    if radius <= 0:
        return batch
    kernel = gaussian_kernel1d(sigma, radius, batch.dtype).to(batch.device)
    x = F.pad(batch, [radius, radius, radius, radius], mode="reflect")
    x = F.conv2d(x, kernel.view(1, 1, 1, -1).repeat(channels, 1, 1, 1), groups=channels)
    x = F.conv2d(x, kernel.view(1, 1, -1, 1).repeat(channels, 1, 1, 1), groups=channels)
    return x


def blur_sigma(images_seen: int, cfg: "TrainConfig") -> float:
    """
    Blur strength for the discriminator inputs at a point in training.

    Constant ``cfg.blur_sigma_max`` while fewer than ``cfg.blur_images``
    images have been seen, then 0. With ``cfg.blur_ramp`` the strength
    decays linearly to 0 over the same window instead.
    """
    if images_seen < 0:
        raise ValueError(f"images_seen must be non-negative, got {images_seen}")
    window = cfg.resolved_blur_images
    if window <= 0 or images_seen >= window:
        return 0.0
    if cfg.blur_ramp:
        return cfg.blur_sigma_max * (1.0 - images_seen / window)
    return float(cfg.blur_sigma_max)
