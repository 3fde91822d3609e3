"""Toy-scale generator with skip-layer excitation"""
import math
from typing import List

import torch
from torch import nn


def generator_channels(resolution: int, base: int = 64, max_channels: int = 128) -> int:
    """Channel width of the feature map at ``resolution``"""
    return max(16, min(max_channels, base * 32 // resolution))


class GLU(nn.Module):
    def forward(self, x: torch.Tensor) -> torch.Tensor:
        nc = x.size(1) // 2
        return x[:, :nc] * torch.sigmoid(x[:, nc:])


class InitLayer(nn.Module):
    """Latent vector to a 4x4 map"""

    def __init__(self, z_dim: int, channels: int):
        super().__init__()
        self.init = nn.Sequential(nn.ConvTranspose2d(z_dim, channels * 2, 4, 1, 0), GLU())

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        return self.init(z.view(z.shape[0], -1, 1, 1))


class UpBlock(nn.Module):
    def __init__(self, in_channels: int, out_channels: int):
        super().__init__()
        self.block = nn.Sequential(
            nn.Upsample(scale_factor=2, mode="nearest"),
            nn.Conv2d(in_channels, out_channels * 2, 3, 1, 1),
            GLU(),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.block(x)


class SEBlock(nn.Module):
    """Channel gate for a large map computed from a small one"""

    def __init__(self, small_channels: int, big_channels: int):
        super().__init__()
        self.main = nn.Sequential(
            nn.AdaptiveAvgPool2d(4),
            nn.Conv2d(small_channels, big_channels, 4, 1, 0),
            nn.SiLU(),
            nn.Conv2d(big_channels, big_channels, 1, 1, 0),
            nn.Sigmoid(),
        )

    def forward(self, small: torch.Tensor, big: torch.Tensor) -> torch.Tensor:
        return big * self.main(small)


class Generator(nn.Module):
    """
    Upsampling generator from 4x4 to ``resolution``.

    Maps at resolution r >= 32 are gated by the map at r / 8. The tanh
    output keeps every pixel in [-1, 1].
    """

    def __init__(self, z_dim: int = 64, resolution: int = 32, base_channels: int = 64, max_channels: int = 128):
        super().__init__()
        if resolution < 8 or resolution & (resolution - 1):
            raise ValueError(f"Resolution must be a power of two >= 8, got {resolution}")
        self.z_dim = z_dim
        self.resolution = resolution
        n_up = int(math.log2(resolution // 4))
        resolutions = [4 * 2 ** i for i in range(n_up + 1)]
        widths = [generator_channels(r, base_channels, max_channels) for r in resolutions]

        self.init = InitLayer(z_dim, widths[0])
        self.ups = nn.ModuleList([UpBlock(widths[i], widths[i + 1]) for i in range(n_up)])
        self.excite = nn.ModuleDict({
            str(i): SEBlock(widths[i - 3], widths[i]) for i in range(3, n_up + 1)
        })
        self.to_rgb = nn.Conv2d(widths[-1], 3, 3, 1, 1)

    def forward(self, z: torch.Tensor) -> torch.Tensor:
        if z.shape[-1] != self.z_dim:
            raise ValueError(f"Expected latent dimension {self.z_dim}, got {z.shape[-1]}")
        feats: List[torch.Tensor] = [self.init(z)]
        for i, up in enumerate(self.ups, start=1):
            x = up(feats[-1])
            if str(i) in self.excite:
                x = self.excite[str(i)](feats[i - 3], x)
            feats.append(x)
        return torch.tanh(self.to_rgb(feats[-1]))

