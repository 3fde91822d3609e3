"""Multi-scale projected discriminators and the single-image baseline"""
from typing import Dict, Sequence

import torch
from torch import nn

from ..losses.logits import LogitSet
from .spectral import SNConv2d


class LevelDiscriminator(nn.Module):
    """
    Three spectrally normalized convolutions ending in a 1-channel map.

    Spatial size is preserved, so even a 1x1 level yields a logit.
    """

    def __init__(self, in_channels: int, hidden: int = 64):
        super().__init__()
        self.main = nn.Sequential(
            SNConv2d(in_channels, hidden, 3, 1, 1),
            nn.LeakyReLU(0.2),
            SNConv2d(hidden, hidden, 3, 1, 1),
            nn.LeakyReLU(0.2),
            SNConv2d(hidden, 1, 1, 1, 0),
        )

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.main(x)


class DiscriminatorBank(nn.Module):
    """
    One independent discriminator per (feature network, pyramid level).

    Args:
        stage_channels: Pyramid widths for each feature network name
        hidden: Hidden width of every level discriminator
    """

    def __init__(self, stage_channels: Dict[str, Sequence[int]], hidden: int = 64):
        super().__init__()
        self.networks = list(stage_channels)
        self.heads = nn.ModuleDict({
            f"{name}_{level}": LevelDiscriminator(c, hidden)
            for name, widths in stage_channels.items()
            for level, c in enumerate(widths, start=1)
        })

    def forward(self, pyramids: Dict[str, Sequence[torch.Tensor]]) -> LogitSet:
        maps = {}
        groups = {}
        for name in self.networks:
            groups[name] = []
            for level, features in enumerate(pyramids[name], start=1):
                key = f"{name}/{level}"
                maps[key] = self.heads[f"{name}_{level}"](features)
                groups[name].append(key)
        return LogitSet(maps=maps, groups=groups)


class ImageDiscriminator(nn.Module):
    """Single discriminator on raw images, the non-projected baseline"""

    def __init__(self, resolution: int, hidden: int = 32, max_channels: int = 128):
        super().__init__()
        layers = [SNConv2d(3, hidden, 3, 1, 1), nn.LeakyReLU(0.2)]
        channels = hidden
        size = resolution
        while size > 4:
            out = min(max_channels, channels * 2)
            layers += [SNConv2d(channels, out, 4, 2, 1), nn.LeakyReLU(0.2)]
            channels, size = out, size // 2
        layers.append(SNConv2d(channels, 1, 3, 1, 1))
        self.main = nn.Sequential(*layers)

    def forward(self, images: torch.Tensor) -> LogitSet:
        return LogitSet(maps={"image/1": self.main(images)})
