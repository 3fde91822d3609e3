"""Convolutional surrogate feature network"""
from typing import List, Tuple

import torch
from torch import nn

from ..interfaces.feature_network import FeatureNetwork


def _down_block(in_channels: int, out_channels: int) -> nn.Sequential:
    return nn.Sequential(
        nn.Conv2d(in_channels, out_channels, kernel_size=3, stride=2, padding=1),
        nn.GELU(),
    )


class ConvFeatureNetwork(FeatureNetwork):
    """
    A stride-2 stem followed by four stride-2 stages.

    Stage outputs land at strides 4, 8, 16 and 32.
    """

    def __init__(self, channels: Tuple[int, ...] = (8, 16, 32, 64), in_channels: int = 3):
        super().__init__()
        self._channels = tuple(channels)
        self.stem = _down_block(in_channels, channels[0])
        widths = (channels[0],) + tuple(channels)
        self.stages = nn.ModuleList([_down_block(widths[i], widths[i + 1]) for i in range(4)])

    @property
    def stage_channels(self) -> Tuple[int, ...]:
        return self._channels

    def forward(self, images: torch.Tensor) -> List[torch.Tensor]:
        self.check_resolution(images.shape[-1])
        x = self.stem(images)
        outputs = []
        for stage in self.stages:
            x = stage(x)
            outputs.append(x)
        return outputs
