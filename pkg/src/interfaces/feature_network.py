"""Abstract Feature Network Interface - Open/Closed Principle"""
from abc import ABC, abstractmethod
from typing import List, Tuple

import torch
from torch import nn


class FeatureNetwork(nn.Module, ABC):
    """
    Abstract base class for frozen four-stage feature networks.

    Implementations emit one feature map per stride in (4, 8, 16, 32).
    """

    STRIDES = (4, 8, 16, 32)

    @property
    @abstractmethod
    def stage_channels(self) -> Tuple[int, ...]:
        """
        Channel width of each of the four stages.

        Returns:
            Tuple of four ints
        """
        pass

    @abstractmethod
    def forward(self, images: torch.Tensor) -> List[torch.Tensor]:
        """
        Extract the four strided stages.

        Args:
            images: Batch (B, 3, R, R) with R divisible by 32

        Returns:
            List of four maps, map s has spatial size R / STRIDES[s]
        """
        pass

    def freeze(self) -> "FeatureNetwork":
        """Disable gradients on every weight and switch to eval mode"""
        for param in self.parameters():
            param.requires_grad_(False)
        return self.eval()

    @staticmethod
    def check_resolution(resolution: int):
        """Raise if a resolution cannot be split into the four strides"""
        if resolution % 32 != 0 or resolution <= 0:
            raise ValueError(f"Resolution must be a positive multiple of 32, got {resolution}")
