"""Trainable linear head of the FakeTwins encoder"""
import torch
from torch import nn


class LinearHead(nn.Module):
    """
    Three linear layers of ``width`` units; batch norm and ReLU after the
    first two. Biases start at zero.
    """

    def __init__(self, in_dim: int, width: int = 512):
        super().__init__()
        self.layers = nn.Sequential(
            nn.Linear(in_dim, width),
            nn.BatchNorm1d(width),
            nn.ReLU(),
            nn.Linear(width, width),
            nn.BatchNorm1d(width),
            nn.ReLU(),
            nn.Linear(width, width),
        )
        for module in self.layers:
            if isinstance(module, nn.Linear):
                nn.init.zeros_(module.bias)

    def forward(self, v: torch.Tensor) -> torch.Tensor:
        if self.training and v.shape[0] < 2:
            raise ValueError("batch-norm requires batch ≥ 2")
        return self.layers(v)
