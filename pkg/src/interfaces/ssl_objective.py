"""Abstract Self-Supervised Objective Interface - Open/Closed Principle"""
from abc import ABC, abstractmethod

import torch


class SslObjective(ABC):
    """
    Abstract base class for the two-view objectives used by FakeTwins.

    New objectives plug into the trainer and the batch-diversity probe
    without modifying either.
    """

    @abstractmethod
    def __call__(self, za: torch.Tensor, zb: torch.Tensor) -> torch.Tensor:
        """
        Score two embedding batches of the same shape.

        Args:
            za: Embeddings of the first view, (batch, dim)
            zb: Embeddings of the second view, (batch, dim)

        Returns:
            Scalar float64 loss
        """
        pass

    @abstractmethod
    def get_name(self) -> str:
        """
        Get the objective's config name.

        Returns:
            Name string (e.g. "barlow_twins")
        """
        pass
