"""Frozen surrogate embedding for distribution metrics"""
from dataclasses import dataclass

import numpy as np
import torch
from torch import nn

from ..utils.seeding import seeded


class SurrogateEmbedder(nn.Module):
    """
    Seeded random conv network mapping images to ``embed_dim`` vectors.

    Stands in for the Inception embedding, so metric values are only
    comparable between runs sharing ``seed``.
    """

    def __init__(self, embed_dim: int = 64, seed: int = 1234, width: int = 32):
        super().__init__()
        self.embed_dim = embed_dim
        self.seed = seed
        with seeded(seed):
            self.features = nn.Sequential(
                nn.Conv2d(3, width, 3, 1, 1), nn.GELU(),
                nn.Conv2d(width, width * 2, 4, 2, 1), nn.GELU(),
                nn.Conv2d(width * 2, width * 4, 4, 2, 1), nn.GELU(),
                nn.AdaptiveAvgPool2d(4),
                nn.Flatten(),
                nn.Linear(width * 4 * 16, embed_dim),
            )
        for param in self.parameters():
            param.requires_grad_(False)
        self.eval()

    def forward(self, images: torch.Tensor) -> torch.Tensor:
        return self.features(images)

    @torch.no_grad()
    def embed(self, images: torch.Tensor, batch_size: int = 256) -> np.ndarray:
        """
        Embed a batch in chunks.

        Args:
            images: (N, 3, H, W) in [-1, 1]
            batch_size: Chunk size

        Returns:
            float64 array (N, embed_dim)
        """
        weight = next(self.parameters())
        chunks = [
            self(images[i:i + batch_size].to(weight)).to(torch.float64).cpu().numpy()
            for i in range(0, images.shape[0], batch_size)
        ]
        return np.concatenate(chunks, axis=0)


@dataclass(frozen=True)
class EmbeddingStats:
    """Mean, unbiased covariance and sample count of an embedding set"""
    mu: np.ndarray
    sigma: np.ndarray
    n: int

    @classmethod
    def from_embeddings(cls, embeddings: np.ndarray) -> "EmbeddingStats":
        embeddings = np.asarray(embeddings, dtype=np.float64)
        if embeddings.ndim != 2 or embeddings.shape[0] < 2:
            raise ValueError("Statistics need a (N, dim) array with N >= 2")
        sigma = np.cov(embeddings, rowvar=False)
        return cls(mu=embeddings.mean(axis=0), sigma=np.atleast_2d(sigma), n=embeddings.shape[0])
