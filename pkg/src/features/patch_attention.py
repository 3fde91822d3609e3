"""Patch-attention (ViT-like) surrogate feature network"""
from typing import List, Tuple

import torch
import torch.nn.functional as F
from einops import rearrange
from einops.layers.torch import Rearrange
from torch import nn

from ..interfaces.feature_network import FeatureNetwork


class MLP(nn.Module):
    def __init__(self, emb_dim: int, hidden_dim: int):
        super().__init__()
        self.layer_norm = nn.LayerNorm(emb_dim)
        self.fc1 = nn.Linear(emb_dim, hidden_dim)
        self.gelu = nn.GELU()
        self.fc2 = nn.Linear(hidden_dim, emb_dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        return self.fc2(self.gelu(self.fc1(self.layer_norm(x))))


class MSA(nn.Module):
    """Multi-head self-attention with a pre-norm"""

    def __init__(self, dim: int, heads: int):
        super().__init__()
        if dim % heads != 0:
            raise ValueError(f"embed_dim {dim} is not divisible by {heads} heads")
        self.heads = heads
        self.scale = (dim // heads) ** -0.5
        self.norm = nn.LayerNorm(dim)
        self.to_qkv = nn.Linear(dim, dim * 3, bias=False)
        self.to_out = nn.Linear(dim, dim)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.norm(x)
        q, k, v = map(
            lambda t: rearrange(t, "b n (h d) -> b h n d", h=self.heads),
            self.to_qkv(x).chunk(3, dim=-1),
        )
        attn = torch.softmax(torch.matmul(q, k.transpose(-1, -2)) * self.scale, dim=-1)
        out = rearrange(torch.matmul(attn, v), "b h n d -> b n (h d)")
        return self.to_out(out)


class TransformerBlock(nn.Module):
    def __init__(self, dim: int, heads: int):
        super().__init__()
        self.msa = MSA(dim, heads)
        self.mlp = MLP(dim, hidden_dim=dim * 4)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        x = self.msa(x) + x
        return self.mlp(x) + x


class PatchAttentionNetwork(FeatureNetwork):
    """
    Patch embedding plus a few attention blocks.

    The token grid is average-pooled (or bilinearly enlarged when the patch
    is coarser than the stage) to each of the four strides, then a fixed
    1x1 projection sets each stage's channel width.
    """

    def __init__(self, resolution: int, channels: Tuple[int, ...] = (8, 16, 32, 64),
                 patch_size: int = 4, blocks: int = 2, embed_dim: int = 64, heads: int = 2,
                 in_channels: int = 3):
        super().__init__()
        self.check_resolution(resolution)
        if resolution % patch_size != 0:
            raise ValueError(f"Resolution {resolution} is not divisible by patch size {patch_size}")
        self._channels = tuple(channels)
        self.resolution = resolution
        self.grid = resolution // patch_size
        patch_dim = in_channels * patch_size ** 2

        self.to_patch_embedding = nn.Sequential(
            Rearrange("b c (h p1) (w p2) -> b (h w) (p1 p2 c)", p1=patch_size, p2=patch_size),
            nn.LayerNorm(patch_dim),
            nn.Linear(patch_dim, embed_dim),
            nn.LayerNorm(embed_dim),
        )
        self.pos_embedding = nn.Parameter(torch.randn(1, self.grid * self.grid, embed_dim) * 0.02)
        self.blocks = nn.ModuleList([TransformerBlock(embed_dim, heads) for _ in range(blocks)])
        self.norm = nn.LayerNorm(embed_dim)
        self.stage_proj = nn.ModuleList([nn.Conv2d(embed_dim, c, kernel_size=1) for c in channels])

    @property
    def stage_channels(self) -> Tuple[int, ...]:
        return self._channels

    def forward(self, images: torch.Tensor) -> List[torch.Tensor]:
        if images.shape[-1] != self.resolution or images.shape[-2] != self.resolution:
            raise ValueError(
                f"Expected {self.resolution}x{self.resolution} images, got {tuple(images.shape[-2:])}"
            )
        x = self.to_patch_embedding(images) + self.pos_embedding
        for block in self.blocks:
            x = block(x)
        grid = rearrange(self.norm(x), "b (h w) d -> b d h w", h=self.grid, w=self.grid)

        outputs = []
        for stride, proj in zip(self.STRIDES, self.stage_proj):
            size = self.resolution // stride
            if size <= self.grid:
                stage = F.adaptive_avg_pool2d(grid, size)
            else:
                stage = F.interpolate(grid, size=(size, size), mode="bilinear", align_corners=False)
            outputs.append(proj(stage))
        return outputs
