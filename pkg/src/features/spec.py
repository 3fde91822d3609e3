"""Serializable description of a frozen feature network"""
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Tuple

FEATURE_KINDS = ("conv", "patch_attention")


@dataclass(frozen=True)
class FeatureNetworkSpec:
    """
    Everything needed to rebuild a frozen surrogate bit-identically.

    ``weights_path`` is reserved for externally pretrained weights and must
    stay empty for now.
    """
    kind: str = "conv"
    resolution: int = 32
    channels: Tuple[int, ...] = (8, 16, 32, 64)
    patch_size: int = 4
    blocks: int = 2
    embed_dim: int = 64
    heads: int = 2
    seed: int = 0
    weights_path: Optional[str] = None

    def __post_init__(self):
        if self.kind not in FEATURE_KINDS:
            raise ValueError(f"Unknown feature network kind '{self.kind}', expected one of {FEATURE_KINDS}")
        if len(self.channels) != 4:
            raise ValueError(f"Feature networks have exactly 4 stages, got {len(self.channels)} widths")
        if self.resolution % 32 != 0 or self.resolution <= 0:
            raise ValueError(f"Resolution must be a positive multiple of 32, got {self.resolution}")
        if self.kind == "patch_attention" and self.resolution % self.patch_size != 0:
            raise ValueError(f"Resolution {self.resolution} is not divisible by patch size {self.patch_size}")
        if self.weights_path:
            raise ValueError("Loading pretrained feature-network weights is not supported")

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["channels"] = list(self.channels)
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "FeatureNetworkSpec":
        data = dict(data)
        data["channels"] = tuple(data["channels"])
        return cls(**data)
