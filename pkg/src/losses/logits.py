"""Discriminator outputs grouped by feature network and level"""
from dataclasses import dataclass, field
from typing import Dict, List

import torch


@dataclass
class LogitSet:
    """
    Spatial logit maps keyed by "<network>/<level>".

    ``groups`` maps each network name to its map keys in level order.
    """
    maps: Dict[str, torch.Tensor]
    groups: Dict[str, List[str]] = field(default_factory=dict)

    def __post_init__(self):
        if not self.groups:
            for key in self.maps:
                self.groups.setdefault(key.split("/")[0], []).append(key)
        sizes = {m.shape[0] for m in self.maps.values()}
        if len(sizes) > 1:
            raise ValueError(f"Logit maps disagree on batch size: {sorted(sizes)}")

    @property
    def batch_size(self) -> int:
        return next(iter(self.maps.values())).shape[0]

    def per_sample(self, key: str) -> torch.Tensor:
        """Spatial mean of one map, shape (B,)"""
        logits = self.maps[key]
        return logits.reshape(logits.shape[0], -1).mean(dim=1)

    def network_sums(self) -> Dict[str, torch.Tensor]:
        """Per-sample sum of the scalar logits over each network's levels"""
        return {
            network: torch.stack([self.per_sample(k) for k in keys], dim=0).sum(dim=0)
            for network, keys in self.groups.items()
        }

    def total_per_sample(self) -> torch.Tensor:
        """Per-sample sum over every map"""
        return torch.stack(list(self.network_sums().values()), dim=0).sum(dim=0)
