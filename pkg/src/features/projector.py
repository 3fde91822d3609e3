"""
Feature projectors: frozen feature network followed by random mixing.

Cross-channel mixing (CCM) applies one random 1x1 convolution per stage.
Cross-scale mixing (CSM) runs top-down: the deepest stage is convolved, and
each shallower stage adds the bilinearly upsampled deeper output (mapped to
its width) before its own random 3x3 convolution. None of these weights is
ever handed to an optimizer.
"""
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import torch
import torch.nn.functional as F
from torch import nn

from ..interfaces.feature_network import FeatureNetwork
from ..utils.seeding import seeded
from .conv_net import ConvFeatureNetwork
from .patch_attention import PatchAttentionNetwork
from .spec import FeatureNetworkSpec


def build_feature_network(spec: FeatureNetworkSpec) -> FeatureNetwork:
    """
    Construct a frozen surrogate from its spec.

    The same spec always yields bit-identical weights.

    Args:
        spec: Kind, widths, resolution and seed

    Returns:
        Frozen network in eval mode
    """
    FeatureNetwork.check_resolution(spec.resolution)
    with seeded(spec.seed):
        if spec.kind == "conv":
            network = ConvFeatureNetwork(spec.channels)
        else:
            network = PatchAttentionNetwork(
                spec.resolution, spec.channels, spec.patch_size, spec.blocks, spec.embed_dim, spec.heads
            )
    return network.freeze()


@dataclass
class ProjectorParams:
    """Random CCM and CSM weights, one set per stage"""
    ccm: List[torch.Tensor]
    csm: List[torch.Tensor]
    csm_up: List[torch.Tensor]

    @classmethod
    def random(cls, channels: Sequence[int], seed: int) -> "ProjectorParams":
        """Kaiming-uniform weights drawn under ``seed``"""
        with seeded(seed):
            ccm = [nn.init.kaiming_uniform_(torch.empty(c, c, 1, 1), nonlinearity="linear") for c in channels]
            csm = [nn.init.kaiming_uniform_(torch.empty(c, c, 3, 3), nonlinearity="linear") for c in channels]
            csm_up = [
                nn.init.kaiming_uniform_(torch.empty(channels[s], channels[s + 1], 3, 3), nonlinearity="linear")
                for s in range(len(channels) - 1)
            ]
        return cls(ccm=ccm, csm=csm, csm_up=csm_up)

    @classmethod
    def identity(cls, channels: Sequence[int]) -> "ProjectorParams":
        """CCM identity, CSM pass-through on the own stage, no cross-scale mixing"""
        ccm = [torch.eye(c).view(c, c, 1, 1) for c in channels]
        csm = []
        for c in channels:
            w = torch.zeros(c, c, 3, 3)
            w[:, :, 1, 1] = torch.eye(c)
            csm.append(w)
        csm_up = [torch.zeros(channels[s], channels[s + 1], 3, 3) for s in range(len(channels) - 1)]
        return cls(ccm=ccm, csm=csm, csm_up=csm_up)


def ccm_apply(stages: Sequence[torch.Tensor], params: ProjectorParams) -> List[torch.Tensor]:
    """
    Mix channels within each stage with its random 1x1 convolution.

    Args:
        stages: Feature maps, one per stage
        params: Projector weights

    Returns:
        Mixed maps with unchanged spatial sizes
    """
    if len(stages) != len(params.ccm):
        raise ValueError(f"Expected {len(params.ccm)} stages, got {len(stages)}")
    mixed = []
    for stage, weight in zip(stages, params.ccm):
        if stage.shape[1] != weight.shape[1]:
            raise ValueError(f"Channel mismatch: stage has {stage.shape[1]}, CCM expects {weight.shape[1]}")
        mixed.append(F.conv2d(stage, weight.to(stage)))
    return mixed


def csm_apply(stages: Sequence[torch.Tensor], params: ProjectorParams) -> List[torch.Tensor]:
    """
    Top-down cross-scale mixing into a four-level pyramid.

    Level s depends only on input stages s and deeper.

    Args:
        stages: Channel-mixed maps, shallow to deep
        params: Projector weights

    Returns:
        Pyramid with the same shapes as ``stages``
    """
    if len(stages) != len(params.csm):
        raise ValueError(f"Expected {len(params.csm)} stages, got {len(stages)}")
    pyramid: List[torch.Tensor] = [None] * len(stages)  # type: ignore[list-item]
    deepest = len(stages) - 1
    pyramid[deepest] = F.conv2d(stages[deepest], params.csm[deepest].to(stages[deepest]), padding=1)
    for s in range(deepest - 1, -1, -1):
        upsampled = F.interpolate(pyramid[s + 1], size=stages[s].shape[-2:], mode="bilinear", align_corners=False)
        residual = F.conv2d(upsampled, params.csm_up[s].to(upsampled), padding=1)
        pyramid[s] = F.conv2d(stages[s] + residual, params.csm[s].to(stages[s]), padding=1)
    return pyramid


class FeatureProjector(nn.Module):
    """
    Frozen feature network plus CCM and CSM.

    The mixing weights are registered as buffers so they follow ``.to()``,
    land in ``state_dict()`` and never appear in ``parameters()``.
    """

    def __init__(self, spec: FeatureNetworkSpec, projector_seed: int):
        super().__init__()
        self.spec = spec
        self.network = build_feature_network(spec)
        params = ProjectorParams.random(spec.channels, projector_seed)
        for i, w in enumerate(params.ccm):
            self.register_buffer(f"ccm_{i}", w)
        for i, w in enumerate(params.csm):
            self.register_buffer(f"csm_{i}", w)
        for i, w in enumerate(params.csm_up):
            self.register_buffer(f"csm_up_{i}", w)
        self.eval()

    @property
    def stage_channels(self) -> Tuple[int, ...]:
        return self.network.stage_channels

    @property
    def params(self) -> ProjectorParams:
        n = len(self.spec.channels)
        return ProjectorParams(
            ccm=[getattr(self, f"ccm_{i}") for i in range(n)],
            csm=[getattr(self, f"csm_{i}") for i in range(n)],
            csm_up=[getattr(self, f"csm_up_{i}") for i in range(n - 1)],
        )

    def train(self, mode: bool = True) -> "FeatureProjector":
        # frozen: always eval
        return super().train(False)

    def forward(self, images: torch.Tensor) -> List[torch.Tensor]:
        params = self.params
        return csm_apply(ccm_apply(self.network(images), params), params)


def pooled_representation(*pyramids: Sequence[torch.Tensor]) -> torch.Tensor:
    """
    Global-average-pool every pyramid level and concatenate per sample.

    Args:
        pyramids: One or more pyramids over the same batch

    Returns:
        (batch, sum of all level widths) matrix
    """
    batch_sizes = {level.shape[0] for pyramid in pyramids for level in pyramid}
    if len(batch_sizes) != 1:
        raise ValueError(f"Pyramids disagree on batch size: {sorted(batch_sizes)}")
    return torch.cat([level.mean(dim=(2, 3)) for pyramid in pyramids for level in pyramid], dim=1)
