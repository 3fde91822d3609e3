"""Frozen feature networks and random feature projectors"""
from .spec import FeatureNetworkSpec
from .conv_net import ConvFeatureNetwork
from .patch_attention import PatchAttentionNetwork
from .projector import (
    FeatureProjector,
    ProjectorParams,
    build_feature_network,
    ccm_apply,
    csm_apply,
    pooled_representation,
)

__all__ = [
    'FeatureNetworkSpec', 'ConvFeatureNetwork', 'PatchAttentionNetwork', 'FeatureProjector',
    'ProjectorParams', 'build_feature_network', 'ccm_apply', 'csm_apply', 'pooled_representation',
]
