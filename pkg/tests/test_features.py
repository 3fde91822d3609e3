import pytest
import torch
import torch.nn.functional as F

from src.features.projector import (
    FeatureProjector,
    ProjectorParams,
    build_feature_network,
    ccm_apply,
    csm_apply,
    pooled_representation,
)
from src.features.spec import FeatureNetworkSpec


def batch(resolution=64, n=2, seed=0):
    gen = torch.Generator().manual_seed(seed)
    return torch.rand(n, 3, resolution, resolution, generator=gen) * 2 - 1


def stages(channels=(8, 16, 32, 64), sizes=(16, 8, 4, 2), seed=0):
    gen = torch.Generator().manual_seed(seed)
    return [torch.randn(2, c, s, s, generator=gen, dtype=torch.float64) for c, s in zip(channels, sizes)]


class TestFeatureNetworks:
    @pytest.mark.parametrize("kind", ["conv", "patch_attention"])
    def test_stage_sizes(self, kind):
        network = build_feature_network(FeatureNetworkSpec(kind=kind, resolution=64))
        outputs = network(batch())
        assert [o.shape[-1] for o in outputs] == [16, 8, 4, 2]
        assert [o.shape[1] for o in outputs] == [8, 16, 32, 64]

    @pytest.mark.parametrize("kind", ["conv", "patch_attention"])
    def test_same_seed_same_outputs(self, kind):
        spec = FeatureNetworkSpec(kind=kind, resolution=32, seed=5)
        x = batch(32)
        for a, b in zip(build_feature_network(spec)(x), build_feature_network(spec)(x)):
            assert torch.equal(a, b)

    def test_frozen(self):
        network = build_feature_network(FeatureNetworkSpec())
        assert not any(p.requires_grad for p in network.parameters())
        assert not network.training

    def test_spec_validation(self):
        with pytest.raises(ValueError):
            FeatureNetworkSpec(resolution=48)
        with pytest.raises(ValueError):
            FeatureNetworkSpec(kind="resnet")
        with pytest.raises(ValueError):
            FeatureNetworkSpec(weights_path="weights.pt")

    def test_spec_dict_round_trip(self):
        spec = FeatureNetworkSpec(kind="patch_attention", seed=3)
        assert FeatureNetworkSpec.from_dict(spec.to_dict()) == spec


class TestCrossChannelMixing:
    def test_identity_weights(self):
        x = stages()
        for a, b in zip(ccm_apply(x, ProjectorParams.identity((8, 16, 32, 64))), x):
            assert torch.allclose(a, b)

    def test_hand_computed_pixel(self):
        params = ProjectorParams(ccm=[torch.tensor([[1.0, 1.0], [1.0, -1.0]]).view(2, 2, 1, 1)], csm=[], csm_up=[])
        pixel = torch.tensor([3.0, 1.0]).view(1, 2, 1, 1)
        assert ccm_apply([pixel], params)[0].flatten().tolist() == [4.0, 2.0]

    def test_linearity(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=1)
        x = stages()
        scaled = ccm_apply([2.5 * s for s in x], params)
        for a, b in zip(scaled, ccm_apply(x, params)):
            assert torch.allclose(a, 2.5 * b, atol=1e-10)

    def test_channel_mismatch(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=1)
        with pytest.raises(ValueError):
            ccm_apply(stages(channels=(4, 16, 32, 64)), params)


def _reference_csm(x, params):
    out = {3: F.conv2d(x[3], params.csm[3].to(x[3]), padding=1)}
    for s in (2, 1, 0):
        up = F.interpolate(out[s + 1], size=x[s].shape[-2:], mode="bilinear", align_corners=False)
        mixed = x[s] + F.conv2d(up, params.csm_up[s].to(up), padding=1)
        out[s] = F.conv2d(mixed, params.csm[s].to(mixed), padding=1)
    return [out[s] for s in range(4)]


class TestCrossScaleMixing:
    def test_zero_input(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=2)
        zeros = [torch.zeros_like(s) for s in stages()]
        for level in csm_apply(zeros, params):
            assert float(level.abs().max()) == 0.0

    def test_shapes(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=2)
        x = stages()
        assert [p.shape for p in csm_apply(x, params)] == [s.shape for s in x]

    def test_matches_reference_recurrence(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=3)
        x = stages(seed=4)
        for a, b in zip(csm_apply(x, params), _reference_csm(x, params)):
            assert torch.allclose(a, b, atol=1e-6)

    def test_deeper_levels_ignore_shallow_stages(self):
        params = ProjectorParams.random((8, 16, 32, 64), seed=3)
        x = stages(seed=5)
        changed = [x[0] + 1.0] + x[1:]
        for a, b in zip(csm_apply(x, params)[1:], csm_apply(changed, params)[1:]):
            assert torch.equal(a, b)


class TestProjector:
    def test_mixing_weights_are_buffers(self):
        projector = FeatureProjector(FeatureNetworkSpec(), projector_seed=0)
        assert not any(p.requires_grad for p in projector.parameters())
        assert "ccm_0" in dict(projector.named_buffers())
        projector.train()
        assert not projector.training

    def test_same_seed_same_pyramid(self):
        spec = FeatureNetworkSpec(seed=1)
        x = batch(32)
        for a, b in zip(FeatureProjector(spec, 7)(x), FeatureProjector(spec, 7)(x)):
            assert torch.equal(a, b)


class TestPooledRepresentation:
    def test_constant_maps(self):
        pyramid = [torch.full((2, c, 4, 4), 1.5) for c in (1, 2)]
        assert torch.equal(pooled_representation(pyramid), torch.full((2, 3), 1.5))

    def test_two_networks_width(self):
        x = batch(32)
        pyramids = [FeatureProjector(FeatureNetworkSpec(kind=kind), 0)(x) for kind in ("conv", "patch_attention")]
        assert pooled_representation(*pyramids).shape == (2, 240)

    def test_spatial_permutation_invariance(self):
        level = torch.randn(2, 3, 4, 4, dtype=torch.float64)
        perm = torch.randperm(16)
        shuffled = level.flatten(2)[:, :, perm].view(2, 3, 4, 4)
        assert torch.allclose(pooled_representation([level]), pooled_representation([shuffled]))

    def test_batch_mismatch(self):
        with pytest.raises(ValueError):
            pooled_representation([torch.zeros(2, 1, 2, 2)], [torch.zeros(3, 1, 2, 2)])
