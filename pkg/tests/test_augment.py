import pytest
import torch

from src.augment.blur import blur_sigma, gaussian_blur, gaussian_kernel1d
from src.augment.diff_augment import AugmentPolicy, adjust_brightness, cutout, diff_augment, translate
from src.augment.latent import latent_perturb, xflip_amplify
from src.augment.rng import RngStream
from src.core.train_config import TrainConfig


def images(seed=0, n=3, size=8):
    return torch.randn(n, 3, size, size, generator=torch.Generator().manual_seed(seed), dtype=torch.float64)


class TestRngStream:
    def test_same_seed_and_counter_repeat(self):
        a, b = RngStream(5), RngStream(5)
        assert torch.equal(a.normal((4,)), b.normal((4,)))
        assert a.counter == 1

    def test_state_round_trip(self):
        a = RngStream(9)
        a.uniform((2,))
        b = RngStream.from_state_dict(a.state_dict())
        assert torch.equal(a.normal((3,)), b.normal((3,)))


class TestDiffAugment:
    def test_empty_policy_is_identity(self):
        x = images()
        assert torch.equal(diff_augment(x, AugmentPolicy(ops=()), RngStream(0)), x)

    def test_zero_translation_is_identity(self):
        x = images()
        zeros = torch.zeros(3, dtype=torch.long)
        assert torch.equal(translate(x, zeros, zeros), x)

    def test_translation_fills_with_zeros(self):
        x = torch.ones(1, 1, 4, 4, dtype=torch.float64)
        out = translate(x, torch.tensor([1]), torch.tensor([0]))
        assert torch.equal(out[0, 0, -1], torch.zeros(4, dtype=torch.float64))
        assert torch.equal(out[0, 0, :-1], torch.ones(3, 4, dtype=torch.float64))

    def test_brightness_shift(self):
        x = torch.zeros(2, 3, 4, 4, dtype=torch.float64)
        out = adjust_brightness(x, torch.tensor([0.3, 0.3]))
        assert torch.allclose(out, torch.full_like(x, 0.3))

    def test_cutout_zeroes_a_window(self):
        x = torch.ones(1, 1, 8, 8, dtype=torch.float64)
        out = cutout(x, torch.tensor([4]), torch.tensor([4]), (4, 4))
        assert float(out.sum()) == 64 - 16
        assert float(out[0, 0, 2:6, 2:6].abs().sum()) == 0.0

    def test_fixed_stream_is_bit_identical(self):
        x = images(1)
        policy = AugmentPolicy()
        assert torch.equal(diff_augment(x, policy, RngStream(3)), diff_augment(x, policy, RngStream(3)))

    @pytest.mark.parametrize("seed", range(20))
    def test_gradient_matches_finite_differences(self, seed):
        x = images(seed, n=2).requires_grad_(True)
        policy = AugmentPolicy()
        assert torch.autograd.gradcheck(lambda v: diff_augment(v, policy, RngStream(seed)), (x,), fast_mode=True)

    def test_policy_parsing(self):
        policy = AugmentPolicy.from_string("color, cutout")
        assert policy.ops == ("color", "cutout")
        assert policy.to_string() == "color,cutout"
        with pytest.raises(ValueError):
            AugmentPolicy.from_string("color,rotate")


class TestGaussianBlur:
    def test_zero_sigma_is_identity(self):
        x = images()
        assert torch.equal(gaussian_blur(x, 0.0), x)

    @pytest.mark.parametrize("sigma", [0.5, 1.0, 4.0])
    def test_constant_image_unchanged(self, sigma):
        x = torch.full((1, 3, 16, 16), 0.7, dtype=torch.float64)
        assert torch.allclose(gaussian_blur(x, sigma), x, atol=1e-12)

    def test_impulse_centre_weight(self):
        x = torch.zeros(1, 1, 17, 17, dtype=torch.float64)
        x[0, 0, 8, 8] = 1.0
        kernel = gaussian_kernel1d(1.0, 3)
        assert float(gaussian_blur(x, 1.0)[0, 0, 8, 8]) == pytest.approx(float(kernel[3] ** 2), rel=1e-12)

    def test_preserves_shape(self):
        x = images(size=16)
        assert gaussian_blur(x, 2.0).shape == x.shape

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            gaussian_blur(images(), -1.0)

    @pytest.mark.parametrize("seed", range(20))
    def test_gradient_matches_finite_differences(self, seed):
        x = images(seed, n=2).requires_grad_(True)
        sigma = 0.5 + 0.1 * seed
        assert torch.autograd.gradcheck(lambda v: gaussian_blur(v, sigma), (x,), fast_mode=True)


class TestBlurSchedule:
    def test_default_start_and_end(self):
        cfg = TrainConfig()
        assert cfg.resolved_blur_images == 200_000
        assert blur_sigma(0, cfg) == 2.0
        assert blur_sigma(199_999, cfg) == 2.0
        assert blur_sigma(200_000, cfg) == 0.0

    def test_disabled_window(self):
        cfg = TrainConfig(blur_images=0)
        assert blur_sigma(0, cfg) == 0.0

    def test_levels_without_blur(self):
        assert blur_sigma(0, TrainConfig(config_level="B")) == 0.0

    def test_ramp(self):
        cfg = TrainConfig(blur_images=100, blur_ramp=True)
        assert blur_sigma(50, cfg) == pytest.approx(1.0)


class TestLatentPerturb:
    def test_zero_coefficient(self):
        z = torch.randn(4, 6, dtype=torch.float64)
        assert torch.equal(latent_perturb(z, 0.0, RngStream(0)), z)

    def test_zero_latent(self):
        z = torch.zeros(4, 6, dtype=torch.float64)
        assert torch.equal(latent_perturb(z, 0.1, RngStream(0)), z)

    def test_noise_scale(self):
        z = torch.tensor([[1.0, -2.0]], dtype=torch.float64).repeat(100_000, 1)
        noise = latent_perturb(z, 0.1, RngStream(11)) - z
        assert noise.std(dim=0).tolist() == pytest.approx([0.1, 0.2], rel=0.02)

    def test_deterministic_shift_draws_nothing(self):
        rng = RngStream(0)
        z = torch.tensor([[1.0, -2.0]], dtype=torch.float64)
        assert torch.allclose(latent_perturb(z, 0.1, rng, deterministic=True), torch.tensor([[1.1, -1.8]],
                                                                                             dtype=torch.float64))
        assert rng.counter == 0


class TestXflip:
    def test_appends_mirror(self):
        x = images(n=1)
        out = xflip_amplify(x)
        assert out.shape[0] == 2
        assert torch.equal(out[1], x[0].flip(-1))

    def test_symmetric_image(self):
        half = torch.randn(1, 3, 4, 2, dtype=torch.float64)
        x = torch.cat([half, half.flip(-1)], dim=-1)
        out = xflip_amplify(x)
        assert torch.equal(out[0], out[1])

    def test_count(self):
        assert xflip_amplify(torch.zeros(833, 3, 2, 2)).shape[0] == 1666
