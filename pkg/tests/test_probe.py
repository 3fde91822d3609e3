from dataclasses import replace

import pytest
import torch

from src.augment.rng import RngStream
from src.core.probe import (
    ProbeReport, build_diversity_projectors, fit_diversity_head, generator_sets, perturbed_batch,
    probe_batch_diversity,
)
from src.core.synthetic import color_square_sets, texture_sets
from src.core.train_config import TrainConfig
from src.losses.faketwins import faketwins_on_views
from src.networks.generator import Generator
from src.ssl.objectives import build_objective


class TestProbeReport:
    def test_verdicts(self):
        report = ProbeReport(sigmas=(0.0, 1.0), draws=1, means={
            "identical": [3.0, 3.5],
            "perturbed": [2.0, 2.5],
            "distinct": [1.0, 0.5],
        })
        assert report.verdicts == {
            "identical_gt_distinct": True,
            "perturbed_between": True,
            "nondecreasing_in_sigma": False,
        }

    def test_ordering_uses_smallest_sigma(self):
        report = ProbeReport(sigmas=(2.0, 0.0), draws=1, means={
            "identical": [0.5, 3.0],
            "distinct": [1.0, 1.0],
        })
        assert report.verdicts["identical_gt_distinct"] is True
        assert report.verdicts["nondecreasing_in_sigma"] is True

    def test_perturbed_outside_the_range(self):
        report = ProbeReport(sigmas=(0.0,), draws=1, means={
            "identical": [3.0], "perturbed": [0.5], "distinct": [1.0],
        })
        assert report.verdicts["perturbed_between"] is False

    def test_ties_are_not_strictly_greater(self):
        report = ProbeReport(sigmas=(0.0, 1.0), draws=1, means={"identical": [1.0, 1.0], "distinct": [1.0, 1.0]})
        assert report.verdicts["identical_gt_distinct"] is False
        assert report.verdicts["nondecreasing_in_sigma"] is True

    def test_summary_lists_sets(self):
        report = ProbeReport(sigmas=(0.0, 2.0), draws=5, means={"identical": [1.0, 2.0]})
        summary = report.get_summary()
        assert "identical" in summary and "σ=2" in summary and "5 draws" in summary


class TestHeadFit:
    def test_zero_steps_keeps_initial_weights(self, tiny_cfg):
        projectors = build_diversity_projectors(tiny_cfg)
        reference = color_square_sets(n=4, resolution=32, seed=0)["distinct"]
        first = fit_diversity_head(tiny_cfg, projectors, reference, steps=0)
        second = fit_diversity_head(tiny_cfg, projectors, reference, steps=0)
        for a, b in zip(first.parameters(), second.parameters()):
            assert torch.equal(a, b)
        assert first.training

    def test_fit_is_reproducible_and_moves_weights(self, tiny_cfg):
        projectors = build_diversity_projectors(tiny_cfg)
        reference = color_square_sets(n=4, resolution=32, seed=0)["distinct"]
        initial = fit_diversity_head(tiny_cfg, projectors, reference, steps=0)
        first = fit_diversity_head(tiny_cfg, projectors, reference, steps=3, seed=1)
        second = fit_diversity_head(tiny_cfg, projectors, reference, steps=3, seed=1)
        assert all(torch.equal(a, b) for a, b in zip(first.parameters(), second.parameters()))
        assert any(not torch.equal(a, b) for a, b in zip(first.parameters(), initial.parameters()))

    def test_fit_lowers_the_reference_loss(self, tiny_cfg):
        projectors = build_diversity_projectors(tiny_cfg)
        reference = texture_sets(n=4, resolution=32, seed=0)["distinct"].to(torch.float64)
        objective = build_objective(tiny_cfg.ssl_kind)

        def mean_loss(head):
            with torch.no_grad():
                rng = RngStream(7)
                return sum(float(faketwins_on_views(reference, reference, projectors, head,
                                                    tiny_cfg.augment_policy, rng, objective))
                           for _ in range(5)) / 5

        fresh = fit_diversity_head(tiny_cfg, projectors, reference, steps=0)
        fitted = fit_diversity_head(tiny_cfg, projectors, reference, steps=100)
        assert mean_loss(fitted) < mean_loss(fresh)

    def test_rejects_tiny_pool(self, tiny_cfg):
        projectors = build_diversity_projectors(tiny_cfg)
        with pytest.raises(ValueError):
            fit_diversity_head(tiny_cfg, projectors, torch.zeros(1, 3, 32, 32, dtype=torch.float64))

    def test_rejects_negative_steps(self, tiny_cfg):
        projectors = build_diversity_projectors(tiny_cfg)
        with pytest.raises(ValueError):
            fit_diversity_head(tiny_cfg, projectors, torch.zeros(2, 3, 32, 32, dtype=torch.float64), steps=-1)


class TestBatchDiversity:
    def test_shape_and_reproducibility(self, tiny_cfg):
        sets = color_square_sets(n=4, resolution=32, seed=0)
        first = probe_batch_diversity(tiny_cfg, sets, sigmas=(0.0, 2.0), draws=2, seed=3, fit_steps=2)
        second = probe_batch_diversity(tiny_cfg, sets, sigmas=(0.0, 2.0), draws=2, seed=3, fit_steps=2)
        assert first.sigmas == (0.0, 2.0)
        assert set(first.means) == {"identical", "perturbed", "distinct"}
        assert all(len(values) == 2 for values in first.means.values())
        assert first.means == second.means
        assert all(value >= 0.0 for values in first.stds.values() for value in values)

    def test_every_sigma_replays_the_same_draws(self, tiny_cfg):
        sets = {"distinct": texture_sets(n=4, resolution=32, seed=1)["distinct"]}
        report = probe_batch_diversity(tiny_cfg, sets, sigmas=(0.0, 0.0), draws=3, fit_steps=2)
        assert report.means["distinct"][0] == report.means["distinct"][1]

    def test_explicit_reference_pool(self, tiny_cfg):
        sets = color_square_sets(n=4, resolution=32, seed=0)
        pooled = probe_batch_diversity(tiny_cfg, sets, sigmas=(0.0,), draws=1, fit_steps=2)
        explicit = probe_batch_diversity(tiny_cfg, sets, sigmas=(0.0,), draws=1, fit_steps=2,
                                         reference=torch.cat(list(sets.values())))
        assert pooled.means == explicit.means

    def test_runs_without_projected_config(self, tiny_cfg):
        sets = {"distinct": color_square_sets(n=4, resolution=32, seed=0)["distinct"]}
        report = probe_batch_diversity(replace(tiny_cfg, config_level="A"), sets, sigmas=(0.0,), draws=1,
                                       fit_steps=1)
        assert torch.isfinite(torch.tensor(report.means["distinct"])).all()

    @pytest.mark.slow
    @pytest.mark.parametrize("family", [color_square_sets, texture_sets])
    def test_full_ladder_ordering(self, family):
        report = probe_batch_diversity(TrainConfig(), family(n=16, resolution=32, seed=0),
                                       sigmas=(0.0, 1.0, 2.0, 4.0), draws=100)
        assert report.verdicts == {
            "identical_gt_distinct": True,
            "perturbed_between": True,
            "nondecreasing_in_sigma": True,
        }, report.to_table()


class TestGeneratorSets:
    @pytest.fixture
    def generator(self):
        torch.manual_seed(0)
        return Generator(z_dim=8, resolution=32, base_channels=16, max_channels=16).double().eval()

    def test_zero_noise_repeats_one_image(self, generator):
        batch = perturbed_batch(generator, 3, l1=0.0, seed=0)
        assert batch.shape == (3, 3, 32, 32)
        assert torch.allclose(batch[0], batch[2])

    def test_sets(self, generator):
        sets = generator_sets(generator, 4, l1=0.1, seed=0)
        assert set(sets) == {"identical", "perturbed", "distinct"}
        assert torch.allclose(sets["identical"][0], sets["identical"][3])
        assert not torch.allclose(sets["distinct"][0], sets["distinct"][1])
        assert not torch.allclose(sets["perturbed"][0], sets["perturbed"][1])

    def test_invalid_count(self, generator):
        with pytest.raises(ValueError):
            perturbed_batch(generator, 0, l1=0.1, seed=0)
