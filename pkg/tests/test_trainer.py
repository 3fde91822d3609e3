import csv
import threading
from dataclasses import replace
from pathlib import Path

import pytest
import torch

from src.core.checkpoint import load_checkpoint
from src.core.errors import CheckpointError, DivergenceError
from src.core.evaluator import evaluate, generate_images
from src.core.sampler import sample
from src.core.train_state import build_state, load_ema_generator, load_state
from src.core.trainer import (
    BEST_CHECKPOINT, FINAL_CHECKPOINT, METRICS_FILE, RUN_LOG, Trainer, checkpoint_name, train, train_step,
)
from src.features.projector import FeatureProjector


def metric_rows(out_dir):
    with open(Path(out_dir) / METRICS_FILE, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))[1:]


def final_tensors(out_dir):
    return load_checkpoint(str(Path(out_dir) / FINAL_CHECKPOINT))[1]


def assert_same_tensors(a, b):
    assert a.keys() == b.keys()
    for name in a:
        assert torch.equal(a[name], b[name]), name


def snapshot(module):
    return {name: value.detach().clone() for name, value in module.state_dict().items()}


class TestTrainStep:
    @pytest.mark.parametrize("level", ["A", "B", "C", "D", "E"])
    def test_every_level_runs(self, tiny_cfg, tiny_dataset, level):
        state = build_state(replace(tiny_cfg, config_level=level))
        train_step(state, tiny_dataset.batch([0, 1, 2, 3]))
        assert state.step == 1 and state.images_seen == 4
        losses = state.last_losses
        assert all(torch.isfinite(torch.tensor(v)) for v in losses.values())
        if level in ("A", "B", "C"):
            assert losses["loss_dc_real"] == 0.0 and losses["loss_dc_fake"] == 0.0
        if level != "E":
            assert losses["loss_ft"] == 0.0
            assert state.head is None

    def test_single_discriminator_baseline(self, tiny_cfg):
        state = build_state(replace(tiny_cfg, config_level="A"))
        assert state.projectors == {}
        assert list(state.discriminate(torch.zeros(2, 3, 32, 32, dtype=torch.float64)).maps) == ["image/1"]

    def test_only_trainable_weights_change(self, tiny_cfg, tiny_dataset):
        state = build_state(tiny_cfg)
        before = {name: snapshot(module) for name, module in state.trainable_modules().items()}
        train_step(state, tiny_dataset.batch([0, 1, 2, 3]))
        for name, module in state.trainable_modules().items():
            params = dict(module.named_parameters())
            assert any(not torch.equal(before[name][p], params[p].detach()) for p in params), name
        for name, projector in state.projectors.items():
            fresh = FeatureProjector(projector.spec, tiny_cfg.projector_seed + list(state.projectors).index(name))
            fresh = fresh.to(torch.float64)
            for key, value in fresh.state_dict().items():
                assert torch.equal(projector.state_dict()[key], value), f"{name}.{key}"

    def test_identical_states_step_identically(self, tiny_cfg, tiny_dataset):
        a, b = build_state(tiny_cfg), build_state(tiny_cfg)
        batch = tiny_dataset.batch([4, 5, 6, 7])
        train_step(a, batch)
        train_step(b, batch)
        for name in a.trainable_modules():
            for key, value in a.trainable_modules()[name].state_dict().items():
                assert torch.equal(value, b.trainable_modules()[name].state_dict()[key])
        assert a.augment_rng == b.augment_rng and a.latent_rng == b.latent_rng

    def test_divergence_is_reported(self, tiny_cfg, tiny_dataset, monkeypatch):
        monkeypatch.setattr(
            "src.core.trainer.hinge_d_loss", lambda real, fake: torch.tensor(float("nan"), dtype=torch.float64)
        )
        with pytest.raises(DivergenceError, match="divergence at step 1"):
            train_step(build_state(tiny_cfg), tiny_dataset.batch([0, 1, 2, 3]))

    def test_generator_divergence_unfreezes_discriminator(self, tiny_cfg, tiny_dataset, monkeypatch):
        monkeypatch.setattr(
            "src.core.trainer.hinge_g_loss", lambda fake: torch.tensor(float("nan"), dtype=torch.float64)
        )
        state = build_state(tiny_cfg)
        with pytest.raises(DivergenceError, match="loss_g=nan"):
            train_step(state, tiny_dataset.batch([0, 1, 2, 3]))
        assert all(p.requires_grad for p in state.discriminator.parameters())


class TestTrainer:
    def test_two_steps_one_final_checkpoint(self, tiny_cfg, tiny_dataset):
        calls = []
        stats = Trainer(tiny_cfg, tiny_dataset).run(progress_callback=lambda *args: calls.append(args))
        out = Path(tiny_cfg.out_dir)
        assert stats.steps_done == 2 and stats.images_seen == 8
        assert [c[0] for c in calls] == [1, 2]
        assert (out / FINAL_CHECKPOINT).exists()
        assert (out / BEST_CHECKPOINT).exists()
        assert sorted(p.name for p in out.glob("checkpoint_0*.hpg")) == []
        assert len(metric_rows(out)) == 1
        assert stats.best_fid is not None and stats.best_images == 8
        assert "TRAINING RESULTS" in stats.get_summary()
        assert "Starting training" in (out / RUN_LOG).read_text(encoding="utf-8")

    def test_metric_rows_per_interval(self, tiny_cfg, tiny_dataset, monkeypatch):
        evaluated = []
        original = Trainer._evaluate

        def counting(self, state):
            evaluated.append(state.images_seen)
            return original(self, state)

        monkeypatch.setattr(Trainer, "_evaluate", counting)
        cfg = replace(tiny_cfg, eval_interval=4)
        Trainer(cfg, tiny_dataset).run()
        rows = metric_rows(cfg.out_dir)
        assert len(rows) == 8 // 4 + 1
        assert [row[1] for row in rows] == ["4", "8", "8"]
        assert evaluated == [4, 8]
        assert rows[1] == rows[2]

    def test_runs_are_reproducible(self, tiny_cfg, tiny_dataset, tmp_path):
        Trainer(tiny_cfg, tiny_dataset).run()
        other = replace(tiny_cfg, out_dir=str(tmp_path / "again"))
        Trainer(other, tiny_dataset).run()
        assert_same_tensors(final_tensors(tiny_cfg.out_dir), final_tensors(other.out_dir))

    def test_resume_matches_uninterrupted_run(self, tiny_cfg, tiny_dataset, tmp_path):
        cfg = replace(tiny_cfg, checkpoint_interval=4)
        Trainer(cfg, tiny_dataset).run()
        midpoint = Path(cfg.out_dir) / checkpoint_name(4)
        assert midpoint.exists()

        resumed = replace(cfg, out_dir=str(tmp_path / "resumed"))
        stats = train(resumed, resume=str(midpoint), dataset=tiny_dataset)
        assert stats.steps_done == 2
        assert_same_tensors(final_tensors(cfg.out_dir), final_tensors(resumed.out_dir))

    def test_resume_truncates_later_metric_rows(self, tiny_cfg, tiny_dataset):
        cfg = replace(tiny_cfg, eval_interval=4, checkpoint_interval=4)
        Trainer(cfg, tiny_dataset).run()
        state = load_state(str(Path(cfg.out_dir) / checkpoint_name(4)), cfg)
        Trainer(cfg, tiny_dataset).run(state)
        assert [row[1] for row in metric_rows(cfg.out_dir)] == ["4", "8", "8"]

    def test_stop_saves_checkpoint(self, tiny_cfg, tiny_dataset):
        trainer = Trainer(tiny_cfg, tiny_dataset)
        stats = trainer.run(progress_callback=lambda *args: trainer.stop())
        assert stats.stopped and stats.steps_done == 1
        assert (Path(tiny_cfg.out_dir) / checkpoint_name(4)).exists()
        assert not (Path(tiny_cfg.out_dir) / FINAL_CHECKPOINT).exists()

    def test_pause_and_resume(self, tiny_cfg, tiny_dataset):
        trainer = Trainer(tiny_cfg, tiny_dataset)

        def pause_once(step, total, message):
            if step == 1:
                trainer.pause()
                threading.Timer(0.2, trainer.resume).start()

        stats = trainer.run(progress_callback=pause_once)
        assert not stats.stopped and stats.steps_done == 2

    def test_dataset_smaller_than_batch(self, tiny_cfg, tiny_dataset):
        with pytest.raises(ValueError):
            Trainer(replace(tiny_cfg, batch_size=16), tiny_dataset)

    def test_train_needs_a_dataset(self, tiny_cfg):
        with pytest.raises(ValueError):
            train(tiny_cfg)


@pytest.fixture
def trained(tiny_cfg, tiny_dataset):
    Trainer(tiny_cfg, tiny_dataset).run()
    return tiny_cfg, str(Path(tiny_cfg.out_dir) / FINAL_CHECKPOINT)


class TestEvaluationAndSampling:
    def test_evaluate_is_repeatable(self, trained, tiny_dataset):
        cfg, checkpoint = trained
        first = evaluate(checkpoint, tiny_dataset, cfg)
        assert first.to_row() == evaluate(checkpoint, tiny_dataset, cfg).to_row()
        assert first.images_seen == 8 and first.n_gen == 8
        assert 0.0 <= first.signed_logit_fraction <= 1.0

    def test_evaluate_rejects_other_config(self, trained, tiny_dataset):
        cfg, checkpoint = trained
        with pytest.raises(CheckpointError, match="digest"):
            evaluate(checkpoint, tiny_dataset, replace(cfg, weight_seed=5))

    def test_ema_generator_from_checkpoint(self, trained):
        cfg, checkpoint = trained
        stored, generator = load_ema_generator(checkpoint)
        assert stored.digest() == cfg.digest()
        images = generate_images(generator, 3, stored.effective_z_dim, seed=0)
        assert images.shape == (3, 3, 32, 32) and images.dtype == torch.float64
        assert torch.equal(images, generate_images(generator, 3, stored.effective_z_dim, seed=0))

    def test_sample_grid(self, trained, tmp_path):
        _, checkpoint = trained
        first, second = tmp_path / "a.png", tmp_path / "b.png"
        sample(checkpoint, 16, 0, str(first))
        sample(checkpoint, 16, 0, str(second))
        assert first.read_bytes() == second.read_bytes()
        from PIL import Image
        with Image.open(first) as image:
            assert image.size == (128, 128)

    def test_sample_count_must_be_positive(self, trained, tmp_path):
        _, checkpoint = trained
        with pytest.raises(ValueError):
            sample(checkpoint, 0, 0, str(tmp_path / "grid.png"))
