"""Trainer - Orchestrates the alternating discriminator / generator loop"""
import time
from pathlib import Path
from typing import Callable, Dict, Optional

import torch
from torch import nn

from ..augment.blur import blur_sigma, gaussian_blur
from ..augment.diff_augment import diff_augment
from ..losses.adversarial import discriminator_consistency, hinge_d_loss, hinge_g_loss
from ..losses.faketwins import faketwins_loss
from ..losses.totals import DLossParts, GLossParts, total_d_loss, total_g_loss
from ..metrics.report import LOSS_COLUMNS, MetricsReport
from ..networks.ema import ema_update
from ..output.csv_generator import MetricsCSVGenerator
from ..utils.logger import Logger, get_logger
from ..utils.seeding import seed_everything
from .checkpoint import load_checkpoint
from .dataset import Dataset, epoch_order, load_dataset
from .errors import DivergenceError
from .evaluator import Evaluator
from .train_config import TrainConfig
from .train_state import TrainState, build_state, restore_state, save_state

METRICS_FILE = "metrics.csv"
FINAL_CHECKPOINT = "checkpoint_final.hpg"
BEST_CHECKPOINT = "checkpoint_best.hpg"
RUN_LOG = "train.log"


def checkpoint_name(images_seen: int) -> str:
    return f"checkpoint_{images_seen:012d}.hpg"


class TrainingStats:
    """Statistics for a training run"""

    def __init__(self):
        self.total_steps = 0
        self.steps_done = 0
        self.images_seen = 0
        self.evaluations = 0
        self.checkpoints = 0
        self.best_fid: Optional[float] = None
        self.best_images: Optional[int] = None
        self.stopped = False
        self.start_time = None
        self.end_time = None

    def get_elapsed_time(self) -> float:
        """Get elapsed time in seconds"""
        if self.start_time is None:
            return 0.0
        end = self.end_time or time.time()
        return end - self.start_time

    def get_summary(self) -> str:
        """Get summary string"""
        elapsed = self.get_elapsed_time()
        best = f"{self.best_fid:.4f} @ {self.best_images} images" if self.best_fid is not None else "n/a"
        return (
            f"📊 TRAINING RESULTS:\n"
            f"   🔁 Steps: {self.steps_done}/{self.total_steps}\n"
            f"   🖼️  Images seen: {self.images_seen}\n"
            f"   📈 Evaluations: {self.evaluations}\n"
            f"   💾 Checkpoints: {self.checkpoints}\n"
            f"   🏆 Best FID: {best}\n"
            f"   ⏱️  Time: {elapsed:.1f}s ({elapsed/60:.1f} min)"
        )


def _set_requires_grad(module: nn.Module, flag: bool):
    for param in module.parameters():
        param.requires_grad_(flag)


def _check_finite(state: TrainState, losses: Dict[str, torch.Tensor]):
    if all(torch.isfinite(torch.as_tensor(value)).all() for value in losses.values()):
        return
    parts = ", ".join(f"{name}={float(value):.6g}" for name, value in losses.items())
    raise DivergenceError(
        f"divergence at step {state.step + 1} ({state.images_seen} images seen): {parts}"
    )


def train_step(state: TrainState, real: torch.Tensor) -> TrainState:
    """
    One discriminator update followed by one generator (and head) update.

    Both phases use the same latent batch. Discriminator inputs are blurred
    by the schedule and then augmented; every random draw comes from the
    state's streams, so the successor state is a pure function of the
    state and ``real``.

    Args:
        state: State to advance in place
        real: Real batch (B, 3, R, R) in [-1, 1]

    Returns:
        The advanced state

    Raises:
        DivergenceError: If any loss is non-finite
    """
    cfg = state.cfg
    flags = cfg.features
    weights = cfg.loss_weights
    policy = cfg.augment_policy
    batch = real.shape[0]
    sigma = blur_sigma(state.images_seen, cfg)
    real = real.to(device=state.device, dtype=state.dtype)

    def disc_input(images: torch.Tensor) -> torch.Tensor:
        return diff_augment(gaussian_blur(images, sigma), policy, state.augment_rng)

    state.generator.train()
    state.discriminator.train()
    if state.head is not None:
        state.head.train()

    z = state.latent_rng.normal((batch, cfg.effective_z_dim), dtype=state.dtype).to(state.device)

    # discriminator phase
    _set_requires_grad(state.discriminator, True)
    with torch.no_grad():
        fake = state.generator(z)
    real_logits = state.discriminate(disc_input(real))
    fake_logits = state.discriminate(disc_input(fake))
    d_parts = DLossParts(adversarial=hinge_d_loss(real_logits, fake_logits))
    if flags.consistency:
        d_parts.dc_fake = discriminator_consistency(fake_logits)
        d_parts.dc_real = discriminator_consistency(real_logits)
    loss_d = total_d_loss(d_parts, weights)
    _check_finite(state, {"loss_d": loss_d, "loss_d_adv": d_parts.adversarial,
                          "loss_dc_fake": d_parts.dc_fake, "loss_dc_real": d_parts.dc_real})
    state.opt_d.zero_grad(set_to_none=True)
    loss_d.backward()
    state.opt_d.step()

    # generator phase
    _set_requires_grad(state.discriminator, False)
    try:
        fake_logits = state.discriminate(disc_input(state.generator(z)))
        g_parts = GLossParts(adversarial=hinge_g_loss(fake_logits))
        if flags.consistency:
            g_parts.dc_fake = discriminator_consistency(fake_logits)
        if flags.faketwins:
            g_parts.faketwins = faketwins_loss(
                z, state.generator, list(state.projectors.values()), state.head, policy, state.augment_rng,
                state.objective, cfg.l1, cfg.latent_perturb_deterministic,
            )
        loss_g = total_g_loss(g_parts, weights)
        _check_finite(state, {"loss_d": loss_d, "loss_g": loss_g, "loss_g_adv": g_parts.adversarial,
                              "loss_dc_fake": g_parts.dc_fake, "loss_ft": g_parts.faketwins})
        state.opt_g.zero_grad(set_to_none=True)
        loss_g.backward()
        state.opt_g.step()
    finally:
        _set_requires_grad(state.discriminator, True)

    ema_update(state.ema, state.generator)
    state.images_seen += batch
    state.step += 1
    state.last_losses = {
        "loss_d": float(loss_d),
        "loss_g": float(loss_g),
        "loss_dc_real": float(d_parts.dc_real),
        "loss_dc_fake": float(d_parts.dc_fake),
        "loss_ft": float(g_parts.faketwins),
        "blur_sigma": sigma,
    }
    for name in LOSS_COLUMNS:
        state.loss_sums[name] = state.loss_sums.get(name, 0.0) + state.last_losses[name]
    state.loss_count += 1
    return state


class Trainer:
    """
    Runs training steps over a dataset with evaluation and checkpoints.

    Evaluations fire when images seen crosses each multiple of
    ``eval_interval`` up to ``total_images``, plus once at the end.
    Checkpoints fire on each multiple of ``checkpoint_interval`` and at
    the end.
    """

    def __init__(self, cfg: TrainConfig, dataset: Dataset, out_dir: Optional[str] = None):
        """
        Initialize trainer.

        Args:
            cfg: Validated configuration
            dataset: Training images (also the evaluation reference)
            out_dir: Run directory (default: cfg.out_dir)
        """
        if len(dataset) < cfg.batch_size:
            raise ValueError(f"Dataset of {len(dataset)} images is smaller than batch size {cfg.batch_size}")
        self.cfg = cfg
        self.dataset = dataset
        self.out_dir = Path(out_dir or cfg.out_dir)
        self.logger = get_logger()
        self.csv = MetricsCSVGenerator()
        self.stats = TrainingStats()
        self._evaluator: Optional[Evaluator] = None
        self.state: Optional[TrainState] = None
        self._should_stop = False
        self._is_paused = False

    @property
    def metrics_path(self) -> Path:
        return self.out_dir / METRICS_FILE

    @property
    def evaluator(self) -> Evaluator:
        if self._evaluator is None:
            self._evaluator = Evaluator(self.cfg, self.dataset)
        return self._evaluator

    def _next_batch(self, state: TrainState) -> torch.Tensor:
        per_epoch = len(self.dataset) // self.cfg.batch_size
        if state.batch_index >= per_epoch:
            state.epoch += 1
            state.batch_index = 0
        order = epoch_order(len(self.dataset), self.cfg.data_seed, state.epoch)
        start = state.batch_index * self.cfg.batch_size
        state.batch_index += 1
        return self.dataset.batch(order[start:start + self.cfg.batch_size])

    def _mean_losses(self, state: TrainState) -> Dict[str, float]:
        if state.loss_count == 0:
            return {}
        means = {name: value / state.loss_count for name, value in state.loss_sums.items()}
        state.loss_sums = {}
        state.loss_count = 0
        return means

    def _evaluate(self, state: TrainState) -> MetricsReport:
        report = self.evaluator.evaluate(
            state.ema.module, state.step, state.images_seen, state, self._mean_losses(state)
        )
        self.stats.evaluations += 1
        if state.best_fid is None or report.fid < state.best_fid:
            state.best_fid = report.fid
            state.best_images = state.images_seen
            save_state(state, str(self.out_dir / BEST_CHECKPOINT))
            self.logger.info(f"🏆 New best FID {report.fid:.4f}")
        return report

    def _save(self, state: TrainState, name: str):
        save_state(state, str(self.out_dir / name))
        self.stats.checkpoints += 1
        self.logger.info(f"💾 Checkpoint: {name}")

    def run(self, state: Optional[TrainState] = None,
            progress_callback: Optional[Callable[[int, int, str], None]] = None) -> TrainingStats:
        """
        Train until ``total_images`` images have been seen.

        Args:
            state: State to continue from (default: a fresh state)
            progress_callback: Optional callback(current_step, total_steps, status_message)

        Returns:
            Training statistics
        """
        self.out_dir.mkdir(parents=True, exist_ok=True)
        log_path = str(self.out_dir / RUN_LOG)
        Logger.attach_file(log_path)
        try:
            return self._run(state, progress_callback)
        finally:
            Logger.detach_file(log_path)

    def _run(self, state: Optional[TrainState],
             progress_callback: Optional[Callable[[int, int, str], None]]) -> TrainingStats:
        cfg = self.cfg
        if state is None:
            seed_everything(cfg.weight_seed)
            state = build_state(cfg)
            self.csv.generate([], str(self.metrics_path))
        else:
            kept = self.csv.truncate_after(str(self.metrics_path), state.images_seen)
            self.logger.info(f"⏩ Resuming at {state.images_seen} images ({kept} metric row(s) kept)")

        self.stats = TrainingStats()
        self.stats.total_steps = cfg.total_steps
        self.stats.steps_done = state.step
        self.stats.start_time = time.time()
        self._should_stop = False

        self.logger.info(f"🤖 Starting training, config level {cfg.config_level}")
        self.logger.info(f"📦 Batch size: {cfg.batch_size} | total images: {cfg.total_images}")
        self.logger.info(f"📁 Dataset: {len(self.dataset)} images | output: {self.out_dir}")

        while state.step < cfg.total_steps:
            if self._should_stop:
                self.logger.warning("Training stopped by user")
                self.stats.stopped = True
                self._save(state, checkpoint_name(state.images_seen))
                break

            while self._is_paused:
                time.sleep(0.1)
                if self._should_stop:
                    break
            if self._should_stop:
                continue

            before = state.images_seen
            train_step(state, self._next_batch(state))
            self.stats.steps_done = state.step
            self.stats.images_seen = state.images_seen

            if state.step % cfg.log_interval == 0:
                losses = state.last_losses
                self.logger.info(
                    f"🔄 [{state.step}/{cfg.total_steps}] {state.images_seen} images | "
                    f"D {losses['loss_d']:.4f} | G {losses['loss_g']:.4f} | "
                    f"FT {losses['loss_ft']:.4f} | blur σ {losses['blur_sigma']:.2f}"
                )
            if progress_callback:
                progress_callback(state.step, cfg.total_steps, f"{state.images_seen} images seen")

            crossed = self._crossed(before, state.images_seen, cfg.eval_interval, cfg.total_images)
            final = state.step == cfg.total_steps
            rows = crossed + (1 if final else 0)
            if rows:
                report = self._evaluate(state)
                for _ in range(rows):
                    self.csv.append(report, str(self.metrics_path))

            if self._crossed(before, state.images_seen, cfg.checkpoint_interval, None) and not final:
                self._save(state, checkpoint_name(state.images_seen))
            if final:
                self._save(state, FINAL_CHECKPOINT)

        self.stats.end_time = time.time()
        self.stats.best_fid = state.best_fid
        self.stats.best_images = state.best_images
        self.state = state
        self.logger.info(f"\n{self.stats.get_summary()}")
        return self.stats

    @staticmethod
    def _crossed(before: int, after: int, interval: int, limit: Optional[int]) -> int:
        """Number of multiples of ``interval`` in (before, after], capped at ``limit``"""
        if limit is not None:
            after_capped = min(after, limit)
            if after_capped <= before:
                return 0
            after = after_capped
        return after // interval - before // interval

    def stop(self):
        """Stop training after the current step"""
        self._should_stop = True
        self._is_paused = False

    def pause(self):
        """Pause training"""
        self._is_paused = True

    def resume(self):
        """Resume training"""
        self._is_paused = False


def train(cfg: TrainConfig, resume: Optional[str] = None, dataset: Optional[Dataset] = None,
          progress_callback: Optional[Callable[[int, int, str], None]] = None) -> TrainingStats:
    """
    Full training run.

    Args:
        cfg: Validated configuration
        resume: Checkpoint to continue from
        dataset: Training images (default: loaded from cfg.dataset_path)
        progress_callback: Optional callback(current_step, total_steps, status_message)

    Returns:
        Training statistics, including the best FID and where it occurred
    """
    if dataset is None:
        if not cfg.dataset_path:
            raise ValueError("No dataset: set dataset_path in the config or pass a dataset")
        dataset = load_dataset(cfg.dataset_path, cfg.resolution, cfg.subset, cfg.subset_seed,
                               cfg.xflip, cfg.torch_dtype)
    trainer = Trainer(cfg, dataset)
    state = None
    if resume:
        header, tensors = load_checkpoint(resume)
        seed_everything(cfg.weight_seed)
        state = restore_state(build_state(cfg), header, tensors)
    return trainer.run(state, progress_callback)

