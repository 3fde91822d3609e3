"""Distribution metrics for a generator against a dataset"""
from typing import Dict, Optional

import torch

from ..augment.rng import RngStream
from ..metrics.diagnostics import signed_logit_fraction
from ..metrics.distances import frechet_distance, kernel_distance, precision_recall
from ..metrics.embedding import EmbeddingStats, SurrogateEmbedder
from ..metrics.ppl import perceptual_path_length
from ..metrics.report import MetricsReport
from ..networks.generator import Generator
from ..utils.logger import get_logger
from .checkpoint import load_checkpoint
from .dataset import Dataset
from .train_config import TrainConfig
from .train_state import TrainState, build_state, restore_state

GENERATE_BATCH = 256


@torch.no_grad()
def generate_images(generator: Generator, n: int, z_dim: int, seed: int,
                    batch_size: int = GENERATE_BATCH) -> torch.Tensor:
    """
    ``n`` images from latents drawn on a fresh stream of ``seed``.

    Returns:
        (n, 3, R, R) float64 tensor on the CPU
    """
    if n <= 0:
        raise ValueError(f"Number of images must be positive, got {n}")
    param = next(generator.parameters())
    z = RngStream(seed).normal((n, z_dim))
    chunks = [
        generator(z[i:i + batch_size].to(device=param.device, dtype=param.dtype)).to(torch.float64).cpu()
        for i in range(0, n, batch_size)
    ]
    return torch.cat(chunks, dim=0)


class Evaluator:
    """
    Scores generators against one dataset.

    The surrogate embedding and the real-set statistics are computed once
    and reused for every evaluation of a run.
    """

    def __init__(self, cfg: TrainConfig, dataset: Dataset):
        self.cfg = cfg
        self.dataset = dataset
        self.logger = get_logger()
        self.embedder = SurrogateEmbedder(cfg.embed_dim, cfg.embed_seed).to(torch.float64)
        self.real_embeddings = self.embedder.embed(dataset.images.to(torch.float64))
        self.real_stats = EmbeddingStats.from_embeddings(self.real_embeddings)
        self.n_gen = cfg.resolved_eval_samples(len(dataset))

    @torch.no_grad()
    def _real_logit_fraction(self, state: TrainState) -> float:
        was_training = state.discriminator.training
        state.discriminator.eval()
        try:
            totals = []
            for i in range(0, len(self.dataset), GENERATE_BATCH):
                images = self.dataset.images[i:i + GENERATE_BATCH].to(device=state.device, dtype=state.dtype)
                totals.append(state.discriminate(images).total_per_sample().to(torch.float64).cpu())
        finally:
            state.discriminator.train(was_training)
        return signed_logit_fraction(torch.cat(totals))

    def _embed_generated(self, images: torch.Tensor) -> torch.Tensor:
        return self.embedder(images.to(torch.float64))

    def evaluate(self, generator: Generator, step: int, images_seen: int,
                 state: Optional[TrainState] = None,
                 losses: Optional[Dict[str, float]] = None) -> MetricsReport:
        """
        Full metric row for one generator.

        Args:
            generator: Generator to score (the EMA copy)
            step: Training step recorded in the row
            images_seen: Images seen recorded in the row
            state: Source of the discriminator for the signed-logit fraction
            losses: Mean training losses recorded in the row

        Returns:
            MetricsReport
        """
        cfg = self.cfg
        z_dim = generator.z_dim
        fake = generate_images(generator, self.n_gen, z_dim, cfg.eval_seed)
        gen_embeddings = self.embedder.embed(fake)

        fid = frechet_distance(self.real_stats, EmbeddingStats.from_embeddings(gen_embeddings))
        kid = kernel_distance(self.real_embeddings, gen_embeddings)
        precision, recall = precision_recall(self.real_embeddings, gen_embeddings, cfg.pr_k)
        ppl = {
            mode: perceptual_path_length(
                generator, self._embed_generated, z_dim, RngStream(cfg.eval_seed + offset),
                epsilon=cfg.ppl_epsilon, n_paths=cfg.ppl_paths, mode=mode,
            )
            for offset, mode in ((1, "full"), (2, "end"))
        }
        fraction = self._real_logit_fraction(state) if state is not None else 0.0

        report = MetricsReport(
            step=step, images_seen=images_seen, fid=fid, kid=kid, precision=precision, recall=recall,
            ppl_full=ppl["full"], ppl_end=ppl["end"], signed_logit_fraction=fraction,
            losses=dict(losses or {}), n_real=len(self.dataset), n_gen=self.n_gen, embed_seed=cfg.embed_seed,
        )
        self.logger.info(
            f"📊 Eval @ {images_seen} images: FID {fid:.4f} | KID {kid:.6f} | "
            f"P {precision:.3f} R {recall:.3f} | sign {fraction:.3f}"
        )
        return report


def evaluate(checkpoint: str, dataset: Dataset, cfg: TrainConfig) -> MetricsReport:
    """
    Score the EMA generator of a checkpoint.

    Args:
        checkpoint: Checkpoint path
        dataset: Reference images
        cfg: Config the checkpoint must have been trained with

    Returns:
        MetricsReport

    Raises:
        CheckpointError: If the checkpoint digest differs from ``cfg``
    """
    header, tensors = load_checkpoint(checkpoint)
    state = restore_state(build_state(cfg), header, tensors)
    return Evaluator(cfg, dataset).evaluate(state.ema.module, state.step, state.images_seen, state)

