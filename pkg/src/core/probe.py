"""
Batch-diversity probe.

Scores fixed image sets with the FakeTwins loss. The feature projectors are
the frozen ones training uses and the head is first fitted on sharp views of
a reference pool, the way training leaves it. Every set and blur level is
then evaluated over the same seeded augmentation draws and the mean loss is
reported. A batch of one repeated image is expected to score above a batch
of small variations, which scores above a batch of distinct images; blur is
expected not to lower the loss of the distinct batch.
"""
from dataclasses import dataclass, field, replace
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import torch

from ..augment.blur import gaussian_blur
from ..augment.latent import latent_perturb
from ..augment.rng import RngStream
from ..features.projector import FeatureProjector
from ..losses.faketwins import faketwins_on_views
from ..networks.generator import Generator
from ..networks.head import LinearHead
from ..ssl.objectives import build_objective
from ..utils.logger import get_logger
from ..utils.seeding import seeded
from .train_config import TrainConfig
from .train_state import HEAD_SEED_OFFSET

PROBE_SIGMAS = (0.0, 1.0, 2.0, 4.0)
PROBE_DRAWS = 100
HEAD_FIT_STEPS = 300
HEAD_FIT_LR = 1e-3


@dataclass
class ProbeReport:
    """Mean and spread of the loss for each (set, sigma)"""
    sigmas: Tuple[float, ...]
    draws: int
    means: Dict[str, List[float]] = field(default_factory=dict)
    stds: Dict[str, List[float]] = field(default_factory=dict)

    def _sharpest(self, name: str) -> float:
        return self.means[name][int(np.argmin(self.sigmas))]

    @property
    def verdicts(self) -> Dict[str, bool]:
        """
        Ordering checks.

        "identical_gt_distinct": identical scores strictly above distinct at
        the smallest sigma. "perturbed_between": identical > perturbed >
        distinct there. "nondecreasing_in_sigma": the distinct set's mean
        never drops as sigma grows.
        """
        verdicts = {}
        if "identical" in self.means and "distinct" in self.means:
            verdicts["identical_gt_distinct"] = self._sharpest("identical") > self._sharpest("distinct")
            if "perturbed" in self.means:
                verdicts["perturbed_between"] = (
                    self._sharpest("identical") > self._sharpest("perturbed") > self._sharpest("distinct")
                )
        if "distinct" in self.means:
            ladder = [value for _, value in sorted(zip(self.sigmas, self.means["distinct"]))]
            verdicts["nondecreasing_in_sigma"] = all(b >= a for a, b in zip(ladder, ladder[1:]))
        return verdicts

    def to_table(self) -> str:
        """Fixed-width table, one row per set, one column per sigma"""
        header = f"{'set':<12}" + "".join(f"{'σ=' + format(s, 'g'):>16}" for s in self.sigmas)
        lines = [header]
        for name, values in self.means.items():
            lines.append(f"{name:<12}" + "".join(f"{v:>16.6f}" for v in values))
        return "\n".join(lines)

    def get_summary(self) -> str:
        marks = "\n".join(f"   {'✅' if ok else '❌'} {name}" for name, ok in self.verdicts.items())
        return f"🔬 PROBE RESULTS ({self.draws} draws):\n{self.to_table()}\n{marks}"


def build_diversity_projectors(cfg: TrainConfig) -> List[FeatureProjector]:
    """Frozen projectors as training builds them; level-E specs when the config has none"""
    specs = cfg.feature_specs or replace(cfg, config_level="E").feature_specs
    return [
        FeatureProjector(spec, cfg.projector_seed + i).to(torch.float64)
        for i, spec in enumerate(specs.values())
    ]


def fit_diversity_head(cfg: TrainConfig, projectors: Sequence[FeatureProjector], reference: torch.Tensor,
                       steps: int = HEAD_FIT_STEPS, seed: int = 0) -> LinearHead:
    """
    Fresh head trained with the FakeTwins objective on ``reference``.

    Each step draws a random batch of ``cfg.batch_size`` images (capped at
    the pool size) and scores two augmented views of it.

    Args:
        cfg: Supplies head width, seeds, augmentation, objective and betas
        projectors: Frozen feature projectors
        reference: Image pool (N, 3, R, R), N >= 2
        steps: Adam steps; 0 returns the freshly initialized head
        seed: Seed of the batch and augmentation stream

    Returns:
        LinearHead in training mode
    """
    if reference.shape[0] < 2:
        raise ValueError("Reference pool needs at least 2 images")
    if steps < 0:
        raise ValueError(f"Fit steps must be non-negative, got {steps}")
    in_dim = sum(sum(p.stage_channels) for p in projectors)
    with seeded(cfg.weight_seed + HEAD_SEED_OFFSET):
        head = LinearHead(in_dim, cfg.head_width).to(torch.float64)
    head.train()

    reference = reference.to(torch.float64)
    batch = min(cfg.batch_size, reference.shape[0])
    policy = cfg.augment_policy
    objective = build_objective(cfg.ssl_kind)
    optimizer = torch.optim.Adam(head.parameters(), lr=HEAD_FIT_LR, betas=(cfg.beta1, cfg.beta2))
    rng = RngStream(seed)
    loss = None
    with torch.enable_grad():
        for _ in range(steps):
            images = reference[torch.from_numpy(rng.permutation(reference.shape[0])[:batch])]
            loss = faketwins_on_views(images, images, projectors, head, policy, rng, objective)
            optimizer.zero_grad()
            loss.backward()
            optimizer.step()
    if loss is not None:
        get_logger().debug(f"Diversity head fitted: {steps} steps, final loss {float(loss):.6f}")
    return head


def probe_batch_diversity(cfg: TrainConfig, image_sets: Mapping[str, torch.Tensor],
                          sigmas: Sequence[float] = PROBE_SIGMAS, draws: int = PROBE_DRAWS,
                          seed: int = 0, reference: Optional[torch.Tensor] = None,
                          fit_steps: int = HEAD_FIT_STEPS) -> ProbeReport:
    """
    Mean FakeTwins loss of each image set at each blur level.

    The head is fitted once on the sharp ``reference`` pool (default: every
    set concatenated), then frozen. Every (set, sigma) pair replays the same
    augmentation draws, so the comparison isolates the images. The head
    normalizes with batch statistics as it does during training.

    Args:
        cfg: Supplies feature specs, seeds, augmentation and SSL objective
        image_sets: Batches by name, each (N, 3, R, R) with N >= 2
        sigmas: Blur levels in pixels
        draws: Augmentation draws averaged per entry
        seed: Seed of the augmentation stream; the head fit uses ``seed + 1``
        reference: Images the head is fitted on
        fit_steps: Head fitting steps

    Returns:
        ProbeReport
    """
    logger = get_logger()
    projectors = build_diversity_projectors(cfg)
    if reference is None:
        reference = torch.cat([images.to(torch.float64) for images in image_sets.values()])
    head = fit_diversity_head(cfg, projectors, reference, fit_steps, seed + 1)
    policy = cfg.augment_policy
    objective = build_objective(cfg.ssl_kind)

    report = ProbeReport(sigmas=tuple(float(s) for s in sigmas), draws=draws)
    with torch.no_grad():
        for name, images in image_sets.items():
            images = images.to(torch.float64)
            report.means[name] = []
            report.stds[name] = []
            for sigma in report.sigmas:
                blurred = gaussian_blur(images, sigma)
                rng = RngStream(seed)
                losses = np.array([
                    float(faketwins_on_views(blurred, blurred, projectors, head, policy, rng, objective))
                    for _ in range(draws)
                ])
                report.means[name].append(float(losses.mean()))
                report.stds[name].append(float(losses.std()))
            logger.debug(f"Probe '{name}': {report.means[name]}")
    return report



@torch.no_grad()
def perturbed_batch(generator: Generator, n: int, l1: float, seed: int) -> torch.Tensor:
    """
    ``n`` images from one latent plus latent noise of scale ``l1 * |z|``.

    Args:
        generator: Generator to sample
        n: Batch size
        l1: Noise coefficient
        seed: Seed for the base latent and the noise

    Returns:
        (n, 3, R, R) float64 tensor
    """
    if n <= 0:
        raise ValueError(f"Number of images must be positive, got {n}")
    param = next(generator.parameters())
    rng = RngStream(seed)
    z = rng.normal((1, generator.z_dim)).repeat(n, 1)
    z = latent_perturb(z, l1, rng)
    return generator(z.to(device=param.device, dtype=param.dtype)).to(torch.float64).cpu()


@torch.no_grad()
def generator_sets(generator: Generator, n: int, l1: float, seed: int) -> Dict[str, torch.Tensor]:
    """Identical, perturbed and distinct batches sampled from a generator"""
    param = next(generator.parameters())

    def run(z: torch.Tensor) -> torch.Tensor:
        return generator(z.to(device=param.device, dtype=param.dtype)).to(torch.float64).cpu()

    rng = RngStream(seed)
    return {
        "identical": run(rng.normal((1, generator.z_dim)).repeat(n, 1)),
        "perturbed": perturbed_batch(generator, n, l1, seed + 1),
        "distinct": run(rng.normal((n, generator.z_dim))),
    }
