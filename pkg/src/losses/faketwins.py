"""FakeTwins: two-view self-supervised loss on generated images"""
from typing import Sequence

import torch
from torch import nn

from ..augment.diff_augment import AugmentPolicy, diff_augment
from ..augment.latent import latent_perturb
from ..augment.rng import RngStream
from ..features.projector import pooled_representation
from ..interfaces.ssl_objective import SslObjective


def encode_views(images: torch.Tensor, projectors: Sequence[nn.Module], head: nn.Module) -> torch.Tensor:
    """Pool every projector's pyramid, concatenate and run the head"""
    return head(pooled_representation(*[projector(images) for projector in projectors]))


def faketwins_on_views(view_a: torch.Tensor, view_b: torch.Tensor, projectors: Sequence[nn.Module],
                       head: nn.Module, policy: AugmentPolicy, rng: RngStream,
                       objective: SslObjective) -> torch.Tensor:
    """
    Augment two image batches independently, encode them and score them.

    Args:
        view_a: Images behind the first view
        view_b: Images behind the second view, same shape
        projectors: Frozen feature projectors
        head: Trainable linear head
        policy: Augmentation policy shared by both views
        rng: Stream for both augmentation draws (first view first)
        objective: Two-view SSL objective

    Returns:
        Scalar loss
    """
    if view_a.shape[0] < 2:
        raise ValueError("FakeTwins needs a batch of at least 2 images")
    augmented_a = diff_augment(view_a, policy, rng)
    augmented_b = diff_augment(view_b, policy, rng)
    return objective(encode_views(augmented_a, projectors, head), encode_views(augmented_b, projectors, head))


def faketwins_loss(z: torch.Tensor, generator: nn.Module, projectors: Sequence[nn.Module], head: nn.Module,
                   policy: AugmentPolicy, rng: RngStream, objective: SslObjective,
                   l1: float = 0.1, deterministic_perturb: bool = False) -> torch.Tensor:
    """
    FakeTwins loss for latent batch ``z``.

    The first view is G(z), the second G(z + eps) with latent noise of
    scale ``l1 * |z|``. Draw order on ``rng``: latent noise, then the two
    augmentations. Gradients reach only the generator and the head.

    Args:
        z: Latent batch (B, z_dim), B >= 2
        generator: Generator being trained
        projectors: Frozen feature projectors
        head: Trainable linear head
        policy: Augmentation policy
        rng: Stream for all randomness of this call
        objective: Two-view SSL objective
        l1: Latent noise coefficient
        deterministic_perturb: Add ``l1 * |z|`` instead of sampling

    Returns:
        Scalar loss
    """
    if z.shape[0] < 2:
        raise ValueError("FakeTwins needs a batch of at least 2 latents")
    z_perturbed = latent_perturb(z, l1, rng, deterministic_perturb)
    return faketwins_on_views(generator(z), generator(z_perturbed), projectors, head, policy, rng, objective)
