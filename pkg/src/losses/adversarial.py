"""Hinge adversarial losses and discriminator consistency"""
import torch
import torch.nn.functional as F

from .logits import LogitSet


def hinge_d_loss(real: LogitSet, fake: LogitSet) -> torch.Tensor:
    """
    Sum over maps of mean(max(0, 1 - real)) + mean(max(0, 1 + fake)).

    The hinge is applied per spatial logit before averaging.
    """
    if real.batch_size != fake.batch_size:
        raise ValueError(f"Batch size mismatch: {real.batch_size} real vs {fake.batch_size} fake")
    if real.maps.keys() != fake.maps.keys():
        raise ValueError("Real and fake logits come from different discriminators")
    return sum(
        F.relu(1.0 - real.maps[k]).mean() + F.relu(1.0 + fake.maps[k]).mean()
        for k in real.maps
    )


def hinge_g_loss(fake: LogitSet) -> torch.Tensor:
    """Sum over maps of -mean(fake logits)"""
    return sum(-logits.mean() for logits in fake.maps.values())


def discriminator_consistency(logits: LogitSet) -> torch.Tensor:
    """
    Mean over the batch of the squared gap between the two networks'
    summed per-sample logits.

    Args:
        logits: Outputs of a bank over exactly two feature networks

    Returns:
        Non-negative scalar
    """
    sums = logits.network_sums()
    if len(sums) != 2:
        raise ValueError(f"Consistency needs exactly two feature networks, got {list(sums)}")
    first, second = sums.values()
    return (first - second).pow(2).mean()
