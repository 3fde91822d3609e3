"""Weighted training objectives"""
from dataclasses import dataclass
from typing import Union

import torch

Scalar = Union[float, torch.Tensor]


@dataclass(frozen=True)
class LossWeights:
    """Relative weights of the regularizers"""
    d_fake: float = 1.0
    d_real: float = 1.0
    g: float = 1.0
    f: float = 0.02
    lambda1: float = 0.005

    def __post_init__(self):
        for name in ("d_fake", "d_real", "g", "f"):
            if getattr(self, name) < 0:
                raise ValueError(f"Loss weight {name} must be non-negative")
        if self.lambda1 <= 0:
            raise ValueError("lambda1 must be positive")


@dataclass
class DLossParts:
    adversarial: Scalar
    dc_fake: Scalar = 0.0
    dc_real: Scalar = 0.0


@dataclass
class GLossParts:
    adversarial: Scalar
    dc_fake: Scalar = 0.0
    faketwins: Scalar = 0.0


def total_d_loss(parts: DLossParts, w: LossWeights) -> Scalar:
    """L_D + w.d_fake * DC(fake) + w.d_real * DC(real)"""
    return parts.adversarial + w.d_fake * parts.dc_fake + w.d_real * parts.dc_real


def total_g_loss(parts: GLossParts, w: LossWeights) -> Scalar:
    """L_G + w.g * DC(fake) + w.f * FT"""
    return parts.adversarial + w.g * parts.dc_fake + w.f * parts.faketwins
