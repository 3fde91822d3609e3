"""SSL objective selection for FakeTwins"""
from dataclasses import dataclass, field
from typing import Any, Dict

import torch

from ..interfaces.ssl_objective import SslObjective
from .kernels import barlow_twins_objective, ntxent_loss, vicreg_loss

OBJECTIVE_TAGS = ("barlow_twins", "vicreg", "ntxent")


@dataclass(frozen=True)
class SslObjectiveKind:
    """Tag plus objective-specific weights"""
    tag: str = "barlow_twins"
    params: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if self.tag not in OBJECTIVE_TAGS:
            raise ValueError(f"Unknown SSL objective '{self.tag}', expected one of {OBJECTIVE_TAGS}")
        if self.params.get("lambda1", 1.0) <= 0:
            raise ValueError("lambda1 must be positive")
        if self.params.get("temperature", 1.0) <= 0:
            raise ValueError("temperature must be positive")


class BarlowTwinsObjective(SslObjective):
    """Barlow Twins on standardized views"""

    def __init__(self, lambda1: float = 0.005):
        self.lambda1 = lambda1

    def __call__(self, za: torch.Tensor, zb: torch.Tensor) -> torch.Tensor:
        return barlow_twins_objective(za, zb, self.lambda1)

    def get_name(self) -> str:
        return "barlow_twins"


class VicRegObjective(SslObjective):
    """VICReg with configurable term weights"""

    def __init__(self, invariance_weight: float = 25.0, variance_weight: float = 25.0,
                 covariance_weight: float = 1.0):
        self.invariance_weight = invariance_weight
        self.variance_weight = variance_weight
        self.covariance_weight = covariance_weight

    def __call__(self, za: torch.Tensor, zb: torch.Tensor) -> torch.Tensor:
        return vicreg_loss(za, zb, self.invariance_weight, self.variance_weight, self.covariance_weight)

    def get_name(self) -> str:
        return "vicreg"


class NtXentObjective(SslObjective):
    """Contrastive NT-Xent over the 2N views"""

    def __init__(self, temperature: float = 0.1):
        self.temperature = temperature

    def __call__(self, za: torch.Tensor, zb: torch.Tensor) -> torch.Tensor:
        return ntxent_loss(za, zb, self.temperature)

    def get_name(self) -> str:
        return "ntxent"


def build_objective(kind: SslObjectiveKind) -> SslObjective:
    """
    Instantiate the objective named by ``kind``.

    Args:
        kind: Tag and weights

    Returns:
        Callable objective
    """
    if kind.tag == "barlow_twins":
        return BarlowTwinsObjective(**kind.params)
    if kind.tag == "vicreg":
        return VicRegObjective(**kind.params)
    return NtXentObjective(**kind.params)
