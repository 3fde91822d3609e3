"""Exponential moving average of generator weights"""
import copy
from typing import Dict, Mapping, Optional

import torch
from torch import nn


class EmaState:
    """
    Shadow copy of a module whose weights trail the live ones.

    The shadow module has gradients disabled and is never registered with
    an optimizer; sampling and evaluation read from it.
    """

    def __init__(self, module: nn.Module, decay: float = 0.999):
        self.decay = decay
        self.module = copy.deepcopy(module).eval()
        for param in self.module.parameters():
            param.requires_grad_(False)

    def state_dict(self) -> Dict[str, torch.Tensor]:
        return self.module.state_dict()

    def load_state_dict(self, state: Mapping[str, torch.Tensor]):
        self.module.load_state_dict(state)


def ema_update(ema: EmaState, current: nn.Module, decay: Optional[float] = None) -> EmaState:
    """
    shadow <- decay * shadow + (1 - decay) * current, elementwise.

    Floating-point buffers are averaged too; integer buffers are copied.

    Args:
        ema: State to update in place
        current: Live module with the same architecture
        decay: Overrides ``ema.decay`` when given

    Returns:
        The updated state
    """
    decay = ema.decay if decay is None else decay
    if not 0.0 <= decay < 1.0:
        raise ValueError(f"decay must be in [0, 1), got {decay}")
    shadow = ema.module.state_dict()
    live = current.state_dict()
    if shadow.keys() != live.keys():
        raise ValueError("EMA shadow and live module have different tensors")
    with torch.no_grad():
        for name, value in live.items():
            target = shadow[name]
            if target.shape != value.shape:
                raise ValueError(f"Shape mismatch for '{name}': {tuple(target.shape)} vs {tuple(value.shape)}")
            if target.is_floating_point():
                target.mul_(decay).add_(value.detach(), alpha=1.0 - decay)
            else:
                target.copy_(value)
    return ema
