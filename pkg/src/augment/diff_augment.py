"""
Differentiable augmentation (color, translation, cutout).

Every random parameter is drawn per sample from an explicit RngStream, so
a fixed stream state gives a bit-identical result. All ops are
out-of-place and differentiable with respect to the input pixels.
"""
from dataclasses import dataclass
from typing import Callable, Dict, List, Tuple

import torch
import torch.nn.functional as F

from .rng import RngStream

AUGMENT_OPS = ("color", "translation", "cutout")


@dataclass(frozen=True)
class AugmentPolicy:
    """Enabled ops and their strengths"""
    ops: Tuple[str, ...] = AUGMENT_OPS
    translation: float = 0.125
    cutout: float = 0.5
    brightness: Tuple[float, float] = (-0.5, 0.5)
    saturation: Tuple[float, float] = (0.0, 2.0)
    contrast: Tuple[float, float] = (0.5, 1.5)

    def __post_init__(self):
        for op in self.ops:
            if op not in AUGMENT_OPS:
                raise ValueError(f"Unknown augmentation '{op}', expected one of {AUGMENT_OPS}")
        for name in ("translation", "cutout"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise ValueError(f"{name} fraction must be in (0, 1], got {value}")

    @classmethod
    def from_string(cls, text: str, **kwargs) -> "AugmentPolicy":
        """Parse a comma-separated op list such as "color,translation,cutout" """
        ops = tuple(op.strip() for op in text.split(",") if op.strip())
        return cls(ops=ops, **kwargs)

    def to_string(self) -> str:
        return ",".join(self.ops)


def adjust_brightness(x: torch.Tensor, shift: torch.Tensor) -> torch.Tensor:
    """Add a per-sample constant, ``shift`` has shape (B,)"""
    return x + shift.to(x).view(-1, 1, 1, 1)


def adjust_saturation(x: torch.Tensor, factor: torch.Tensor) -> torch.Tensor:
    """Scale the deviation from the per-pixel channel mean"""
    x_mean = x.mean(dim=1, keepdim=True)
    return (x - x_mean) * factor.to(x).view(-1, 1, 1, 1) + x_mean


def adjust_contrast(x: torch.Tensor, factor: torch.Tensor) -> torch.Tensor:
    """Scale the deviation from the per-image mean"""
    x_mean = x.mean(dim=[1, 2, 3], keepdim=True)
    return (x - x_mean) * factor.to(x).view(-1, 1, 1, 1) + x_mean


def translate(x: torch.Tensor, shift_x: torch.Tensor, shift_y: torch.Tensor) -> torch.Tensor:
    """
    Shift each image by integer offsets, filling with zeros.

    Args:
        x: Batch (B, C, H, W)
        shift_x: Row offsets, shape (B,)
        shift_y: Column offsets, shape (B,)
    """
    b, _, h, w = x.shape
    grid_batch, grid_x, grid_y = torch.meshgrid(
        torch.arange(b, device=x.device),
        torch.arange(h, device=x.device),
        torch.arange(w, device=x.device),
        indexing="ij",
    )
    # index 0 and h+1 of the padded image are the zero border
    grid_x = torch.clamp(grid_x + shift_x.view(-1, 1, 1).to(x.device) + 1, 0, h + 1)
    grid_y = torch.clamp(grid_y + shift_y.view(-1, 1, 1).to(x.device) + 1, 0, w + 1)
    x_pad = F.pad(x, [1, 1, 1, 1])
    return x_pad.permute(0, 2, 3, 1)[grid_batch, grid_x, grid_y].permute(0, 3, 1, 2).contiguous()


def cutout(x: torch.Tensor, offset_x: torch.Tensor, offset_y: torch.Tensor,
           size: Tuple[int, int]) -> torch.Tensor:
    """
    Zero a ``size`` square centred at each sample's offset.

    Args:
        x: Batch (B, C, H, W)
        offset_x: Row centres, shape (B,)
        offset_y: Column centres, shape (B,)
        size: (rows, cols) of the zeroed window
    """
    b, _, h, w = x.shape
    grid_batch, grid_x, grid_y = torch.meshgrid(
        torch.arange(b, device=x.device),
        torch.arange(size[0], device=x.device),
        torch.arange(size[1], device=x.device),
        indexing="ij",
    )
    grid_x = torch.clamp(grid_x + offset_x.view(-1, 1, 1).to(x.device) - size[0] // 2, min=0, max=h - 1)
    grid_y = torch.clamp(grid_y + offset_y.view(-1, 1, 1).to(x.device) - size[1] // 2, min=0, max=w - 1)
    mask = torch.ones(b, h, w, dtype=x.dtype, device=x.device)
    mask[grid_batch, grid_x, grid_y] = 0
    return x * mask.unsqueeze(1)


def rand_brightness(x: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    return adjust_brightness(x, rng.uniform((x.shape[0],), *policy.brightness))


def rand_saturation(x: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    return adjust_saturation(x, rng.uniform((x.shape[0],), *policy.saturation))


def rand_contrast(x: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    return adjust_contrast(x, rng.uniform((x.shape[0],), *policy.contrast))


def rand_translation(x: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    shift_x = int(x.shape[2] * policy.translation + 0.5)
    shift_y = int(x.shape[3] * policy.translation + 0.5)
    translation_x = rng.integers(-shift_x, shift_x + 1, (x.shape[0],))
    translation_y = rng.integers(-shift_y, shift_y + 1, (x.shape[0],))
    return translate(x, translation_x, translation_y)


def rand_cutout(x: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    size = int(x.shape[2] * policy.cutout + 0.5), int(x.shape[3] * policy.cutout + 0.5)
    offset_x = rng.integers(0, x.shape[2] + (1 - size[0] % 2), (x.shape[0],))
    offset_y = rng.integers(0, x.shape[3] + (1 - size[1] % 2), (x.shape[0],))
    return cutout(x, offset_x, offset_y, size)


AugmentFn = Callable[[torch.Tensor, AugmentPolicy, RngStream], torch.Tensor]

AUGMENT_FNS: Dict[str, List[AugmentFn]] = {
    'color': [rand_brightness, rand_saturation, rand_contrast],
    'translation': [rand_translation],
    'cutout': [rand_cutout],
}


def diff_augment(batch: torch.Tensor, policy: AugmentPolicy, rng: RngStream) -> torch.Tensor:
    """
    Apply the policy's ops in the fixed order color, translation, cutout.

    Args:
        batch: Images (B, C, H, W)
        policy: Enabled ops and strengths
        rng: Stream the per-sample parameters are drawn from

    Returns:
        Augmented batch of the same shape
    """
    x = batch
    for op in AUGMENT_OPS:
        if op not in policy.ops:
            continue
        for fn in AUGMENT_FNS[op]:
            x = fn(x, policy, rng)
    return x
