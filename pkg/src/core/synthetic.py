"""
Bundled synthetic data.

The training set is seeded Gaussian color blobs drawn from two color modes.
The probe sets hold a batch of one repeated image, a batch of small
variations of it and a batch of distinct images, for flat color squares and
for sinusoidal textures.
"""
from pathlib import Path
from typing import Dict, List

import numpy as np
import torch
from PIL import Image

from ..utils.logger import get_logger
from .dataset import to_unit_range

COLOR_MODES = np.array([[0.85, 0.30, 0.20], [0.20, 0.40, 0.90]])
BACKGROUND = 0.1


def _to_uint8(values: np.ndarray) -> np.ndarray:
    return np.floor(np.clip(values, 0.0, 1.0) * 255.0 + 0.5).astype(np.uint8)


def gaussian_blobs(n: int = 500, resolution: int = 32, seed: int = 0) -> np.ndarray:
    """
    One soft blob per image; half the images use each color mode.

    Returns:
        (n, R, R, 3) uint8 array
    """
    if n <= 0:
        raise ValueError(f"n must be positive, got {n}")
    rng = np.random.default_rng(seed)
    modes = rng.permutation(np.arange(n) % 2)
    colors = COLOR_MODES[modes] + rng.normal(0.0, 0.05, size=(n, 3))
    centers = rng.uniform(0.25, 0.75, size=(n, 2)) * resolution
    sigmas = rng.uniform(0.1, 0.2, size=n) * resolution

    coords = np.arange(resolution) + 0.5
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    d2 = (yy[None] - centers[:, 0, None, None]) ** 2 + (xx[None] - centers[:, 1, None, None]) ** 2
    weight = np.exp(-d2 / (2.0 * sigmas[:, None, None] ** 2))[..., None]
    values = BACKGROUND + (colors[:, None, None, :] - BACKGROUND) * weight
    return _to_uint8(values)


def write_images(pixels: np.ndarray, out_dir: str, prefix: str = "img") -> List[str]:
    """Write (N, H, W, 3) uint8 images as numbered PNGs"""
    folder = Path(out_dir)
    folder.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, image in enumerate(pixels):
        path = folder / f"{prefix}_{i:05d}.png"
        Image.fromarray(image).save(path, format="PNG")
        paths.append(str(path))
    return paths


def make_synthetic_dataset(out_dir: str, n: int = 500, resolution: int = 32, seed: int = 0) -> List[str]:
    """Write the two-mode blob dataset to ``out_dir``"""
    paths = write_images(gaussian_blobs(n, resolution, seed), out_dir, prefix="blob")
    get_logger().info(f"🎨 Wrote {len(paths)} synthetic image(s) to {out_dir}")
    return paths


def _color_square(color: np.ndarray, offset: np.ndarray, resolution: int) -> np.ndarray:
    image = np.full((resolution, resolution, 3), 0.5)
    side = resolution // 2
    y, x = offset
    image[y:y + side, x:x + side] = color
    return image


def color_square_sets(n: int = 16, resolution: int = 32, seed: int = 0) -> Dict[str, torch.Tensor]:
    """
    Flat color squares on a gray background.

    The perturbed set shifts the base color by N(0, 0.15) per channel and
    the square by up to 2 pixels.

    Returns:
        {"identical": one square repeated, "perturbed": small variations of
        that square, "distinct": independent squares}, each (n, 3, R, R)
    """
    rng = np.random.default_rng(seed)
    max_offset = resolution - resolution // 2
    base_color = rng.uniform(size=3)
    base_offset = rng.integers(0, max_offset + 1, size=2)
    identical = np.stack([_color_square(base_color, base_offset, resolution)] * n)
    perturbed = np.stack([
        _color_square(
            np.clip(base_color + rng.normal(0.0, 0.15, size=3), 0.0, 1.0),
            np.clip(base_offset + rng.integers(-2, 3, size=2), 0, max_offset),
            resolution,
        )
        for _ in range(n)
    ])
    distinct = np.stack([
        _color_square(rng.uniform(size=3), rng.integers(0, max_offset + 1, size=2), resolution)
        for _ in range(n)
    ])
    return {name: to_unit_range(_to_uint8(values)) for name, values in
            (("identical", identical), ("perturbed", perturbed), ("distinct", distinct))}


def _grating_params(rng: np.random.Generator) -> np.ndarray:
    """(3 channels, 3 gratings, [freq, angle, phase])"""
    return np.stack([
        rng.uniform(2.0, 8.0, size=(3, 3)),
        rng.uniform(0.0, np.pi, size=(3, 3)),
        rng.uniform(0.0, 2 * np.pi, size=(3, 3)),
    ], axis=-1)


def _render_texture(params: np.ndarray, resolution: int) -> np.ndarray:
    coords = np.arange(resolution) / resolution
    yy, xx = np.meshgrid(coords, coords, indexing="ij")
    freq, angle, phase = (params[..., i, None, None] for i in range(3))
    waves = np.sin(2 * np.pi * freq * (xx * np.cos(angle) + yy * np.sin(angle)) + phase)
    return 0.5 + np.moveaxis(waves.sum(axis=1), 0, -1) / 6.0


def _jitter(params: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    jittered = params.copy()
    jittered[..., 0] *= 1.0 + rng.normal(0.0, 0.05, size=params.shape[:-1])
    jittered[..., 1] += rng.normal(0.0, 0.05, size=params.shape[:-1])
    jittered[..., 2] += rng.normal(0.0, 0.3, size=params.shape[:-1])
    return jittered


def texture_sets(n: int = 16, resolution: int = 32, seed: int = 0) -> Dict[str, torch.Tensor]:
    """
    Sums of three random oriented gratings per channel.

    The perturbed set jitters the base gratings: frequency by 5%, angle by
    N(0, 0.05) rad and phase by N(0, 0.3) rad.

    Returns:
        {"identical", "perturbed", "distinct"}, each (n, 3, R, R)
    """
    rng = np.random.default_rng(seed)
    base = _grating_params(rng)
    identical = np.stack([_render_texture(base, resolution)] * n)
    perturbed = np.stack([_render_texture(_jitter(base, rng), resolution) for _ in range(n)])
    distinct = np.stack([_render_texture(_grating_params(rng), resolution) for _ in range(n)])
    return {name: to_unit_range(_to_uint8(values)) for name, values in
            (("identical", identical), ("perturbed", perturbed), ("distinct", distinct))}
