"""Image dataset loading"""
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional

import numpy as np
import torch
from PIL import Image, UnidentifiedImageError

from ..augment.latent import xflip_amplify
from ..utils.logger import get_logger
from .file_handler import FileHandler


@dataclass
class Dataset:
    """
    Decoded images at one resolution, range [-1, 1].

    ``paths[i]`` is the file behind ``images[i]``; mirrored items repeat
    the path of their source.
    """
    images: torch.Tensor
    paths: List[str] = field(default_factory=list)
    subset: Optional[int] = None
    subset_seed: Optional[int] = None

    def __post_init__(self):
        if self.images.ndim != 4 or self.images.shape[0] == 0:
            raise ValueError("Dataset must hold a non-empty (N, C, H, W) batch")
        if self.paths and len(self.paths) != self.images.shape[0]:
            raise ValueError(f"{len(self.paths)} paths for {self.images.shape[0]} images")

    def __len__(self) -> int:
        return self.images.shape[0]

    @property
    def resolution(self) -> int:
        return self.images.shape[-1]

    def batch(self, indices: np.ndarray) -> torch.Tensor:
        return self.images[torch.as_tensor(indices, dtype=torch.long)]


def decode_image(path: str, resolution: int) -> np.ndarray:
    """
    Decode one file to an (R, R, 3) uint8 array, resizing bilinearly.

    Raises:
        ValueError: If the file cannot be decoded
    """
    try:
        with Image.open(path) as image:
            image = image.convert("RGB")
            if image.size != (resolution, resolution):
                image = image.resize((resolution, resolution), Image.Resampling.BILINEAR)
            return np.asarray(image, dtype=np.uint8).copy()
    except (OSError, UnidentifiedImageError) as e:
        raise ValueError(f"Could not decode image '{path}': {e}") from e


def to_unit_range(pixels: np.ndarray, dtype: torch.dtype = torch.float32) -> torch.Tensor:
    """(N, H, W, 3) uint8 to (N, 3, H, W) with v / 255 * 2 - 1"""
    values = torch.from_numpy(pixels.astype(np.float64) / 255.0 * 2.0 - 1.0)
    return values.permute(0, 3, 1, 2).contiguous().to(dtype)


def sample_subset(n_files: int, subset: int, seed: int) -> np.ndarray:
    """Sorted indices of ``subset`` files drawn without replacement"""
    if subset > n_files:
        raise ValueError(f"Subset of {subset} requested from {n_files} images")
    return np.sort(np.random.default_rng(seed).choice(n_files, size=subset, replace=False))


def load_dataset(path: str, resolution: int, subset: Optional[int] = None, seed: int = 0,
                 xflip: bool = False, dtype: torch.dtype = torch.float32,
                 max_workers: Optional[int] = None) -> Dataset:
    """
    Decode every PNG/JPEG below ``path``.

    Files are decoded on worker threads; ``map`` keeps the file order, so
    the result depends only on the directory contents and ``seed``.

    Args:
        path: Dataset directory, searched recursively
        resolution: Output side length R
        subset: Keep only this many files, sampled by ``seed``
        seed: Subset seed
        xflip: Append horizontal mirrors
        dtype: Tensor dtype
        max_workers: Decoder threads

    Returns:
        Dataset in [-1, 1]
    """
    logger = get_logger()
    if not Path(path).exists():
        raise FileNotFoundError(f"Dataset folder not found: {path}")
    files = FileHandler.find_valid_files(path)
    if not files:
        raise ValueError(f"No PNG/JPEG images found in {path}")

    if subset is not None:
        files = [files[i] for i in sample_subset(len(files), subset, seed)]

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        pixels = list(pool.map(lambda f: decode_image(f, resolution), files))

    images = to_unit_range(np.stack(pixels), dtype)
    paths = list(files)
    if xflip:
        images = xflip_amplify(images)
        paths = paths + paths
    logger.info(f"📁 Loaded {len(files)} image(s) from {path} at {resolution}x{resolution}"
                + (" (+ mirrors)" if xflip else ""))
    return Dataset(images=images, paths=paths, subset=subset, subset_seed=seed if subset is not None else None)


def epoch_order(dataset_size: int, data_seed: int, epoch: int) -> np.ndarray:
    """Item order of one epoch, a pure function of (data_seed, epoch)"""
    return np.random.default_rng([data_seed, epoch]).permutation(dataset_size)
