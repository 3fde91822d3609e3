"""Image grids from a checkpoint's EMA generator"""
from ..output.image_grid_generator import ImageGridGenerator
from .evaluator import generate_images
from .train_state import load_ema_generator


def sample(checkpoint: str, n: int, seed: int, out_path: str) -> str:
    """
    Write ``n`` EMA samples as one PNG grid.

    Args:
        checkpoint: Checkpoint path
        n: Number of images, tiled with ceil(sqrt(n)) columns
        seed: Latent seed
        out_path: PNG path

    Returns:
        The written path
    """
    if n <= 0:
        raise ValueError(f"Number of samples must be positive, got {n}")
    cfg, generator = load_ema_generator(checkpoint)
    images = generate_images(generator, n, cfg.effective_z_dim, seed)
    ImageGridGenerator().generate(images, out_path)
    return out_path
