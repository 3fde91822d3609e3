"""PNG Image Grid Output Generator Implementation"""
import math
import numpy as np
import torch
from PIL import Image

from ..interfaces.output_generator import OutputGenerator
from ..utils.logger import get_logger


def to_pixels(images: torch.Tensor) -> np.ndarray:
    """
    Map [-1, 1] to [0, 255] with round-half-up.

    Args:
        images: (N, 3, H, W)

    Returns:
        (N, H, W, 3) uint8
    """
    values = images.detach().to(torch.float64).cpu().clamp(-1.0, 1.0)
    pixels = torch.floor((values + 1.0) / 2.0 * 255.0 + 0.5)
    return pixels.permute(0, 2, 3, 1).numpy().astype(np.uint8)


def tile(pixels: np.ndarray) -> np.ndarray:
    """Row-major grid with ceil(sqrt(n)) columns; empty cells are black"""
    n, h, w, c = pixels.shape
    cols = math.ceil(math.sqrt(n))
    rows = math.ceil(n / cols)
    grid = np.zeros((rows * h, cols * w, c), dtype=np.uint8)
    for i in range(n):
        r, col = divmod(i, cols)
        grid[r * h:(r + 1) * h, col * w:(col + 1) * w] = pixels[i]
    return grid


class ImageGridGenerator(OutputGenerator[torch.Tensor]):
    """Image batch to a single PNG grid"""

    extension = ".png"

    def __init__(self):
        """Initialize grid generator"""
        self.logger = get_logger()

    def generate(self, content: torch.Tensor, output_path: str) -> bool:
        """
        Tile a batch and save it.

        Args:
            content: Images (N, 3, H, W) in [-1, 1], N >= 1
            output_path: Output file path

        Returns:
            True if successful
        """
        if content.ndim != 4 or content.shape[0] == 0:
            raise ValueError("Image grid needs a non-empty (N, 3, H, W) batch")
        output_file = self.prepare_path(output_path)
        try:
            Image.fromarray(tile(to_pixels(content))).save(output_file, format="PNG")
        except OSError as e:
            self.logger.error(f"Error creating image grid: {str(e)}")
            raise
        self.logger.info(f"✅ Successfully created: {output_file.name}")
        return True

    def get_format_name(self) -> str:
        """Get format name"""
        return "PNG"
