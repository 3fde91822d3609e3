"""Output generators"""
from .csv_generator import MetricsCSVGenerator
from .image_grid_generator import ImageGridGenerator

__all__ = ['MetricsCSVGenerator', 'ImageGridGenerator']
