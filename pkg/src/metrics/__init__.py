"""Evaluation metrics and diagnostics"""
from .embedding import SurrogateEmbedder, EmbeddingStats
from .distances import frechet_distance, kernel_distance, precision_recall, pairwise_distances
from .ppl import perceptual_path_length, slerp, sample_path_points
from .diagnostics import signed_logit_fraction
from .report import MetricsReport

__all__ = [
    'SurrogateEmbedder', 'EmbeddingStats', 'frechet_distance', 'kernel_distance', 'precision_recall',
    'pairwise_distances', 'perceptual_path_length', 'slerp', 'sample_path_points',
    'signed_logit_fraction', 'MetricsReport',
]
