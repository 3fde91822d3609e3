"""Self-supervised objective kernels"""
from .kernels import (
    standardize_columns,
    cross_correlation,
    barlow_twins_loss,
    barlow_twins_objective,
    vicreg_loss,
    ntxent_loss,
    off_diagonal,
)
from .objectives import (
    SslObjectiveKind,
    BarlowTwinsObjective,
    VicRegObjective,
    NtXentObjective,
    build_objective,
)

__all__ = [
    'standardize_columns', 'cross_correlation', 'barlow_twins_loss', 'barlow_twins_objective',
    'vicreg_loss', 'ntxent_loss', 'off_diagonal',
    'SslObjectiveKind', 'BarlowTwinsObjective', 'VicRegObjective', 'NtXentObjective', 'build_objective',
]
