"""Core package"""
from .config_manager import ConfigManager
from .train_config import TrainConfig, FeatureFlags
from .file_handler import FileHandler
from .dataset import Dataset, load_dataset, epoch_order
from .errors import DivergenceError, CheckpointError
from .checkpoint import save_checkpoint, load_checkpoint, encode_checkpoint, decode_checkpoint
from .train_state import TrainState, build_state, save_state, load_state, restore_state, load_ema_generator
from .evaluator import Evaluator, evaluate, generate_images
from .trainer import Trainer, TrainingStats, train, train_step
from .probe import ProbeReport, probe_batch_diversity, perturbed_batch, generator_sets
from .sampler import sample
from .synthetic import make_synthetic_dataset, gaussian_blobs, color_square_sets, texture_sets

__all__ = [
    'ConfigManager', 'TrainConfig', 'FeatureFlags', 'FileHandler', 'Dataset', 'load_dataset', 'epoch_order',
    'DivergenceError', 'CheckpointError', 'save_checkpoint', 'load_checkpoint', 'encode_checkpoint',
    'decode_checkpoint', 'TrainState', 'build_state', 'save_state', 'load_state', 'restore_state',
    'load_ema_generator', 'Evaluator', 'evaluate', 'generate_images', 'Trainer', 'TrainingStats', 'train',
    'train_step', 'ProbeReport', 'probe_batch_diversity', 'perturbed_batch', 'generator_sets', 'sample',
    'make_synthetic_dataset', 'gaussian_blobs', 'color_square_sets', 'texture_sets',
]
