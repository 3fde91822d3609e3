"""Shared fixtures: a tiny float64 config and an in-memory dataset"""
import pytest
import torch

from src.core.dataset import Dataset, to_unit_range
from src.core.synthetic import gaussian_blobs
from src.core.train_config import TrainConfig
from src.utils.logger import Logger

TINY = dict(
    config_level="E",
    resolution=32,
    batch_size=4,
    total_images=8,
    dtype="float64",
    gen_base_channels=16,
    gen_max_channels=16,
    disc_hidden=8,
    feature_channels=(4, 8, 8, 8),
    attention_blocks=1,
    attention_dim=16,
    attention_heads=2,
    head_width=32,
    eval_interval=1_000_000,
    eval_samples=8,
    embed_dim=8,
    ppl_paths=4,
    checkpoint_interval=1_000_000,
    log_interval=1,
    xflip=False,
)


@pytest.fixture(autouse=True)
def fresh_logger():
    yield
    Logger.reset()


@pytest.fixture
def tiny_cfg(tmp_path) -> TrainConfig:
    return TrainConfig(out_dir=str(tmp_path / "run"), **TINY)


@pytest.fixture
def tiny_dataset() -> Dataset:
    images = to_unit_range(gaussian_blobs(n=8, resolution=32, seed=0), torch.float64)
    return Dataset(images=images, paths=[f"blob_{i}.png" for i in range(8)])
