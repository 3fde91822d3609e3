"""Seeding helpers for reproducible construction and training"""
import random
from contextlib import contextmanager
from typing import Iterator

import numpy as np
import torch


def seed_everything(seed: int):
    """
    Seed every global generator and switch torch to deterministic kernels.

    Args:
        seed: Global seed
    """
    random.seed(seed)
    np.random.seed(seed % (2 ** 32))
    torch.manual_seed(seed)
    torch.use_deterministic_algorithms(True, warn_only=True)


@contextmanager
def seeded(seed: int) -> Iterator[None]:
    """
    Run a block under a fixed torch seed without disturbing the global stream.

    Module construction happens inside this context so that identical seeds
    give bit-identical initial weights.
    """
    with torch.random.fork_rng(devices=[]):
        torch.manual_seed(seed)
        yield
