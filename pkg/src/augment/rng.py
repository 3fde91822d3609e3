"""Counter-based random streams"""
from dataclasses import dataclass
from typing import Dict, Sequence

import numpy as np
import torch


@dataclass
class RngStream:
    """
    Reproducible stream of random draws.

    Draw ``k`` of a stream is generated from ``numpy.random.default_rng([seed, k])``,
    so the same (seed, counter) pair gives the same numbers on every platform.
    Not thread-safe; give each thread its own stream.
    """
    seed: int
    counter: int = 0

    def _next(self) -> np.random.Generator:
        generator = np.random.default_rng([self.seed % (2 ** 64), self.counter])
        self.counter += 1
        return generator

    def uniform(self, shape: Sequence[int], low: float = 0.0, high: float = 1.0,
                dtype: torch.dtype = torch.float64) -> torch.Tensor:
        """Draw uniform values in [low, high)"""
        values = self._next().uniform(low, high, size=tuple(shape))
        return torch.from_numpy(values).to(dtype)

    def normal(self, shape: Sequence[int], dtype: torch.dtype = torch.float64) -> torch.Tensor:
        """Draw standard normal values"""
        values = self._next().standard_normal(size=tuple(shape))
        return torch.from_numpy(values).to(dtype)

    def integers(self, low: int, high: int, shape: Sequence[int]) -> torch.Tensor:
        """Draw integers in [low, high)"""
        values = self._next().integers(low, high, size=tuple(shape))
        return torch.from_numpy(values).to(torch.long)

    def permutation(self, n: int) -> np.ndarray:
        """Draw a permutation of range(n)"""
        return self._next().permutation(n)

    def state_dict(self) -> Dict[str, int]:
        return {"seed": self.seed, "counter": self.counter}

    @classmethod
    def from_state_dict(cls, state: Dict[str, int]) -> "RngStream":
        return cls(seed=int(state["seed"]), counter=int(state["counter"]))
