"""Error types raised by the training harness"""


class DivergenceError(RuntimeError):
    """A training loss became non-finite"""


class CheckpointError(ValueError):
    """A checkpoint file is malformed or belongs to a different configuration"""
