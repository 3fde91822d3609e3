"""Training state: construction, serialization and restore"""
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple, Union

import torch
from torch import nn

from ..augment.rng import RngStream
from ..features.projector import FeatureProjector
from ..interfaces.ssl_objective import SslObjective
from ..networks.discriminator import DiscriminatorBank, ImageDiscriminator
from ..networks.ema import EmaState
from ..networks.generator import Generator
from ..networks.head import LinearHead
from ..ssl.objectives import build_objective
from ..utils.seeding import seeded
from .checkpoint import load_checkpoint, save_checkpoint
from .errors import CheckpointError
from .train_config import TrainConfig

# Offsets from weight_seed for each trainable module
GENERATOR_SEED_OFFSET = 0
DISCRIMINATOR_SEED_OFFSET = 1
HEAD_SEED_OFFSET = 2


@dataclass
class TrainState:
    """
    Everything a training run mutates.

    Feature projectors are rebuilt from their specs and never serialized.
    """
    cfg: TrainConfig
    generator: Generator
    ema: EmaState
    discriminator: Union[DiscriminatorBank, ImageDiscriminator]
    projectors: Dict[str, FeatureProjector]
    head: Optional[LinearHead]
    opt_d: torch.optim.Adam
    opt_g: torch.optim.Adam
    objective: Optional[SslObjective]
    augment_rng: RngStream
    latent_rng: RngStream
    images_seen: int = 0
    step: int = 0
    epoch: int = 0
    batch_index: int = 0
    best_fid: Optional[float] = None
    best_images: Optional[int] = None
    last_losses: Dict[str, float] = field(default_factory=dict)
    loss_sums: Dict[str, float] = field(default_factory=dict)
    loss_count: int = 0

    @property
    def device(self) -> torch.device:
        return next(self.generator.parameters()).device

    @property
    def dtype(self) -> torch.dtype:
        return next(self.generator.parameters()).dtype

    def discriminate(self, images: torch.Tensor):
        """Logits of the configured discriminator(s) on an image batch"""
        if self.projectors:
            return self.discriminator({name: p(images) for name, p in self.projectors.items()})
        return self.discriminator(images)

    def trainable_modules(self) -> Dict[str, nn.Module]:
        modules = {"generator": self.generator, "discriminator": self.discriminator}
        if self.head is not None:
            modules["head"] = self.head
        return modules


def build_generator(cfg: TrainConfig) -> Generator:
    with seeded(cfg.weight_seed + GENERATOR_SEED_OFFSET):
        generator = Generator(cfg.effective_z_dim, cfg.resolution, cfg.gen_base_channels, cfg.gen_max_channels)
    return generator.to(device=cfg.device, dtype=cfg.torch_dtype)


def build_state(cfg: TrainConfig) -> TrainState:
    """
    Fresh state for a config, with every weight drawn from its seed.

    Args:
        cfg: Validated configuration

    Returns:
        State before the first step
    """
    device, dtype = torch.device(cfg.device), cfg.torch_dtype
    flags = cfg.features

    generator = build_generator(cfg)
    projectors = {
        name: FeatureProjector(spec, cfg.projector_seed + i).to(device=device, dtype=dtype)
        for i, (name, spec) in enumerate(cfg.feature_specs.items())
    }
    with seeded(cfg.weight_seed + DISCRIMINATOR_SEED_OFFSET):
        if flags.projected:
            discriminator = DiscriminatorBank(
                {name: p.stage_channels for name, p in projectors.items()}, cfg.disc_hidden
            )
        else:
            discriminator = ImageDiscriminator(cfg.resolution)
    discriminator = discriminator.to(device=device, dtype=dtype)

    head = None
    objective = None
    if flags.faketwins:
        in_dim = sum(sum(p.stage_channels) for p in projectors.values())
        with seeded(cfg.weight_seed + HEAD_SEED_OFFSET):
            head = LinearHead(in_dim, cfg.head_width).to(device=device, dtype=dtype)
        objective = build_objective(cfg.ssl_kind)

    betas = (cfg.beta1, cfg.beta2)
    opt_d = torch.optim.Adam(discriminator.parameters(), lr=cfg.lr, betas=betas)
    g_params = list(generator.parameters()) + (list(head.parameters()) if head is not None else [])
    opt_g = torch.optim.Adam(g_params, lr=cfg.lr, betas=betas)

    return TrainState(
        cfg=cfg,
        generator=generator,
        ema=EmaState(generator, cfg.ema_decay),
        discriminator=discriminator,
        projectors=projectors,
        head=head,
        opt_d=opt_d,
        opt_g=opt_g,
        objective=objective,
        augment_rng=RngStream(cfg.augment_seed),
        latent_rng=RngStream(cfg.latent_seed),
    )


def _prefixed(prefix: str, tensors: Dict[str, torch.Tensor]) -> Dict[str, torch.Tensor]:
    return {f"{prefix}/{name}": value for name, value in tensors.items()}


def _unprefixed(prefix: str, tensors: Dict[str, torch.Tensor]) -> Dict[str, torch.Tensor]:
    start = len(prefix) + 1
    return {name[start:]: value for name, value in tensors.items() if name.startswith(prefix + "/")}


def _optimizer_tensors(optimizer: torch.optim.Optimizer) -> Dict[str, torch.Tensor]:
    tensors = {}
    for index, values in optimizer.state_dict()["state"].items():
        for key, value in values.items():
            tensors[f"{index}/{key}"] = torch.as_tensor(value)
    return tensors


def _restore_optimizer(optimizer: torch.optim.Optimizer, groups: List[Dict[str, Any]],
                       tensors: Dict[str, torch.Tensor]):
    state: Dict[int, Dict[str, torch.Tensor]] = {}
    for name, value in tensors.items():
        index, key = name.split("/", 1)
        state.setdefault(int(index), {})[key] = value
    optimizer.load_state_dict({"state": state, "param_groups": groups})


def state_tensors(state: TrainState) -> Dict[str, torch.Tensor]:
    """Named tensors of every trainable module, the EMA shadow and both optimizers"""
    tensors: Dict[str, torch.Tensor] = {}
    for name, module in state.trainable_modules().items():
        tensors.update(_prefixed(name, module.state_dict()))
    tensors.update(_prefixed("ema", state.ema.state_dict()))
    tensors.update(_prefixed("opt_d", _optimizer_tensors(state.opt_d)))
    tensors.update(_prefixed("opt_g", _optimizer_tensors(state.opt_g)))
    return tensors


def state_header(state: TrainState) -> Dict[str, Any]:
    """JSON metadata: config, digest, feature specs, counters and streams"""
    cfg = state.cfg
    return {
        "digest": cfg.digest(),
        "config": cfg.to_dict(),
        "feature_specs": {name: spec.to_dict() for name, spec in cfg.feature_specs.items()},
        "seeds": {
            "weight": cfg.weight_seed, "data": cfg.data_seed,
            "augment": cfg.augment_seed, "latent": cfg.latent_seed,
        },
        "rng": {"augment": state.augment_rng.state_dict(), "latent": state.latent_rng.state_dict()},
        "images_seen": state.images_seen,
        "step": state.step,
        "epoch": state.epoch,
        "batch_index": state.batch_index,
        "best_fid": state.best_fid,
        "best_images": state.best_images,
        "loss_sums": dict(state.loss_sums),
        "loss_count": state.loss_count,
        "opt_d_groups": _optimizer_groups(state.opt_d),
        "opt_g_groups": _optimizer_groups(state.opt_g),
    }


def _optimizer_groups(optimizer: torch.optim.Optimizer) -> List[Dict[str, Any]]:
    groups = []
    for group in optimizer.state_dict()["param_groups"]:
        groups.append({key: list(value) if isinstance(value, tuple) else value for key, value in group.items()})
    return groups


def save_state(state: TrainState, path: str):
    save_checkpoint(path, state_header(state), state_tensors(state))


def check_digest(header: Dict[str, Any], cfg: TrainConfig):
    """Raise unless the checkpoint was written under an equivalent config"""
    if header.get("digest") != cfg.digest():
        raise CheckpointError(
            f"Config digest mismatch: checkpoint {str(header.get('digest'))[:12]} "
            f"vs config {cfg.digest()[:12]}"
        )


def restore_state(state: TrainState, header: Dict[str, Any], tensors: Dict[str, torch.Tensor]) -> TrainState:
    """
    Load a checkpoint into a state built from the same config.

    Raises:
        CheckpointError: On a digest mismatch or missing tensors
    """
    check_digest(header, state.cfg)
    try:
        for name, module in state.trainable_modules().items():
            module.load_state_dict(_unprefixed(name, tensors))
        state.ema.load_state_dict(_unprefixed("ema", tensors))
        _restore_optimizer(state.opt_d, header["opt_d_groups"], _unprefixed("opt_d", tensors))
        _restore_optimizer(state.opt_g, header["opt_g_groups"], _unprefixed("opt_g", tensors))
    except (RuntimeError, KeyError, ValueError) as e:
        raise CheckpointError(f"Checkpoint does not match the model: {e}") from e

    state.augment_rng = RngStream.from_state_dict(header["rng"]["augment"])
    state.latent_rng = RngStream.from_state_dict(header["rng"]["latent"])
    state.images_seen = int(header["images_seen"])
    state.step = int(header["step"])
    state.epoch = int(header["epoch"])
    state.batch_index = int(header["batch_index"])
    state.best_fid = header.get("best_fid")
    state.best_images = header.get("best_images")
    state.loss_sums = {k: float(v) for k, v in header.get("loss_sums", {}).items()}
    state.loss_count = int(header.get("loss_count", 0))
    return state


def load_state(path: str, cfg: TrainConfig) -> TrainState:
    """Build a state for ``cfg`` and fill it from a checkpoint"""
    header, tensors = load_checkpoint(path)
    return restore_state(build_state(cfg), header, tensors)


def load_ema_generator(path: str) -> Tuple[TrainConfig, Generator]:
    """
    Rebuild the EMA generator from a checkpoint alone.

    Returns:
        (config stored in the checkpoint, generator in eval mode)
    """
    header, tensors = load_checkpoint(path)
    if "config" not in header:
        raise CheckpointError("Checkpoint header carries no config")
    cfg = TrainConfig.from_dict(header["config"])
    check_digest(header, cfg)
    generator = build_generator(cfg)
    try:
        generator.load_state_dict(_unprefixed("ema", tensors))
    except RuntimeError as e:
        raise CheckpointError(f"Checkpoint does not match the generator: {e}") from e
    for param in generator.parameters():
        param.requires_grad_(False)
    return cfg, generator.eval()
