"""Typed, validated training configuration"""
import hashlib
import json
import typing
from dataclasses import asdict, dataclass, fields, replace
from typing import Any, Dict, Optional, Tuple

import torch

from ..augment.diff_augment import AugmentPolicy
from ..features.spec import FEATURE_KINDS, FeatureNetworkSpec
from ..losses.totals import LossWeights
from ..ssl.objectives import OBJECTIVE_TAGS, SslObjectiveKind
from .config_manager import ConfigManager

CONFIG_LEVELS = ("A", "B", "C", "D", "E")
DTYPES = {"float32": torch.float32, "float64": torch.float64}
DEFAULT_TOTAL_IMAGES = 20_000_000
MIN_EVAL_SAMPLES = 5000

# Fields that fix network shapes or frozen weights
DIGEST_FIELDS = (
    "config_level", "resolution", "dtype", "weight_seed", "z_dim", "large_z_dim", "gen_base_channels",
    "gen_max_channels", "disc_hidden", "feature_channels", "second_network_kind", "patch_size",
    "attention_blocks", "attention_dim", "attention_heads", "projector_seed", "head_width",
)


@dataclass(frozen=True)
class FeatureFlags:
    """Components switched on by an ablation level"""
    projected: bool = False
    second_network: bool = False
    blur: bool = False
    small_z: bool = False
    consistency: bool = False
    faketwins: bool = False

    @classmethod
    def for_level(cls, level: str) -> "FeatureFlags":
        """
        Levels are cumulative: A is the single-discriminator baseline,
        B adds projection, C the second network with blur and small z,
        D consistency and E FakeTwins.
        """
        if level not in CONFIG_LEVELS:
            raise ValueError(f"config_level must be one of {CONFIG_LEVELS}, got '{level}'")
        rank = CONFIG_LEVELS.index(level)
        return cls(
            projected=rank >= 1,
            second_network=rank >= 2,
            blur=rank >= 2,
            small_z=rank >= 2,
            consistency=rank >= 3,
            faketwins=rank >= 4,
        )


def _type_ok(value: Any, annotation: Any) -> bool:
    if typing.get_origin(annotation) is typing.Union:
        return any(_type_ok(value, arg) for arg in typing.get_args(annotation))
    if annotation is type(None):
        return value is None
    if typing.get_origin(annotation) in (tuple, Tuple):
        return isinstance(value, (list, tuple)) and all(
            isinstance(v, int) and not isinstance(v, bool) for v in value
        )
    if annotation is bool:
        return isinstance(value, bool)
    if annotation is int:
        return isinstance(value, int) and not isinstance(value, bool)
    if annotation is float:
        return isinstance(value, (int, float)) and not isinstance(value, bool)
    return isinstance(value, annotation)


@dataclass(frozen=True)
class TrainConfig:
    """
    Every hyperparameter of a run, flattened from the config sections.

    Construction validates types and ranges; errors name the offending key.
    """
    # training
    config_level: str = "E"
    resolution: int = 32
    batch_size: int = 16
    total_images: int = DEFAULT_TOTAL_IMAGES
    lr: float = 2e-4
    beta1: float = 0.0
    beta2: float = 0.99
    ema_decay: float = 0.999
    weight_seed: int = 0
    data_seed: int = 0
    augment_seed: int = 1
    latent_seed: int = 2
    dtype: str = "float32"
    device: str = "cpu"
    log_interval: int = 50
    checkpoint_interval: int = 100_000
    # model
    z_dim: int = 64
    large_z_dim: int = 256
    gen_base_channels: int = 64
    gen_max_channels: int = 128
    disc_hidden: int = 64
    feature_channels: Tuple[int, ...] = (8, 16, 32, 64)
    second_network_kind: str = "patch_attention"
    patch_size: int = 4
    attention_blocks: int = 2
    attention_dim: int = 64
    attention_heads: int = 2
    projector_seed: int = 100
    head_width: int = 512
    # losses
    lambda_d_fake: float = 1.0
    lambda_d_real: float = 1.0
    lambda_g: float = 1.0
    lambda_f: float = 0.02
    lambda1: float = 0.005
    ssl_objective: str = "barlow_twins"
    vicreg_invariance: float = 25.0
    vicreg_variance: float = 25.0
    vicreg_covariance: float = 1.0
    ntxent_temperature: float = 0.1
    # augment
    augment: str = "color,translation,cutout"
    translation: float = 0.125
    cutout: float = 0.5
    blur_sigma_max: float = 2.0
    blur_images: Optional[int] = None
    blur_ramp: bool = False
    l1: float = 0.1
    latent_perturb_deterministic: bool = False
    xflip: bool = True
    # data
    dataset_path: Optional[str] = None
    subset: Optional[int] = None
    subset_seed: int = 0
    # evaluation
    eval_interval: int = 50_000
    eval_samples: Optional[int] = None
    eval_seed: int = 7
    embed_dim: int = 64
    embed_seed: int = 1234
    pr_k: int = 3
    ppl_paths: int = 10_000
    ppl_epsilon: float = 1e-4
    # output
    out_dir: str = "runs"

    def __post_init__(self):
        hints = typing.get_type_hints(type(self))
        for f in fields(self):
            value = getattr(self, f.name)
            if not _type_ok(value, hints[f.name]):
                raise ValueError(f"Config key '{f.name}' has invalid type {type(value).__name__}: {value!r}")
            if hints[f.name] is float:
                object.__setattr__(self, f.name, float(value))
        object.__setattr__(self, "feature_channels", tuple(self.feature_channels))
        self._check_ranges()

    def _check_ranges(self):
        def require(ok: bool, key: str, rule: str):
            if not ok:
                raise ValueError(f"Config key '{key}' must be {rule}, got {getattr(self, key)!r}")

        require(self.config_level in CONFIG_LEVELS, "config_level", f"one of {CONFIG_LEVELS}")
        require(self.resolution >= 32 and self.resolution & (self.resolution - 1) == 0,
                "resolution", "a power of two >= 32")
        require(self.batch_size >= 2, "batch_size", ">= 2")
        require(self.total_images > 0, "total_images", "positive")
        require(self.lr > 0, "lr", "positive")
        require(0.0 <= self.beta1 < 1.0, "beta1", "in [0, 1)")
        require(0.0 <= self.beta2 < 1.0, "beta2", "in [0, 1)")
        require(0.0 < self.ema_decay < 1.0, "ema_decay", "in (0, 1)")
        require(self.dtype in DTYPES, "dtype", f"one of {tuple(DTYPES)}")
        for key in ("log_interval", "checkpoint_interval", "eval_interval", "z_dim", "large_z_dim",
                    "gen_base_channels", "gen_max_channels", "disc_hidden", "head_width", "embed_dim",
                    "ppl_paths", "pr_k"):
            require(getattr(self, key) > 0, key, "positive")
        require(len(self.feature_channels) == 4 and min(self.feature_channels) > 0,
                "feature_channels", "four positive widths")
        require(self.second_network_kind in FEATURE_KINDS, "second_network_kind", f"one of {FEATURE_KINDS}")
        for key in ("lambda_d_fake", "lambda_d_real", "lambda_g", "lambda_f", "blur_sigma_max", "l1"):
            require(getattr(self, key) >= 0, key, "non-negative")
        require(self.lambda1 > 0, "lambda1", "positive")
        require(self.ssl_objective in OBJECTIVE_TAGS, "ssl_objective", f"one of {OBJECTIVE_TAGS}")
        require(self.ntxent_temperature > 0, "ntxent_temperature", "positive")
        require(self.blur_images is None or self.blur_images >= 0, "blur_images", "null or non-negative")
        require(self.subset is None or self.subset > 0, "subset", "null or positive")
        require(self.eval_samples is None or self.eval_samples >= 2, "eval_samples", "null or >= 2")
        require(self.ppl_epsilon > 0, "ppl_epsilon", "positive")
        try:
            self.augment_policy
        except ValueError as e:
            raise ValueError(f"Config key 'augment' is invalid: {e}") from e

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "TrainConfig":
        """Build from a flat mapping, rejecting unknown keys"""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ValueError(f"Unknown config key(s): {', '.join(unknown)}")
        return cls(**values)

    @classmethod
    def from_config(cls, config: ConfigManager) -> "TrainConfig":
        """Build from a loaded ConfigManager"""
        values = config.training_values()
        values["out_dir"] = str(config.get("output.dir", "runs"))
        return cls.from_dict(values)

    def with_run_seed(self, seed: int) -> "TrainConfig":
        """Copy with every run seed derived from one integer"""
        return replace(self, weight_seed=seed, data_seed=seed, augment_seed=seed + 1, latent_seed=seed + 2)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["feature_channels"] = list(self.feature_channels)
        return data

    def digest(self) -> str:
        """SHA-256 over the fields that determine shapes and frozen weights"""
        data = self.to_dict()
        payload = json.dumps({key: data[key] for key in DIGEST_FIELDS}, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(payload.encode("utf-8")).hexdigest()

    @property
    def features(self) -> FeatureFlags:
        return FeatureFlags.for_level(self.config_level)

    @property
    def effective_z_dim(self) -> int:
        return self.z_dim if self.features.small_z else self.large_z_dim

    @property
    def resolved_blur_images(self) -> int:
        """Blur window in images; 0 when blur is off for this level"""
        if not self.features.blur:
            return 0
        if self.blur_images is not None:
            return self.blur_images
        return self.total_images // 100

    def resolved_eval_samples(self, dataset_size: int) -> int:
        if self.eval_samples is not None:
            return self.eval_samples
        return max(MIN_EVAL_SAMPLES, dataset_size)

    @property
    def total_steps(self) -> int:
        return -(-self.total_images // self.batch_size)

    @property
    def torch_dtype(self) -> torch.dtype:
        return DTYPES[self.dtype]

    @property
    def loss_weights(self) -> LossWeights:
        return LossWeights(
            d_fake=self.lambda_d_fake, d_real=self.lambda_d_real, g=self.lambda_g,
            f=self.lambda_f, lambda1=self.lambda1,
        )

    @property
    def augment_policy(self) -> AugmentPolicy:
        return AugmentPolicy.from_string(self.augment, translation=self.translation, cutout=self.cutout)

    @property
    def ssl_kind(self) -> SslObjectiveKind:
        if self.ssl_objective == "barlow_twins":
            params = {"lambda1": self.lambda1}
        elif self.ssl_objective == "vicreg":
            params = {
                "invariance_weight": self.vicreg_invariance,
                "variance_weight": self.vicreg_variance,
                "covariance_weight": self.vicreg_covariance,
            }
        else:
            params = {"temperature": self.ntxent_temperature}
        return SslObjectiveKind(tag=self.ssl_objective, params=params)

    @property
    def feature_specs(self) -> Dict[str, FeatureNetworkSpec]:
        """
        Frozen feature networks by name, in discriminator order.

        Empty for the single-discriminator baseline. The second network is
        "vit" for the patch-attention surrogate and "cnn2" for a second
        conv surrogate.
        """
        flags = self.features
        if not flags.projected:
            return {}
        common = dict(
            resolution=self.resolution, channels=self.feature_channels, patch_size=self.patch_size,
            blocks=self.attention_blocks, embed_dim=self.attention_dim, heads=self.attention_heads,
        )
        specs = {"cnn": FeatureNetworkSpec(kind="conv", seed=self.weight_seed + 10, **common)}
        if flags.second_network:
            name = "vit" if self.second_network_kind == "patch_attention" else "cnn2"
            specs[name] = FeatureNetworkSpec(kind=self.second_network_kind, seed=self.weight_seed + 11, **common)
        return specs
