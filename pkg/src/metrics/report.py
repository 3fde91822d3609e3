"""One evaluation result, serializable as a CSV row"""
from dataclasses import dataclass, field
from typing import Dict, List

LOSS_COLUMNS = ("loss_d", "loss_g", "loss_dc_real", "loss_dc_fake", "loss_ft")


@dataclass
class MetricsReport:
    """Metrics at one point of training"""
    step: int
    images_seen: int
    fid: float
    kid: float
    precision: float
    recall: float
    ppl_full: float
    ppl_end: float
    signed_logit_fraction: float
    losses: Dict[str, float] = field(default_factory=dict)
    n_real: int = 0
    n_gen: int = 0
    embed_seed: int = 0

    HEADER = ("step", "images_seen", "fid", "kid", "precision", "recall", "ppl_full", "ppl_end",
              "signed_logit_fraction") + LOSS_COLUMNS + ("n_real", "n_gen", "embed_seed")

    def __post_init__(self):
        if self.fid < 0:
            raise ValueError(f"fid must be non-negative, got {self.fid}")
        for name in ("precision", "recall", "signed_logit_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")

    def to_row(self) -> List[str]:
        """Format every column; reals use 9 significant digits"""
        reals = [self.fid, self.kid, self.precision, self.recall, self.ppl_full, self.ppl_end,
                 self.signed_logit_fraction] + [self.losses.get(name, 0.0) for name in LOSS_COLUMNS]
        return ([str(self.step), str(self.images_seen)] + [f"{value:.9g}" for value in reals]
                + [str(self.n_real), str(self.n_gen), str(self.embed_seed)])
