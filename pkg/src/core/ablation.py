"""
Ablation runs.

Trains one dataset at several config levels, each over several run seeds,
and compares levels by the median over seeds of the best FID and of the
time-averaged signed-logit fraction.
"""
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..output.csv_generator import MetricsCSVGenerator
from ..utils.logger import get_logger
from .dataset import Dataset
from .train_config import CONFIG_LEVELS, TrainConfig
from .trainer import METRICS_FILE, Trainer

ABLATION_LEVELS = ("C", "D", "E")
ABLATION_SEEDS = (0, 1, 2)
ABLATION_SUMMARY = "ablation.txt"


@dataclass
class AblationReport:
    """Per-seed results of every level, in run order"""
    levels: Tuple[str, ...]
    seeds: Tuple[int, ...]
    best_fid: Dict[str, List[float]] = field(default_factory=dict)
    signed_fraction: Dict[str, List[float]] = field(default_factory=dict)

    def median_fid(self, level: str) -> float:
        return float(np.median(self.best_fid[level]))

    def median_signed_fraction(self, level: str) -> float:
        return float(np.median(self.signed_fraction[level]))

    @property
    def verdicts(self) -> Dict[str, bool]:
        """
        "fid_nonincreasing_with_level": each level's median best FID is at
        most the previous level's. "consistency_lowers_signed_fraction": the
        median signed fraction at D is at most the one at C.
        """
        ordered = sorted(self.levels, key=CONFIG_LEVELS.index)
        fids = [self.median_fid(level) for level in ordered]
        verdicts = {"fid_nonincreasing_with_level": all(b <= a for a, b in zip(fids, fids[1:]))}
        if "C" in self.levels and "D" in self.levels:
            verdicts["consistency_lowers_signed_fraction"] = (
                self.median_signed_fraction("D") <= self.median_signed_fraction("C")
            )
        return verdicts

    def to_table(self) -> str:
        lines = [f"{'level':<8}{'median FID':>14}{'median signed':>16}   per-seed FID"]
        for level in self.levels:
            per_seed = ", ".join(f"{value:.4f}" for value in self.best_fid[level])
            lines.append(f"{level:<8}{self.median_fid(level):>14.4f}"
                         f"{self.median_signed_fraction(level):>16.4f}   {per_seed}")
        return "\n".join(lines)

    def get_summary(self) -> str:
        marks = "\n".join(f"   {'✅' if ok else '❌'} {name}" for name, ok in self.verdicts.items())
        return f"🧪 ABLATION RESULTS ({len(self.seeds)} seed(s)):\n{self.to_table()}\n{marks}"


def time_averaged_signed_fraction(metrics_path: str) -> float:
    """
    Mean signed-logit fraction over the evaluation points of one run.

    The closing row repeats the last evaluation when the run ends on an
    evaluation multiple; each images_seen value counts once.
    """
    by_images: Dict[int, float] = {}
    for row in MetricsCSVGenerator().read_rows(metrics_path):
        by_images[int(row["images_seen"])] = float(row["signed_logit_fraction"])
    if not by_images:
        raise ValueError(f"No metric rows in {metrics_path}")
    return float(np.mean(list(by_images.values())))


def run_ablation(cfg: TrainConfig, dataset: Dataset, out_dir: str,
                 levels: Sequence[str] = ABLATION_LEVELS, seeds: Sequence[int] = ABLATION_SEEDS,
                 progress_callback: Optional[Callable[[int, int, str], None]] = None) -> AblationReport:
    """
    Train every (level, seed) pair from ``cfg`` and collect the results.

    Each run gets its own folder ``<out_dir>/<level>/seed_<seed>`` and the
    seeds of ``cfg.with_run_seed(seed)``.

    Args:
        cfg: Base configuration; level, seeds and output folder are replaced
        dataset: Training and reference images
        out_dir: Parent folder of the run folders
        levels: Config levels to compare
        seeds: Run seeds per level
        progress_callback: Called after each run with (done, total, message)

    Returns:
        AblationReport
    """
    if not levels or not seeds:
        raise ValueError("Ablation needs at least one level and one seed")
    for level in levels:
        if level not in CONFIG_LEVELS:
            raise ValueError(f"Unknown config level '{level}', expected one of {CONFIG_LEVELS}")

    logger = get_logger()
    report = AblationReport(levels=tuple(levels), seeds=tuple(seeds))
    total = len(levels) * len(seeds)
    done = 0
    for level in levels:
        report.best_fid[level] = []
        report.signed_fraction[level] = []
        for seed in seeds:
            run_dir = Path(out_dir) / level / f"seed_{seed}"
            run_cfg = replace(cfg.with_run_seed(seed), config_level=level, out_dir=str(run_dir))
            logger.info(f"🧪 Ablation run {done + 1}/{total}: level {level}, seed {seed}")
            stats = Trainer(run_cfg, dataset).run()
            report.best_fid[level].append(float(stats.best_fid))
            report.signed_fraction[level].append(time_averaged_signed_fraction(str(run_dir / METRICS_FILE)))
            done += 1
            if progress_callback:
                progress_callback(done, total, f"level {level}, seed {seed}")
    logger.info(f"\n{report.get_summary()}")
    return report
