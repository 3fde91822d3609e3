"""
Usage:
    # Bundled synthetic dataset
    python -m src.main make-synth --out data/blobs

    # Train
    python -m src.main train --dataset data/blobs --set total_images=200000 --out runs/e

    # Evaluate, sample and probe
    python -m src.main eval --checkpoint runs/e/checkpoint_final.hpg --dataset data/blobs
    python -m src.main sample --checkpoint runs/e/checkpoint_final.hpg --n 16 --out grid.png
    python -m src.main probe

    # Levels C, D and E over three seeds
    python -m src.main ablate --dataset data/blobs --set total_images=200000
"""
import sys
import argparse
import traceback
from pathlib import Path

from src.core.ablation import ABLATION_SUMMARY, run_ablation
from src.core.config_manager import ConfigManager
from src.core.dataset import load_dataset
from src.core.evaluator import evaluate
from src.core.file_handler import FileHandler
from src.core.probe import generator_sets, probe_batch_diversity
from src.core.sampler import sample
from src.core.synthetic import color_square_sets, make_synthetic_dataset, texture_sets
from src.core.train_config import TrainConfig
from src.core.train_state import load_ema_generator
from src.core.trainer import train
from src.output.csv_generator import MetricsCSVGenerator
from src.utils.logger import Logger


def load_config(args) -> TrainConfig:
    """Config file, then --set overrides, then --dataset/--out/--seed"""
    config = ConfigManager(args.config)
    for assignment in args.set or []:
        config.apply_override(assignment)
    if getattr(args, 'dataset', None):
        config.set("data.dataset_path", args.dataset)
    if args.command == 'train' and args.out:
        config.set("output.dir", args.out)
    cfg = TrainConfig.from_config(config)
    if args.command == 'train' and args.seed is not None:
        cfg = cfg.with_run_seed(args.seed)
    return cfg


def setup_logger(args):
    try:
        config = ConfigManager(args.config)
    except FileNotFoundError:
        # reported again, with exit status, once the command runs
        return Logger.get_logger("HPGAN", args.log_level or "INFO")
    log_level = args.log_level or config.get("logging.level", "INFO")
    log_file = config.get("logging.file_path", "logs/hpgan.log") if config.get("logging.file_enabled", True) else None
    return Logger.get_logger("HPGAN", log_level, log_file)


def _dataset_for(cfg: TrainConfig, logger):
    if not cfg.dataset_path:
        raise ValueError("--dataset is required (or set data.dataset_path in the config)")
    is_valid, message, _ = FileHandler.validate_folder(cfg.dataset_path)
    if not is_valid:
        raise ValueError(message)
    logger.info(f"📁 {message} in {cfg.dataset_path}")
    return load_dataset(cfg.dataset_path, cfg.resolution, cfg.subset, cfg.subset_seed, cfg.xflip, cfg.torch_dtype)


def cmd_train(args, logger):
    cfg = load_config(args)
    stats = train(cfg, resume=args.resume, dataset=_dataset_for(cfg, logger))
    logger.info(f"Output saved to: {cfg.out_dir}")
    return stats


def cmd_eval(args, logger):
    cfg = load_config(args)
    report = evaluate(args.checkpoint, _dataset_for(cfg, logger), cfg)
    if args.out:
        MetricsCSVGenerator().generate([report], args.out)
        logger.info(f"Report saved to: {args.out}")
    for name, value in zip(report.HEADER, report.to_row()):
        logger.info(f"   {name}: {value}")


def cmd_sample(args, logger):
    out_path = args.out or "samples.png"
    sample(args.checkpoint, args.n, args.seed or 0, out_path)


def cmd_probe(args, logger):
    cfg = load_config(args)
    seed = args.seed or 0
    families = {
        "color squares": color_square_sets(args.n, cfg.resolution, seed),
        "textures": texture_sets(args.n, cfg.resolution, seed),
    }
    if args.checkpoint:
        _, generator = load_ema_generator(args.checkpoint)
        families["generator"] = generator_sets(generator, args.n, cfg.l1, seed)

    summaries = []
    for family, sets in families.items():
        report = probe_batch_diversity(cfg, sets, draws=args.draws, seed=seed, fit_steps=args.fit_steps)
        summary = f"[{family}]\n{report.get_summary()}"
        logger.info(summary)
        summaries.append(summary)
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text("\n\n".join(summaries) + "\n", encoding='utf-8')
        logger.info(f"Probe table saved to: {args.out}")


def cmd_ablate(args, logger):
    cfg = load_config(args)
    levels = tuple(level.strip() for level in args.levels.split(',') if level.strip())
    first = args.seed or 0
    seeds = tuple(range(first, first + args.seeds))
    out_dir = args.out or str(Path(cfg.out_dir) / "ablation")
    report = run_ablation(cfg, _dataset_for(cfg, logger), out_dir, levels, seeds)
    summary_path = Path(out_dir) / ABLATION_SUMMARY
    summary_path.write_text(report.get_summary() + "\n", encoding='utf-8')
    logger.info(f"Ablation summary saved to: {summary_path}")


def cmd_make_synth(args, logger):
    out_dir = args.out or "data/synthetic"
    make_synthetic_dataset(out_dir, n=args.n, resolution=args.resolution, seed=args.seed or 0)


COMMANDS = {
    'train': cmd_train,
    'eval': cmd_eval,
    'sample': cmd_sample,
    'probe': cmd_probe,
    'ablate': cmd_ablate,
    'make-synth': cmd_make_synth,
}


def run_cli(args):
    """Run one subcommand"""
    logger = setup_logger(args)

    logger.info("=" * 60)
    logger.info(f"HP-GAN - {args.command}")
    logger.info("=" * 60)

    try:
        COMMANDS[args.command](args, logger)
        logger.info("=" * 60)
        logger.info(f"{args.command} complete!")
        logger.info("=" * 60)
    except Exception as e:
        logger.error(f"❌ Fatal error: {str(e)}")
        logger.error(traceback.format_exc())
        sys.exit(1)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="HP-GAN - desk-scale projected GAN training with FakeTwins",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  # Write the bundled two-mode blob dataset
  python -m src.main make-synth --out data/blobs

  # Config D ablation on 200k images
  python -m src.main train --dataset data/blobs --set config_level=D --set total_images=200000

  # Resume a run
  python -m src.main train --dataset data/blobs --resume runs/checkpoint_000000100000.hpg

  # Levels C, D and E over three seeds
  python -m src.main ablate --dataset data/blobs --set total_images=200000 --out runs/ablation

  # 4x4 sample grid
  python -m src.main sample --checkpoint runs/checkpoint_best.hpg --n 16 --out grid.png
        """
    )

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument('--config', type=str, help='Path to config file (default: config/config.yaml)')
    common.add_argument('--set', action='append', metavar='KEY=VALUE',
                        help='Override a config value, repeatable (e.g. --set batch_size=8)')
    common.add_argument('--out', type=str, help='Output directory or file for the command')
    common.add_argument('--seed', type=int, help='Seed for the command (train: all run seeds)')
    common.add_argument('--log-level', type=str, choices=['DEBUG', 'INFO', 'WARNING', 'ERROR'],
                        help='Logging level (default: from config)')

    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('train', parents=[common], help='Train a model')
    p.add_argument('--dataset', type=str, help='Dataset folder (PNG/JPEG, recursive)')
    p.add_argument('--resume', type=str, help='Checkpoint to continue from')

    p = sub.add_parser('eval', parents=[common], help='Evaluate a checkpoint')
    p.add_argument('--checkpoint', type=str, required=True, help='Checkpoint to evaluate')
    p.add_argument('--dataset', type=str, help='Reference dataset folder')

    p = sub.add_parser('sample', parents=[common], help='Write a grid of EMA samples')
    p.add_argument('--checkpoint', type=str, required=True, help='Checkpoint to sample')
    p.add_argument('--n', type=int, default=16, help='Number of images (default: 16)')

    p = sub.add_parser('probe', parents=[common], help='Batch-diversity probe of the FakeTwins loss')
    p.add_argument('--checkpoint', type=str, help='Also probe batches sampled from this checkpoint')
    p.add_argument('--n', type=int, default=16, help='Images per probe batch (default: 16)')
    p.add_argument('--draws', type=int, default=100, help='Augmentation draws per entry (default: 100)')
    p.add_argument('--fit-steps', type=int, default=300, help='Head fitting steps before scoring (default: 300)')

    p = sub.add_parser('ablate', parents=[common], help='Train levels over several seeds and compare them')
    p.add_argument('--dataset', type=str, help='Dataset folder (PNG/JPEG, recursive)')
    p.add_argument('--levels', type=str, default='C,D,E', help='Comma-separated config levels (default: C,D,E)')
    p.add_argument('--seeds', type=int, default=3, help='Run seeds per level, counted from --seed (default: 3)')

    p = sub.add_parser('make-synth', parents=[common], help='Write the bundled synthetic dataset')
    p.add_argument('--n', type=int, default=500, help='Number of images (default: 500)')
    p.add_argument('--resolution', type=int, default=32, help='Image size (default: 32)')

    return parser


def main(argv=None):
    """Main entry point"""
    args = build_parser().parse_args(argv)
    run_cli(args)


if __name__ == "__main__":
    main()
