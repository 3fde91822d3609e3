import csv
import json
from pathlib import Path

import pytest
from PIL import Image

from src.core.config_manager import ConfigManager
from src.core.trainer import FINAL_CHECKPOINT
from src.main import build_parser, main
from tests.conftest import TINY

REPO_CONFIG = Path(__file__).resolve().parents[1] / "config" / "config.yaml"


@pytest.fixture
def config_file(tmp_path, monkeypatch) -> str:
    """Bundled config with the tiny settings and no log file"""
    monkeypatch.delenv("HPGAN_OUT_DIR", raising=False)
    config = ConfigManager(str(REPO_CONFIG))
    config.set("logging.file_enabled", False)
    for key, value in TINY.items():
        config.apply_override(f"{key}={json.dumps(list(value) if isinstance(value, tuple) else value)}")
    path = tmp_path / "config.yaml"
    config.save_config(path)
    return str(path)


class TestParser:
    def test_requires_a_command(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args([])

    def test_repeatable_overrides(self):
        args = build_parser().parse_args(["train", "--set", "batch_size=8", "--set", "lr=0.001"])
        assert args.set == ["batch_size=8", "lr=0.001"]

    def test_sample_needs_checkpoint(self):
        with pytest.raises(SystemExit):
            build_parser().parse_args(["sample"])


class TestCommands:
    def test_make_synth(self, config_file, tmp_path):
        out = tmp_path / "data"
        main(["make-synth", "--config", config_file, "--out", str(out), "--n", "3"])
        assert len(list(out.glob("*.png"))) == 3

    def test_train_eval_sample(self, config_file, tmp_path):
        data, run = tmp_path / "data", tmp_path / "run"
        main(["make-synth", "--config", config_file, "--out", str(data), "--n", "8"])
        main(["train", "--config", config_file, "--dataset", str(data), "--out", str(run)])
        checkpoint = run / FINAL_CHECKPOINT
        assert checkpoint.exists()

        report = tmp_path / "report.csv"
        main(["eval", "--config", config_file, "--checkpoint", str(checkpoint),
              "--dataset", str(data), "--out", str(report)])
        with open(report, newline="", encoding="utf-8") as f:
            rows = list(csv.reader(f))
        assert len(rows) == 2 and rows[1][1] == "8"

        grid = tmp_path / "grid.png"
        main(["sample", "--config", config_file, "--checkpoint", str(checkpoint), "--n", "4", "--out", str(grid)])
        with Image.open(grid) as image:
            assert image.size == (64, 64)

    def test_failure_exits_with_status_one(self, config_file, tmp_path):
        with pytest.raises(SystemExit) as excinfo:
            main(["sample", "--config", config_file, "--checkpoint", str(tmp_path / "absent.hpg")])
        assert excinfo.value.code == 1

    def test_train_without_dataset_fails(self, config_file):
        with pytest.raises(SystemExit) as excinfo:
            main(["train", "--config", config_file])
        assert excinfo.value.code == 1

    def test_diversity_command_writes_table(self, config_file, tmp_path):
        out = tmp_path / "probe.txt"
        main(["probe", "--config", config_file, "--n", "2", "--draws", "1", "--fit-steps", "1", "--out", str(out)])
        text = out.read_text(encoding="utf-8")
        assert "[color squares]" in text and "[textures]" in text and "perturbed_between" in text

    def test_ablate_writes_summary(self, config_file, tmp_path):
        data, out = tmp_path / "data", tmp_path / "ablation"
        main(["make-synth", "--config", config_file, "--out", str(data), "--n", "8"])
        main(["ablate", "--config", config_file, "--dataset", str(data), "--out", str(out),
              "--levels", "D", "--seeds", "1"])
        assert "ABLATION RESULTS" in (out / "ablation.txt").read_text(encoding="utf-8")
        assert (out / "D" / "seed_0" / FINAL_CHECKPOINT).exists()
