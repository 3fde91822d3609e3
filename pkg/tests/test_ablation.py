
import pytest

from src.core.ablation import (
    ABLATION_LEVELS, ABLATION_SEEDS, AblationReport, run_ablation, time_averaged_signed_fraction,
)
from src.core.dataset import load_dataset
from src.core.synthetic import make_synthetic_dataset
from src.core.train_config import TrainConfig
from src.core.trainer import METRICS_FILE
from src.metrics.report import MetricsReport
from src.output.csv_generator import MetricsCSVGenerator


def report_at(images_seen, fraction):
    return MetricsReport(step=images_seen // 4, images_seen=images_seen, fid=1.0, kid=0.0, precision=0.5,
                         recall=0.5, ppl_full=0.0, ppl_end=0.0, signed_logit_fraction=fraction)


class TestAblationReport:
    def test_verdicts(self):
        report = AblationReport(levels=("C", "D", "E"), seeds=(0, 1, 2), best_fid={
            "C": [9.0, 10.0, 30.0], "D": [8.0, 9.0, 1.0], "E": [7.0, 8.0, 100.0],
        }, signed_fraction={"C": [0.5, 0.6, 0.7], "D": [0.4, 0.9, 0.5], "E": [0.5, 0.5, 0.5]})
        assert report.median_fid("C") == 10.0 and report.median_fid("D") == 8.0
        assert report.verdicts == {
            "fid_nonincreasing_with_level": True,
            "consistency_lowers_signed_fraction": True,
        }

    def test_worse_level_fails(self):
        report = AblationReport(levels=("D", "C"), seeds=(0,), best_fid={"C": [5.0], "D": [6.0]},
                                signed_fraction={"C": [0.2], "D": [0.3]})
        assert report.verdicts == {
            "fid_nonincreasing_with_level": False,
            "consistency_lowers_signed_fraction": False,
        }

    def test_summary(self):
        report = AblationReport(levels=("E",), seeds=(0, 1), best_fid={"E": [2.0, 4.0]},
                                signed_fraction={"E": [0.5, 0.5]})
        summary = report.get_summary()
        assert "2 seed(s)" in summary and "3.0000" in summary
        assert "consistency_lowers_signed_fraction" not in summary


class TestSignedFraction:
    def test_repeated_closing_row_counts_once(self, tmp_path):
        path = str(tmp_path / METRICS_FILE)
        MetricsCSVGenerator().generate([report_at(4, 0.2), report_at(8, 0.8), report_at(8, 0.8)], path)
        assert time_averaged_signed_fraction(path) == pytest.approx(0.5)

    def test_empty_table(self, tmp_path):
        path = str(tmp_path / METRICS_FILE)
        MetricsCSVGenerator().generate([], path)
        with pytest.raises(ValueError):
            time_averaged_signed_fraction(path)


class TestRunAblation:
    def test_one_run_per_level_and_seed(self, tiny_cfg, tiny_dataset, tmp_path):
        calls = []
        report = run_ablation(tiny_cfg, tiny_dataset, str(tmp_path / "ablation"), levels=("C", "D"), seeds=(0, 1),
                              progress_callback=lambda *args: calls.append(args))
        assert [c[0] for c in calls] == [1, 2, 3, 4]
        for level in ("C", "D"):
            assert len(report.best_fid[level]) == 2
            assert all(0.0 <= value <= 1.0 for value in report.signed_fraction[level])
            for seed in (0, 1):
                assert (tmp_path / "ablation" / level / f"seed_{seed}" / METRICS_FILE).exists()
        assert set(report.verdicts) == {"fid_nonincreasing_with_level", "consistency_lowers_signed_fraction"}

    def test_unknown_level(self, tiny_cfg, tiny_dataset, tmp_path):
        with pytest.raises(ValueError, match="Unknown config level"):
            run_ablation(tiny_cfg, tiny_dataset, str(tmp_path), levels=("F",))

    def test_needs_seeds(self, tiny_cfg, tiny_dataset, tmp_path):
        with pytest.raises(ValueError):
            run_ablation(tiny_cfg, tiny_dataset, str(tmp_path), seeds=())


@pytest.fixture(scope="module")
def blob_ablation(tmp_path_factory):
    root = tmp_path_factory.mktemp("ablation")
    make_synthetic_dataset(str(root / "blobs"))
    dataset = load_dataset(str(root / "blobs"), 32, xflip=True)
    cfg = TrainConfig(total_images=200_000, out_dir=str(root / "runs"))
    return run_ablation(cfg, dataset, str(root / "runs"), ABLATION_LEVELS, ABLATION_SEEDS)


@pytest.mark.slow
class TestBlobAblation:
    def test_fid_improves_from_c_to_e(self, blob_ablation):
        assert blob_ablation.verdicts["fid_nonincreasing_with_level"], blob_ablation.to_table()

    def test_consistency_lowers_signed_fraction(self, blob_ablation):
        assert blob_ablation.verdicts["consistency_lowers_signed_fraction"], blob_ablation.to_table()
