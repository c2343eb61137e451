"""Error metrics, metric files, heatmaps, trend checks and run configuration."""

import json
import math
from pathlib import Path

import numpy as np
import pytest
from PIL import Image

from src.evaluation.benchmark import ConfusionOutcome, trend_checks
from src.evaluation.heatmap import PGM_MARK, export_heatmap, heatmap_raster
from src.evaluation.metrics import (
    MetricRow,
    read_metrics_csv,
    rot_error,
    summarize,
    trans_error,
    write_metrics_csv,
    write_summary,
)
from src.evaluation.report import format_summary_table
from src.geometry.pose import Pose2D
from src.mcl.hypotheses import HypothesisSet, Modality
from src.run_config import RunConfig, RuntimeSection
from src.utils.errors import InvalidArgumentError

CONFIG_DIR = Path(__file__).resolve().parents[1] / "config"


def _row(index, e_trans, modality="vision", e_rot=0.1, ties=1, degraded=False) -> MetricRow:
    return MetricRow(record_index=index, e_trans=e_trans, e_rot=e_rot, tie_count=ties,
                     modality=modality, degraded=degraded)


class TestErrors:
    def test_translation(self):
        assert trans_error(Pose2D(3.0, 4.0, 0.0), Pose2D(0.0, 0.0, 1.0)) == pytest.approx(5.0)
        assert trans_error(Pose2D(1.0, 1.0, 0.0), Pose2D(1.0, 1.0, 2.0)) == 0.0

    def test_rotation_wraps(self):
        assert rot_error(Pose2D(0.0, 0.0, 3.0), Pose2D(0.0, 0.0, -3.0)) == pytest.approx(2 * math.pi - 6.0)

    def test_rotation_bounds_and_symmetry(self):
        rng = np.random.default_rng(12)
        for a, b in rng.uniform(-10, 10, size=(2000, 2)):
            pa, pb = Pose2D(0.0, 0.0, a), Pose2D(0.0, 0.0, b)
            err = rot_error(pa, pb)
            assert 0.0 <= err <= math.pi
            assert err == pytest.approx(rot_error(pb, pa), abs=1e-12)


class TestSummary:
    def test_per_modality_statistics(self):
        rows = [_row(0, 1.0), _row(1, 2.0), _row(2, 3.0, degraded=True), _row(0, 0.5, "scan")]
        summary = summarize(rows, "abc", label="demo")
        assert summary.schema_version == 1
        assert summary.record_count == 4
        vision = summary.modalities["vision"]
        assert vision.count == 3 and vision.degraded == 1
        assert vision.e_trans_mean == pytest.approx(2.0)
        assert vision.e_trans_std == pytest.approx(math.sqrt(2.0 / 3.0))
        assert summary.modalities["scan"].e_trans_std == 0.0

    def test_empty(self):
        summary = summarize([], "abc")
        assert summary.record_count == 0 and summary.modalities == {}

    def test_summary_document(self, tmp_path):
        write_summary(summarize([_row(0, 1.0)], "abc"), tmp_path / "summary.json")
        doc = json.loads((tmp_path / "summary.json").read_text())
        assert doc["schema_version"] == 1
        assert doc["config_digest"] == "abc"
        assert doc["modalities"]["vision"]["count"] == 1

    def test_table(self):
        table = format_summary_table([summarize([_row(0, 1.0)], "abc", label="UG/DA seed=1")])
        assert "UG/DA seed=1" in table and "vision" in table


class TestMetricsCsv:
    def test_header_and_values(self, tmp_path):
        rows = [_row(0, 0.1, ties=3), _row(1, 2.5, degraded=True)]
        write_metrics_csv(rows, tmp_path / "metrics.csv")
        lines = (tmp_path / "metrics.csv").read_text().splitlines()
        assert lines[0] == "record_index,e_trans,e_rot,tie_count,modality,degraded"
        assert lines[1] == "0,0.1,0.1,3,vision,0"
        assert lines[2] == "1,2.5,0.1,1,vision,1"

    def test_read_back(self, tmp_path):
        rows = [_row(0, 1 / 3), _row(1, 2.0, "fused", e_rot=0.7, ties=2)]
        write_metrics_csv(rows, tmp_path / "metrics.csv", timings=True)
        assert (tmp_path / "metrics.csv").read_text().splitlines()[0].endswith(",wall_time")
        loaded = read_metrics_csv(tmp_path / "metrics.csv")
        assert [r.e_trans for r in loaded] == [1 / 3, 2.0]
        assert loaded[1].modality == "fused" and loaded[1].tie_count == 2

    def test_invalid_row(self):
        with pytest.raises(ValueError):
            _row(0, -1.0)


class TestHeatmap:
    @pytest.fixture
    def hyps(self) -> HypothesisSet:
        poses = np.array([[1.25, 1.25, 0.0], [3.25, 1.25, 0.0], [1.3, 1.4, 1.0], [30.0, 30.0, 0.0]])
        return HypothesisSet(poses, seed=0, vision_ll=np.array([-1.0, -2.0, -5.0, 10.0]))

    def test_raster(self, hyps, walled_grid):
        raster = heatmap_raster(hyps, Modality.VISION, walled_grid)
        assert raster.shape == (20, 20)
        assert raster[2, 2] == pytest.approx(1.0)
        assert raster[2, 6] == pytest.approx(math.exp(-1.0))
        assert np.count_nonzero(raster) == 2

    def test_uniform_likelihood_is_flat(self, walled_grid):
        poses = walled_grid.cell_centers(*np.nonzero(walled_grid.free_mask))
        hyps = HypothesisSet(np.column_stack([poses, np.zeros(len(poses))]), seed=0,
                             scan_ll=np.full(len(poses), -3.0))
        raster = heatmap_raster(hyps, Modality.SCAN, walled_grid)
        np.testing.assert_allclose(raster[walled_grid.free_mask], 1.0)
        assert np.all(raster[walled_grid.occupied_mask] == 0.0)

    def test_pgm_export(self, hyps, walled_grid, tmp_path):
        path = export_heatmap(hyps, Modality.VISION, walled_grid, tmp_path / "heat.pgm")
        pixels = np.asarray(Image.open(path))
        assert pixels.shape == (20, 20)
        # image rows run from the top of the map
        assert pixels[17, 2] == 255
        assert pixels.max() == 255

    def test_pgm_marks_estimate_and_ground_truth(self, hyps, walled_grid, tmp_path):
        path = export_heatmap(hyps, Modality.VISION, walled_grid, tmp_path / "heat.pgm",
                              estimate=Pose2D(5.25, 3.25, 0.0), ground_truth=Pose2D(7.25, 7.25, 0.0))
        pixels = np.asarray(Image.open(path))
        # ground truth cell (row 14, col 14) is a "+"
        for r, c in [(5, 14), (4, 14), (6, 14), (5, 13), (5, 15)]:
            assert pixels[r, c] == PGM_MARK
        assert pixels[4, 13] == 0
        # estimate cell (row 6, col 10) is an "x"
        for r, c in [(13, 10), (12, 9), (14, 11), (12, 11), (14, 9)]:
            assert pixels[r, c] == PGM_MARK
        assert pixels[12, 10] == 0
        assert pixels[17, 2] == 255

    def test_pgm_marks_off_the_grid_are_dropped(self, hyps, walled_grid, tmp_path):
        path = export_heatmap(hyps, Modality.VISION, walled_grid, tmp_path / "heat.pgm",
                              ground_truth=Pose2D(-0.25, 0.25, 0.0))
        pixels = np.asarray(Image.open(path))
        # only the right arm of the "+" lands on column 0
        assert pixels[19, 0] == PGM_MARK
        assert np.count_nonzero(pixels == PGM_MARK) == 1

    def test_png_export(self, hyps, walled_grid, tmp_path):
        path = export_heatmap(hyps, Modality.VISION, walled_grid, tmp_path / "heat.png",
                              estimate=Pose2D(1.25, 1.25, 0.0), ground_truth=Pose2D(1.0, 1.0, 0.0))
        assert path.stat().st_size > 0

    def test_unsupported_format(self, hyps, walled_grid, tmp_path):
        with pytest.raises(InvalidArgumentError):
            export_heatmap(hyps, Modality.VISION, walled_grid, tmp_path / "heat.jpg")


def _seed_table(ug_da_vision, ug_da_scan):
    return {
        "UG/DA": {"vision": ug_da_vision, "scan": ug_da_scan, "fused": min(ug_da_vision, ug_da_scan)},
        "DG/UA": {"vision": 3.0, "scan": 0.5, "fused": 0.6},
        "DG/DA": {"vision": 0.8, "scan": 0.9, "fused": 0.7},
        "UG/UA": {"vision": 6.0, "scan": 5.0, "fused": 5.5},
    }


class TestTrendChecks:
    def test_all_trends_pass(self):
        trends = {seed: _seed_table(0.5, 4.0) for seed in range(5)}
        checks = {check.name: check for check in trend_checks(trends)}
        assert all(check.passed for check in checks.values())
        assert checks["UG/DA vision < scan"].required_seeds == 4

    def test_four_of_five_is_enough(self):
        trends = {seed: _seed_table(0.5, 4.0) for seed in range(4)}
        trends[4] = _seed_table(5.0, 4.0)
        check = next(c for c in trend_checks(trends) if c.name == "UG/DA vision < scan")
        assert check.passed_seeds == 4 and check.passed

    def test_three_of_five_fails(self):
        trends = {seed: _seed_table(0.5, 4.0) for seed in range(3)}
        trends[3] = trends[4] = _seed_table(5.0, 4.0)
        check = next(c for c in trend_checks(trends) if c.name == "UG/DA vision < scan")
        assert not check.passed

    def test_missing_archetype_is_not_evaluated(self):
        check = next(c for c in trend_checks({0: {"UG/DA": {"vision": 1.0}}}) if c.name == "UG/UA ambiguous")
        assert check.evaluated_seeds == 0 and not check.passed

    def test_confusion_outcome(self):
        outcome = ConfusionOutcome(seed=0, source_label="A", confused_label="B",
                                   unique_e_trans=1.0, confused_e_trans=3.0, excluded_e_trans=1.5)
        assert outcome.confusion_hurts and outcome.exclusion_helps


class TestRunConfig:
    def test_shipped_defaults(self):
        cfg = RunConfig.from_file(CONFIG_DIR / "default.yaml")
        assert len(cfg.rig) == 3
        assert cfg.scan.fusion_lambda == 1500.0
        assert cfg.vision.alpha == 0.5
        assert cfg.sampling.hypothesis_count == 1_000_000

    def test_unknown_key_rejected(self, tmp_path):
        (tmp_path / "bad.yaml").write_text("sampling:\n  hypotheses: 10\n")
        with pytest.raises(InvalidArgumentError):
            RunConfig.from_file(tmp_path / "bad.yaml")

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            RunConfig.from_file(tmp_path / "absent.yaml")

    def test_digest_ignores_runtime(self):
        a = RunConfig(runtime=RuntimeSection(workers=1, chunk_size=10))
        b = RunConfig(runtime=RuntimeSection(workers=8, chunk_size=999))
        assert a.digest() == b.digest()
        c = RunConfig.model_validate({"vision": {"alpha": 0.25}})
        assert c.digest() != a.digest()


class TestErrorProperties:
    def test_translation_triangle_inequality(self):
        rng = np.random.default_rng(3)
        for a, b, c in rng.uniform(-50, 50, size=(1000, 3, 2)):
            pa, pb, pc = (Pose2D(p[0], p[1], 0.0) for p in (a, b, c))
            assert trans_error(pa, pc) <= trans_error(pa, pb) + trans_error(pb, pc) + 1e-9

    def test_antipodal_headings(self):
        assert rot_error(Pose2D(0.0, 0.0, math.pi / 2), Pose2D(0.0, 0.0, -math.pi / 2)) == pytest.approx(math.pi)

    def test_summary_matches_rows(self, tmp_path):
        rng = np.random.default_rng(8)
        rows = [_row(i, float(e), e_rot=float(r)) for i, (e, r) in enumerate(rng.uniform(0, 3, size=(40, 2)))]
        write_metrics_csv(rows, tmp_path / "m.csv")
        loaded = read_metrics_csv(tmp_path / "m.csv")
        stats = summarize(loaded, "abc").modalities["vision"]
        e_trans = np.array([r.e_trans for r in rows])
        assert abs(stats.e_trans_mean - e_trans.mean()) <= 1e-9
        assert abs(stats.e_trans_std - e_trans.std()) <= 1e-9
