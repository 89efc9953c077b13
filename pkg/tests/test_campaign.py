import csv
import os

import numpy as np
import pytest

from cadre.campaign import CampaignConfig, emit_plot_data, run_campaign

from conftest import MODELS_DIR

SMALL = dict(study="linear-gaussian", nodes=6, edges=6,
             sample_sizes=(200,), repetitions=2, methods=("bootstrap",),
             replicates=8, seed=3)


def _read(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestConfig:
    def test_yaml_round_trip_with_defaults(self):
        cfg = CampaignConfig.from_yaml(
            "study: linear-gaussian\nout_dir: x\nnodes: 5\nedges: 4\n")
        assert cfg.repetitions == 500
        assert cfg.sample_sizes == tuple(range(100, 1001, 100))
        assert cfg.replicates == 200
        assert cfg.jackknife_fraction == 0.9
        assert cfg.penalty_discount == 2.0

    def test_expert_default_repetitions(self):
        cfg = CampaignConfig.from_yaml(
            "study: expert-bif\nout_dir: x\nmodel_path: m.bif\n")
        assert cfg.repetitions == 100

    def test_unknown_key_is_hard_error(self):
        with pytest.raises(ValueError, match="unknown config keys"):
            CampaignConfig.from_yaml(
                "study: linear-gaussian\nout_dir: x\nnodes: 5\nedges: 4\nbogus: 1\n")

    def test_non_increasing_sample_sizes_rejected(self):
        with pytest.raises(ValueError):
            CampaignConfig(study="linear-gaussian", out_dir="x", nodes=5,
                           edges=4, sample_sizes=(500, 500))

    def test_missing_model_path_rejected(self):
        with pytest.raises(ValueError):
            CampaignConfig(study="expert-bif", out_dir="x")

    def test_checked_in_config_files_parse(self):
        root = os.path.join(os.path.dirname(__file__), "..", "configs")
        for name in sorted(os.listdir(root)):
            with open(os.path.join(root, name)) as fh:
                CampaignConfig.from_yaml(fh.read())


class TestRunCampaign:
    def test_minimal_campaign_structure(self, tmp_path):
        cfg = CampaignConfig(out_dir=str(tmp_path / "c"), **SMALL)
        result = run_campaign(cfg)
        assert result["failures"] == 0
        assert len(result["records"]) == 2
        summary = _read(tmp_path / "c" / "summary.csv")
        assert len(summary) == 1
        assert summary[0]["sample_size"] == "200"
        assert summary[0]["method"] == "bootstrap"
        runs = _read(tmp_path / "c" / "runs.csv")
        assert len(runs) == 2
        assert {r["status"] for r in runs} == {"ok"}

    def test_summary_means_match_recomputation_from_runs(self, tmp_path):
        cfg = CampaignConfig(out_dir=str(tmp_path / "c"), **SMALL)
        run_campaign(cfg)
        runs = _read(tmp_path / "c" / "runs.csv")
        summary = _read(tmp_path / "c" / "summary.csv")[0]
        for metric in ("shd", "brier", "reliability_corrected"):
            mean = np.mean([float(r[metric]) for r in runs])
            assert float(summary[metric]) == pytest.approx(mean, abs=1e-12)

    def test_same_seed_twice_is_byte_identical(self, tmp_path):
        out = []
        for tag in ("a", "b"):
            cfg = CampaignConfig(out_dir=str(tmp_path / tag), **SMALL)
            run_campaign(cfg)
            with open(tmp_path / tag / "summary.csv", "rb") as fh:
                out.append(fh.read())
        assert out[0] == out[1]

    def test_worker_count_does_not_change_output(self, tmp_path):
        texts = {}
        for workers in (1, 2):
            cfg = CampaignConfig(out_dir=str(tmp_path / str(workers)),
                                 workers=workers, **SMALL)
            run_campaign(cfg)
            for name in ("summary.csv", "calibration.csv"):
                with open(tmp_path / str(workers) / name, "rb") as fh:
                    texts.setdefault(name, []).append(fh.read())
        for name, (a, b) in texts.items():
            assert a == b, name

    def test_replicate_index_files_written_on_request(self, tmp_path):
        cfg = CampaignConfig(out_dir=str(tmp_path / "c"),
                             emit_replicate_indices=True, **SMALL)
        run_campaign(cfg)
        folder = tmp_path / "c" / "replicates" / "size200_rep0_bootstrap"
        assert len(list(folder.iterdir())) == 8

    def test_bad_model_file_records_failures_and_continues(self, tmp_path):
        cfg = CampaignConfig(study="expert-bif", model_path=str(tmp_path / "no.bif"),
                             out_dir=str(tmp_path / "c"), sample_sizes=(100,),
                             repetitions=2, methods=("bootstrap",), replicates=2)
        result = run_campaign(cfg)
        assert result["failures"] == 2
        runs = _read(tmp_path / "c" / "runs.csv")
        assert all(r["status"].startswith("failed:") for r in runs)

    def test_expert_campaign_runs_on_checked_in_model(self, tmp_path):
        cfg = CampaignConfig(study="expert-bif",
                             model_path=os.path.join(MODELS_DIR, "child.bif"),
                             out_dir=str(tmp_path / "c"), sample_sizes=(200,),
                             repetitions=1, methods=("none",), replicates=1)
        result = run_campaign(cfg)
        assert result["failures"] == 0


class TestEmitPlotData:
    def test_empty_directory_is_an_error(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            emit_plot_data(str(tmp_path))

    def test_tidy_files_cover_each_group_and_metric(self, tmp_path):
        cfg = CampaignConfig(out_dir=str(tmp_path / "c"), **SMALL)
        run_campaign(cfg)
        written = emit_plot_data(str(tmp_path / "c"))
        assert len(written) == 4
        shd_rows = _read(tmp_path / "c" / "plot_shd_vs_n.csv")
        assert len(shd_rows) == 1  # one (size, method) group, one metric
        rel_rows = _read(tmp_path / "c" / "plot_reliability_vs_n.csv")
        assert {r["metric"] for r in rel_rows} == {"reliability",
                                                   "reliability_corrected"}
        for r in rel_rows:
            if r["metric"] == "reliability":
                assert float(r["value"]) >= 0.0
