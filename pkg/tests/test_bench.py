import json

import numpy as np
import pytest

from lowrankmc import ParameterError
from lowrankmc.bench import (
    ExperimentConfig,
    parse_csv,
    render_table,
    run_experiment,
)
from lowrankmc.cli import main


def tiny_config(**overrides):
    base = dict(m=14, n=12, ranks=(2,), missing_props=(0.2,), n_reps=3,
                threads=1, master_seed=11, grid_size=8)
    base.update(overrides)
    return ExperimentConfig(**base)


@pytest.fixture(scope="module")
def small_report():
    return run_experiment(tiny_config(ranks=(2, 3), missing_props=(0.1, 0.3)))


class TestRunExperiment:
    def test_cell_and_pvalue_counts(self, small_report):
        cfg = small_report.config
        assert len(small_report.cells) == len(cfg.ranks) * len(cfg.missing_props) * 2
        assert len(small_report.p_values) == len(cfg.ranks) * len(cfg.missing_props)

    def test_pairing_shares_ground_truth(self, small_report):
        # one checksum per (rank, prop, rep): both mechanism arms saw the same Y
        seen = {}
        for entry in small_report.provenance:
            key = (entry["rank"], entry["missing_prop"], entry["rep"])
            assert key not in seen
            seen[key] = entry["y_checksum"]
        assert len(seen) == 2 * 2 * small_report.config.n_reps

    def test_noiseless_near_exact_completion(self):
        cfg = tiny_config(m=10, n=10, ranks=(2,), missing_props=(0.1,),
                          n_reps=1, sigma=0.0, grid_size=20, solver_tol=1e-6,
                          solver_max_iters=2000)
        report = run_experiment(cfg)
        for cell in report.cells:
            assert cell.mean_rel_err < 1e-4

    def test_single_mechanism_degenerate(self):
        report = run_experiment(tiny_config(mechanisms=("MCAR",)))
        assert report.p_values == ()
        assert render_table(report, "ascii")  # still renders

    def test_determinism_across_worker_counts(self):
        cfg1 = tiny_config(ranks=(2, 3), n_reps=4, threads=1)
        cfg2 = tiny_config(ranks=(2, 3), n_reps=4, threads=3)
        csv1 = render_table(run_experiment(cfg1), "csv")
        csv2 = render_table(run_experiment(cfg2), "csv")
        assert csv1 == csv2

    def test_repeat_run_identical_csv(self):
        cfg = tiny_config()
        assert render_table(run_experiment(cfg), "csv") == \
            render_table(run_experiment(cfg), "csv")

    def test_nmar_warns(self):
        cfg = tiny_config(mechanisms=("MCAR", "NMAR_LOGISTIC"), n_reps=2)
        with pytest.warns(UserWarning, match="NMAR"):
            run_experiment(cfg)

    @pytest.mark.parametrize("overrides", [
        dict(ranks=()), dict(missing_props=(0.0,)), dict(missing_props=(1.2,)),
        dict(n_reps=0), dict(mechanisms=("BOGUS",)), dict(solver="BOGUS"),
        dict(error_scope="BOGUS"), dict(anchor_col=99), dict(sigma=-1.0),
    ])
    def test_config_validation(self, overrides):
        with pytest.raises(ParameterError):
            tiny_config(**overrides).validate()

    def test_hard_impute_solver(self):
        report = run_experiment(tiny_config(solver="HARD_IMPUTE", n_reps=2))
        assert all(np.isfinite(c.mean_rel_err) for c in report.cells)

    def test_fixed_lambda_policy(self):
        report = run_experiment(tiny_config(lam=0.5, n_reps=2))
        assert all(np.isfinite(c.mean_rel_err) for c in report.cells)


class TestRendering:
    def test_csv_round_trip(self, small_report):
        text = render_table(small_report, "csv")
        rows = parse_csv(text)
        assert len(rows) == len(small_report.cells)
        for row, cell in zip(rows, small_report.cells):
            assert row["rank"] == cell.rank
            assert row["mechanism"] == cell.mechanism
            assert row["n_reps"] == cell.n_reps
            assert row["missing_prop"] == pytest.approx(cell.missing_prop)
            assert row["mean_rel_err_pct"] == pytest.approx(cell.mean_rel_err, rel=1e-5)
            assert row["sd_rel_err"] == pytest.approx(cell.sd_rel_err, rel=1e-5)

    def test_csv_schema_and_line_endings(self, small_report):
        text = render_table(small_report, "csv")
        lines = text.split("\n")
        assert lines[0] == "rank,missing_prop,mechanism,n_reps,mean_rel_err_pct,sd_rel_err,welch_p"
        assert "\r" not in text
        assert text.endswith("\n")

    def test_ascii_mirrors_table_shape(self, small_report):
        text = render_table(small_report, "ascii")
        lines = text.splitlines()
        assert lines[0].split()[:2] == ["Rank", "Mechanism"]
        assert "10%" in lines[0] and "30%" in lines[0]
        # four-decimal formatting per cell value
        first_cell = small_report.cells[0]
        assert f"{first_cell.mean_rel_err:.4f}" in text

    def test_json_faithful(self, small_report):
        payload = json.loads(render_table(small_report, "json"))
        assert payload["config"]["n_reps"] == small_report.config.n_reps
        assert len(payload["cells"]) == len(small_report.cells)
        assert payload["cells"][0]["mean_rel_err"] == small_report.cells[0].mean_rel_err

    def test_unknown_format_rejected(self, small_report):
        with pytest.raises(ParameterError):
            render_table(small_report, "xml")


class TestCli:
    ARGS = ["--m", "12", "--n", "12", "--ranks", "2", "--props", "0.2",
            "--reps", "2", "--seed", "5", "--threads", "1"]

    def test_writes_csv_file(self, tmp_path, capsys):
        out = tmp_path / "report.csv"
        code = main(self.ARGS + ["--format", "csv", "--out", str(out)])
        assert code == 0
        rows = parse_csv(out.read_text())
        assert {r["mechanism"] for r in rows} == {"MCAR", "MAR_ROWPERM"}

    def test_stdout_ascii(self, capsys):
        assert main(self.ARGS) == 0
        captured = capsys.readouterr()
        assert "Rank" in captured.out

    def test_config_file_with_overrides(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps({
            "m": 12, "n": 12, "ranks": [2], "missing_props": [0.2],
            "n_reps": 2, "threads": 1, "master_seed": 1}))
        out = tmp_path / "a.csv"
        assert main(["--config", str(cfg_path), "--format", "csv",
                     "--out", str(out)]) == 0
        assert "MCAR" in out.read_text()

    def test_env_seed_overrides(self, tmp_path, monkeypatch):
        out1, out2 = tmp_path / "1.csv", tmp_path / "2.csv"
        monkeypatch.setenv("LOWRANK_SEED", "99")
        assert main(self.ARGS + ["--format", "csv", "--out", str(out1)]) == 0
        monkeypatch.delenv("LOWRANK_SEED")
        assert main(self.ARGS + ["--seed", "99", "--format", "csv",
                                 "--out", str(out2)]) == 0
        # env seed 99 beats --seed 5, so both runs used seed 99
        assert out1.read_text() == out2.read_text()

    def test_config_error_exit_code(self, capsys):
        assert main(["--props", "1.5", "--reps", "1", "--threads", "1"]) == 2
        assert main(["--config", "/does/not/exist.json"]) == 2

    def test_bad_env_seed(self, monkeypatch, capsys):
        monkeypatch.setenv("LOWRANK_SEED", "not-an-int")
        assert main(self.ARGS) == 2
