"""CLI flows and exit-code contract.

Functional paths run through click's test runner; exit codes go through a
real subprocess because the code mapping lives in the console entry point.
"""

import json
import subprocess
import sys
from pathlib import Path

import pytest
from click.testing import CliRunner

from claimsect.cli import cli

from test_annotation import build_inputs

SYNTH = Path(__file__).parent.parent / "sample_data" / "synthetic"


@pytest.fixture()
def runner():
    return CliRunner()


@pytest.fixture()
def inputs(tmp_path):
    tax, scores, dataset = build_inputs(tmp_path)
    return {"tax": str(tax), "scores": str(scores), "dataset": str(dataset), "tmp": tmp_path}


def run_cli(args, **kw):
    return subprocess.run(
        [sys.executable, "-m", "claimsect.cli", *args],
        capture_output=True, text=True, **kw,
    )


class TestValidateAndIngest:
    def test_validate_ok(self, runner, inputs):
        result = runner.invoke(cli, ["validate", "--taxonomy", inputs["tax"],
                                     "--scores", inputs["scores"]])
        assert result.exit_code == 0
        assert "covers the taxonomy" in result.output

    def test_ingest_normalizes(self, runner, inputs, tmp_path):
        out = tmp_path / "normalized.jsonl"
        result = runner.invoke(cli, ["ingest", "--scores", inputs["scores"],
                                     "--out", str(out)])
        assert result.exit_code == 0
        assert out.exists()
        assert "80 documents x 2 claims" in result.output


class TestTuneClassifyEval:
    def tune(self, runner, inputs, out, extra=()):
        return runner.invoke(
            cli,
            ["tune", "--taxonomy", inputs["tax"], "--scores", inputs["scores"],
             "--dataset", inputs["dataset"], "--out", str(out),
             "--annotator", "simulated", "--seed", "7", "--no-figures", *extra],
        )

    def test_tune_simulated_and_classify_and_eval(self, runner, inputs, tmp_path):
        campaign = tmp_path / "campaign"
        result = self.tune(runner, inputs, campaign)
        assert result.exit_code == 0, result.output
        reports = json.loads((campaign / "reports.json").read_text())
        assert {r["claim_id"] for r in reports["reports"]} == {"c1", "c2"}

        preds = tmp_path / "preds.jsonl"
        result = runner.invoke(
            cli,
            ["classify", "--taxonomy", inputs["tax"], "--scores", inputs["scores"],
             "--thresholds", str(campaign / "reports.json"), "--out", str(preds)],
        )
        assert result.exit_code == 0, result.output
        assert len(preds.read_text().splitlines()) == 80

        metrics = tmp_path / "metrics.json"
        result = runner.invoke(
            cli,
            ["eval", "--predictions", str(preds), "--dataset", inputs["dataset"],
             "--taxonomy", inputs["tax"], "--out", str(metrics), "--no-figures"],
        )
        assert result.exit_code == 0, result.output
        body = json.loads(metrics.read_text())
        assert body["weighted"]["f1"] > 0.9  # separable synthetic data

    def test_tune_seed_determinism_byte_identical(self, runner, inputs, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        assert self.tune(runner, inputs, a, ("--noise", "0.2")).exit_code == 0
        assert self.tune(runner, inputs, b, ("--noise", "0.2")).exit_code == 0
        assert (a / "reports.json").read_bytes() == (b / "reports.json").read_bytes()
        for log in sorted((a / "logs").glob("*.jsonl")):
            assert log.read_bytes() == (b / "logs" / log.name).read_bytes()

    def test_tune_replay_reproduces(self, runner, inputs, tmp_path):
        first = tmp_path / "first"
        assert self.tune(runner, inputs, first).exit_code == 0
        replayed = tmp_path / "replayed"
        result = runner.invoke(
            cli,
            ["tune", "--taxonomy", inputs["tax"], "--scores", inputs["scores"],
             "--out", str(replayed), "--annotator", "replay",
             "--replay-from", str(first), "--no-figures"],
        )
        assert result.exit_code == 0, result.output
        assert (replayed / "reports.json").read_bytes() == (
            first / "reports.json"
        ).read_bytes()

    def test_zero_shot_uses_uniform_half(self, runner, inputs, tmp_path):
        preds = tmp_path / "preds.jsonl"
        result = runner.invoke(
            cli,
            ["classify", "--taxonomy", inputs["tax"], "--scores", inputs["scores"],
             "--zero-shot", "--out", str(preds)],
        )
        assert result.exit_code == 0
        # spot-check one doc against the raw scores: detected iff score > 0.5
        scores = {}
        for line in Path(inputs["scores"]).read_text().splitlines()[1:]:
            rec = json.loads(line)
            scores[(rec["doc_id"], rec["claim_id"])] = rec["score"]
        rec = json.loads(preds.read_text().splitlines()[0])
        expect = {c for c in ("c1", "c2") if scores[(rec["doc_id"], c)] > 0.5}
        assert set(rec["claims"]) == expect

    def test_negation_filter_on_synthetic_sample(self, runner, tmp_path):
        plain = tmp_path / "plain.jsonl"
        filtered = tmp_path / "filtered.jsonl"
        base = ["classify", "--taxonomy", str(SYNTH / "taxonomy.json"),
                "--scores", str(SYNTH / "scores.jsonl"), "--zero-shot"]
        assert runner.invoke(cli, base + ["--out", str(plain)]).exit_code == 0
        assert (
            runner.invoke(cli, base + ["--negation-filter", "--out", str(filtered)])
            .exit_code == 0
        )
        for a, b in zip(plain.read_text().splitlines(), filtered.read_text().splitlines()):
            assert set(json.loads(b)["claims"]) <= set(json.loads(a)["claims"])


class TestExperiments:
    def test_folds_emits_csv_and_figure(self, runner, inputs, tmp_path):
        out = tmp_path / "folds"
        result = runner.invoke(
            cli,
            ["experiment", "folds", "--taxonomy", inputs["tax"],
             "--scores", inputs["scores"], "--dataset", inputs["dataset"],
             "--k", "3", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert (out / "folds.csv").exists()
        assert (out / "folds.png").exists()
        assert "Category" in result.output

    def test_p_sweep_emits_csv_and_figure(self, runner, inputs, tmp_path):
        out = tmp_path / "sweep"
        result = runner.invoke(
            cli,
            ["experiment", "p-sweep", "--taxonomy", inputs["tax"],
             "--scores", inputs["scores"], "--dataset", inputs["dataset"],
             "--p", "0.7", "--seeds", "2", "--max-steps", "10", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        lines = (out / "trajectories.csv").read_text().splitlines()
        assert lines[0] == "p,step,mean_dist,se,n_active"
        assert (out / "trajectories.png").exists()

    def test_temp_scaling_emits_csv_and_figure(self, runner, inputs, tmp_path):
        out = tmp_path / "temps"
        result = runner.invoke(
            cli,
            ["experiment", "temp-scaling", "--taxonomy", inputs["tax"],
             "--scores", inputs["scores"], "--dataset", inputs["dataset"],
             "--n", "5,10", "--out", str(out)],
        )
        assert result.exit_code == 0, result.output
        assert (out / "temp_scaling.csv").read_text().startswith("claim_id,n,")
        assert (out / "temp_scaling.png").exists()


class TestExitCodes:
    def test_success_is_zero(self, inputs):
        proc = run_cli(["validate", "--taxonomy", inputs["tax"]])
        assert proc.returncode == 0

    def test_unknown_flag_is_64_with_usage(self, inputs):
        proc = run_cli(["validate", "--taxonomy", inputs["tax"], "--bogus"])
        assert proc.returncode == 64
        assert "Usage" in proc.stderr or "no such option" in proc.stderr.lower()

    def test_unknown_subcommand_is_64(self):
        proc = run_cli(["frobnicate"])
        assert proc.returncode == 64

    def test_validation_error_is_1(self, tmp_path, inputs):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"taxonomy_id": "x"}))
        proc = run_cli(["validate", "--taxonomy", str(bad)])
        assert proc.returncode == 1

    def test_discrepancies_exit_1(self, tmp_path, inputs):
        other_scores = tmp_path / "other.jsonl"
        other_scores.write_text(
            json.dumps({"score_kind": "entailment", "range": [0, 1]})
            + "\n"
            + json.dumps({"doc_id": "d", "claim_id": "zz", "score": 0.5})
            + "\n"
        )
        proc = run_cli(
            ["validate", "--taxonomy", inputs["tax"], "--scores", str(other_scores)]
        )
        assert proc.returncode == 1
        assert "missing_column" in proc.stdout
