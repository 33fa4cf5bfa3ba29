"""Tests for the command-line interface."""

import json

import pytest
from click.testing import CliRunner

from rubi.cli import main

SMALL = [
    "--set", "wproc.batch_size=100",
    "--set", "wproc.epochs=1",
    "--set", "wproc.iters_per_epoch=5",
    "--set", "train.iterations=20",
    "--set", "train.batch_size=4",
    "--set", "train.hidden=8",
    "--set", "train.eval_every=10",
    "--set", "train_dict_size=60",
    "--set", "cv_dict_size=20",
    "--set", "eval_dict_size=50",
    "--set", "query_size=5",
    "--set", "k_max=3",
]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def data(runner, tmp_path):
    """Synthetic a, b, c languages with a-b and a-c dictionaries."""
    out = tmp_path / "data"
    result = runner.invoke(main, ["synth", str(out), "--n", "400", "--dim", "10", "--seed", "3"])
    assert result.exit_code == 0, result.output
    return out


class TestSynth:
    """Tests for the synthetic data command."""

    def test_writes_vectors_dictionaries_and_config(self, data):
        """Test every artifact and the config pointing at them."""
        for name in ("a.vec", "b.vec", "c.vec", "a-b.txt", "a-c.txt", "rubi.conf"):
            assert (data / name).exists(), name
        assert "dictionaries.a-c=a-c.txt" in (data / "rubi.conf").read_text()

    def test_needs_two_languages(self, runner, tmp_path):
        """Test a single tag is an input error."""
        result = runner.invoke(main, ["synth", str(tmp_path), "--langs", "a"])
        assert result.exit_code == 2


class TestRubiCommand:
    """Tests for the end-to-end command and run status."""

    def test_rubi_then_status(self, runner, data, tmp_path):
        """Test a run writes its result and shows up in status."""
        run = tmp_path / "run"
        result = runner.invoke(
            main,
            ["rubi", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "b", "-p", "c",
             "--seed", "0", "-o", str(run), *SMALL],
        )

        assert result.exit_code == 0, result.output
        payload = json.loads((run / "result.json").read_text())
        assert payload["method"] == "rubi"
        assert payload["seeds"] == {"pipeline": 0, "train": 0, "wproc": 0}
        assert (run / "config.txt").exists()

        status = runner.invoke(main, ["status", str(run)])
        assert status.exit_code == 0
        assert "rubi" in status.output
        assert "model.txt" in status.output

    def test_resume_reuses_the_run(self, runner, data, tmp_path):
        """Test a resumed run reproduces the first result file."""
        run = tmp_path / "run"
        args = ["rubi", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "b", "-p", "c",
                "--seed", "0", "-o", str(run), *SMALL]
        assert runner.invoke(main, args).exit_code == 0
        first = (run / "ranked_a-b.tsv").read_text()

        assert runner.invoke(main, [*args, "--resume"]).exit_code == 0
        assert (run / "ranked_a-b.tsv").read_text() == first

    def test_fresh_directories_get_identical_bytes(self, runner, data, tmp_path):
        """Test two runs with one seed into new directories write the same model and result."""
        outputs = []
        for name in ("first", "second"):
            run = tmp_path / name
            args = ["rubi", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "b", "-p", "c",
                    "--seed", "0", "-o", str(run), *SMALL]
            result = runner.invoke(main, args)
            assert result.exit_code == 0, result.output
            outputs.append(((run / "model.txt").read_bytes(), (run / "result.json").read_bytes()))

        assert outputs[0] == outputs[1]

    def test_non_finite_vectors_exit_with_numerical_code(self, runner, data, tmp_path):
        """Test a NaN coordinate stops the run with exit code 3."""
        (data / "a.vec").write_text("2 10\nx " + " ".join(["nan"] * 10) + "\n")

        result = runner.invoke(
            main,
            ["align", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "c", "--seed", "0",
             "-o", str(tmp_path / "run"), *SMALL],
        )

        assert result.exit_code == 3, result.output

    def test_undecodable_vectors_exit_with_input_code(self, runner, data, tmp_path):
        """Test invalid UTF-8 in a vector file exits with code 2 and no traceback."""
        (data / "a.vec").write_bytes(b"2 2\na 1 2\n\xff\xfe 3 4\n")

        result = runner.invoke(
            main,
            ["align", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "c", "--seed", "0",
             "-o", str(tmp_path / "run"), *SMALL],
        )

        assert result.exit_code == 2
        assert "cannot read embeddings" in result.output

    def test_unknown_config_key(self, runner, data, tmp_path):
        """Test an invalid setting exits with the input error code."""
        result = runner.invoke(
            main,
            ["rubi", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "b", "-p", "c",
             "--seed", "0", "-o", str(tmp_path / "run"), "--set", "no_such_key=1"],
        )
        assert result.exit_code == 2

    def test_missing_language(self, runner, data, tmp_path):
        """Test a language without embeddings exits with the input error code."""
        result = runner.invoke(
            main,
            ["baseline", "-c", str(data / "rubi.conf"), "-s", "a", "-t", "zz",
             "-o", str(tmp_path / "run"), *SMALL],
        )
        assert result.exit_code == 2

    def test_status_without_ledger(self, runner, tmp_path):
        """Test status on an empty directory."""
        result = runner.invoke(main, ["status", str(tmp_path)])
        assert result.exit_code == 0
        assert "No ledger" in result.output


class TestStepCommands:
    """Tests for running the pipeline one stage at a time."""

    def test_align_to_evaluate(self, runner, data, tmp_path):
        """Test align, candidates, featurize, train, predict and evaluate chain together."""
        conf = ["-c", str(data / "rubi.conf"), *SMALL]
        run = tmp_path / "run"
        alignment = run / "align_a-c.txt"
        cands, feats = tmp_path / "cands.tsv", tmp_path / "feats.csv"
        model, ranked = tmp_path / "model.txt", tmp_path / "ranked.tsv"
        result_json = tmp_path / "result.json"

        steps = [
            ["align", *conf, "-s", "a", "-t", "c", "--seed", "0", "-o", str(run)],
            ["candidates", *conf, "-s", "a", "-t", "c", "-a", str(alignment),
             "--words", str(data / "a-c.txt"), "-o", str(cands)],
            ["featurize", *conf, "-s", "a", "-t", "c", "-a", str(alignment),
             "--candidates", str(cands), "--dictionary", str(data / "a-c.txt"), "-o", str(feats)],
            ["train", *conf, "-f", str(feats), "--seed", "0", "-o", str(model),
             "--report", str(tmp_path / "training.csv")],
            ["predict", "-m", str(model), "-f", str(feats), "-o", str(ranked)],
            ["evaluate", *conf, "-r", str(ranked), "-d", str(data / "a-c.txt"), "-t", "c",
             "-o", str(result_json)],
        ]
        for args in steps:
            result = runner.invoke(main, args)
            assert result.exit_code == 0, (args[0], result.output)

        again = tmp_path / "model-again.txt"
        retrain = runner.invoke(
            main, ["train", *conf, "-f", str(feats), "--seed", "0", "-o", str(again)]
        )
        assert retrain.exit_code == 0, retrain.output
        assert again.read_bytes() == model.read_bytes()

        assert len(cands.read_text().splitlines()) == 50
        header = feats.read_text().splitlines()[0]
        assert header == "query,candidate,label,cosine,csls_1,csls_2,csls_3"
        payload = json.loads(result_json.read_text())
        assert payload["counts"]["evaluated"] == 50
        assert 0.0 <= payload["precision_at_1"] <= payload["precision_at_5"] <= 1.0
        assert (tmp_path / "training.csv").read_text().startswith("step,train_loss,cv_ndcg1")

    def test_predict_with_corrupt_model(self, runner, tmp_path):
        """Test a bad model file exits with the input error code."""
        model = tmp_path / "model.txt"
        model.write_text("not a model\n")
        feats = tmp_path / "feats.csv"
        feats.write_text("query,candidate,label,cosine\na,b,,0.5\n")

        result = runner.invoke(
            main, ["predict", "-m", str(model), "-f", str(feats), "-o", str(tmp_path / "r.tsv")]
        )

        assert result.exit_code == 2
