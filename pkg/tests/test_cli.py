"""Command-line interface tests (run in-process via cli.run)."""

import os

import pytest

from prospect_explain.cli import run
from prospect_explain.models import load_model


@pytest.fixture()
def synth_csv(tmp_path):
    path = str(tmp_path / "data.csv")
    assert run(["synth", "--n", "258", "--seed", "7", "--out", path]) == 0
    return path


@pytest.fixture()
def trained_model(tmp_path, synth_csv, capsys):
    path = str(tmp_path / "model.txt")
    code = run(
        [
            "train",
            "--data", synth_csv,
            "--model", "logreg",
            "--split-seed", "1",
            "--train-seed", "1",
            "--out", path,
        ]
    )
    assert code == 0
    capsys.readouterr()
    return path


def test_synth_then_train_report(tmp_path, synth_csv, capsys):
    capsys.readouterr()
    model_path = str(tmp_path / "m.txt")
    code = run(
        [
            "train",
            "--data", synth_csv,
            "--model", "logreg",
            "--split-seed", "1",
            "--train-seed", "1",
            "--out", model_path,
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    header, values = out.strip().splitlines()
    assert header == "final_loss\ttrain_accuracy\ttest_accuracy\tepochs"
    cells = values.split("\t")
    assert float(cells[2]) >= 0.85  # test accuracy
    assert int(cells[3]) > 0
    assert os.path.exists(model_path)


def test_train_rejects_unknown_model(synth_csv, tmp_path, capsys):
    code = run(
        [
            "train",
            "--data", synth_csv,
            "--model", "nonsense",
            "--split-seed", "1",
            "--train-seed", "1",
            "--out", str(tmp_path / "m.txt"),
        ]
    )
    assert code == 2
    err = capsys.readouterr().err
    assert err.startswith("error:")
    assert "\n" not in err.strip()


def test_unknown_flag_is_usage_error(capsys):
    assert run(["synth", "--n", "10", "--seed", "1", "--out", "x.csv", "--bogus"]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_subcommand_is_usage_error(capsys):
    assert run([]) == 2
    assert capsys.readouterr().err.startswith("error:")


def test_missing_file_is_runtime_error(tmp_path, capsys):
    code = run(["evaluate", "--model", str(tmp_path / "no.txt"), "--data", str(tmp_path / "no.csv")])
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error: models:")


def test_evaluate_prints_accuracy(trained_model, synth_csv, capsys):
    assert run(["evaluate", "--model", trained_model, "--data", synth_csv]) == 0
    value = float(capsys.readouterr().out.strip())
    assert 0.0 <= value <= 1.0
    assert value >= 0.85


def test_explain_single_index_writes_files(tmp_path, trained_model, synth_csv, capsys):
    out_dir = str(tmp_path / "expl")
    code = run(
        [
            "explain",
            "--model", trained_model,
            "--data", synth_csv,
            "--index", "0",
            "--samples", "500",
            "--seed", "3",
            "--out-dir", out_dir,
        ]
    )
    assert code == 0
    assert os.path.exists(os.path.join(out_dir, "0.tsv"))
    assert os.path.exists(os.path.join(out_dir, "0.svg"))


def test_explain_requires_index_or_all_test(trained_model, synth_csv, tmp_path, capsys):
    base = [
        "explain", "--model", trained_model, "--data", synth_csv,
        "--seed", "3", "--out-dir", str(tmp_path / "x"),
    ]
    assert run(base) == 2
    assert run(base + ["--index", "0", "--all-test"]) == 2


def test_explain_all_test_covers_stored_split(tmp_path, trained_model, synth_csv, capsys):
    out_dir = str(tmp_path / "all")
    code = run(
        [
            "explain",
            "--model", trained_model,
            "--data", synth_csv,
            "--all-test",
            "--samples", "200",
            "--seed", "3",
            "--out-dir", out_dir,
        ]
    )
    assert code == 0
    model = load_model(trained_model)
    files = {name for name in os.listdir(out_dir) if name.endswith(".tsv")}
    assert files == {f"{i}.tsv" for i in model.test_ids}


def test_stats_writes_12_row_tsv(tmp_path, synth_csv, capsys):
    out = str(tmp_path / "stats.tsv")
    assert run(["stats", "--data", synth_csv, "--out", out]) == 0
    with open(out, encoding="utf-8") as fh:
        assert len(fh.read().splitlines()) == 12


def test_synth_param_overrides(tmp_path, capsys):
    path = str(tmp_path / "sym.csv")
    code = run(
        [
            "synth", "--n", "300", "--seed", "5", "--out", path,
            "--prior", "0.3",
            "--param", "dhi_index:0.5,0.5,0.1",
        ]
    )
    assert code == 0
    from prospect_explain.dataset import load_dataset

    ds = load_dataset(path)
    n0, n1 = ds.class_counts()
    assert n1 < n0  # prior 0.3 skews toward failures


def test_synth_bad_param_is_usage_error(tmp_path, capsys):
    code = run(
        ["synth", "--n", "10", "--seed", "1", "--out", str(tmp_path / "d.csv"),
         "--param", "dhi_index=0.5"]
    )
    assert code == 2
    code = run(
        ["synth", "--n", "10", "--seed", "1", "--out", str(tmp_path / "d.csv"),
         "--param", "unknown_feature:0.5,0.5,0.1"]
    )
    assert code == 2


def test_validation_error_maps_to_runtime_error(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("id,wrong,header\n", encoding="utf-8")
    code = run(
        ["train", "--data", str(bad), "--model", "logreg",
         "--split-seed", "1", "--train-seed", "1", "--out", str(tmp_path / "m.txt")]
    )
    assert code == 1
    err = capsys.readouterr().err
    assert err.startswith("error: dataset:")
    assert "\n" not in err.strip()
