import csv
import json

import numpy as np
import pytest

from conftest import make_set
from multiplicity import SynthConfig, generate
from multiplicity.cli import main
from multiplicity.io import write_rashomon_set


def _read(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def _inputs(paths):
    args = ["--predictions", str(paths["predictions"]), "--truth", str(paths["truth"]),
            "--metadata", str(paths["metadata"])]
    if "val_predictions" in paths:
        args += ["--val-predictions", str(paths["val_predictions"]),
                 "--val-truth", str(paths["val_truth"])]
    return args


@pytest.fixture
def synth_dir(tmp_path):
    rset = generate(SynthConfig(12, 300, 2, 0.85, 0.5, rng_seed=1, n_val_samples=200))
    return write_rashomon_set(rset, tmp_path / "set")


class TestValidate:
    def test_clean(self, synth_dir, capsys):
        assert main(["validate"] + _inputs(synth_dir)) == 0
        assert "12 models" in capsys.readouterr().out

    def test_truth_missing_id(self, synth_dir, capsys):
        path = synth_dir["truth"]
        lines = path.read_text().splitlines(keepends=True)
        dropped = lines.pop(5).split(",")[0]
        path.write_text("".join(lines))
        assert main(["validate"] + _inputs(synth_dir)) == 1
        assert dropped in capsys.readouterr().err

    def test_bad_score_names_row(self, tmp_path, capsys):
        (tmp_path / "p.csv").write_text("model_id,sample_id,score_0,score_1\n"
                                        "a,s1,0.2,0.8\na,s2,-0.1,1.1\n")
        (tmp_path / "t.csv").write_text("sample_id,label\ns1,1\ns2,0\n")
        (tmp_path / "m.csv").write_text("model_id,seed,val_metric\na,0,0.5\n")
        code = main(["validate", "--predictions", str(tmp_path / "p.csv"),
                     "--truth", str(tmp_path / "t.csv"), "--metadata", str(tmp_path / "m.csv")])
        assert code == 1
        assert "p.csv:3" in capsys.readouterr().err

    def test_usage_error_is_input_error(self, capsys):
        with pytest.raises(SystemExit) as info:
            main(["validate"])
        assert info.value.code == 1


class TestAmbiguity:
    def test_single_model(self, tmp_path):
        paths = write_rashomon_set(make_set([[0, 1, 1]]), tmp_path / "one")
        assert main(["ambiguity"] + _inputs(paths) + ["--out", str(tmp_path / "o")]) == 0
        rows = _read(tmp_path / "o" / "ambiguity_random_tau1.csv")
        assert len(rows) == 1
        assert rows[0]["num_models"] == "1" and float(rows[0]["mean"]) == 0.0

    def test_relaxed_below_strict_on_files(self, synth_dir, tmp_path):
        out = tmp_path / "o"
        assert main(["ambiguity"] + _inputs(synth_dir)
                    + ["--tau", "0.8,1", "--repetitions", "10", "--seed", "3", "--out", str(out)]) == 0
        strict = _read(out / "ambiguity_random_tau1.csv")
        relaxed = _read(out / "ambiguity_random_tau0.8.csv")
        means = [float(r["mean"]) for r in strict]
        assert all(a <= b for a, b in zip(means, means[1:]))
        for s, r in zip(strict, relaxed):
            assert float(r["mean"]) <= float(s["mean"])
            assert float(s["iqr25"]) <= float(s["iqr75"])
        assert {r["seed"] for r in strict} == {"3"}

    def test_missing_val_metric_exit(self, tmp_path):
        paths = write_rashomon_set(make_set([[0, 1], [1, 1]]), tmp_path / "s")
        code = main(["ambiguity"] + _inputs(paths)
                    + ["--strategy", "ascending_val", "--out", str(tmp_path / "o")])
        assert code == 1
        assert not (tmp_path / "o").exists()


class TestAgreement:
    def test_identical_models(self, tmp_path):
        paths = write_rashomon_set(make_set([[0, 1, 1, 0, 1]] * 10), tmp_path / "s")
        out = tmp_path / "o"
        assert main(["agreement"] + _inputs(paths) + ["--ensemble-size", "5", "--out", str(out)]) == 0
        row = _read(out / "agreement_summary.csv")[0]
        assert float(row["mean_agreement"]) == 1.0 and float(row["mean_coverage"]) == 1.0
        assert len(_read(out / "agreement_pairs.csv")) == 100

    def test_insufficient_models(self, tmp_path):
        paths = write_rashomon_set(make_set([[0, 1]] * 3), tmp_path / "s")
        code = main(["agreement"] + _inputs(paths) + ["--ensemble-size", "2", "--out", str(tmp_path / "o")])
        assert code == 1


class TestSelective:
    def test_perfect_models(self, tmp_path):
        paths = write_rashomon_set(make_set([[0, 1, 2]] * 4, truth=[0, 1, 2]), tmp_path / "s")
        out = tmp_path / "o"
        assert main(["selective"] + _inputs(paths) + ["--repetitions", "3", "--out", str(out)]) == 0
        rows = _read(out / "selective_random_tau1.csv")
        assert len(rows) == 4
        assert all(float(r["coverage_mean"]) == 1.0 and float(r["accuracy_mean"]) == 1.0 for r in rows)

    def test_tau_grid(self, synth_dir, tmp_path):
        out = tmp_path / "o"
        assert main(["selective"] + _inputs(synth_dir)
                    + ["--tau", "0.8,0.9,1", "--members", "m000,m001,m002,m003,m004,m005,m006,m007,m008,m009",
                       "--out", str(out)]) == 0
        last = [float(_read(out / f"selective_members_tau{t}.csv")[-1]["accuracy_mean"])
                for t in ("0.8", "0.9", "1")]
        assert last[0] <= last[1] <= last[2]


class TestStatsCommands:
    def test_simulate_and_ftest_identical(self, tmp_path, capsys):
        sim = tmp_path / "sim.csv"
        assert main(["simulate", "--p", "0.9", "--n-samples", "500", "--n-models", "20",
                     "--out", str(sim)]) == 0
        assert len(_read(sim)) == 20
        assert main(["ftest", str(sim), str(sim)]) == 0
        header, values = capsys.readouterr().out.strip().splitlines()
        row = dict(zip(header.split(","), values.split(",")))
        assert float(row["f_statistic"]) == 1.0 and float(row["p_value"]) == 1.0
        assert row["df_num"] == "19"

    def test_ftest_zero_variance_is_computation_error(self, tmp_path):
        a = tmp_path / "a.csv"
        a.write_text("accuracy\n0.5\n0.5\n")
        assert main(["ftest", str(a), str(a)]) == 2


class TestKde:
    def test_points_grid(self, tmp_path):
        pts = np.random.default_rng(0).normal(size=(40, 2))
        src = tmp_path / "pts.csv"
        src.write_text("x,y\n" + "".join(f"{a!r},{b!r}\n" for a, b in pts.tolist()))
        out = tmp_path / "kde.csv"
        assert main(["kde", "--points", str(src), "--grid", "30", "20", "--out", str(out)]) == 0
        rows = _read(out)
        assert len(rows) == 600 and list(rows[0]) == ["x", "y", "density"]

    def test_metadata_points(self, synth_dir, tmp_path):
        assert main(["kde", "--metadata", str(synth_dir["metadata"]), "--out", str(tmp_path / "k.csv")]) == 0

    def test_degenerate_exit(self, tmp_path):
        src = tmp_path / "pts.csv"
        src.write_text("x,y\n1,2\n1,3\n")
        assert main(["kde", "--points", str(src), "--out", str(tmp_path / "k.csv")]) == 2
        assert not (tmp_path / "k.csv").exists()


class TestReport:
    def test_report_contents(self, synth_dir, tmp_path):
        out = tmp_path / "r.json"
        assert main(["report"] + _inputs(synth_dir) + ["--repetitions", "5", "--pairs", "20",
                                                       "--seed", "4", "--out", str(out)]) == 0
        report = json.loads(out.read_text())
        assert set(report) == {"scalar_metrics", "curves", "agreement_summaries", "ftests", "provenance"}
        assert report["provenance"]["seed"] == 4
        assert all(c["rng_seed"] == 4 for c in report["curves"])
        assert {(s["ensemble_size"], s["normalized"]) for s in report["agreement_summaries"]} == {
            (1, False), (1, True), (2, False), (2, True), (5, False), (5, True)}
        assert [f["split"] for f in report["ftests"]] == ["val", "test"]

    def test_digest_changes_with_input(self, synth_dir, tmp_path):
        args = ["report"] + _inputs(synth_dir) + ["--repetitions", "2", "--pairs", "5"]
        main(args + ["--out", str(tmp_path / "a.json")])
        text = synth_dir["metadata"].read_text()
        synth_dir["metadata"].write_text(text.replace("m000,0,", "m000,7,", 1))
        main(args + ["--out", str(tmp_path / "b.json")])
        a = json.loads((tmp_path / "a.json").read_text())["provenance"]["inputs"]
        b = json.loads((tmp_path / "b.json").read_text())["provenance"]["inputs"]
        assert a["metadata"]["sha256"] != b["metadata"]["sha256"]
        assert a["predictions"]["sha256"] == b["predictions"]["sha256"]


def test_synth_command_round_trip(tmp_path):
    out = tmp_path / "s"
    assert main(["synth", "--n-models", "5", "--n-samples", "30", "--num-classes", "3",
                 "--seed", "2", "--out", str(out)]) == 0
    assert main(["validate", "--predictions", str(out / "predictions.csv"), "--truth",
                 str(out / "truth.csv"), "--metadata", str(out / "metadata.csv"),
                 "--val-predictions", str(out / "val_predictions.csv"),
                 "--val-truth", str(out / "val_truth.csv")]) == 0


def test_invalid_synth_config_exit(tmp_path):
    assert main(["synth", "--rho", "1.5", "--out", str(tmp_path / "s")]) == 1
