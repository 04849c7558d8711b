import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_set
from multiplicity import GroundTruth, ModelRecord, PredictionMatrix, SynthConfig, build_rashomon_set, generate
from multiplicity.core import SCORES
from multiplicity.errors import MisalignedIds, ParseError
from multiplicity.io import (
    file_digest,
    fmt,
    load_rashomon_set,
    read_ground_truth,
    read_metadata,
    read_predictions,
    write_predictions,
    write_rashomon_set,
)


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_fmt_round_trips():
    for v in (0.1, 1 / 3, 1e-300, 0.9999999999999999):
        assert float(fmt(v)) == v
    assert fmt(3) == "3" and fmt(None) == "" and fmt(True) == "true"


def test_synthetic_round_trip(tmp_path):
    rset = generate(SynthConfig(7, 40, 3, 0.8, 0.3, rng_seed=1, n_val_samples=25))
    paths = write_rashomon_set(rset, tmp_path)
    loaded, scores = load_rashomon_set(**{k: str(v) for k, v in paths.items()})
    assert scores is None
    assert loaded == rset


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_multilabel_round_trip(tmp_path_factory, seed, width):
    rng = np.random.default_rng(seed)
    rows = rng.integers(2, size=(3, 5, width + 1))
    rset = make_set(rows, truth=rng.integers(2, size=(5, width + 1)))
    paths = write_rashomon_set(rset, tmp_path_factory.mktemp("ml"))
    loaded, _ = load_rashomon_set(paths["predictions"], paths["truth"], paths["metadata"])
    assert loaded == rset


def test_score_round_trip_and_threshold(tmp_path):
    scores = np.array([[[0.2, 0.8], [0.6, 0.4]], [[0.5, 0.5], [0.9, 0.1]]])
    pm = PredictionMatrix(SCORES, scores, ["a", "b"], ["s1", "s2"])
    write_predictions(pm, tmp_path / "p.csv")
    again = read_predictions(tmp_path / "p.csv")
    assert again == pm
    _write(tmp_path / "t.csv", "sample_id,label\ns1,1\ns2,0\n")
    _write(tmp_path / "m.csv", "model_id,seed,val_metric\na,0,0.9\nb,1,0.8\n")
    labels, score_set = load_rashomon_set(tmp_path / "p.csv", tmp_path / "t.csv", tmp_path / "m.csv")
    assert score_set.test_predictions == pm
    np.testing.assert_array_equal(labels.codes, [[1, 0], [1, 0]])


def test_rows_in_any_order(tmp_path):
    _write(tmp_path / "p.csv", "model_id,sample_id,pred\nb,s2,1\na,s1,0\nb,s1,0\na,s2,1\n")
    _write(tmp_path / "t.csv", "sample_id,label\ns1,0\ns2,1\n")
    _write(tmp_path / "m.csv", "model_id,seed,val_metric\na,0,\nb,1,0.5\n")
    rset, _ = load_rashomon_set(tmp_path / "p.csv", tmp_path / "t.csv", tmp_path / "m.csv")
    assert rset.model_ids == ("a", "b")
    np.testing.assert_array_equal(rset.codes, [[0, 1], [0, 1]])
    assert rset.records[0].val_metric is None


class TestParseErrors:
    def test_bad_score_names_line(self, tmp_path):
        path = _write(tmp_path / "p.csv", "model_id,sample_id,score_0\na,s1,0.3\na,s2,1.7\n")
        with pytest.raises(ParseError) as info:
            read_predictions(path)
        assert info.value.line == 3 and ":3:" in str(info.value)

    def test_duplicate_row(self, tmp_path):
        path = _write(tmp_path / "p.csv", "model_id,sample_id,pred\na,s1,0\na,s1,1\n")
        with pytest.raises(ParseError) as info:
            read_predictions(path)
        assert info.value.line == 3 and "line 2" in str(info.value)

    def test_missing_cell(self, tmp_path):
        path = _write(tmp_path / "p.csv", "model_id,sample_id,pred\na,s1,0\na,s2,1\nb,s1,0\n")
        with pytest.raises(ParseError, match="'b'.*'s2'"):
            read_predictions(path)

    def test_ragged_row(self, tmp_path):
        path = _write(tmp_path / "p.csv", "model_id,sample_id,pred\na,s1,0,9\n")
        with pytest.raises(ParseError) as info:
            read_predictions(path)
        assert info.value.line == 2

    def test_non_integer_label(self, tmp_path):
        path = _write(tmp_path / "p.csv", "model_id,sample_id,pred\na,s1,x\n")
        with pytest.raises(ParseError, match="not an integer"):
            read_predictions(path)

    def test_bad_header(self, tmp_path):
        with pytest.raises(ParseError):
            read_predictions(_write(tmp_path / "p.csv", "model,sample,pred\na,s1,0\n"))
        with pytest.raises(ParseError):
            read_ground_truth(_write(tmp_path / "t.csv", "sample_id,lbl\ns1,0\n"))
        with pytest.raises(ParseError):
            read_metadata(_write(tmp_path / "m.csv", "model_id,val_metric\na,0.3\n"))

    def test_duplicate_truth_and_metadata(self, tmp_path):
        with pytest.raises(ParseError) as info:
            read_ground_truth(_write(tmp_path / "t.csv", "sample_id,label\ns1,0\ns1,1\n"))
        assert info.value.line == 3
        with pytest.raises(ParseError):
            read_metadata(_write(tmp_path / "m.csv", "model_id,seed,val_metric\na,0,1\na,1,1\n"))

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError, match="not found"):
            read_predictions(tmp_path / "nope.csv")

    def test_truth_missing_sample_is_named(self, tmp_path):
        _write(tmp_path / "p.csv", "model_id,sample_id,pred\na,s1,0\na,s2,1\n")
        _write(tmp_path / "t.csv", "sample_id,label\ns1,0\n")
        _write(tmp_path / "m.csv", "model_id,seed,val_metric\na,0,0.5\n")
        with pytest.raises(MisalignedIds, match="s2"):
            load_rashomon_set(tmp_path / "p.csv", tmp_path / "t.csv", tmp_path / "m.csv")


def test_output_is_lf_utf8(tmp_path):
    rset = make_set([[0, 1], [1, 1]])
    paths = write_rashomon_set(rset, tmp_path)
    data = paths["predictions"].read_bytes()
    assert b"\r" not in data and data.endswith(b"\n")
    data.decode("utf-8")


def test_digest_tracks_content(tmp_path):
    path = _write(tmp_path / "x.csv", "a\n1\n")
    before = file_digest(path)
    assert file_digest(path) == before
    _write(path, "a\n2\n")
    assert file_digest(path) != before


def test_write_then_build_equals_direct(tmp_path):
    preds = PredictionMatrix("labels", [[2, 0, 1]], ["only"], ["x", "y", "z"], num_classes=3)
    truth = GroundTruth([2, 0, 0], 3, ["x", "y", "z"])
    rset = build_rashomon_set([ModelRecord("only", 4, 0.66, 0.5)], preds, truth)
    paths = write_rashomon_set(rset, tmp_path)
    loaded, _ = load_rashomon_set(paths["predictions"], paths["truth"], paths["metadata"], num_classes=3)
    assert loaded == rset
