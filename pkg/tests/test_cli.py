import json
import shutil

import pytest

from opiniontrack.cli import main


def run(capsys, *args):
    code = main(list(args))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def pipeline_args(fixtures, store, out):
    return ["pipeline",
            "--store", str(store), "--kb", str(fixtures / "kb.jsonl"),
            "--docs", str(fixtures / "docs.jsonl"),
            "--from", "2015-03-01", "--to", "2015-03-05",
            "--sentiment-model", str(fixtures / "sentiment_model.json"),
            "--disambig-model", str(fixtures / "disambig_model.json"),
            "--clusters", str(fixtures / "clusters.tsv"),
            "--embeddings", str(fixtures / "embeddings.txt"),
            "--lexicon", str(fixtures / "lexicon.tsv"),
            "--out", str(out)]


# --- exit codes ----------------------------------------------------------


def test_help_exits_zero(capsys):
    code, out, _ = run(capsys, "--help")
    assert code == 0
    assert "pipeline" in out and "aggregate" in out


def test_unknown_command_is_usage_error(capsys):
    code, _, err = run(capsys, "frobnicate")
    assert code == 1


def test_aggregate_inverted_range_is_usage_error(tmp_path, fixtures, capsys):
    code, _, err = run(capsys, "aggregate",
                       "--store", str(tmp_path / "s"),
                       "--kb", str(fixtures / "kb.jsonl"),
                       "--from", "2015-03-05", "--to", "2015-03-01")
    assert code == 1
    assert "after" in err


def test_bad_kb_is_data_error(tmp_path, capsys):
    bad_kb = tmp_path / "kb.jsonl"
    bad_kb.write_text('{"canonical": "No Id"}\n', encoding="utf-8")
    code, _, err = run(capsys, "aggregate",
                       "--store", str(tmp_path / "s"), "--kb", str(bad_kb),
                       "--from", "2015-03-01", "--to", "2015-03-05")
    assert code == 2


# --- ingest --------------------------------------------------------------


def test_ingest_jsonl(tmp_path, fixtures, capsys):
    code, out, err = run(capsys, "ingest", "jsonl", str(fixtures / "docs.jsonl"),
                         "--store", str(tmp_path / "s"))
    assert code == 0
    assert json.loads(out) == {"stored": 30, "bad_lines": []}

    # replay stores nothing new
    code, out, _ = run(capsys, "ingest", "jsonl", str(fixtures / "docs.jsonl"),
                       "--store", str(tmp_path / "s"))
    assert code == 0
    assert json.loads(out)["stored"] == 0


# --- stage compositionality ---------------------------------------------


def test_pipeline_matches_golden_bytes(tmp_path, fixtures):
    out = tmp_path / "indicators.json"
    assert main(pipeline_args(fixtures, tmp_path / "s", out)) == 0
    assert out.read_bytes() == (fixtures / "golden_indicators.json").read_bytes()


def test_pipeline_rerun_is_identical(tmp_path, fixtures):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    store = tmp_path / "s"
    assert main(pipeline_args(fixtures, store, out1)) == 0
    assert main(pipeline_args(fixtures, store, out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_stage_by_stage_equals_pipeline(tmp_path, fixtures, capsys):
    store = tmp_path / "s"
    common = ["--store", str(store), "--kb", str(fixtures / "kb.jsonl"),
              "--from", "2015-03-01", "--to", "2015-03-05"]
    assert run(capsys, "ingest", "jsonl", str(fixtures / "docs.jsonl"),
               "--store", str(store))[0] == 0
    assert run(capsys, "extract", *common)[0] == 0
    assert run(capsys, "disambiguate", *common,
               "--model", str(fixtures / "disambig_model.json"))[0] == 0
    assert run(capsys, "sentiment",
               "--store", str(store),
               "--from", "2015-03-01", "--to", "2015-03-05",
               "--model", str(fixtures / "sentiment_model.json"),
               "--clusters", str(fixtures / "clusters.tsv"),
               "--embeddings", str(fixtures / "embeddings.txt"),
               "--lexicon", str(fixtures / "lexicon.tsv"))[0] == 0
    out = tmp_path / "staged.json"
    assert run(capsys, "aggregate", *common, "--out", str(out))[0] == 0
    assert out.read_bytes() == (fixtures / "golden_indicators.json").read_bytes()


def test_extract_reports_mentions(tmp_path, fixtures, capsys):
    store = tmp_path / "s"
    run(capsys, "ingest", "jsonl", str(fixtures / "docs.jsonl"),
        "--store", str(store))
    code, out, _ = run(capsys, "extract", "--store", str(store),
                       "--kb", str(fixtures / "kb.jsonl"),
                       "--from", "2015-03-01", "--to", "2015-03-05")
    assert code == 0
    assert json.loads(out)["mentions"] > 0


def test_sentiment_embedding_dim_mismatch_is_data_error(tmp_path, fixtures, capsys):
    bad_emb = tmp_path / "emb.txt"
    bad_emb.write_text("1 3\nbom 0.1 0.2 0.3\n", encoding="utf-8")
    code, _, err = run(capsys, "sentiment",
                       "--store", str(tmp_path / "s"),
                       "--from", "2015-03-01", "--to", "2015-03-05",
                       "--model", str(fixtures / "sentiment_model.json"),
                       "--embeddings", str(bad_emb))
    assert code == 2
    assert "dimension" in err


# --- train ---------------------------------------------------------------


def test_train_without_annotations_is_data_error(tmp_path, fixtures, capsys):
    store = tmp_path / "s"
    run(capsys, "ingest", "jsonl", str(fixtures / "docs.jsonl"),
        "--store", str(store))
    code, _, err = run(capsys, "train", "sentiment", "--store", str(store),
                       "--out", str(tmp_path / "m.json"))
    assert code == 2


def test_train_reproduces_fixture_models(tmp_path, fixtures, capsys):
    store = tmp_path / "s"
    store.mkdir()
    shutil.copy(fixtures / "docs.jsonl", store / "documents.jsonl")
    shutil.copy(fixtures / "annotations.jsonl", store / "annotations.jsonl")
    assert run(capsys, "extract", "--store", str(store),
               "--kb", str(fixtures / "kb.jsonl"),
               "--from", "2015-03-01", "--to", "2015-03-05")[0] == 0

    out = tmp_path / "sentiment.json"
    code, stdout, _ = run(capsys, "train", "sentiment", "--store", str(store),
                          "--out", str(out),
                          "--clusters", str(fixtures / "clusters.tsv"),
                          "--embeddings", str(fixtures / "embeddings.txt"),
                          "--lexicon", str(fixtures / "lexicon.tsv"),
                          "--min-df", "1")
    assert code == 0
    assert out.read_bytes() == (fixtures / "sentiment_model.json").read_bytes()
    metrics = json.loads(stdout)["metrics"]
    assert set(metrics) >= {"examples", "accuracy", "macro_f1"}

    out = tmp_path / "disambig.json"
    code, _, _ = run(capsys, "train", "disambig", "--store", str(store),
                     "--kb", str(fixtures / "kb.jsonl"), "--out", str(out))
    assert code == 0
    assert out.read_bytes() == (fixtures / "disambig_model.json").read_bytes()


def test_train_disambig_requires_kb(tmp_path, capsys):
    code, _, _ = run(capsys, "train", "disambig",
                     "--store", str(tmp_path / "s"),
                     "--out", str(tmp_path / "m.json"))
    assert code == 1
