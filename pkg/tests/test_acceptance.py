"""End-to-end acceptance checks. Each test prints one pass/fail line so the
suite doubles as a release gate report:

    python3 -m pytest tests/test_acceptance.py -v -s
"""

import json
import math
import random
import shutil
import time
from contextlib import contextmanager
from datetime import date

import numpy as np
import pytest

from opiniontrack.cli import main as cli_main
from opiniontrack.indicators import (DailyCounts, EntityCounts, buzz_share,
                                     log_sentiment, negatives_share)
from opiniontrack.kalman import PRESETS, gain_sequence, kalman_smooth
from opiniontrack.linear import binary_loss_grad, multinomial_loss_grad
from opiniontrack.trie import build_trie, find_mentions

from test_disambig import synthetic_noisy_set
from test_mentions import brute_force_mentions, random_corpus
from test_sentiment import synthetic_corpus


@contextmanager
def report(name):
    try:
        yield
    except BaseException:
        print(f"[acceptance] {name}: FAIL")
        raise
    print(f"[acceptance] {name}: PASS")


def test_trie_oracle_equivalence():
    with report("trie oracle equivalence (1000 docs, <1s)"):
        rng = random.Random(7)
        kb, docs = random_corpus(rng, n_entities=50, n_docs=1000)
        trie = build_trie(kb)
        elapsed = 0.0
        for doc in docs:
            t0 = time.perf_counter()
            mentions = find_mentions(trie, doc)
            elapsed += time.perf_counter() - t0
            got = [(m.entity_id, m.tok_start, m.tok_end, m.byte_start, m.byte_end)
                   for m in mentions]
            assert got == brute_force_mentions(kb, doc)
        assert elapsed < 1.0


def test_kalman_steady_state():
    with report("kalman steady state and fixed point"):
        gains = gain_sequence(1.0, 200)
        target = (math.sqrt(5) - 1) / 2
        assert abs(target - 0.6180339887) < 1e-9
        assert abs(gains[-1] - target) < 1e-6

        start = date(2015, 3, 1)
        series = [(start.replace(day=d), 2.5) for d in range(1, 29)]
        for preset in PRESETS.values():
            for _, v in kalman_smooth(series, preset):
                assert abs(v - 2.5) < 1e-9


def test_gradient_checks():
    with report("gradient checks vs finite differences"):
        h = 1e-5
        rng = np.random.default_rng(11)
        for _ in range(10):
            X = rng.normal(size=(12, 15))
            y = (rng.random(12) < 0.5).astype(float)
            w = rng.normal(size=15) * 0.5
            b = float(rng.normal())
            lam = float(rng.random() * 0.1)
            _, grad_w, grad_b = binary_loss_grad(X, y, w, b, lam)
            for j in range(15):
                wp, wm = w.copy(), w.copy()
                wp[j] += h
                wm[j] -= h
                num = (binary_loss_grad(X, y, wp, b, lam)[0]
                       - binary_loss_grad(X, y, wm, b, lam)[0]) / (2 * h)
                assert abs(grad_w[j] - num) / max(abs(num), 1e-8) < 1e-4
            num_b = (binary_loss_grad(X, y, w, b + h, lam)[0]
                     - binary_loss_grad(X, y, w, b - h, lam)[0]) / (2 * h)
            assert abs(grad_b - num_b) / max(abs(num_b), 1e-8) < 1e-4

        for _ in range(10):
            X = rng.normal(size=(9, 12))
            y = rng.integers(0, 3, size=9)
            W = rng.normal(size=(3, 12)) * 0.5
            b = rng.normal(size=3)
            lam = float(rng.random() * 0.1)
            _, grad_W, grad_b = multinomial_loss_grad(X, y, W, b, lam)
            for c in range(3):
                for j in range(12):
                    Wp, Wm = W.copy(), W.copy()
                    Wp[c, j] += h
                    Wm[c, j] -= h
                    num = (multinomial_loss_grad(X, y, Wp, b, lam)[0]
                           - multinomial_loss_grad(X, y, Wm, b, lam)[0]) / (2 * h)
                    assert abs(grad_W[c, j] - num) / max(abs(num), 1e-8) < 1e-4


def test_indicator_identities():
    with report("indicator identities"):
        rng = random.Random(5)
        ids = [f"e{i}" for i in range(5)]
        for _ in range(300):
            row = DailyCounts(day=date(2015, 3, 1), medium="twitter")
            for eid in ids:
                row.entities[eid] = EntityCounts(
                    mentions=rng.randrange(0, 15),
                    positives=rng.randrange(0, 8),
                    negatives=rng.randrange(0, 8))
            shares = buzz_share(row, ids)
            if any(v is not None for v in shares.values()):
                assert abs(sum(shares.values()) - 1.0) <= 1e-9
            neg = negatives_share(row, ids)
            if any(v is not None for v in neg.values()):
                assert abs(sum(neg.values()) - 1.0) <= 1e-9

        for _ in range(300):
            p, n = rng.randrange(0, 40), rng.randrange(0, 40)
            a = DailyCounts(day=date(2015, 3, 1), medium="twitter")
            a.entities["e"] = EntityCounts(mentions=p + n, positives=p, negatives=n)
            b = DailyCounts(day=date(2015, 3, 1), medium="twitter")
            b.entities["e"] = EntityCounts(mentions=p + n, positives=n, negatives=p)
            assert log_sentiment(a, ["e"])["e"] == -log_sentiment(b, ["e"])["e"]
        z = DailyCounts(day=date(2015, 3, 1), medium="twitter")
        z.entities["e"] = EntityCounts(mentions=0)
        assert log_sentiment(z, ["e"])["e"] == 0.0


def test_learning_sanity():
    with report("learning sanity on synthetic corpora"):
        from opiniontrack.disambig import classify_related, train_disambig
        from opiniontrack.sentiment import (SentimentResources, predict_sentiment,
                                            train_sentiment)
        from opiniontrack.textfeat import build_vocabulary

        rng = np.random.default_rng(33)
        corpus = synthetic_corpus(rng, n=300)
        train, held = corpus[:240], corpus[240:]
        res = SentimentResources.empty()
        model = train_sentiment(train, res, lam=1e-4, min_df=1)
        correct = sum(predict_sentiment(model, toks, res)[0] == label
                      for toks, label in held)
        assert correct / len(held) >= 0.95

        rng = np.random.default_rng(17)
        X, y = synthetic_noisy_set(rng, n=400, flip=0.05)
        split = 300
        vocab = build_vocabulary([[f"t{i}" for i in range(8)]], min_df=1)
        dmodel = train_disambig([(X[i], bool(y[i])) for i in range(split)],
                                vocab, lam=1e-4)
        correct = sum(classify_related(dmodel, X[i])[0] == bool(y[i])
                      for i in range(split, len(y)))
        assert correct / (len(y) - split) >= 0.9


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


def test_end_to_end_golden_file(tmp_path, fixtures):
    with report("end-to-end golden file and rerun determinism"):
        golden = (fixtures / "golden_indicators.json").read_bytes()
        out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
        assert cli_main(pipeline_args(fixtures, tmp_path / "s", out1)) == 0
        assert out1.read_bytes() == golden
        assert cli_main(pipeline_args(fixtures, tmp_path / "s", out2)) == 0
        assert out2.read_bytes() == golden


def test_api_contract(tmp_path, fixtures):
    with report("api idempotency and retrain determinism"):
        from fastapi.testclient import TestClient

        from opiniontrack.api import ApiConfig, create_app

        store_dir = tmp_path / "store"
        store_dir.mkdir()
        shutil.copy(fixtures / "annotations.jsonl", store_dir / "annotations.jsonl")
        shutil.copy(fixtures / "sentiment_model.json", tmp_path / "sentiment_model.json")
        shutil.copy(fixtures / "disambig_model.json", tmp_path / "disambig_model.json")
        config = ApiConfig(
            store_path=str(store_dir),
            kb_path=str(fixtures / "kb.jsonl"),
            sentiment_model_path=str(tmp_path / "sentiment_model.json"),
            disambig_model_path=str(tmp_path / "disambig_model.json"),
            clusters_path=str(fixtures / "clusters.tsv"),
            embeddings_path=str(fixtures / "embeddings.txt"),
            lexicon_path=str(fixtures / "lexicon.tsv"),
        )
        client = TestClient(create_app(config))
        docs = [json.loads(line)
                for line in (fixtures / "docs.jsonl").read_text().splitlines()
                if line.strip()]
        assert client.post("/api/v1/documents", json=docs).status_code == 201

        queries = [
            ("/api/v1/indicators/buzz", {"medium": m, "mode": mode})
            for m in ("twitter", "news", "blogs") for mode in ("share", "count")
        ] + [
            ("/api/v1/indicators/sentiment", {"metric": met})
            for met in ("log_ratio", "negatives_share")
        ]
        before = [client.get(p, params=q).json() for p, q in queries]
        r = client.post("/api/v1/documents", json=docs)
        assert r.status_code == 201 and r.json()["data"]["stored"] == 0
        after = [client.get(p, params=q).json() for p, q in queries]
        assert before == after

        for task in ("sentiment", "disambig"):
            path = tmp_path / f"{task}_model.json"
            assert client.post(f"/api/v1/models/{task}/retrain").status_code == 200
            first = path.read_bytes()
            assert client.post(f"/api/v1/models/{task}/retrain").status_code == 200
            assert path.read_bytes() == first
