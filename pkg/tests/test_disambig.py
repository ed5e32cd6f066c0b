import numpy as np
import pytest

from opiniontrack.disambig import (DisambigModel, classify_related, doc_terms,
                                   featurize, load_model, profile_similarity,
                                   save_model, train_disambig)
from opiniontrack.linear import binary_loss_grad, fit_binary
from opiniontrack.models import Document, Entity, Mention
from opiniontrack.textfeat import build_vocabulary, cosine, tfidf_vector
from datetime import datetime, timezone


def make_entity(profile=None, canonical="Ana Silva"):
    return Entity(id="e1", canonical_name=canonical,
                  surface_forms=(canonical, canonical.split()[-1]), profile=profile)


def make_doc(text):
    return Document(id="d1", source="twitter",
                    timestamp=datetime(2015, 3, 1, tzinfo=timezone.utc), text=text)


def make_mention(surface="Silva"):
    return Mention(doc_id="d1", entity_id="e1", tok_start=0, tok_end=1,
                   byte_start=0, byte_end=len(surface), surface=surface)


@pytest.fixture
def vocab():
    corpus = [["ana", "silva", "governo"], ["debate", "silva"], ["praia", "mar"]]
    return build_vocabulary(corpus, min_df=1)


# --- profile similarity -------------------------------------------------


def test_identical_text_similarity_one(vocab):
    profile = "debate silva"
    entity = make_entity(profile=profile)
    sim = profile_similarity(doc_terms(profile), entity, vocab)
    assert sim == pytest.approx(1.0, abs=1e-12)


def test_disjoint_vocab_similarity_zero(vocab):
    entity = make_entity(profile="praia mar")
    assert profile_similarity(["debate", "governo"], entity, vocab) == 0.0


def test_missing_profile_gives_zero(vocab):
    entity = make_entity(profile=None)
    assert profile_similarity(["debate"], entity, vocab) == 0.0


def test_similarity_equals_naive_cosine(vocab):
    entity = make_entity(profile="ana silva governo debate")
    tokens = ["silva", "debate", "praia"]
    expected = cosine(tfidf_vector(tokens, vocab),
                      tfidf_vector(doc_terms(entity.profile), vocab))
    assert profile_similarity(tokens, entity, vocab) == pytest.approx(expected, abs=1e-12)


# --- featurize ----------------------------------------------------------


def test_featurize_dimensions(vocab):
    x = featurize(make_mention(), make_doc("silva falou"), make_entity(), vocab)
    assert x.shape == (len(vocab) + 2,)


def test_featurize_is_composition(vocab):
    doc = make_doc("silva no debate")
    entity = make_entity(profile="ana silva governo")
    mention = make_mention("Ana Silva")
    x = featurize(mention, doc, entity, vocab)
    tokens = doc_terms(doc.text)
    assert np.array_equal(x[:len(vocab)], tfidf_vector(tokens, vocab))
    assert x[len(vocab)] == pytest.approx(profile_similarity(tokens, entity, vocab))
    assert x[len(vocab) + 1] == 1.0  # canonical surface


def test_featurize_non_canonical_flag(vocab):
    x = featurize(make_mention("Silva"), make_doc("praia"), make_entity(), vocab)
    assert x[len(vocab) + 1] == 0.0


def test_featurize_pure(vocab):
    args = (make_mention(), make_doc("silva falou"), make_entity("ana silva"), vocab)
    assert np.array_equal(featurize(*args), featurize(*args))


# --- training and classification ---------------------------------------


def test_separable_points_fit(vocab):
    labeled = [(np.array([1.0, 0.0, 0.0]), True), (np.array([0.0, 1.0, 0.0]), False)]
    small_vocab = build_vocabulary([["a"]], min_df=1)
    model = train_disambig(labeled, small_vocab, lam=0.0)
    assert classify_related(model, labeled[0][0])[0] is True
    assert classify_related(model, labeled[1][0])[0] is False


def test_single_class_rejected(vocab):
    with pytest.raises(ValueError):
        train_disambig([(np.zeros(3), True)], build_vocabulary([["a"]], min_df=1))


def test_huge_lambda_shrinks_weights():
    rng = np.random.default_rng(0)
    small_vocab = build_vocabulary([["a"]], min_df=1)
    labeled = [(rng.normal(size=3), bool(i % 3 != 0)) for i in range(30)]
    model = train_disambig(labeled, small_vocab, lam=1e6)
    assert np.max(np.abs(model.weights)) < 1e-3
    # with weights ~0 the probability equals the class prior through the bias
    prior = sum(rel for _, rel in labeled) / len(labeled)
    _, p = classify_related(model, np.zeros(3))
    assert p == pytest.approx(prior, abs=0.02)


def test_gradient_matches_finite_differences():
    rng = np.random.default_rng(42)
    h = 1e-5
    for _ in range(10):
        n, d = 12, 20
        X = rng.normal(size=(n, d))
        y = (rng.random(n) < 0.5).astype(float)
        w = rng.normal(size=d) * 0.5
        b = float(rng.normal())
        lam = float(rng.random() * 0.1)
        _, grad_w, grad_b = binary_loss_grad(X, y, w, b, lam)

        num = np.zeros(d)
        for j in range(d):
            wp, wm = w.copy(), w.copy()
            wp[j] += h
            wm[j] -= h
            lp = binary_loss_grad(X, y, wp, b, lam)[0]
            lm = binary_loss_grad(X, y, wm, b, lam)[0]
            num[j] = (lp - lm) / (2 * h)
        scale = np.maximum(np.abs(num), 1e-8)
        assert np.max(np.abs(grad_w - num) / scale) < 1e-4
        num_b = (binary_loss_grad(X, y, w, b + h, lam)[0]
                 - binary_loss_grad(X, y, w, b - h, lam)[0]) / (2 * h)
        assert abs(grad_b - num_b) / max(abs(num_b), 1e-8) < 1e-4


def test_loss_non_increasing():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(40, 6))
    y = (X[:, 0] + 0.3 * rng.normal(size=40) > 0).astype(float)
    _, _, history = fit_binary(X, y, lam=1e-3)
    assert all(b <= a + 1e-12 for a, b in zip(history, history[1:]))


def test_zero_weights_boundary():
    small_vocab = build_vocabulary([["a"]], min_df=1)
    model = DisambigModel(vocab=small_vocab, weights=np.zeros(3), bias=0.0,
                          lam=0.0, iterations=0, seed=0)
    related, p = classify_related(model, np.ones(3))
    assert p == 0.5 and related is True


def test_large_score_saturates():
    small_vocab = build_vocabulary([["a"]], min_df=1)
    model = DisambigModel(vocab=small_vocab, weights=np.array([50.0, 0, 0]),
                          bias=0.0, lam=0.0, iterations=0, seed=0)
    _, p = classify_related(model, np.array([10.0, 0, 0]))
    assert p == pytest.approx(1.0, abs=1e-12)


def test_dimension_mismatch_rejected():
    small_vocab = build_vocabulary([["a"]], min_df=1)
    model = DisambigModel(vocab=small_vocab, weights=np.zeros(3), bias=0.0,
                          lam=0.0, iterations=0, seed=0)
    with pytest.raises(ValueError):
        classify_related(model, np.zeros(5))


def test_decision_invariant_under_positive_scaling():
    small_vocab = build_vocabulary([["a"]], min_df=1)
    rng = np.random.default_rng(8)
    w = rng.normal(size=3)
    b = float(rng.normal())
    m1 = DisambigModel(vocab=small_vocab, weights=w, bias=b, lam=0.0,
                       iterations=0, seed=0)
    m2 = DisambigModel(vocab=small_vocab, weights=7.5 * w, bias=7.5 * b,
                       lam=0.0, iterations=0, seed=0)
    for _ in range(50):
        x = rng.normal(size=3)
        assert classify_related(m1, x)[0] == classify_related(m2, x)[0]


def synthetic_noisy_set(rng, n=400, d=10, flip=0.05):
    X = rng.normal(size=(n, d))
    w_true = rng.normal(size=d)
    y = (X @ w_true > 0)
    flips = rng.random(n) < flip
    y = np.where(flips, ~y, y)
    return X, y


def test_heldout_accuracy_on_noisy_linear_set():
    rng = np.random.default_rng(17)
    X, y = synthetic_noisy_set(rng)
    split = 300
    small_vocab = build_vocabulary([[f"t{i}" for i in range(8)]], min_df=1)
    labeled = [(X[i], bool(y[i])) for i in range(split)]
    model = train_disambig(labeled, small_vocab, lam=1e-4)
    correct = sum(
        classify_related(model, X[i])[0] == bool(y[i]) for i in range(split, len(y)))
    assert correct / (len(y) - split) >= 0.9


def test_model_roundtrip(tmp_path, fixtures):
    model = load_model(fixtures / "disambig_model.json")
    save_model(model, tmp_path / "copy.json")
    assert (tmp_path / "copy.json").read_bytes() == (fixtures / "disambig_model.json").read_bytes()
