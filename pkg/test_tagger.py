"""
Tests for the averaged perceptron tagger and its model files.
"""

import io
import logging

import pytest

from conftest import FIGURE1_DEPRELS, FIGURE1_FORMS, make_tree
from error_handler import ModelFileError, TrainingError
from labeling import encode
from systems import SystemId
from tagger import (
    MODEL_FORMAT,
    AveragedPerceptron,
    TaggerModel,
    load_model,
    predict,
    save_model,
    token_features,
    train,
)
from treebank_io import Token


def _tokens(forms, upos=None):
    upos = upos or ["X"] * len(forms)
    return [Token(id=i, form=form, upos=tag) for i, (form, tag) in enumerate(zip(forms, upos), start=1)]


def _encoded(tree, system_id=SystemId.ARC_EAGER):
    return _tokens(tree.forms), encode(system_id, tree)


def _saved(model) -> str:
    out = io.StringIO()
    save_model(model, out)
    return out.getvalue()


@pytest.fixture
def figure1_corpus(figure1_tree):
    return [_encoded(figure1_tree)] * 50


def test_token_features_window():
    tokens = _tokens(["Hello"], ["INTJ"])
    features = token_features(tokens, 0)

    assert {"bias", "first", "last"} <= set(features)
    assert "w[-1]=<s>" in features and "w[2]=</s>" in features
    assert "w[0]=Hello" in features and "l[0]=hello" in features
    assert "p2[0]=he" in features and "s3[0]=llo" in features
    assert "u[0]=INTJ" in features


def test_token_features_without_upos():
    tokens = _tokens(["a", "b"], ["DET", "_"])
    assert not any(f.startswith("u[") for f in token_features(tokens, 0, use_upos=False))
    # placeholder tags never become features
    assert "u[1]=_" not in token_features(tokens, 0)
    assert "u[0]=DET" in token_features(tokens, 0)


def test_token_features_are_deterministic():
    tokens = _tokens(FIGURE1_FORMS)
    assert token_features(tokens, 4) == token_features(tokens, 4)


# =============================================================================
# PERCEPTRON
# =============================================================================

def test_ties_go_to_the_smallest_label():
    perceptron = AveragedPerceptron()
    perceptron.weights = {"f": {"B": 1.0, "A": 1.0}}
    perceptron.labels = {"A", "B"}
    assert perceptron.predict(["f"]) == "A"


def test_unscored_labels_count_as_zero():
    perceptron = AveragedPerceptron()
    perceptron.labels = {"A", "B", "C"}
    perceptron.weights = {"f": {"B": -1.0}}
    assert perceptron.predict(["f"]) == "A"

    perceptron.weights = {"f": {"B": 0.5}}
    assert perceptron.predict(["f"]) == "B"


def test_no_weights_means_no_prediction():
    perceptron = AveragedPerceptron()
    perceptron.labels = {"A"}
    assert perceptron.predict(["unseen"]) is None


def test_averaging():
    perceptron = AveragedPerceptron()
    perceptron.update("A", "B", ["f"])
    perceptron.update("A", "A", ["f"])
    perceptron.average()

    assert perceptron.weights == {"f": {"A": 0.5, "B": -0.5}}


def test_tie_break_wins_still_violate_the_margin():
    perceptron = AveragedPerceptron()
    perceptron.labels = {"A", "B"}
    assert perceptron.margin_violator("A", perceptron.scores(["f"])) == "B"

    perceptron.weights = {"f": {"A": 1.0, "B": 1.0}}
    assert perceptron.predict(["f"]) == "A"
    assert perceptron.margin_violator("A", perceptron.scores(["f"])) == "B"

    perceptron.weights = {"f": {"A": 1.0}}
    assert perceptron.margin_violator("A", perceptron.scores(["f"])) is None


def test_training_separates_a_shared_first_token():
    # both first tokens carry the same bias, first and <s> features
    first = make_tree([2, 0, 2], forms=["dogs", "chase", "cats"], deprels=["nsubj", "root", "obj"])
    second = make_tree([0, 1], forms=["Stop", "!"], deprels=["root", "punct"])
    corpus = [_encoded(first, SystemId.ARC_HYBRID), _encoded(second, SystemId.ARC_HYBRID)] * 20

    model = train(corpus, epochs=5, seed=3)
    perceptron = model.perceptrons["transition"]
    scores = perceptron.scores(token_features(_tokens(["Stop", "!"]), 0))

    assert scores["SH"] > scores.get("SH-LA", 0.0)


def test_fallbacks_when_nothing_scores():
    model = TaggerModel(
        system=SystemId.ARC_STANDARD, seed=1, epochs=1,
        fallbacks={"transition": "SH", "deprel": "dep"},
    )
    labels = predict(model, _tokens(["unseen", "words"]))

    assert labels.transition_labels == ["SH", "SH"]
    assert labels.deprels == ["dep", "dep"]
    assert labels.system is SystemId.ARC_STANDARD


# =============================================================================
# TRAINING
# =============================================================================

def test_memorizes_a_repeated_sentence(figure1_corpus, figure1_tree):
    model = train(figure1_corpus, epochs=3, seed=1)
    labels = predict(model, _tokens(FIGURE1_FORMS))

    assert labels == encode(SystemId.ARC_EAGER, figure1_tree)
    assert labels.deprels == FIGURE1_DEPRELS
    assert model.fallbacks["transition"] == "RA"


@pytest.mark.parametrize("seed", [1, 3, 5])
def test_recovers_two_disjoint_sentences(seed):
    first = make_tree([2, 0, 2], forms=["dogs", "chase", "cats"], deprels=["nsubj", "root", "obj"])
    second = make_tree([0, 1], forms=["Stop", "!"], deprels=["root", "punct"])
    corpus = [_encoded(first, SystemId.ARC_HYBRID), _encoded(second, SystemId.ARC_HYBRID)] * 20

    model = train(corpus, epochs=5, seed=seed)

    for tree in (first, second):
        assert predict(model, _tokens(tree.forms)) == encode(SystemId.ARC_HYBRID, tree)


def test_training_is_deterministic(figure1_corpus):
    assert _saved(train(figure1_corpus, 2, seed=7)) == _saved(train(figure1_corpus, 2, seed=7))


def test_training_logs_epoch_accuracy(figure1_corpus, caplog):
    caplog.set_level(logging.INFO)
    train(figure1_corpus[:5], epochs=2, seed=1)
    assert "Epoch 1/2" in caplog.text
    assert "Epoch 2/2" in caplog.text


def test_training_errors(figure1_tree):
    corpus = [_encoded(figure1_tree)]
    with pytest.raises(TrainingError, match="epochs"):
        train(corpus, epochs=0, seed=1)
    with pytest.raises(TrainingError, match="empty"):
        train([], epochs=1, seed=1)
    with pytest.raises(TrainingError, match="mixes"):
        train(corpus + [_encoded(figure1_tree, SystemId.COVINGTON)], epochs=1, seed=1)
    with pytest.raises(TrainingError, match="labels"):
        train([(_tokens(["a"]), corpus[0][1])], epochs=1, seed=1)


# =============================================================================
# MODEL FILES
# =============================================================================

def test_save_and_load_preserve_predictions(figure1_corpus):
    model = train(figure1_corpus, epochs=2, seed=5, use_upos=False)
    text = _saved(model)

    assert text.startswith(f"# {MODEL_FORMAT}\n# system = arc-eager\n")
    loaded = load_model(io.StringIO(text))

    assert loaded.use_upos is False
    assert (loaded.seed, loaded.epochs) == (5, 2)
    assert loaded.fallbacks == model.fallbacks
    tokens = _tokens(FIGURE1_FORMS + ["unseen"])
    assert predict(loaded, tokens) == predict(model, tokens)
    assert _saved(loaded) == text


def test_load_rejects_files_without_format_line():
    with pytest.raises(ModelFileError, match="not a model file"):
        load_model(io.StringIO("# system = arc-eager\n"))


def test_load_rejects_incomplete_header():
    with pytest.raises(ModelFileError, match="incomplete"):
        load_model(io.StringIO(f"# {MODEL_FORMAT}\n# seed = 1\n"))


def test_load_reports_bad_records():
    text = f"# {MODEL_FORMAT}\nW\ttransition\tbias\tSH\tnot-a-number\n"
    with pytest.raises(ModelFileError, match="line 2"):
        load_model(io.StringIO(text))

    with pytest.raises(ModelFileError, match="malformed header"):
        load_model(io.StringIO(f"# {MODEL_FORMAT}\n# what\n"))
