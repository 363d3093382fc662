"""
Averaged Perceptron Baseline Tagger

Two independent multi-class perceptrons over sparse string features of a
-2..+2 token window: one predicts the transition label of each token,
the other its deprel. Training shuffles with a seeded generator, so the
same corpus, epochs and seed give a byte-identical model file.

Model file (text, UTF-8):
    # translabel-model 1
    # system = <name>
    # seed = <int>
    # epochs = <int>
    # use_upos = true|false
    # fallback.transition = <label>
    # fallback.deprel = <label>
    L<TAB>task<TAB>label                          (label vocabulary)
    W<TAB>task<TAB>feature<TAB>label<TAB>weight   (averaged weights)
"""

import logging
import random
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Set, TextIO, Tuple

from error_handler import ModelFileError, TrainingError
from labeling import LabelSequence, TokenLabel
from systems import SystemId
from treebank_io import PLACEHOLDER, Token


logger = logging.getLogger(__name__)

MODEL_FORMAT = "translabel-model 1"
TASKS = ("transition", "deprel")
WINDOW = (-2, -1, 0, 1, 2)


def token_features(tokens: Sequence[Token], i: int, use_upos: bool = True) -> List[str]:
    """Sparse features of token i; identical inputs give identical lists."""
    n = len(tokens)
    features = ["bias"]
    if i == 0:
        features.append("first")
    if i == n - 1:
        features.append("last")

    for offset in WINDOW:
        j = i + offset
        if j < 0:
            features.append(f"w[{offset}]=<s>")
            continue
        if j >= n:
            features.append(f"w[{offset}]=</s>")
            continue
        form = tokens[j].form
        lower = form.lower()
        features.append(f"w[{offset}]={form}")
        features.append(f"l[{offset}]={lower}")
        for size in (1, 2, 3):
            features.append(f"p{size}[{offset}]={lower[:size]}")
            features.append(f"s{size}[{offset}]={lower[-size:]}")
        if use_upos and tokens[j].upos != PLACEHOLDER:
            features.append(f"u[{offset}]={tokens[j].upos}")

    return features


class AveragedPerceptron:
    """Multi-class perceptron with lazily averaged weights."""

    def __init__(self):
        self.weights: Dict[str, Dict[str, float]] = {}
        self.labels: Set[str] = set()
        self.instances = 0
        self._totals: Dict[Tuple[str, str], float] = defaultdict(float)
        self._timestamps: Dict[Tuple[str, str], int] = defaultdict(int)

    def scores(self, features: Iterable[str]) -> Dict[str, float]:
        scores: Dict[str, float] = defaultdict(float)
        for feature in features:
            for label, weight in self.weights.get(feature, {}).items():
                scores[label] += weight
        return scores

    def predict(self, features: Iterable[str]) -> Optional[str]:
        return self.best_label(self.scores(features))

    def best_label(self, scores: Dict[str, float]) -> Optional[str]:
        """
        Highest-scoring known label, ties to the smallest label string.

        Returns None when no feature carries any weight.
        """
        if not scores:
            return None
        best_label, best_score = min(scores.items(), key=lambda item: (-item[1], item[0]))
        if best_score <= 0:
            # Labels without any weight score 0 and may win or tie
            unscored = min((label for label in self.labels if label not in scores), default=None)
            if unscored is not None and (best_score < 0 or unscored < best_label):
                return unscored
        return best_label

    def margin_violator(self, truth: str, scores: Dict[str, float]) -> Optional[str]:
        """
        Strongest other known label scoring at least as high as truth,
        ties to the smallest label string; None when truth wins strictly.
        """
        truth_score = scores.get(truth, 0.0)
        rivals = [
            (score, label) for label, score in scores.items()
            if label != truth and score >= truth_score
        ]
        if truth_score <= 0:
            unscored = min((label for label in self.labels if label not in scores and label != truth), default=None)
            if unscored is not None:
                rivals.append((0.0, unscored))
        if not rivals:
            return None
        return min(rivals, key=lambda item: (-item[0], item[1]))[1]

    def update(self, truth: str, guess: str, features: Sequence[str]):
        self.instances += 1
        if truth == guess:
            return
        for feature in features:
            self._update_feature(truth, feature, 1.0)
            self._update_feature(guess, feature, -1.0)

    def _update_feature(self, label: str, feature: str, value: float):
        param = (feature, label)
        weights = self.weights.setdefault(feature, {})
        weight = weights.get(label, 0.0)
        self._totals[param] += (self.instances - self._timestamps[param]) * weight
        self._timestamps[param] = self.instances
        weights[label] = weight + value

    def average(self):
        """Replace weights by their average over all training instances."""
        if not self.instances:
            return
        for feature, weights in self.weights.items():
            averaged = {}
            for label, weight in weights.items():
                param = (feature, label)
                total = self._totals[param] + (self.instances - self._timestamps[param]) * weight
                value = total / self.instances
                if value:
                    averaged[label] = value
            self.weights[feature] = averaged
        self.weights = {f: w for f, w in self.weights.items() if w}
        self._totals.clear()
        self._timestamps.clear()


@dataclass
class TaggerModel:
    """Two perceptrons (transition label, deprel) and their fallbacks."""
    system: SystemId
    seed: int
    epochs: int
    use_upos: bool = True
    perceptrons: Dict[str, AveragedPerceptron] = field(
        default_factory=lambda: {task: AveragedPerceptron() for task in TASKS}
    )
    fallbacks: Dict[str, str] = field(default_factory=dict)

    def predict_token(self, task: str, features: Sequence[str]) -> str:
        guess = self.perceptrons[task].predict(features)
        return guess if guess is not None else self.fallbacks[task]


def _targets(labels: LabelSequence) -> List[Tuple[str, str]]:
    return [(label.transition_label, label.deprel_part) for label in labels.labels]


def _most_frequent(counts: Counter) -> str:
    return min(counts.items(), key=lambda item: (-item[1], item[0]))[0]


def train(
    encoded_corpus: Sequence[Tuple[Sequence[Token], LabelSequence]],
    epochs: int,
    seed: int,
    use_upos: bool = True
) -> TaggerModel:
    """
    Train both perceptrons on an encoded corpus.

    Args:
        encoded_corpus: (tokens, labels) pairs, all of one system
        epochs: Passes over the corpus, at least 1
        seed: Shuffling seed
        use_upos: Include UPOS features

    Returns:
        TaggerModel with averaged weights
    """
    if epochs < 1:
        raise TrainingError(f"epochs must be at least 1, got {epochs}")
    if not encoded_corpus:
        raise TrainingError("cannot train on an empty corpus")
    systems = {labels.system for _, labels in encoded_corpus}
    if len(systems) != 1:
        raise TrainingError(f"corpus mixes transition systems: {sorted(s.value for s in systems)}")

    model = TaggerModel(system=systems.pop(), seed=seed, epochs=epochs, use_upos=use_upos)

    counts = {task: Counter() for task in TASKS}
    for tokens, labels in encoded_corpus:
        if len(tokens) != len(labels):
            raise TrainingError(f"{len(tokens)} tokens but {len(labels)} labels")
        for targets in _targets(labels):
            for task, target in zip(TASKS, targets):
                counts[task][target] += 1
    for task in TASKS:
        model.perceptrons[task].labels = set(counts[task])
        model.fallbacks[task] = _most_frequent(counts[task])

    # Features do not change between epochs
    featurized = [
        [token_features(tokens, i, use_upos) for i in range(len(tokens))]
        for tokens, _ in encoded_corpus
    ]
    targets = [_targets(labels) for _, labels in encoded_corpus]

    rng = random.Random(seed)
    order = list(range(len(encoded_corpus)))
    for epoch in range(1, epochs + 1):
        rng.shuffle(order)
        mistakes = Counter()
        total = 0
        for idx in order:
            for features, gold in zip(featurized[idx], targets[idx]):
                total += 1
                for task, truth in zip(TASKS, gold):
                    perceptron = model.perceptrons[task]
                    scores = perceptron.scores(features)
                    guess = perceptron.best_label(scores)
                    if (model.fallbacks[task] if guess is None else guess) != truth:
                        mistakes[task] += 1
                    violator = perceptron.margin_violator(truth, scores)
                    perceptron.update(truth, violator or truth, features)
        logger.info(
            f"Epoch {epoch}/{epochs}: "
            + ", ".join(f"{task} accuracy {100.0 * (total - mistakes[task]) / total:.2f}%" for task in TASKS)
        )

    for task in TASKS:
        model.perceptrons[task].average()
    return model


def predict(model: TaggerModel, tokens: Sequence[Token]) -> LabelSequence:
    """One label per token, drawn from the training vocabulary."""
    labels = []
    for i in range(len(tokens)):
        features = token_features(tokens, i, model.use_upos)
        transition_label = model.predict_token("transition", features)
        deprel = model.predict_token("deprel", features)
        labels.append(TokenLabel.parse(transition_label, deprel))
    return LabelSequence(system=model.system, labels=tuple(labels))


# =============================================================================
# MODEL FILES
# =============================================================================

def save_model(model: TaggerModel, stream: TextIO) -> None:
    """Write the model; records are sorted so equal models give equal bytes."""
    stream.write(f"# {MODEL_FORMAT}\n")
    stream.write(f"# system = {model.system.value}\n")
    stream.write(f"# seed = {model.seed}\n")
    stream.write(f"# epochs = {model.epochs}\n")
    stream.write(f"# use_upos = {'true' if model.use_upos else 'false'}\n")
    for task in TASKS:
        stream.write(f"# fallback.{task} = {model.fallbacks[task]}\n")
    for task in TASKS:
        for label in sorted(model.perceptrons[task].labels):
            stream.write(f"L\t{task}\t{label}\n")
    for task in TASKS:
        weights = model.perceptrons[task].weights
        for feature in sorted(weights):
            for label in sorted(weights[feature]):
                stream.write(f"W\t{task}\t{feature}\t{label}\t{weights[feature][label]!r}\n")


def load_model(stream: Iterable[str]) -> TaggerModel:
    """Read a model written by save_model."""
    header: Dict[str, str] = {}
    labels = {task: set() for task in TASKS}
    weights: Dict[str, Dict[str, Dict[str, float]]] = {task: {} for task in TASKS}
    saw_format = False

    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body == MODEL_FORMAT:
                saw_format = True
                continue
            key, sep, value = body.partition(" = ")
            if not sep:
                raise ModelFileError(f"line {line_number}: malformed header {line!r}")
            header[key] = value
            continue

        cols = line.split("\t")
        try:
            if cols[0] == "L" and len(cols) == 3 and cols[1] in labels:
                labels[cols[1]].add(cols[2])
            elif cols[0] == "W" and len(cols) == 5 and cols[1] in weights:
                weights[cols[1]].setdefault(cols[2], {})[cols[3]] = float(cols[4])
            else:
                raise ValueError(f"unexpected record {line!r}")
        except ValueError as e:
            raise ModelFileError(f"line {line_number}: {e}") from e

    if not saw_format:
        raise ModelFileError(f"not a model file (missing '# {MODEL_FORMAT}')")
    try:
        model = TaggerModel(
            system=SystemId.parse(header["system"]),
            seed=int(header["seed"]),
            epochs=int(header["epochs"]),
            use_upos=header.get("use_upos", "true") == "true",
            fallbacks={task: header[f"fallback.{task}"] for task in TASKS},
        )
    except (KeyError, ValueError) as e:
        raise ModelFileError(f"incomplete model header: {e}") from e

    for task in TASKS:
        model.perceptrons[task].labels = labels[task]
        model.perceptrons[task].weights = weights[task]
    return model
