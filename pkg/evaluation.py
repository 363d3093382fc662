"""
Attachment Score Evaluation

UAS/LAS over aligned gold and predicted treebanks, transition-label and
deprel accuracy over aligned label files, and the attach-to-previous
baseline used as the learnability floor.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from error_handler import AlignmentError
from labeling import ROOT_DEPREL, LabelSequence
from tree_validator import ROOT
from treebank_io import PLACEHOLDER, DepTree


logger = logging.getLogger(__name__)

PUNCT_UPOS = "PUNCT"


def _percent(correct: int, total: int) -> float:
    return 100.0 * correct / total if total else 0.0


@dataclass
class ScoreReport:
    """
    Attachment and label-accuracy counts.

    Percentages are derived from the counts; an empty report scores 0.
    """
    sentences: int = 0
    tokens: int = 0
    head_correct: int = 0
    labeled_correct: int = 0
    # (tokens, head_correct, labeled_correct) per sentence
    per_sentence: List[Tuple[int, int, int]] = field(default_factory=list)
    label_tokens: int = 0
    transition_correct: int = 0
    deprel_correct: int = 0

    @property
    def uas(self) -> float:
        return _percent(self.head_correct, self.tokens)

    @property
    def las(self) -> float:
        return _percent(self.labeled_correct, self.tokens)

    @property
    def transition_accuracy(self) -> float:
        return _percent(self.transition_correct, self.label_tokens)

    @property
    def deprel_accuracy(self) -> float:
        return _percent(self.deprel_correct, self.label_tokens)

    @property
    def exact_match(self) -> int:
        """Sentences with every head and deprel right."""
        return sum(1 for total, _, labeled in self.per_sentence if labeled == total)

    def merge(self, other: "ScoreReport") -> "ScoreReport":
        return ScoreReport(
            sentences=self.sentences + other.sentences,
            tokens=self.tokens + other.tokens,
            head_correct=self.head_correct + other.head_correct,
            labeled_correct=self.labeled_correct + other.labeled_correct,
            per_sentence=self.per_sentence + other.per_sentence,
            label_tokens=self.label_tokens + other.label_tokens,
            transition_correct=self.transition_correct + other.transition_correct,
            deprel_correct=self.deprel_correct + other.deprel_correct,
        )

    def to_text(self, title: Optional[str] = None) -> str:
        """Aligned human-readable report."""
        rows = []
        if self.sentences:
            rows.extend([
                ("Sentences", f"{self.sentences:,}"),
                ("Tokens", f"{self.tokens:,}"),
                ("UAS", f"{self.uas:6.2f}  ({self.head_correct:,}/{self.tokens:,})"),
                ("LAS", f"{self.las:6.2f}  ({self.labeled_correct:,}/{self.tokens:,})"),
                ("Exact match", f"{self.exact_match:,}/{self.sentences:,}"),
            ])
        if self.label_tokens:
            rows.extend([
                ("Label tokens", f"{self.label_tokens:,}"),
                ("Transition acc", f"{self.transition_accuracy:6.2f}  ({self.transition_correct:,}/{self.label_tokens:,})"),
                ("Deprel acc", f"{self.deprel_accuracy:6.2f}  ({self.deprel_correct:,}/{self.label_tokens:,})"),
            ])
        width = max((len(name) for name, _ in rows), default=0)
        lines = [title] if title else []
        lines.extend(f"{name.ljust(width)} : {value}" for name, value in rows)
        return "\n".join(lines) + "\n"

    def to_record(self, prefix: str = "") -> str:
        """Single-line key=value record."""
        pairs = []
        if self.sentences:
            pairs.extend([
                ("sentences", self.sentences),
                ("tokens", self.tokens),
                ("uas", f"{self.uas:.2f}"),
                ("las", f"{self.las:.2f}"),
            ])
        if self.label_tokens:
            pairs.extend([
                ("label_tokens", self.label_tokens),
                ("transition_acc", f"{self.transition_accuracy:.2f}"),
                ("deprel_acc", f"{self.deprel_accuracy:.2f}"),
            ])
        return " ".join(f"{prefix}{key}={value}" for key, value in pairs)


def score(gold: Sequence[DepTree], pred: Sequence[DepTree], ignore_punct: bool = False) -> ScoreReport:
    """
    UAS and LAS of predicted trees against gold trees.

    Args:
        gold: Gold trees
        pred: Predicted trees, aligned sentence by sentence
        ignore_punct: Leave out tokens whose gold UPOS is PUNCT

    Raises:
        AlignmentError: sentence or token counts differ
    """
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sentences, prediction has {len(pred)}")

    report = ScoreReport()
    for idx, (g, p) in enumerate(zip(gold, pred), start=1):
        if g.n != p.n:
            raise AlignmentError(f"gold has {g.n} tokens, prediction has {p.n}", idx)
        total = head_ok = labeled_ok = 0
        for gt, pt in zip(g.tokens, p.tokens):
            if ignore_punct and gt.upos == PUNCT_UPOS:
                continue
            total += 1
            if gt.head == pt.head:
                head_ok += 1
                if gt.deprel == pt.deprel:
                    labeled_ok += 1
        report.sentences += 1
        report.tokens += total
        report.head_correct += head_ok
        report.labeled_correct += labeled_ok
        report.per_sentence.append((total, head_ok, labeled_ok))
    return report


def label_accuracy(
    gold: Sequence[Tuple[Sequence[str], LabelSequence]],
    pred: Sequence[Tuple[Sequence[str], LabelSequence]]
) -> ScoreReport:
    """
    Per-token accuracy of transition labels and deprels between label files.

    Raises:
        AlignmentError: sentence or token counts differ
    """
    if len(gold) != len(pred):
        raise AlignmentError(f"gold has {len(gold)} sentences, prediction has {len(pred)}")

    report = ScoreReport()
    for idx, ((_, g), (_, p)) in enumerate(zip(gold, pred), start=1):
        if len(g) != len(p):
            raise AlignmentError(f"gold has {len(g)} labels, prediction has {len(p)}", idx)
        for gl, pl in zip(g.labels, p.labels):
            report.label_tokens += 1
            report.transition_correct += gl.transition_label == pl.transition_label
            report.deprel_correct += gl.deprel_part == pl.deprel_part
    return report


def baseline_attach_previous(tokens_per_sentence: Sequence[int]) -> List[DepTree]:
    """Token 1 is the root, every later token depends on its predecessor."""
    trees = []
    for n in tokens_per_sentence:
        trees.append(DepTree.from_heads(
            forms=[PLACEHOLDER] * n,
            heads=([ROOT] + list(range(1, n)))[:n],
            deprels=([ROOT_DEPREL] + ["dep"] * (n - 1))[:n],
        ))
    return trees
