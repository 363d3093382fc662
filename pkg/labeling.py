"""
Sequence-Labeling Encodings of Transition Systems

encode: gold tree -> oracle computation -> one label per token, each label
being the read transition that brings the token in followed by the
non-read transitions up to the next read, plus the token's deprel.

decode: replays predicted labels left to right, discarding illegal or
unknown actions, forcing a read when a label never executes one, and then
repairing rootedness so the output is always a single-rooted tree.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, TextIO, Tuple

from error_handler import InvariantViolation, LabelFileError
from systems import SystemId, get_system, oracle
from transition_core import (
    LABEL_SEPARATOR,
    NO_HEAD,
    TransitionKind,
    join_transitions,
)
from tree_validator import ROOT
from treebank_io import DepTree, is_projective


logger = logging.getLogger(__name__)

ROOT_DEPREL = "root"
SYSTEM_HEADER = "# system = "


@dataclass(frozen=True)
class TokenLabel:
    """
    Label of one token: transition mnemonics and the token's deprel.

    Mnemonics are kept as strings so corrupted predictions survive until
    decoding, where unknown ones are skipped.
    """
    transition_part: Tuple[str, ...]
    deprel_part: str

    @classmethod
    def parse(cls, transition_label: str, deprel: str) -> "TokenLabel":
        return cls(tuple(transition_label.split(LABEL_SEPARATOR)), deprel)

    @property
    def transition_label(self) -> str:
        return LABEL_SEPARATOR.join(self.transition_part)

    def kinds(self) -> List[Optional[TransitionKind]]:
        return [TransitionKind.parse(m) for m in self.transition_part]

    def is_well_formed(self, system_id: SystemId) -> bool:
        """Non-empty, known mnemonics, first one a read of the system."""
        kinds = self.kinds()
        system = get_system(system_id)
        return (
            bool(kinds)
            and all(k is not None and k in system.inventory for k in kinds)
            and system.is_read(kinds[0])
        )


@dataclass(frozen=True)
class LabelSequence:
    """One TokenLabel per token of a sentence, for a given system."""
    system: SystemId
    labels: Tuple[TokenLabel, ...]

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def transition_labels(self) -> List[str]:
        return [label.transition_label for label in self.labels]

    @property
    def deprels(self) -> List[str]:
        return [label.deprel_part for label in self.labels]


@dataclass
class DecodeStats:
    """Repairs applied while decoding; counters add up across sentences."""
    unknown_skipped: int = 0
    illegal_skipped: int = 0
    forced_reads: int = 0
    root_from_deprel: int = 0
    root_first_token: int = 0
    extra_roots_attached: int = 0
    headless_attached: int = 0

    @property
    def repaired_actions(self) -> int:
        return self.unknown_skipped + self.illegal_skipped + self.forced_reads

    @property
    def postprocessed(self) -> int:
        return (self.root_from_deprel + self.root_first_token
                + self.extra_roots_attached + self.headless_attached)

    def merge(self, other: "DecodeStats") -> "DecodeStats":
        return DecodeStats(**{
            f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)
        })

    def to_dict(self) -> Dict[str, int]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def split_at_reads(system_id: SystemId, transitions: Sequence[TransitionKind]) -> List[List[TransitionKind]]:
    """Group a transition sequence into read-led subsequences."""
    system = get_system(system_id)
    groups: List[List[TransitionKind]] = []
    for t in transitions:
        if system.is_read(t) or not groups:
            groups.append([t])
        else:
            groups[-1].append(t)
    return groups


def encode(system_id: SystemId, tree: DepTree) -> LabelSequence:
    """
    Encode a gold tree as one label per token.

    Raises:
        NonProjectiveInput: projective system on a non-projective tree
        InvariantViolation: the oracle computation does not read one
            token per label
    """
    system = get_system(system_id)
    trace = oracle(system_id, tree)
    transitions = system.label_facing(trace.transitions, tree.n)
    groups = split_at_reads(system_id, transitions)
    if len(groups) != tree.n:
        raise InvariantViolation(
            f"{system.name}: {len(groups)} labels for {tree.n} tokens"
        )

    return LabelSequence(
        system=system_id,
        labels=tuple(
            TokenLabel.parse(join_transitions(group), token.deprel)
            for group, token in zip(groups, tree.tokens)
        ),
    )


def decode_with_stats(
    system_id: SystemId,
    labels: LabelSequence,
    forms: Sequence[str]
) -> Tuple[DepTree, DecodeStats]:
    """
    Decode predicted labels into a valid single-rooted tree.

    Args:
        system_id: Transition system the labels belong to
        labels: One label per token (any mnemonic strings)
        forms: Token forms, same length as labels

    Returns:
        Tuple of (tree, repair counters)
    """
    n = len(labels)
    if n == 0 or n != len(forms):
        raise ValueError(f"need one label per token, got {n} labels for {len(forms)} tokens")

    system = get_system(system_id)
    stats = DecodeStats()
    config = system.initial(n)

    for label in labels.labels:
        read_done = False
        for kind in label.kinds():
            if kind is None:
                stats.unknown_skipped += 1
                continue
            if system.is_read(kind):
                # One read per label; extra reads would shift token alignment
                if read_done or not system.preconditions(config, kind):
                    stats.illegal_skipped += 1
                    continue
                config = system.apply(config, kind)
                read_done = True
                continue
            if not read_done or not system.preconditions(config, kind):
                stats.illegal_skipped += 1
                continue
            config = system.apply(config, kind)
        if not read_done:
            config = system.apply(config, system.default_read)
            stats.forced_reads += 1

    if system.omits_terminal_read:
        config = system.apply(config, system.default_read)

    deprels = labels.deprels
    heads = _repair_roots(list(config.heads[1:]), deprels, stats)
    tree = DepTree.from_heads(forms, heads, deprels)
    return tree, stats


def _repair_roots(heads: List[int], deprels: Sequence[str], stats: DecodeStats) -> List[int]:
    """Root postprocessing: single root, no headless tokens."""
    if ROOT not in heads:
        for idx, (head, deprel) in enumerate(zip(heads, deprels)):
            if head == NO_HEAD and deprel == ROOT_DEPREL:
                heads[idx] = ROOT
                stats.root_from_deprel += 1

    roots = [idx for idx, head in enumerate(heads) if head == ROOT]
    if not roots:
        heads[0] = ROOT
        roots = [0]
        stats.root_first_token += 1

    syntactic_root = roots[0] + 1
    for idx in roots[1:]:
        heads[idx] = syntactic_root
        stats.extra_roots_attached += 1

    for idx, head in enumerate(heads):
        if head == NO_HEAD:
            heads[idx] = syntactic_root
            stats.headless_attached += 1

    return heads


def decode(system_id: SystemId, labels: LabelSequence, forms: Sequence[str]) -> DepTree:
    """Decode predicted labels into a valid single-rooted tree."""
    tree, _ = decode_with_stats(system_id, labels, forms)
    return tree


@dataclass
class VocabReport:
    """Label-vocabulary statistics for one system over a corpus."""
    system: SystemId
    transition_counts: Counter = field(default_factory=Counter)
    deprel_counts: Counter = field(default_factory=Counter)
    sentences: int = 0
    skipped: int = 0
    transitions_total: int = 0

    @property
    def transition_vocab_size(self) -> int:
        return len(self.transition_counts)

    @property
    def deprel_vocab_size(self) -> int:
        return len(self.deprel_counts)

    @property
    def sizes(self) -> Tuple[int, int]:
        return self.transition_vocab_size, self.deprel_vocab_size

    @property
    def longest_label(self) -> str:
        if not self.transition_counts:
            return ""
        return max(sorted(self.transition_counts), key=lambda label: len(label.split(LABEL_SEPARATOR)))

    @property
    def transitions_per_sentence(self) -> float:
        return self.transitions_total / self.sentences if self.sentences else 0.0

    def add(self, labels: LabelSequence):
        self.sentences += 1
        for label in labels.labels:
            self.transition_counts[label.transition_label] += 1
            self.deprel_counts[label.deprel_part] += 1
            self.transitions_total += len(label.transition_part)

    def merge(self, other: "VocabReport") -> "VocabReport":
        if other.system is not self.system:
            raise ValueError("cannot merge reports of different systems")
        return VocabReport(
            system=self.system,
            transition_counts=self.transition_counts + other.transition_counts,
            deprel_counts=self.deprel_counts + other.deprel_counts,
            sentences=self.sentences + other.sentences,
            skipped=self.skipped + other.skipped,
            transitions_total=self.transitions_total + other.transitions_total,
        )


def label_vocabulary(system_id: SystemId, trees: Iterable[DepTree]) -> VocabReport:
    """
    Count distinct transition labels and deprels over a corpus.

    Non-projective trees are skipped (and counted) for projective systems.
    """
    report = VocabReport(system=system_id)
    for tree in trees:
        if system_id.projective_only and not is_projective(tree):
            report.skipped += 1
            continue
        report.add(encode(system_id, tree))
    return report


# =============================================================================
# LABEL FILES
# =============================================================================

def write_labels(
    system_id: SystemId,
    sentences: Iterable[Tuple[Sequence[str], LabelSequence]],
    stream: TextIO
) -> None:
    """
    Write a label file: system header, then FORM, TRANSITION_LABEL, DEPREL
    per line with a blank line after each sentence.
    """
    stream.write(f"{SYSTEM_HEADER}{system_id.value}\n")
    for forms, labels in sentences:
        for form, label in zip(forms, labels.labels):
            stream.write(f"{form}\t{label.transition_label}\t{label.deprel_part}\n")
        stream.write("\n")


def read_labels(
    stream: Iterable[str],
    expected_system: Optional[SystemId] = None
) -> Tuple[SystemId, List[Tuple[List[str], LabelSequence]]]:
    """
    Read a label file.

    Args:
        stream: Text stream
        expected_system: If given, the header must name this system

    Returns:
        Tuple of (system, [(forms, labels), ...])
    """
    system_id: Optional[SystemId] = None
    sentences: List[Tuple[List[str], LabelSequence]] = []
    forms: List[str] = []
    labels: List[TokenLabel] = []

    def flush():
        if forms:
            sentences.append((list(forms), LabelSequence(system_id, tuple(labels))))
        forms.clear()
        labels.clear()

    for line_number, raw in enumerate(stream, start=1):
        line = raw.rstrip("\n").rstrip("\r")

        if system_id is None:
            if not line.startswith(SYSTEM_HEADER):
                raise LabelFileError(f"missing '{SYSTEM_HEADER.strip()} <name>' header", line_number)
            try:
                system_id = SystemId.parse(line[len(SYSTEM_HEADER):])
            except ValueError as e:
                raise LabelFileError(str(e), line_number)
            if expected_system is not None and system_id is not expected_system:
                raise LabelFileError(
                    f"label file is for {system_id.value}, expected {expected_system.value}",
                    line_number
                )
            continue

        if not line.strip():
            flush()
            continue

        cols = line.split("\t")
        if len(cols) != 3 or not cols[1]:
            raise LabelFileError(
                f"expected FORM, TRANSITION_LABEL and DEPREL separated by tabs, found {len(cols)} fields",
                line_number
            )
        forms.append(cols[0])
        labels.append(TokenLabel.parse(cols[1], cols[2]))

    if system_id is None:
        raise LabelFileError("empty label file")
    flush()
    return system_id, sentences
