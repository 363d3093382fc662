"""
Transition System Core

Transitions, parser configurations and the abstract contract every
transition system implements, plus replay of computations and the
empirical left-to-right check (exactly n read transitions, first one a
read, and partial parses confined to w1 .. w(i+k) after i reads).

Configurations are immutable; applying a transition returns a new one.
"""

import logging
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

from error_handler import IllegalTransition
from tree_validator import ROOT


logger = logging.getLogger(__name__)

NO_HEAD = -1
LABEL_SEPARATOR = "-"


class TransitionKind(Enum):
    """Atomic parser actions; values are the label mnemonics."""
    SH = "SH"
    LA = "LA"
    RA = "RA"
    RE = "RE"
    NA = "NA"

    @classmethod
    def parse(cls, mnemonic: str) -> Optional["TransitionKind"]:
        """Mnemonic to transition, None when unknown."""
        try:
            return cls(mnemonic)
        except ValueError:
            return None


def join_transitions(transitions: Iterable[TransitionKind]) -> str:
    return LABEL_SEPARATOR.join(t.value for t in transitions)


@dataclass(frozen=True)
class Configuration:
    """
    Parser state shared by all systems.

    Stack systems use stack/buffer, Covington uses lambda1/lambda2/buffer.
    heads[d] is the head assigned to node d (NO_HEAD if none, index 0 is
    the artificial root); arcs keeps (head, dependent) in creation order.
    """
    buffer: Tuple[int, ...] = ()
    stack: Tuple[int, ...] = ()
    lambda1: Tuple[int, ...] = ()
    lambda2: Tuple[int, ...] = ()
    heads: Tuple[int, ...] = ()
    arcs: Tuple[Tuple[int, int], ...] = ()

    @property
    def arc_set(self) -> FrozenSet[Tuple[int, int]]:
        return frozenset(self.arcs)

    def has_head(self, node: int) -> bool:
        return self.heads[node] != NO_HEAD

    def with_arc(self, head: int, dependent: int, **changes) -> "Configuration":
        """Copy with one more arc and the given structural changes."""
        heads = self.heads[:dependent] + (head,) + self.heads[dependent + 1:]
        return Configuration(**{
            "buffer": self.buffer,
            "stack": self.stack,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            **changes,
            "heads": heads,
            "arcs": self.arcs + ((head, dependent),),
        })

    def moved(self, **changes) -> "Configuration":
        """Copy with structural changes and the same arcs."""
        return Configuration(**{
            "buffer": self.buffer,
            "stack": self.stack,
            "lambda1": self.lambda1,
            "lambda2": self.lambda2,
            "heads": self.heads,
            "arcs": self.arcs,
            **changes,
        })

    def is_ancestor(self, ancestor: int, node: int) -> bool:
        """True if a head path leads from node up to ancestor."""
        while node != NO_HEAD:
            if node == ancestor:
                return True
            if node == ROOT:
                return False
            node = self.heads[node]
        return False


@dataclass(frozen=True)
class Computation:
    """A computation: the initial configuration, its transitions and the final one."""
    initial: Configuration
    transitions: Tuple[TransitionKind, ...]
    final: Configuration


class TransitionSystem(ABC):
    """
    Contract of a transition system.

    Subclasses declare their inventory, read transitions and constant k,
    and implement preconditions (violation), effects (_transit) and
    termination.
    """
    name: str = ""
    inventory: Tuple[TransitionKind, ...] = ()
    read_transitions: FrozenSet[TransitionKind] = frozenset()
    default_read: TransitionKind = TransitionKind.SH
    k: int = 0
    # Covington ends with a shift that only empties the buffer; labels omit it
    omits_terminal_read: bool = False

    @abstractmethod
    def initial(self, n: int) -> Configuration:
        """Initial configuration for a sentence of n tokens."""

    @abstractmethod
    def violation(self, config: Configuration, t: TransitionKind) -> Optional[str]:
        """Name of the violated precondition, or None if t applies."""

    @abstractmethod
    def _transit(self, config: Configuration, t: TransitionKind) -> Configuration:
        """Effect of t; called only when its precondition holds."""

    @abstractmethod
    def is_terminal(self, config: Configuration) -> bool:
        """Whether config ends a computation."""

    def next_transition(self, config: Configuration, gold) -> TransitionKind:
        """Static-oracle choice for config given the gold tree."""
        raise NotImplementedError(f"{self.name} has no static oracle")

    def preconditions(self, config: Configuration, t: TransitionKind) -> bool:
        return self.violation(config, t) is None

    def apply(self, config: Configuration, t: TransitionKind) -> Configuration:
        condition = self.violation(config, t)
        if condition is not None:
            raise IllegalTransition(f"{self.name} {t.value}", condition)
        return self._transit(config, t)

    def is_read(self, t: TransitionKind) -> bool:
        return t in self.read_transitions

    def label_facing(self, transitions: Sequence[TransitionKind], n: int) -> Tuple[TransitionKind, ...]:
        """Transitions that labels carry: drops a terminating read when omitted."""
        transitions = tuple(transitions)
        if self.omits_terminal_read and transitions and self.is_read(transitions[-1]):
            reads = sum(1 for t in transitions if self.is_read(t))
            if reads == n + 1:
                return transitions[:-1]
        return transitions

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def apply(system: TransitionSystem, config: Configuration, t: TransitionKind) -> Configuration:
    """Successor of config under t; raises IllegalTransition on a violated precondition."""
    return system.apply(config, t)


def is_terminal(system: TransitionSystem, config: Configuration, n: int) -> bool:
    """Whether config is terminal for a sentence of length n."""
    if len(config.heads) != n + 1:
        return False
    return system.is_terminal(config)


def replay(system: TransitionSystem, n: int, transitions: Iterable[TransitionKind]) -> Computation:
    """Replay transitions from the initial configuration; illegal steps raise."""
    initial = system.initial(n)
    config = initial
    applied = []
    for t in transitions:
        config = system.apply(config, t)
        applied.append(t)
    return Computation(initial=initial, transitions=tuple(applied), final=config)


@dataclass
class VerificationReport:
    """Outcome of checking one computation against the left-to-right conditions."""
    system: str
    sentence_length: int
    read_count: int
    first_is_read: bool
    minimal_k: int
    supplied_k: int
    offending_prefix: Optional[int] = None
    issues: List[str] = field(default_factory=list)

    @property
    def condition1(self) -> bool:
        return self.read_count == self.sentence_length and self.first_is_read

    @property
    def condition2(self) -> bool:
        return self.minimal_k <= self.supplied_k

    @property
    def passed(self) -> bool:
        return self.condition1 and self.condition2


def verify_left_to_right(
    system: TransitionSystem,
    sentence_length: int,
    transitions: Sequence[TransitionKind],
    k: int
) -> VerificationReport:
    """
    Check a transition sequence against the left-to-right conditions.

    Args:
        system: Transition system the sequence belongs to
        sentence_length: n
        transitions: Complete (or label-facing) transition sequence
        k: Offset to test condition 2 against

    Returns:
        VerificationReport with the read count, first-read flag and the
        smallest k for which every partial parse after i reads only
        touches nodes 0 .. i + k
    """
    n = sentence_length
    sequence = system.label_facing(transitions, n)
    config = system.initial(n)

    reads = 0
    needed_k = 0
    max_node = ROOT
    arcs_seen = 0
    offending_prefix = None
    issues = []

    for step, t in enumerate(sequence, start=1):
        config = system.apply(config, t)
        if system.is_read(t):
            reads += 1
        for head, dependent in config.arcs[arcs_seen:]:
            max_node = max(max_node, head, dependent)
        arcs_seen = len(config.arcs)
        if reads >= 1 and max_node - reads > needed_k:
            needed_k = max_node - reads
            if needed_k > k and offending_prefix is None:
                offending_prefix = step

    first_is_read = bool(sequence) and system.is_read(sequence[0])
    if reads != n:
        issues.append(f"{reads} read transitions for {n} tokens")
    if not first_is_read:
        issues.append("first transition is not a read transition")
    if needed_k > k:
        issues.append(f"partial parse needs k={needed_k}, supplied k={k}")

    return VerificationReport(
        system=system.name,
        sentence_length=n,
        read_count=reads,
        first_is_read=first_is_read,
        minimal_k=needed_k,
        supplied_k=k,
        offending_prefix=offending_prefix,
        issues=issues,
    )
