"""
Transition Systems and Static Oracles

The four implemented systems: arc-standard, arc-eager, arc-hybrid
(projective, stack based) and Covington non-projective (list based).
Each one knows its preconditions, effects, termination convention and a
canonical static oracle mapping a gold tree to a complete computation.

Termination for the stack systems is "buffer empty and stack == [0]":
the root stays at the stack bottom and no transition removes it.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Optional, Tuple

from error_handler import IllegalTransition, NonProjectiveInput
from transition_core import (
    NO_HEAD,
    Computation,
    Configuration,
    TransitionKind,
    TransitionSystem,
)
from tree_validator import ROOT
from treebank_io import DepTree, is_projective


logger = logging.getLogger(__name__)

SH = TransitionKind.SH
LA = TransitionKind.LA
RA = TransitionKind.RA
RE = TransitionKind.RE
NA = TransitionKind.NA


class SystemId(Enum):
    """Implemented transition systems; values are the label-file names."""
    ARC_STANDARD = "arc-standard"
    ARC_EAGER = "arc-eager"
    ARC_HYBRID = "arc-hybrid"
    COVINGTON = "covington"

    @classmethod
    def parse(cls, name: str) -> "SystemId":
        normalized = name.strip().lower().replace("_", "-")
        aliases = {"covington-np": "covington", "covingtonnp": "covington"}
        try:
            return cls(aliases.get(normalized, normalized))
        except ValueError:
            choices = ", ".join(s.value for s in cls)
            raise ValueError(f"Unknown transition system {name!r} (choose from {choices})")

    @property
    def projective_only(self) -> bool:
        return self is not SystemId.COVINGTON


@dataclass(frozen=True)
class GoldTree:
    """Gold heads indexed by node (index 0 unused) with dependent lists."""
    heads: Tuple[int, ...]
    dependents: Tuple[Tuple[int, ...], ...]

    @classmethod
    def from_tree(cls, tree: DepTree) -> "GoldTree":
        heads = (NO_HEAD,) + tree.heads
        dependents: List[List[int]] = [[] for _ in heads]
        for dependent in range(1, len(heads)):
            dependents[heads[dependent]].append(dependent)
        return cls(heads=heads, dependents=tuple(tuple(d) for d in dependents))

    def linked(self, a: int, b: int) -> bool:
        return self.heads[a] == b or self.heads[b] == a

    def complete(self, node: int, config: Configuration) -> bool:
        """All gold dependents of node already attached in config."""
        return all(config.has_head(d) for d in self.dependents[node])


@dataclass(frozen=True)
class OracleTrace:
    """A canonical complete computation and the arcs in creation order."""
    computation: Computation
    arcs_in_order: Tuple[Tuple[int, int], ...]

    @property
    def transitions(self) -> Tuple[TransitionKind, ...]:
        return self.computation.transitions


class StackSystem(TransitionSystem):
    """Shared stack/buffer bookkeeping for the three projective systems."""

    def initial(self, n: int) -> Configuration:
        return Configuration(
            stack=(ROOT,),
            buffer=tuple(range(1, n + 1)),
            heads=(NO_HEAD,) * (n + 1),
        )

    def is_terminal(self, config: Configuration) -> bool:
        return not config.buffer and config.stack == (ROOT,)

    def _shift(self, config: Configuration) -> Configuration:
        return config.moved(stack=config.stack + config.buffer[:1], buffer=config.buffer[1:])


class ArcStandard(StackSystem):
    name = SystemId.ARC_STANDARD.value
    inventory = (SH, LA, RA)
    read_transitions = frozenset({SH})
    k = 0

    def violation(self, config: Configuration, t: TransitionKind) -> Optional[str]:
        if t is SH:
            return None if config.buffer else "empty buffer"
        if t is LA:
            if len(config.stack) < 2:
                return "fewer than two stack items"
            if config.stack[-2] == ROOT:
                return "root cannot take a head"
            return None
        if t is RA:
            return None if len(config.stack) >= 2 else "fewer than two stack items"
        return f"{t.value} is not an {self.name} transition"

    def _transit(self, config: Configuration, t: TransitionKind) -> Configuration:
        if t is SH:
            return self._shift(config)
        s1, s0 = config.stack[-2], config.stack[-1]
        if t is LA:
            return config.with_arc(s0, s1, stack=config.stack[:-2] + (s0,))
        return config.with_arc(s1, s0, stack=config.stack[:-1])

    def next_transition(self, config: Configuration, gold: GoldTree) -> TransitionKind:
        if len(config.stack) >= 2:
            s1, s0 = config.stack[-2], config.stack[-1]
            if s1 != ROOT and gold.heads[s1] == s0:
                return LA
            if gold.heads[s0] == s1 and gold.complete(s0, config):
                return RA
        return SH


class ArcEager(StackSystem):
    name = SystemId.ARC_EAGER.value
    inventory = (SH, LA, RA, RE)
    read_transitions = frozenset({SH, RA})
    k = 1

    def violation(self, config: Configuration, t: TransitionKind) -> Optional[str]:
        if t is SH:
            return None if config.buffer else "empty buffer"
        if not config.stack:
            return "empty stack"
        s = config.stack[-1]
        if t is LA:
            if not config.buffer:
                return "empty buffer"
            if s == ROOT:
                return "root cannot take a head"
            if config.has_head(s):
                return "single head"
            return None
        if t is RA:
            if not config.buffer:
                return "empty buffer"
            if config.has_head(config.buffer[0]):
                return "single head"
            return None
        if t is RE:
            return None if config.has_head(s) else "stack top has no head"
        return f"{t.value} is not an {self.name} transition"

    def _transit(self, config: Configuration, t: TransitionKind) -> Configuration:
        if t is SH:
            return self._shift(config)
        if t is RE:
            return config.moved(stack=config.stack[:-1])
        s, b = config.stack[-1], config.buffer[0]
        if t is LA:
            return config.with_arc(b, s, stack=config.stack[:-1])
        return config.with_arc(s, b, stack=config.stack + (b,), buffer=config.buffer[1:])

    def next_transition(self, config: Configuration, gold: GoldTree) -> TransitionKind:
        s = config.stack[-1]
        if not config.buffer:
            return RE
        b = config.buffer[0]
        if s != ROOT and gold.heads[s] == b:
            return LA
        if gold.heads[b] == s:
            return RA
        if config.has_head(s) and any(gold.linked(b, k) for k in config.stack[:-1]):
            return RE
        return SH


class ArcHybrid(StackSystem):
    name = SystemId.ARC_HYBRID.value
    inventory = (SH, LA, RA)
    read_transitions = frozenset({SH})
    k = 1

    def violation(self, config: Configuration, t: TransitionKind) -> Optional[str]:
        if t is SH:
            return None if config.buffer else "empty buffer"
        if t is LA:
            if not config.buffer:
                return "empty buffer"
            if not config.stack:
                return "empty stack"
            if config.stack[-1] == ROOT:
                return "root cannot take a head"
            if config.has_head(config.stack[-1]):
                return "single head"
            return None
        if t is RA:
            return None if len(config.stack) >= 2 else "fewer than two stack items"
        return f"{t.value} is not an {self.name} transition"

    def _transit(self, config: Configuration, t: TransitionKind) -> Configuration:
        if t is SH:
            return self._shift(config)
        s0 = config.stack[-1]
        if t is LA:
            return config.with_arc(config.buffer[0], s0, stack=config.stack[:-1])
        return config.with_arc(config.stack[-2], s0, stack=config.stack[:-1])

    def next_transition(self, config: Configuration, gold: GoldTree) -> TransitionKind:
        s0 = config.stack[-1]
        if config.buffer and s0 != ROOT and gold.heads[s0] == config.buffer[0]:
            return LA
        if len(config.stack) >= 2 and gold.heads[s0] == config.stack[-2] and gold.complete(s0, config):
            return RA
        return SH


class CovingtonNonProjective(TransitionSystem):
    """
    List-based system over (lambda1, lambda2, buffer).

    The buffer starts with the root, so the first shift reads node 0 and
    the last one only empties the buffer; labels omit that last shift.
    """
    name = SystemId.COVINGTON.value
    inventory = (SH, LA, RA, NA)
    read_transitions = frozenset({SH})
    k = 0
    omits_terminal_read = True

    def initial(self, n: int) -> Configuration:
        return Configuration(
            buffer=tuple(range(0, n + 1)),
            heads=(NO_HEAD,) * (n + 1),
        )

    def is_terminal(self, config: Configuration) -> bool:
        return not config.buffer

    def violation(self, config: Configuration, t: TransitionKind) -> Optional[str]:
        if not config.buffer:
            return "empty buffer"
        if t is SH:
            return None
        if not config.lambda1:
            return "empty lambda1"
        if t is NA:
            return None
        s, b = config.lambda1[-1], config.buffer[0]
        if t is LA:
            if s == ROOT:
                return "root cannot take a head"
            if config.has_head(s):
                return "single head"
            if config.is_ancestor(s, b):
                return "acyclicity"
            return None
        if t is RA:
            if config.has_head(b):
                return "single head"
            if config.is_ancestor(b, s):
                return "acyclicity"
            return None
        return f"{t.value} is not a {self.name} transition"

    def _transit(self, config: Configuration, t: TransitionKind) -> Configuration:
        if t is SH:
            return config.moved(
                lambda1=config.lambda1 + config.lambda2 + config.buffer[:1],
                lambda2=(),
                buffer=config.buffer[1:],
            )
        s, b = config.lambda1[-1], config.buffer[0]
        moved = {"lambda1": config.lambda1[:-1], "lambda2": (s,) + config.lambda2}
        if t is NA:
            return config.moved(**moved)
        if t is LA:
            return config.with_arc(b, s, **moved)
        return config.with_arc(s, b, **moved)

    def next_transition(self, config: Configuration, gold: GoldTree) -> TransitionKind:
        if not config.lambda1:
            return SH
        s, b = config.lambda1[-1], config.buffer[0]
        if s != ROOT and gold.heads[s] == b:
            return LA
        if gold.heads[b] == s:
            return RA
        if any(gold.linked(b, deeper) for deeper in config.lambda1[:-1]):
            return NA
        return SH


_SYSTEMS: Dict[SystemId, TransitionSystem] = {
    SystemId.ARC_STANDARD: ArcStandard(),
    SystemId.ARC_EAGER: ArcEager(),
    SystemId.ARC_HYBRID: ArcHybrid(),
    SystemId.COVINGTON: CovingtonNonProjective(),
}


def get_system(system_id: SystemId) -> TransitionSystem:
    """Shared (stateless) system instance for an id."""
    return _SYSTEMS[system_id]


def preconditions(system_id: SystemId, config: Configuration, t: TransitionKind) -> bool:
    """Whether t is applicable to config in the given system."""
    return get_system(system_id).preconditions(config, t)


def oracle(system_id: SystemId, tree: DepTree) -> OracleTrace:
    """
    Canonical complete computation producing the gold tree.

    Args:
        system_id: Transition system
        tree: Gold tree; must be projective for the stack systems

    Returns:
        OracleTrace whose final arc set equals the tree's arcs

    Raises:
        NonProjectiveInput: projective system on a non-projective tree
    """
    if system_id.projective_only and not is_projective(tree):
        raise NonProjectiveInput(system_id.value, tree.sentence_id)

    system = get_system(system_id)
    gold = GoldTree.from_tree(tree)
    n = tree.n
    # Covington is quadratic; anything beyond this bound is a non-terminating oracle
    step_limit = 2 * (n + 1) * (n + 2)

    initial = system.initial(n)
    config = initial
    transitions: List[TransitionKind] = []
    while not system.is_terminal(config):
        if len(transitions) > step_limit:
            raise IllegalTransition(f"{system.name} oracle", "no terminal configuration reached")
        t = system.next_transition(config, gold)
        config = system.apply(config, t)
        transitions.append(t)

    if config.arc_set != tree.arcs:
        raise IllegalTransition(f"{system.name} oracle", "final arcs differ from the gold tree")

    computation = Computation(initial=initial, transitions=tuple(transitions), final=config)
    return OracleTrace(computation=computation, arcs_in_order=config.arcs)
