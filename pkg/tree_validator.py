"""
Tree Validation Module

Structural checks on dependency trees: head ranges, self loops, cycles
and rootedness. Every check returns (passed, issues) so callers decide
whether an issue is fatal (reading a treebank) or a counted warning.
"""

import logging
from typing import List, Sequence, Tuple


logger = logging.getLogger(__name__)

ROOT = 0


def find_cycle(heads: Sequence[int]) -> List[int]:
    """
    Find one cycle in a head assignment.

    Args:
        heads: heads[i - 1] is the head of token i; 0 is the artificial root

    Returns:
        Token ids along the cycle in head order, or [] if acyclic
    """
    n = len(heads)
    state = [0] * (n + 1)  # 0 unvisited, 1 on current path, 2 done

    for start in range(1, n + 1):
        if state[start]:
            continue
        path = []
        node = start
        while 1 <= node <= n and state[node] == 0:
            state[node] = 1
            path.append(node)
            node = heads[node - 1]
        if 1 <= node <= n and state[node] == 1:
            return path[path.index(node):]
        for visited in path:
            state[visited] = 2

    return []


def validate_heads(heads: Sequence[int]) -> Tuple[bool, List[str]]:
    """
    Validate that a head assignment forms a tree rooted at node 0.

    Args:
        heads: heads[i - 1] is the head of token i

    Returns:
        Tuple of (passed: bool, issues: List[str])
    """
    issues = []
    n = len(heads)

    for idx, head in enumerate(heads, start=1):
        if head < 0 or head > n:
            issues.append(f"token {idx}: head {head} out of range [0, {n}]")
        elif head == idx:
            issues.append(f"token {idx}: self loop")

    # Cycle search only makes sense over in-range heads
    if not issues:
        cycle = find_cycle(heads)
        if cycle:
            trail = " -> ".join(str(node) for node in cycle + [cycle[0]])
            issues.append(f"cycle {trail}")

    return len(issues) == 0, issues


def check_single_root(heads: Sequence[int]) -> Tuple[bool, List[str]]:
    """
    Check that exactly one token is attached to the artificial root.

    Returns:
        Tuple of (passed: bool, issues: List[str])
    """
    roots = [idx for idx, head in enumerate(heads, start=1) if head == ROOT]
    if len(roots) == 1:
        return True, []
    if not roots:
        return False, ["no token attached to the root"]
    return False, [f"{len(roots)} tokens attached to the root: {roots}"]


def validate_decoded(heads: Sequence[int]) -> Tuple[bool, List[str]]:
    """
    Validate decoder output: a well-formed tree with a single root.

    Returns:
        Tuple of (passed: bool, issues: List[str])
    """
    passed, issues = validate_heads(heads)
    if passed:
        passed, issues = check_single_root(heads)
    return passed, issues
