"""
Shared fixtures: the running example sentence, its label rows per
transition system, brute-force tree enumerators and a seeded synthetic
treebank.
"""

import itertools
import os
import random
from typing import Dict, List

import pytest
from hypothesis import strategies as st

from systems import SystemId
from tree_validator import ROOT, validate_heads
from treebank_io import DepTree, is_projective


FIGURE1_FORMS = ["Kyrie", "ate", "a", "carrot", "cake", "in", "a", "restaurant", "in", "London"]
FIGURE1_HEADS = [2, 0, 5, 5, 2, 8, 8, 2, 10, 8]
FIGURE1_DEPRELS = ["nsubj", "root", "det", "compound", "obj", "case", "det", "obl", "case", "nmod"]

FIGURE1_ROWS: Dict[SystemId, str] = {
    SystemId.ARC_STANDARD: "SH | SH-LA | SH | SH | SH-LA-LA-RA | SH | SH | SH-LA-LA | SH | SH-LA-RA-RA-RA",
    SystemId.ARC_EAGER: "SH-LA | RA | SH | SH-LA-LA | RA | SH | SH-LA-LA-RE | RA | SH-LA | RA-RE-RE-RE",
    SystemId.ARC_HYBRID: "SH-LA | SH | SH | SH-LA-LA | SH-RA | SH | SH-LA-LA | SH | SH-LA | SH-RA-RA-RA",
    SystemId.COVINGTON: "SH | SH-LA-RA | SH | SH | SH-LA-LA-RA | SH | SH | SH-LA-LA-NA-NA-NA-RA | SH | SH-LA-RA",
}

PROJECTIVE_SYSTEMS = [s for s in SystemId if s.projective_only]

# Acceptance data (UD English-EWT directory with *-ud-train.conllu / *-ud-dev.conllu)
EWT_DIR = os.getenv("TRANSLABEL_EWT_DIR")


def make_tree(heads, deprels=None, forms=None) -> DepTree:
    n = len(heads)
    forms = forms or [f"w{i}" for i in range(1, n + 1)]
    if deprels is None:
        deprels = ["root" if head == ROOT else "dep" for head in heads]
    return DepTree.from_heads(forms, list(heads), deprels)


def enumerate_heads(n: int, single_root: bool = True) -> List[List[int]]:
    """Every head assignment over n tokens that forms a tree rooted at 0."""
    found = []
    for heads in itertools.product(range(n + 1), repeat=n):
        if single_root and heads.count(ROOT) != 1:
            continue
        passed, _ = validate_heads(heads)
        if passed:
            found.append(list(heads))
    return found


def enumerate_trees(max_n: int, projective: bool = False, single_root: bool = True) -> List[DepTree]:
    trees = []
    for n in range(1, max_n + 1):
        for heads in enumerate_heads(n, single_root):
            tree = make_tree(heads)
            if not projective or is_projective(tree):
                trees.append(tree)
    return trees


def brute_force_projective(heads: List[int]) -> bool:
    """Every token strictly inside an arc's span descends from its head within the span."""
    for dependent, head in enumerate(heads, start=1):
        low, high = min(head, dependent), max(head, dependent)
        for inner in range(low + 1, high):
            node = inner
            while node != head:
                if node < low or node > high or node == ROOT:
                    return False
                node = heads[node - 1]
    return True


# Small projective grammar: NP VERB [NP] [ADP NP] PUNCT, NP = DET ADJ{0,2} NOUN
DETERMINERS = ["the", "a", "every", "this"]
ADJECTIVES = ["big", "small", "red", "old", "happy"]
NOUNS = ["dog", "cat", "man", "park", "house", "child", "bird"]
VERBS = ["chased", "saw", "found", "liked", "watched"]
PREPOSITIONS = ["in", "near", "behind"]


def synthetic_tree(rng: random.Random) -> DepTree:
    forms, upos, heads, deprels = [], [], [], []

    def word(form, tag, deprel):
        forms.append(form)
        upos.append(tag)
        heads.append(ROOT)
        deprels.append(deprel)
        return len(forms)

    def noun_phrase(deprel):
        dependents = [word(rng.choice(DETERMINERS), "DET", "det")]
        for _ in range(rng.randint(0, 2)):
            dependents.append(word(rng.choice(ADJECTIVES), "ADJ", "amod"))
        noun = word(rng.choice(NOUNS), "NOUN", deprel)
        for dependent in dependents:
            heads[dependent - 1] = noun
        return noun

    subject = noun_phrase("nsubj")
    verb = word(rng.choice(VERBS), "VERB", "root")
    heads[subject - 1] = verb
    if rng.random() < 0.7:
        heads[noun_phrase("obj") - 1] = verb
    if rng.random() < 0.5:
        case = word(rng.choice(PREPOSITIONS), "ADP", "case")
        noun = noun_phrase("obl")
        heads[case - 1] = noun
        heads[noun - 1] = verb
    heads[word(".", "PUNCT", "punct") - 1] = verb
    return DepTree.from_heads(forms, heads, deprels, upos)


def synthetic_treebank(size: int, seed: int) -> List[DepTree]:
    rng = random.Random(seed)
    return [synthetic_tree(rng) for _ in range(size)]


@pytest.fixture
def figure1_tree() -> DepTree:
    return DepTree.from_heads(FIGURE1_FORMS, FIGURE1_HEADS, FIGURE1_DEPRELS)


@pytest.fixture(scope="session")
def projective_trees_up_to_6() -> List[DepTree]:
    return enumerate_trees(6, projective=True)


@pytest.fixture(scope="session")
def trees_up_to_5() -> List[DepTree]:
    return enumerate_trees(5)


@pytest.fixture
def figure1_conllu() -> str:
    lines = ["# sent_id = figure-1", "# text = " + " ".join(FIGURE1_FORMS)]
    for i, (form, head, deprel) in enumerate(zip(FIGURE1_FORMS, FIGURE1_HEADS, FIGURE1_DEPRELS), start=1):
        lines.append("\t".join([str(i), form, form.lower(), "X", "_", "_", str(head), deprel, "_", "_"]))
    return "\n".join(lines) + "\n\n"


@pytest.fixture
def nonprojective_conllu() -> str:
    """n=4 with crossing arcs 3->1 and 2->4."""
    rows = [
        ("1", "A", "3", "dep"),
        ("2", "B", "0", "root"),
        ("3", "C", "2", "dep"),
        ("4", "D", "2", "dep"),
    ]
    lines = ["# sent_id = crossing"]
    for token_id, form, head, deprel in rows:
        lines.append("\t".join([token_id, form, "_", "X", "_", "_", head, deprel, "_", "_"]))
    return "\n".join(lines) + "\n\n"


FORM_ALPHABET = st.characters(whitelist_categories=("Lu", "Ll", "Nd", "Po", "Sm"))


@st.composite
def random_trees(draw, max_n: int = 12, single_root: bool = True) -> DepTree:
    """Random valid trees: nodes join in random order below already placed nodes."""
    n = draw(st.integers(min_value=1, max_value=max_n))
    order = draw(st.permutations(list(range(1, n + 1))))
    heads = [ROOT] * n
    for k, node in enumerate(order):
        if k == 0:
            continue
        choices = list(order[:k]) if single_root else [ROOT] + list(order[:k])
        heads[node - 1] = draw(st.sampled_from(choices))
    forms = draw(st.lists(st.text(FORM_ALPHABET, min_size=1, max_size=8), min_size=n, max_size=n))
    deprels = draw(st.lists(st.sampled_from(["nsubj", "obj", "det", "case", "flat name"]), min_size=n, max_size=n))
    deprels = ["root" if head == ROOT else deprel for head, deprel in zip(heads, deprels)]
    return DepTree.from_heads(forms, heads, deprels)
