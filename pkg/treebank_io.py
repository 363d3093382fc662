"""
CoNLL-U Treebank Reading and Writing

Represents dependency trees over syntactic words and converts them to
and from CoNLL-U through the conllu package. Multiword-token ranges and
empty nodes never take part in the tree; with keep_columns=True the
parsed token list travels with the tree (comments, those rows, LEMMA,
XPOS, FEATS, DEPS and MISC) so that writing reproduces them.
"""

import logging
from dataclasses import dataclass, field
from typing import FrozenSet, Iterable, Iterator, List, Optional, Sequence, TextIO, Tuple

import conllu
from conllu.exceptions import ParseException
from conllu.models import Token as ConlluToken
from conllu.models import TokenList

from error_handler import ConlluParseError, TreeValidationError
from tree_validator import ROOT, validate_heads


logger = logging.getLogger(__name__)

CONLLU_FIELDS = ("id", "form", "lemma", "upos", "xpos", "feats", "head", "deprel", "deps", "misc")
PLACEHOLDER = "_"


@dataclass(frozen=True)
class Token:
    """One syntactic word of a sentence."""
    id: int
    form: str
    upos: str = PLACEHOLDER
    head: int = ROOT
    deprel: str = "dep"


@dataclass(frozen=True)
class DepTree:
    """
    A dependency tree rooted at the artificial node 0.

    Construction validates single-headedness, head ranges and acyclicity;
    several tokens headed by 0 are accepted (see root_count).
    """
    tokens: Tuple[Token, ...]
    # Token list the tree was read from, when the reader keeps columns
    source: Optional[TokenList] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        for position, token in enumerate(self.tokens, start=1):
            if token.id != position:
                raise TreeValidationError(
                    f"token ids must be 1..n in order, found {token.id} at position {position}"
                )
        passed, issues = validate_heads(self.heads)
        if not passed:
            raise TreeValidationError("; ".join(issues), issues)

    @classmethod
    def from_heads(
        cls,
        forms: Sequence[str],
        heads: Sequence[int],
        deprels: Sequence[str],
        upos: Optional[Sequence[str]] = None
    ) -> "DepTree":
        """Build a tree from parallel per-token lists."""
        if not (len(forms) == len(heads) == len(deprels)):
            raise TreeValidationError("forms, heads and deprels differ in length")
        tags = upos if upos is not None else [PLACEHOLDER] * len(forms)
        return cls(tuple(
            Token(id=i, form=form, upos=tag, head=head, deprel=deprel)
            for i, (form, tag, head, deprel) in enumerate(zip(forms, tags, heads, deprels), start=1)
        ))

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def forms(self) -> Tuple[str, ...]:
        return tuple(t.form for t in self.tokens)

    @property
    def heads(self) -> Tuple[int, ...]:
        return tuple(t.head for t in self.tokens)

    @property
    def deprels(self) -> Tuple[str, ...]:
        return tuple(t.deprel for t in self.tokens)

    @property
    def upos(self) -> Tuple[str, ...]:
        return tuple(t.upos for t in self.tokens)

    @property
    def arcs(self) -> FrozenSet[Tuple[int, int]]:
        """Arc set as (head, dependent) pairs."""
        return frozenset((t.head, t.id) for t in self.tokens)

    @property
    def root_count(self) -> int:
        return sum(1 for t in self.tokens if t.head == ROOT)

    @property
    def sentence_id(self) -> Optional[str]:
        if self.source is None:
            return None
        return self.source.metadata.get("sent_id") or None

    def same_structure(self, other: "DepTree") -> bool:
        """Equality on (id, form, upos, head, deprel)."""
        return self.tokens == other.tokens


def is_projective(tree: DepTree) -> bool:
    """
    True iff no two arcs cross, the root arc spanning from position 0.
    """
    spans = sorted(
        (min(t.head, t.id), max(t.head, t.id)) for t in tree.tokens
    )
    for i, (left1, right1) in enumerate(spans):
        for left2, right2 in spans[i + 1:]:
            if left2 >= right1:
                break
            # left1 <= left2 < right1 holds here
            if left1 < left2 < right1 < right2:
                return False
    return True


# =============================================================================
# READING
# =============================================================================

def _raw_column(line: List[str], i: int) -> str:
    return line[i]


# Columns stay the exact strings of the file. A line with more than ten
# columns fills the overflow field.
OVERFLOW_FIELD = "overflow"
PARSE_FIELDS = CONLLU_FIELDS + (OVERFLOW_FIELD,)
FIELD_PARSERS = {name: _raw_column for name in PARSE_FIELDS}

Row = Tuple[int, ConlluToken]


class _NumberedLines:
    """Line source for conllu.parse_incr that tracks the current line number."""

    def __init__(self, stream: Iterable[str]):
        self._stream = stream
        self.line_number = 0
        self.at_blank = False

    def __iter__(self) -> Iterator[str]:
        for raw in self._stream:
            self.line_number += 1
            line = raw.rstrip("\r\n")
            self.at_blank = not line.strip()
            yield "\n" if self.at_blank else line + "\n"

    def read(self) -> str:
        return "".join(self)

    def block_end(self) -> int:
        """Last line of the sentence parse_incr has just returned."""
        return self.line_number - 1 if self.at_blank else self.line_number


def _iter_sentences(stream: Iterable[str]) -> Iterator[Tuple[TokenList, List[Row]]]:
    """
    Yield (token list, syntactic-word rows with line numbers) per sentence.

    Column counts are checked on every row, multiword and empty nodes
    included; blocks without syntactic words are dropped.
    """
    lines = _NumberedLines(stream)
    sentences = conllu.parse_incr(lines, fields=PARSE_FIELDS, field_parsers=FIELD_PARSERS)
    try:
        for sentence in sentences:
            # Comments precede the rows, so rows are the last lines of the block
            first_line = lines.block_end() - len(sentence) + 1
            rows = []
            for line_number, row in enumerate(sentence, start=first_line):
                if len(row) != len(CONLLU_FIELDS):
                    found = "" if OVERFLOW_FIELD in row else f", found {len(row)}"
                    raise ConlluParseError(
                        f"expected {len(CONLLU_FIELDS)} tab-separated columns{found}", line_number
                    )
                if "-" not in row["id"] and "." not in row["id"]:
                    rows.append((line_number, row))
            if rows:
                yield sentence, rows
    except ParseException as e:
        raise ConlluParseError(str(e), lines.line_number) from e
    logger.debug(f"Read {lines.line_number:,} lines")


def _parse_int(value: str, column: str, line_number: int) -> int:
    try:
        return int(value)
    except ValueError:
        raise ConlluParseError(f"{column} is not an integer: {value!r}", line_number)


def _token_id(row: ConlluToken, position: int, line_number: int) -> int:
    token_id = _parse_int(row["id"], "ID", line_number)
    if token_id != position:
        raise ConlluParseError(f"expected token id {position}, found {token_id}", line_number)
    return token_id


def _build_tree(rows: List[Row], source: Optional[TokenList]) -> DepTree:
    """Turn the syntactic-word rows of one sentence into a validated tree."""
    n = len(rows)
    first_line = rows[0][0]
    tokens = []

    for position, (line_number, row) in enumerate(rows, start=1):
        token_id = _token_id(row, position, line_number)
        head = _parse_int(row["head"], "HEAD", line_number)
        if head < 0 or head > n:
            raise TreeValidationError(
                f"line {line_number}: head {head} out of range [0, {n}]",
                [f"token {token_id}: head {head} out of range [0, {n}]"]
            )
        tokens.append(Token(
            id=token_id, form=row["form"], upos=row["upos"], head=head, deprel=row["deprel"]
        ))

    try:
        tree = DepTree(tokens=tuple(tokens), source=source)
    except TreeValidationError as e:
        raise TreeValidationError(
            f"sentence starting at line {first_line}: {e}", e.issues
        ) from e

    if tree.root_count > 1:
        logger.warning(
            f"Sentence starting at line {first_line} has {tree.root_count} "
            f"tokens headed by 0"
        )
    return tree


def read_conllu(stream: Iterable[str], keep_columns: bool = False) -> List[DepTree]:
    """
    Read every sentence of a CoNLL-U stream.

    Args:
        stream: Text stream (or any iterable of lines)
        keep_columns: Keep each sentence's parsed token list on its tree
            (comments, multiword/empty-node rows, unused columns) for
            faithful re-writing

    Returns:
        list: One DepTree per sentence block
    """
    trees = [
        _build_tree(rows, sentence if keep_columns else None)
        for sentence, rows in _iter_sentences(stream)
    ]
    logger.debug(f"Read {len(trees):,} sentences")
    return trees


def read_tokens(stream: Iterable[str]) -> List[List[Token]]:
    """
    Read the syntactic words of every sentence without building trees.

    For parser input: HEAD and DEPREL may be placeholders and are not
    validated (a non-integer HEAD reads as 0).
    """
    sentences = []
    for _, rows in _iter_sentences(stream):
        tokens = []
        for position, (line_number, row) in enumerate(rows, start=1):
            head = int(row["head"]) if row["head"].isdigit() else ROOT
            tokens.append(Token(
                id=_token_id(row, position, line_number),
                form=row["form"], upos=row["upos"], head=head, deprel=row["deprel"]
            ))
        sentences.append(tokens)
    return sentences


# =============================================================================
# WRITING
# =============================================================================

def _token_list(tree: DepTree) -> TokenList:
    """The tree as a conllu token list, over its source rows when kept."""
    if tree.source is None:
        return TokenList([
            ConlluToken(zip(CONLLU_FIELDS, (
                str(t.id), t.form, PLACEHOLDER, t.upos, PLACEHOLDER, PLACEHOLDER,
                str(t.head), t.deprel, PLACEHOLDER, PLACEHOLDER
            )))
            for t in tree.tokens
        ])

    rows = []
    for source_row in tree.source:
        row = ConlluToken(source_row)
        if "-" not in row["id"] and "." not in row["id"]:
            token = tree.tokens[int(row["id"]) - 1]
            row.update(form=token.form, upos=token.upos, head=str(token.head), deprel=token.deprel)
        rows.append(row)
    return TokenList(rows, metadata=tree.source.metadata)


def write_conllu(trees: Iterable[DepTree], stream: TextIO) -> None:
    """
    Write trees as CoNLL-U, one blank-line-terminated block per tree.

    Comments and multiword/empty-node rows kept by the reader are
    re-emitted in their original positions.
    """
    for tree in trees:
        stream.write(_token_list(tree).serialize())
