"""
Tests for per-sentence error handling and exit-code mapping.
"""

import logging
from functools import partial

import pytest

from conftest import make_tree
from error_handler import (
    EXIT_DATA_ERROR,
    EXIT_INVARIANT_VIOLATION,
    EXIT_SUCCESS,
    ConlluParseError,
    ErrorHandler,
    InvariantViolation,
    NonProjectiveInput,
    with_error_handling,
)
from labeling import encode
from systems import SystemId

logger = logging.getLogger("test_error_handler")

CROSSING = make_tree([3, 0, 2, 2])
SIMPLE = make_tree([0, 1])


def test_skip_mode_keeps_order_and_counts(caplog):
    handler = ErrorHandler(logger, on_nonprojective="skip")
    results, skipped = handler.run_per_sentence(
        "encode", partial(encode, SystemId.ARC_STANDARD), [SIMPLE, CROSSING, SIMPLE]
    )

    assert skipped == 1
    assert results[1] is None
    assert results[0] == results[2] == encode(SystemId.ARC_STANDARD, SIMPLE)
    assert "cannot encode non-projective sentence 2" in caplog.text
    assert handler.get_error_summary()["by_type"] == {"nonprojective": 1}


def test_skip_warnings_are_capped(caplog):
    handler = ErrorHandler(logger)
    _, skipped = handler.run_per_sentence("encode", partial(encode, SystemId.ARC_EAGER), [CROSSING] * 8)

    assert skipped == 8
    assert caplog.text.count("skipped") == 6
    assert "... and 3 more skipped" in caplog.text
    summary = handler.get_error_summary()
    assert summary["total_errors"] == 8
    assert summary["by_stage"] == {"encode": 8}
    assert summary["errors"][7]["sentence_index"] == 7


def test_fail_mode_raises_with_the_system():
    handler = ErrorHandler(logger, on_nonprojective="fail")
    with pytest.raises(NonProjectiveInput) as excinfo:
        handler.run_per_sentence("encode", partial(encode, SystemId.ARC_HYBRID), [SIMPLE, CROSSING])
    assert excinfo.value.system == "arc-hybrid"
    assert excinfo.value.sentence_id == "2"


def test_covington_never_skips():
    handler = ErrorHandler(logger, on_nonprojective="fail")
    results, skipped = handler.run_per_sentence("encode", partial(encode, SystemId.COVINGTON), [CROSSING])
    assert skipped == 0
    assert len(results[0]) == 4


def test_worker_pool_preserves_order():
    handler = ErrorHandler(logger)
    trees = [SIMPLE, CROSSING, make_tree([2, 0]), make_tree([0])] * 3
    sequential, _ = handler.run_per_sentence("encode", partial(encode, SystemId.ARC_EAGER), trees)
    pooled, skipped = handler.run_per_sentence("encode", partial(encode, SystemId.ARC_EAGER), trees, jobs=2)

    assert pooled == sequential
    assert skipped == 3


def test_unknown_policy():
    with pytest.raises(ValueError):
        ErrorHandler(logger, on_nonprojective="ignore")


@pytest.mark.parametrize("raised,expected", [
    (None, EXIT_SUCCESS),
    (ConlluParseError("bad", 3), EXIT_DATA_ERROR),
    (InvariantViolation("round trip"), EXIT_INVARIANT_VIOLATION),
    (FileNotFoundError("absent.conllu"), EXIT_DATA_ERROR),
    (RuntimeError("boom"), EXIT_DATA_ERROR),
])
def test_exit_codes(raised, expected, caplog):
    @with_error_handling(logger)
    def command():
        if raised is not None:
            raise raised
        return EXIT_SUCCESS

    assert command() == expected
    if raised is not None:
        assert str(raised) in caplog.text
