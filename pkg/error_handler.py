"""
Error Handler for Treebank Encoding Operations

Provides the exception hierarchy shared by every module, per-sentence
error handling (skip-or-fail on non-projective input, optional worker
pool), and the decorator that turns exceptions into CLI exit codes.
"""

import logging
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from functools import partial, wraps
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple


EXIT_SUCCESS = 0
EXIT_USAGE = 1
EXIT_DATA_ERROR = 2
EXIT_INVARIANT_VIOLATION = 3


class TransLabelError(Exception):
    """Base exception for encoding, decoding and treebank errors."""
    exit_code = EXIT_DATA_ERROR


class ConlluParseError(TransLabelError):
    """Malformed CoNLL-U input."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class TreeValidationError(TransLabelError):
    """Structurally invalid dependency tree (range, self loop, cycle)."""

    def __init__(self, message: str, issues: Optional[List[str]] = None):
        self.issues = issues or []
        super().__init__(message)


class IllegalTransition(TransLabelError):
    """A transition was applied while its precondition does not hold."""

    def __init__(self, transition: str, condition: str):
        self.transition = transition
        self.condition = condition
        super().__init__(f"{transition} is not applicable: {condition}")


class NonProjectiveInput(TransLabelError):
    """A projective transition system received a non-projective tree."""

    def __init__(self, system: str, sentence_id: Optional[str] = None):
        self.system = system
        self.sentence_id = sentence_id
        where = f" (sentence {sentence_id})" if sentence_id else ""
        super().__init__(f"{system} cannot encode a non-projective tree{where}")


class LabelFileError(TransLabelError):
    """Malformed label file or system header mismatch."""

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class AlignmentError(TransLabelError):
    """Gold and predicted corpora do not align sentence by sentence."""

    def __init__(self, message: str, sentence_index: Optional[int] = None):
        self.sentence_index = sentence_index
        if sentence_index is not None:
            message = f"sentence {sentence_index}: {message}"
        super().__init__(message)


class ModelFileError(TransLabelError):
    """Unreadable or inconsistent tagger model file."""
    pass


class TrainingError(TransLabelError):
    """Tagger training was given an unusable corpus or settings."""
    pass


class StorageError(TransLabelError):
    """Input or output location could not be read or written."""
    pass


class InvariantViolation(TransLabelError):
    """An end-to-end guarantee (round trip, decoder validity) failed."""
    exit_code = EXIT_INVARIANT_VIOLATION


def _guarded_call(operation: Callable, item: Any) -> Tuple[str, Any]:
    """Run one per-sentence operation, turning non-projectivity into a value.

    Module level so that it pickles into pool workers.
    """
    try:
        return "ok", operation(item)
    except NonProjectiveInput as e:
        return "skip", (e.system, e.sentence_id)


class ErrorHandler:
    """
    Handles per-sentence errors during corpus runs and keeps an error log.
    """

    def __init__(self, logger: logging.Logger, on_nonprojective: str = "skip"):
        """
        Initialize error handler.

        Args:
            logger: Logger instance
            on_nonprojective: 'skip' counts and drops non-projective
                sentences, 'fail' aborts on the first one
        """
        if on_nonprojective not in ("skip", "fail"):
            raise ValueError(f"Unknown non-projective policy: {on_nonprojective}")
        self.logger = logger
        self.on_nonprojective = on_nonprojective
        self.error_log: List[dict] = []

    def run_per_sentence(
        self,
        stage: str,
        operation: Callable,
        items: Sequence,
        jobs: int = 1
    ) -> Tuple[List[Optional[Any]], int]:
        """
        Apply an operation to every sentence, preserving input order.

        Args:
            stage: Stage name used in log messages
            operation: Picklable callable taking one item
            items: Sentences (or sentence-shaped inputs)
            jobs: Worker processes; 1 runs in-process

        Returns:
            Tuple of (results aligned with items, skipped_count); skipped
            positions hold None
        """
        guarded = partial(_guarded_call, operation)
        if jobs > 1 and len(items) > 1:
            chunksize = max(1, len(items) // (jobs * 4))
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                outcomes = list(pool.map(guarded, items, chunksize=chunksize))
        else:
            outcomes = [guarded(item) for item in items]

        results: List[Optional[Any]] = []
        skipped = 0
        for idx, (status, value) in enumerate(outcomes):
            if status == "ok":
                results.append(value)
                continue

            system, sentence_id = value
            sentence_id = sentence_id or str(idx + 1)
            message = f"{system} cannot encode non-projective sentence {sentence_id}"
            self._record("nonprojective", stage, message, idx)

            if self.on_nonprojective == "fail":
                raise NonProjectiveInput(system, sentence_id=sentence_id)

            skipped += 1
            results.append(None)
            if skipped <= 5:
                self.logger.warning(f"{stage}: {message}, skipped")

        if skipped > 5:
            self.logger.warning(f"{stage}: ... and {skipped - 5} more skipped")

        return results, skipped

    def _record(self, error_type: str, stage: str, message: str, index: int):
        self.error_log.append({
            "type": error_type,
            "stage": stage,
            "message": message,
            "sentence_index": index,
        })

    def get_error_summary(self) -> Dict:
        """Counts of handled per-sentence errors by type and by stage."""
        return {
            "total_errors": len(self.error_log),
            "by_type": dict(Counter(e["type"] for e in self.error_log)),
            "by_stage": dict(Counter(e["stage"] for e in self.error_log)),
            "errors": list(self.error_log),
        }


def with_error_handling(logger: logging.Logger):
    """
    Decorator turning a command function into one that returns an exit code.

    Args:
        logger: Logger used for failure reports
    """
    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @wraps(func)
        def wrapper(*args, **kwargs) -> int:
            try:
                return func(*args, **kwargs)
            except TransLabelError as e:
                logger.error(f"❌ {func.__name__}: {e}")
                return e.exit_code
            except OSError as e:
                logger.error(f"❌ {func.__name__}: I/O error: {e}")
                return EXIT_DATA_ERROR
            except Exception as e:
                logger.exception(f"Unexpected error in {func.__name__}: {e}")
                return EXIT_DATA_ERROR
        return wrapper
    return decorator
