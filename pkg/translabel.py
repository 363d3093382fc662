#!/usr/bin/env python3
"""
translabel - Sequence-Labeling Encodings of Transition-Based Dependency Parsers

Encodes dependency trees as one label per token (the transitions a
transition system performs while that token is read, plus its deprel),
decodes predicted labels back into valid trees, and wraps the pipeline
around a small perceptron tagger for end-to-end runs.

Subcommands:
    encode     CoNLL-U treebank -> label file
    decode     label file -> CoNLL-U (always valid single-rooted trees)
    verify     left-to-right conditions on the oracle computations
    stats      label-vocabulary statistics per transition system
    train      perceptron tagger on an encoded treebank
    predict    tagger labels for a treebank (trees with --decode)
    eval       UAS/LAS between treebanks, or label accuracy (--labels)
    roundtrip  encode + decode + score against the input

Configuration:
- Optional JSON file (--config, default translabel.json when present),
  created from config.json.template
- Command-line flags override the config file, which overrides defaults
- TRANSLABEL_LOG (error|warn|info|debug) sets the log level

Inputs and outputs are local paths, '-' for stdin/stdout, '.gz' files or
s3://bucket/key URIs. Summaries go to standard error.

Exit codes: 0 success, 1 usage error, 2 data error, 3 invariant violation.
"""

# Standard library imports
import argparse
import io
import json
import logging
import os
import sys
from functools import partial
from typing import Callable, Dict, List, Optional, Sequence, TextIO, Tuple

# Local imports
from error_handler import (
    EXIT_SUCCESS,
    EXIT_USAGE,
    ErrorHandler,
    InvariantViolation,
    LabelFileError,
    with_error_handling,
)
from evaluation import baseline_attach_previous, label_accuracy, score
from labeling import (
    DecodeStats,
    LabelSequence,
    VocabReport,
    decode_with_stats,
    encode,
    read_labels,
    write_labels,
)
from run_logger import RunLogger, RunStage
from s3_storage import read_text, write_text
from systems import SystemId, get_system, oracle
from tagger import load_model, predict, save_model, train
from transition_core import VerificationReport, verify_left_to_right
from tree_validator import validate_decoded
from treebank_io import DepTree, Token, read_conllu, read_tokens, write_conllu


# =============================================================================
# GLOBAL CONFIGURATION
# =============================================================================

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = "translabel.json"
CONFIG_SECTIONS = ("s3", "training", "run", "logging")
DEFAULTS = {
    "epochs": 5,
    "seed": 1,
    "use_upos": True,
    "jobs": 1,
    "on_nonprojective": "skip",
}
LOG_LEVELS = {
    "error": logging.ERROR,
    "warn": logging.WARNING,
    "warning": logging.WARNING,
    "info": logging.INFO,
    "debug": logging.DEBUG,
}


# =============================================================================
# LOGGING CONFIGURATION
# =============================================================================

_console_handler: Optional[logging.Handler] = None


def setup_logging(level_name: Optional[str] = None):
    """
    Configure logging: one console handler on the root logger, bound to
    the current standard error (a previous one is replaced).

    Args:
        level_name: error, warn, info or debug; defaults to TRANSLABEL_LOG,
            then info
    """
    global _console_handler

    requested = (level_name or os.getenv("TRANSLABEL_LOG") or "info").lower()
    level = LOG_LEVELS.get(requested, logging.INFO)

    root = logging.getLogger()
    root.setLevel(level)
    if _console_handler is not None:
        root.removeHandler(_console_handler)
    _console_handler = logging.StreamHandler()
    _console_handler.setFormatter(logging.Formatter('%(asctime)s - %(levelname)s - %(message)s'))
    root.addHandler(_console_handler)

    if requested not in LOG_LEVELS:
        logger.warning(f"Unknown log level '{requested}', using info")


# =============================================================================
# CONFIGURATION FILE LOADING
# =============================================================================

def load_config_file(config_path: str = DEFAULT_CONFIG, required: bool = False) -> Optional[Dict]:
    """
    Load settings from a JSON config file.

    Args:
        config_path (str): Path to the config file
        required (bool): A missing file is an error (explicit --config)

    Returns:
        dict: Configuration ({} when an optional file is absent), or None
        when the file is missing/invalid

    Example translabel.json structure:
    {
        "s3": {"region": "us-east-1", "endpoint_url": null},
        "training": {"epochs": 5, "seed": 1, "use_upos": true},
        "run": {"jobs": 1, "on_nonprojective": "skip"},
        "logging": {"level": "info"}
    }
    """
    try:
        if not os.path.exists(config_path):
            if required:
                logger.error(f"Configuration file not found: {config_path}")
                logger.error("Please create one from config.json.template")
                return None
            return {}

        with open(config_path, 'r', encoding='utf-8') as f:
            config = json.load(f)

        if not isinstance(config, dict):
            logger.error(f"Configuration file must contain a JSON object: {config_path}")
            return None

        unknown = sorted(set(config) - set(CONFIG_SECTIONS))
        if unknown:
            logger.warning(f"Ignoring unknown sections in config file: {unknown}")

        issues = _validate_config(config)
        if issues:
            for issue in issues:
                logger.error(f"Config file {config_path}: {issue}")
            return None

        logger.info(f"✅ Successfully loaded configuration from {config_path}")
        return config

    except json.JSONDecodeError as e:
        logger.error(f"Invalid JSON in config file: {e}")
        return None
    except OSError as e:
        logger.error(f"Error loading config file: {e}")
        return None


def _validate_config(config: Dict) -> List[str]:
    issues = []
    for section in CONFIG_SECTIONS:
        if section in config and not isinstance(config[section], dict):
            issues.append(f"section '{section}' must be an object")
    if issues:
        return issues

    run = config.get("run", {})
    if run.get("on_nonprojective", "skip") not in ("skip", "fail"):
        issues.append("run.on_nonprojective must be 'skip' or 'fail'")
    for section, key in (("run", "jobs"), ("training", "epochs")):
        value = config.get(section, {}).get(key, 1)
        if not isinstance(value, int) or isinstance(value, bool) or value < 1:
            issues.append(f"{section}.{key} must be a positive integer")
    seed = config.get("training", {}).get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool):
        issues.append("training.seed must be an integer")
    level = config.get("logging", {}).get("level", "info")
    if str(level).lower() not in LOG_LEVELS:
        issues.append(f"logging.level must be one of {sorted(LOG_LEVELS)}")
    return issues


def _setting(value, config: Dict, section: str, key: str):
    """Flag value, else config file value, else the built-in default."""
    if value is not None:
        return value
    return config.get(section, {}).get(key, DEFAULTS[key])


# =============================================================================
# I/O HELPERS
# =============================================================================

def _read_treebank(location: str, config: Dict, run_log: RunLogger) -> List[DepTree]:
    trees = read_conllu(io.StringIO(read_text(location, config)), keep_columns=True)
    multi_rooted = sum(1 for tree in trees if tree.root_count > 1)
    if multi_rooted:
        run_log.add_warning(
            f"{location}: {multi_rooted:,} of {len(trees):,} sentences have several tokens headed by 0"
        )
    return trees


def _read_label_file(
    location: str,
    config: Dict,
    expected_system: Optional[SystemId] = None
) -> Tuple[SystemId, List[Tuple[List[str], LabelSequence]]]:
    return read_labels(io.StringIO(read_text(location, config)), expected_system)


def _write(location: str, writer: Callable[[TextIO], None], config: Dict):
    buffer = io.StringIO()
    writer(buffer)
    write_text(location, buffer.getvalue(), config)


def _error_handler(args, config: Dict) -> Tuple[ErrorHandler, int]:
    policy = _setting(args.on_nonprojective, config, "run", "on_nonprojective")
    jobs = _setting(args.jobs, config, "run", "jobs")
    return ErrorHandler(logger, on_nonprojective=policy), jobs


# Per-sentence workers live at module level so they pickle into pool workers

def _decode_sentence(system_id: SystemId, item: Tuple[Sequence[str], LabelSequence]):
    forms, labels = item
    return decode_with_stats(system_id, labels, forms)


def _verify_sentence(system_id: SystemId, tree: DepTree) -> VerificationReport:
    system = get_system(system_id)
    trace = oracle(system_id, tree)
    return verify_left_to_right(system, tree.n, trace.transitions, system.k)


def _checked_trees(
    decoded: Sequence[Tuple[DepTree, DecodeStats]],
    upos: Optional[Sequence[Sequence[str]]] = None
) -> Tuple[List[DepTree], DecodeStats]:
    """Validate decoder output and merge repair counters."""
    trees = []
    total = DecodeStats()
    for idx, (tree, stats) in enumerate(decoded):
        passed, issues = validate_decoded(tree.heads)
        if not passed:
            raise InvariantViolation(f"decoded sentence {idx + 1} is not a tree: {'; '.join(issues)}")
        if upos is not None:
            tree = DepTree.from_heads(tree.forms, tree.heads, tree.deprels, upos[idx])
        trees.append(tree)
        total = total.merge(stats)
    return trees, total


def _log_handled_errors(run_log: RunLogger, handler: ErrorHandler):
    """Per-type counts of the sentences the error handler skipped."""
    for error_type, count in sorted(handler.get_error_summary()["by_type"].items()):
        run_log.set_value(f"skipped_{error_type}", count)


def _log_repairs(run_log: RunLogger, stats: DecodeStats):
    run_log.log_repaired(stats.repaired_actions + stats.postprocessed)
    run_log.set_value("repaired_actions", stats.repaired_actions)
    for name, count in stats.to_dict().items():
        run_log.set_value(name, count)


# =============================================================================
# COMMANDS
# =============================================================================

@with_error_handling(logger)
def cmd_encode(args, config: Dict) -> int:
    """Encode a treebank as a label file."""
    system_id: SystemId = args.system
    handler, jobs = _error_handler(args, config)
    run_log = RunLogger(logger)
    run_log.start_command("encode", system_id.value)

    run_log.start_stage(RunStage.READ)
    trees = _read_treebank(args.input, config, run_log)
    run_log.log_processed(len(trees))

    run_log.start_stage(RunStage.ENCODE, len(trees))
    results, skipped = handler.run_per_sentence("encode", partial(encode, system_id), trees, jobs)
    encoded = [(tree.forms, labels) for tree, labels in zip(trees, results) if labels is not None]
    run_log.log_processed(len(encoded))
    run_log.log_skipped(skipped)

    report = VocabReport(system=system_id, skipped=skipped)
    for _, labels in encoded:
        report.add(labels)

    run_log.start_stage(RunStage.WRITE, len(encoded))
    _write(args.output, lambda stream: write_labels(system_id, encoded, stream), config)
    run_log.log_processed(len(encoded))

    run_log.set_value("sentences_encoded", len(encoded))
    _log_handled_errors(run_log, handler)
    run_log.set_value("transition_labels", report.transition_vocab_size)
    run_log.set_value("deprel_labels", report.deprel_vocab_size)
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_decode(args, config: Dict) -> int:
    """Decode a label file into CoNLL-U."""
    handler, jobs = _error_handler(args, config)
    run_log = RunLogger(logger)
    run_log.start_command("decode", args.system.value)

    run_log.start_stage(RunStage.READ)
    system_id, sentences = _read_label_file(args.input, config, expected_system=args.system)
    run_log.log_processed(len(sentences))

    run_log.start_stage(RunStage.DECODE, len(sentences))
    decoded, _ = handler.run_per_sentence("decode", partial(_decode_sentence, system_id), sentences, jobs)
    trees, stats = _checked_trees(decoded)
    run_log.log_processed(len(trees))
    _log_repairs(run_log, stats)

    run_log.start_stage(RunStage.WRITE, len(trees))
    _write(args.output, lambda stream: write_conllu(trees, stream), config)
    run_log.log_processed(len(trees))

    run_log.set_value("sentences_decoded", len(trees))
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_verify(args, config: Dict) -> int:
    """Check oracle computations against the left-to-right conditions."""
    handler, jobs = _error_handler(args, config)
    run_log = RunLogger(logger)
    run_log.start_command("verify", _systems_label(args.system))

    run_log.start_stage(RunStage.READ)
    trees = _read_treebank(args.input, config, run_log)
    run_log.log_processed(len(trees))

    lines = [f"{'system':<14}{'sentences':>10}{'skipped':>9}{'condition1':>12}{'min k':>7}{'k':>4}  status"]
    failed = False
    for system_id in args.system:
        system = get_system(system_id)
        run_log.start_stage(RunStage.VERIFY, len(trees))
        reports, skipped = handler.run_per_sentence(
            f"verify {system_id.value}", partial(_verify_sentence, system_id), trees, jobs
        )
        verified = [(idx, r) for idx, r in enumerate(reports, start=1) if r is not None]
        run_log.log_processed(len(verified))
        run_log.log_skipped(skipped)

        condition1 = sum(1 for _, r in verified if r.condition1)
        minimal_k = max((r.minimal_k for _, r in verified), default=0)
        for idx, r in verified:
            if not r.passed:
                run_log.add_error(f"{system_id.value} sentence {trees[idx - 1].sentence_id or idx}: {'; '.join(r.issues)}")

        rate = 100.0 * condition1 / len(verified) if verified else 100.0
        ok = condition1 == len(verified) and minimal_k <= system.k
        failed = failed or not ok
        lines.append(
            f"{system_id.value:<14}{len(verified):>10,}{skipped:>9,}{rate:>11.2f}%{minimal_k:>7}{system.k:>4}  "
            f"{'PASS' if ok else 'FAIL'}"
        )
        run_log.set_value(f"{system_id.value}_minimal_k", minimal_k)
        run_log.set_value(f"{system_id.value}_condition1_pct", rate)

    _write(args.output, lambda stream: stream.write("\n".join(lines) + "\n"), config)
    _log_handled_errors(run_log, handler)
    run_log.end_command()
    if failed:
        raise InvariantViolation("left-to-right conditions failed; see the report")
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_stats(args, config: Dict) -> int:
    """Label-vocabulary statistics, one row per transition system."""
    handler, jobs = _error_handler(args, config)
    run_log = RunLogger(logger)
    run_log.start_command("stats", _systems_label(args.system))

    run_log.start_stage(RunStage.READ)
    trees = _read_treebank(args.input, config, run_log)
    run_log.log_processed(len(trees))

    lines = [
        f"{'system':<14}{'transition':>11}{'deprel':>8}{'sentences':>11}{'skipped':>9}"
        f"{'trans/sent':>12}  longest label"
    ]
    for system_id in args.system:
        run_log.start_stage(RunStage.STATS, len(trees))
        results, skipped = handler.run_per_sentence(
            f"stats {system_id.value}", partial(encode, system_id), trees, jobs
        )
        report = VocabReport(system=system_id, skipped=skipped)
        for labels in results:
            if labels is not None:
                report.add(labels)
        run_log.log_processed(report.sentences)
        run_log.log_skipped(skipped)

        lines.append(
            f"{system_id.value:<14}{report.transition_vocab_size:>11,}{report.deprel_vocab_size:>8,}"
            f"{report.sentences:>11,}{skipped:>9,}{report.transitions_per_sentence:>12.2f}  {report.longest_label}"
        )
        run_log.set_value(f"{system_id.value}_transition_labels", report.transition_vocab_size)
        run_log.set_value(f"{system_id.value}_deprel_labels", report.deprel_vocab_size)

    _write(args.output, lambda stream: stream.write("\n".join(lines) + "\n"), config)
    _log_handled_errors(run_log, handler)
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_train(args, config: Dict) -> int:
    """Train the perceptron tagger on an encoded treebank."""
    system_id: SystemId = args.system
    handler, jobs = _error_handler(args, config)
    epochs = _setting(args.epochs, config, "training", "epochs")
    seed = _setting(args.seed, config, "training", "seed")
    use_upos = _setting(args.use_upos, config, "training", "use_upos")

    run_log = RunLogger(logger)
    run_log.start_command("train", system_id.value)

    run_log.start_stage(RunStage.READ)
    trees = _read_treebank(args.input, config, run_log)
    run_log.log_processed(len(trees))

    run_log.start_stage(RunStage.ENCODE, len(trees))
    results, skipped = handler.run_per_sentence("encode", partial(encode, system_id), trees, jobs)
    corpus = [(tree.tokens, labels) for tree, labels in zip(trees, results) if labels is not None]
    run_log.log_processed(len(corpus))
    run_log.log_skipped(skipped)

    run_log.start_stage(RunStage.TRAIN, len(corpus))
    logger.info(f"Training: epochs={epochs} seed={seed} use_upos={use_upos}")
    model = train(corpus, epochs=epochs, seed=seed, use_upos=use_upos)
    run_log.log_processed(len(corpus))

    run_log.start_stage(RunStage.WRITE)
    _write(args.output, lambda stream: save_model(model, stream), config)

    run_log.set_value("training_sentences", len(corpus))
    run_log.set_value("epochs", epochs)
    run_log.set_value("seed", seed)
    run_log.set_value("transition_labels", len(model.perceptrons["transition"].labels))
    run_log.set_value("deprel_labels", len(model.perceptrons["deprel"].labels))
    _log_handled_errors(run_log, handler)
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_predict(args, config: Dict) -> int:
    """Tag a treebank with a trained model; --decode emits trees."""
    handler, jobs = _error_handler(args, config)
    model = load_model(io.StringIO(read_text(args.model, config)))
    run_log = RunLogger(logger)
    run_log.start_command("predict", model.system.value)

    run_log.start_stage(RunStage.READ)
    sentences: List[List[Token]] = read_tokens(io.StringIO(read_text(args.input, config)))
    run_log.log_processed(len(sentences))

    run_log.start_stage(RunStage.PREDICT, len(sentences))
    predicted, _ = handler.run_per_sentence("predict", partial(predict, model), sentences, jobs)
    run_log.log_processed(len(predicted))
    forms = [[t.form for t in tokens] for tokens in sentences]

    if not args.decode:
        run_log.start_stage(RunStage.WRITE, len(predicted))
        _write(args.output, lambda stream: write_labels(model.system, list(zip(forms, predicted)), stream), config)
        run_log.set_value("sentences_tagged", len(predicted))
        run_log.end_command()
        return EXIT_SUCCESS

    run_log.start_stage(RunStage.DECODE, len(predicted))
    decoded, _ = handler.run_per_sentence(
        "decode", partial(_decode_sentence, model.system), list(zip(forms, predicted)), jobs
    )
    trees, stats = _checked_trees(decoded, upos=[[t.upos for t in tokens] for tokens in sentences])
    run_log.log_processed(len(trees))
    _log_repairs(run_log, stats)

    run_log.start_stage(RunStage.WRITE, len(trees))
    _write(args.output, lambda stream: write_conllu(trees, stream), config)
    run_log.set_value("sentences_parsed", len(trees))
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_eval(args, config: Dict) -> int:
    """Score predictions against gold (trees, or label files with --labels)."""
    run_log = RunLogger(logger)
    run_log.start_command("eval")

    run_log.start_stage(RunStage.READ)
    sections = []
    if args.labels:
        gold_system, gold = _read_label_file(args.gold, config)
        pred_system, pred = _read_label_file(args.pred, config)
        if pred_system is not gold_system:
            raise LabelFileError(
                f"prediction is labeled for {pred_system.value}, gold for {gold_system.value}"
            )
        run_log.log_processed(len(gold))
        run_log.start_stage(RunStage.SCORE, len(gold))
        report = label_accuracy(gold, pred)
        sections.append(report.to_text(f"Labels ({gold_system.value})"))
        run_log.set_value("transition_acc", report.transition_accuracy)
        run_log.set_value("deprel_acc", report.deprel_accuracy)
    else:
        gold_trees = _read_treebank(args.gold, config, run_log)
        pred_trees = _read_treebank(args.pred, config, run_log)
        run_log.log_processed(len(gold_trees))
        run_log.start_stage(RunStage.SCORE, len(gold_trees))
        report = score(gold_trees, pred_trees, ignore_punct=args.ignore_punct)
        sections.append(report.to_text("Prediction"))
        run_log.set_value("uas", report.uas)
        run_log.set_value("las", report.las)
        if args.baseline:
            baseline = score(
                gold_trees,
                baseline_attach_previous([tree.n for tree in gold_trees]),
                ignore_punct=args.ignore_punct,
            )
            sections.append(baseline.to_text("Attach-to-previous baseline"))
            run_log.set_value("baseline_uas", baseline.uas)
            run_log.set_value("baseline_las", baseline.las)
    run_log.log_processed(1)

    _write(args.output, lambda stream: stream.write("\n".join(sections)), config)
    run_log.end_command()
    return EXIT_SUCCESS


@with_error_handling(logger)
def cmd_roundtrip(args, config: Dict) -> int:
    """Encode, decode and score a treebank against itself."""
    system_id: SystemId = args.system
    handler, jobs = _error_handler(args, config)
    run_log = RunLogger(logger)
    run_log.start_command("roundtrip", system_id.value)

    run_log.start_stage(RunStage.READ)
    trees = _read_treebank(args.input, config, run_log)
    run_log.log_processed(len(trees))

    run_log.start_stage(RunStage.ENCODE, len(trees))
    results, skipped = handler.run_per_sentence("encode", partial(encode, system_id), trees, jobs)
    kept = [(tree, labels) for tree, labels in zip(trees, results) if labels is not None]
    run_log.log_processed(len(kept))
    run_log.log_skipped(skipped)

    run_log.start_stage(RunStage.DECODE, len(kept))
    decoded, _ = handler.run_per_sentence(
        "decode", partial(_decode_sentence, system_id), [(tree.forms, labels) for tree, labels in kept], jobs
    )
    predicted, stats = _checked_trees(decoded)
    run_log.log_processed(len(predicted))
    _log_repairs(run_log, stats)

    run_log.start_stage(RunStage.SCORE, len(kept))
    gold = [tree for tree, _ in kept]
    report = score(gold, predicted)
    for idx, (g, p) in enumerate(zip(gold, predicted), start=1):
        if g.heads != p.heads or g.deprels != p.deprels:
            run_log.add_error(f"sentence {g.sentence_id or idx} differs after decoding")
    run_log.log_processed(report.sentences)

    _write(args.output, lambda stream: stream.write(report.to_text(f"Round trip ({system_id.value})")), config)
    run_log.set_value("sentences", report.sentences)
    run_log.set_value("uas", report.uas)
    run_log.set_value("las", report.las)
    _log_handled_errors(run_log, handler)
    run_log.end_command()

    if report.head_correct != report.tokens or report.labeled_correct != report.tokens:
        raise InvariantViolation(f"round trip is not the identity: UAS {report.uas:.2f}, LAS {report.las:.2f}")
    return EXIT_SUCCESS


COMMANDS: Dict[str, Callable[..., int]] = {
    "encode": cmd_encode,
    "decode": cmd_decode,
    "verify": cmd_verify,
    "stats": cmd_stats,
    "train": cmd_train,
    "predict": cmd_predict,
    "eval": cmd_eval,
    "roundtrip": cmd_roundtrip,
}


# =============================================================================
# COMMAND LINE INTERFACE
# =============================================================================

class TransLabelArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with EXIT_USAGE."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _system_type(allow_all: bool):
    def parse(value: str):
        if allow_all and value.strip().lower() == "all":
            return list(SystemId)
        try:
            system_id = SystemId.parse(value)
        except ValueError as e:
            raise argparse.ArgumentTypeError(str(e))
        return [system_id] if allow_all else system_id
    return parse


def _positive_int(value: str) -> int:
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {value!r}")
    if number < 1:
        raise argparse.ArgumentTypeError(f"must be at least 1, got {number}")
    return number


def _systems_label(system_ids: Sequence[SystemId]) -> str:
    return "all" if len(system_ids) == len(SystemId) else ",".join(s.value for s in system_ids)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--config",
        default=None,
        help=f"JSON configuration file (default: {DEFAULT_CONFIG} if present)"
    )
    common.add_argument(
        "--on-nonprojective",
        choices=("skip", "fail"),
        default=None,
        help="Projective systems on non-projective trees: skip and count, or fail (default: skip)"
    )
    common.add_argument(
        "--jobs",
        type=_positive_int,
        default=None,
        help="Worker processes for per-sentence work (default: 1)"
    )
    common.add_argument(
        "-o", "--output",
        default="-",
        help="Output location: path, '-' for stdout, or s3://bucket/key (default: -)"
    )

    parser = TransLabelArgumentParser(
        prog="translabel",
        description=(
            "Sequence-labeling encodings of transition-based dependency parsers: "
            "encode treebanks as per-token labels, decode labels into trees, "
            "verify, train a baseline tagger and evaluate."
        )
    )
    subparsers = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add(name: str, help_text: str, system: Optional[str] = "required"):
        sub = subparsers.add_parser(name, parents=[common], help=help_text, description=help_text)
        if system is not None:
            allow_all = system == "all"
            sub.add_argument(
                "--system",
                type=_system_type(allow_all),
                required=True,
                help="arc-standard, arc-eager, arc-hybrid or covington" + (" (or all)" if allow_all else "")
            )
        return sub

    encode_p = add("encode", "Encode a CoNLL-U treebank as a label file")
    encode_p.add_argument("input", nargs="?", default="-", help="CoNLL-U input (default: stdin)")

    decode_p = add("decode", "Decode a label file into CoNLL-U")
    decode_p.add_argument("input", nargs="?", default="-", help="Label file (default: stdin)")

    verify_p = add("verify", "Check oracle computations against the left-to-right conditions", system="all")
    verify_p.add_argument("input", nargs="?", default="-", help="CoNLL-U input (default: stdin)")

    stats_p = add("stats", "Label-vocabulary statistics", system="all")
    stats_p.add_argument("input", nargs="?", default="-", help="CoNLL-U input (default: stdin)")

    train_p = add("train", "Train the perceptron tagger on a CoNLL-U treebank")
    train_p.add_argument("input", help="CoNLL-U training treebank")
    train_p.add_argument("--epochs", type=_positive_int, default=None, help="Training epochs (default: 5)")
    train_p.add_argument("--seed", type=int, default=None, help="Shuffling seed (default: 1)")
    train_p.add_argument(
        "--no-upos",
        dest="use_upos",
        action="store_const",
        const=False,
        default=None,
        help="Do not use UPOS features"
    )

    predict_p = add("predict", "Predict labels for a CoNLL-U file with a trained model", system=None)
    predict_p.add_argument("input", help="CoNLL-U input (HEAD/DEPREL may be '_')")
    predict_p.add_argument("--model", required=True, help="Model file written by train")
    predict_p.add_argument("--decode", action="store_true", help="Decode predictions and emit CoNLL-U")

    eval_p = add("eval", "Score predicted trees (or labels) against gold", system=None)
    eval_p.add_argument("gold", help="Gold CoNLL-U (or label file with --labels)")
    eval_p.add_argument("pred", help="Predicted CoNLL-U (or label file with --labels)")
    eval_p.add_argument("--labels", action="store_true", help="Compare label files (transition/deprel accuracy)")
    eval_p.add_argument("--ignore-punct", action="store_true", help="Leave out tokens with gold UPOS PUNCT")
    eval_p.add_argument("--baseline", action="store_true", help="Also score the attach-to-previous baseline")

    roundtrip_p = add("roundtrip", "Encode, decode and score a treebank against itself")
    roundtrip_p.add_argument("input", nargs="?", default="-", help="CoNLL-U input (default: stdin)")

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    config = load_config_file(args.config or DEFAULT_CONFIG, required=args.config is not None)
    if config is None:
        return EXIT_USAGE
    level = config.get("logging", {}).get("level")
    if level and not os.getenv("TRANSLABEL_LOG"):
        setup_logging(level)

    if getattr(args, "labels", False) and getattr(args, "baseline", False):
        logger.warning("--baseline has no effect with --labels")

    return COMMANDS[args.command](args, config)


if __name__ == "__main__":
    sys.exit(main())
