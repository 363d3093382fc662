"""
End-to-end tests of the translabel command line.
"""

import io
import json

import pytest

from conftest import FIGURE1_FORMS, FIGURE1_ROWS
from error_handler import EXIT_DATA_ERROR, EXIT_SUCCESS, EXIT_USAGE
from labeling import read_labels
from systems import SystemId
from translabel import build_parser, load_config_file, main
from tree_validator import validate_decoded
from treebank_io import read_conllu


@pytest.fixture(autouse=True)
def workdir(tmp_path, monkeypatch):
    """Run every command from an empty directory without translabel.json."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.delenv("TRANSLABEL_LOG", raising=False)
    return tmp_path


@pytest.fixture
def figure1_file(workdir, figure1_conllu):
    path = workdir / "figure1.conllu"
    path.write_text(figure1_conllu, encoding="utf-8")
    return str(path)


@pytest.fixture
def mixed_file(workdir, figure1_conllu, nonprojective_conllu):
    path = workdir / "mixed.conllu"
    path.write_text(figure1_conllu + nonprojective_conllu + figure1_conllu, encoding="utf-8")
    return str(path)


def _read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


def _labels_of(path):
    return read_labels(io.StringIO(_read(path)))


# =============================================================================
# ENCODE / DECODE
# =============================================================================

def test_encode_figure1(figure1_file, workdir):
    out = str(workdir / "figure1.labels")
    assert main(["encode", "--system", "arc-eager", figure1_file, "-o", out]) == EXIT_SUCCESS

    text = _read(out)
    assert text.startswith("# system = arc-eager\nKyrie\tSH-LA\tnsubj\n")
    system_id, ((forms, labels),) = _labels_of(out)
    assert system_id is SystemId.ARC_EAGER
    assert forms == FIGURE1_FORMS
    assert " | ".join(labels.transition_labels) == FIGURE1_ROWS[SystemId.ARC_EAGER]


def test_encode_to_stdout_and_summary_to_stderr(figure1_file, capsys):
    assert main(["encode", "--system", "covington", figure1_file]) == EXIT_SUCCESS

    captured = capsys.readouterr()
    assert captured.out.startswith("# system = covington\n")
    assert "command=encode system=covington sentences_encoded=1" in captured.err


def test_nonprojective_sentences_are_skipped(mixed_file, workdir, capsys):
    out = str(workdir / "mixed.labels")
    assert main(["encode", "--system", "arc-standard", mixed_file, "-o", out]) == EXIT_SUCCESS

    _, sentences = _labels_of(out)
    assert len(sentences) == 2
    assert "skipped_nonprojective=1" in capsys.readouterr().err


def test_nonprojective_fail_policy(mixed_file, workdir):
    out = str(workdir / "mixed.labels")
    argv = ["encode", "--system", "arc-hybrid", mixed_file, "-o", out, "--on-nonprojective", "fail"]
    assert main(argv) == EXIT_DATA_ERROR


def test_covington_encodes_everything(mixed_file, workdir):
    out = str(workdir / "mixed.labels")
    assert main(["encode", "--system", "covington", mixed_file, "-o", out]) == EXIT_SUCCESS
    assert len(_labels_of(out)[1]) == 3


def test_encode_then_decode_reproduces_the_trees(figure1_file, workdir):
    labels = str(workdir / "figure1.labels")
    decoded = str(workdir / "decoded.conllu")
    assert main(["encode", "--system", "arc-hybrid", figure1_file, "-o", labels]) == EXIT_SUCCESS
    assert main(["decode", "--system", "arc-hybrid", labels, "-o", decoded]) == EXIT_SUCCESS

    (gold,) = read_conllu(io.StringIO(_read(figure1_file)))
    (tree,) = read_conllu(io.StringIO(_read(decoded)))
    assert tree.heads == gold.heads
    assert tree.deprels == gold.deprels


def test_decode_rejects_another_systems_labels(figure1_file, workdir):
    labels = str(workdir / "figure1.labels")
    assert main(["encode", "--system", "arc-eager", figure1_file, "-o", labels]) == EXIT_SUCCESS
    assert main(["decode", "--system", "arc-standard", labels]) == EXIT_DATA_ERROR


def test_corrupted_labels_still_decode_to_trees(workdir, capsys):
    labels = workdir / "corrupt.labels"
    labels.write_text(
        "# system = arc-standard\n"
        "Hello\tLA-??\tnsubj\n"
        "big\tQQ\troot\n"
        "world\tSH-RA-RA-RA-RA\tobj\n\n",
        encoding="utf-8",
    )
    out = str(workdir / "out.conllu")

    assert main(["decode", "--system", "arc-standard", str(labels), "-o", out]) == EXIT_SUCCESS

    (tree,) = read_conllu(io.StringIO(_read(out)))
    assert tree.forms == ("Hello", "big", "world")
    assert validate_decoded(tree.heads)[0]
    assert "unknown_skipped=2" in capsys.readouterr().err


# =============================================================================
# VERIFY / STATS / ROUNDTRIP
# =============================================================================

def test_verify_all_systems(mixed_file, workdir, capsys):
    out = str(workdir / "verify.txt")
    assert main(["verify", "--system", "all", mixed_file, "-o", out]) == EXIT_SUCCESS

    rows = _read(out).splitlines()
    assert rows[0].startswith("system")
    assert len(rows) == 5
    assert all(row.endswith("PASS") for row in rows[1:])
    assert rows[1].split()[:3] == ["arc-standard", "2", "1"]
    assert rows[4].split()[:3] == ["covington", "3", "0"]
    # one crossing sentence per projective system
    assert "skipped_nonprojective=3" in capsys.readouterr().err


def test_stats_all_systems(figure1_file, workdir):
    out = str(workdir / "stats.txt")
    assert main(["stats", "--system", "all", figure1_file, "-o", out]) == EXIT_SUCCESS

    rows = {row.split()[0]: row.split() for row in _read(out).splitlines()[1:]}
    assert rows["arc-standard"][1:3] == ["5", "8"]
    assert rows["arc-eager"][1:3] == ["6", "8"]
    assert rows["arc-hybrid"][1:3] == ["5", "8"]
    assert rows["covington"][1:3] == ["4", "8"]
    assert rows["arc-standard"][-1] == "SH-LA-RA-RA-RA"


def test_multi_rooted_input_is_a_warning(workdir, capsys):
    path = workdir / "two_roots.conllu"
    path.write_text(
        "1\ta\t_\tX\t_\t_\t0\troot\t_\t_\n2\tb\t_\tX\t_\t_\t0\troot\t_\t_\n\n", encoding="utf-8"
    )
    assert main(["eval", str(path), str(path)]) == EXIT_SUCCESS

    err = capsys.readouterr().err
    assert "1 of 1 sentences have several tokens headed by 0" in err
    assert "status=warning" in err


def test_roundtrip(mixed_file, workdir):
    out = str(workdir / "roundtrip.txt")
    assert main(["roundtrip", "--system", "arc-eager", mixed_file, "-o", out]) == EXIT_SUCCESS

    report = _read(out)
    assert report.startswith("Round trip (arc-eager)\n")
    assert "100.00" in report


def test_worker_pool_output_matches_sequential(mixed_file, workdir):
    sequential = str(workdir / "one.labels")
    pooled = str(workdir / "two.labels")
    assert main(["encode", "--system", "covington", mixed_file, "-o", sequential]) == EXIT_SUCCESS
    assert main(["encode", "--system", "covington", mixed_file, "-o", pooled, "--jobs", "2"]) == EXIT_SUCCESS
    assert _read(pooled) == _read(sequential)


# =============================================================================
# TRAIN / PREDICT / EVAL
# =============================================================================

@pytest.fixture
def training_file(workdir, figure1_conllu):
    path = workdir / "train.conllu"
    path.write_text(figure1_conllu * 20, encoding="utf-8")
    return str(path)


def test_train_predict_and_evaluate(training_file, figure1_file, workdir, capsys):
    model = str(workdir / "arc-eager.model")
    parsed = str(workdir / "parsed.conllu")
    report = str(workdir / "eval.txt")

    assert main(["train", "--system", "arc-eager", training_file, "--epochs", "3", "-o", model]) == EXIT_SUCCESS
    assert main(["predict", figure1_file, "--model", model, "--decode", "-o", parsed]) == EXIT_SUCCESS

    (tree,) = read_conllu(io.StringIO(_read(parsed)))
    assert validate_decoded(tree.heads)[0]
    assert tree.upos == ("X",) * 10

    assert main(["eval", figure1_file, parsed, "--baseline", "-o", report]) == EXIT_SUCCESS
    text = _read(report)
    assert "Prediction" in text
    assert "Attach-to-previous baseline" in text
    assert "baseline_uas=0.00" in capsys.readouterr().err


def test_training_is_reproducible(training_file, workdir):
    first = str(workdir / "first.model")
    second = str(workdir / "second.model")
    argv = ["train", "--system", "arc-hybrid", training_file, "--epochs", "2", "--seed", "9", "--no-upos"]

    assert main(argv + ["-o", first]) == EXIT_SUCCESS
    assert main(argv + ["-o", second]) == EXIT_SUCCESS
    assert _read(first) == _read(second)
    assert "# use_upos = false\n" in _read(first)


def test_predict_labels_and_label_accuracy(training_file, figure1_file, workdir):
    model = str(workdir / "model")
    predicted = str(workdir / "predicted.labels")
    gold = str(workdir / "gold.labels")
    report = str(workdir / "eval.txt")

    assert main(["train", "--system", "covington", training_file, "-o", model]) == EXIT_SUCCESS
    assert main(["predict", figure1_file, "--model", model, "-o", predicted]) == EXIT_SUCCESS
    assert main(["encode", "--system", "covington", figure1_file, "-o", gold]) == EXIT_SUCCESS

    system_id, sentences = _labels_of(predicted)
    assert system_id is SystemId.COVINGTON
    assert len(sentences[0][1]) == 10

    assert main(["eval", "--labels", gold, gold, "-o", report]) == EXIT_SUCCESS
    assert "Transition acc : 100.00" in _read(report)


def test_label_eval_needs_matching_systems(figure1_file, workdir):
    eager = str(workdir / "eager.labels")
    hybrid = str(workdir / "hybrid.labels")
    assert main(["encode", "--system", "arc-eager", figure1_file, "-o", eager]) == EXIT_SUCCESS
    assert main(["encode", "--system", "arc-hybrid", figure1_file, "-o", hybrid]) == EXIT_SUCCESS
    assert main(["eval", "--labels", eager, hybrid]) == EXIT_DATA_ERROR


def test_eval_misaligned_treebanks(figure1_file, mixed_file):
    assert main(["eval", figure1_file, mixed_file]) == EXIT_DATA_ERROR


# =============================================================================
# USAGE AND CONFIGURATION
# =============================================================================

@pytest.mark.parametrize("argv", [
    [],
    ["encode"],
    ["encode", "--system", "swap"],
    ["verify", "--system", "arc-eager", "--jobs", "0"],
    ["train", "--system", "arc-eager"],
    ["frobnicate"],
])
def test_usage_errors(argv):
    assert main(argv) == EXIT_USAGE


def test_system_all_only_where_allowed():
    parser = build_parser()
    assert parser.parse_args(["stats", "--system", "all"]).system == list(SystemId)
    assert parser.parse_args(["stats", "--system", "covington"]).system == [SystemId.COVINGTON]
    assert main(["encode", "--system", "all"]) == EXIT_USAGE


def test_missing_input_is_a_data_error(workdir):
    assert main(["encode", "--system", "arc-eager", str(workdir / "absent.conllu")]) == EXIT_DATA_ERROR


def test_config_file_sets_defaults_and_flags_override(mixed_file, workdir):
    (workdir / "translabel.json").write_text(json.dumps({"run": {"on_nonprojective": "fail"}}))
    out = str(workdir / "out.labels")

    assert main(["encode", "--system", "arc-eager", mixed_file, "-o", out]) == EXIT_DATA_ERROR
    argv = ["encode", "--system", "arc-eager", mixed_file, "-o", out, "--on-nonprojective", "skip"]
    assert main(argv) == EXIT_SUCCESS


def test_invalid_config_is_a_usage_error(figure1_file, workdir):
    config = workdir / "bad.json"
    config.write_text(json.dumps({"run": {"jobs": 0}}))
    assert main(["encode", "--system", "arc-eager", figure1_file, "--config", str(config)]) == EXIT_USAGE
    assert main(["encode", "--system", "arc-eager", figure1_file, "--config", "absent.json"]) == EXIT_USAGE


def test_load_config_file(workdir):
    assert load_config_file("translabel.json") == {}
    assert load_config_file("translabel.json", required=True) is None

    (workdir / "broken.json").write_text("{not json")
    assert load_config_file("broken.json") is None

    (workdir / "ok.json").write_text(json.dumps({"training": {"epochs": 2, "seed": 4}}))
    assert load_config_file("ok.json") == {"training": {"epochs": 2, "seed": 4}}
