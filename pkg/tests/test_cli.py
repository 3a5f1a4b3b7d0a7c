import io
import sys
from pathlib import Path

import pytest

from qsummary.cli import main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
DATA = HERE / "data"

CASES = {
    "summarize_file": ["summarize", str(DATA / "small.txt"), "--epsilon", "0.1",
                       "--query", "0,0.25,0.5,0.75,1", "--stats"],
    "summarize_gen": ["summarize", "--gen", "random:uniform-100:7:3000", "--epsilon", "0.05",
                      "--query", "0.5,0.9", "--verify"],
    "summarize_smooth": ["summarize", "--gen", "sawtooth:unit:1:5000", "--algo", "gk",
                               "--smooth", "--stats=10", "--query", "0.1,0.5"],
    "bench": ["bench", "--n", "1000,4000", "--epsilon", "0.1", "--order", "random,sorted",
              "--algo", "gk,greedy", "--seed", "1"],
    "verify": ["verify", "--epsilon", "0.1", "--gen", "random:unit:3:1500"],
}


def run(argv):
    out = io.StringIO()
    code = main(argv, out=out)
    return code, out.getvalue()


def mask_timing(text):
    rows = []
    for line in text.splitlines():
        cells = line.split(",")
        if len(cells) == 8 and cells[0] != "algorithm":
            cells[6:] = ["*", "*"]
        rows.append(",".join(cells))
    return "\n".join(rows) + "\n"


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden_output(name):
    code, text = run(CASES[name])
    assert code == 0
    if name == "bench":
        text = mask_timing(text)
    assert text == (GOLDEN / f"{name}.txt").read_text()


def test_bench_sizes_deterministic():
    a = mask_timing(run(CASES["bench"])[1])
    b = mask_timing(run(CASES["bench"])[1])
    assert a == b


def test_reads_standard_input(monkeypatch):
    monkeypatch.setattr(sys, "stdin", io.StringIO("5\n7,2\n1\n"))
    code, text = run(["summarize", "--epsilon", "0.25", "--query", "0.5"])
    assert code == 0
    assert "total_weight=4" in text and text.endswith("0.5,1,1,1\n")


def test_empty_query_list_prints_only_summary():
    code, text = run(["summarize", "--gen", "random:unit:1:100"])
    assert code == 0 and "phi," not in text


def test_malformed_line_reports_line_number(capsys):
    code, _ = run(["summarize", str(DATA / "bad_line17.txt")])
    assert code == 1
    assert "line 17" in capsys.readouterr().err


def test_unit_weight_algorithm_rejects_weighted_line(capsys):
    code, _ = run(["summarize", "--algo", "greedy", str(DATA / "small.txt")])
    assert code == 1 and "line 3" in capsys.readouterr().err


def test_missing_file_is_input_error():
    assert run(["summarize", str(DATA / "nope.txt")])[0] == 1


@pytest.mark.parametrize("argv", [
    ["verify", "--epsilon", "1.5"],
    ["summarize", "--epsilon", "0", "--gen", "random:unit:1:10"],
    ["summarize", "--algo", "tdigest", "--gen", "random:unit:1:10"],
    ["summarize", "--query", "1.2", "--gen", "random:unit:1:10"],
    ["summarize", "--gen", "random:unit:1"],
    ["summarize", "--algo", "gk", "--gen", "random:uniform-9:1:10"],
    ["summarize", "--schedule", "every", "--smooth", "--gen", "random:unit:1:10"],
    ["summarize", "--stats=0", "--gen", "random:unit:1:10"],
    ["bench", "--order", "spiral"],
])
def test_config_errors(argv):
    assert run(argv)[0] == 2


def test_argparse_errors_are_config_errors():
    with pytest.raises(SystemExit) as exc:
        run(["summarize", "--schedule", "sometimes"])
    assert exc.value.code == 2


def test_corrupted_delta_fails_verification(capsys):
    code, text = run(["verify", "--epsilon", "0.1", "--algo", "gk", "--corrupt-delta", "500"])
    assert code == 3
    assert "gk,paper,rank-gap-invariant,FAIL" in text
    assert "rank-gap-invariant" in capsys.readouterr().err


def test_verify_all_algorithms_default_matrix():
    code, text = run(["verify", "--epsilon", "0.05"])
    assert code == 0 and "FAIL" not in text
