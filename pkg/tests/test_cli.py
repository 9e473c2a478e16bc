import io
import re
import shlex
import subprocess
from pathlib import Path

import pytest

from mpx.cli import load_workspace, parse_word, run
from mpx.errors import InputError

from conftest import DEMO

README = Path(__file__).resolve().parent.parent / "README.md"


def readme_examples():
    """(argv, expected output) for every ``$ mpx`` line in the README's console blocks."""
    cases = []
    for block in re.findall(r"```console\n(.*?)```", README.read_text(encoding="utf-8"), re.S):
        for chunk in re.split(r"^\$ ", block, flags=re.M)[1:]:
            command, _, output = chunk.partition("\n")
            cases.append((shlex.split(command)[1:], output))
    return cases


GOLDEN = readme_examples()


def invoke(argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(argv, out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def in_demo(monkeypatch):
    monkeypatch.chdir(DEMO)


def test_readme_has_examples():
    assert len(GOLDEN) >= 12


@pytest.mark.parametrize("argv, expected", GOLDEN, ids=[" ".join(a) for a, _ in GOLDEN])
def test_golden(in_demo, argv, expected):
    first = invoke(argv)
    assert first[1] + first[2] == expected
    assert invoke(argv) == first
    assert first[0] == (2 if "No such file" in expected else 3 if "cap-exceeded" in expected else 0)


def test_entry_point():
    proc = subprocess.run(["mpx", "maxvalue", "-a", "automata", "-e", "min_inf.expr"],
                          cwd=DEMO, capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout == "result 1/2\npiece 0\nscc 0\n"


def test_load_workspace_demo():
    ws = load_workspace(DEMO / "automata", [str(DEMO / "min_inf.expr")])
    assert sorted(ws.automata) == ["A1", "A2", "A3", "Z"]
    assert str(ws.expressions[str(DEMO / "min_inf.expr")]) == "min(inf(A1), inf(A2))"


AUT = "automaton {name}\nalphabet a b\nstates q\ninitial q\ntrans q a q 1\n{b}"


def write(directory, filename, name, b="trans q b q 0\n"):
    path = directory / filename
    path.write_text(AUT.format(name=name, b=b), encoding="utf-8")
    return path


def test_two_automata(tmp_path):
    write(tmp_path, "x.aut", "A1")
    write(tmp_path, "y.aut", "A2")
    assert len(load_workspace(tmp_path).automata) == 2


def test_duplicate_names(tmp_path):
    p1 = write(tmp_path, "x.aut", "A1")
    p2 = write(tmp_path, "y.aut", "A1")
    with pytest.raises(InputError) as info:
        load_workspace(tmp_path)
    assert str(p1) in str(info.value) and str(p2) in str(info.value)


def test_missing_transition(tmp_path):
    write(tmp_path, "x.aut", "A1", b="")
    with pytest.raises(InputError, match=r"missing transition for \(q, b\)"):
        load_workspace(tmp_path)


def test_problems_are_aggregated(tmp_path):
    write(tmp_path, "x.aut", "A1", b="")
    write(tmp_path, "y.aut", "A2", b="trans q c q 0\n")
    with pytest.raises(InputError) as info:
        load_workspace(tmp_path)
    assert len(str(info.value).splitlines()) >= 2


def test_alphabet_mismatch_exit_code(tmp_path):
    write(tmp_path, "x.aut", "A1")
    (tmp_path / "y.aut").write_text(
        "automaton C\nalphabet c\nstates q\ninitial q\ntrans q c q 0\n", encoding="utf-8")
    expr = tmp_path / "e.expr"
    expr.write_text("min(inf(A1), inf(C))", encoding="utf-8")
    code, out, err = invoke(["maxvalue", "-a", str(tmp_path), "-e", str(expr)])
    assert code == 2 and out == "" and "alphabet-mismatch" in err


def test_syntax_error_reports_position(tmp_path, in_demo):
    expr = tmp_path / "bad.expr"
    expr.write_text("min(inf(A1)", encoding="utf-8")
    code, _, err = invoke(["validate", "-a", "automata", "-e", str(expr)])
    assert code == 2
    assert f"{expr}:1:12:" in err and "end of input" in err


@pytest.mark.parametrize("argv", [
    ["bogus", "-a", "automata"],
    ["empty", "-a", "automata", "-e", "min_inf.expr"],
    ["includes", "-a", "automata", "-e", "e1.expr"],
    ["eval-lasso", "-a", "automata", "-e", "e1.expr", "--v", "abc"],
    ["witness", "-a", "automata", "-e", "e1.expr", "--epsilon", "0"],
    ["maxvalue", "-a", "nowhere", "-e", "e1.expr"],
])
def test_input_errors(in_demo, argv):
    code, out, err = invoke(argv)
    assert code == 2 and out == "" and err.startswith("error: ")


def test_piece_cap_exit_code(in_demo):
    code, _, err = invoke(["distance", "-a", "automata", "-e", "e1.expr", "-e2", "e2.expr", "--piece-cap", "1"])
    assert code == 3 and "piece-cap-exceeded(1)" in err


def test_parse_word():
    assert parse_word("abba", ("a", "b")) == ("a", "b", "b", "a")
    assert parse_word("x y", ("x", "y")) == ("x", "y")
    assert parse_word("", ("a",)) == ()
    with pytest.raises(InputError):
        parse_word("ac", ("a", "b"))
