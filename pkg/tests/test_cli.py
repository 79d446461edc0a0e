import subprocess
import sys
from pathlib import Path

import pytest

from nonreduced.algebra import ParseError
from nonreduced.cli import bundled_problem, flatten, main, parse_problem, render_machine, run

EXAMPLES = Path(__file__).resolve().parents[1] / "examples"


def invoke(capsys, *args):
    code = main(list(args))
    out, err = capsys.readouterr()
    return code, out, err


# -- parsing ---------------------------------------------------------


def test_parse_bundled_examples():
    s71 = parse_problem(bundled_problem("ex71"))
    assert (s71.ring.n, s71.ring.kappa, len(s71.generators)) == (2, 2, 3)
    s72 = parse_problem(bundled_problem("ex72"))
    assert len(s72.generators) == 4 and "z1*w2 - z2*w1" in s72.generators
    s31 = parse_problem(bundled_problem("ex31"))
    assert s31.degrees == [1]


def test_bundled_match_examples_dir():
    for name in ("ex31", "ex71", "ex72"):
        assert bundled_problem(name) == (EXAMPLES / f"{name}.prob").read_text()


def test_parse_options_comments_and_continuation():
    spec = parse_problem(
        "# header\n"
        "ring z1 z2 ; nil w1 w2   # coordinates\n"
        "ideal: w1^2, w1*w2,\n"
        "       w2^2\n"
        "option p = 0, 2\n"
        "option seed = 7\n"
        "option format = machine\n"
    )
    assert spec.generators == ["w1^2", "w1*w2", "w2^2"]
    assert spec.degrees == [0, 2]
    assert spec.options["seed"] == 7 and spec.options["format"] == "machine"


@pytest.mark.parametrize("name", ["ex31", "ex71", "ex72"])
def test_render_round_trip(name):
    spec = parse_problem(bundled_problem(name))
    assert parse_problem(spec.render()) == spec


@pytest.mark.parametrize("text,message,pos", [
    ("ideal: x\n", "ring declaration required", (1, 1)),
    ("ring z ; nil w\nideal:\n", "empty ideal", (2, 1)),
    ("ring z ; nil w\n", "empty ideal", (1, 1)),
    ("ring z1 z2 ; nil w1 w2\nideal: w1^2, q\n", "unknown variable", (2, 14)),
    ("ring z ; nil w\nideal: w^x\n", "malformed exponent", (2, None)),
    ("ring z ; nil w\nideal: w\noption colour = 3\n", "unknown option", (3, None)),
    ("ring z ; nil w\nideal: w\noption p = one\n", "integer", (3, None)),
    ("ring z w\nideal: w\n", "ring declaration", (1, 1)),
    ("ring z ; nil w\nideal: w\nhello\n", "unrecognized line", (3, 1)),
])
def test_parse_errors(text, message, pos):
    with pytest.raises(ParseError, match=message) as exc:
        parse_problem(text)
    line, col = pos
    assert exc.value.line == line
    if col is not None:
        assert exc.value.col == col


# -- output ----------------------------------------------------------


def test_machine_format_sorted():
    tree = {"b": {"y": [1, 2], "x": True}, "a": ["u", "v"], 10: 1, 2: 0}
    lines = render_machine(tree).splitlines()
    assert lines == ["2 = 0", "10 = 1", "a.0 = u", "a.1 = v", "b.x = true", "b.y = [1, 2]"]
    assert flatten({"e": []}) == [("e", "[]")]


# -- commands --------------------------------------------------------


def test_report_ex71(capsys):
    code, out, _ = invoke(capsys, "--input", "ex71", "--command", "report", "--format", "machine", "--trials", "20")
    assert code == 0
    assert "p0.barlet.count = 3" in out.splitlines()
    assert "p0.pairing.injective = true" in out.splitlines()


def test_verify_ex72(capsys):
    code, out, _ = invoke(capsys, "--input", str(EXAMPLES / "ex72.prob"), "--command", "verify",
                          "--seed", "0", "--trials", "100", "--format", "machine")
    assert code == 0
    assert "p0.passed = true" in out.splitlines()


def test_report_non_pure(tmp_path, capsys):
    f = tmp_path / "np.prob"
    f.write_text("ring z1 ; nil w1 w2\nideal: w1*w2, w1*z1\n")
    code, _, err = invoke(capsys, "--input", str(f), "--command", "report")
    assert code == 2 and "pure dimension required" in err


def test_input_errors_exit_2(tmp_path, capsys):
    f = tmp_path / "bad.prob"
    f.write_text("ring z ; nil w\nideal: w + q\n")
    code, _, err = invoke(capsys, "--input", str(f), "--command", "cm")
    assert code == 2 and "line 2" in err
    assert invoke(capsys, "--input", "missing.prob", "--command", "cm")[0] == 2
    assert invoke(capsys, "--input", "ex71", "--command", "nope")[0] == 2
    assert invoke(capsys, "--input", "ex71", "--command", "cm", "--p", "9")[0] == 2


def test_barlet_needs_coordinate_subspace(capsys):
    code, _, err = invoke(capsys, "--input", "ex31", "--command", "barlet")
    assert code == 2 and "coordinate subspace" in err


def test_ex31_kaehler_torsion(capsys):
    code, out, _ = invoke(capsys, "--input", "ex31", "--command", "strong-forms", "--format", "machine")
    assert code == 0
    assert "p1.torsion.0 = (w)*dz[1]" in out.splitlines()


@pytest.mark.parametrize("command", ["resolve", "ext", "cm", "kaehler", "strong-forms", "barlet",
                                     "noetherian", "pairing"])
def test_every_command_runs(command):
    spec = parse_problem(bundled_problem("ex72"))
    status, tree, err = run(command, spec, [0, 1], trials=5)
    assert not err and set(tree) == {"command", "p0", "p1"}
    # consistent verdicts exit 0 even though this ideal is not Cohen-Macaulay
    assert status == 0


def test_verification_failure_exit_1(monkeypatch):
    import nonreduced.cli as cli

    spec = parse_problem(bundled_problem("ex71"))
    monkeypatch.setitem(cli.HANDLERS, "cm", lambda J, p, opts: ({"consistent": False}, False))
    assert run("cm", spec)[0] == 1


def test_machine_output_deterministic(capsys):
    args = ("--input", "ex72", "--command", "noetherian", "--p", "1", "--format", "machine")
    a = invoke(capsys, *args)
    b = invoke(capsys, *args)
    assert a == b and a[0] == 0


def test_human_format(capsys):
    code, out, _ = invoke(capsys, "--input", "ex71", "--command", "cm")
    assert code == 0 and "p0:" in out and "cm: true" in out


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "nonreduced.cli", "--input", "ex71", "--command", "barlet",
                           "--format", "machine"], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 0
    assert "p0.count = 3" in proc.stdout.splitlines()
