import json
import subprocess
import sys

import pytest

from secwgt.cli import main, run
from secwgt.dsl import example_path

MIXED = """\
MODULE N MAXDEG 2
  GEN a 1
  GEN b 2
  AMBIG SQ 1 a IN { 0 | b }
END
MODULE M MAXDEG 2
  GEN b 2
END
MAP i FROM M TO N SHIFT 0
  b -> b
END
"""


def cli(*args, stdin=None):
    p = subprocess.run([sys.executable, "-m", "secwgt", *args], input=stdin, capture_output=True, text=True)
    return p.returncode, p.stdout, p.stderr


def test_adem():
    rep = run(["adem", "Sq2 Sq2"])
    assert rep.lines == ["Sq3 Sq1"] and rep.exit_code == 0
    assert run(["adem", "Sq1", "Sq2"]).lines == ["Sq3"]


def test_action_and_dims():
    assert run(["action", "Sq2", "x^3"]).lines == ["x^5"]
    assert run(["action", "Sq2", "b", "--deg", "b=2"]).lines == ["b^2"]
    assert run(["dims", "2,7", "8"]).verdicts["dims"] == [1, 0, 1, 0, 1, 0, 1, 1, 1]


def test_examples_end_with_bounds():
    rep = run(["example", "twistor"])
    assert rep.lines[-1] == "secat ≥ 2" and rep.exit_code == 0
    assert "wgt = 0" in rep.lines
    rep = run(["example", "twocell"])
    assert rep.lines[-1] == "cat ≥ 2" and rep.exit_code == 0


def test_json_is_deterministic():
    a = cli("--json", "example", "twocell")
    b = cli("--json", "example", "twocell")
    assert a == b and a[0] == 0
    doc = json.loads(a[1])
    assert doc["schema"] == 1 and doc["command"] == "example twocell"
    assert doc["provenance"]


def test_lookup_in_shipped_examples():
    rep = run(["retraction", "q"])
    assert rep.verdicts["verdict"] == "UNSAT"
    assert "chain" in rep.payload
    rep = run(["retraction", "q1", "--all-completions"])
    assert len(rep.verdicts["per_resolution"]) == 3


def test_ambiguous_name_needs_file():
    rep = run(["nilker", "jstar"])
    assert rep.exit_code == 1 and "several" in rep.lines[0]
    rep = run(["nilker", "-f", str(example_path("twistor")), "q"])
    assert rep.verdicts == {"nil_ker": 0}


def test_errors_exit_1(tmp_path):
    assert cli("retraction", "nope")[0] == 1
    assert cli("validate", str(tmp_path / "missing.a2"))[0] == 1
    bad = tmp_path / "bad.a2"
    bad.write_text("MODULE M MAXDEG 1\n GEN a 9\nEND\n")
    code, _, err = cli("validate", str(bad))
    assert code == 1 and "bad.a2:2:" in err
    assert cli("adem", "Sq0")[0] == 1


def test_invalid_module_exit_1(tmp_path):
    f = tmp_path / "m.a2"
    f.write_text("MODULE M MAXDEG 2\n GEN a 1\n GEN b 2\n SQ 1 a = b\n ASSERT NONZERO SQ 1 a\nEND\n"
                 "MODULE P MAXDEG 3\n GEN a 1\n GEN c 3\n SQ 2 a = c\nEND\n")
    rep = run(["validate", str(f)])
    assert rep.exit_code == 1
    assert rep.verdicts["declarations"] == {"M": True, "P": False}


def test_stdin_and_mixed_verdict():
    code, out, _ = cli("validate", "-", stdin=MIXED)
    assert code == 0, out
    code, out, _ = cli("retraction", "-f", "-", "i", stdin=MIXED)
    assert code == 2
    assert "MIXED" in out


def test_inconclusive_delta_exit_2():
    rep = run(["delta", "twistor", "U"])
    assert rep.exit_code == 2
    assert rep.verdicts["per_resolution"][0]["phi"] == "INCONCLUSIVE"


def test_certify_command():
    rep = run(["certify", "twistor", "bU", "--base", "HP2", "--via", "q1", "--target", "a2"])
    assert rep.exit_code == 0 and rep.lines[-1] == "Swgt ≥ 2, secat ≥ 2"
    assert rep.verdicts["replay_ok"]


def test_main_writes_stdout(capsys):
    assert main(["adem", "Sq2", "Sq2"]) == 0
    assert capsys.readouterr().out == "Sq3 Sq1\n"
    for argv in (["--json", "adem", "Sq2", "Sq2"], ["adem", "Sq2", "Sq2", "--json"]):
        assert main(argv) == 0
        assert json.loads(capsys.readouterr().out)["verdicts"]["normal_form"] == "Sq3 Sq1"


def test_unknown_command():
    with pytest.raises(SystemExit):
        run(["frobnicate"])
