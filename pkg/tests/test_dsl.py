import random

import pytest
from hypothesis import given

from conftest import random_module, seeds
from secwgt.dsl import DSLError, Declarations, dump, example_path, load_example, parse, parse_file
from secwgt.modules import validate_module

CP = """\
# [PAPER: CP^2]
MODULE CP2 MAXDEG 4
  GEN 1 0
  GEN b 2
  GEN b2 4
  UNIT 1
  SQ 2 b = b2
  MUL b b = b2
END
"""


def test_empty_file():
    d = parse("", "empty.a2")
    assert d.counts() == (0, 0, 0) and len(d) == 0
    assert parse("# only a comment\n\n").counts() == (0, 0, 0)


def test_sq_entry_and_provenance():
    d = parse(CP)
    m = d.module("CP2")
    assert m.apply(2, 2, 1) == 1
    assert m.is_algebra and validate_module(m).ok
    assert d.provenance() == ["CP2: [PAPER: CP^2]"]


@pytest.mark.parametrize("name, counts", [("twistor", (6, 5, 1)), ("twocell", (7, 5, 1))])
def test_shipped_files(name, counts):
    d = load_example(name)
    assert d.counts() == counts
    assert d.provenance()


@pytest.mark.parametrize("name", ["twistor", "twocell"])
def test_round_trip_shipped(name):
    d = load_example(name)
    text = dump(d)
    again = parse(text, name)
    assert again.structure() == d.structure()
    assert dump(again) == text
    assert parse_file(example_path(name)).structure() == d.structure()


@given(seeds)
def test_round_trip_random_modules(seed):
    m = random_module(random.Random(seed))
    d = Declarations(modules={"R": m}, order=[("MODULE", "R")])
    again = parse(dump(d))
    assert again.module("R") == m


@pytest.mark.parametrize("text, line, fragment", [
    ("FOO x\n", 1, "expected MODULE"),
    ("MODULE M MAXDEG 2\n GEN a 1\n", 1, "missing END"),
    ("MODULE M MAXDEG 2\n GEN a 1\n SQ 1 a = b\nEND\n", 3, "unknown label"),
    ("MODULE M MAXDEG 2\n GEN a 1\n GEN a 2\nEND\n", 3, "duplicate label"),
    ("MODULE M MAXDEG 2\n GEN a 1\nEND\nMODULE M MAXDEG 2\nEND\n", 4, "duplicate declaration"),
    ("MODULE M MAXDEG 2\n GEN a 1\n GEN b 2\n SQ 1 a = a\nEND\n", 4, "expected 2"),
    ("MODULE M MAXDEG 2\n GEN a 3\nEND\n", 2, "exceeds MAXDEG"),
    ("MODULE M MAXDEG 2\n GEN a 1\n GEN b 2\n SQ 1 a = b +\nEND\n", 4, "dangling"),
    ("MODULE M MAXDEG 2\n GEN a 1\n GEN b 2\n AMBIG SQ 1 a IN { b }\nEND\n", 4, "two alternatives"),
    ("MAP f FROM A TO B SHIFT 0\nEND\n", 1, "unknown module"),
    ("MODULE M MAXDEG 1\n GEN a 1\nEND\nMAP f FROM M TO M SHIFT 0\n a -> z\nEND\n", 5, "unknown label"),
    ("MODULE M MAXDEG 1\n GEN a 1\n FROB\nEND\n", 3, "unknown statement"),
])
def test_positioned_errors(text, line, fragment):
    with pytest.raises(DSLError) as e:
        parse(text, "t.a2")
    assert e.value.line == line
    assert fragment in e.value.msg
    assert str(e.value).startswith(f"t.a2:{line}:")


def test_unspecified_entries_reported():
    d = parse("MODULE M MAXDEG 3\n GEN a 1\n GEN b 2\n GEN c 3\n SQ 1 b = c\nEND\n")
    rep = validate_module(d.module("M"))
    assert any(i.kind == "unspecified" and "Sq1(a)" in i.message for i in rep.issues)
    assert not any("Sq2(a)" in i.message for i in rep.issues)   # unstable, implicitly zero


def test_ambiguity_and_suspension():
    d = load_example("twistor")
    e1, se1 = d.module("E1"), d.module("SE1")
    assert e1.slot_keys == se1.slot_keys
    assert len(e1.resolutions()) == 4


def test_unknown_example():
    with pytest.raises(FileNotFoundError):
        load_example("nope")
