"""Parser and serializer for ``.a2`` files.

The format is line oriented; ``#`` starts a comment.  Comments of the form
``# [TAG: ...]`` with TAG one of PAPER, ASSERTED, DERIVED are provenance notes:
they attach to the enclosing declaration (or, at top level, to the next one)
and are echoed into reports.

    MODULE name MAXDEG D
      GEN label degree
      UNIT label
      SQ k label = 0 | label + label ...
      MUL l1 l2 = expr
      AMBIG SQ k label IN { expr | expr }
      ASSERT NONZERO SQ k label
      FORCED SQ k label
    END
    MODULE name = SUSPENSION other
    MAP name FROM src TO dst SHIFT s
      label -> expr
    END
    DIAGRAM name
      NODES Y=m C=m SX=m SY=m
      MAPS jstar=f taustar=f sfstar=f
      EXACT
    END
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from .f2linalg import BitMatrix
from .modules import AmbiguitySlot, ModuleMap, SteenrodModule, suspension
from .secondary import CofiberDiagram

_PROV = re.compile(r"^\[(PAPER|ASSERTED|DERIVED)\b.*\]$")
_NAME = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")
_LABEL = re.compile(r"^[A-Za-z0-9_.]+$")


class DSLError(ValueError):
    def __init__(self, path: str, line: int, col: int, msg: str):
        super().__init__(f"{path}:{line}:{col}: {msg}")
        self.path, self.line, self.col, self.msg = path, line, col, msg


@dataclass
class Tok:
    text: str
    col: int


@dataclass
class Declarations:
    modules: dict[str, SteenrodModule] = field(default_factory=dict)
    maps: dict[str, ModuleMap] = field(default_factory=dict)
    diagrams: dict[str, CofiberDiagram] = field(default_factory=dict)
    order: list[tuple[str, str]] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    path: str = "<string>"

    def __len__(self) -> int:
        return len(self.order)

    def counts(self) -> tuple[int, int, int]:
        return len(self.modules), len(self.maps), len(self.diagrams)

    def module(self, name: str) -> SteenrodModule:
        if name not in self.modules:
            raise KeyError(f"no module named {name!r} in {self.path}")
        return self.modules[name]

    def map(self, name: str) -> ModuleMap:
        if name not in self.maps:
            raise KeyError(f"no map named {name!r} in {self.path}")
        return self.maps[name]

    def diagram(self, name: str) -> CofiberDiagram:
        if name not in self.diagrams:
            raise KeyError(f"no diagram named {name!r} in {self.path}")
        return self.diagrams[name]

    def provenance(self) -> list[str]:
        out = []
        for kind, name in self.order:
            obj = {"MODULE": self.modules, "MAP": self.maps, "DIAGRAM": self.diagrams}[kind][name]
            out += [f"{name}: {p}" for p in obj.provenance]
        return out + list(self.notes)

    def structure(self) -> tuple:
        """Everything that a round trip must preserve."""
        return (
            self.order,
            [self.modules[n]._key() for k, n in self.order if k == "MODULE"],
            [self.maps[n]._key() for k, n in self.order if k == "MAP"],
            [_diagram_key(self.diagrams[n]) for k, n in self.order if k == "DIAGRAM"],
            self.notes,
        )


def _diagram_key(d: CofiberDiagram) -> tuple:
    return (d.name, d.Y.name, d.C.name, d.SX.name, d.SY.name, d.jstar.name, d.taustar.name,
            d.sfstar.name, d.exact, d.provenance)


def _tokens(line: str) -> list[Tok]:
    return [Tok(m.group(), m.start() + 1) for m in re.finditer(r"\S+", line)]


class _Parser:
    def __init__(self, text: str, path: str):
        self.path = path
        self.lines = text.splitlines()
        self.out = Declarations(path=path)
        self.pending: list[str] = []
        self.pos = 0  # read cursor
        self.lineno = 0  # line reported in errors

    def err(self, tok: Tok | int | None, msg: str, line: int | None = None) -> DSLError:
        col = tok.col if isinstance(tok, Tok) else (tok or 1)
        return DSLError(self.path, line or self.lineno, col, msg)

    def _split(self, raw: str) -> tuple[list[Tok], str | None]:
        code, sep, comment = raw.partition("#")
        note = comment.strip() if sep else None
        return _tokens(code), (note if note and _PROV.match(note) else None)

    def next_line(self) -> tuple[list[Tok], str | None] | None:
        while self.pos < len(self.lines):
            raw = self.lines[self.pos]
            self.pos += 1
            self.lineno = self.pos
            toks, note = self._split(raw)
            if toks or note:
                return toks, note
        return None

    # -- entry -----------------------------------------------------------
    def parse(self) -> Declarations:
        while True:
            got = self.next_line()
            if got is None:
                break
            toks, note = got
            if note:
                self.pending.append(note)
            if not toks:
                continue
            head = toks[0].text
            if head == "MODULE":
                self.parse_module(toks)
            elif head == "MAP":
                self.parse_map(toks)
            elif head == "DIAGRAM":
                self.parse_diagram(toks)
            else:
                raise self.err(toks[0], f"expected MODULE, MAP or DIAGRAM, got {head!r}")
        self.out.notes = self.pending
        return self.out

    def _declare(self, kind: str, tok: Tok) -> str:
        name = tok.text
        if not _NAME.match(name):
            raise self.err(tok, f"bad name {name!r}")
        if any(n == name for _, n in self.out.order):
            raise self.err(tok, f"duplicate declaration of {name!r}")
        return name

    def _expect(self, toks: list[Tok], i: int, word: str) -> None:
        if len(toks) <= i or toks[i].text != word:
            where = toks[i] if len(toks) > i else (toks[-1].col + len(toks[-1].text) if toks else 1)
            raise self.err(where, f"expected {word!r}")

    def _int(self, toks: list[Tok], i: int, what: str) -> int:
        if len(toks) <= i:
            raise self.err(toks[-1].col + len(toks[-1].text), f"missing {what}")
        t = toks[i]
        if not re.fullmatch(r"\d+", t.text):
            raise self.err(t, f"{what} must be a non-negative integer, got {t.text!r}")
        return int(t.text)

    def _body(self, kind: str) -> tuple[list[tuple[int, list[Tok]]], list[str], int]:
        """Lines up to END, with their numbers; provenance notes inside the block."""
        start = self.lineno
        body, notes = [], []
        while True:
            got = self.next_line()
            if got is None:
                raise DSLError(self.path, start, 1, f"{kind} block is missing END")
            toks, note = got
            if note:
                notes.append(note)
            if not toks:
                continue
            if toks[0].text == "END":
                if len(toks) > 1:
                    raise self.err(toks[1], "unexpected text after END")
                return body, notes, self.lineno
            if toks[0].text in ("MODULE", "MAP", "DIAGRAM"):
                raise self.err(toks[0], f"{kind} block is missing END")
            body.append((self.lineno, toks))

    # -- modules -----------------------------------------------------------
    def parse_module(self, toks: list[Tok]) -> None:
        if len(toks) < 2:
            raise self.err(toks[0], "MODULE needs a name")
        name = self._declare("MODULE", toks[1])
        if len(toks) >= 3 and toks[2].text == "=":
            self._expect(toks, 3, "SUSPENSION")
            if len(toks) != 5:
                raise self.err(toks[-1], "expected MODULE name = SUSPENSION other")
            parent = toks[4].text
            if parent not in self.out.modules:
                raise self.err(toks[4], f"unknown module {parent!r}")
            m = suspension(self.out.modules[parent], name)
            m = m._replace(provenance=tuple(self.pending))
            self.pending = []
            self._add("MODULE", name, m, self.out.modules)
            return
        self._expect(toks, 2, "MAXDEG")
        D = self._int(toks, 3, "MAXDEG")
        if len(toks) > 4:
            raise self.err(toks[4], "unexpected text after MAXDEG")
        header_line = self.lineno
        prov = self.pending
        self.pending = []
        body, notes, _ = self._body("MODULE")
        self._add("MODULE", name, self._build_module(name, D, body, prov + notes, header_line),
                  self.out.modules)

    def _add(self, kind, name, obj, table) -> None:
        table[name] = obj
        self.out.order.append((kind, name))

    def _build_module(self, name: str, D: int, body, prov: list[str], header_line: int) -> SteenrodModule:
        basis: dict[int, list[str]] = {}
        where: dict[str, tuple[int, int]] = {}
        rest = []
        for ln, toks in body:
            if toks[0].text == "GEN":
                if len(toks) != 3:
                    raise self.err(toks[0], "expected GEN label degree", ln)
                lab = toks[1].text
                if not _LABEL.match(lab) or lab == "0":
                    raise self.err(toks[1], f"bad label {lab!r}", ln)
                if lab in where:
                    raise self.err(toks[1], f"duplicate label {lab!r}", ln)
                self.lineno = ln
                deg = self._int(toks, 2, "degree")
                if deg > D:
                    raise self.err(toks[2], f"degree {deg} exceeds MAXDEG {D}", ln)
                basis.setdefault(deg, []).append(lab)
                where[lab] = (deg, len(basis[deg]) - 1)
            else:
                rest.append((ln, toks))

        def dim(d: int) -> int:
            return len(basis.get(d, ()))

        def label(tok: Tok, ln: int) -> tuple[int, int]:
            if tok.text not in where:
                raise self.err(tok, f"unknown label {tok.text!r} in module {name}", ln)
            return where[tok.text]

        def expr(toks: list[Tok], ln: int, degree: int) -> int:
            # label + label ... or 0, all in the given degree
            if not toks:
                raise self.err(None, "missing expression", ln)
            v = 0
            for j, t in enumerate(toks):
                if j % 2 == 1:
                    if t.text != "+":
                        raise self.err(t, "expected '+'", ln)
                    continue
                if t.text == "0":
                    if len(toks) > 1:
                        raise self.err(t, "'0' cannot appear in a sum", ln)
                    return 0
                d, i = label(t, ln)
                if d != degree:
                    raise self.err(t, f"{t.text} has degree {d}, expected {degree}", ln)
                v ^= 1 << i
            if len(toks) % 2 == 0:
                raise self.err(toks[-1], "dangling '+'", ln)
            return v

        def sq_head(toks: list[Tok], i: int, ln: int) -> tuple[int, str, int, int]:
            self.lineno = ln
            self._expect(toks, i, "SQ")
            k = self._int(toks, i + 1, "square index")
            if k < 1:
                raise self.err(toks[i + 1], "square index must be at least 1", ln)
            if len(toks) <= i + 2:
                raise self.err(toks[i + 1], "missing label", ln)
            d, idx = label(toks[i + 2], ln)
            if d + k > D:
                raise self.err(toks[i + 1], f"Sq{k} on degree {d} lands beyond MAXDEG {D}", ln)
            return k, toks[i + 2].text, d, idx

        cols: dict[tuple[int, int], list[int]] = {}
        given: set[tuple[int, str]] = set()
        slots, asserts, forced = [], [], []
        products: dict[tuple[str, str], int] | None = None
        unit = None
        for ln, toks in rest:
            head = toks[0].text
            if head == "SQ":
                k, lab, d, idx = sq_head(toks, 0, ln)
                self._expect(toks, 3, "=")
                if (k, lab) in given:
                    raise self.err(toks[0], f"Sq{k}({lab}) given twice", ln)
                given.add((k, lab))
                v = expr(toks[4:], ln, d + k)
                cols.setdefault((k, d), [0] * dim(d))[idx] = v
            elif head == "AMBIG":
                k, lab, d, idx = sq_head(toks, 1, ln)
                self._expect(toks, 4, "IN")
                self._expect(toks, 5, "{")
                if toks[-1].text != "}":
                    raise self.err(toks[-1], "expected '}'", ln)
                if (k, lab) in given:
                    raise self.err(toks[1], f"Sq{k}({lab}) given twice", ln)
                given.add((k, lab))
                alts, cur = [], []
                for t in toks[6:-1] + [Tok("|", toks[-1].col)]:
                    if t.text == "|":
                        v = expr(cur, ln, d + k)
                        if v in alts:
                            raise self.err(t, "repeated alternative", ln)
                        alts.append(v)
                        cur = []
                    else:
                        cur.append(t)
                if len(alts) < 2:
                    raise self.err(toks[5], "AMBIG needs at least two alternatives", ln)
                slots.append(AmbiguitySlot(k, lab, tuple(alts), f"{name}:SQ{k}:{lab}"))
            elif head == "ASSERT":
                self.lineno = ln
                self._expect(toks, 1, "NONZERO")
                k, lab, _, _ = sq_head(toks, 2, ln)
                if len(toks) != 5:
                    raise self.err(toks[-1], "unexpected text after ASSERT", ln)
                asserts.append((k, lab))
            elif head == "FORCED":
                k, lab, _, _ = sq_head(toks, 1, ln)
                if len(toks) != 4:
                    raise self.err(toks[-1], "unexpected text after FORCED", ln)
                forced.append((k, lab))
            elif head == "UNIT":
                if len(toks) != 2:
                    raise self.err(toks[0], "expected UNIT label", ln)
                d, _ = label(toks[1], ln)
                if d != 0:
                    raise self.err(toks[1], "the unit must have degree 0", ln)
                if unit is not None:
                    raise self.err(toks[0], "UNIT given twice", ln)
                unit = toks[1].text
                products = products if products is not None else {}
            elif head == "MUL":
                if len(toks) < 5:
                    raise self.err(toks[0], "expected MUL l1 l2 = expr", ln)
                self.lineno = ln
                self._expect(toks, 3, "=")
                d1, _ = label(toks[1], ln)
                d2, _ = label(toks[2], ln)
                if d1 + d2 > D:
                    raise self.err(toks[1], "product lands beyond MAXDEG", ln)
                v = expr(toks[4:], ln, d1 + d2)
                products = products if products is not None else {}
                pair, rev = (toks[1].text, toks[2].text), (toks[2].text, toks[1].text)
                if pair in products:
                    raise self.err(toks[0], f"product {pair[0]}*{pair[1]} given twice", ln)
                products[pair] = v
                products[rev] = v
            else:
                raise self.err(toks[0], f"unknown statement {head!r} in MODULE", ln)
        for k, lab in forced + asserts:
            if (k, lab) not in given:
                raise DSLError(self.path, header_line, 1,
                               f"{name}: Sq{k}({lab}) is asserted or forced but never given")
        unspecified = []
        for d, labs in basis.items():
            for lab in labs:
                for k in range(1, min(d, D - d) + 1):
                    if dim(d + k) and (k, lab) not in given:
                        unspecified.append((k, lab))
        sq = {kd: BitMatrix.from_columns(c, dim(kd[1] + kd[0])) for kd, c in cols.items()}
        return SteenrodModule(name, D, basis, sq, slots=slots, asserts=asserts, forced=forced,
                              products=products, unit=unit, unspecified=unspecified,
                              provenance=prov)

    # -- maps -------------------------------------------------------------
    def _module_ref(self, tok: Tok) -> SteenrodModule:
        if tok.text not in self.out.modules:
            raise self.err(tok, f"unknown module {tok.text!r}")
        return self.out.modules[tok.text]

    def parse_map(self, toks: list[Tok]) -> None:
        if len(toks) < 2:
            raise self.err(toks[0], "MAP needs a name")
        name = self._declare("MAP", toks[1])
        self._expect(toks, 2, "FROM")
        if len(toks) < 4:
            raise self.err(toks[2], "missing source module")
        src = self._module_ref(toks[3])
        self._expect(toks, 4, "TO")
        if len(toks) < 6:
            raise self.err(toks[4], "missing target module")
        tgt = self._module_ref(toks[5])
        self._expect(toks, 6, "SHIFT")
        shift = self._int(toks, 7, "SHIFT")
        if len(toks) > 8:
            raise self.err(toks[8], "unexpected text after SHIFT")
        prov = self.pending
        self.pending = []
        body, notes, _ = self._body("MAP")
        images: dict[str, str] = {}
        for ln, bt in body:
            if len(bt) < 3 or bt[1].text != "->":
                raise self.err(bt[0], "expected label -> expr", ln)
            lab = bt[0].text
            if lab not in src:
                raise self.err(bt[0], f"unknown label {lab!r} in module {src.name}", ln)
            if lab in images:
                raise self.err(bt[0], f"image of {lab} given twice", ln)
            d = src.degree_of(lab)
            for j, t in enumerate(bt[2:]):
                if j % 2 == 1:
                    if t.text != "+":
                        raise self.err(t, "expected '+'", ln)
                elif t.text != "0":
                    if t.text not in tgt:
                        raise self.err(t, f"unknown label {t.text!r} in module {tgt.name}", ln)
                    td = tgt.degree_of(t.text)
                    if td != d + shift:
                        raise self.err(t, f"{lab} has degree {d} but {t.text} has degree {td}; "
                                          f"SHIFT is {shift}", ln)
                elif len(bt) > 3:
                    raise self.err(t, "'0' cannot appear in a sum", ln)
            if len(bt) % 2 == 0:
                raise self.err(bt[-1], "dangling '+'", ln)
            images[lab] = " ".join(t.text for t in bt[2:])
        f = ModuleMap.from_images(name, src, tgt, shift, images, prov + notes)
        self._add("MAP", name, f, self.out.maps)

    # -- diagrams -----------------------------------------------------------
    def parse_diagram(self, toks: list[Tok]) -> None:
        if len(toks) != 2:
            raise self.err(toks[0], "expected DIAGRAM name")
        name = self._declare("DIAGRAM", toks[1])
        start = self.lineno
        prov = self.pending
        self.pending = []
        body, notes, _ = self._body("DIAGRAM")
        nodes: dict[str, SteenrodModule] = {}
        maps: dict[str, ModuleMap] = {}
        exact = False
        for ln, bt in body:
            head = bt[0].text
            if head in ("NODES", "MAPS"):
                want = ("Y", "C", "SX", "SY") if head == "NODES" else ("jstar", "taustar", "sfstar")
                table = nodes if head == "NODES" else maps
                if table:
                    raise self.err(bt[0], f"{head} given twice", ln)
                for t in bt[1:]:
                    key, eq, val = t.text.partition("=")
                    if not eq or key not in want:
                        raise self.err(t, f"expected one of {', '.join(k + '=' for k in want)}", ln)
                    if key in table:
                        raise self.err(t, f"{key} given twice", ln)
                    src = self.out.modules if head == "NODES" else self.out.maps
                    if val not in src:
                        kind = "module" if head == "NODES" else "map"
                        raise DSLError(self.path, ln, t.col + len(key) + 1, f"unknown {kind} {val!r}")
                    table[key] = src[val]
                missing = [k for k in want if k not in table]
                if missing:
                    raise self.err(bt[0], f"{head} is missing {', '.join(missing)}", ln)
            elif head == "EXACT":
                if len(bt) != 1:
                    raise self.err(bt[1], "unexpected text after EXACT", ln)
                exact = True
            else:
                raise self.err(bt[0], f"unknown statement {head!r} in DIAGRAM", ln)
        if not nodes or not maps:
            raise DSLError(self.path, start, 1, f"diagram {name} needs NODES and MAPS")
        for key, (s, t) in {"jstar": ("C", "Y"), "taustar": ("SX", "C"), "sfstar": ("SY", "SX")}.items():
            f = maps[key]
            if f.source.name != nodes[s].name or f.target.name != nodes[t].name:
                raise DSLError(self.path, start, 1, f"{key}={f.name} runs {f.source.name} -> "
                                                    f"{f.target.name}, expected {nodes[s].name} -> {nodes[t].name}")
        d = CofiberDiagram(name, nodes["Y"], nodes["C"], nodes["SX"], nodes["SY"],
                           maps["jstar"], maps["taustar"], maps["sfstar"], exact, tuple(prov + notes))
        self._add("DIAGRAM", name, d, self.out.diagrams)


def parse(text: str, path: str = "<string>") -> Declarations:
    return _Parser(text, path).parse()


def parse_file(path: str | Path) -> Declarations:
    p = Path(path)
    return parse(p.read_text(encoding="utf-8"), str(p))


def load_example(name: str) -> Declarations:
    """One of the shipped data files: ``twistor`` or ``twocell``."""
    res = resources.files("secwgt.data").joinpath(f"{name}.a2")
    if not res.is_file():
        raise FileNotFoundError(f"no shipped example {name!r}")
    return parse(res.read_text(encoding="utf-8"), f"{name}.a2")


def example_path(name: str) -> Path:
    return Path(str(resources.files("secwgt.data").joinpath(f"{name}.a2")))


# ---------------------------------------------------------------------------
# serializer

def _dump_module(m: SteenrodModule) -> list[str]:
    out = [f"# {p}" for p in m.provenance]
    if m.derived and m.derived[0] == "SUSPENSION" and not m.basis.get(0):
        out.append(f"MODULE {m.name} = SUSPENSION {m.derived[1]}")
        return out
    out.append(f"MODULE {m.name} MAXDEG {m.max_degree}")
    for d, labs in m.basis.items():
        out += [f"  GEN {lab} {d}" for lab in labs]
    if m.unit is not None:
        out.append(f"  UNIT {m.unit}")
    slots = {(s.k, s.label): s for s in m.slots}
    for d, labs in m.basis.items():
        for i, lab in enumerate(labs):
            for k in range(1, m.max_degree - d + 1):
                if (k, lab) in slots:
                    s = slots[(k, lab)]
                    alts = " | ".join(m.fmt(d + k, v) for v in s.alternatives)
                    out.append(f"  AMBIG SQ {k} {lab} IN {{ {alts} }}")
                    continue
                v = m.apply(k, d, 1 << i)
                required = k <= d and m.dim(d + k) and (k, lab) not in m.unspecified
                if v or required:
                    out.append(f"  SQ {k} {lab} = {m.fmt(d + k, v)}")
    if m.products is not None:
        done = set()
        for (x, y), v in m.products.items():
            if (y, x) in done:
                continue
            done.add((x, y))
            out.append(f"  MUL {x} {y} = {m.fmt(m.degree_of(x) + m.degree_of(y), v)}")
    out += [f"  ASSERT NONZERO SQ {k} {lab}" for k, lab in m.asserts]
    out += [f"  FORCED SQ {k} {lab}" for k, lab in m.forced]
    out.append("END")
    return out


def _dump_map(f: ModuleMap) -> list[str]:
    out = [f"# {p}" for p in f.provenance]
    out.append(f"MAP {f.name} FROM {f.source.name} TO {f.target.name} SHIFT {f.shift}")
    for d, labs in f.source.basis.items():
        for i, lab in enumerate(labs):
            v = f.apply(d, 1 << i)
            if v:
                out.append(f"  {lab} -> {f.target.fmt(d + f.shift, v)}")
    out.append("END")
    return out


def _dump_diagram(d: CofiberDiagram) -> list[str]:
    out = [f"# {p}" for p in d.provenance]
    out += [f"DIAGRAM {d.name}",
            f"  NODES Y={d.Y.name} C={d.C.name} SX={d.SX.name} SY={d.SY.name}",
            f"  MAPS jstar={d.jstar.name} taustar={d.taustar.name} sfstar={d.sfstar.name}"]
    if d.exact:
        out.append("  EXACT")
    out.append("END")
    return out


def dump(decls: Declarations) -> str:
    blocks = []
    for kind, name in decls.order:
        if kind == "MODULE":
            blocks.append(_dump_module(decls.modules[name]))
        elif kind == "MAP":
            blocks.append(_dump_map(decls.maps[name]))
        else:
            blocks.append(_dump_diagram(decls.diagrams[name]))
    if decls.notes:
        blocks.append([f"# {p}" for p in decls.notes])
    return "\n\n".join("\n".join(b) for b in blocks) + "\n" if blocks else ""
