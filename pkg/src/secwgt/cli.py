"""Command-line interface: ``secwgt COMMAND ...``.

Exit codes: 0 for a definitive verdict, 2 for an inconclusive one, 1 on errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Callable, Sequence

from .dsl import Declarations, DSLError, dump, load_example, parse, parse_file
from .modules import tensor_algebra_dims, validate_map, validate_module
from .pipelines import EXAMPLES
from .report import EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_OK, Report, digest
from .secondary import (admissible_diagrams, certify as certify_all, delta as delta_op,
                        phi_nontrivial, replay_certificate, validate_diagram)
from .steenrod import adem_rewrite, parse_poly, parse_word, poly_action
from .weights import nil_ker, retraction_exists, weight_report

SHIPPED = ("twistor", "twocell")


class CLIError(Exception):
    pass


# ---------------------------------------------------------------------------
# loading

def _read(path: str) -> tuple[Declarations, str]:
    if path == "-":
        text = sys.stdin.read()
        return parse(text, "<stdin>"), text
    decls = parse_file(path)
    return decls, dump(decls)


def _lookup(args, kind: str, name: str) -> tuple[Declarations, str]:
    """Declarations holding ``name``: from ``-f`` if given, else from the shipped examples."""
    if args.file:
        decls, text = _read(args.file)
        return decls, text
    hits = []
    for ex in SHIPPED:
        decls = load_example(ex)
        if name in {"module": decls.modules, "map": decls.maps, "diagram": decls.diagrams}[kind]:
            hits.append(decls)
    if not hits:
        raise CLIError(f"no {kind} named {name!r}; pass -f FILE")
    if len(hits) > 1:
        raise CLIError(f"{kind} {name!r} exists in several shipped examples; pass -f FILE")
    return hits[0], dump(hits[0])


def _start(command: str, decls: Declarations | None, text: str, *extra: str) -> Report:
    rep = Report(command, digest(command, text, *extra))
    if decls is not None:
        rep.provenance = decls.provenance()
    return rep


# ---------------------------------------------------------------------------
# commands

def cmd_validate(args) -> Report:
    decls, text = _read(args.path)
    rep = _start("validate", decls, text)
    ok = True
    results = {}
    for m in decls.modules.values():
        v = validate_module(m)
        rep.add(*v.lines())
        results[m.name] = v.ok
    for f in decls.maps.values():
        v = validate_map(f)
        rep.add(*v.lines())
        results[f.name] = v.ok
    for d in decls.diagrams.values():
        v = validate_diagram(d)
        rep.add(*v.lines())
        results[d.name] = v.ok
    ok = all(results.values())
    nm, nf, nd = decls.counts()
    rep.add(f"{nm} modules, {nf} maps, {nd} diagrams: {'all valid' if ok else 'INVALID'}")
    rep.verdicts = {"valid": ok, "declarations": results}
    rep.exit_code = EXIT_OK if ok else EXIT_ERROR
    return rep


def cmd_adem(args) -> Report:
    word = " ".join(args.word)
    nf = adem_rewrite(parse_word(word))
    rep = _start("adem", None, word)
    rep.add(str(nf))
    rep.verdicts = {"normal_form": str(nf), "terms": [list(t) for t in nf]}
    return rep


def cmd_action(args) -> Report:
    degs = {}
    for spec in args.deg or []:
        name, _, d = spec.partition("=")
        if not d.isdigit():
            raise CLIError(f"bad --deg {spec!r}; expected NAME=DEGREE")
        degs[name] = int(d)
    w = parse_word(args.word)
    p, names = parse_poly(args.poly, degs)
    out = poly_action(w, p)
    nf = adem_rewrite(w)
    check = poly_action(nf, p)
    rep = _start("action", None, args.word, args.poly, *sorted(args.deg or []))
    rep.add(out.format(names))
    if check != out:
        rep.add(f"warning: admissible form {nf} acts differently: {check.format(names)}")
    rep.verdicts = {"result": out.format(names), "normal_form_agrees": check == out}
    return rep


def cmd_dims(args) -> Report:
    gens = [int(g) for g in args.gens.strip("{}").replace(",", " ").split()]
    dims = tensor_algebra_dims(gens, args.maxdeg)
    rep = _start("dims", None, args.gens, str(args.maxdeg))
    rep.add(", ".join(f"{d}:{n}" for d, n in enumerate(dims)))
    rep.verdicts = {"dims": dims, "generators": gens}
    return rep


def cmd_wgt(args) -> Report:
    decls, text = _lookup(args, "map", args.maps[0])
    maps = [decls.map(n) for n in args.maps]
    rep = _start("wgt", decls, text, *args.maps, str(args.first_k))
    wr = weight_report(maps, args.first_k)
    rep.add(*wr.lines())
    rep.verdicts = {
        "injective": dict(zip(args.maps, wr.injective)),
        "retraction": {n: r.verdict for n, r in zip(args.maps, wr.retractions)},
        "wgt": wr.wgt[0], "mwgt": wr.mwgt[0], "flags": wr.flags,
    }
    if any(r.verdict == "MIXED" for r in wr.retractions):
        rep.exit_code = EXIT_INCONCLUSIVE
    return rep


def cmd_nilker(args) -> Report:
    decls, text = _lookup(args, "map", args.map)
    n = nil_ker(decls.map(args.map))
    rep = _start("nilker", decls, text, args.map)
    rep.add(f"nil-ker({args.map}) = {n}")
    rep.verdicts = {"nil_ker": n}
    return rep


def cmd_retraction(args) -> Report:
    decls, text = _lookup(args, "map", args.map)
    ks = "generators" if args.generators_only else "all"
    res = retraction_exists(decls.map(args.map), ks)
    rep = _start("retraction", decls, text, args.map, str(args.all_completions), ks)
    if args.all_completions or len(res.per_resolution) <= 1:
        rep.add(*res.lines())
    else:
        first = res.per_resolution[0]
        rep.add(*first.lines())
        rep.add(f"joint verdict over {len(res.per_resolution)} admissible resolutions: {res.verdict} "
                f"(--all-completions lists each)")
    rep.verdicts = {"verdict": res.verdict}
    if args.all_completions:
        rep.verdicts["per_resolution"] = [
            {"resolution": c.resolution_text, "verdict": c.verdict} for c in res.per_resolution]
    for c in res.per_resolution[:1]:
        if c.sat:
            rep.payload["retraction"] = {str(d): m.to_lists() for d, m in sorted(c.matrices.items())}
        elif c.chain:
            rep.payload["chain"] = c.chain
    if res.verdict == "MIXED":
        rep.exit_code = EXIT_INCONCLUSIVE
    return rep


def cmd_delta(args) -> Report:
    decls, text = _lookup(args, "diagram", args.diagram)
    d = decls.diagram(args.diagram)
    i, x = d.C.element(args.cls)
    rep = _start("delta", decls, text, args.diagram, args.cls)
    verdicts = []
    for a, r in admissible_diagrams(d):
        if a:
            rep.add(f"[{d.describe_resolution(a)}]")
        res = delta_op(r, i, x)
        rep.add(f"Delta({args.cls}) = {r.SX.fmt(i + 4, res.value)} in {r.SX.name}_{i + 4}, "
                f"{'nonzero' if res.nonzero else 'zero'} modulo im B")
        ph = phi_nontrivial(r, i, x)
        rep.add(*[f"  {c}" for c in ph.chain])
        rep.add(f"Phi verdict: {ph.verdict}" + (f" ({ph.failed})" if ph.failed else ""))
        verdicts.append({"resolution": d.describe_resolution(a), "delta": r.SX.fmt(i + 4, res.value),
                         "nonzero": res.nonzero, "phi": ph.verdict, "phi_y": ph.phi_text})
    rep.verdicts = {"per_resolution": verdicts}
    if any(v["phi"] == "INCONCLUSIVE" for v in verdicts) or len({v["phi"] for v in verdicts}) > 1:
        rep.exit_code = EXIT_INCONCLUSIVE
    return rep


def cmd_certify(args) -> Report:
    decls, text = _lookup(args, "diagram", args.diagram)
    d = decls.diagram(args.diagram)
    base, via = decls.module(args.base), decls.map(args.via)
    rep = _start("certify", decls, text, args.diagram, args.cls, args.base, args.via, args.target,
                 str(args.k), args.invariant)
    cert = certify_all(base, via, d, args.cls, args.target, args.k, args.invariant)
    rep.add(*cert.lines())
    replays = [replay_certificate(r.payload) for r in cert.reports if r.verdict == "REFUTED"]
    if replays:
        rep.add(f"independent replay: {'ok' if not any(replays) else 'FAILED'}")
    rep.add(cert.conclusion)
    rep.verdicts = {"verdict": cert.verdict, "conclusion": cert.conclusion,
                    "replay_ok": not any(replays)}
    rep.payload = {"certificates": [r.payload for r in cert.reports]}
    if cert.verdict != "REFUTED" or any(replays):
        rep.exit_code = EXIT_INCONCLUSIVE
    return rep


def cmd_example(args) -> Report:
    return EXAMPLES[args.name]()


# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="secwgt", description="Exact mod-2 lower bounds for sectional category.")
    p.add_argument("--json", action="store_true", help="write the machine-readable report to stdout")
    # also accepted after the subcommand
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS, help=argparse.SUPPRESS)
    sub = p.add_subparsers(dest="command", required=True)

    def add(name: str, fn: Callable, help: str, file: bool = False) -> argparse.ArgumentParser:
        sp = sub.add_parser(name, help=help, parents=[common])
        sp.set_defaults(fn=fn)
        if file:
            sp.add_argument("-f", "--file", help="input .a2 file ('-' for stdin); default: shipped examples")
        return sp

    sp = add("validate", cmd_validate, "check every declaration in a file")
    sp.add_argument("path", help="input .a2 file, or '-' for stdin")
    sp = add("adem", cmd_adem, "admissible normal form of a word")
    sp.add_argument("word", nargs="+", help='e.g. "Sq2 Sq2"')
    sp = add("action", cmd_action, "act on a polynomial (variables default to degree 1)")
    sp.add_argument("word")
    sp.add_argument("poly", help='e.g. "x1 x2^2"')
    sp.add_argument("--deg", action="append", metavar="NAME=DEG", help="degree of a variable (1, 2 or 4)")
    sp = add("dims", cmd_dims, "word counts in a tensor algebra")
    sp.add_argument("gens", help='generator degrees, e.g. "5,7"')
    sp.add_argument("maxdeg", type=int)
    sp = add("wgt", cmd_wgt, "weight report for q(k)*, q(k+1)*, ...", file=True)
    sp.add_argument("maps", nargs="+")
    sp.add_argument("--first-k", type=int, default=0)
    sp = add("nilker", cmd_nilker, "nilpotency of the kernel ideal", file=True)
    sp.add_argument("map")
    sp = add("retraction", cmd_retraction, "decide whether a module retraction exists", file=True)
    sp.add_argument("map")
    sp.add_argument("--all-completions", action="store_true", help="list every ambiguity resolution")
    sp.add_argument("--generators-only", action="store_true", help="impose only Sq^(2^i)")
    sp = add("delta", cmd_delta, "compute Delta on a class of C", file=True)
    sp.add_argument("diagram")
    sp.add_argument("cls", metavar="CLASS")
    sp = add("certify", cmd_certify, "secondary obstruction certificate", file=True)
    sp.add_argument("diagram")
    sp.add_argument("cls", metavar="CLASS")
    sp.add_argument("--base", required=True)
    sp.add_argument("--via", required=True)
    sp.add_argument("--target", required=True, help="class u of the base with Phi(y) = via(u)")
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--invariant", default="secat")
    sp = add("example", cmd_example, "run a full shipped reproduction")
    sp.add_argument("name", choices=sorted(EXAMPLES))
    return p


def run(argv: Sequence[str]) -> Report:
    return _run(build_parser().parse_args(list(argv)), argv)


def _run(args: argparse.Namespace, argv: Sequence[str]) -> Report:
    try:
        return args.fn(args)
    except (CLIError, DSLError, KeyError, ValueError, FileNotFoundError) as e:
        msg = e.args[0] if isinstance(e, KeyError) and e.args else str(e)
        rep = Report(args.command, digest(*argv))
        rep.add(f"error: {msg}")
        rep.verdicts = {"error": msg}
        rep.exit_code = EXIT_ERROR
        return rep


def main(argv: Sequence[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    args = build_parser().parse_args(argv)
    rep = _run(args, argv)
    if args.json:
        sys.stdout.write(rep.to_json())
    elif rep.exit_code == EXIT_ERROR and "error" in rep.verdicts:
        sys.stderr.write(rep.text())
    else:
        sys.stdout.write(rep.text())
    return rep.exit_code


if __name__ == "__main__":
    sys.exit(main())
