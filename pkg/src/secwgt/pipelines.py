"""End-to-end reproductions of the two worked examples from the shipped data files."""

from __future__ import annotations

from .dsl import Declarations, dump, load_example, parse
from .modules import (DualTensorAlgebraSpec, SteenrodModule, dual_square, dual_tensor_algebra,
                      loop_suspension, same_structure, sphere, tensor_algebra_dims,
                      tensor_product, thom_module, truncated_polynomial_algebra, validate_map,
                      validate_module, word_label)
from .report import EXIT_ERROR, EXIT_INCONCLUSIVE, Report, digest
from .secondary import (admissible_diagrams, certify, delta, indeterminacy, op_A, op_B,
                        replay_certificate, validate_diagram)
from .weights import nil_ker, retraction_exists, weight_report


def _validate_all(decls: Declarations, rep: Report) -> bool:
    ok = True
    for m in decls.modules.values():
        v = validate_module(m)
        ok &= v.ok
        rep.add(*v.lines())
    for f in decls.maps.values():
        v = validate_map(f)
        ok &= v.ok
        rep.add(*v.lines())
    for d in decls.diagrams.values():
        v = validate_diagram(d)
        ok &= v.ok
        rep.add(*v.lines())
    return ok


def _check(rep: Report, name: str, diffs: list[str]) -> bool:
    rep.add(f"cross-check {name}: {'agrees' if not diffs else 'DIFFERS'}")
    rep.add(*[f"  {x}" for x in diffs])
    rep.verdicts.setdefault("cross_checks", {})[name] = not diffs
    return not diffs


def category_upper_bound(m: SteenrodModule) -> tuple[int, int, int]:
    """``dim / (conn + 1)`` for a complex whose cohomology is ``m``.

    Uses the classical bound cat <= dim / (conn + 1); the dimension is read off
    as the top nonzero degree, the connectivity as one less than the lowest
    positive one.
    """
    pos = [d for d in m.degrees() if d > 0]
    top, conn = max(pos), min(pos) - 1
    return top // (conn + 1), top, conn


def _n(count: int, noun: str) -> str:
    return f"{count} {noun}" + ("" if count == 1 else "s")


def _header(rep: Report, decls: Declarations) -> None:
    nm, nf, nd = decls.counts()
    rep.add(f"parsed {decls.path}: {_n(nm, 'module')}, {_n(nf, 'map')}, {_n(nd, 'diagram')}")
    rt = parse(dump(decls), decls.path).structure() == decls.structure()
    rep.add(f"round trip through the serializer: {'ok' if rt else 'FAILED'}")
    rep.verdicts["round_trip"] = rt


def _delta_block(rep: Report, decls: Declarations, dname: str, x_label: str) -> bool:
    d = decls.diagram(dname)
    i, x = d.C.element(x_label)
    nonzero = True
    for a, r in admissible_diagrams(d):
        A = op_A(r, i)
        B = op_B(r, i)
        res = delta(r, i, x)
        tag = f"  [{d.describe_resolution(a)}]" if a else ""
        rep.add(f"A on {r.C.name}_{i}: {'zero' if all(m.is_zero() for m in A) else 'NONZERO'}{tag}")
        rep.add(f"B into {r.SX.name}_{i + 4}: {'zero' if B.is_zero() else 'NONZERO'}")
        rep.add(f"Delta({x_label}) = {r.SX.fmt(i + 4, res.value)} modulo im B "
                f"({'nonzero' if res.nonzero else 'zero'})")
        nonzero &= res.nonzero
    rep.verdicts["delta_nonzero"] = nonzero
    return nonzero


def _rel(a: int, b: int) -> str:
    return "=" if a == b else ">" if a > b else "<"


def _chain(ub: int, sw: int, mw: int, w: int, inv: str, arg: str) -> str:
    """``ub = inv = Swgt > Mwgt = mw > wgt = w`` with the relations recomputed."""
    head = f"{ub} = {inv} = Swgt({arg})" if ub == sw else f"{inv} ≥ Swgt({arg}) ≥ {sw}"
    if mw == w:
        tail = f"Mwgt({arg}) = wgt({arg}) = {w}"
    else:
        tail = f"Mwgt({arg}) = {mw} {_rel(mw, w)} wgt({arg}) = {w}"
    return f"{head} {_rel(sw, mw)} {tail}"


def run_twistor() -> Report:
    decls = load_example("twistor")
    rep = Report("example twistor", digest("example", "twistor", dump(decls)))
    rep.provenance = decls.provenance()
    _header(rep, decls)
    if not _validate_all(decls, rep):
        rep.add("input data are invalid")
        rep.exit_code = EXIT_ERROR
        return rep

    HP2, CP5, E1, C = (decls.module(n) for n in ("HP2", "CP5", "E1", "C"))
    _check(rep, "HP2 = truncated_polynomial_algebra(4, 3)",
           same_structure(HP2, truncated_polynomial_algebra(4, 3)))
    _check(rep, "CP5 = truncated_polynomial_algebra(2, 6)",
           same_structure(CP5, truncated_polynomial_algebra(2, 6)))
    _check(rep, "C = thom_module(CP5, w = 0, shift 3)",
           same_structure(C, thom_module(CP5, [], 3), reduced=True))
    prod = tensor_product(HP2, sphere(5))
    _check(rep, "dims of E1 = dims of HP2 ⊗ S5", [] if E1.dims() == prod.dims() else
           [f"{E1.dims()} vs {prod.dims()}"])
    for a, r in admissible_diagrams(decls.diagram("twistor")):
        _check(rep, f"E1 under the diagram-admissible resolution [{E1.describe_resolution(a)}] "
                    f"= HP2 ⊗ S5", same_structure(r.Y, prod, products=False))

    rep.add("", "-- primary bounds --")
    q, q1 = decls.map("q"), decls.map("q1")
    wr = weight_report([q, q1])
    rq = retraction_exists(q)
    rep.add(*rq.lines())
    rep.add(*retraction_exists(q1).lines())
    rep.add(f"nil-ker(q) = {nil_ker(q)}")
    rep.add(*wr.lines())
    rep.verdicts.update({
        "wgt": wr.wgt[1], "mwgt": wr.mwgt[1],
        "retraction": {"q": rq.verdict, "q1": wr.retractions[1].verdict},
        "nil_ker_q": nil_ker(q),
    })

    rep.add("", "-- secondary operation --")
    ind = [indeterminacy(r.Y, 5).dim for _, r in admissible_diagrams(decls.diagram("twistor"))]
    rep.add(f"indeterminacy of Phi on E1_5: dimension {max(ind)}")
    rep.add(f"indeterminacy of Phi on HP2_5: dimension {indeterminacy(HP2, 5).dim}")
    rep.verdicts["indeterminacy_E1_5"] = max(ind)
    _delta_block(rep, decls, "twistor", "bU")
    cert = certify(HP2, q1, decls.diagram("twistor"), "bU", "a2", k=1, invariant="secat")
    rep.add(*cert.lines())
    replays = [replay_certificate(r.payload) for r in cert.reports]
    rep.add(f"independent replay of {len(replays)} certificate(s): "
            f"{'ok' if not any(replays) else 'FAILED'}")
    rep.payload["certificates"] = [r.payload for r in cert.reports]
    rep.verdicts["phi_y"] = [r.phi.phi_text for r in cert.reports if r.phi]
    rep.verdicts["certificate"] = cert.verdict
    rep.verdicts["replay_ok"] = not any(replays)

    ub, top, conn = category_upper_bound(HP2)
    rep.add("", f"upper bound: secat(q) ≤ cat(HP2) ≤ {top}/({conn}+1) = {ub} "
                f"(classical dimension/connectivity bound)")
    if cert.verdict != "REFUTED":
        rep.add(cert.conclusion)
        rep.exit_code = EXIT_INCONCLUSIVE
        return rep
    sw = cert.reports[0].k + 1
    mw, w = wr.mwgt[1], wr.wgt[1]
    rep.add("chain: " + _chain(ub, sw, mw, w, "secat(q)", "q"))
    rep.verdicts.update({"swgt_lower": sw, "secat_lower": sw, "secat_upper": ub})
    rep.add(f"secat ≥ {sw}")
    return rep


def _dual_block(rep: Report) -> tuple[SteenrodModule, SteenrodModule]:
    ta = DualTensorAlgebraSpec((("a", 2), ("b", 7)), {}, truncation=8)
    te = DualTensorAlgebraSpec((("a", 5), ("b", 7)), {("b", 2): frozenset({("a",)})}, truncation=8)
    s = dual_square(ta, 2, ("a", "a", "a"))
    txt = " + ".join(sorted(word_label(w) for w in s)) or "0"
    rep.add(f"T(a2,b7) with Sq1_*(a) = Sq2_*(a) = 0: Sq2_*(a3) = {txt} (dual Cartan formula)")
    rep.verdicts["sq2_dual_a3"] = txt
    return loop_suspension(dual_tensor_algebra(ta, "OmegaCa"), "G1Ca_model"), \
        loop_suspension(dual_tensor_algebra(te, "OmegaCe"), "G1Ce_model")


def _dims_block(rep: Report) -> None:
    da = tensor_algebra_dims([2, 7], 12)
    de = tensor_algebra_dims([5, 7], 14)
    rep.add("words in T(a2,b7) by degree: " + ", ".join(f"{d}:{n}" for d, n in enumerate(da) if n and d))
    rep.add("words in T(a5,b7) by degree: " + ", ".join(f"{d}:{n}" for d, n in enumerate(de) if n and d))
    flags = []
    if da[9] != 1:
        flags.append(f"T(a2,b7) has dimension {da[9]} in degree 9 (ab, ba), so H^10(G1(C_α)) is not F2")
    if de[12] != 1:
        flags.append(f"T(a5,b7) has dimension {de[12]} in degree 12 (ab, ba), so H^13(G1(C_η)) is not F2")
    for f in flags:
        rep.add(f"discrepancy (flagged, outside the degrees used): {f}")
    rep.verdicts["dims_T_a2_b7"] = da
    rep.verdicts["dims_T_a5_b7"] = de
    rep.verdicts["dimension_discrepancies"] = flags


def run_twocell() -> Report:
    decls = load_example("twocell")
    rep = Report("example twocell", digest("example", "twocell", dump(decls)))
    rep.provenance = decls.provenance()
    _header(rep, decls)
    if not _validate_all(decls, rep):
        rep.add("input data are invalid")
        rep.exit_code = EXIT_ERROR
        return rep

    rep.add("", "-- loop space models --")
    ga, ge = _dual_block(rep)
    _check(rep, "G1Ca = loop suspension of T(a2,b7)^dual through degree 9",
           same_structure(decls.module("G1Ca"), ga, reduced=True, max_degree=9))
    _check(rep, "G1Ce = loop suspension of T(a5,b7)^dual through degree 9",
           same_structure(decls.module("G1Ce"), ge, reduced=True, max_degree=9))
    _dims_block(rep)

    rep.add("", "-- primary bounds --")
    X = decls.module("X")
    point, incl = decls.map("point"), decls.map("incl")
    wr = weight_report([point, incl])
    rep.add(*retraction_exists(incl).lines())
    nk = nil_ker(point)
    rep.add(f"nil-ker(H^*(X) -> H^*(pt)) = {nk}")
    rep.add(*wr.lines())
    rep.verdicts.update({"wgt": wr.wgt[1], "mwgt": wr.mwgt[1], "nil_ker": nk,
                         "incl_injective": wr.injective[1],
                         "retraction": {"point": wr.retractions[0].verdict,
                                        "incl": wr.retractions[1].verdict}})

    rep.add("", "-- secondary operation --")
    C = decls.module("C")
    asserted = [f"Sq{k}({lab}) ≠ 0" for k, lab in C.asserts]
    rep.add(f"asserted input: {', '.join(asserted)} (not derived here)")
    _delta_block(rep, decls, "twocell", "c")
    cert = certify(X, incl, decls.diagram("twocell"), "c", "x8", k=1, invariant="cat")
    rep.add(*cert.lines())
    replays = [replay_certificate(r.payload) for r in cert.reports]
    rep.add(f"independent replay of {len(replays)} certificate(s): "
            f"{'ok' if not any(replays) else 'FAILED'}")
    rep.payload["certificates"] = [r.payload for r in cert.reports]
    rep.verdicts["phi_y"] = [r.phi.phi_text for r in cert.reports if r.phi]
    rep.verdicts["certificate"] = cert.verdict
    rep.verdicts["replay_ok"] = not any(replays)

    ub, top, conn = category_upper_bound(X)
    rep.add("", f"upper bound: cat(X) ≤ {top}/({conn}+1) = {ub} (classical dimension/connectivity bound)")
    if cert.verdict != "REFUTED":
        rep.add(cert.conclusion)
        rep.exit_code = EXIT_INCONCLUSIVE
        return rep
    sw = cert.reports[0].k + 1
    mw, w = wr.mwgt[1], wr.wgt[1]
    rep.add("chain: " + _chain(ub, sw, mw, w, "cat(X)", "X"))
    rep.verdicts.update({"swgt_lower": sw, "cat_lower": sw, "cat_upper": ub})
    rep.add(f"cat ≥ {sw}")
    return rep


EXAMPLES = {"twistor": run_twistor, "twocell": run_twocell}
