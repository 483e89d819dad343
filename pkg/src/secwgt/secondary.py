"""Secondary operation obstruction via the cofiber diagram.

For a relation ``sum_j phi_j theta_j = 0`` (by default ``Sq3 Sq1 + Sq2 Sq2 = 0``)
and a cofiber sequence ``X -> Y -> C -> SX -> SY`` the composite

    Delta = (phi_j) o (tau*)^{-1} o (theta_j)

sends ``ker A`` in ``H^i(C)`` to ``coker B`` in ``H^{i+n}(SX)``.  When ``j*`` and
``(Sf)*`` identify the relevant groups this computes the secondary operation on
``Y``; a nonzero value that a retraction would have to kill refutes Swgt.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Mapping

from .f2linalg import (BitMatrix, Subspace, Unsat, coset_reduce, hstack, image_basis, kernel_basis,
                       rank, solve)
from .modules import (Issue, ModuleMap, SteenrodModule, ValidityReport, equivariance_failures,
                      map_shape_issues, validate_module)
from .steenrod import AdmissibleSum, adem_rewrite, compose

HSPACE_NOTE = ("hypothesis not checked: the relation must come from a null-homotopy with "
               "K1 an H-space and phi an H-map; the diagram data are trusted for this")


@dataclass(frozen=True)
class OperationPair:
    """``theta = (theta_j)`` and ``phi = (phi_j)`` with ``sum_j phi_j theta_j = 0``."""

    theta: tuple[AdmissibleSum, ...]
    phi: tuple[AdmissibleSum, ...]

    def __post_init__(self) -> None:
        if len(self.theta) != len(self.phi) or not self.theta:
            raise ValueError("theta and phi need the same positive length")
        total = {t.degree + p.degree for t, p in zip(self.theta, self.phi)}
        if len(total) != 1:
            raise ValueError("relation is not homogeneous")
        acc: list = []
        for t, p in zip(self.theta, self.phi):
            acc += list(compose(p, t))
        if adem_rewrite(acc):
            raise ValueError("phi o theta is not zero in the Steenrod algebra")

    @property
    def theta_degrees(self) -> tuple[int, ...]:
        return tuple(t.degree for t in self.theta)

    @property
    def degree(self) -> int:
        return self.theta[0].degree + self.phi[0].degree

    def __str__(self) -> str:
        return " + ".join(f"({p})({t})" for t, p in zip(self.theta, self.phi))


STANDARD_PAIR = OperationPair(
    theta=(AdmissibleSum.of((1,)), AdmissibleSum.of((2,))),
    phi=(AdmissibleSum.of((3,)), AdmissibleSum.of((2,))),
)


@dataclass
class CofiberDiagram:
    """Cohomology of ``E(k) <- C <- SE <- SE(k)`` with the connecting maps."""

    name: str
    Y: SteenrodModule
    C: SteenrodModule
    SX: SteenrodModule
    SY: SteenrodModule
    jstar: ModuleMap
    taustar: ModuleMap
    sfstar: ModuleMap
    exact: bool = True
    provenance: tuple[str, ...] = ()

    @property
    def modules(self) -> tuple[SteenrodModule, ...]:
        return (self.Y, self.C, self.SX, self.SY)

    @property
    def maps(self) -> tuple[ModuleMap, ...]:
        return (self.jstar, self.taustar, self.sfstar)

    def slot_sizes(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for m in self.modules:
            for s in m.slots:
                out.setdefault(s.key, len(s.alternatives))
        return out

    def joint_resolutions(self) -> list[dict[str, int]]:
        sizes = self.slot_sizes()
        keys = list(sizes)
        return [dict(zip(keys, c)) for c in itertools.product(*(range(sizes[k]) for k in keys))]

    def resolve(self, assignment: Mapping[str, int]) -> CofiberDiagram:
        Y, C, SX, SY = (m.resolve(assignment) for m in self.modules)
        return CofiberDiagram(
            self.name, Y, C, SX, SY,
            self.jstar.with_modules(C, Y), self.taustar.with_modules(SX, C),
            self.sfstar.with_modules(SY, SX), self.exact, self.provenance,
        )

    def describe_resolution(self, assignment: Mapping[str, int]) -> str:
        seen, parts = set(), []
        for m in self.modules:
            for s in m.slots:
                if s.key in seen:
                    continue
                seen.add(s.key)
                d = m.degree_of(s.label)
                parts.append(f"Sq{s.k}({s.label}) = {m.fmt(d + s.k, s.alternatives[assignment[s.key]])}")
        return ", ".join(parts) if parts else "(no ambiguity)"


# ---------------------------------------------------------------------------
# validation

def _structure(d: CofiberDiagram) -> list[Issue]:
    out = []
    for f, src, tgt in ((d.jstar, d.C, d.Y), (d.taustar, d.SX, d.C), (d.sfstar, d.SY, d.SX)):
        if f.source.name != src.name or f.target.name != tgt.name:
            out.append(Issue("malformed", f"{f.name} runs {f.source.name} -> {f.target.name}, "
                                          f"expected {src.name} -> {tgt.name}"))
        if f.shift != 0:
            out.append(Issue("malformed", f"{f.name} must have degree 0"))
    return out


def _resolved_issues(r: CofiberDiagram) -> list[Issue]:
    out: list[Issue] = []
    for m in r.modules:
        rep = validate_module(m)
        out += rep.issues
    for f in r.maps:
        out += [Issue("equivariance", msg) for msg in equivariance_failures(f)]
    top = min(m.max_degree for m in r.modules)
    for e in range(top + 1):
        if not (r.jstar.matrix(e) @ r.taustar.matrix(e)).is_zero():
            out.append(Issue("composition", f"jstar o taustar != 0 in degree {e}"))
        if not (r.taustar.matrix(e) @ r.sfstar.matrix(e)).is_zero():
            out.append(Issue("composition", f"taustar o sfstar != 0 in degree {e}"))
        if r.exact:
            if image_basis(r.taustar.matrix(e)) != kernel_basis(r.jstar.matrix(e)):
                out.append(Issue("exactness", f"im taustar != ker jstar in degree {e}"))
            if image_basis(r.sfstar.matrix(e)) != kernel_basis(r.taustar.matrix(e)):
                out.append(Issue("exactness", f"im sfstar != ker taustar in degree {e}"))
    return out


def _forced_issues(r: CofiberDiagram) -> list[Issue]:
    """Each FORCED entry must be the only value compatible with the module laws,
    the assertions and the equivariance of every map touching its module."""
    out = []
    for pos, m in enumerate(r.modules):
        for k, lab in m.forced:
            deg = m.degree_of(lab)
            stored = m.apply(k, deg, 1 << m.locate(lab)[1])
            survivors = []
            for v in range(1 << m.dim(deg + k)):
                cand = m.with_entry(k, lab, v)
                mods = list(r.modules)
                mods[pos] = cand
                trial = CofiberDiagram(r.name, *mods,
                                       r.jstar.with_modules(mods[1], mods[0]),
                                       r.taustar.with_modules(mods[2], mods[1]),
                                       r.sfstar.with_modules(mods[3], mods[2]), False)
                if validate_module(cand).issues:
                    continue
                if any(equivariance_failures(f) for f in trial.maps):
                    continue
                survivors.append(v)
            if survivors != [stored]:
                shown = ", ".join(m.fmt(deg + k, v) for v in survivors) or "none"
                out.append(Issue("forced", f"Sq{k}({lab}) = {m.fmt(deg + k, stored)} is not forced; "
                                           f"consistent values: {shown}"))
    return out


def validate_diagram(d: CofiberDiagram) -> ValidityReport:
    rep = ValidityReport(d.name, resolutions=d.joint_resolutions())
    rep.issues = _structure(d)
    for f in d.maps:
        rep.issues += map_shape_issues(f)
    if rep.issues:
        return rep
    per: list[list[Issue]] = []
    for idx, a in enumerate(rep.resolutions):
        r = d.resolve(a)
        found = _resolved_issues(r)
        if not found:
            found = _forced_issues(r)
        for i in found:
            i.resolution = idx if len(rep.resolutions) > 1 else None
        per.append(found)
        if not found:
            rep.admissible.append(idx)
    for found in per:
        (rep.excluded if rep.admissible else rep.issues).extend(found)
    return rep


def admissible_diagrams(d: CofiberDiagram) -> list[tuple[dict[str, int], CofiberDiagram]]:
    rep = validate_diagram(d)
    if not rep.ok:
        raise ValueError(f"diagram {d.name} is invalid: " + "; ".join(map(str, rep.issues)))
    return [(rep.resolutions[i], d.resolve(rep.resolutions[i])) for i in rep.admissible]


# ---------------------------------------------------------------------------
# the operations A, B and Delta

def op_A(d: CofiberDiagram, i: int, pair: OperationPair = STANDARD_PAIR) -> tuple[BitMatrix, ...]:
    """Components ``jstar o theta_j`` from ``C_i`` to ``Y_{i+t_j}``."""
    return tuple(d.jstar.matrix(i + t) @ d.C.op_matrix(th, i, t)
                 for th, t in zip(pair.theta, pair.theta_degrees))


def op_B(d: CofiberDiagram, i: int, pair: OperationPair = STANDARD_PAIR) -> BitMatrix:
    """``(u_j) -> sum_j phi_j(sfstar u_j)`` from ``prod SY_{i+t_j}`` to ``SX_{i+n}``."""
    n = pair.degree
    blocks = [d.SX.op_matrix(ph, i + t, n - t) @ d.sfstar.matrix(i + t)
              for ph, t in zip(pair.phi, pair.theta_degrees)]
    return hstack(blocks, d.SX.dim(i + n))


def indeterminacy(m: SteenrodModule, deg: int, pair: OperationPair = STANDARD_PAIR) -> Subspace:
    """``sum_j im(phi_j)`` landing in degree ``deg + n - 1`` (``im Sq3 + im Sq2`` by default)."""
    n = pair.degree
    target = deg + n - 1
    cols: list[int] = []
    for ph, t in zip(pair.phi, pair.theta_degrees):
        src = deg + t - 1
        if src < 0:
            continue
        cols += m.op_matrix(ph, src, n - t).columns()
    return Subspace.span(cols, m.dim(target))


class DeltaError(ValueError):
    pass


@dataclass
class DeltaResult:
    degree: int
    x: int
    components: tuple[int, ...]  # theta_j(x) in C
    lifts: tuple[int, ...]  # chosen w_j in SX with taustar(w_j) = theta_j(x)
    value: int  # sum_j phi_j(w_j) in SX_{i+n}
    image_B: Subspace
    coset: int  # canonical representative modulo im B
    lift_kernels: tuple[Subspace, ...]

    @property
    def nonzero(self) -> bool:
        return self.coset != 0


def in_ker_A(d: CofiberDiagram, i: int, x: int, pair: OperationPair = STANDARD_PAIR) -> bool:
    return all(a.apply(x) == 0 for a in op_A(d, i, pair))


def delta(d: CofiberDiagram, i: int, x: int, pair: OperationPair = STANDARD_PAIR) -> DeltaResult:
    if x >> d.C.dim(i):
        raise DeltaError(f"class is not a vector of {d.C.name} in degree {i}")
    if not in_ker_A(d, i, x, pair):
        raise DeltaError(f"{d.C.fmt(i, x)} is not in ker A")
    n = pair.degree
    comps, lifts, kers = [], [], []
    value = 0
    for th, ph, t in zip(pair.theta, pair.phi, pair.theta_degrees):
        c = d.C.op_matrix(th, i, t).apply(x)
        tau = d.taustar.matrix(i + t)
        w = solve(tau, c)
        if isinstance(w, Unsat):
            raise DeltaError(f"{d.C.fmt(i + t, c)} has no preimage under {d.taustar.name}; "
                             f"the exactness data are inconsistent")
        comps.append(c)
        lifts.append(w)
        kers.append(kernel_basis(tau))
        value ^= d.SX.op_matrix(ph, i + t, n - t).apply(w)
    imB = image_basis(op_B(d, i, pair))
    coset = coset_reduce(imB, value)
    res = DeltaResult(i, x, tuple(comps), tuple(lifts), value, imB, coset, tuple(kers))
    # every other lift differs by ker(taustar); all must give the same coset
    for combo in itertools.product(*(list(k.elements()) for k in kers)):
        v = 0
        for ph, t, w, dw in zip(pair.phi, pair.theta_degrees, lifts, combo):
            v ^= d.SX.op_matrix(ph, i + t, n - t).apply(w ^ dw)
        if coset_reduce(imB, v) != coset:
            raise DeltaError("Delta depends on the choice of lift")
    return res


# ---------------------------------------------------------------------------
# identifying Phi

def _suspension_matches(Y: SteenrodModule, SY: SteenrodModule) -> list[str]:
    """``SY`` must be ``Y`` shifted up by one, position for position."""
    out = []
    for e in range(1, Y.max_degree + 1):
        if SY.dim(e + 1) != Y.dim(e):
            out.append(f"dim {SY.name}_{e + 1} != dim {Y.name}_{e}")
    if out:
        return out
    for e in range(1, Y.max_degree + 1):
        for k in range(1, Y.max_degree - e + 1):
            if SY.sq_matrix(k, e + 1) != Y.sq_matrix(k, e):
                out.append(f"Sq{k} on {SY.name}_{e + 1} differs from {Y.name}_{e}")
    return out


@dataclass
class PhiVerdict:
    verdict: str  # NONZERO, NO_INFORMATION, INCONCLUSIVE
    degree: int
    x: int
    y: int | None = None
    phi_y: int | None = None  # representative in Y_{i+n-1}
    phi_text: str = ""
    indeterminacy_Y: Subspace | None = None
    delta: DeltaResult | None = None
    checks: list[tuple[str, bool]] = field(default_factory=list)
    chain: list[str] = field(default_factory=list)
    failed: str | None = None


def phi_nontrivial(d: CofiberDiagram, i: int, x: int, pair: OperationPair = STANDARD_PAIR) -> PhiVerdict:
    n = pair.degree
    out = PhiVerdict("INCONCLUSIVE", i, x)
    dres = delta(d, i, x, pair)
    out.delta = dres
    Y, C, SX, SY = d.modules
    j_i = d.jstar.matrix(i)
    iso = C.dim(i) == Y.dim(i) and rank(j_i) == C.dim(i)
    out.checks.append((f"{d.jstar.name}: {C.name}_{i} -> {Y.name}_{i} is an isomorphism", iso))
    susp = _suspension_matches(Y, SY)
    out.checks.append((f"{SY.name} is the suspension of {Y.name}", not susp))
    top = i + n
    sf = d.sfstar.matrix(top)
    inj = rank(sf) == SY.dim(top)
    out.checks.append((f"{d.sfstar.name}: {SY.name}_{top} -> {SX.name}_{top} is injective", inj))
    for text, ok in out.checks:
        if not ok:
            out.failed = text
            return out
    y = j_i.apply(x)
    out.y = y
    ind = indeterminacy(Y, i, pair)
    out.indeterminacy_Y = ind
    out.chain.append(f"y = {d.jstar.name}({C.fmt(i, x)}) = {Y.fmt(i, y)} in {Y.name}_{i}")
    comp_txt = ", ".join(f"{th}({C.fmt(i, x)}) = {C.fmt(i + t, c)}"
                         for th, t, c in zip(pair.theta, pair.theta_degrees, dres.components))
    out.chain.append(comp_txt)
    lift_txt = ", ".join(f"w{j + 1} = {SX.fmt(i + t, w)}" for j, (t, w) in
                         enumerate(zip(pair.theta_degrees, dres.lifts)))
    out.chain.append(f"lifts through {d.taustar.name}: {lift_txt}")
    out.chain.append(f"Delta = {SX.fmt(top, dres.value)} in {SX.name}_{top}, "
                     f"im B has dimension {dres.image_B.dim}")
    if not dres.nonzero:
        out.verdict = "NO_INFORMATION"
        out.chain.append("Delta vanishes modulo im B; no conclusion about Phi(y)")
        return out
    z = solve(sf, dres.value)
    if isinstance(z, Unsat):
        raise DeltaError(f"Delta is not in the image of {d.sfstar.name}; the diagram is inconsistent")
    # the suspension isomorphism matches bases position by position
    out.phi_y = coset_reduce(ind, z)
    out.phi_text = Y.fmt(top - 1, out.phi_y)
    out.verdict = "NONZERO"
    out.chain.append(f"{d.sfstar.name}^-1(Delta) = {SY.fmt(top, z)}, desuspends to "
                     f"Phi(y) = {out.phi_text} in {Y.name}_{top - 1} "
                     f"(indeterminacy dimension {ind.dim})")
    return out


# ---------------------------------------------------------------------------
# certificates

@dataclass
class ObstructionReport:
    diagram: str
    x_label: str
    degree: int
    k: int
    invariant: str
    verdict: str  # REFUTED (Swgt >= k+1), NO_INFORMATION, INCONCLUSIVE
    resolution: dict[str, int] = field(default_factory=dict)
    resolution_text: str = ""
    phi: PhiVerdict | None = None
    u_text: str = ""
    checks: list[tuple[str, bool]] = field(default_factory=list)
    chain: list[str] = field(default_factory=list)
    payload: dict[str, Any] = field(default_factory=dict)
    notes: list[str] = field(default_factory=lambda: [HSPACE_NOTE])

    @property
    def conclusion(self) -> str:
        if self.verdict == "REFUTED":
            return f"Swgt ≥ {self.k + 1}, {self.invariant} ≥ {self.k + 1}"
        if self.verdict == "NO_INFORMATION":
            return "no information (Delta vanishes)"
        failed = next((t for t, ok in self.checks if not ok), None)
        return f"INCONCLUSIVE ({failed})" if failed else "INCONCLUSIVE"

    def lines(self) -> list[str]:
        out = [f"certificate for {self.diagram}, class {self.x_label} in degree {self.degree}"
               + (f"  [{self.resolution_text}]" if self.resolution else "")]
        out += [f"  {'ok  ' if ok else 'FAIL'} {t}" for t, ok in self.checks]
        out += [f"  {c}" for c in self.chain]
        out.append(f"  verdict: {self.conclusion}")
        out += [f"  note: {n}" for n in self.notes]
        return out


def _rows(m: BitMatrix) -> dict[str, Any]:
    return {"rows": m.nrows, "cols": m.ncols, "data": list(m.data)}


def _mat(p: Mapping[str, Any]) -> BitMatrix:
    return BitMatrix(p["rows"], p["cols"], tuple(p["data"]))


def swgt_certificate(base: SteenrodModule, qk_star: ModuleMap, d: CofiberDiagram, i: int, x: int,
                     u: int, k: int = 1, invariant: str = "secat",
                     pair: OperationPair = STANDARD_PAIR) -> ObstructionReport:
    """Refute a retraction of ``qk_star`` commuting with the secondary operation.

    A retraction ``s`` would give ``u = s(qk(u)) = s(Phi(y)) = Phi(s(y))``; when the
    base vanishes in degree ``i`` this is ``Phi(0) = 0`` modulo the base's
    indeterminacy, contradicting ``u != 0``.
    """
    n = pair.degree
    top = i + n - 1
    x_label = d.C.fmt(i, x)
    rep = ObstructionReport(d.name, x_label, i, k, invariant, "INCONCLUSIVE")
    if qk_star.target.name != d.Y.name or qk_star.source.name != base.name:
        raise ValueError(f"{qk_star.name} must run {base.name} -> {d.Y.name}")
    ph = phi_nontrivial(d, i, x, pair)
    rep.phi = ph
    rep.checks += ph.checks
    rep.chain += ph.chain
    if ph.verdict == "NO_INFORMATION":
        rep.verdict = "NO_INFORMATION"
        return rep
    if ph.verdict != "NONZERO":
        return rep
    rep.u_text = base.fmt(top, u)
    if not u:
        raise ValueError("u must be nonzero")
    qu = qk_star.apply(top, u)
    if coset_reduce(ph.indeterminacy_Y, qu) != ph.phi_y:
        raise ValueError(f"Phi(y) = {ph.phi_text} is not {qk_star.name}({rep.u_text}): inconsistent input")
    rep.chain.append(f"Phi(y) = {ph.phi_text} = {qk_star.name}({rep.u_text})")
    zero_base = base.dim(i) == 0
    rep.checks.append((f"{base.name} is zero in degree {i}", zero_base))
    ind_base = indeterminacy(base, i, pair)
    rep.checks.append((f"indeterminacy of Phi on {base.name}_{i} is zero", ind_base.dim == 0))
    if not (zero_base and ind_base.dim == 0):
        return rep
    rep.verdict = "REFUTED"
    rep.chain.append(f"{rep.u_text} = s({qk_star.name}({rep.u_text})) = s(Phi(y)) = Phi(s(y)) = Phi(0) = 0, "
                     f"a contradiction")
    rep.chain.append(f"no retraction of {qk_star.name} commutes with Phi, so Swgt ≥ {k + 1} "
                     f"and {invariant} ≥ {k + 1}")
    rep.payload = _payload(base, qk_star, d, i, x, u, pair, ph)
    return rep


def _payload(base, qk_star, d: CofiberDiagram, i, x, u, pair: OperationPair, ph: PhiVerdict) -> dict:
    n = pair.degree
    top = i + n
    dres = ph.delta
    comps = []
    for th, phi_op, t, w in zip(pair.theta, pair.phi, pair.theta_degrees, dres.lifts):
        comps.append({
            "t": t,
            "theta_C": _rows(d.C.op_matrix(th, i, t)),
            "jstar": _rows(d.jstar.matrix(i + t)),
            "taustar": _rows(d.taustar.matrix(i + t)),
            "phi_SX": _rows(d.SX.op_matrix(phi_op, i + t, n - t)),
            "sfstar": _rows(d.sfstar.matrix(i + t)),
            "lift": w,
            "phi_Y": _rows(d.Y.op_matrix(phi_op, i + t - 1, n - t)),
            "phi_base": _rows(base.op_matrix(phi_op, i + t - 1, n - t)),
        })
    return {
        "degree": i,
        "x": x,
        "C_dim": d.C.dim(i),
        "Y_dim": d.Y.dim(i),
        "jstar_i": _rows(d.jstar.matrix(i)),
        "components": comps,
        "delta": dres.value,
        "sfstar_top": _rows(d.sfstar.matrix(top)),
        "phi_y": ph.phi_y,
        "qk_star": _rows(qk_star.matrix(top - 1)),
        "u": u,
        "base_dim_i": base.dim(i),
    }


def replay_certificate(p: Mapping[str, Any]) -> list[str]:
    """Re-derive a REFUTED verdict from the stored matrices; returns failures (empty means ok)."""
    bad = []
    x = p["x"]
    j_i = _mat(p["jstar_i"])
    if not (p["C_dim"] == p["Y_dim"] and rank(j_i) == p["C_dim"]):
        bad.append("jstar is not an isomorphism in degree i")
    value = 0
    imB_cols: list[int] = []
    ind_Y: list[int] = []
    ind_base: list[int] = []
    for c in p["components"]:
        th, js, tau = _mat(c["theta_C"]), _mat(c["jstar"]), _mat(c["taustar"])
        phi_sx, sf = _mat(c["phi_SX"]), _mat(c["sfstar"])
        cx = th.apply(x)
        if js.apply(cx):
            bad.append(f"x is not in ker A (component of degree {c['t']})")
        if tau.apply(c["lift"]) != cx:
            bad.append(f"stored lift of degree {c['t']} does not map to theta(x)")
        value ^= phi_sx.apply(c["lift"])
        imB_cols += (phi_sx @ sf).columns()
        ind_Y += _mat(c["phi_Y"]).columns()
        ind_base += _mat(c["phi_base"]).columns()
    if value != p["delta"]:
        bad.append("Delta does not match the stored value")
    sf_top = _mat(p["sfstar_top"])
    imB = Subspace.span(imB_cols, sf_top.nrows)
    # changing a lift by ker(taustar) must not move Delta off its coset
    for c in p["components"]:
        tau, phi_sx = _mat(c["taustar"]), _mat(c["phi_SX"])
        for kv in kernel_basis(tau).basis:
            if phi_sx.apply(kv) not in imB:
                bad.append("Delta depends on the choice of lift")
    if value in imB:
        bad.append("Delta vanishes modulo im B")
    if rank(sf_top) != sf_top.ncols:
        bad.append("sfstar is not injective in degree i+n")
    z = solve(sf_top, value)
    if isinstance(z, Unsat):
        bad.append("Delta is not in the image of sfstar")
    else:
        iY = Subspace.span(ind_Y, sf_top.ncols)
        if coset_reduce(iY, z) != p["phi_y"]:
            bad.append("Phi(y) does not match")
        if coset_reduce(iY, _mat(p["qk_star"]).apply(p["u"])) != p["phi_y"]:
            bad.append("Phi(y) is not the image of u")
    if not p["u"]:
        bad.append("u is zero")
    if p["base_dim_i"] != 0:
        bad.append("base is nonzero in degree i")
    if any(ind_base):
        bad.append("base indeterminacy is nonzero")
    return bad


@dataclass
class JointCertificate:
    diagram: str
    reports: list[ObstructionReport]

    @property
    def verdict(self) -> str:
        vs = {r.verdict for r in self.reports}
        return vs.pop() if len(vs) == 1 else "MIXED"

    @property
    def conclusion(self) -> str:
        if self.verdict == "MIXED":
            return "INCONCLUSIVE (verdict depends on the ambiguity resolution)"
        return self.reports[0].conclusion

    def lines(self) -> list[str]:
        out = []
        for r in self.reports:
            out += r.lines()
        if len(self.reports) > 1:
            out.append(f"joint verdict over {len(self.reports)} admissible resolutions: {self.conclusion}")
        return out


def certify(base: SteenrodModule, qk_star: ModuleMap, d: CofiberDiagram, x_label: str, u_label: str,
            k: int = 1, invariant: str = "secat", pair: OperationPair = STANDARD_PAIR) -> JointCertificate:
    """Run :func:`swgt_certificate` under every admissible resolution of the diagram."""
    reports = []
    i, x = d.C.element(x_label)
    du, u = base.element(u_label)
    if du != i + pair.degree - 1:
        raise ValueError(f"{u_label} has degree {du}; Phi of a degree-{i} class lives in degree "
                         f"{i + pair.degree - 1}")
    for a, r in admissible_diagrams(d):
        q = qk_star.with_modules(base.resolve(a) if base.slots else base, r.Y)
        rep = swgt_certificate(base, q, r, i, x, u, k, invariant, pair)
        rep.resolution = a
        rep.resolution_text = d.describe_resolution(a) if a else ""
        reports.append(rep)
    return JointCertificate(d.name, reports)
