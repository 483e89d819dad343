"""Primary lower bounds: injectivity (wgt), nilpotency of the kernel, and
Steenrod-module retractions (Mwgt)."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .f2linalg import BitMatrix, Subspace, Unsat, kernel_basis, minimal_inconsistent_subset, rank, solve
from .modules import ModuleMap, SteenrodModule, admissible_resolutions, equivariance_failures


def is_injective(f: ModuleMap) -> bool:
    """True iff every degreewise matrix has full column rank."""
    return all(rank(f.matrix(d)) == f.source.dim(d) for d in f.source.degrees())


def _kernel(f: ModuleMap) -> dict[int, Subspace]:
    out = {}
    for d in f.source.degrees():
        k = kernel_basis(f.matrix(d))
        if k.dim:
            out[d] = k
    return out


def nil_ker(f: ModuleMap) -> int:
    """Largest ``n`` with a nonzero ``n``-fold product of kernel elements."""
    m = f.source
    if not m.is_algebra or not f.target.is_algebra:
        raise ValueError(f"{f.name}: nil-ker needs products on both source and target")
    ker = _kernel(f)
    if not ker:
        return 0
    power = ker
    n = 1
    while True:
        nxt: dict[int, list[int]] = {}
        for d1, s1 in power.items():
            for d2, s2 in ker.items():
                if d1 + d2 > m.max_degree:
                    continue
                for u in s1.basis:
                    for v in s2.basis:
                        p = m.mul(d1, u, d2, v)
                        if p:
                            nxt.setdefault(d1 + d2, []).append(p)
        if not nxt:
            return n
        power = {d: Subspace.span(vs, m.dim(d)) for d, vs in nxt.items()}
        n += 1
        if n > m.total_dim + 1:
            raise ValueError(f"{f.name}: kernel ideal is not nilpotent")


# ---------------------------------------------------------------------------
# retractions

@dataclass
class Equation:
    """One scalar equation in the entries of the unknown retraction."""

    row: int
    rhs: int
    degree: int
    kind: str  # "identity" or "commute"
    text: str
    k: int = 0
    source_label: str = ""
    row_label: str = ""


@dataclass
class RetractionCertificate:
    map_name: str
    verdict: str
    resolution: dict[str, int] = field(default_factory=dict)
    resolution_text: str = ""
    matrices: dict[int, BitMatrix] = field(default_factory=dict)
    witness: Unsat | None = None
    chain: str | None = None
    equations: list[str] = field(default_factory=list)
    ks: tuple[int, ...] = ()

    @property
    def sat(self) -> bool:
        return self.verdict == "SAT"

    def lines(self) -> list[str]:
        out = [f"retraction for {self.map_name}: {self.verdict}"
               + (f"  [{self.resolution_text}]" if self.resolution else "")]
        if self.sat:
            out.append("  s verified: s o i = id and s commutes with every Sq^k")
        else:
            if self.chain:
                out.append(f"  contradiction: {self.chain}")
            if self.witness is not None:
                out.append(f"  rank witness: rank {self.witness.rank} < augmented rank "
                           f"{self.witness.augmented_rank}")
            out += [f"  needs: {e}" for e in self.equations]
        return out


@dataclass
class RetractionResult:
    map_name: str
    per_resolution: list[RetractionCertificate]
    precondition: str | None = None

    @property
    def verdict(self) -> str:
        if self.precondition:
            return "UNSAT"
        vs = {c.verdict for c in self.per_resolution}
        return vs.pop() if len(vs) == 1 else "MIXED"

    @property
    def sat(self) -> bool:
        return self.verdict == "SAT"

    def lines(self) -> list[str]:
        if self.precondition:
            return [f"retraction for {self.map_name}: UNSAT ({self.precondition})"]
        out = []
        for c in self.per_resolution:
            out += c.lines()
        if len(self.per_resolution) > 1:
            out.append(f"joint verdict over {len(self.per_resolution)} admissible resolutions: "
                       f"{self.verdict}")
        return out


def _ks_for(top: int, ks: str | Iterable[int]) -> tuple[int, ...]:
    if ks == "all":
        return tuple(range(1, top + 1))
    if ks == "generators":
        out, p = [], 1
        while p <= top:
            out.append(p)
            p *= 2
        return tuple(out)
    return tuple(k for k in ks if 1 <= k <= top)


class _Unknowns:
    """Index of the entries ``s_d[r, c]``: row ``r`` of M_d, column ``c`` of N_d."""

    def __init__(self, m: SteenrodModule, n: SteenrodModule):
        self.offset: dict[int, int] = {}
        total = 0
        for d in n.degrees():
            if m.dim(d):
                self.offset[d] = total
                total += m.dim(d) * n.dim(d)
        self.count = total
        self.m, self.n = m, n

    def var(self, d: int, r: int, c: int) -> int | None:
        if d not in self.offset:
            return None
        return self.offset[d] + r * self.n.dim(d) + c

    def unpack(self, v: int) -> dict[int, BitMatrix]:
        out = {}
        for d, off in self.offset.items():
            rows = []
            for r in range(self.m.dim(d)):
                row = 0
                for c in range(self.n.dim(d)):
                    if (v >> (off + r * self.n.dim(d) + c)) & 1:
                        row |= 1 << c
                rows.append(row)
            out[d] = BitMatrix(self.m.dim(d), self.n.dim(d), tuple(rows))
        return out


def retraction_system(i: ModuleMap, ks: str | Iterable[int] = "all") -> tuple[_Unknowns, list[Equation]]:
    """Linear system for ``s`` with ``s o i = id`` and ``s Sq^k = Sq^k s``, ordered by degree."""
    m, n = i.source, i.target
    unk = _Unknowns(m, n)
    eqs: list[Equation] = []
    top = max(m.max_degree, n.max_degree)
    kset = _ks_for(top, ks)
    for d in range(top + 1):
        # identity: (s_d i_d)[r, c'] = delta
        im = i.matrix(d)
        for r in range(m.dim(d)):
            for c2 in range(m.dim(d)):
                row = 0
                for c in range(n.dim(d)):
                    if im[c, c2]:
                        row |= 1 << unk.var(d, r, c)
                eqs.append(Equation(row, int(r == c2), d, "identity",
                                    f"s({i.name}({m.labels(d)[c2]})) has {m.labels(d)[r]}-coefficient {int(r == c2)}",
                                    row_label=m.labels(d)[r], source_label=m.labels(d)[c2]))
        # commutation: s_{d} Sq^k_N - Sq^k_M s_{d-k} on N_{d-k}, entry [r, c]
        for k in kset:
            e = d - k
            if e < 0 or not n.dim(e) or not m.dim(d):
                continue
            sqn = n.sq_matrix(k, e)
            sqm = m.sq_matrix(k, e)
            for r in range(m.dim(d)):
                for c in range(n.dim(e)):
                    row = 0
                    for j in range(n.dim(d)):
                        if sqn[j, c]:
                            row ^= 1 << unk.var(d, r, j)
                    for j in range(m.dim(e)):
                        if sqm[r, j]:
                            row ^= 1 << unk.var(e, j, c)
                    eqs.append(Equation(row, 0, d, "commute",
                                        f"{m.labels(d)[r]}-coefficient of s(Sq{k} {n.labels(e)[c]}) "
                                        f"= that of Sq{k}(s({n.labels(e)[c]}))",
                                        k=k, source_label=n.labels(e)[c], row_label=m.labels(d)[r]))
    return unk, eqs


def _chain(i: ModuleMap, a: Equation, b: Equation) -> str | None:
    # Two equations with the same left side and different right sides; render the
    # contradiction x = s(i(x)) = s(Sq^k z) = Sq^k(s(z)) = Sq^k(0) = 0 when M_{d-k} = 0.
    if a.row != b.row or a.rhs == b.rhs:
        return None
    ident, comm = (a, b) if a.kind == "identity" else (b, a)
    if ident.kind != "identity" or comm.kind != "commute" or ident.rhs != 1:
        return None
    m = i.source
    x = ident.row_label
    d = ident.degree
    if m.dim(d - comm.k) or x != comm.row_label:
        return None
    ix = i.image_of(x)
    z = comm.source_label
    return (f"{x} = s*({i.name}*({x})) = s*({ix}) = s*(Sq{comm.k} {z}) = "
            f"Sq{comm.k}(s*({z})) = Sq{comm.k}(0) = 0")


def _solve_one(i: ModuleMap, ks) -> RetractionCertificate:
    unk, eqs = retraction_system(i, ks)
    used = _ks_for(max(i.source.max_degree, i.target.max_degree), ks)
    mat = BitMatrix(len(eqs), unk.count, tuple(e.row for e in eqs))
    rhs = 0
    for j, e in enumerate(eqs):
        rhs |= e.rhs << j
    sol = solve(mat, rhs)
    if not isinstance(sol, Unsat):
        mats = unk.unpack(sol)
        if not verify_retraction(i, mats):
            raise AssertionError("solver produced an invalid retraction")
        return RetractionCertificate(i.name, "SAT", matrices=mats, ks=used)
    order = list(reversed(range(len(eqs))))
    core = minimal_inconsistent_subset([e.row for e in eqs], [e.rhs for e in eqs], unk.count, order)
    chain = _chain(i, eqs[core[0]], eqs[core[1]]) if len(core) == 2 else None
    return RetractionCertificate(i.name, "UNSAT", witness=sol, chain=chain,
                                 equations=[eqs[j].text for j in core], ks=used)


def retraction_exists(i: ModuleMap, ks: str | Iterable[int] = "all") -> RetractionResult:
    """Decide whether ``i`` has a left inverse that commutes with the squares.

    Runs once per admissible joint resolution of the ambiguity slots of source
    and target (skipping those under which ``i`` itself is not equivariant).
    """
    if i.shift != 0:
        raise ValueError(f"{i.name}: retractions need a degree-0 map")
    if not is_injective(i):
        return RetractionResult(i.name, [], precondition=f"{i.name} is not injective")
    src = admissible_resolutions(i.source)
    tgt = admissible_resolutions(i.target)
    if not src or not tgt:
        raise ValueError(f"{i.name}: no admissible resolution of its modules")
    certs = []
    for sa, sm in src:
        for ta, tm in tgt:
            assignment = {**sa, **ta}
            f = i.with_modules(sm, tm)
            if equivariance_failures(f):
                continue
            c = _solve_one(f, ks)
            c.resolution = assignment
            c.resolution_text = ", ".join(x for x in (i.source.describe_resolution(sa) if sa else "",
                                                      i.target.describe_resolution(ta) if ta else "") if x)
            certs.append(c)
    if not certs:
        raise ValueError(f"{i.name} is not equivariant under any admissible resolution")
    return RetractionResult(i.name, certs)


def verify_retraction(i: ModuleMap, s: Mapping[int, BitMatrix]) -> bool:
    """Check ``s o i = id`` and ``s Sq^k = Sq^k s`` for every k, straight from the matrices."""
    m, n = i.source, i.target

    def sm(d: int) -> BitMatrix:
        got = s.get(d)
        return got if got is not None else BitMatrix.zeros(m.dim(d), n.dim(d))

    for d in range(max(m.max_degree, n.max_degree) + 1):
        if sm(d).shape != (m.dim(d), n.dim(d)):
            return False
        if sm(d) @ i.matrix(d) != BitMatrix.identity(m.dim(d)):
            return False
    for e in range(n.max_degree + 1):
        for k in range(1, n.max_degree - e + 1):
            if sm(e + k) @ n.sq_matrix(k, e) != m.sq_matrix(k, e) @ sm(e):
                return False
    return True


# ---------------------------------------------------------------------------
# reports

@dataclass
class WeightReport:
    maps: list[str]
    first_k: int
    injective: list[bool]
    retractions: list[RetractionResult]
    flags: list[str] = field(default_factory=list)

    def _bound(self, name: str, hits: list[bool]) -> tuple[str, int, int | None]:
        for j, h in enumerate(hits):
            if h:
                v = self.first_k + j
                if v == 0:
                    return f"{name} = 0", 0, 0
                if j == 0:
                    return f"{name} ≤ {v} (earlier maps not given)", 0, v
                # every earlier map fails, so v is also a lower bound
                return f"{name} = {v} (≥ {v} and ≤ {v} given data)", v, v
        lo = self.first_k + len(hits)
        return f"{name} ≥ {lo} (no map in the list qualifies)", lo, None

    @property
    def wgt(self) -> tuple[str, int, int | None]:
        return self._bound("wgt", self.injective)

    @property
    def mwgt(self) -> tuple[str, int, int | None]:
        return self._bound("Mwgt", [r.sat for r in self.retractions])

    def lines(self) -> list[str]:
        if not self.maps:
            return []
        out = []
        for j, name in enumerate(self.maps):
            k = self.first_k + j
            out.append(f"k={k} {name}: injective={'yes' if self.injective[j] else 'no'}, "
                       f"retraction={self.retractions[j].verdict}")
        out.append(self.wgt[0])
        out.append(self.mwgt[0])
        out += [f"warning: {f}" for f in self.flags]
        out.append("note: retractions are of Steenrod modules only; products are not required to be preserved")
        return out


def weight_report(maps: Sequence[ModuleMap], first_k: int = 0,
                  ks: str | Iterable[int] = "all") -> WeightReport:
    """Injectivity and retraction verdicts for ``q(first_k)*, q(first_k+1)*, ...``."""
    inj = [is_injective(f) for f in maps]
    rets = [retraction_exists(f, ks) for f in maps]
    rep = WeightReport([f.name for f in maps], first_k, inj, rets)
    # q(k) factors through q(k+1), so both properties persist as k grows
    for j in range(len(maps) - 1):
        if inj[j] and not inj[j + 1]:
            rep.flags.append(f"{maps[j].name} injective but {maps[j + 1].name} is not")
        if rets[j].sat and not rets[j + 1].sat:
            rep.flags.append(f"{maps[j].name} retracts but {maps[j + 1].name} does not")
    for j, r in enumerate(rets):
        if r.sat and not inj[j]:
            rep.flags.append(f"{maps[j].name} retracts without being injective")
        if r.verdict == "MIXED":
            rep.flags.append(f"{maps[j].name}: retraction verdict depends on the ambiguity resolution")
    return rep
