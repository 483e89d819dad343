"""Finite graded modules over the mod-2 Steenrod algebra.

A module stores, for each degree, a tuple of basis labels and, for each
``(k, d)``, the matrix of ``Sq^k`` from degree ``d`` to ``d + k``.  Entries the
input leaves open are kept as ambiguity slots; every check downstream runs
over all resolutions of them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence

from .f2linalg import BitMatrix, rank
from .steenrod import AdmissibleSum, SqWord, adem_rewrite, binom_mod2, format_word


@dataclass(frozen=True)
class AmbiguitySlot:
    k: int
    label: str
    alternatives: tuple[int, ...]
    key: str


@dataclass
class Issue:
    kind: str
    message: str
    resolution: int | None = None

    def __str__(self) -> str:
        tag = f" [resolution {self.resolution}]" if self.resolution is not None else ""
        return f"{self.kind}: {self.message}{tag}"


@dataclass
class ValidityReport:
    subject: str
    issues: list[Issue] = field(default_factory=list)
    resolutions: list[dict[str, int]] = field(default_factory=lambda: [{}])
    admissible: list[int] = field(default_factory=list)
    excluded: list[Issue] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.issues

    @property
    def malformed(self) -> list[Issue]:
        return [i for i in self.issues if i.kind == "malformed"]

    def lines(self) -> list[str]:
        head = f"{self.subject}: {'valid' if self.ok else 'INVALID'}"
        if len(self.resolutions) > 1:
            head += f" ({len(self.admissible)}/{len(self.resolutions)} resolutions admissible)"
        out = [head]
        out += [f"  {i}" for i in self.issues]
        out += [f"  excluded {i}" for i in self.excluded]
        return out


def _join_label(x: str, y: str) -> str:
    if x == "1":
        return y
    if y == "1":
        return x
    return f"{x}.{y}"


class SteenrodModule:
    """A finite graded F2-vector space with Steenrod square matrices.

    Plain modules carry no products; an algebra additionally has a unit label
    and a product table mapping basis pairs to vectors.
    """

    def __init__(
        self,
        name: str,
        max_degree: int,
        basis: Mapping[int, Sequence[str]],
        sq: Mapping[tuple[int, int], BitMatrix] | None = None,
        *,
        slots: Iterable[AmbiguitySlot] = (),
        asserts: Iterable[tuple[int, str]] = (),
        forced: Iterable[tuple[int, str]] = (),
        products: Mapping[tuple[str, str], int] | None = None,
        unit: str | None = None,
        unspecified: Iterable[tuple[int, str]] = (),
        derived: tuple[str, ...] | None = None,
        provenance: Iterable[str] = (),
    ):
        self.name = name
        self.max_degree = max_degree
        self.basis: dict[int, tuple[str, ...]] = {
            d: tuple(ls) for d, ls in sorted(basis.items()) if len(ls)
        }
        self.sq: dict[tuple[int, int], BitMatrix] = {
            kd: m for kd, m in sorted((sq or {}).items()) if not m.is_zero()
        }
        self.slots = tuple(slots)
        self.asserts = tuple(asserts)
        self.forced = tuple(forced)
        self.products = None if products is None else {
            p: v for p, v in sorted(products.items()) if v
        }
        self.unit = unit
        self.unspecified = frozenset(unspecified)
        self.derived = derived
        self.provenance = tuple(provenance)
        self._where: dict[str, tuple[int, int]] = {}
        for d, ls in self.basis.items():
            for i, lab in enumerate(ls):
                if lab in self._where:
                    raise ValueError(f"{name}: duplicate label {lab!r}")
                self._where[lab] = (d, i)

    # -- structure ----------------------------------------------------------
    def _key(self) -> tuple:
        return (self.name, self.max_degree, self.basis, self.sq, self.slots, self.asserts,
                self.forced, self.products, self.unit, self.unspecified, self.derived,
                self.provenance)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, SteenrodModule) and self._key() == other._key()

    def __repr__(self) -> str:
        dims = ", ".join(f"{d}:{len(ls)}" for d, ls in self.basis.items())
        return f"SteenrodModule({self.name!r}, D={self.max_degree}, dims={{{dims}}})"

    def dim(self, d: int) -> int:
        return len(self.basis.get(d, ()))

    def labels(self, d: int) -> tuple[str, ...]:
        return self.basis.get(d, ())

    def degrees(self) -> list[int]:
        return list(self.basis)

    def dims(self) -> list[int]:
        return [self.dim(d) for d in range(self.max_degree + 1)]

    @property
    def total_dim(self) -> int:
        return sum(len(ls) for ls in self.basis.values())

    @property
    def is_algebra(self) -> bool:
        return self.products is not None

    def __contains__(self, label: str) -> bool:
        return label in self._where

    def locate(self, label: str) -> tuple[int, int]:
        try:
            return self._where[label]
        except KeyError:
            raise KeyError(f"{self.name}: unknown label {label!r}") from None

    def degree_of(self, label: str) -> int:
        return self.locate(label)[0]

    def basis_vector(self, label: str) -> tuple[int, int]:
        d, i = self.locate(label)
        return d, 1 << i

    def element(self, expr: str, degree: int | None = None) -> tuple[int, int]:
        """Parse ``"a + b"`` (or ``"0"``) into ``(degree, vector)``."""
        terms = [t.strip() for t in expr.split("+")]
        if any(not t for t in terms):
            raise ValueError(f"malformed expression {expr!r}")
        v = 0
        deg = degree
        for t in terms:
            if t == "0":
                continue
            d, i = self.locate(t)
            if deg is None:
                deg = d
            elif d != deg:
                raise ValueError(f"{self.name}: {expr!r} mixes degrees {deg} and {d}")
            v ^= 1 << i
        if deg is None:
            raise ValueError(f"cannot infer the degree of {expr!r}")
        return deg, v

    def fmt(self, d: int, v: int) -> str:
        labs = self.labels(d)
        parts = [labs[i] for i in range(len(labs)) if (v >> i) & 1]
        return " + ".join(parts) if parts else "0"

    def sq_matrix(self, k: int, d: int) -> BitMatrix:
        if k == 0:
            return BitMatrix.identity(self.dim(d))
        m = self.sq.get((k, d))
        if m is not None:
            return m
        return BitMatrix.zeros(self.dim(d + k), self.dim(d))

    def word_matrix(self, word: SqWord, d: int) -> BitMatrix:
        m = BitMatrix.identity(self.dim(d))
        deg = d
        for k in reversed(word):
            m = self.sq_matrix(k, deg) @ m
            deg += k
        return m

    def op_matrix(self, op: AdmissibleSum, d: int, degree: int) -> BitMatrix:
        """Matrix of an admissible sum of the given degree on ``M_d``."""
        m = BitMatrix.zeros(self.dim(d + degree), self.dim(d))
        for w in op:
            m = m + self.word_matrix(w, d)
        return m

    def apply(self, k: int, d: int, v: int) -> int:
        return self.sq_matrix(k, d).apply(v)

    def mul(self, d1: int, u: int, d2: int, v: int) -> int:
        """Product of ``u`` in degree ``d1`` with ``v`` in degree ``d2``."""
        if self.products is None:
            raise ValueError(f"{self.name} carries no products")
        out = 0
        l1, l2 = self.labels(d1), self.labels(d2)
        for i in range(len(l1)):
            if not (u >> i) & 1:
                continue
            for j in range(len(l2)):
                if (v >> j) & 1:
                    out ^= self._basis_product(l1[i], l2[j])
        return out

    def _basis_product(self, x: str, y: str) -> int:
        if self.unit is not None:
            if x == self.unit:
                return 1 << self.locate(y)[1]
            if y == self.unit:
                return 1 << self.locate(x)[1]
        return self.products.get((x, y), 0) if self.products else 0

    # -- derived copies -------------------------------------------------------
    def _replace(self, **kw) -> SteenrodModule:
        args = dict(
            name=self.name, max_degree=self.max_degree, basis=self.basis, sq=self.sq,
            slots=self.slots, asserts=self.asserts, forced=self.forced, products=self.products,
            unit=self.unit, unspecified=self.unspecified, derived=self.derived,
            provenance=self.provenance,
        )
        args.update(kw)
        name = args.pop("name")
        max_degree = args.pop("max_degree")
        basis = args.pop("basis")
        sq = args.pop("sq")
        return SteenrodModule(name, max_degree, basis, sq, **args)

    def renamed(self, name: str) -> SteenrodModule:
        return self._replace(name=name)

    def with_entry(self, k: int, label: str, v: int) -> SteenrodModule:
        """Copy with the column of ``Sq^k`` at ``label`` set to ``v``."""
        d, i = self.locate(label)
        if v >> self.dim(d + k):
            raise ValueError("value exceeds the target dimension")
        sq = dict(self.sq)
        sq[(k, d)] = self.sq_matrix(k, d).with_column(i, v)
        return self._replace(sq=sq)

    @property
    def slot_keys(self) -> tuple[str, ...]:
        return tuple(s.key for s in self.slots)

    def resolutions(self) -> list[dict[str, int]]:
        keys = self.slot_keys
        sizes = [len(s.alternatives) for s in self.slots]
        return [dict(zip(keys, c)) for c in itertools.product(*(range(n) for n in sizes))]

    def resolve(self, assignment: Mapping[str, int]) -> SteenrodModule:
        """Fill every ambiguity slot; ``assignment`` maps slot keys to choices."""
        if not self.slots:
            return self
        m = self._replace(slots=())
        for s in self.slots:
            if s.key not in assignment:
                raise KeyError(f"{self.name}: no choice for slot {s.key}")
            m = m.with_entry(s.k, s.label, s.alternatives[assignment[s.key]])
        return m

    def describe_resolution(self, assignment: Mapping[str, int]) -> str:
        parts = []
        for s in self.slots:
            d = self.degree_of(s.label)
            v = s.alternatives[assignment[s.key]]
            parts.append(f"Sq{s.k}({s.label}) = {self.fmt(d + s.k, v)}")
        return ", ".join(parts) if parts else "(no ambiguity)"


# ---------------------------------------------------------------------------
# validation

def _structure_issues(m: SteenrodModule) -> list[Issue]:
    out = []
    for d in m.basis:
        if not 0 <= d <= m.max_degree:
            out.append(Issue("malformed", f"basis in degree {d} outside [0, {m.max_degree}]"))
    for (k, d), mat in m.sq.items():
        if k < 1:
            out.append(Issue("malformed", f"stored Sq{k} in degree {d}"))
        elif d + k > m.max_degree:
            out.append(Issue("malformed", f"Sq{k} from degree {d} lands beyond MAXDEG"))
        elif mat.shape != (m.dim(d + k), m.dim(d)):
            out.append(Issue("malformed", f"Sq{k} on degree {d} has shape {mat.shape}, "
                                          f"expected {(m.dim(d + k), m.dim(d))}"))
    for s in m.slots:
        if s.label not in m:
            out.append(Issue("malformed", f"slot on unknown label {s.label!r}"))
            continue
        t = m.degree_of(s.label) + s.k
        for v in s.alternatives:
            if v >> m.dim(t):
                out.append(Issue("malformed", f"slot Sq{s.k}({s.label}) alternative outside degree {t}"))
    if m.products is not None:
        for (x, y), v in m.products.items():
            if x not in m or y not in m:
                out.append(Issue("malformed", f"product of unknown labels {x!r}, {y!r}"))
                continue
            t = m.degree_of(x) + m.degree_of(y)
            if v >> m.dim(t):
                out.append(Issue("malformed", f"product {x}*{y} outside degree {t}"))
        if m.unit is not None and (m.unit not in m or m.degree_of(m.unit) != 0):
            out.append(Issue("malformed", f"unit {m.unit!r} is not a degree-0 label"))
    return out


def _law_issues(m: SteenrodModule) -> list[Issue]:
    out: list[Issue] = []
    D = m.max_degree
    for (k, d), mat in m.sq.items():
        if k > d and not mat.is_zero():
            out.append(Issue("instability", f"Sq{k} nonzero on degree {d}"))
    for d in m.degrees():
        for b in range(1, D - d + 1):
            for a in range(1, min(2 * b, D - d - b + 1)):
                if not m.dim(d + a + b):
                    continue
                lhs = m.sq_matrix(a, d + b) @ m.sq_matrix(b, d)
                nf = adem_rewrite((a, b))
                rhs = m.op_matrix(nf, d, a + b)
                if lhs != rhs:
                    out.append(Issue("adem", f"Sq{a} Sq{b} != {nf} on degree {d}"))
    for k, lab in m.asserts:
        d, i = m.locate(lab)
        if not m.apply(k, d, 1 << i):
            out.append(Issue("assert", f"asserted Sq{k}({lab}) != 0 fails"))
    if m.products is not None:
        out += _algebra_issues(m)
    return out


def _algebra_issues(m: SteenrodModule) -> list[Issue]:
    out: list[Issue] = []
    D = m.max_degree
    labels = [lab for d in m.degrees() for lab in m.labels(d)]
    if m.unit is None:
        out.append(Issue("algebra", "algebra without a unit"))
    for x in labels:
        dx, ix = m.locate(x)
        for y in labels:
            dy, iy = m.locate(y)
            if dx + dy > D:
                continue
            xy = m.mul(dx, 1 << ix, dy, 1 << iy)
            if xy != m.mul(dy, 1 << iy, dx, 1 << ix):
                out.append(Issue("algebra", f"{x}*{y} != {y}*{x}"))
            for z in labels:
                dz, iz = m.locate(z)
                if dx + dy + dz > D:
                    continue
                if m.mul(dx + dy, xy, dz, 1 << iz) != m.mul(dx, 1 << ix, dy + dz, m.mul(dy, 1 << iy, dz, 1 << iz)):
                    out.append(Issue("algebra", f"({x}*{y})*{z} != {x}*({y}*{z})"))
            # Cartan formula on the pair
            for k in range(1, D - dx - dy + 1):
                lhs = m.apply(k, dx + dy, xy)
                rhs = 0
                for i in range(k + 1):
                    rhs ^= m.mul(dx + i, m.apply(i, dx, 1 << ix), dy + k - i, m.apply(k - i, dy, 1 << iy))
                if lhs != rhs:
                    out.append(Issue("cartan", f"Sq{k}({x}*{y}) violates the Cartan formula"))
        if 1 <= dx and 2 * dx <= D:
            if m.apply(dx, dx, 1 << ix) != m.mul(dx, 1 << ix, dx, 1 << ix):
                out.append(Issue("algebra", f"Sq{dx}({x}) != {x}^2"))
    return out


def _unspecified_issues(m: SteenrodModule) -> list[Issue]:
    return [Issue("unspecified", f"Sq{k}({lab}) neither given nor declared ambiguous")
            for k, lab in sorted(m.unspecified)]


def validate_module(m: SteenrodModule) -> ValidityReport:
    rep = ValidityReport(m.name, resolutions=m.resolutions())
    rep.issues = _structure_issues(m)
    if rep.issues:
        return rep
    rep.issues += _unspecified_issues(m)
    per_res: list[list[Issue]] = []
    for idx, assignment in enumerate(rep.resolutions):
        found = _law_issues(m.resolve(assignment))
        for i in found:
            i.resolution = idx if m.slots else None
        per_res.append(found)
        if not found:
            rep.admissible.append(idx)
    for found in per_res:
        (rep.excluded if rep.admissible else rep.issues).extend(found)
    return rep


def admissible_resolutions(m: SteenrodModule) -> list[tuple[dict[str, int], SteenrodModule]]:
    rep = validate_module(m)
    return [(rep.resolutions[i], m.resolve(rep.resolutions[i])) for i in rep.admissible]


def same_structure(m: SteenrodModule, n: SteenrodModule, *, reduced: bool = False,
                   max_degree: int | None = None, products: bool = True) -> list[str]:
    """Differences between two modules compared position by position (labels ignored)."""
    top = min(m.max_degree, n.max_degree) if max_degree is None else max_degree
    lo = 1 if reduced else 0
    diffs = []
    if max_degree is None and m.max_degree != n.max_degree:
        diffs.append(f"max degree {m.max_degree} vs {n.max_degree}")
    for d in range(lo, top + 1):
        if m.dim(d) != n.dim(d):
            diffs.append(f"dimension in degree {d}: {m.dim(d)} vs {n.dim(d)}")
    if diffs:
        return diffs
    for d in range(lo, top + 1):
        for k in range(1, top - d + 1):
            if m.sq_matrix(k, d) != n.sq_matrix(k, d):
                diffs.append(f"Sq{k} differs on degree {d}")
    if products and m.is_algebra and n.is_algebra:
        for d1 in range(lo, top + 1):
            for d2 in range(lo, top - d1 + 1):
                for i in range(m.dim(d1)):
                    for j in range(m.dim(d2)):
                        if m.mul(d1, 1 << i, d2, 1 << j) != n.mul(d1, 1 << i, d2, 1 << j):
                            diffs.append(f"product differs in degrees {d1},{d2}")
    return diffs


# ---------------------------------------------------------------------------
# constructors

_GEN_NAMES = {1: "x", 2: "b", 4: "a"}


def _power_label(var: str, n: int) -> str:
    return "1" if n == 0 else var if n == 1 else f"{var}{n}"


def truncated_polynomial_algebra(gen_degree: int, height: int, name: str | None = None,
                                 var: str | None = None) -> SteenrodModule:
    """``F2[x]/(x^height)`` with ``|x| = gen_degree`` and ``Sq(x) = x + x^2``."""
    if gen_degree not in _GEN_NAMES:
        raise ValueError(f"unsupported generator degree {gen_degree}; use 1, 2 or 4")
    if height < 2:
        raise ValueError("height must be at least 2")
    g = gen_degree
    var = var or _GEN_NAMES[g]
    D = g * (height - 1)
    basis = {g * n: (_power_label(var, n),) for n in range(height)}
    sq = {}
    for n in range(1, height):
        for i in range(1, height - n):
            if binom_mod2(n, i):
                sq[(g * i, g * n)] = BitMatrix.identity(1)
    products = {}
    for p in range(1, height):
        for q in range(1, height - p):
            products[(_power_label(var, p), _power_label(var, q))] = 1
    return SteenrodModule(name or f"P{var}{height}", D, basis, sq, products=products, unit="1",
                          derived=("TRUNCPOLY", str(g), str(height)))


def point(name: str = "pt") -> SteenrodModule:
    """The cohomology of a point: F2 in degree 0."""
    return SteenrodModule(name, 0, {0: ("1",)}, products={}, unit="1")


def sphere(n: int, name: str | None = None) -> SteenrodModule:
    if n < 1:
        raise ValueError("sphere dimension must be at least 1")
    return SteenrodModule(name or f"S{n}", n, {0: ("1",), n: (f"e{n}",)}, products={}, unit="1",
                          derived=("SPHERE", str(n)))


def _shift_slot(s: AmbiguitySlot, prefix: str) -> AmbiguitySlot:
    return AmbiguitySlot(s.k, prefix + s.label, s.alternatives, s.key)


def suspension(m: SteenrodModule, name: str | None = None) -> SteenrodModule:
    """Reduced part of ``m`` shifted up one degree; squares unchanged, products dropped."""
    basis = {d + 1: tuple("s" + lab for lab in ls) for d, ls in m.basis.items() if d >= 1}
    sq = {(k, d + 1): mat for (k, d), mat in m.sq.items() if d >= 1}
    return SteenrodModule(
        name or f"S{m.name}", m.max_degree + 1, basis, sq,
        slots=[_shift_slot(s, "s") for s in m.slots if m.degree_of(s.label) >= 1],
        asserts=[(k, "s" + lab) for k, lab in m.asserts if m.degree_of(lab) >= 1],
        forced=[(k, "s" + lab) for k, lab in m.forced if m.degree_of(lab) >= 1],
        unspecified=[(k, "s" + lab) for k, lab in m.unspecified if m.degree_of(lab) >= 1],
        derived=("SUSPENSION", m.name),
    )


def tensor_product(m: SteenrodModule, n: SteenrodModule, name: str | None = None) -> SteenrodModule:
    """``m ⊗ n`` with the Cartan diagonal; both inputs are taken as complete (finite)."""
    if m.slots or n.slots:
        raise ValueError("resolve ambiguity slots before forming tensor products")
    D = m.max_degree + n.max_degree
    cells: dict[int, list[tuple[str, str]]] = {}
    for d1 in m.degrees():
        for d2 in n.degrees():
            for x in m.labels(d1):
                for y in n.labels(d2):
                    cells.setdefault(d1 + d2, []).append((x, y))
    basis = {d: tuple(_join_label(x, y) for x, y in ps) for d, ps in cells.items()}
    index = {p: (d, i) for d, ps in cells.items() for i, p in enumerate(ps)}
    sq = {}
    for d, ps in cells.items():
        for k in range(1, D - d + 1):
            cols = []
            for x, y in ps:
                dx, ix = m.locate(x)
                dy, iy = n.locate(y)
                v = 0
                for i in range(k + 1):
                    u1 = m.apply(i, dx, 1 << ix)
                    u2 = n.apply(k - i, dy, 1 << iy)
                    for a in range(m.dim(dx + i)):
                        if not (u1 >> a) & 1:
                            continue
                        for b in range(n.dim(dy + k - i)):
                            if (u2 >> b) & 1:
                                v ^= 1 << index[(m.labels(dx + i)[a], n.labels(dy + k - i)[b])][1]
                cols.append(v)
            sq[(k, d)] = BitMatrix.from_columns(cols, len(cells.get(d + k, ())))
    products = None
    unit = None
    if m.is_algebra and n.is_algebra:
        products = {}
        for (x, y), (d, i) in index.items():
            for (x2, y2), (d2, j) in index.items():
                if d + d2 > D:
                    continue
                dx, ix = m.locate(x)
                dx2, ix2 = m.locate(x2)
                dy, iy = n.locate(y)
                dy2, iy2 = n.locate(y2)
                u1 = m.mul(dx, 1 << ix, dx2, 1 << ix2)
                u2 = n.mul(dy, 1 << iy, dy2, 1 << iy2)
                v = 0
                for a in range(m.dim(dx + dx2)):
                    if not (u1 >> a) & 1:
                        continue
                    for b in range(n.dim(dy + dy2)):
                        if (u2 >> b) & 1:
                            v ^= 1 << index[(m.labels(dx + dx2)[a], n.labels(dy + dy2)[b])][1]
                products[(basis[d][i], basis[d2][j])] = v
        if m.unit is not None and n.unit is not None:
            unit = _join_label(m.unit, n.unit)
    return SteenrodModule(name or f"{m.name}x{n.name}", D, basis, sq, products=products, unit=unit,
                          derived=("TENSOR", m.name, n.name))


def _thom_label(x: str) -> str:
    return "U" if x == "1" else f"{x}U"


def thom_module(base: SteenrodModule, w: Sequence[int | str | None], shift: int,
                name: str | None = None) -> SteenrodModule:
    """Free rank-one ``base``-module on a Thom class ``U`` of degree ``shift``.

    ``w[i-1]`` is the Stiefel-Whitney class ``w_i`` (a vector or an expression in
    ``base`` of degree ``i``); ``Sq^k(xU) = sum_i Sq^i(x) w_{k-i} U``.
    """
    ws: dict[int, int] = {0: 1}
    for i, wi in enumerate(w, start=1):
        if wi is None or wi == 0:
            continue
        if isinstance(wi, str):
            d, v = base.element(wi)
            if d != i:
                raise ValueError(f"w{i} = {wi!r} has degree {d}, expected {i}")
        else:
            v = wi
            if v >> base.dim(i):
                raise ValueError(f"w{i} is not a vector in degree {i}")
        if v:
            ws[i] = v
    if len(ws) > 1 and not base.is_algebra:
        raise ValueError("nonzero Stiefel-Whitney classes need a product on the base")
    if 0 not in base.basis or base.dim(0) != 1:
        raise ValueError("the base must be connected (one class in degree 0)")
    D = base.max_degree + shift
    basis = {d + shift: tuple(_thom_label(x) for x in ls) for d, ls in base.basis.items()}
    sq = {}
    for d in base.degrees():
        for k in range(1, D - d - shift + 1):
            cols = []
            for i_lab in range(base.dim(d)):
                v = 0
                for i in range(k + 1):
                    wk = ws.get(k - i)
                    if wk is None:
                        continue
                    sx = base.apply(i, d, 1 << i_lab)
                    v ^= sx if k == i else base.mul(d + i, sx, k - i, wk)
                cols.append(v)
            sq[(k, d + shift)] = BitMatrix.from_columns(cols, base.dim(d + k))
    return SteenrodModule(name or f"Th{base.name}", D, basis, sq,
                          derived=("THOM", base.name, str(shift)))


# -- tensor algebras with dual Steenrod action --------------------------------

HomologyElement = frozenset  # of words, each a tuple of generator names


@dataclass(frozen=True)
class DualTensorAlgebraSpec:
    """Pontryagin algebra ``T(generators)`` with the dual squares of each generator.

    ``dual_action[(g, k)]`` is ``Sq^k_*(g)``, a set of words of degree ``|g| - k``;
    missing entries are zero.
    """

    generators: tuple[tuple[str, int], ...]
    dual_action: Mapping[tuple[str, int], frozenset] = field(default_factory=dict)
    truncation: int = 0

    def __post_init__(self) -> None:
        degs = dict(self.generators)
        if any(d < 1 for d in degs.values()):
            raise ValueError("generator degrees must be positive")
        if self.truncation < max(degs.values(), default=0):
            raise ValueError("truncation below a generator degree")
        for (g, k), words in self.dual_action.items():
            for w in words:
                if sum(degs[x] for x in w) != degs[g] - k:
                    raise ValueError(f"Sq{k}_*({g}) has a term of the wrong degree")

    @property
    def degree_of(self) -> dict[str, int]:
        return dict(self.generators)


def word_label(word: Sequence[str]) -> str:
    """Run-length label: ``("a", "a", "a")`` is ``a3``, ``("a", "b")`` is ``ab``."""
    if not word:
        return "1"
    out = []
    for g, run in itertools.groupby(word):
        n = len(list(run))
        out.append(g if n == 1 else f"{g}{n}")
    return "".join(out)


def tensor_algebra_words(gens: Sequence[tuple[str, int]], degree: int) -> list[tuple[str, ...]]:
    if degree == 0:
        return [()]
    out = []
    for g, d in gens:
        if d <= degree:
            out += [(g,) + rest for rest in tensor_algebra_words(gens, degree - d)]
    return out


def tensor_algebra_dims(gen_degrees: Sequence[int], max_degree: int) -> list[int]:
    """Number of words of each total degree ``0..max_degree`` in the free monoid."""
    dims = [1] + [0] * max_degree
    for d in range(1, max_degree + 1):
        dims[d] = sum(dims[d - g] for g in gen_degrees if g <= d)
    return dims


def dual_square(spec: DualTensorAlgebraSpec, k: int, word: Sequence[str]) -> frozenset:
    """``Sq^k_*`` on a word, by the Cartan formula for Pontryagin products."""
    return _dual_square(spec.generators, tuple(sorted(spec.dual_action.items())), k, tuple(word))


_dual_cache: dict = {}


def _dual_square(gens, action, k, word) -> frozenset:
    key = (gens, action, k, word)
    hit = _dual_cache.get(key)
    if hit is not None:
        return hit
    if k == 0:
        res = frozenset({word})
    elif not word:
        res = frozenset()
    else:
        table = dict(action)
        head, rest = word[0], word[1:]
        acc: set = set()
        for i in range(k + 1):
            first = frozenset({(head,)}) if i == 0 else table.get((head, i), frozenset())
            if not first:
                continue
            second = _dual_square(gens, action, k - i, rest)
            for u in first:
                for v in second:
                    acc ^= {tuple(u) + v}
        res = frozenset(acc)
    _dual_cache[key] = res
    return res


def dual_tensor_algebra(spec: DualTensorAlgebraSpec, name: str = "T") -> SteenrodModule:
    """Cohomology of the loop space: the degreewise dual of ``T(generators)``.

    The cohomology ``Sq^k`` from degree ``d`` to ``d + k`` is the transpose of
    ``Sq^k_*`` from homology degree ``d + k`` to ``d``.
    """
    D = spec.truncation
    words = {d: tensor_algebra_words(spec.generators, d) for d in range(D + 1)}
    basis = {d: tuple(word_label(w) for w in ws) for d, ws in words.items() if ws}
    index = {w: i for ws in words.values() for i, w in enumerate(ws)}
    sq = {}
    for d in range(D + 1):
        for k in range(1, D - d + 1):
            if not words[d] or not words[d + k]:
                continue
            # homology matrix: columns = words of degree d+k, rows = words of degree d
            hcols = []
            for w in words[d + k]:
                v = 0
                for t in dual_square(spec, k, w):
                    v ^= 1 << index[t]
                hcols.append(v)
            sq[(k, d)] = BitMatrix.from_columns(hcols, len(words[d])).transpose()
    gens = ",".join(f"{g}{d}" for g, d in spec.generators)
    return SteenrodModule(name, D, basis, sq, derived=("DUALTENSOR", gens))


def loop_suspension(m: SteenrodModule, name: str | None = None) -> SteenrodModule:
    """``H^*(Sigma Omega Z)`` from ``H^*(Omega Z)`` as built by :func:`dual_tensor_algebra`."""
    if not m.derived or m.derived[0] != "DUALTENSOR":
        raise ValueError("loop_suspension expects a module built by dual_tensor_algebra")
    out = suspension(m, name or f"G1{m.name}")
    return out._replace(derived=("LOOPSUSPENSION", m.name))


# ---------------------------------------------------------------------------
# maps

class ModuleMap:
    """A degree-``shift`` linear map between modules, one matrix per source degree."""

    def __init__(self, name: str, source: SteenrodModule, target: SteenrodModule, shift: int = 0,
                 matrices: Mapping[int, BitMatrix] | None = None, provenance: Iterable[str] = ()):
        self.name = name
        self.source = source
        self.target = target
        self.shift = shift
        self.matrices = {d: m for d, m in sorted((matrices or {}).items()) if not m.is_zero()}
        self.provenance = tuple(provenance)

    @classmethod
    def from_images(cls, name: str, source: SteenrodModule, target: SteenrodModule, shift: int,
                    images: Mapping[str, str], provenance: Iterable[str] = ()) -> ModuleMap:
        cols: dict[int, list[int]] = {d: [0] * source.dim(d) for d in source.degrees()}
        for lab, expr in images.items():
            d, i = source.locate(lab)
            if expr.strip() == "0":
                continue
            td, v = target.element(expr)
            if td != d + shift:
                raise ValueError(f"{name}: {lab} (degree {d}) -> {expr} (degree {td}) "
                                 f"violates shift {shift}")
            cols[d][i] = v
        mats = {d: BitMatrix.from_columns(c, target.dim(d + shift)) for d, c in cols.items()}
        return cls(name, source, target, shift, mats, provenance)

    def _key(self) -> tuple:
        return (self.name, self.source, self.target, self.shift, self.matrices, self.provenance)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ModuleMap) and self._key() == other._key()

    def __repr__(self) -> str:
        return f"ModuleMap({self.name!r}: {self.source.name} -> {self.target.name}, shift={self.shift})"

    def matrix(self, d: int) -> BitMatrix:
        m = self.matrices.get(d)
        if m is not None:
            return m
        return BitMatrix.zeros(self.target.dim(d + self.shift), self.source.dim(d))

    def apply(self, d: int, v: int) -> int:
        return self.matrix(d).apply(v)

    def image_of(self, label: str) -> str:
        d, i = self.source.locate(label)
        return self.target.fmt(d + self.shift, self.apply(d, 1 << i))

    @property
    def slot_keys(self) -> tuple[str, ...]:
        return tuple(dict.fromkeys(self.source.slot_keys + self.target.slot_keys))

    def resolutions(self) -> list[dict[str, int]]:
        slots = {s.key: len(s.alternatives) for s in self.source.slots + self.target.slots}
        keys = list(slots)
        return [dict(zip(keys, c)) for c in itertools.product(*(range(slots[k]) for k in keys))]

    def resolve(self, assignment: Mapping[str, int]) -> ModuleMap:
        return ModuleMap(self.name, self.source.resolve(assignment), self.target.resolve(assignment),
                         self.shift, self.matrices, self.provenance)

    def with_modules(self, source: SteenrodModule, target: SteenrodModule) -> ModuleMap:
        return ModuleMap(self.name, source, target, self.shift, self.matrices, self.provenance)

    def compose_after(self, other: ModuleMap, d: int) -> BitMatrix:
        """Matrix of ``self o other`` on ``other.source`` degree ``d``."""
        return self.matrix(d + other.shift) @ other.matrix(d)


def equivariance_failures(f: ModuleMap, ks: Iterable[int] | None = None) -> list[str]:
    """Degrees and squares where ``f Sq^k != Sq^k f`` (resolved modules only)."""
    src, tgt, s = f.source, f.target, f.shift
    out = []
    for d in src.degrees():
        top = min(src.max_degree - d, tgt.max_degree - d - s)
        for k in (ks if ks is not None else range(1, top + 1)):
            if k > top:
                continue
            lhs = f.matrix(d + k) @ src.sq_matrix(k, d)
            rhs = tgt.sq_matrix(k, d + s) @ f.matrix(d)
            if lhs != rhs:
                out.append(f"{f.name} does not commute with Sq{k} on degree {d}")
    return out


def map_shape_issues(f: ModuleMap) -> list[Issue]:
    out = []
    for d, m in f.matrices.items():
        if d not in f.source.basis:
            out.append(Issue("malformed", f"{f.name}: matrix on empty source degree {d}"))
        elif m.shape != (f.target.dim(d + f.shift), f.source.dim(d)):
            out.append(Issue("malformed", f"{f.name}: degree {d} matrix has shape {m.shape}, "
                                          f"expected {(f.target.dim(d + f.shift), f.source.dim(d))}"))
    if f.shift < 0:
        out.append(Issue("malformed", f"{f.name}: negative shift"))
    return out


def validate_map(f: ModuleMap, equivariant: bool = True) -> ValidityReport:
    """Shape and shift consistency, plus equivariance under each admissible resolution."""
    rep = ValidityReport(f.name, resolutions=f.resolutions())
    rep.issues = map_shape_issues(f)
    if rep.issues:
        return rep
    src_ok = set(map(_freeze, (a for a, _ in admissible_resolutions(f.source))))
    tgt_ok = set(map(_freeze, (a for a, _ in admissible_resolutions(f.target))))
    failures: list[Issue] = []
    for idx, assignment in enumerate(rep.resolutions):
        src_a = {k: assignment[k] for k in f.source.slot_keys}
        tgt_a = {k: assignment[k] for k in f.target.slot_keys}
        if _freeze(src_a) not in src_ok or _freeze(tgt_a) not in tgt_ok:
            continue
        found = equivariance_failures(f.resolve(assignment)) if equivariant else []
        if found:
            failures += [Issue("equivariance", msg, idx if f.slot_keys else None) for msg in found]
        else:
            rep.admissible.append(idx)
    # like module laws, equivariance prunes resolutions; it is fatal only if none survives
    (rep.excluded if rep.admissible else rep.issues).extend(failures)
    if not rep.admissible and not failures:
        rep.issues.append(Issue("equivariance", f"{f.name}: no admissible resolution of its modules"))
    return rep


def _freeze(a: Mapping[str, int]) -> tuple:
    return tuple(sorted(a.items()))


def is_degreewise_injective(f: ModuleMap) -> bool:
    return all(rank(f.matrix(d)) == f.source.dim(d) for d in f.source.degrees())


def iter_basis(m: SteenrodModule) -> Iterator[tuple[int, int, str]]:
    for d, ls in m.basis.items():
        for i, lab in enumerate(ls):
            yield d, i, lab


def format_op(word: SqWord) -> str:
    return format_word(word)
