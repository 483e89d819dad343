"""Shared generators: small valid modules, submodule inclusions, equivariant maps."""

from __future__ import annotations

import itertools
import random
import sys

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from secwgt.dsl import load_example
from secwgt.f2linalg import BitMatrix, Subspace, solve
from secwgt.modules import (ModuleMap, SteenrodModule, equivariance_failures, sphere, suspension,
                            tensor_product, truncated_polynomial_algebra, validate_module)

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture(scope="session")
def twistor():
    return load_example("twistor")


@pytest.fixture(scope="session")
def twocell():
    return load_example("twocell")


# ---------------------------------------------------------------------------
# building blocks

def plain(m: SteenrodModule) -> SteenrodModule:
    """Forget the products."""
    return m._replace(products=None, unit=None)


def direct_sum(m: SteenrodModule, n: SteenrodModule, name: str | None = None) -> SteenrodModule:
    D = max(m.max_degree, n.max_degree)
    basis = {d: tuple("L" + x for x in m.labels(d)) + tuple("R" + y for y in n.labels(d))
             for d in range(D + 1)}
    sq = {}
    for d in range(D + 1):
        for k in range(1, D - d + 1):
            a, b = m.sq_matrix(k, d), n.sq_matrix(k, d)
            cols = a.columns() + [c << m.dim(d + k) for c in b.columns()]
            sq[(k, d)] = BitMatrix.from_columns(cols, m.dim(d + k) + n.dim(d + k))
    return SteenrodModule(name or f"{m.name}+{n.name}", D, basis, sq)


def closure(m: SteenrodModule, gens: dict[int, list[int]]) -> dict[int, Subspace]:
    """Smallest Sq-closed subspace containing the given vectors."""
    D = m.max_degree
    vecs = {d: list(gens.get(d, [])) for d in range(D + 1)}
    for d in range(D + 1):
        sp = Subspace.span(vecs[d], m.dim(d))
        vecs[d] = list(sp.basis)
        for k in range(1, D - d + 1):
            vecs[d + k] += [m.apply(k, d, v) for v in sp.basis]
    return {d: Subspace.span(vecs[d], m.dim(d)) for d in range(D + 1)}


def submodule(m: SteenrodModule, gens: dict[int, list[int]], name: str = "M") -> ModuleMap:
    """Inclusion of the submodule generated by ``gens``."""
    sub = closure(m, gens)
    D = m.max_degree
    basis = {d: tuple(f"v{d}_{j}" for j in range(sub[d].dim)) for d in range(D + 1)}
    incl = {d: BitMatrix.from_columns(list(sub[d].basis), m.dim(d)) for d in range(D + 1)}
    sq = {}
    for d in range(D + 1):
        for k in range(1, D - d + 1):
            cols = []
            for v in sub[d].basis:
                c = solve(incl[d + k], m.apply(k, d, v))
                assert isinstance(c, int)
                cols.append(c)
            sq[(k, d)] = BitMatrix.from_columns(cols, sub[d + k].dim)
    s = SteenrodModule(name, D, basis, sq)
    return ModuleMap("i", s, m, 0, incl)


def pool() -> list[SteenrodModule]:
    """Valid modules of total dimension at most 8."""
    rp = [plain(truncated_polynomial_algebra(1, h)) for h in range(2, 8)]
    cp = [plain(truncated_polynomial_algebra(2, h)) for h in range(2, 5)]
    hp = plain(truncated_polynomial_algebra(4, 3))
    out = rp + cp + [hp]
    out += [plain(sphere(n)) for n in (1, 2, 3)]
    out.append(plain(tensor_product(truncated_polynomial_algebra(1, 3), truncated_polynomial_algebra(1, 3, var="y"))))
    out.append(plain(tensor_product(truncated_polynomial_algebra(1, 4), truncated_polynomial_algebra(2, 2))))
    out.append(suspension(truncated_polynomial_algebra(1, 5)))
    out.append(suspension(truncated_polynomial_algebra(2, 3)))
    out.append(direct_sum(plain(truncated_polynomial_algebra(1, 4)), suspension(truncated_polynomial_algebra(1, 4))))
    out.append(direct_sum(plain(truncated_polynomial_algebra(1, 3)), plain(truncated_polynomial_algebra(1, 5))))
    return [m for m in out if m.total_dim <= 8]


POOL = pool()


def random_module(rng: random.Random, max_total: int = 6, max_degree: int = 5,
                  attempts: int = 200) -> SteenrodModule:
    """Random valid module by rejection: sparse unstable squares, then validate."""
    for _ in range(attempts):
        dims = [0] * (max_degree + 1)
        for _ in range(rng.randint(1, max_total)):
            dims[rng.randint(0, max_degree)] += 1
        basis = {d: tuple(f"g{d}_{j}" for j in range(n)) for d, n in enumerate(dims)}
        sq = {}
        for d in range(max_degree + 1):
            for k in range(1, min(d, max_degree - d) + 1):
                if dims[d] and dims[d + k] and rng.random() < 0.5:
                    cols = [rng.getrandbits(dims[d + k]) for _ in range(dims[d])]
                    sq[(k, d)] = BitMatrix.from_columns(cols, dims[d + k])
        m = SteenrodModule("R", max_degree, basis, sq)
        if validate_module(m).ok:
            return m
    return SteenrodModule("R", max_degree, {0: ("g0_0",)})


def random_equivariant_map(rng: random.Random, m: SteenrodModule, n: SteenrodModule,
                           attempts: int = 200) -> ModuleMap | None:
    D = max(m.max_degree, n.max_degree)
    for _ in range(attempts):
        mats = {d: BitMatrix.from_columns([rng.getrandbits(n.dim(d)) if n.dim(d) else 0
                                           for _ in range(m.dim(d))], n.dim(d))
                for d in range(D + 1) if m.dim(d)}
        f = ModuleMap("f", m, n, 0, mats)
        if not equivariance_failures(f):
            return f
    return None


def random_inclusion(rng: random.Random) -> ModuleMap:
    n = rng.choice(POOL + [random_module(rng, 8, 6) for _ in range(2)])
    gens = {}
    for _ in range(rng.randint(1, 3)):
        ds = [d for d in n.degrees() if n.dim(d)]
        d = rng.choice(ds)
        v = rng.getrandbits(n.dim(d))
        if v:
            gens.setdefault(d, []).append(v)
    return submodule(n, gens)


seeds = st.integers(min_value=0, max_value=2**32 - 1)


# ---------------------------------------------------------------------------
# brute-force retraction oracle

def brute_force_retraction(i: ModuleMap) -> bool:
    """Enumerate every degreewise linear map N -> M and test it directly."""
    m, n = i.source, i.target
    D = max(m.max_degree, n.max_degree)
    per_degree = []
    for d in range(D + 1):
        r, c = m.dim(d), n.dim(d)
        per_degree.append([BitMatrix.from_lists([[(v >> (a * c + b)) & 1 for b in range(c)]
                                                 for a in range(r)], c)
                           for v in range(2 ** (r * c))])
    ids = {d: BitMatrix.identity(m.dim(d)) for d in range(D + 1)}
    for d in range(D + 1):
        per_degree[d] = [s for s in per_degree[d] if s @ i.matrix(d) == ids[d]]
    for choice in itertools.product(*per_degree):
        if all(choice[e + k] @ n.sq_matrix(k, e) == m.sq_matrix(k, e) @ choice[e]
               for e in range(D + 1) for k in range(1, D - e + 1)):
            return True
    return False


def unknown_bits(i: ModuleMap) -> int:
    D = max(i.source.max_degree, i.target.max_degree)
    return sum(i.source.dim(d) * i.target.dim(d) for d in range(D + 1))


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance")
    for line in mod.summary_lines():
        terminalreporter.write_line(line)
