import random
import re

import pytest
from hypothesis import given

from conftest import POOL, direct_sum, plain, random_module, seeds, submodule
from secwgt.f2linalg import BitMatrix
from secwgt.modules import (AmbiguitySlot, DualTensorAlgebraSpec, ModuleMap, SteenrodModule,
                            admissible_resolutions, dual_square, dual_tensor_algebra, equivariance_failures,
                            loop_suspension, point, same_structure, sphere, suspension, tensor_algebra_dims,
                            tensor_algebra_words, tensor_product, thom_module, truncated_polynomial_algebra,
                            validate_map, validate_module, word_label)
from secwgt.steenrod import Poly, poly_action


def test_truncated_algebras_valid():
    for g in (1, 2, 4):
        for h in range(2, 7):
            m = truncated_polynomial_algebra(g, h)
            assert validate_module(m).ok, validate_module(m).lines()
            assert m.total_dim == h


def test_cp5_entries():
    cp5 = truncated_polynomial_algebra(2, 6)
    assert cp5.apply(2, 2, 1) == 1          # Sq2 b = b2
    assert cp5.apply(2, 6, 1) == 1          # Sq2 b3 = b4
    assert cp5.apply(2, 4, 1) == 0          # Sq2 b2 = 0
    assert cp5.apply(4, 6, 1) == 1          # Sq4 b3 = b5


def test_small_constructors():
    assert validate_module(point()).ok
    s = sphere(5)
    assert validate_module(s).ok and s.dims()[5] == 1
    with pytest.raises(ValueError):
        sphere(0)
    with pytest.raises(ValueError):
        truncated_polynomial_algebra(3, 2)


def test_violations_detected():
    rp3 = plain(truncated_polynomial_algebra(1, 4))
    bad = rp3.with_entry(1, "x", 0).with_entry(2, "x", 1)   # Sq2 on degree 1: unstable
    kinds = {i.kind for i in validate_module(bad).issues}
    assert "instability" in kinds
    # Sq1 Sq1 must vanish
    m = SteenrodModule("M", 3, {1: ("u",), 2: ("v",), 3: ("w",)},
                       {(1, 1): BitMatrix.identity(1), (1, 2): BitMatrix.identity(1)})
    assert any(i.kind == "adem" for i in validate_module(m).issues)
    # an algebra with the wrong top square
    alg = truncated_polynomial_algebra(1, 3).with_entry(1, "x", 0)
    assert any(i.kind == "algebra" for i in validate_module(alg).issues)


def test_assert_checked():
    m = SteenrodModule("M", 3, {1: ("u",), 3: ("w",)}, asserts=[(2, "u")])
    assert any(i.kind == "assert" for i in validate_module(m).issues)


def test_malformed_shapes():
    m = SteenrodModule("M", 2, {0: ("a",), 1: ("b",)}, {(1, 0): BitMatrix.identity(2)})
    assert validate_module(m).malformed


def test_ambiguity_resolutions():
    base = SteenrodModule("M", 3, {1: ("u",), 2: ("v",), 3: ("w",)}, {(1, 1): BitMatrix.identity(1)},
                          slots=[AmbiguitySlot(1, "v", (0, 1), "M:SQ1:v")])
    rep = validate_module(base)
    assert len(rep.resolutions) == 2
    assert rep.admissible == [0]
    assert rep.ok and rep.excluded
    ((a, res),) = admissible_resolutions(base)
    assert a == {"M:SQ1:v": 0} and res.apply(1, 2, 1) == 0


def label_monomial(label: str, names: list[str]) -> tuple[int, ...]:
    exps = [0] * len(names)
    if label == "1":
        return tuple(exps)
    for part in label.split("."):
        name, e = re.fullmatch(r"([a-z])(\d*)", part).groups()
        exps[names.index(name)] += int(e or 1)
    return tuple(exps)


@pytest.mark.parametrize("g1, h1, g2, h2", [(1, 3, 1, 4), (1, 4, 2, 3), (2, 3, 4, 2), (1, 5, 1, 2)])
def test_tensor_matches_polynomial_oracle(g1, h1, g2, h2):
    m = tensor_product(truncated_polynomial_algebra(g1, h1, var="x"),
                       truncated_polynomial_algebra(g2, h2, var="y"))
    assert validate_module(m).ok
    names = ["x", "y"]
    for d in m.degrees():
        for i, lab in enumerate(m.labels(d)):
            p = Poly.monomial(label_monomial(lab, names), (g1, g2))
            for k in range(1, m.max_degree - d + 1):
                img = poly_action((k,), p)
                want = 0
                for mono in img.terms:
                    if mono[0] < h1 and mono[1] < h2:
                        want ^= 1 << [label_monomial(t, names) for t in m.labels(d + k)].index(mono)
                assert m.apply(k, d, 1 << i) == want


def test_thom_of_tautological_bundles():
    # Thom space of the real line bundle over RP^n is RP^{n+1}/RP^0
    for n in range(1, 6):
        th = thom_module(truncated_polynomial_algebra(1, n + 1), ["x"], 1)
        assert validate_module(th).ok
        assert not same_structure(th, truncated_polynomial_algebra(1, n + 2), reduced=True)
    # and the complex one over CP^n gives CP^{n+1}
    for n in range(1, 4):
        th = thom_module(truncated_polynomial_algebra(2, n + 1), [0, "b"], 2)
        assert not same_structure(th, truncated_polynomial_algebra(2, n + 2), reduced=True)
    trivial = thom_module(truncated_polynomial_algebra(2, 6), [0, 0, 0, 0], 3)
    assert trivial.apply(2, 5, 1) == 1      # Sq2(bU) = b2U
    assert trivial.apply(2, 3, 1) == 0      # Sq2(U) = 0


def test_suspension_commutes_with_squares():
    for m in POOL:
        s = suspension(m)
        assert validate_module(s).ok
        for d in m.degrees():
            if d == 0:
                continue
            for k in range(1, m.max_degree - d + 1):
                assert s.sq_matrix(k, d + 1) == m.sq_matrix(k, d)


def test_dual_tensor_models():
    spec = DualTensorAlgebraSpec((("a", 2), ("b", 7)), {}, 9)
    assert dual_square(spec, 2, ("a", "a", "a")) == frozenset()
    t = dual_tensor_algebra(spec, "T")
    assert t.dims()[:10] == tensor_algebra_dims([2, 7], 9)
    g = loop_suspension(t)
    assert g.dims()[2:11] == tensor_algebra_dims([2, 7], 9)[1:]
    assert g.dim(1) == 0
    with pytest.raises(ValueError):
        loop_suspension(truncated_polynomial_algebra(1, 3))
    e = DualTensorAlgebraSpec((("a", 5), ("b", 7)), {("b", 2): frozenset({("a",)})}, 12)
    te = dual_tensor_algebra(e)
    assert te.apply(2, 5, 1) == 1
    assert validate_module(te).ok


def test_dual_cartan_on_squares():
    # Sq2_*(b^2) = a b + b a when Sq2_*(b) = a
    spec = DualTensorAlgebraSpec((("a", 5), ("b", 7)), {("b", 2): frozenset({("a",)})}, 14)
    assert dual_square(spec, 2, ("b", "b")) == frozenset({("a", "b"), ("b", "a")})
    assert dual_square(spec, 4, ("b", "b")) == frozenset({("a", "a")})


def test_tensor_algebra_counts():
    assert tensor_algebra_dims([2, 7], 9) == [len(tensor_algebra_words([("a", 2), ("b", 7)], d)) for d in range(10)]
    assert word_label(("a", "a", "b")) == "a2b"
    assert word_label(()) == "1"


@given(seeds)
def test_random_modules_valid_and_closed(seed):
    rng = random.Random(seed)
    m = random_module(rng)
    n = random_module(rng)
    assert validate_module(m).ok
    assert validate_module(tensor_product(m, n.renamed("N"))).ok
    assert validate_module(suspension(m)).ok
    assert validate_module(direct_sum(m, n)).ok


@given(seeds)
def test_submodule_inclusion_equivariant(seed):
    rng = random.Random(seed)
    n = rng.choice(POOL)
    d = rng.choice(n.degrees())
    i = submodule(n, {d: [rng.randint(1, 2**n.dim(d) - 1)]})
    assert validate_module(i.source).ok
    assert not equivariance_failures(i)
    assert validate_map(i).ok


def test_map_from_images_and_errors():
    hp2 = truncated_polynomial_algebra(4, 3)
    cp5 = truncated_polynomial_algebra(2, 6)
    q = ModuleMap.from_images("q", hp2, cp5, 0, {"1": "1", "a": "b2", "a2": "b4"})
    assert validate_map(q).ok
    assert q.image_of("a") == "b2"
    partial = ModuleMap.from_images("r", hp2, cp5, 0, {"a": "b2 + 0"})
    assert any("Sq4" in i.message for i in validate_map(partial).issues)
    with pytest.raises(ValueError):
        ModuleMap.from_images("r", hp2, cp5, 0, {"a": "b3"})
    with pytest.raises(KeyError):
        ModuleMap.from_images("r", hp2, cp5, 0, {"a": "c"})
    # b -> a is not equivariant: Sq2 b = b2 but nothing of degree 4 hits a's square
    cp2 = truncated_polynomial_algebra(2, 3)
    f = ModuleMap.from_images("f", cp2, cp5, 0, {"b": "b", "b2": "0"})
    assert equivariance_failures(f)
    assert not validate_map(f).ok


def test_e1_matches_hp2_times_s5(twistor):
    e1 = twistor.module("E1")
    rep = validate_module(e1)
    assert len(rep.resolutions) == 4 and len(rep.admissible) == 3
    target = tensor_product(truncated_polynomial_algebra(4, 3), sphere(5))
    matches = [a for a, r in admissible_resolutions(e1) if not same_structure(r, target, products=False)]
    assert len(matches) == 1
