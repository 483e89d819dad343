import random

import pytest
from hypothesis import given

from conftest import (POOL, brute_force_retraction, plain, random_equivariant_map, random_inclusion,
                      random_module, seeds, submodule, unknown_bits)
from secwgt.modules import ModuleMap, point, truncated_polynomial_algebra
from secwgt.weights import is_injective, nil_ker, retraction_exists, verify_retraction, weight_report

CHAIN = "a = s*(q*(a)) = s*(b2) = s*(Sq2 b) = Sq2(s*(b)) = Sq2(0) = 0"


def test_twistor_q_unsat_with_chain(twistor):
    res = retraction_exists(twistor.map("q"))
    assert res.verdict == "UNSAT"
    (cert,) = res.per_resolution
    assert cert.chain == CHAIN
    assert cert.witness.rank < cert.witness.augmented_rank
    assert len(cert.equations) == 2


def test_twistor_q1_sat_everywhere(twistor):
    res = retraction_exists(twistor.map("q1"))
    assert res.verdict == "SAT"
    assert len(res.per_resolution) == 3
    for c in res.per_resolution:
        f = twistor.map("q1").with_modules(twistor.module("HP2"), twistor.module("E1").resolve(c.resolution))
        assert verify_retraction(f, c.matrices)


def test_generators_only_agrees(twistor):
    assert retraction_exists(twistor.map("q"), "generators").verdict == "UNSAT"
    assert retraction_exists(twistor.map("q1"), "generators").verdict == "SAT"


def test_twocell_incl_sat(twocell):
    assert retraction_exists(twocell.map("incl")).verdict == "SAT"
    r = retraction_exists(twocell.map("point"))
    assert r.verdict == "UNSAT" and r.precondition


def test_nil_ker():
    pt = point()
    for h in range(2, 7):
        rp = truncated_polynomial_algebra(1, h)
        f = ModuleMap.from_images("f", rp, pt, 0, {"1": "1"})
        assert nil_ker(f) == h - 1
    hp2, cp5 = truncated_polynomial_algebra(4, 3), truncated_polynomial_algebra(2, 6)
    q = ModuleMap.from_images("q", hp2, cp5, 0, {"1": "1", "a": "b2", "a2": "b4"})
    assert nil_ker(q) == 0
    with pytest.raises(ValueError):
        nil_ker(ModuleMap.from_images("g", plain(hp2), cp5, 0, {"1": "1"}))


def test_weight_report_texts(twistor, twocell):
    wr = weight_report([twistor.map("q"), twistor.map("q1")])
    assert wr.wgt[0] == "wgt = 0"
    assert wr.mwgt[0] == "Mwgt = 1 (≥ 1 and ≤ 1 given data)"
    assert not wr.flags
    wr = weight_report([twocell.map("point"), twocell.map("incl")])
    assert wr.wgt[1:] == (1, 1) and wr.mwgt[1:] == (1, 1)
    wr = weight_report([twistor.map("q")])
    assert wr.mwgt[0] == "Mwgt ≥ 1 (no map in the list qualifies)"
    wr = weight_report([twistor.map("q1")], first_k=1)
    assert wr.mwgt[1:] == (0, 1)
    wr = weight_report([twistor.map("q1"), twistor.map("q")])
    assert any("retracts" in f for f in wr.flags)


def test_nonzero_shift_rejected(twistor):
    with pytest.raises(ValueError):
        retraction_exists(ModuleMap("x", twistor.module("HP2"), twistor.module("HP2"), 1))


def test_brute_force_on_examples(twistor, twocell):
    for f in (twistor.map("q"), twocell.map("incl")):
        if unknown_bits(f) <= 16:
            assert retraction_exists(f).sat == brute_force_retraction(f)


@given(seeds)
def test_solver_matches_brute_force_on_inclusions(seed):
    i = random_inclusion(random.Random(seed))
    if unknown_bits(i) > 16:
        return
    assert retraction_exists(i).sat == brute_force_retraction(i)


@given(seeds)
def test_solver_matches_brute_force_on_random_maps(seed):
    rng = random.Random(seed)
    m = random_module(rng, 4, 4)
    n = rng.choice([random_module(rng, 6, 4)] + [p for p in POOL if p.total_dim <= 6])
    f = random_equivariant_map(rng, m, n)
    if f is None or unknown_bits(f) > 16:
        return
    if not is_injective(f):
        assert retraction_exists(f).verdict == "UNSAT"
        assert not brute_force_retraction(f)
        return
    assert retraction_exists(f).sat == brute_force_retraction(f)


def test_identity_always_retracts():
    for n in POOL:
        i = submodule(n, {d: [1 << j for j in range(n.dim(d))] for d in n.degrees()})
        assert i.source.dims() == n.dims()
        assert retraction_exists(i).sat
