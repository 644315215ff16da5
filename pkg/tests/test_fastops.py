import random

import numpy as np
import pytest

from psu38.fastops import (FieldOps, SubgroupArrays, bpack, bunpack,
                           conj_fingerprints, coset_canon_keys)
from psu38.gf64 import GF64
from psu38.psu import Element, PElement, make_generators


@pytest.fixture(scope="module")
def f():
    return GF64()


@pytest.fixture(scope="module")
def ops(f):
    return FieldOps(f)


def random_elements(f, n, seed=23, sigma=True):
    g = make_generators(f)
    names = list("ABCDEF") + (["sigma"] if sigma else [])
    rng = random.Random(seed)
    out = []
    for _ in range(n):
        el = Element.identity(f)
        for _ in range(rng.randint(1, 15)):
            el = el * g[rng.choice(names)]
        out.append(el)
    return out


def to_arrays(els):
    keys = np.array([e.key for e in els], dtype=np.uint64)
    return bunpack(keys)


def test_pack_roundtrip(f):
    els = random_elements(f, 40)
    keys = np.array([e.key for e in els], dtype=np.uint64)
    mats, tw = bunpack(keys)
    assert np.array_equal(bpack(mats, tw), keys)


def test_bsmul_matches_element_mul(f, ops):
    a = random_elements(f, 60, seed=1)
    b = random_elements(f, 60, seed=2)
    am, at = to_arrays(a)
    bm, bt = to_arrays(b)
    cm, ct = ops.bsmul(am, at, bm, bt)
    got = bpack(cm, ct)
    want = np.array([(x * y).key for x, y in zip(a, b)], dtype=np.uint64)
    assert np.array_equal(got, want)


def test_binv_matches_element_inv(f, ops):
    a = random_elements(f, 60, seed=3)
    am, at = to_arrays(a)
    im, it = ops.binv(am, at)
    got = bpack(im, it)
    want = np.array([x.inv().key for x in a], dtype=np.uint64)
    assert np.array_equal(got, want)


def test_bpkeys_matches_pelement(f, ops):
    a = random_elements(f, 80, seed=4)
    am, at = to_arrays(a)
    got = ops.bpkeys(am, at)
    want = np.array([PElement(x).key for x in a], dtype=np.uint64)
    assert np.array_equal(got, want)


def test_coset_canon_against_bruteforce(f, ops, ng):
    """Exact oracle: scan every subgroup multiple in python."""
    sub = SubgroupArrays.from_group(ops, ng.S)
    probes = [PElement(x) for x in random_elements(f, 12, seed=5)]
    pm, pt = to_arrays([p.el for p in probes])
    got = coset_canon_keys(ops, sub, pm, pt)
    for i, pr in enumerate(probes):
        want = min((k * pr).key for k in ng.S.elems)
        assert int(got[i]) == want


def test_coset_canon_is_coset_invariant(f, ops, ng):
    sub = SubgroupArrays.from_group(ops, ng.Qh2)
    rng = random.Random(9)
    probes = [PElement(x) for x in random_elements(f, 8, seed=6)]
    shifted = [rng.choice(ng.Qh2.elems) * p for p in probes]
    pm, pt = to_arrays([p.el for p in probes])
    sm, st = to_arrays([p.el for p in shifted])
    assert np.array_equal(coset_canon_keys(ops, sub, pm, pt),
                          coset_canon_keys(ops, sub, sm, st))


def test_coset_canon_threads_deterministic(f, ops, ng):
    sub = SubgroupArrays.from_group(ops, ng.K2)
    probes = [PElement(x) for x in random_elements(f, 70, seed=7)]
    pm, pt = to_arrays([p.el for p in probes])
    a = coset_canon_keys(ops, sub, pm, pt, chunk=16, threads=1)
    b = coset_canon_keys(ops, sub, pm, pt, chunk=16, threads=4)
    c = coset_canon_keys(ops, sub, pm, pt, chunk=64, threads=2)
    assert np.array_equal(a, b) and np.array_equal(a, c)


def test_fingerprint_invariance(f, ops, ng):
    z = ng.Qh2.center()
    zk = np.array([x.key for x in z.sorted_elems() if x != z.identity],
                  dtype=np.uint64)
    zm, zt = bunpack(zk)
    rng = random.Random(10)
    probes = [PElement(x) for x in random_elements(f, 10, seed=8)]
    shifted = [rng.choice(ng.K2.elems) * p for p in probes]
    pm, pt = to_arrays([p.el for p in probes])
    sm, st = to_arrays([p.el for p in shifted])
    fa = conj_fingerprints(ops, pm, pt, zm, zt)
    fb = conj_fingerprints(ops, sm, st, zm, zt)
    assert np.array_equal(fa, fb)


def test_subgroup_membership(ops, ng):
    sub = SubgroupArrays.from_group(ops, ng.K1)
    inside = np.array([x.key for x in list(ng.K1.elems)[:20]], dtype=np.uint64)
    outside = np.array([x.key for x in list(ng.K2.elems) if x not in ng.K1.eset][:20],
                       dtype=np.uint64)
    assert ops is sub.ops
    assert sub.contains(inside).all()
    assert not sub.contains(outside).any()
