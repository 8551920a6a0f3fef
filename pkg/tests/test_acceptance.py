"""Acceptance suite: one test per criterion, each timed against its limit.

Every test prints a single PASS/FAIL line; the lines are repeated in the
pytest terminal summary. Run directly with ``python3 tests/test_acceptance.py``.
"""
import itertools
import random
import sys
import time
from contextlib import contextmanager
from functools import lru_cache

import numpy as np
import pytest

from helpers import (
    ACCEPTANCE_RESULTS,
    MEDIAL_SWAP,
    corpus,
    equal_pair,
    near_miss_pair,
    random_delta1,
    random_pair,
)
from quasikit.classify import (
    ABELIAN_KEYS,
    GROUP_KEYS,
    catalog_entry,
    check_nilpotent_isotopy,
    check_quasicommutator_vanishes,
    decompose_T,
    derive_identity,
    oracle_isotopy,
)
from quasikit.constructions import (
    LinearSpec,
    PsiNotBijective,
    ch_quasigroup,
    enumerate_automorphisms,
    left_distributive_quasigroup,
    linear_quasigroup,
    resolve_group,
    small_abelian_groups,
    t_quasigroup,
)
from quasikit.freewords import Mode, iter_models, normal_form, normalize, words_equal
from quasikit.tables import enumerate_latin_squares, random_latin_square
from quasikit.terms import check_identity, evaluate, parse_identity, parse_term

pytestmark = pytest.mark.acceptance

AXIOMS = ("x*(x\\y) = y", "x\\(x*y) = y", "(x*y)/y = x", "(x/y)*y = x")
MEDIAL = "(x*y)*(z*w) = (x*z)*(y*w)"


@contextmanager
def criterion(num: int, title: str, limit: float | None):
    """Time the block, record one PASS/FAIL line and fail on a time overrun."""
    start = time.perf_counter()
    info: dict = {}
    ok = False
    try:
        yield info
        ok = True
    finally:
        elapsed = time.perf_counter() - start
        in_time = limit is None or elapsed < limit
        bound = f" < {limit:.0f} s" if limit is not None else ""
        detail = f" [{info['detail']}]" if "detail" in info else ""
        verdict = "PASS" if ok and in_time else "FAIL"
        line = f"criterion {num:2d} {verdict}  {title}: {elapsed:.1f} s{bound}{detail}"
        ACCEPTANCE_RESULTS[num] = line
        print(line)
    assert in_time, line


@lru_cache(maxsize=None)
def oracle_verdicts():
    return tuple(oracle_isotopy(Q) for Q in corpus())


def _holds(Q, text_or_identity) -> bool:
    return check_identity(Q, text_or_identity).holds


# -- 1 ------------------------------------------------------------------------

def test_01_axioms():
    with criterion(1, "quasigroup axioms", 10) as info:
        # 1000 seeded squares spread evenly over orders 1..5
        sampled = [random_latin_square(1 + seed % 5, seed) for seed in range(1000)]
        order4 = list(enumerate_latin_squares(4))
        assert len(order4) == 576
        axioms = [parse_identity(a) for a in AXIOMS]
        for Q in sampled + order4:
            for ax in axioms:
                assert _holds(Q, ax), (Q.rows(), ax)
        info["detail"] = f"{len(sampled) + len(order4)} squares"


# -- 2, 3 ---------------------------------------------------------------------

def test_02_abelian_cluster():
    with criterion(2, "abelian-isotopy identities agree with the oracle", 300) as info:
        idents = [catalog_entry(k).identity for k in ABELIAN_KEYS]
        hits = 0
        for Q, oracle in zip(corpus(), oracle_verdicts()):
            verdicts = {_holds(Q, ident) for ident in idents}
            assert verdicts == {oracle.abelian_isotope}, Q.rows()
            hits += oracle.abelian_isotope
        info["detail"] = f"{len(corpus())} squares, {hits} abelian isotopes"


def test_03_group_identities():
    with criterion(3, "group-isotopy identities agree with the oracle", 300) as info:
        idents = [catalog_entry(k).identity for k in GROUP_KEYS]
        hits = 0
        for Q, oracle in zip(corpus(), oracle_verdicts()):
            assert {_holds(Q, ident) for ident in idents} == {oracle.group_isotope}, Q.rows()
            hits += oracle.group_isotope
        info["detail"] = f"{len(corpus())} squares, {hits} group isotopes"


# -- 4 ------------------------------------------------------------------------

def test_04_nilpotency_separation():
    with criterion(4, "nilpotency identity separates by class", 120) as info:
        expected = {"Z6": 1, "D4": 2, "Q8": 2, "S3": None}
        checked = 0
        for name, cls in expected.items():
            G = resolve_group(name)
            auts = enumerate_automorphisms(G)
            pairs = [(auts[0], auts[0]), (auts[-1], auts[0]), (auts[0], auts[-1]), (auts[-1], auts[len(auts) // 2])]
            for (phi, psi), c in zip(pairs, itertools.cycle(range(G.order))):
                Q = linear_quasigroup(LinearSpec(G, phi, psi, c))
                oracle = oracle_isotopy(Q).nilpotency_class
                assert oracle == cls
                for n in (1, 2, 3):
                    assert check_nilpotent_isotopy(Q, n).holds == (oracle is not None and oracle <= n), (name, n)
                    checked += 1
        info["detail"] = f"{checked} checks"


# -- 5 ------------------------------------------------------------------------

def test_05_quasicommutator_vanishes():
    with criterion(5, "quasicommutator vanishes up to the class", 120) as info:
        checked = 0
        for Q, oracle in zip(corpus(), oracle_verdicts()):
            cls = oracle.nilpotency_class
            if cls is None:
                continue
            for n in range(max(cls, 1), 3):
                assert check_quasicommutator_vanishes(Q, n), (Q.rows(), n)
                checked += 1
        info["detail"] = f"{checked} (table, n) pairs"


# -- 6 ------------------------------------------------------------------------

def test_06_derived_identities():
    with criterion(6, "derived loop identities match the oracle", None) as info:
        assoc = derive_identity("(x+y)+z = x+(y+z)")
        comm = derive_identity("x+y = y+x")
        for Q, oracle in zip(corpus(), oracle_verdicts()):
            assert _holds(Q, assoc) == oracle.group_isotope, Q.rows()
            assert _holds(Q, comm) == oracle.abelian_isotope, Q.rows()
        info["detail"] = f"{len(corpus())} squares"


# -- 7 ------------------------------------------------------------------------

def _groups_up_to(n):
    return small_abelian_groups(n) + [resolve_group(g) for g in ("S3", "D4", "Q8") if resolve_group(g).order <= n]


def test_07_construction_laws():
    with criterion(7, "construction laws", 60) as info:
        medial = parse_identity(MEDIAL)
        t_count = 0
        for G in small_abelian_groups(8):
            auts = enumerate_automorphisms(G)
            for phi, psi in itertools.product(auts, repeat=2):
                if phi.compose(psi) != psi.compose(phi):
                    continue
                for c in range(G.order):
                    assert _holds(t_quasigroup(LinearSpec(G, phi, psi, c)), medial), (G.name, phi, psi, c)
                    t_count += 1
        ch_count = 0
        for G in small_abelian_groups(9):
            for d in range(G.order):
                Q = ch_quasigroup(G, d)
                assert _holds(Q, "x*y = y*x") and _holds(Q, "x*(x*y) = y"), (G.name, d)
                ch_count += 1
        ld_count = 0
        for G in _groups_up_to(8):
            for phi in enumerate_automorphisms(G):
                try:
                    Q = left_distributive_quasigroup(G, phi)
                except PsiNotBijective:
                    continue
                assert _holds(Q, "x*(y*z) = (x*y)*(x*z)"), (G.name, phi)
                ld_count += 1
        assert ld_count > 0
        info["detail"] = f"{t_count} medial, {ch_count} CH, {ld_count} Stein"


# -- 8 ------------------------------------------------------------------------

def _soundness_pairs(count=200):
    rng = random.Random(8)
    makers = (equal_pair, equal_pair, near_miss_pair, random_pair)
    return [makers[i % len(makers)](rng) for i in range(count)]


def test_08_word_problem_soundness():
    with criterion(8, "equal words evaluate equally in T-models", 120) as info:
        rng = np.random.default_rng(8)
        models = list(iter_models(groups=[resolve_group(f"Z{n}") for n in range(2, 8)]))
        tables = [m.quasigroup() for m in models]
        equal = 0
        for a, b in _soundness_pairs():
            if not words_equal(a, b, search=False).equal:
                continue
            equal += 1
            for Q in tables:
                env = {v: rng.integers(0, Q.order, 20) for v in ("x", "y", "z", "w")}
                left = np.broadcast_to(evaluate(a, Q, env), 20)
                right = np.broadcast_to(evaluate(b, Q, env), 20)
                assert np.array_equal(left, right), (a, b, Q.rows())
        assert equal >= 50
        info["detail"] = f"{equal} equal pairs x {len(tables)} models"


# -- 9 ------------------------------------------------------------------------

def _distinct_pairs(count=200):
    rng = random.Random(9)
    pairs = []
    while len(pairs) < count:
        a, b = (near_miss_pair if len(pairs) % 2 else random_pair)(rng)
        if normal_form(a) != normal_form(b):
            pairs.append((a, b))
    pairs[0] = tuple(parse_term(t) for t in MEDIAL_SWAP)
    return pairs


def test_09_word_problem_separation():
    with criterion(9, "certificates separate distinct words", 180) as info:
        found = 0
        pairs = _distinct_pairs()
        for a, b in pairs:
            v = words_equal(a, b)
            assert not v.equal
            if v.certificate is None:
                continue
            env = dict(v.certificate.assignment)
            Q = v.certificate.table
            la, lb = int(evaluate(a, Q, env)), int(evaluate(b, Q, env))
            assert la != lb and (la, lb) == (v.certificate.left_value, v.certificate.right_value)
            found += 1
        rate = found / len(pairs)
        info["detail"] = f"{found}/{len(pairs)} separated"
        assert rate >= 0.95


# -- 10 -----------------------------------------------------------------------

def test_10_normalization_confluence():
    with criterion(10, "normal form independent of rewrite order", None) as info:
        for seed in range(1000):
            rng = random.Random(seed)
            w = random_delta1(rng, rng.randint(1, 40))
            for mode in Mode:
                first = normalize(w, mode, random.Random(2 * seed))
                second = normalize(w, mode, random.Random(2 * seed + 1))
                assert first == second, (seed, mode)
        info["detail"] = "1000 words, both modes"


# -- 11 -----------------------------------------------------------------------

def test_11_decompose_roundtrip():
    with criterion(11, "T-decomposition round-trip", 180) as info:
        count = 0
        for G in small_abelian_groups(8):
            auts = enumerate_automorphisms(G)
            for phi, psi in itertools.product(auts, repeat=2):
                for c in range(G.order):
                    Q = t_quasigroup(LinearSpec(G, phi, psi, c))
                    d = decompose_T(Q)
                    assert d is not None and d.reconstruct() == Q, (G.name, phi, psi, c)
                    count += 1
        info["detail"] = f"{count} tables"


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
