"""Spot checks of the proposition suites on small corpora.

The full-scale runs (all 4-state maps, 500 random systems) live in the
acceptance module; here the suites run on every system with up to three
states plus a seeded random batch, which already exercises every branch.
"""

import pytest

from morselat import FiniteDynSys
from morselat.verify import (
    CHECKS,
    SystemData,
    all_systems,
    random_systems,
    run_verification,
)


@pytest.fixture(scope="module")
def small_corpus():
    systems = []
    for n in (1, 2, 3):
        systems.extend(all_systems(n))
    systems.extend(random_systems(60, 6, seed=1234))
    return systems


def test_corpus_sizes():
    assert len(list(all_systems(2))) == 4
    assert len(list(all_systems(3))) == 27
    assert len(list(all_systems(4))) == 256


def test_random_corpus_is_reproducible():
    a = [dict(s.next) for s in random_systems(10, 5, seed=9)]
    b = [dict(s.next) for s in random_systems(10, 5, seed=9)]
    assert a == b


def test_all_tags_pass_on_small_corpus(small_corpus):
    results = run_verification(small_corpus)
    failed = [r for r in results if not r.passed]
    assert not failed, f"failing tags: {[(r.tag, r.counterexample) for r in failed]}"
    assert {r.tag for r in results} == {tag for tag, _ in CHECKS}


def test_limit_tables_match_direct_computation():
    sys = FiniteDynSys("mzab", {"m": "z", "z": "z", "a": "b", "b": "b"})
    sd = SystemData(sys)
    for m in range(16):
        u = sys.unmask(m)
        assert sys.mask(sys.omega(u)) == sd.omega[m]
        assert sys.mask(sys.alpha(u)) == sd.alpha[m]


def test_checks_detect_a_broken_operator(monkeypatch):
    # sanity of the harness itself: corrupt one omega value and the
    # additivity tag must notice
    sys = FiniteDynSys((0, 1), {0: 1, 1: 1})
    sd = SystemData(sys)
    sd.omega = list(sd.omega)
    sd.omega[1] = 3
    from morselat.verify import check_p2_11

    assert check_p2_11(sd) is not None
