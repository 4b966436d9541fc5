from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qwild.errors import UsageError
from qwild.qsim import (
    MODE_NAMES,
    Bits,
    GapPolicy,
    Mode,
    QueryLedger,
    SimConfig,
    Verdict,
    estimate_count_factor2,
    grover_find,
    list_marked,
    threshold_count,
)

ALL_MODES = [SimConfig.named(name, seed=3) for name in MODE_NAMES]


def ceil_sqrt_frac(num: int, den: int) -> int:
    """Reference ceil(sqrt(num/den)) by exact search."""
    r = 0
    while r * r * den < num:
        r += 1
    return r


def ledger(cfg: SimConfig, n: int = 1024) -> QueryLedger:
    return QueryLedger.for_run(cfg, n)


def test_config_validation():
    with pytest.raises(UsageError):
        SimConfig(c_grover=0)
    with pytest.raises(UsageError):
        SimConfig(Mode.GAP)
    with pytest.raises(UsageError):
        SimConfig.named("gap-random", seed=None)
    with pytest.raises(UsageError):
        SimConfig.named("bogus")
    assert [SimConfig.named(n).name for n in MODE_NAMES] == list(MODE_NAMES)
    assert SimConfig.named("gap-high").gap_policy is GapPolicy.ALWAYS_HIGH


def test_whp_factor():
    assert SimConfig().whp_factor(1024) == 10
    assert SimConfig().whp_factor(1025) == 11
    assert SimConfig(whp_multiplier=False).whp_factor(1 << 20) == 1


@pytest.mark.parametrize("cfg", ALL_MODES, ids=MODE_NAMES)
def test_threshold_examples(cfg):
    assert threshold_count(np.zeros(16), 16, 2, cfg, ledger(cfg)) is Verdict.LOW
    assert threshold_count(np.ones(16), 16, 2, cfg, ledger(cfg)) is Verdict.HIGH
    mid = np.zeros(16)
    mid[:3] = 1
    assert threshold_count(mid, 16, 2, cfg, ledger(cfg)) in (Verdict.LOW, Verdict.HIGH)


def test_threshold_gap_policies():
    bits = np.zeros(16)
    bits[:3] = 1
    assert threshold_count(bits, 16, 2, SimConfig.named("gap-low"), QueryLedger()) is Verdict.LOW
    assert threshold_count(bits, 16, 2, SimConfig.named("gap-high"), QueryLedger()) is Verdict.HIGH
    # ideal mode splits the band at floor(3*beta/2) = 3
    assert threshold_count(bits, 16, 2, SimConfig(), QueryLedger()) is Verdict.LOW


def test_threshold_guards():
    with pytest.raises(UsageError):
        threshold_count(np.zeros(4), 4, 0, SimConfig(), QueryLedger())
    with pytest.raises(UsageError):
        threshold_count(np.zeros(4), 4, 5, SimConfig(), QueryLedger())
    with pytest.raises(UsageError):
        threshold_count(np.zeros(4), 5, 1, SimConfig(), QueryLedger())


@settings(max_examples=300)
@given(st.integers(1, 300), st.data(), st.sampled_from(MODE_NAMES), st.integers(0, 1000))
def test_threshold_sound_outside_gap(alpha, data, mode, seed):
    beta = data.draw(st.integers(1, alpha))
    s = data.draw(st.integers(0, alpha))
    bits = np.zeros(alpha)
    bits[:s] = 1
    v = threshold_count(bits, alpha, beta, SimConfig.named(mode, seed=seed), QueryLedger())
    if s <= beta:
        assert v is Verdict.LOW
    if s >= 2 * beta:
        assert v is Verdict.HIGH


@settings(max_examples=300)
@given(st.integers(1, 10**6), st.data(), st.sampled_from(MODE_NAMES), st.integers(1, 5), st.integers(0, 3))
def test_threshold_charge_formula(alpha, data, mode, c, depth):
    beta = data.draw(st.integers(1, alpha))
    cfg = SimConfig.named(mode, seed=1, c_count=c)
    led = QueryLedger.for_run(cfg, 4096)
    led.depth = depth
    before = led.charged_quantum_queries
    threshold_count(Bits(length=alpha, total=0), alpha, beta, cfg, led)
    mult = 12 if depth == 0 else 1
    assert led.charged_quantum_queries - before == c * ceil_sqrt_frac(alpha, beta) * mult


def test_grover_examples():
    cfg = SimConfig()
    marks = np.zeros(8, dtype=bool)
    marks[5] = True
    assert grover_find(8, marks, cfg, QueryLedger()) == 5
    assert grover_find(8, np.zeros(8, dtype=bool), cfg, QueryLedger()) is None
    marks = np.zeros(8, dtype=bool)
    marks[[2, 6]] = True
    assert grover_find(8, marks, cfg, QueryLedger()) == 2
    assert grover_find(8, lambda i, sub: i in (2, 6), cfg, QueryLedger()) == 2


def test_grover_random_choice_hits_marked():
    cfg = SimConfig(random_choice=True, seed=11)
    marks = np.zeros(64, dtype=bool)
    marks[[3, 40, 63]] = True
    led = QueryLedger.for_run(cfg, 64)
    seen = {grover_find(64, marks, cfg, led) for _ in range(60)}
    assert seen == {3, 40, 63}


def test_grover_nested_charge():
    cfg = SimConfig()
    led = QueryLedger.for_run(cfg, 256)  # multiplier 8 at the top

    def pred(i, sub):
        threshold_count(Bits(length=100, total=0), 100, 1 + i, cfg, sub)
        return False

    grover_find(9, pred, cfg, led)
    G = 1 * 3 * 8
    worst = ceil_sqrt_frac(100, 1)  # beta = 1 is the costliest evaluation
    assert led.charged_quantum_queries == G + G * worst
    assert led.breakdown == {"grover_find": G, "threshold_count": G * worst}


@settings(max_examples=300)
@given(st.integers(1, 5000), st.sampled_from(MODE_NAMES), st.integers(1, 4), st.integers(0, 2))
def test_grover_charge_formula(N, mode, c, depth):
    cfg = SimConfig.named(mode, seed=0, c_grover=c)
    led = QueryLedger.for_run(cfg, 100)
    led.depth = depth
    grover_find(N, np.zeros(N, dtype=bool), cfg, led)
    assert led.charged_quantum_queries == c * math.ceil(math.sqrt(N) - 1e-12) * (7 if depth == 0 else 1)


def test_list_examples():
    cfg = SimConfig()
    marks = np.zeros(8, dtype=bool)
    marks[[1, 4]] = True
    assert list_marked(8, marks, 3, cfg, QueryLedger()) == [1, 4]
    assert list_marked(8, marks, 1, cfg, QueryLedger()) == [1]
    assert list_marked(8, np.zeros(8, dtype=bool), 5, cfg, QueryLedger()) == []


@settings(max_examples=300)
@given(st.integers(1, 3000), st.integers(1, 200), st.sampled_from(MODE_NAMES), st.integers(1, 4),
       st.integers(0, 2**31 - 1))
def test_list_charge_and_result(N, cap, mode, c, seed):
    rng = np.random.default_rng(seed)
    marks = rng.random(N) < rng.random()
    cfg = SimConfig.named(mode, seed=0, c_list=c)
    led = QueryLedger.for_run(cfg, 100)
    out = list_marked(N, marks, cap, cfg, led)
    assert out == np.flatnonzero(marks)[:cap].tolist()
    r = 0
    while r * r < N * (cap + 1):
        r += 1
    assert led.charged_quantum_queries == c * r * 7


@settings(max_examples=200)
@given(st.integers(1, 3000), st.sampled_from(MODE_NAMES), st.integers(0, 2**31 - 1))
def test_results_independent_of_mode(N, mode, seed):
    rng = np.random.default_rng(seed)
    marks = rng.random(N) < 0.01
    want = np.flatnonzero(marks)
    cfg = SimConfig.named(mode, seed=seed)
    got = grover_find(N, marks, cfg, QueryLedger.for_run(cfg, N))
    assert got == (int(want[0]) if want.size else None)
    assert list_marked(N, marks, 7, cfg, QueryLedger.for_run(cfg, N)) == want[:7].tolist()


def test_estimator_examples():
    cfg = SimConfig()
    assert estimate_count_factor2(np.zeros(64), 64, cfg, QueryLedger()) == 0
    eight = np.zeros(64)
    eight[:8] = 1
    assert 8 <= estimate_count_factor2(eight, 64, cfg, QueryLedger()) <= 16
    one = np.zeros(64)
    one[0] = 1
    assert 1 <= estimate_count_factor2(one, 64, cfg, QueryLedger()) <= 2


@pytest.mark.parametrize("alpha", [1, 2, 3, 7, 64, 100, 1000])
def test_estimator_envelope_exhaustive(alpha):
    for mode in MODE_NAMES:
        for seed in range(3 if mode == "gap-random" else 1):
            cfg = SimConfig.named(mode, seed=seed)
            factor = 2 if mode == "ideal" else 4
            for s in range(alpha + 1):
                led = QueryLedger.for_run(cfg, alpha)
                k = estimate_count_factor2(Bits(length=alpha, total=s), alpha, cfg, led)
                if s == 0:
                    assert k == 0
                else:
                    assert s <= k <= factor * s, (mode, alpha, s, k)


def test_ledger_monotone_and_breakdown():
    cfg = SimConfig()
    led = QueryLedger.for_run(cfg, 64)
    last = 0
    for step in range(20):
        threshold_count(Bits(length=10, total=step % 10), 10, 1 + step % 5, cfg, led)
        grover_find(5 + step, np.zeros(5 + step, dtype=bool), cfg, led)
        list_marked(9, np.ones(9, dtype=bool), 2, cfg, led)
        assert led.charged_quantum_queries > last
        last = led.charged_quantum_queries
    assert sum(led.breakdown.values()) == led.charged_quantum_queries


def test_failure_injection_is_seeded():
    cfg = SimConfig(failure_prob=0.5, seed=4)
    marks = np.ones(10, dtype=bool)
    runs = [[grover_find(10, marks, cfg, led) for _ in range(20)]
            for led in (QueryLedger.for_run(cfg, 10), QueryLedger.for_run(cfg, 10))]
    assert runs[0] == runs[1]
    assert None in runs[0] and 0 in runs[0]
