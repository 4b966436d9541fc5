"""Sublinear-query wildcard matching on top of the simulated primitives.

Pipeline for a text A (length n) and pattern B (length m):

1. estimate the wildcard total up to a constant factor and floor it at
   ``ceil(sqrt(n))`` to get the working budget ``k_eff``;
2. decide whether B is far from every small period (case 1) or close to some
   period d (case 2);
3. case 1: split the start positions into blocks of ``k_eff``; at most one
   start per block can be nearly matching, so search for it and verify it;
4. case 2: bound the region of A that can host a match by listing the ones of
   A's shift-d array, then test candidates with a local criterion that only
   inspects O(k) positions.

Texts with ``m <= n/2`` are split into overlapping windows of length at most
``2m - 1`` and searched window by window.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UsageError
from .qsim import (
    Bits,
    QueryLedger,
    SimConfig,
    Verdict,
    estimate_count_factor2,
    grover_charge,
    grover_find,
    list_marked,
    threshold_batch,
    threshold_count,
)
from .wildstr import PatternString, match_vector, mismatch_counts, shift_bits, shifted_sums


def ceil_sqrt(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


@dataclass(frozen=True)
class EffectiveBudget:
    k_prime: int
    k_eff: int
    k_true: int | None = None  # test-only


@dataclass(frozen=True)
class CaseDecision:
    case: int
    d: int | None = None

    def __str__(self) -> str:
        return "case1" if self.case == 1 else f"case2(d={self.d})"


@dataclass(frozen=True)
class Case2Bounds:
    alpha: int
    beta: int
    a_ones: tuple[int, ...]
    b_ones: tuple[int, ...]


@dataclass
class MatchOutcome:
    witness: int | None
    decision: CaseDecision | None = None
    budget: EffectiveBudget | None = None
    bounds: Case2Bounds | None = None
    ledger: dict = field(default_factory=dict)
    windows: int = 1
    window_start: int = 0

    def to_dict(self) -> dict:
        return {
            "witness": self.witness,
            "case": None if self.decision is None else self.decision.case,
            "d": None if self.decision is None else self.decision.d,
            "alpha": None if self.bounds is None else self.bounds.alpha,
            "beta": None if self.bounds is None else self.bounds.beta,
            "k_prime": None if self.budget is None else self.budget.k_prime,
            "k_eff": None if self.budget is None else self.budget.k_eff,
            "charges": self.ledger,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


def estimate_wildcards(A: PatternString, B: PatternString, cfg: SimConfig,
                       ledger: QueryLedger) -> EffectiveBudget:
    indicator = np.concatenate([A.wildcard_mask, B.wildcard_mask])
    k_prime = estimate_count_factor2(Bits(indicator), indicator.size, cfg, ledger)
    return EffectiveBudget(k_prime, max(k_prime, ceil_sqrt(len(A))),
                           A.wildcard_count + B.wildcard_count)


def detect_case(B: PatternString, k_eff: int, cfg: SimConfig, ledger: QueryLedger) -> CaseDecision:
    """Search for a shift ``d < min(k_eff, m)`` whose shifted sum tests LOW against ``3*k_eff``."""
    if k_eff < 1:
        raise UsageError("k_eff must be >= 1")
    m = len(B)
    top = min(k_eff, m)
    if top <= 1:
        return CaseDecision(1)
    sums = shifted_sums(B, top)
    ledger.touch(2 * int(sum(m - d for d in range(1, top))))
    beta = 3 * k_eff

    def low_shift(idx: int, sub: QueryLedger) -> bool:
        d = idx + 1
        if beta >= m - d:
            return True  # sum <= m - d <= beta: LOW is the only legal verdict
        bits = Bits(length=m - d, total=int(sums[idx]), reads_per_entry=2)
        return threshold_count(bits, m - d, beta, cfg, sub) is Verdict.LOW

    hit = grover_find(top - 1, low_shift, cfg, ledger)
    return CaseDecision(1) if hit is None else CaseDecision(2, hit + 1)


def verify_candidate(A: PatternString, i: int, B: PatternString, cfg: SimConfig,
                     ledger: QueryLedger) -> bool:
    n, m = len(A), len(B)
    if not 0 <= i <= n - m:
        raise UsageError(f"start {i} outside [0, {n - m}]")
    bad = ~match_vector(A.symbols[i : i + m], B.symbols)
    ledger.touch(m)
    return grover_find(m, bad, cfg, ledger) is None


def _check_window(A: PatternString, B: PatternString) -> None:
    n, m = len(A), len(B)
    if not (m >= 1 and 2 * m > n and m <= n):
        raise UsageError(f"window regime needs n/2 < m <= n, got n={n}, m={m}")


def solve_case1(A: PatternString, B: PatternString, k_eff: int, cfg: SimConfig,
                ledger: QueryLedger) -> int | None:
    """Block search over start positions.

    A start is a candidate when its mismatch count tests LOW against
    ``floor(k_eff/4)``; LOW certifies fewer than ``k_eff/2`` mismatches, so a
    block of ``k_eff`` consecutive starts holds at most one candidate.
    """
    _check_window(A, B)
    n, m = len(A), len(B)
    L = n - m + 1
    profile = mismatch_counts(A, B)
    ledger.touch(2 * n)
    beta = min(k_eff // 4, m)
    if beta >= 1:
        low, cost = threshold_batch(profile, m, beta, cfg, ledger, reads_per_entry=2)
    else:
        # budget below 4: "fewer than k/2 mismatches" means none at all
        low = profile == 0
        cost = ledger.child()
        cost.charge("grover_find", grover_charge(m, cfg, cost))
        ledger.touch(2 * m * L)
    blocks = -(-L // k_eff)
    picked: dict[int, int] = {}

    def block_has_match(t: int, sub: QueryLedger) -> bool:
        lo = t * k_eff
        hi = min(L, lo + k_eff)
        j = grover_find(hi - lo, low[lo:hi], cfg, sub, cost=cost)
        if j is None:
            return False
        picked[t] = lo + j
        return verify_candidate(A, lo + j, B, cfg, sub)

    t = grover_find(blocks, block_has_match, cfg, ledger)
    return None if t is None else picked[t]


def case2_bounds(A: PatternString, B: PatternString, d: int, k_eff: int, cfg: SimConfig,
                 ledger: QueryLedger) -> Case2Bounds:
    """Region ``[alpha, beta]`` of A that can host a match, and the listed ones.

    Every start i satisfies ``i <= m-1 <= i+m-1``. To the right of ``m-1``
    the (8k+1)-th one of ``S(A,d)`` caps the window end; to the left, the
    cap is widened by d because a window starting before d does not reach
    the ``d`` array positions just below ``m-1``.
    """
    n, m = len(A), len(B)
    _check_window(A, B)
    if not 1 <= d < m:
        raise UsageError(f"shift d={d} outside [1, {m})")
    cap = 8 * k_eff + 1
    sa = shift_bits(A.symbols, d)
    ledger.touch(2 * sa.size)

    right: list[int] = []
    if n - d > m - 1:
        right = [m - 1 + p for p in list_marked(n - d - (m - 1), sa[m - 1 :], cap, cfg, ledger)]
    beta = n - 1 if len(right) < cap else right[cap - 1] - 1 + d

    left_top = min(m - 1, n - d - 1)
    left_cap = cap + d
    left = [left_top - r for r in
            list_marked(left_top + 1, sa[left_top::-1], left_cap, cfg, ledger)]
    alpha = 0 if len(left) < left_cap else min(left) + 1

    sb = shift_bits(B.symbols, d)
    ledger.touch(2 * sb.size)
    b_ones = list_marked(sb.size, sb, max(6 * k_eff, 1), cfg, ledger) if sb.size else []

    a_ones = sorted(p for p in set(left) | set(right) if alpha <= p <= beta - d)
    return Case2Bounds(alpha, beta, tuple(a_ones), tuple(b_ones))


def _local_conditions(A: PatternString, B: PatternString, d: int, cand: np.ndarray,
                      a_ones: np.ndarray, b_ones: np.ndarray) -> np.ndarray:
    """Evaluate the three local match conditions for every candidate start."""
    a, b = A.symbols, B.symbols
    m = b.size
    surv = cand
    for j in range(d):
        if not surv.size:
            break
        surv = surv[match_vector(a[surv + j], b[j])]
    for j in b_ones.tolist():
        if not surv.size:
            break
        keep = match_vector(a[surv + j], b[j]) & match_vector(a[surv + j + d], b[j + d])
        surv = surv[keep]
    for p in a_ones.tolist():
        if not surv.size:
            break
        inside = (surv <= p) & (surv > p - (m - d))
        if not inside.any():
            continue
        s = surv[inside]
        ok = match_vector(np.int64(a[p]), b[p - s]) & match_vector(np.int64(a[p + d]), b[p - s + d])
        keep = np.ones(surv.size, dtype=bool)
        keep[np.flatnonzero(inside)[~ok]] = False
        surv = surv[keep]
    flags = np.zeros(cand.size, dtype=bool)
    flags[surv - cand[0]] = True
    return flags


def solve_case2(A: PatternString, B: PatternString, k_eff: int, d: int, cfg: SimConfig,
                ledger: QueryLedger) -> int | None:
    return _solve_case2(A, B, k_eff, d, cfg, ledger)[0]


def _solve_case2(A, B, k_eff, d, cfg, ledger) -> tuple[int | None, Case2Bounds]:
    n, m = len(A), len(B)
    bounds = case2_bounds(A, B, d, k_eff, cfg, ledger)
    lo, hi = bounds.alpha, min(bounds.beta - m + 1, n - m)
    if lo > hi:
        return None, bounds
    cand = np.arange(lo, hi + 1)
    a_ones = np.asarray(bounds.a_ones, dtype=np.int64)
    b_ones = np.asarray(bounds.b_ones, dtype=np.int64)
    # per-candidate search domain: d prefix positions plus two checks per listed one
    in_window = np.searchsorted(a_ones, cand + (m - d)) - np.searchsorted(a_ones, cand)
    domain = d + 2 * in_window + 2 * b_ones.size
    cost = ledger.child()
    cost.charge("grover_find", grover_charge(int(domain.max()), cfg, cost))
    ledger.touch(int(domain.sum()))
    flags = _local_conditions(A, B, d, cand, a_ones, b_ones)
    t = grover_find(cand.size, flags, cfg, ledger, cost=cost)
    return (None if t is None else lo + t), bounds


def _is_match(A: PatternString, B: PatternString, i: int) -> bool:
    m = len(B)
    return bool(match_vector(A.symbols[i : i + m], B.symbols).all())


def match_window(A: PatternString, B: PatternString, cfg: SimConfig,
                 ledger: QueryLedger) -> MatchOutcome:
    _check_window(A, B)
    budget = estimate_wildcards(A, B, cfg, ledger)
    decision = detect_case(B, budget.k_eff, cfg, ledger)
    bounds = None
    if decision.case == 1:
        witness = solve_case1(A, B, budget.k_eff, cfg, ledger)
    else:
        witness, bounds = _solve_case2(A, B, budget.k_eff, decision.d, cfg, ledger)
    if witness is not None:
        ledger.touch(2 * len(B))
        if not _is_match(A, B, witness):
            witness = None  # only reachable with injected primitive failures
    return MatchOutcome(witness, decision, budget, bounds, ledger.snapshot())


def window_instances(n: int, m: int) -> list[tuple[int, int]]:
    """Inclusive ``(start, end)`` text windows covering every alignment.

    For ``m <= n/2`` these are ``ceil(n/m)`` windows of length at most
    ``2m - 1`` stepping by m; the last one is anchored at the end of the
    text, and any earlier window that would run past the text is clipped.
    """
    if not 1 <= m <= n:
        raise UsageError(f"need 1 <= m <= n, got m={m}, n={n}")
    if 2 * m > n:
        return [(0, n - 1)]
    count = -(-n // m)
    out = [((i - 1) * m, min((i - 1) * m + 2 * m - 2, n - 1)) for i in range(1, count)]
    out.append((n - (2 * m - 1), n - 1))
    return out


def match_full(A: PatternString, B: PatternString, cfg: SimConfig | None = None,
               ledger: QueryLedger | None = None) -> MatchOutcome:
    """Find one start i with ``A[i, i+m-1]`` matching B, or report none."""
    cfg = cfg or SimConfig()
    n, m = len(A), len(B)
    if not 1 <= m <= n:
        raise UsageError(f"need 1 <= m <= n, got m={m}, n={n}")
    if ledger is None:
        ledger = QueryLedger.for_run(cfg, n)
    windows = window_instances(n, m)
    if len(windows) == 1:
        return match_window(A, B, cfg, ledger)

    results: dict[int, MatchOutcome] = {}

    def window_matches(t: int, sub: QueryLedger) -> bool:
        s, e = windows[t]
        results[t] = match_window(A.substring(s, e), B, cfg, sub)
        return results[t].witness is not None

    t = grover_find(len(windows), window_matches, cfg, ledger)
    pick = 0 if t is None else t
    local = results[pick]
    witness = None if t is None else windows[t][0] + local.witness
    return MatchOutcome(witness, local.decision, local.budget, local.bounds,
                        ledger.snapshot(), len(windows), windows[pick][0])
