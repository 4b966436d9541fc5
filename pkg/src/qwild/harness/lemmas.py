"""Lemma verification sweeps: exhaustive small strings plus random samples."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from ..errors import InfeasibleSpec, PreconditionViolation, UsageError
from ..oracle import (
    CounterexampleReport,
    lemma1_check,
    lemma2_check,
    lemma3_check,
    lemma3_sweep,
    wildcard_total,
)
from ..wildstr import WILDCARD, PatternString, Role, shifted_sums
from .gen import CaseBias, GenSpec, gen_instance

MAX_EXHAUSTIVE_N = 10
SAMPLE_MAX_N = 64
_CHUNK_CELLS = 1 << 22
_BINARY = np.array([ord("a"), ord("b"), WILDCARD], dtype=np.int64)


@dataclass
class LemmaReport:
    premise: dict[int, int] = field(default_factory=lambda: {1: 0, 2: 0, 3: 0})
    counterexamples: list[CounterexampleReport] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.counterexamples

    def add(self, lemma: int, count: int = 1) -> None:
        self.premise[lemma] += count

    def summary(self) -> str:
        parts = [f"lemma{k}: {v} premise-satisfying" for k, v in sorted(self.premise.items())]
        return "; ".join(parts) + f"; counterexamples: {len(self.counterexamples)}"


def _all_strings(length: int) -> np.ndarray:
    return _BINARY[np.array(list(itertools.product(range(3), repeat=length)), dtype=np.int64)]


def _matches(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x == y) | (x == WILDCARD) | (y == WILDCARD)


def _shift_ones(x: np.ndarray, d: int) -> np.ndarray:
    """Shifted matching array of every row of x (1 on a wildcard or a symbol change)."""
    lo, hi = x[:, :-d], x[:, d:]
    return (lo != hi) | (lo == WILDCARD) | (hi == WILDCARD)


def _sweep_block(T: np.ndarray, P: np.ndarray, report: LemmaReport) -> list[tuple[int, int, int, dict]]:
    """All (text, pattern) pairs for one (n, m); returns raw violations (lemma, t, p, info)."""
    n, m = T.shape[1], P.shape[1]
    L = n - m + 1
    idx = np.arange(L)[:, None] + np.arange(m)[None, :]
    M = _matches(T[:, None, idx], P[None, :, None, :])  # (t, p, i, j)
    prof = (~M).sum(axis=-1)
    direct = prof == 0
    W = (T == WILDCARD).sum(1)[:, None] + (P == WILDCARD).sum(1)[None, :]
    sums_p = np.stack([_shift_ones(P, d).sum(1) for d in range(1, m)], axis=1) if m > 1 else np.zeros((len(P), 0), int)
    bad = []

    # lemma 1, every k the premise admits
    for k in range(0, m + 1):
        if k <= 1:
            prem_p = np.ones(len(P), dtype=bool)
        else:
            prem_p = (sums_p[:, : k - 1] >= 3 * k).all(axis=1)
        valid = (W <= k) & prem_p[None, :]
        if not valid.any():
            continue
        report.add(1, int(valid.sum()))
        low = 2 * prof < k
        viol = np.zeros_like(valid)
        for gap in range(1, min(k, L)):
            viol |= (low[..., :-gap] & low[..., gap:]).any(axis=-1)
        for t, p in np.argwhere(viol & valid)[:1]:
            bad.append((1, int(t), int(p), {"k": k}))

    # lemmas 2 and 3, every shift
    for d in range(1, m):
        sa = _shift_ones(T, d)
        csum = np.concatenate([np.zeros((len(T), 1), int), np.cumsum(sa, axis=1)], axis=1)
        window = csum[:, m - d : m - d + L] - csum[:, :L]  # (t, i)
        k2 = np.maximum(W, -(-sums_p[:, d - 1] // 6)[None, :])
        report.add(2, k2.size)
        viol2 = (direct & (window[:, None, :] > 8 * k2[..., None])).any(axis=-1)
        for t, p in np.argwhere(viol2)[:1]:
            bad.append((2, int(t), int(p), {"d": d, "k": int(k2[t, p])}))

        both = M[..., : m - d] & M[..., d:]
        sa_win = sa[:, np.arange(L)[:, None] + np.arange(m - d)[None, :]]  # (t, i, j)
        sb = _shift_ones(P, d)  # (p, j)
        cond = M[..., :d].all(axis=-1)
        cond &= (~sa_win[:, None] | both).all(axis=-1)
        cond &= (~sb[None, :, None, :] | both).all(axis=-1)
        report.add(3, cond.size)
        for t, p, i in np.argwhere(cond != direct)[:1]:
            bad.append((3, int(t), int(p), {"d": d, "i": int(i)}))
    return bad


def _confirm(lemma: int, A: PatternString, B: PatternString, info: dict) -> CounterexampleReport | None:
    """Re-run a batch violation through the per-instance oracle to build its report."""
    if lemma == 1:
        return lemma1_check(A, B, info["k"])
    if lemma == 2:
        return lemma2_check(A, B, info["d"], info["k"])
    if lemma3_check(A, B, info["d"], info["i"]):
        return None
    return CounterexampleReport(3, str(A), str(B), {"d": info["d"], "i": info["i"]})


def exhaustive_sweep(max_n: int, report: LemmaReport) -> None:
    strings = {length: _all_strings(length) for length in range(1, max_n + 1)}
    for n in range(1, max_n + 1):
        for m in range(1, n + 1):
            T, P = strings[n], strings[m]
            step = max(1, _CHUNK_CELLS // (len(P) * (n - m + 1) * m))
            bad = []
            for lo in range(0, len(T), step):
                bad += [(lem, t + lo, p, info) for lem, t, p, info in _sweep_block(T[lo : lo + step], P, report)]
            for lemma, t, p, info in bad:
                A = PatternString(strings[n][t], Role.TEXT)
                B = PatternString(strings[m][p], Role.PATTERN)
                found = _confirm(lemma, A, B, info)
                if found is None:
                    raise AssertionError(f"batch sweep flagged lemma {lemma} on {A}/{B} but the oracle disagrees")
                report.counterexamples.append(found)


def _random_spec(rng: np.random.Generator) -> GenSpec:
    n = int(rng.integers(2, SAMPLE_MAX_N + 1))
    m = int(rng.integers(1, n + 1))
    case = rng.choice([CaseBias.ANY, CaseBias.CASE1, CaseBias.CASE2])
    alphabet = int(rng.choice([2, 3, 4, 8, 16, 64]))
    if case is CaseBias.CASE1:
        k = int(rng.integers(2, max((m + 1) // 4, 2) + 1))
        alphabet = max(alphabet, k)
    else:
        k = int(rng.integers(0, min(n + m, max(m // 3, 1)) + 1))
    plant = near = None
    roll = rng.random()
    if roll < 0.5:
        plant = int(rng.integers(0, n - m + 1))
    elif roll < 0.8:
        near = int(rng.integers(1, max(k // 2, 1) + 1))
    return GenSpec(n, m, k, alphabet=alphabet, plant_at=plant, near_miss=near, case=case,
                   seed=int(rng.integers(0, 2**31)))


def _sample_checks(A: PatternString, B: PatternString, rng: np.random.Generator, report: LemmaReport) -> None:
    n, m = len(A), len(B)
    w = wildcard_total(A, B)
    sums = shifted_sums(B, m) if m > 1 else np.zeros(0, dtype=np.int64)

    # lemma 1 at the largest admissible budget and one random admissible budget
    admissible = [k for k in range(max(w, 2), m + 1) if (sums[: k - 1] >= 3 * k).all()]
    if admissible:
        for k in {admissible[-1], int(rng.choice(admissible))}:
            found = lemma1_check(A, B, k)
            report.add(1)
            if found:
                report.counterexamples.append(found)

    if m > 1:
        # lemma 2 at the smallest-sum shift and one random shift, minimal budget
        for d in {int(np.argmin(sums)) + 1, int(rng.integers(1, m))}:
            k = max(w, -(-int(sums[d - 1]) // 6))
            found = lemma2_check(A, B, d, k)
            report.add(2)
            if found:
                report.counterexamples.append(found)

        if n <= 16:
            hit = lemma3_sweep(A, B)
            report.add(3, (m - 1) * (n - m + 1))
            if hit is not None:
                report.counterexamples.append(
                    CounterexampleReport(3, str(A), str(B), {"d": hit[0], "i": hit[1]}))
        else:
            for _ in range(2):
                d, i = int(rng.integers(1, m)), int(rng.integers(0, n - m + 1))
                report.add(3)
                if not lemma3_check(A, B, d, i):
                    report.counterexamples.append(CounterexampleReport(3, str(A), str(B), {"d": d, "i": i}))


def random_sweep(samples: int, seed: int, report: LemmaReport) -> None:
    rng = np.random.default_rng(seed)
    done = 0
    while done < samples:
        try:
            A, B = gen_instance(_random_spec(rng))
        except InfeasibleSpec:
            continue
        try:
            _sample_checks(A, B, rng, report)
        except PreconditionViolation as exc:  # pragma: no cover - inputs are filtered above
            raise AssertionError(f"sampled instance broke a premise filter: {exc}") from exc
        done += 1


def run_lemma_suite(max_n: int, samples: int, seed: int = 0) -> LemmaReport:
    """Exhaustive sweep over {a, b, ?} strings up to ``max_n`` then ``samples`` random instances."""
    if not 0 <= max_n <= MAX_EXHAUSTIVE_N:
        raise UsageError(f"max_n must be in [0, {MAX_EXHAUSTIVE_N}], got {max_n}")
    if samples < 0:
        raise UsageError("samples must be non-negative")
    report = LemmaReport()
    exhaustive_sweep(max_n, report)
    random_sweep(samples, seed, report)
    return report
