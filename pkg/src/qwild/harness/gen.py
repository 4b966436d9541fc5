"""Seeded instance generation."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from enum import Enum

import numpy as np

from ..errors import InfeasibleSpec, UsageError
from ..oracle import case1_premise
from ..wildstr import ALPHABET_LIMIT, WILDCARD, PatternString, Role, shift_bits, shifted_sums

MAX_RETRIES = 20


def _symbol_table() -> np.ndarray:
    readable = [*range(ord("a"), ord("z") + 1), *range(ord("A"), ord("Z") + 1),
                *range(ord("0"), ord("9") + 1)]
    reserved = {ord("?"), ord("$"), ord("\n"), ord("\r")}
    rest = [c for c in range(256) if c not in reserved and c not in readable]
    tail = range(256, ALPHABET_LIMIT)
    return np.array([*readable, *rest, *tail], dtype=np.int64)


SYMBOLS = _symbol_table()


class CaseBias(Enum):
    ANY = "any"
    CASE1 = "1"
    CASE2 = "2"


@dataclass(frozen=True)
class GenSpec:
    n: int
    m: int
    k: int
    alphabet: int = 4
    plant_at: int | None = None
    near_miss: int | None = None
    case: CaseBias = CaseBias.ANY
    seed: int = 0

    def __post_init__(self) -> None:
        if isinstance(self.case, str):
            object.__setattr__(self, "case", CaseBias(self.case))
        if not 1 <= self.m <= self.n:
            raise UsageError(f"need 1 <= m <= n, got m={self.m}, n={self.n}")
        if not 0 <= self.k <= self.n + self.m:
            raise UsageError(f"k={self.k} outside [0, n+m]")
        if not 1 <= self.alphabet <= SYMBOLS.size:
            raise UsageError(f"alphabet size {self.alphabet} outside [1, {SYMBOLS.size}]")
        if self.plant_at is not None and not 0 <= self.plant_at <= self.n - self.m:
            raise UsageError(f"plant index {self.plant_at} outside [0, {self.n - self.m}]")
        if self.near_miss is not None and self.near_miss < 0:
            raise UsageError("near_miss must be non-negative")

    def to_dict(self) -> dict:
        out = asdict(self)
        out["case"] = self.case.value
        return out


def _distinct_run(rng: np.random.Generator, m: int, w: int, sigma: int) -> np.ndarray:
    """Random codes where every w consecutive entries are pairwise distinct."""
    if w <= 1:
        return rng.integers(0, sigma, m)
    # pool holds the symbols not used in the last w-1 positions
    pool = rng.permutation(sigma).tolist()
    draws = rng.random(m)
    out = np.empty(m, dtype=np.int64)
    for j in range(m):
        idx = int(draws[j] * len(pool))
        pool[idx], pool[-1] = pool[-1], pool[idx]
        out[j] = pool.pop()
        if j >= w - 1:
            pool.append(int(out[j - w + 1]))
    return out


def _periodic(rng: np.random.Generator, length: int, block: np.ndarray) -> np.ndarray:
    reps = -(-length // block.size)
    return np.tile(block, reps)[:length].copy()


def _perturb(rng: np.random.Generator, x: np.ndarray, count: int, sigma: int) -> None:
    if count <= 0 or sigma < 2:
        return
    pos = rng.choice(x.size, size=min(count, x.size), replace=False)
    x[pos] = (x[pos] + rng.integers(1, sigma, pos.size)) % sigma


def _has_low_shift(B: PatternString, k: int) -> bool:
    top = min(max(k, 2), len(B))
    sums = shifted_sums(B, top)
    return bool(sums.size) and bool((sums <= 6 * k).any())


def gen_instance(spec: GenSpec) -> tuple[PatternString, PatternString]:
    """Build (A, B) for a spec; the same spec always yields the same strings."""
    n, m, k, sigma = spec.n, spec.m, spec.k, spec.alphabet
    rng = np.random.default_rng(spec.seed)
    if spec.case is CaseBias.CASE1 and k >= 2:
        if k > m or m < 4 * k - 1:
            raise InfeasibleSpec(f"case 1 needs m >= 4k-1 (m={m}, k={k})")
        if sigma < min(k, m):
            raise InfeasibleSpec(f"case 1 needs alphabet >= {min(k, m)}")
    if spec.case is CaseBias.CASE2 and m < 2:
        raise InfeasibleSpec("case 2 needs m >= 2")

    for _ in range(MAX_RETRIES):
        wild = rng.choice(n + m, size=k, replace=False)
        wa, wb = wild[wild < n], wild[wild >= n] - n
        d = None
        if spec.case is CaseBias.CASE1:
            b = _distinct_run(rng, m, min(k, m), sigma)
            a = rng.integers(0, sigma, n)
        elif spec.case is CaseBias.CASE2:
            d = int(rng.integers(1, max(min(k, m), 2)))
            block = rng.integers(0, sigma, d)
            b = _periodic(rng, m, block)
            _perturb(rng, b, int(rng.integers(0, max(3 * k - wb.size, 0) + 1)), sigma)
            a = _periodic(rng, n, block)
            noise = rng.choice([0.0, 0.01, 0.1, 1.0])
            _perturb(rng, a, int(noise * n), sigma)
        else:
            b = rng.integers(0, sigma, m)
            a = rng.integers(0, sigma, n)
        b[wb] = -1

        i = spec.plant_at
        if i is None and spec.near_miss is not None:
            i = int(rng.integers(0, n - m + 1))
        if i is not None:
            real = b >= 0
            a[i : i + m][real] = b[real]
            if spec.near_miss:
                wa_set = set(wa.tolist())
                slots = [j for j in np.flatnonzero(real).tolist() if i + j not in wa_set]
                if len(slots) < spec.near_miss or sigma < 2:
                    raise InfeasibleSpec("not enough positions for the requested near-miss")
                for j in rng.choice(slots, size=spec.near_miss, replace=False).tolist():
                    a[i + j] = (b[j] + int(rng.integers(1, sigma))) % sigma
        a[wa] = -1

        A = PatternString(np.where(a < 0, WILDCARD, SYMBOLS[np.maximum(a, 0)]), Role.TEXT)
        B = PatternString(np.where(b < 0, WILDCARD, SYMBOLS[np.maximum(b, 0)]), Role.PATTERN)
        if spec.case is CaseBias.CASE1 and not case1_premise(B, k):
            continue
        if spec.case is CaseBias.CASE2 and not _has_low_shift(B, k):
            continue
        return A, B
    raise InfeasibleSpec(f"no instance satisfying {spec} after {MAX_RETRIES} draws")


def overlap_shift(B: PatternString, k_eff: int) -> int | None:
    """Smallest shift ``d < min(k_eff, m)`` whose sum lies strictly inside ``(3k_eff, 6k_eff)``."""
    sums = shifted_sums(B, min(k_eff, len(B)))
    hits = np.flatnonzero((sums > 3 * k_eff) & (sums < 6 * k_eff))
    return int(hits[0]) + 1 if hits.size else None


def gen_overlap_instance(n: int, m: int, seed: int, *, plant: bool = True,
                         wildcards: int | None = None) -> tuple[PatternString, PatternString]:
    """Instance whose pattern has a shift sum inside the ambiguous band.

    The budget is pinned at ``k_eff = ceil(sqrt(n))`` by keeping the wildcard
    total below a quarter of it, so every simulation mode sees the same band
    ``(3k_eff, 6k_eff)``. B is periodic with a random period and enough
    perturbations to land its shift sum in the band.
    """
    k_eff = math.isqrt(n - 1) + 1 if n > 1 else 1
    if not 2 * m > n or m - 1 <= 6 * k_eff:
        raise InfeasibleSpec(f"overlap band needs n/2 < m and m > 6*ceil(sqrt(n))+1 (n={n}, m={m})")
    rng = np.random.default_rng(seed)
    w_max = (k_eff - 1) // 4
    w = int(rng.integers(0, w_max + 1)) if wildcards is None else wildcards
    if not 0 <= w <= w_max:
        raise UsageError(f"wildcards must be in [0, {w_max}]")
    sigma = 4
    for _ in range(MAX_RETRIES):
        d = int(rng.integers(1, min(k_eff, m)))
        block = rng.integers(0, sigma, d)
        b = _periodic(rng, m, block)
        target = int(rng.integers(3 * k_eff + 1, 6 * k_eff))
        # each perturbation adds at most two ones; add them until the sum reaches the band
        order = rng.permutation(m)
        wb = rng.integers(0, w + 1)
        codes = b.copy()
        codes[order[:wb]] = -1
        pos = wb
        while pos < m:
            B = PatternString(np.where(codes < 0, WILDCARD, SYMBOLS[np.maximum(codes, 0)]), Role.PATTERN)
            s = int(np.count_nonzero(shift_bits(B.symbols, d)))
            if s > 3 * k_eff:
                break
            step = order[pos : pos + max(1, (target - s) // 4)]
            codes[step] = (codes[step] + rng.integers(1, sigma, step.size)) % sigma
            pos += step.size
        if overlap_shift(B, k_eff) is None:
            continue
        a = _periodic(rng, n, block)
        _perturb(rng, a, int(rng.choice([0.0, 0.01, 0.1]) * n), sigma)
        if plant:
            i = int(rng.integers(0, n - m + 1))
            real = codes >= 0
            a[i : i + m][real] = codes[real]
        wa = rng.choice(n, size=w - wb, replace=False)
        a[wa] = -1
        A = PatternString(np.where(a < 0, WILDCARD, SYMBOLS[np.maximum(a, 0)]), Role.TEXT)
        return A, B
    raise InfeasibleSpec(f"no overlap instance for n={n}, m={m} after {MAX_RETRIES} draws")
