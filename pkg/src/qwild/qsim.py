"""Query-charged classical stand-ins for the quantum primitives.

Each primitive computes its true answer classically and charges the
theoretical query cost to a :class:`QueryLedger`. Nothing here simulates
amplitudes.

Charging rules (``r`` is the ledger's repetition factor, applied only at the
outermost nesting level):

* ``threshold_count``: ``c_count * ceil(sqrt(alpha / beta)) * r``
* ``grover_find``: ``G = c_grover * ceil(sqrt(N)) * r`` oracle calls, plus
  ``G`` times the charge of the costliest predicate evaluation
* ``list_marked``: ``c_list * ceil(sqrt(N * (t + 1))) * r``

Nested calls run on child ledgers with ``r = 1``: amplifying the outer search
is enough, a bounded-error inner predicate needs no separate log factor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Union

import numpy as np

from .errors import UsageError


class Mode(Enum):
    IDEAL = "ideal"
    GAP = "gap"


class GapPolicy(Enum):
    ALWAYS_LOW = "low"
    ALWAYS_HIGH = "high"
    RANDOM = "random"


class Verdict(Enum):
    LOW = "low"
    HIGH = "high"


MODE_NAMES = ("ideal", "gap-low", "gap-high", "gap-random")


@dataclass(frozen=True)
class SimConfig:
    mode: Mode = Mode.IDEAL
    gap_policy: GapPolicy | None = None
    seed: int | None = 0
    c_grover: int = 1
    c_list: int = 1
    c_count: int = 1
    whp_multiplier: bool = True
    random_choice: bool = False  # grover_find picks a uniform marked index
    failure_prob: float = 0.0  # robustness testing only

    def __post_init__(self) -> None:
        for name in ("c_grover", "c_list", "c_count"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise UsageError(f"{name} must be a positive integer, got {v!r}")
        if self.mode is Mode.GAP and self.gap_policy is None:
            raise UsageError("gap mode needs a gap policy")
        if self.mode is Mode.IDEAL and self.gap_policy is not None:
            raise UsageError("ideal mode takes no gap policy")
        if self.seed is None and (
            self.gap_policy is GapPolicy.RANDOM or self.random_choice or self.failure_prob
        ):
            raise UsageError("randomized behaviour requires a seed")
        if not 0.0 <= self.failure_prob < 1.0:
            raise UsageError("failure_prob must be in [0, 1)")

    @classmethod
    def named(cls, name: str, seed: int | None = 0, **kw) -> SimConfig:
        if name == "ideal":
            return cls(Mode.IDEAL, None, seed, **kw)
        policies = {"gap-low": GapPolicy.ALWAYS_LOW, "gap-high": GapPolicy.ALWAYS_HIGH,
                    "gap-random": GapPolicy.RANDOM}
        if name not in policies:
            raise UsageError(f"unknown mode {name!r}; expected one of {MODE_NAMES}")
        return cls(Mode.GAP, policies[name], seed, **kw)

    @property
    def name(self) -> str:
        if self.mode is Mode.IDEAL:
            return "ideal"
        return f"gap-{self.gap_policy.value}"

    def whp_factor(self, n: int) -> int:
        if not self.whp_multiplier:
            return 1
        return max(1, math.ceil(math.log2(max(n, 2))))


@dataclass
class QueryLedger:
    """Charges for one run. Child ledgers share the run's RNG."""

    repetitions: int = 1
    depth: int = 0
    charged_quantum_queries: int = 0
    classical_symbol_accesses: int = 0
    breakdown: dict[str, int] = field(default_factory=dict)
    rng: np.random.Generator = field(default_factory=lambda: np.random.default_rng(0), repr=False)

    @classmethod
    def for_run(cls, cfg: SimConfig, n: int) -> QueryLedger:
        return cls(repetitions=cfg.whp_factor(n), rng=np.random.default_rng(cfg.seed))

    @property
    def multiplier(self) -> int:
        return self.repetitions if self.depth == 0 else 1

    def charge(self, primitive: str, amount: int) -> None:
        if amount < 0:
            raise ValueError("charges are non-negative")
        self.charged_quantum_queries += amount
        self.breakdown[primitive] = self.breakdown.get(primitive, 0) + amount

    def touch(self, accesses: int) -> None:
        self.classical_symbol_accesses += int(accesses)

    def child(self) -> QueryLedger:
        return QueryLedger(self.repetitions, self.depth + 1, rng=self.rng)

    def absorb(self, sub: QueryLedger, times: int) -> None:
        """Add ``times`` copies of a child's quantum charges (classical work is added separately)."""
        for k, v in sub.breakdown.items():
            self.charge(k, v * times)

    def snapshot(self) -> dict:
        return {
            "charged_quantum_queries": self.charged_quantum_queries,
            "classical_symbol_accesses": self.classical_symbol_accesses,
            "breakdown": dict(sorted(self.breakdown.items())),
        }


class Bits:
    """A 0/1 array seen through an accessor.

    ``total`` may be supplied when the caller already knows the sum (e.g. from
    a precomputed profile); otherwise it is computed from ``values``.
    """

    def __init__(self, values: np.ndarray | None = None, *, length: int | None = None,
                 total: int | None = None, reads_per_entry: int = 1):
        if values is None and (length is None or total is None):
            raise UsageError("Bits needs values, or both length and total")
        self._values = None if values is None else np.asarray(values).astype(bool)
        self.length = int(self._values.size if values is not None else length)
        self._total = total
        self.reads_per_entry = reads_per_entry

    def __len__(self) -> int:
        return self.length

    @property
    def values(self) -> np.ndarray:
        if self._values is None:
            raise UsageError("entries not materialized")
        return self._values

    def total(self) -> int:
        if self._total is None:
            self._total = int(np.count_nonzero(self._values))
        return self._total


# --- threshold counting ------------------------------------------------------


def threshold_charge(alpha: int, beta: int, cfg: SimConfig, ledger: QueryLedger) -> int:
    return cfg.c_count * _ceil_sqrt_ratio(alpha, beta) * ledger.multiplier


def _ceil_sqrt(x: int) -> int:
    r = math.isqrt(x)
    return r if r * r == x else r + 1


def _ceil_sqrt_ratio(num: int, den: int) -> int:
    """``ceil(sqrt(num / den))`` in exact integer arithmetic."""
    r = _ceil_sqrt(-(-num // den))
    # r is an upper bound; step down while (r - 1)^2 * den >= num
    while r > 0 and (r - 1) * (r - 1) * den >= num:
        r -= 1
    return r


def low_certificate(beta: int, cfg: SimConfig) -> int:
    """Largest sum still consistent with a LOW verdict at threshold beta."""
    if cfg.mode is Mode.IDEAL:
        return 3 * beta // 2
    return 2 * beta - 1


def _verdicts(totals: np.ndarray, beta: int, cfg: SimConfig, rng: np.random.Generator) -> np.ndarray:
    """True where the verdict is LOW."""
    totals = np.asarray(totals)
    if cfg.mode is Mode.IDEAL:
        return totals <= 3 * beta // 2
    low = totals <= beta
    gap = (totals > beta) & (totals < 2 * beta)
    if cfg.gap_policy is GapPolicy.ALWAYS_LOW:
        low = low | gap
    elif cfg.gap_policy is GapPolicy.RANDOM and gap.any():
        coins = rng.random(totals.shape) < 0.5
        low = low | (gap & coins)
    return low


def _check_threshold_args(alpha: int, beta: int) -> None:
    if alpha < 1:
        raise UsageError(f"alpha={alpha} must be >= 1")
    if not 1 <= beta <= alpha:
        raise UsageError(f"beta={beta} outside [1, alpha={alpha}]")


def threshold_count(entries: Bits | np.ndarray, alpha: int, beta: int,
                    cfg: SimConfig, ledger: QueryLedger) -> Verdict:
    """Decide whether the sum is at most beta (LOW) or at least 2*beta (HIGH).

    Sums strictly between the two are resolved by the configured policy: the
    ideal mode compares against ``floor(3*beta/2)``.
    """
    _check_threshold_args(alpha, beta)
    bits = entries if isinstance(entries, Bits) else Bits(entries)
    if len(bits) != alpha:
        raise UsageError(f"accessor length {len(bits)} != alpha {alpha}")
    ledger.charge("threshold_count", threshold_charge(alpha, beta, cfg, ledger))
    ledger.touch(alpha * bits.reads_per_entry)
    low = bool(_verdicts(np.array([bits.total()]), beta, cfg, ledger.rng)[0])
    if cfg.failure_prob and ledger.rng.random() < cfg.failure_prob:
        low = not low
    return Verdict.LOW if low else Verdict.HIGH


def threshold_batch(totals: np.ndarray, alpha: int, beta: int, cfg: SimConfig,
                    ledger: QueryLedger, reads_per_entry: int = 1) -> tuple[np.ndarray, QueryLedger]:
    """LOW flags for many same-shaped threshold tests, plus one test's charge.

    Used to build Grover marks when every item's predicate is a threshold
    test over arrays of the same length. The returned child ledger holds the
    charge of a single evaluation.
    """
    _check_threshold_args(alpha, beta)
    cost = ledger.child()
    cost.charge("threshold_count", threshold_charge(alpha, beta, cfg, cost))
    ledger.touch(alpha * reads_per_entry * len(totals))
    low = _verdicts(totals, beta, cfg, ledger.rng)
    if cfg.failure_prob:
        flips = ledger.rng.random(low.shape) < cfg.failure_prob
        low = low ^ flips
    return low, cost


# --- search and listing ------------------------------------------------------

Predicate = Union[Callable[[int, QueryLedger], bool], np.ndarray]


def grover_charge(N: int, cfg: SimConfig, ledger: QueryLedger) -> int:
    return cfg.c_grover * _ceil_sqrt(N) * ledger.multiplier


def grover_find(N: int, predicate: Predicate, cfg: SimConfig, ledger: QueryLedger,
                *, cost: QueryLedger | None = None) -> int | None:
    """Find an index where the predicate holds.

    ``predicate`` is either a callable ``(i, ledger) -> bool`` that may charge
    nested primitives to the ledger it receives, or a precomputed boolean
    array of marks (a plain oracle, or one whose per-evaluation charge is
    given by ``cost``). Returns the smallest marked index unless the config
    asks for a uniform choice.
    """
    if N < 1:
        raise UsageError("grover_find needs N >= 1")
    worst = cost
    if callable(predicate):
        flags = np.zeros(N, dtype=bool)
        for i in range(N):
            sub = ledger.child()
            flags[i] = bool(predicate(i, sub))
            ledger.touch(sub.classical_symbol_accesses)
            if worst is None or sub.charged_quantum_queries > worst.charged_quantum_queries:
                worst = sub
    else:
        flags = np.asarray(predicate, dtype=bool)
        if flags.size != N:
            raise UsageError(f"marks length {flags.size} != N {N}")
        ledger.touch(N)
    G = grover_charge(N, cfg, ledger)
    ledger.charge("grover_find", G)
    if worst is not None:
        ledger.absorb(worst, G)
    if cfg.failure_prob and ledger.rng.random() < cfg.failure_prob:
        return None
    hits = np.flatnonzero(flags)
    if hits.size == 0:
        return None
    if cfg.random_choice:
        return int(hits[ledger.rng.integers(hits.size)])
    return int(hits[0])


def list_charge(N: int, cap: int, cfg: SimConfig, ledger: QueryLedger) -> int:
    return cfg.c_list * _ceil_sqrt(N * (cap + 1)) * ledger.multiplier


def list_marked(N: int, predicate: np.ndarray | Callable[[int], bool], cap: int,
                cfg: SimConfig, ledger: QueryLedger) -> list[int]:
    """First ``min(cap, #marked)`` marked indices, ascending."""
    if N < 1 or cap < 1:
        raise UsageError("list_marked needs N >= 1 and cap >= 1")
    if callable(predicate):
        flags = np.fromiter((bool(predicate(i)) for i in range(N)), dtype=bool, count=N)
    else:
        flags = np.asarray(predicate, dtype=bool)
        if flags.size != N:
            raise UsageError(f"marks length {flags.size} != N {N}")
    ledger.touch(N)
    ledger.charge("list_marked", list_charge(N, cap, cfg, ledger))
    return np.flatnonzero(flags)[:cap].tolist()


# --- approximate counting ----------------------------------------------------


def estimate_count_factor2(entries: Bits | np.ndarray, alpha: int, cfg: SimConfig,
                           ledger: QueryLedger) -> int:
    """Upper estimate k' of the number of ones.

    Thresholds run over descending powers of two; at the first HIGH verdict
    the estimate is the largest sum the previous LOW verdict allows. In ideal
    mode this gives ``s <= k' <= 2s``; with adversarial gap resolution
    ``s <= k' <= 4s``. A final search separates 0 from 1.
    """
    if alpha < 1:
        raise UsageError("alpha must be >= 1")
    bits = entries if isinstance(entries, Bits) else Bits(entries)
    bound = alpha
    beta = 1 << (alpha.bit_length() - 1)
    while beta >= 1:
        if threshold_count(bits, alpha, beta, cfg, ledger) is Verdict.HIGH:
            return bound
        bound = min(bound, low_certificate(beta, cfg))
        beta >>= 1
    # LOW at beta = 1 leaves a sum of 0 or 1
    marks = bits.values if bits._values is not None else np.arange(alpha) < bits.total()
    hit = grover_find(alpha, marks, cfg, ledger)
    return 0 if hit is None else 1
