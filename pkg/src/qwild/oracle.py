"""Classical ground truth: direct and convolution matchers, lemma verifiers.

Nothing here depends on the simulated quantum primitives; these functions
are the reference the algorithm is checked against.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .errors import OracleOverflow, PreconditionViolation, UsageError
from .wildstr import WILDCARD, PatternString, match_vector, shift_bits


def _check_lengths(A: PatternString, B: PatternString) -> None:
    if len(B) < 1 or len(B) > len(A):
        raise UsageError(f"need 1 <= m <= n, got m={len(B)}, n={len(A)}")


def mismatch_profile(A: PatternString, B: PatternString) -> np.ndarray:
    """Mismatch count of ``A[i, i+m-1]`` against B for every alignment i."""
    _check_lengths(A, B)
    a, b = A.symbols, B.symbols
    n, m = a.size, b.size
    L = n - m + 1
    if L <= m:
        return np.array(
            [np.count_nonzero(~match_vector(a[i : i + m], b)) for i in range(L)],
            dtype=np.int64,
        )
    out = np.zeros(L, dtype=np.int64)
    for j in range(m):
        out += ~match_vector(a[j : j + L], np.int64(b[j]))
    return out


def naive_match_positions(A: PatternString, B: PatternString) -> list[int]:
    return np.flatnonzero(mismatch_profile(A, B) == 0).tolist()


# --- exact convolution over three NTT-friendly primes -----------------------

_NTT_PRIMES = ((998244353, 3), (167772161, 3), (469762049, 3))
_PRIME_PRODUCT = 998244353 * 167772161 * 469762049


def _bit_reverse(n: int) -> np.ndarray:
    bits = n.bit_length() - 1
    idx = np.arange(n, dtype=np.int64)
    rev = np.zeros(n, dtype=np.int64)
    for b in range(bits):
        rev |= ((idx >> b) & 1) << (bits - 1 - b)
    return rev


def _powers(w: int, count: int, p: int) -> np.ndarray:
    out = np.ones(count, dtype=np.uint64)
    size = 1
    while size < count:
        step = min(size, count - size)
        out[size : size + step] = out[:step] * np.uint64(pow(w, size, p)) % np.uint64(p)
        size += step
    return out


def ntt(values: np.ndarray, p: int, g: int, invert: bool = False) -> np.ndarray:
    """Iterative radix-2 number-theoretic transform mod prime p along the last axis.

    The last axis length must be a power of two dividing ``p - 1``.
    """
    n = values.shape[-1]
    if n & (n - 1):
        raise UsageError("NTT length must be a power of two")
    if (p - 1) % n:
        raise OracleOverflow(f"transform length {n} unsupported by prime {p}")
    P = np.uint64(p)
    lead = values.shape[:-1]
    a = values.astype(np.uint64)[..., _bit_reverse(n)] % P
    length = 2
    while length <= n:
        w = pow(g, (p - 1) // length, p)
        if invert:
            w = pow(w, p - 2, p)
        half = length // 2
        tw = _powers(w, half, p)
        blocks = a.reshape(*lead, -1, length)
        u = blocks[..., :half]
        v = blocks[..., half:] * tw % P
        a = np.concatenate([(u + v) % P, (u + P - v) % P], axis=-1).reshape(*lead, n)
        length <<= 1
    if invert:
        a = a * np.uint64(pow(n, p - 2, p)) % P
    return a


def _encode(real: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Wildcards to 0, real symbols to their rank in ``real`` plus one."""
    return np.where(x == WILDCARD, 0, np.searchsorted(real, x) + 1).astype(np.uint64)


def _check_bound(m: int, sigma: int) -> None:
    bound = m * sigma**4
    if bound >= _PRIME_PRODUCT:
        raise OracleOverflow(
            f"m={m}, alphabet={sigma}: bound {bound} exceeds modulus {_PRIME_PRODUCT}"
        )


def _power_spectra(x: np.ndarray, size: int, p: int, g: int) -> tuple[np.ndarray, ...]:
    """Transforms of x, x^2, x^3 (mod p), each zero-padded to ``size`` along the last axis."""
    P = np.uint64(p)
    pad = np.zeros(x.shape[:-1] + (size,), dtype=np.uint64)
    pad[..., : x.shape[-1]] = x % P
    sq = pad * pad % P
    return ntt(pad, p, g), ntt(sq, p, g), ntt(sq * pad % P, p, g)


def _transform_size(n: int, m: int) -> int:
    size = 1
    while size < n + m - 1:
        size <<= 1
    return size


def fft_match_positions(A: PatternString, B: PatternString) -> list[int]:
    """Wildcard matching by exact convolution.

    Symbols are remapped to ``1..s`` and wildcards to 0; alignment i matches
    iff ``sum_j p_j t_{i+j} (p_j - t_{i+j})^2 == 0``. The three correlations
    are done modulo three primes whose product bounds the true value, so a
    zero residue everywhere means an exact zero.
    """
    _check_lengths(A, B)
    a, b = A.symbols, B.symbols
    n, m = a.size, b.size
    L = n - m + 1
    real = np.unique(np.concatenate([a[a != WILDCARD], b[b != WILDCARD]]))
    if real.size == 0:
        return list(range(L))
    _check_bound(m, real.size)
    t = _encode(real, a)
    q = _encode(real, b)[::-1]
    size = _transform_size(n, m)
    zero = np.ones(L, dtype=bool)
    for p, g in _NTT_PRIMES:
        P = np.uint64(p)
        T1, T2, T3 = _power_spectra(t, size, p, g)
        Q1, Q2, Q3 = _power_spectra(q, size, p, g)
        spec = (T1 * Q3 % P + T3 * Q1 % P + (P - np.uint64(2) * (T2 * Q2 % P) % P)) % P
        res = ntt(spec, p, g, invert=True)[m - 1 : m - 1 + L]
        zero &= res == 0
    return np.flatnonzero(zero).tolist()


def _modmatmul(x: np.ndarray, y: np.ndarray, p: int) -> np.ndarray:
    """``x @ y mod p`` for residues below 2^30 with inner size at most 64.

    x is split into 15-bit halves so every partial product sum stays below
    2^53 and the float64 matrix product is exact.
    """
    if x.shape[-1] > 64:
        raise OracleOverflow("inner dimension too large for exact float products")
    lo = (x & np.uint64(0x7FFF)).astype(np.float64)
    hi = (x >> np.uint64(15)).astype(np.float64)
    yf = y.astype(np.float64)
    r_lo = (lo @ yf).astype(np.int64) % p
    r_hi = (hi @ yf).astype(np.int64) % p
    return (r_hi * (1 << 15) + r_lo) % p


def fft_match_table(texts: np.ndarray, patterns: np.ndarray, chunk: int = 1024) -> np.ndarray:
    """Match table for every (text, pattern, alignment) of two batches of equal-length strings.

    Uses the same encoding and forward transforms as :func:`fft_match_positions`
    (one shared symbol ranking across the batch). The inverse transform is only
    needed at the valid alignments, so it is applied as an exact modular matrix
    product instead of a full inverse transform per pair.
    """
    texts = np.atleast_2d(texts)
    patterns = np.atleast_2d(patterns)
    n, m = texts.shape[1], patterns.shape[1]
    if not 1 <= m <= n:
        raise UsageError(f"need 1 <= m <= n, got m={m}, n={n}")
    L = n - m + 1
    allc = np.concatenate([texts.ravel(), patterns.ravel()])
    real = np.unique(allc[allc != WILDCARD])
    out = np.ones((texts.shape[0], patterns.shape[0], L), dtype=bool)
    if real.size == 0:
        return out
    _check_bound(m, real.size)
    t = _encode(real, texts)
    q = _encode(real, patterns)[:, ::-1]
    size = _transform_size(n, m)
    for p, g in _NTT_PRIMES:
        P = np.uint64(p)
        T1, T2, T3 = _power_spectra(t, size, p, g)
        Q1, Q2, Q3 = _power_spectra(q, size, p, g)
        # spectrum = T1*Q3 + T3*Q1 + (p-2)*T2*Q2, stacked along the inner axis
        X = np.concatenate([T1, T3, T2 * np.uint64(p - 2) % P], axis=1)
        Y = np.concatenate([Q3, Q1, Q2], axis=1).T
        w_inv = pow(pow(g, (p - 1) // size, p), p - 2, p)
        s_inv = pow(size, p - 2, p)
        for i in range(L):
            # row (m-1+i) of the inverse transform, scaled by 1/size
            row = _powers(pow(w_inv, m - 1 + i, p), size, p) * np.uint64(s_inv) % P
            Xi = X * np.tile(row, 3) % P
            for lo in range(0, Xi.shape[0], chunk):
                out[lo : lo + chunk, :, i] &= _modmatmul(Xi[lo : lo + chunk], Y, p) == 0
    return out


# --- lemma verifiers ---------------------------------------------------------


@dataclass
class CounterexampleReport:
    lemma: int
    text: str
    pattern: str
    witness: dict[str, Any]
    observed: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> str:
        return json.dumps(asdict(self), separators=(",", ":"), sort_keys=True)

    def replay(self) -> bool:
        """Recompute the violation from the stored strings; True if it reproduces."""
        A = PatternString.from_text(self.text)
        B = PatternString.from_text(self.pattern)
        w = self.witness
        prof = mismatch_profile(A, B)
        if self.lemma == 1:
            k = w["k"]
            return bool(2 * prof[w["alpha"]] < k and 2 * prof[w["beta"]] < k)
        if self.lemma == 2:
            i, d, m = w["i"], w["d"], len(B)
            window = int(shift_bits(A.symbols, d)[i : i + m - d].sum())
            return bool(prof[i] == 0 and window > 8 * w["k"])
        return not lemma3_check(A, B, w["d"], w["i"])


def wildcard_total(A: PatternString, B: PatternString) -> int:
    return A.wildcard_count + B.wildcard_count


def case1_premise(B: PatternString, k: int) -> bool:
    """Every shift ``1 <= d < k`` has shifted sum at least 3k.

    Shifts ``d >= m`` have an empty array (sum 0), so for k >= 2 the premise
    also requires ``k <= m``.
    """
    m = len(B)
    if k <= 1:
        return True
    if k > m:
        return False
    x = B.symbols
    for d in range(1, k):
        if np.count_nonzero(shift_bits(x, d)) < 3 * k:
            return False
    return True


def lemma1_check(A: PatternString, B: PatternString, k: int) -> CounterexampleReport | None:
    """Two alignments closer than k cannot both have fewer than k/2 mismatches."""
    _check_lengths(A, B)
    if wildcard_total(A, B) > k:
        raise PreconditionViolation(f"{wildcard_total(A, B)} wildcards exceed k={k}")
    if not case1_premise(B, k):
        raise PreconditionViolation("some shift below k has sum < 3k")
    prof = mismatch_profile(A, B)
    L = prof.size
    low = 2 * prof < k
    best = None
    for gap in range(1, min(k, L)):
        hits = np.flatnonzero(low[:-gap] & low[gap:])
        if hits.size:
            cand = (int(hits[0]), int(hits[0]) + gap)
            if best is None or cand < best:
                best = cand
    if best is None:
        return None
    alpha, beta = best
    return CounterexampleReport(
        1,
        str(A),
        str(B),
        {"alpha": alpha, "beta": beta, "k": k},
        {"mismatches_alpha": int(prof[alpha]), "mismatches_beta": int(prof[beta])},
    )


def lemma2_check(A: PatternString, B: PatternString, d: int, k: int) -> CounterexampleReport | None:
    """Every exact match sees at most 8k ones of the text's shift-d array."""
    _check_lengths(A, B)
    m = len(B)
    if not 1 <= d < m:
        raise UsageError(f"shift d={d} outside [1, {m})")
    if wildcard_total(A, B) > k:
        raise PreconditionViolation(f"{wildcard_total(A, B)} wildcards exceed k={k}")
    b_sum = int(np.count_nonzero(shift_bits(B.symbols, d)))
    if b_sum > 6 * k:
        raise PreconditionViolation(f"pattern shift sum {b_sum} exceeds 6k={6 * k}")
    prof = mismatch_profile(A, B)
    sa = shift_bits(A.symbols, d).astype(np.int64)
    prefix = np.concatenate([[0], np.cumsum(sa)])
    for i in np.flatnonzero(prof == 0).tolist():
        window = int(prefix[i + m - d] - prefix[i])
        if window > 8 * k:
            return CounterexampleReport(
                2, str(A), str(B), {"i": i, "d": d, "k": k},
                {"window_sum": window, "pattern_sum": b_sum},
            )
    return None


def lemma3_conditions(A: PatternString, B: PatternString, d: int, i: int) -> bool:
    """Conjunction of the three local conditions for alignment i and shift d."""
    a, b = A.symbols, B.symbols
    m = b.size
    for j in range(d):
        if not _match(a[i + j], b[j]):
            return False
    sa = shift_bits(a, d)
    sb = shift_bits(b, d)
    for j in range(m - d):
        if sa[i + j] or sb[j]:
            if not (_match(a[i + j], b[j]) and _match(a[i + j + d], b[j + d])):
                return False
    return True


def _match(x, y) -> bool:
    return x == y or x == WILDCARD or y == WILDCARD


def lemma3_check(A: PatternString, B: PatternString, d: int, i: int) -> bool:
    """True iff the local conditions agree with the direct match predicate."""
    _check_lengths(A, B)
    n, m = len(A), len(B)
    if not 0 <= i <= n - m:
        raise UsageError(f"alignment i={i} outside [0, {n - m}]")
    if not 1 <= d < m:
        raise UsageError(f"shift d={d} outside [1, {m})")
    direct = not np.any(~match_vector(A.symbols[i : i + m], B.symbols))
    return lemma3_conditions(A, B, d, i) == direct


def lemma3_sweep(A: PatternString, B: PatternString) -> tuple[int, int] | None:
    """Vectorized lemma-3 check over every (d, i); returns the first failing pair."""
    _check_lengths(A, B)
    a, b = A.symbols, B.symbols
    n, m = a.size, b.size
    L = n - m + 1
    idx = np.arange(L)[:, None] + np.arange(m)[None, :]
    M = match_vector(a[idx], b[None, :])
    direct = M.all(axis=1)
    for d in range(1, m):
        both = M[:, : m - d] & M[:, d:]
        sa = shift_bits(a, d).astype(bool)
        sb = shift_bits(b, d).astype(bool)
        sa_win = sa[np.arange(L)[:, None] + np.arange(m - d)[None, :]]
        cond = M[:, :d].all(axis=1)
        cond &= (~sa_win | both).all(axis=1)
        cond &= (~sb[None, :] | both).all(axis=1)
        bad = np.flatnonzero(cond != direct)
        if bad.size:
            return d, int(bad[0])
    return None
