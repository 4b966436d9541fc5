"""Strings over an integer alphabet with a wildcard symbol.

Symbols are plain ints. User codes live in ``[0, ALPHABET_LIMIT)``; the
wildcard and the padding sentinel are reserved codes just above that range.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import UsageError

ALPHABET_LIMIT = 1 << 16
WILDCARD = ALPHABET_LIMIT
SENTINEL = ALPHABET_LIMIT + 1

_WILD_BYTE = ord("?")
_SENTINEL_BYTE = ord("$")


class Role(Enum):
    TEXT = "text"
    PATTERN = "pattern"


def is_wildcard(x: int) -> bool:
    return x == WILDCARD


@dataclass(frozen=True, eq=False)
class PatternString:
    """Immutable symbol sequence; ``symbols`` is a read-only int64 array."""

    symbols: np.ndarray
    role: Role = Role.TEXT

    def __post_init__(self) -> None:
        arr = np.array(self.symbols, dtype=np.int64, copy=True).reshape(-1)
        if arr.size and (arr.min() < 0 or arr.max() > SENTINEL):
            raise UsageError("symbol codes must lie in [0, 2^16) or be reserved")
        arr.flags.writeable = False
        object.__setattr__(self, "symbols", arr)

    @classmethod
    def from_text(cls, text: str | bytes, role: Role = Role.TEXT) -> PatternString:
        """Parse a human-writable string: ``?`` is the wildcard, ``$`` is rejected."""
        if isinstance(text, bytes):
            codes = np.frombuffer(text, dtype=np.uint8).astype(np.int64)
        else:
            codes = np.fromiter((ord(c) for c in text), dtype=np.int64, count=len(text))
        if np.any(codes == _SENTINEL_BYTE):
            raise UsageError("'$' is reserved for the padding transform")
        if codes.size and codes.max() >= ALPHABET_LIMIT:
            raise UsageError("character outside the 16-bit alphabet")
        codes = np.where(codes == _WILD_BYTE, WILDCARD, codes)
        return cls(codes, role)

    @classmethod
    def from_codes(cls, codes: Iterable[int], role: Role = Role.TEXT) -> PatternString:
        return cls(np.fromiter(codes, dtype=np.int64), role)

    def __len__(self) -> int:
        return int(self.symbols.size)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return PatternString(self.symbols[key], self.role)
        return int(self.symbols[key])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PatternString):
            return NotImplemented
        return np.array_equal(self.symbols, other.symbols)

    def __hash__(self) -> int:
        return hash(self.symbols.tobytes())

    def __repr__(self) -> str:
        return f"PatternString({str(self)!r}, role={self.role.value})"

    def __str__(self) -> str:
        out = []
        for x in self.symbols.tolist():
            if x == WILDCARD:
                out.append("?")
            elif x == SENTINEL:
                out.append("$")
            else:
                out.append(chr(x))
        return "".join(out)

    def substring(self, start: int, end: int) -> PatternString:
        """Inclusive slice ``X[start, end]``."""
        return PatternString(self.symbols[start : end + 1], self.role)

    @property
    def wildcard_mask(self) -> np.ndarray:
        return self.symbols == WILDCARD

    @property
    def wildcard_count(self) -> int:
        return int(np.count_nonzero(self.symbols == WILDCARD))

    def to_bytes(self) -> bytes:
        s = self.symbols
        if np.any((s >= 256) & (s != WILDCARD)) or np.any(s == SENTINEL):
            raise UsageError("string has symbols that have no byte encoding")
        return np.where(s == WILDCARD, _WILD_BYTE, s).astype(np.uint8).tobytes()


def as_pattern(x: PatternString | str | bytes | Sequence[int], role: Role = Role.TEXT) -> PatternString:
    if isinstance(x, PatternString):
        return x
    if isinstance(x, (str, bytes)):
        return PatternString.from_text(x, role)
    return PatternString.from_codes(x, role)


def read_string_file(path: str | Path, role: Role = Role.TEXT) -> PatternString:
    data = Path(path).read_bytes()
    if data.endswith(b"\n"):
        data = data[:-1]
        if data.endswith(b"\r"):
            data = data[:-1]
    if b"\n" in data:
        raise UsageError(f"{path}: expected a single line")
    try:
        return PatternString.from_text(data, role)
    except UsageError as exc:
        raise UsageError(f"{path}: {exc}") from None


def write_string_file(path: str | Path, s: PatternString) -> None:
    Path(path).write_bytes(s.to_bytes() + b"\n")


def chars_match(a: int, b: int) -> bool:
    return a == b or a == WILDCARD or b == WILDCARD


def match_vector(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Elementwise character match for two equal-length code arrays."""
    return (x == y) | (x == WILDCARD) | (y == WILDCARD)


def mismatch_count(X: PatternString, Y: PatternString) -> int:
    if len(X) != len(Y):
        raise UsageError(f"length mismatch: {len(X)} vs {len(Y)}")
    return int(np.count_nonzero(~match_vector(X.symbols, Y.symbols)))


@dataclass(frozen=True)
class ShiftArray:
    shift: int
    bits: np.ndarray
    sum: int = field(init=False)

    def __post_init__(self) -> None:
        self.bits.flags.writeable = False
        object.__setattr__(self, "sum", int(np.count_nonzero(self.bits)))

    def __len__(self) -> int:
        return int(self.bits.size)

    def __getitem__(self, i: int) -> int:
        return int(self.bits[i])

    def tolist(self) -> list[int]:
        return self.bits.tolist()


def _check_shift(X: PatternString, d: int) -> None:
    if not 1 <= d < len(X):
        raise UsageError(f"shift d={d} outside [1, {len(X)})")


def shift_bits(x: np.ndarray, d: int) -> np.ndarray:
    """Raw 0/1 shifted matching array for a code array (no range check)."""
    lo, hi = x[:-d], x[d:]
    return ((lo != hi) | (lo == WILDCARD) | (hi == WILDCARD)).astype(np.uint8)


def shifted_matching_array(X: PatternString, d: int) -> ShiftArray:
    _check_shift(X, d)
    return ShiftArray(d, shift_bits(X.symbols, d))


def shifted_matching_sum(X: PatternString, d: int) -> int:
    _check_shift(X, d)
    return int(np.count_nonzero(shift_bits(X.symbols, d)))


def shifted_sums(X: PatternString, limit: int) -> np.ndarray:
    """Sums for every shift ``1 <= d < limit``; entry ``d - 1`` holds shift d."""
    limit = min(limit, len(X))
    x = X.symbols
    wild = x == WILDCARD
    out = np.empty(max(limit - 1, 0), dtype=np.int64)
    for d in range(1, limit):
        same = (x[:-d] == x[d:]) & ~wild[:-d]
        out[d - 1] = (len(x) - d) - int(np.count_nonzero(same))
    return out


def pad_transform(A: PatternString, B: PatternString, t: int) -> tuple[PatternString, PatternString]:
    """Interleave a sentinel before every symbol, then wildcard the first t pattern sentinels.

    Raising the wildcard count this way leaves match existence unchanged: a
    match at i in (A, B) becomes a match at 2i in the padded pair.
    """
    if np.any(A.symbols == SENTINEL) or np.any(B.symbols == SENTINEL):
        raise UsageError("sentinel already present in input")
    if not 0 <= t < len(B):
        raise UsageError(f"t={t} must satisfy 0 <= t < |B| = {len(B)}")

    def interleave(s: np.ndarray) -> np.ndarray:
        out = np.empty(2 * s.size, dtype=np.int64)
        out[0::2] = SENTINEL
        out[1::2] = s
        return out

    b2 = interleave(B.symbols)
    b2[0 : 2 * t : 2] = WILDCARD
    return PatternString(interleave(A.symbols), A.role), PatternString(b2, B.role)


def _correlate01(x: np.ndarray, y: np.ndarray, count: int) -> np.ndarray:
    """``out[i] = sum_j x[i+j] * y[j]`` for ``i < count`` with 0/1 inputs, exact."""
    size = 1
    while size < x.size + y.size:
        size <<= 1
    fx = np.fft.rfft(x.astype(np.float64), size)
    fy = np.fft.rfft(y[::-1].astype(np.float64), size)
    raw = np.fft.irfft(fx * fy, size)[y.size - 1 : y.size - 1 + count]
    out = np.rint(raw)
    err = np.abs(raw - out).max(initial=0.0)
    if err >= 0.25:
        raise ArithmeticError(f"FFT rounding error {err} too large")
    return out.astype(np.int64)


def mismatch_counts(A: PatternString, B: PatternString, *, pair_budget: int | None = None) -> np.ndarray:
    """Exact mismatch count of every alignment of B against A.

    Counts are ``|both non-wild| - |equal non-wild|``. Equal pairs are counted
    per symbol: frequent symbols through an FFT correlation of indicator
    vectors, rare ones by enumerating occurrence pairs directly.
    """
    a, b = A.symbols, B.symbols
    n, m = a.size, b.size
    if m > n:
        raise UsageError("pattern longer than text")
    L = n - m + 1
    a_real = a != WILDCARD
    b_real = b != WILDCARD
    if m * L <= 1 << 16:
        # small instances: direct sliding comparison is cheaper than transforms
        out = np.zeros(L, dtype=np.int64)
        for j in range(m):
            if b_real[j]:
                seg = a[j : j + L]
                out += (seg != b[j]) & (seg != WILDCARD)
        return out

    both = _correlate01(a_real, b_real, L)
    eq = np.zeros(L, dtype=np.int64)

    a_pos = np.flatnonzero(a_real)
    b_pos = np.flatnonzero(b_real)
    order = np.argsort(a[a_pos], kind="stable")
    a_sorted_pos = a_pos[order]
    a_sorted_sym = a[a_sorted_pos]
    b_sym = b[b_pos]
    lo = np.searchsorted(a_sorted_sym, b_sym, "left")
    cnt = np.searchsorted(a_sorted_sym, b_sym, "right") - lo

    syms, inv = np.unique(b_sym, return_inverse=True)
    pairs_per_sym = np.bincount(inv, weights=cnt).astype(np.int64)
    if pair_budget is None:
        pair_budget = 16 * n
    heavy = pairs_per_sym > pair_budget
    for c in syms[heavy]:
        eq += _correlate01(a == c, b == c, L)

    light = ~heavy[inv]
    jpos, lo, cnt = b_pos[light], lo[light], cnt[light]
    # enumerate (text occurrence, pattern occurrence) pairs in bounded chunks
    chunk_start = 0
    csum = np.cumsum(cnt)
    limit = 1 << 22
    while chunk_start < cnt.size:
        base = csum[chunk_start - 1] if chunk_start else 0
        chunk_end = int(np.searchsorted(csum, base + limit, "right"))
        chunk_end = max(chunk_end, chunk_start + 1)
        c = cnt[chunk_start:chunk_end]
        total = int(c.sum())
        if total:
            starts = np.repeat(lo[chunk_start:chunk_end], c)
            offs = np.arange(total) - np.repeat(np.cumsum(c) - c, c)
            tpos = a_sorted_pos[starts + offs]
            diff = tpos - np.repeat(jpos[chunk_start:chunk_end], c)
            diff = diff[(diff >= 0) & (diff < L)]
            eq += np.bincount(diff, minlength=L)
        chunk_start = chunk_end
    return both - eq
