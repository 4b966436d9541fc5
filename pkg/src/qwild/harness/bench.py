"""Benchmark runner: one CSV row per (instance, config) run plus scaling fits."""

from __future__ import annotations

import csv
import io
import json
from collections import defaultdict
from dataclasses import astuple, dataclass, fields
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from ..algo import ceil_sqrt, match_full
from ..errors import UsageError
from ..oracle import fft_match_positions, naive_match_positions
from ..qsim import SimConfig
from .gen import GenSpec, gen_instance

ORACLE_LIMIT = 1 << 16


@dataclass(frozen=True)
class BenchRow:
    n: int
    m: int
    k_true: int
    k_prime: int
    k_eff: int
    case: str
    d: int | None
    charged_queries: int
    classical_accesses: int
    matched: bool
    witness: int | None
    seed: int
    mode: str


HEADER = [f.name for f in fields(BenchRow)]


def parse_grid_line(line: str) -> tuple[GenSpec, SimConfig]:
    """One JSON object: GenSpec fields plus optional ``mode``, ``whp`` and cost constants."""
    obj = json.loads(line)
    mode = obj.pop("mode", "ideal")
    kw = {}
    for key in ("c_grover", "c_list", "c_count"):
        if key in obj:
            kw[key] = obj.pop(key)
    if "whp" in obj:
        kw["whp_multiplier"] = bool(obj.pop("whp"))
    if "plant" in obj:
        obj["plant_at"] = obj.pop("plant")
    spec = GenSpec(**obj)
    return spec, SimConfig.named(mode, seed=spec.seed, **kw)


def load_grid(path: str | Path) -> list[tuple[GenSpec, SimConfig]]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise OSError(f"cannot read grid {path}: {exc.strerror}") from exc
    grid = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            grid.append(parse_grid_line(line))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"{path}:{lineno}: {exc}") from None
    return grid


def oracle_has_match(A, B) -> bool:
    if len(A) * len(B) <= 1 << 22:
        return bool(naive_match_positions(A, B))
    return bool(fft_match_positions(A, B))


def run_one(spec: GenSpec, cfg: SimConfig, oracle_check: bool = True) -> tuple[BenchRow, bool | None]:
    A, B = gen_instance(spec)
    out = match_full(A, B, cfg)
    row = BenchRow(
        n=spec.n,
        m=spec.m,
        k_true=A.wildcard_count + B.wildcard_count,
        k_prime=out.budget.k_prime,
        k_eff=out.budget.k_eff,
        case=str(out.decision.case),
        d=out.decision.d,
        charged_queries=out.ledger["charged_quantum_queries"],
        classical_accesses=out.ledger["classical_symbol_accesses"],
        matched=out.witness is not None,
        witness=out.witness,
        seed=spec.seed,
        mode=cfg.name,
    )
    truth = None
    if oracle_check and spec.n <= ORACLE_LIMIT:
        truth = oracle_has_match(A, B)
    return row, truth


def fit_slope(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Least-squares slope of log2(y) against log2(x)."""
    lx = np.log2(np.asarray(xs, dtype=float))
    ly = np.log2(np.asarray(ys, dtype=float))
    return float(np.polyfit(lx, ly, 1)[0])


def _median_by(rows: Iterable[BenchRow], key) -> dict:
    groups = defaultdict(list)
    for r in rows:
        groups[key(r)].append(r.charged_queries)
    return {k: float(np.median(v)) for k, v in sorted(groups.items())}


def summarize(rows: Sequence[BenchRow]) -> dict:
    summary: dict = {"rows": len(rows)}
    at_sqrt = [r for r in rows if r.k_true == ceil_sqrt(r.n)]
    by_n = _median_by(at_sqrt, lambda r: r.n)
    if len(by_n) >= 2:
        summary["slope_vs_n"] = fit_slope(list(by_n), list(by_n.values()))
        summary["median_vs_n"] = by_n
    per_n = defaultdict(set)
    for r in rows:
        per_n[r.n].add(r.k_true)
    if per_n:
        n_fixed = max(per_n, key=lambda n: (len(per_n[n]), n))
        if len(per_n[n_fixed]) >= 3:
            by_k = _median_by([r for r in rows if r.n == n_fixed], lambda r: r.k_true)
            summary["slope_vs_k"] = fit_slope(list(by_k), list(by_k.values()))
            summary["slope_vs_k_n"] = n_fixed
            summary["median_vs_k"] = by_k
    return summary


def rows_to_csv(rows: Sequence[BenchRow]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for r in rows:
        w.writerow(["" if v is None else (int(v) if isinstance(v, bool) else v) for v in astuple(r)])
    return buf.getvalue()


def run_bench(grid: Sequence[tuple[GenSpec, SimConfig]], csv_path: str | Path | None = None,
              *, oracle_check: bool = True) -> tuple[list[BenchRow], dict]:
    """Run every grid point in order, write the CSV, return rows and a summary.

    ``summary["oracle_mismatches"]`` lists grid indices whose match answer
    disagreed with the classical oracle.
    """
    rows: list[BenchRow] = []
    mismatches = []
    for idx, (spec, cfg) in enumerate(grid):
        row, truth = run_one(spec, cfg, oracle_check)
        if truth is not None and truth != row.matched:
            mismatches.append(idx)
        rows.append(row)
    if csv_path is not None:
        try:
            Path(csv_path).write_text(rows_to_csv(rows))
        except OSError as exc:
            raise OSError(f"cannot write CSV {csv_path}: {exc.strerror}") from exc
    summary = summarize(rows)
    summary["oracle_mismatches"] = mismatches
    return rows, summary


def scaling_grid(axis: str, seeds: int = 10, case: str = "2") -> list[tuple[GenSpec, SimConfig]]:
    """Default desk-scale grids: ``axis="n"`` sweeps n at k = ceil(sqrt(n)), ``"k"`` sweeps k at n = 2^16."""
    grid = []
    if axis == "n":
        points = [(1 << e, ceil_sqrt(1 << e)) for e in range(12, 19)]
    elif axis == "k":
        points = [(1 << 16, 1 << e) for e in range(6, 12)]
    else:
        raise UsageError(f"unknown axis {axis!r}")
    for n, k in points:
        m = n // 2 + 1
        alphabet = 8 if case == "2" else min(4 * k, 60000)
        for s in range(seeds):
            spec = GenSpec(n, m, k, alphabet=alphabet, plant_at=(n - m) // 3, case=case, seed=s)
            grid.append((spec, SimConfig.named("ideal", seed=s)))
    return grid


def grid_to_jsonl(grid: Sequence[tuple[GenSpec, SimConfig]]) -> str:
    lines = []
    for spec, cfg in grid:
        obj = spec.to_dict()
        obj["mode"] = cfg.name
        lines.append(json.dumps(obj, sort_keys=True))
    return "\n".join(lines) + ("\n" if lines else "")
