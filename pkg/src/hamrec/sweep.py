"""Seeded trial sweeps over chain length and the Table-1 style rank census."""
from __future__ import annotations

import logging
import os
from collections import Counter
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields

import numpy as np

from .hoe import hoe_gram, hoe_rank
from .models import ModelKind, term_count
from .ose import predicted_lie_count, resolve_profile
from .pipeline import RHO_ME, prepare, recover, spec_from_profile

log = logging.getLogger(__name__)

MAX_LENGTH = 12


@dataclass(frozen=True)
class SweepConfig:
    kind: ModelKind
    profile: tuple[int, ...]
    lmin: int
    lmax: int
    trials: int = 200
    base_seed: int = 0
    threshold: float = 1e-8
    workers: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "kind", ModelKind.parse(self.kind))
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.lmin < self.kind.min_length or self.lmax > MAX_LENGTH or self.lmin > self.lmax:
            raise ValueError(
                f"length range {self.lmin}..{self.lmax} outside {self.kind.min_length}..{MAX_LENGTH}"
            )


@dataclass(frozen=True)
class SweepRow:
    L: int
    trials: int
    median_delta: float
    p10_delta: float
    p90_delta: float
    success_fraction: float
    S: int
    N: int
    predicted_recoverable: bool
    failures: int = 0


SWEEP_COLUMNS = [f.name for f in fields(SweepRow)]


def _trial(args) -> tuple[float, bool, str | None]:
    kind, L, q, seed = args
    try:
        report = recover(kind, L, spec_from_profile(q), seed).report
    except np.linalg.LinAlgError as exc:
        return float("nan"), False, f"{type(exc).__name__}: {exc}"
    return report.delta, report.success, None


def _map(fn, jobs, workers: int | None):
    workers = workers or os.cpu_count() or 1
    if workers == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs, chunksize=max(1, len(jobs) // (4 * workers))))


def run_sweep(config: SweepConfig) -> list[SweepRow]:
    """Aggregate ``config.trials`` recoveries per length; seed of trial i is base + i."""
    rows = []
    for L in range(config.lmin, config.lmax + 1):
        profile = resolve_profile(config.profile, L)
        S, N = predicted_lie_count(profile), term_count(config.kind, L)
        jobs = [(config.kind, L, profile.q, config.base_seed + i) for i in range(config.trials)]
        results = _map(_trial, jobs, config.workers)
        deltas = np.array([d for d, _, err in results if err is None])
        errors = [err for _, _, err in results if err is not None]
        for err in errors:
            log.warning("L=%d trial failed: %s", L, err)
        ok = sum(1 for d, s, err in results if err is None and s and d < config.threshold)
        if deltas.size:
            p10, med, p90 = np.percentile(deltas, [10, 50, 90])
        else:
            p10 = med = p90 = float("nan")
        rows.append(
            SweepRow(L, config.trials, float(med), float(p10), float(p90),
                     ok / config.trials, S, N, S >= N - 1, len(errors))
        )
        log.info("L=%d median delta %.3e success %.3f", L, med, ok / config.trials)
    return rows


TABLE1_COLUMNS = ["L", "S", "N(H2)", "r(H2)", "N(H3)", "r(H3)"]


def _majority(values: list[int]) -> int:
    return Counter(values).most_common(1)[0][0]


def hoe_ranks(kind, L: int, q, seeds) -> list[int]:
    spec = spec_from_profile(q)
    out = []
    for seed in seeds:
        basis, _, _, blocks = prepare(kind, L, spec, seed)
        out.append(hoe_rank(hoe_gram(basis, blocks)))
    return out


def table1(lmax: int = 10, seeds: int = 5, base_seed: int = 0, lmin: int = 2, q=RHO_ME) -> list[dict]:
    """Rows of ``S``, ``N`` and the HOE rank ``r`` (majority over seeds) per length."""
    seed_list = [base_seed + i for i in range(seeds)]
    rows = []
    for L in range(lmin, lmax + 1):
        row = {"L": L, "S": predicted_lie_count(resolve_profile(q, L))}
        for kind in ModelKind:
            tag = kind.name
            if L < kind.min_length:
                row[f"N({tag})"] = row[f"r({tag})"] = row[f"seed_ranks({tag})"] = None
                continue
            ranks = hoe_ranks(kind, L, q, seed_list)
            if len(set(ranks)) > 1:
                log.warning("%s L=%d: ranks disagree across seeds: %s", tag, L, ranks)
            row[f"N({tag})"] = term_count(kind, L)
            row[f"r({tag})"] = _majority(ranks)
            row[f"seed_ranks({tag})"] = ranks
        rows.append(row)
    return rows
