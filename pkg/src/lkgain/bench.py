"""Experiment harness: runs, trials, restart tours, metrics, CSV output.

A run is an independent restart of the heuristic from a fresh random tour;
it executes a number of trials (default: one per vertex), each starting
from a greedy restart tour biased towards the edges of the run's best tour
so far. Wall time per run includes everything after candidate-set
preprocessing, which is timed separately. Metrics follow the usual
CostMin/CostAvg/GapMin/GapAvg/TimeAvg scheme with the time ratio taken
against the strict-policy baseline.
"""

from __future__ import annotations

import csv
import time
from dataclasses import dataclass
from pathlib import Path
from random import Random
from typing import Iterable

import numpy as np

from .candidates import CandidateKind, CandidateSets, build_candidate_sets
from .engine import Improvement, SearchConfig, run_trial
from .errors import NoRunCompleted
from .gains import GainCursor, GainKind, GainPolicy
from .tour import Tour
from .tsplib import Instance, cost_row


@dataclass
class ExperimentConfig:
    runs: int = 10
    max_candidates: int = 5
    candidate_kind: CandidateKind = CandidateKind.ALPHA
    gain_policy: GainKind = GainKind.STRICT
    seed: int = 1
    time_limit: float | None = None
    stop_at_optimum: bool = False
    trials_per_run: int | None = None  # None: one trial per vertex
    max_depth: int = 5
    feasibility_period: int = 5
    ascent_iterations: int = 100
    validate: bool = False

    def __post_init__(self) -> None:
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.trials_per_run is not None and self.trials_per_run < 1:
            raise ValueError("trials_per_run must be >= 1")
        if self.seed < 0:
            raise ValueError("seed must be >= 0")
        if self.time_limit is not None and self.time_limit <= 0:
            raise ValueError("time_limit must be positive")


@dataclass
class RunReport:
    """Per-run best costs and wall times plus the derived aggregates."""

    costs: list[int]
    times: list[float]
    optimum: int | None = None
    preprocessing_seconds: float = 0.0

    @property
    def cost_min(self) -> int:
        return min(self.costs)

    @property
    def cost_avg(self) -> float:
        return sum(self.costs) / len(self.costs)

    @property
    def time_avg(self) -> float:
        return sum(self.times) / len(self.times)

    def _gap(self, cost: float) -> float:
        return 100.0 * (cost - self.optimum) / self.optimum

    @property
    def gap_min(self) -> float | None:
        return None if self.optimum is None else self._gap(self.cost_min)

    @property
    def gap_avg(self) -> float | None:
        return None if self.optimum is None else self._gap(self.cost_avg)


@dataclass
class ExperimentResult:
    """One CSV row: an instance solved under one policy/candidate setting."""

    problem: str
    policy: str
    candidates: str
    report: RunReport


def _run_rng(seed: int, run_index: int) -> Random:
    """Independent, reproducible generator for one run (splittable seeding)."""
    words = np.random.SeedSequence([seed, run_index]).generate_state(2)
    return Random(int(words[0]) << 32 | int(words[1]))


def restart_tour(best: Tour, inst: Instance, cands: CandidateSets, rng: Random) -> Tour:
    """Greedy tour construction biased towards the edges of `best`.

    From a random start, prefer an unvisited candidate neighbour that is an
    edge of `best`, then a random unvisited candidate neighbour, then the
    nearest unvisited vertex.
    """
    n = inst.dimension
    visited = bytearray(n + 1)
    start = rng.randrange(1, n + 1)
    visited[start] = 1
    order = [start]
    current = start
    for _ in range(n - 1):
        nxt = 0
        for nbr, _, _ in cands.entries[current]:
            if not visited[nbr] and best.has_edge(current, nbr):
                nxt = nbr
                break
        if not nxt:
            pool = [nbr for nbr, _, _ in cands.entries[current] if not visited[nbr]]
            if pool:
                nxt = rng.choice(pool)
        if not nxt:
            row = cost_row(inst, current)
            mask = np.frombuffer(visited, dtype=np.uint8)[1:] == 1
            row[mask] = np.iinfo(np.int64).max
            nxt = int(np.argmin(row)) + 1
        visited[nxt] = 1
        order.append(nxt)
        current = nxt
    return Tour(inst, order)


def run_experiment(
    inst: Instance,
    cfg: ExperimentConfig,
    cands: CandidateSets | None = None,
    history: list[Improvement] | None = None,
) -> RunReport:
    """Execute all runs of one experiment and aggregate the metrics.

    The time limit, when set, applies per run and is checked between trials
    and between starting-vertex sweeps; a run only counts towards the
    aggregates once it has completed at least one trial. With
    stop_at_optimum the run ends as soon as the known optimum is reached,
    otherwise the search keeps going (checkout time is included).
    """
    prep_start = time.perf_counter()
    if cands is None:
        cands = build_candidate_sets(
            inst, cfg.candidate_kind, cfg.max_candidates, cfg.ascent_iterations
        )
    preprocessing = time.perf_counter() - prep_start

    policy = GainPolicy(cfg.gain_policy, k_period=cfg.max_depth)
    search_cfg = SearchConfig(cfg.max_depth, cfg.feasibility_period, policy, cfg.validate)
    optimum = inst.known_optimum
    trials = cfg.trials_per_run if cfg.trials_per_run is not None else inst.dimension

    costs: list[int] = []
    times: list[float] = []
    for run_index in range(cfg.runs):
        rng = _run_rng(cfg.seed, run_index)
        cursor = GainCursor(policy)
        order = list(range(1, inst.dimension + 1))
        rng.shuffle(order)
        current = Tour(inst, order)
        best = current
        start = time.perf_counter()
        deadline = start + cfg.time_limit if cfg.time_limit is not None else None
        completed = 0
        for trial_index in range(trials):
            if deadline is not None and time.perf_counter() >= deadline:
                break
            if trial_index > 0:
                current = restart_tour(best, inst, cands, rng)
            current = run_trial(current, search_cfg, cands, cursor, rng, deadline, history)
            if current.cost < best.cost:
                best = current
            if deadline is not None and time.perf_counter() >= deadline:
                break  # trial was cut short; best is kept but the trial does not count
            completed += 1
            if cfg.stop_at_optimum and optimum is not None and best.cost <= optimum:
                break
        elapsed = time.perf_counter() - start
        if completed > 0:
            costs.append(best.cost)
            times.append(elapsed)
    if not costs:
        raise NoRunCompleted("time limit expired before any run finished a trial")
    return RunReport(costs, times, optimum, preprocessing)


CSV_COLUMNS = [
    "Problem",
    "Policy",
    "Candidates",
    "CostMin",
    "CostAvg",
    "GapMin",
    "GapAvg",
    "TimeAvg",
    "TimeAvgRatio",
]


def write_report(results: Iterable[ExperimentResult], path: str | Path) -> None:
    """Write the semicolon-separated metric table.

    The TimeAvgRatio column compares each row's TimeAvg against the strict
    policy on the same problem and candidate kind (negative means faster);
    rows without a strict baseline leave the cell empty.
    """
    rows = list(results)
    baseline: dict[tuple[str, str], float] = {}
    for res in rows:
        if res.policy == GainKind.STRICT.value:
            baseline[(res.problem, res.candidates)] = res.report.time_avg
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle, delimiter=";")
        writer.writerow(CSV_COLUMNS)
        for res in rows:
            rep = res.report
            base = baseline.get((res.problem, res.candidates))
            if base is None:
                ratio = ""
            elif base == 0.0:
                ratio = "0.0" if rep.time_avg == 0.0 else ""
            else:
                ratio = f"{100.0 * (rep.time_avg - base) / base:.1f}"
            writer.writerow(
                [
                    res.problem,
                    res.policy,
                    res.candidates,
                    rep.cost_min,
                    f"{rep.cost_avg:.3f}",
                    "" if rep.gap_min is None else f"{rep.gap_min:.3f}",
                    "" if rep.gap_avg is None else f"{rep.gap_avg:.3f}",
                    f"{rep.time_avg:.3f}",
                    ratio,
                ]
            )
