"""Monte-Carlo trial runner, summary statistics, sweeps over m, and strategy comparison.

Reproducibility contract: results are bit-identical for identical plans at any worker
count.  Trials are processed in fixed-size chunks; chunk k of a plan draws from
default_rng(SeedSequence(entropy=base_seed, spawn_key=(stream, k))), and partial sums
are folded in chunk order with compensated summation.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .allocation import semi_equal_starts
from .model import RegionSpec, SpeedDistribution
from .simulation import (
    StrategySpec,
    grouped_times,
    one_directional_times,
    proportional_times,
    two_directional_times,
)

__all__ = [
    "CHUNK_TRIALS",
    "ALLOCATION_METHODS",
    "TrialPlan",
    "SummaryStats",
    "SweepResult",
    "CompareRow",
    "resolve_method",
    "run_trials",
    "sweep_m",
    "compare_strategies",
]

# fixed chunk size is part of the determinism contract: changing it changes streams
CHUNK_TRIALS = 32768

ALLOCATION_METHODS = ("equal", "semi-equal", "random", "proportional")

# strategy kind -> allocations it can run on
_SUPPORTED = {
    "one-directional": ("equal", "semi-equal", "random"),
    "two-directional": ("equal", "semi-equal", "random"),
    "grouped": ("equal", "semi-equal", "random"),
    "proportional": ("proportional",),
}


@dataclass(frozen=True)
class TrialPlan:
    """Everything needed to reproduce one Monte-Carlo estimate.

    `speeds` is either a SpeedDistribution (redrawn i.i.d. per trial) or a fixed
    tuple of speeds (length m, or length 1 to share one speed).  `seed_stream`
    separates substreams of the same base seed; it defaults to m so sweep points
    stay decoupled no matter which subsets are run.
    """

    region: RegionSpec
    num_agents: int
    strategy: StrategySpec
    allocation: str
    speeds: SpeedDistribution | tuple[float, ...]
    trials: int
    base_seed: int = 0
    seed_stream: int | None = None

    def __post_init__(self) -> None:
        if not (isinstance(self.num_agents, (int, np.integer)) and self.num_agents >= 1):
            raise ValueError(f"num_agents must be a positive integer, got {self.num_agents!r}")
        if self.allocation not in ALLOCATION_METHODS:
            raise ValueError(
                f"unknown allocation {self.allocation!r}, expected one of {ALLOCATION_METHODS}"
            )
        if self.allocation not in _SUPPORTED[self.strategy.kind]:
            raise ValueError(
                f"strategy {self.strategy} does not run on {self.allocation!r} allocation "
                f"(supported: {_SUPPORTED[self.strategy.kind]})"
            )
        if self.strategy.kind == "grouped" and self.strategy.group_size > self.num_agents:
            raise ValueError(
                f"group size {self.strategy.group_size} exceeds agent count {self.num_agents}"
            )
        if not (isinstance(self.trials, (int, np.integer)) and self.trials >= 1):
            raise ValueError(f"trials must be a positive integer, got {self.trials!r}")
        if not (isinstance(self.base_seed, (int, np.integer)) and self.base_seed >= 0):
            raise ValueError(f"base_seed must be a non-negative integer, got {self.base_seed!r}")
        if self.seed_stream is not None and not (
            isinstance(self.seed_stream, (int, np.integer)) and self.seed_stream >= 0
        ):
            raise ValueError(f"seed_stream must be a non-negative integer, got {self.seed_stream!r}")
        if isinstance(self.speeds, SpeedDistribution):
            return
        if not isinstance(self.speeds, tuple) or not self.speeds:
            raise ValueError("fixed speeds must be a non-empty tuple")
        if len(self.speeds) not in (1, self.num_agents):
            raise ValueError(
                f"fixed speeds must have length 1 or {self.num_agents}, got {len(self.speeds)}"
            )
        for v in self.speeds:
            if not (math.isfinite(v) and v > 0):
                raise ValueError(f"speeds must be finite and positive, got {v!r}")


@dataclass(frozen=True)
class SummaryStats:
    """Mean time with its uncertainty; ci95 is the 95% half-width 1.96 * stderr."""

    mean: float
    stderr: float
    ci95: float
    trials: int
    minimum: float
    maximum: float

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if abs(self.ci95 - 1.96 * self.stderr) > 1e-9 * max(1.0, self.ci95):
            raise ValueError(f"ci95 {self.ci95!r} is not 1.96 * stderr {self.stderr!r}")
        slack = 1e-9 * max(1.0, abs(self.mean))
        if not (self.minimum <= self.mean + slack and self.mean <= self.maximum + slack):
            raise ValueError(
                f"mean {self.mean!r} outside [{self.minimum!r}, {self.maximum!r}]"
            )


@dataclass(frozen=True)
class SweepResult:
    """Per-m statistics for one (strategy, allocation) pair, plus reproduction metadata."""

    strategy: StrategySpec
    allocation: str
    entries: tuple[tuple[int, SummaryStats], ...]
    region_length: float
    speeds: SpeedDistribution | tuple[float, ...]
    base_seed: int

    def __post_init__(self) -> None:
        ms = [m for m, _ in self.entries]
        if not ms or any(b <= a for a, b in zip(ms, ms[1:])):
            raise ValueError(f"m values must be non-empty and strictly increasing, got {ms}")


@dataclass(frozen=True)
class CompareRow:
    """One line of a strategy-comparison table."""

    method: str
    m: int
    stats: SummaryStats


def resolve_method(token: str, allocation: str | None = None) -> tuple[StrategySpec, str]:
    """Map a method name to (strategy, allocation).

    Plain allocation names (equal, semi-equal, random) mean a one-directional sweep
    of that allocation; strategy names default to random starts, except proportional
    which carries its own allocation.  An explicit allocation overrides the default
    but may not contradict an allocation-implying token.
    """
    tok = token.strip().lower().replace("_", "-")
    if tok in ("equal", "semi-equal", "random"):
        if allocation is not None and allocation != tok:
            raise ValueError(f"method {token!r} implies allocation {tok!r}, got {allocation!r}")
        return StrategySpec("one-directional"), tok
    strategy = StrategySpec.parse(tok)
    if strategy.kind == "proportional":
        if allocation is not None and allocation != "proportional":
            raise ValueError(f"proportional strategy implies proportional allocation, got {allocation!r}")
        return strategy, "proportional"
    return strategy, allocation if allocation is not None else "random"


def _stream(plan: TrialPlan) -> int:
    return plan.seed_stream if plan.seed_stream is not None else plan.num_agents


def _chunk_rng(plan: TrialPlan, chunk_index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=plan.base_seed, spawn_key=(_stream(plan), chunk_index))
    return np.random.default_rng(ss)


def _fixed_starts(plan: TrialPlan) -> np.ndarray | None:
    L = plan.region.length
    m = plan.num_agents
    if plan.allocation == "equal":
        return np.arange(m) * (L / m)
    if plan.allocation == "semi-equal":
        return np.array(semi_equal_starts(L, m))
    return None  # random draws per trial; proportional needs no starts


def _chunk_partial(plan: TrialPlan, chunk_index: int, count: int) -> tuple[float, float, float, float]:
    rng = _chunk_rng(plan, chunk_index)
    L = plan.region.length
    m = plan.num_agents

    if plan.allocation == "random":
        starts = rng.uniform(0.0, L, (count, m))
    elif plan.allocation == "proportional":
        starts = None
    else:
        starts = np.broadcast_to(_fixed_starts(plan), (count, m))

    if isinstance(plan.speeds, SpeedDistribution):
        if plan.speeds.is_degenerate():
            speeds = np.broadcast_to(plan.speeds.speeds, (count, m))
        else:
            speeds = plan.speeds.sample(rng, (count, m))
    else:
        row = np.array(plan.speeds) if len(plan.speeds) == m else np.full(m, plan.speeds[0])
        speeds = np.broadcast_to(row, (count, m))

    x = rng.uniform(0.0, L, count)

    kind = plan.strategy.kind
    if kind == "one-directional":
        times = one_directional_times(starts, speeds, x, L)
    elif kind == "two-directional":
        times = two_directional_times(starts, speeds, x, L)
    elif kind == "grouped":
        times = grouped_times(starts, speeds, x, L, plan.strategy.group_size)
    else:
        times = proportional_times(speeds, x, L)
    return (
        float(np.sum(times)),
        float(np.sum(times * times)),
        float(times.min()),
        float(times.max()),
    )


def run_trials(plan: TrialPlan, workers: int | None = None) -> SummaryStats:
    """Estimate the mean time-to-solution under `plan`; bit-identical at any worker count."""
    n_chunks = -(-plan.trials // CHUNK_TRIALS)
    counts = [CHUNK_TRIALS] * n_chunks
    counts[-1] = plan.trials - CHUNK_TRIALS * (n_chunks - 1)
    if workers is None:
        workers = os.cpu_count() or 1
    if workers < 1:
        raise ValueError(f"workers must be positive, got {workers}")

    if workers == 1 or n_chunks == 1:
        partials = [_chunk_partial(plan, k, counts[k]) for k in range(n_chunks)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(lambda k: _chunk_partial(plan, k, counts[k]), range(n_chunks)))

    n = plan.trials
    total = math.fsum(p[0] for p in partials)
    total_sq = math.fsum(p[1] for p in partials)
    mean = total / n
    if n > 1:
        var = max((total_sq - n * mean * mean) / (n - 1), 0.0)
    else:
        var = 0.0
    stderr = math.sqrt(var / n)
    return SummaryStats(
        mean=mean,
        stderr=stderr,
        ci95=1.96 * stderr,
        trials=n,
        minimum=min(p[2] for p in partials),
        maximum=max(p[3] for p in partials),
    )


def sweep_m(template: TrialPlan, m_values: Sequence[int], workers: int | None = None) -> SweepResult:
    """run_trials at each m; per-m seed substreams keep points independent and stable."""
    ms = list(m_values)
    if not ms or any(b <= a for a, b in zip(ms, ms[1:])):
        raise ValueError(f"m_values must be non-empty and strictly increasing, got {ms}")
    entries = []
    for m in ms:
        plan = replace(template, num_agents=m)
        entries.append((m, run_trials(plan, workers=workers)))
    return SweepResult(
        strategy=template.strategy,
        allocation=template.allocation,
        entries=tuple(entries),
        region_length=template.region.length,
        speeds=template.speeds,
        base_seed=template.base_seed,
    )


def compare_strategies(
    region: RegionSpec,
    speeds: SpeedDistribution | tuple[float, ...],
    targets: Sequence[tuple[str, int]],
    trials: int,
    base_seed: int = 0,
    workers: int | None = None,
) -> tuple[CompareRow, ...]:
    """Evaluate (method, m) targets side by side with matched trial counts."""
    if not targets:
        raise ValueError("compare needs at least one (method, m) target")
    rows = []
    for token, m in targets:
        strategy, allocation = resolve_method(token)
        plan = TrialPlan(
            region=region,
            num_agents=m,
            strategy=strategy,
            allocation=allocation,
            speeds=speeds,
            trials=trials,
            base_seed=base_seed,
        )
        rows.append(CompareRow(method=str(token).strip().lower().replace("_", "-"), m=m, stats=run_trials(plan, workers=workers)))
    return tuple(rows)
