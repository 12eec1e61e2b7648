"""Command-line front end: run the estimators and emit plot-ready tables.

Every output file carries a provenance header whose config line, fed back to the
CLI, regenerates the file byte for byte.  The echo is canonical: defaults are
materialized, agent ranges expanded, and --output/--workers excluded (they do
not affect content).
"""

from __future__ import annotations

import argparse
import json
import shlex
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .allocation import (
    estimate_length_pmf,
    length_pmf_equal,
    length_pmf_semi_equal,
    spacing_pmf_oracle,
)
from .analytics import (
    expected_time_independent,
    expected_time_proportional,
    expected_time_proportional_resampled,
    expected_time_random_starts,
    mean_inverse_speed,
    second_moment,
)
from .harness import TrialPlan, compare_strategies, resolve_method, run_trials, sweep_m
from .model import RegionSpec, SpeedDistribution
from .simulation import StrategySpec

__all__ = [
    "ExperimentConfig",
    "OutputRecord",
    "cmd_pl_hist",
    "cmd_expected",
    "cmd_simulate",
    "cmd_sweep",
    "cmd_compare",
    "main",
]

DEFAULT_SPEEDS = "0.5:0.3,1.0:0.3,1.375:0.4"
DEFAULT_TARGETS = "one-directional:23,two-directional:14,grouped-3:12,grouped-4:11,proportional:10"
DEFAULT_HIST_AGENTS = "2,5,10,20,30"
STAT_COLUMNS = ("strategy", "m", "mean", "stderr", "ci95", "trials", "seed")


class CliError(ValueError):
    """Configuration problem; reported as a diagnostic with exit code 2."""


@dataclass(frozen=True)
class ExperimentConfig:
    """Fully validated invocation: everything the command needs, nothing implicit."""

    command: str
    region_length: float
    agents: tuple[int, ...]
    method: str | None
    allocation: str | None
    speeds: SpeedDistribution | tuple[float, ...] | None
    trials: int
    seed: int
    workers: int | None
    output: str | None
    fmt: str
    with_analytic: bool
    targets: tuple[tuple[str, int], ...] | None


@dataclass(frozen=True)
class OutputRecord:
    """One command's table plus the provenance needed to regenerate it."""

    columns: tuple[str, ...]
    rows: tuple[tuple, ...]
    config_line: str

    def render(self, fmt: str) -> str:
        if fmt == "structured":
            doc = {
                "artifact": f"coopsearch {__version__}",
                "config": self.config_line,
                "columns": list(self.columns),
                "rows": [list(r) for r in self.rows],
            }
            return json.dumps(doc, indent=2) + "\n"
        lines = [f"# coopsearch {__version__}", f"# config: {self.config_line}"]
        lines.append(",".join(self.columns))
        for row in self.rows:
            lines.append(",".join(_cell(v) for v in row))
        return "\n".join(lines) + "\n"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _fmt_float(value: float) -> str:
    return repr(float(value))


def _parse_speeds(text: str) -> SpeedDistribution | tuple[float, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise CliError(f"empty --speeds value {text!r}")
    has_mass = [":" in t for t in items]
    try:
        if all(has_mass):
            atoms = []
            for t in items:
                v, p = t.split(":", 1)
                atoms.append((float(v), float(p)))
            return SpeedDistribution(tuple(atoms))
        if any(has_mass):
            raise CliError(f"--speeds mixes v:mass pairs with bare values: {text!r}")
        return tuple(float(t) for t in items)
    except CliError:
        raise
    except ValueError as e:
        raise CliError(f"bad --speeds value {text!r}: {e}") from None


def _speeds_text(speeds: SpeedDistribution | tuple[float, ...]) -> str:
    if isinstance(speeds, SpeedDistribution):
        return ",".join(f"{_fmt_float(v)}:{_fmt_float(p)}" for v, p in speeds.atoms)
    return ",".join(_fmt_float(v) for v in speeds)


def _parse_agents(ns) -> tuple[int, ...]:
    listed = getattr(ns, "agents", None)
    ranged = getattr(ns, "agents_range", None)
    if listed is not None and ranged is not None:
        raise CliError("give --agents or --agents-range, not both")
    if listed is not None:
        try:
            values = tuple(int(t) for t in listed.split(",") if t.strip())
        except ValueError:
            raise CliError(f"bad --agents value {listed!r}") from None
        if not values:
            raise CliError(f"bad --agents value {listed!r}")
        return values
    if ranged is not None:
        parts = ranged.split(":")
        if len(parts) not in (2, 3):
            raise CliError(f"bad --agents-range value {ranged!r}, expected start:stop[:step]")
        try:
            lo, hi = int(parts[0]), int(parts[1])
            step = int(parts[2]) if len(parts) == 3 else 1
        except ValueError:
            raise CliError(f"bad --agents-range value {ranged!r}") from None
        if step < 1 or hi < lo:
            raise CliError(f"bad --agents-range value {ranged!r}")
        return tuple(range(lo, hi + 1, step))
    return ()


def _parse_targets(text: str) -> tuple[tuple[str, int], ...]:
    out = []
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        token, sep, m_text = item.rpartition(":")
        if not sep:
            raise CliError(f"bad --targets entry {item!r}, expected method:m")
        try:
            m = int(m_text)
        except ValueError:
            raise CliError(f"bad agent count in --targets entry {item!r}") from None
        out.append((token.strip(), m))
    if not out:
        raise CliError(f"empty --targets value {text!r}")
    return tuple(out)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coopsearch",
        description="Cooperative exhaustive search on a circular region: "
        "analytic expected times and Monte-Carlo strategy comparison.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, speeds=True, trials=True):
        p.add_argument("--region-length", type=float, default=1000.0)
        if speeds:
            p.add_argument("--speeds", default=DEFAULT_SPEEDS, help="v:mass pmf pairs or bare fixed speeds")
        if trials:
            p.add_argument("--trials", type=int, default=1_000_000)
            p.add_argument("--seed", type=int, default=0)
        p.add_argument("--workers", type=int, default=None)
        p.add_argument("--output", default=None)
        p.add_argument("--format", dest="fmt", choices=("dsv", "structured"), default="dsv")

    p = sub.add_parser("pl-hist", help="estimated vs exact gap-length histogram for random starts")
    p.add_argument("--agents", default=DEFAULT_HIST_AGENTS)
    p.add_argument("--allocation", default="random")
    common(p, speeds=False)

    p = sub.add_parser("expected", help="closed-form expected times, no simulation")
    p.add_argument("--agents", default=None)
    p.add_argument("--agents-range", default=None)
    p.add_argument("--strategy", default="equal")
    common(p, trials=False)

    p = sub.add_parser("simulate", help="Monte-Carlo estimate for one configuration")
    p.add_argument("--agents", required=True)
    p.add_argument("--strategy", default="one-directional")
    p.add_argument("--allocation", default=None)
    common(p)

    p = sub.add_parser("sweep", help="Monte-Carlo sweep over agent counts")
    p.add_argument("--agents", default=None)
    p.add_argument("--agents-range", default=None)
    p.add_argument("--strategy", default="one-directional")
    p.add_argument("--allocation", default=None)
    p.add_argument("--with-analytic", action="store_true")
    common(p)

    p = sub.add_parser("compare", help="side-by-side strategy comparison at chosen agent counts")
    p.add_argument("--targets", default=DEFAULT_TARGETS)
    common(p)
    return parser


def parse_config(argv=None) -> ExperimentConfig:
    ns = _build_parser().parse_args(argv)
    command = ns.command

    region_length = float(ns.region_length)
    if not region_length > 0:
        raise CliError(f"--region-length must be positive, got {region_length!r}")

    trials = getattr(ns, "trials", 1)
    seed = getattr(ns, "seed", 0)
    if trials < 1:
        raise CliError(f"--trials must be positive, got {trials}")
    if seed < 0:
        raise CliError(f"--seed must be non-negative, got {seed}")
    workers = ns.workers
    if workers is not None and workers < 1:
        raise CliError(f"--workers must be positive, got {workers}")

    speeds = _parse_speeds(ns.speeds) if hasattr(ns, "speeds") else None
    if isinstance(speeds, SpeedDistribution):
        pass
    elif speeds is not None:
        for v in speeds:
            if not v > 0:
                raise CliError(f"speeds must be positive, got {v!r}")

    agents = _parse_agents(ns)
    method = getattr(ns, "strategy", None)
    allocation = getattr(ns, "allocation", None)
    targets = _parse_targets(ns.targets) if hasattr(ns, "targets") else None

    if command == "pl-hist":
        if allocation != "random":
            raise CliError(f"pl-hist needs random allocation, got {allocation!r}")
        if not agents:
            raise CliError("pl-hist needs --agents")
        if any(m < 2 for m in agents):
            raise CliError(f"pl-hist needs m >= 2, got {agents}")
    elif command == "expected":
        if not agents:
            agents = tuple(range(2, 33))
        if any(m < 1 for m in agents):
            raise CliError(f"--agents must be positive, got {agents}")
        token = method.strip().lower().replace("_", "-")
        if token not in ("equal", "semi-equal", "random", "proportional"):
            raise CliError(
                f"no closed form for strategy {method!r}; use `coopsearch simulate` for it"
            )
        method = token
        if not isinstance(speeds, SpeedDistribution):
            if len(speeds) != 1:
                raise CliError(
                    "expected needs a speed pmf (v:mass pairs) or a single shared speed"
                )
            speeds = SpeedDistribution.point_mass(speeds[0])
    elif command in ("simulate", "sweep"):
        if not agents:
            if command == "simulate":
                raise CliError("simulate needs --agents")
            agents = tuple(range(2, 33))
        if command == "simulate" and len(agents) != 1:
            raise CliError(f"simulate takes a single --agents value, got {agents}")
        if any(b <= a for a, b in zip(agents, agents[1:])):
            raise CliError(f"agent counts must be strictly increasing, got {agents}")
        if any(m < 1 for m in agents):
            raise CliError(f"--agents must be positive, got {agents}")
        token = method.strip().lower().replace("_", "-")
        try:
            strategy, allocation = resolve_method(token, allocation)
        except ValueError as e:
            raise CliError(str(e)) from None
        method = token if token in ("equal", "semi-equal", "random") else str(strategy)
        if strategy.kind == "grouped" and strategy.group_size > min(agents):
            raise CliError(
                f"group size {strategy.group_size} exceeds smallest agent count {min(agents)}"
            )
        if not isinstance(speeds, SpeedDistribution):
            allowed = (1, agents[0]) if command == "simulate" else (1,)
            if len(speeds) not in allowed:
                raise CliError(
                    "fixed speeds must be a single shared value"
                    + (" or one per agent" if command == "simulate" else "")
                    + f", got {len(speeds)} values"
                )
    elif command == "compare":
        for token, m in targets:
            if m < 1:
                raise CliError(f"agent count must be positive in target {token}:{m}")
            try:
                strategy, _ = resolve_method(token)
            except ValueError as e:
                raise CliError(str(e)) from None
            if strategy.kind == "grouped" and strategy.group_size > m:
                raise CliError(f"group size exceeds agent count in target {token}:{m}")
        targets = tuple(
            (token.strip().lower().replace("_", "-"), m) for token, m in targets
        )
        if not isinstance(speeds, SpeedDistribution) and len(speeds) != 1:
            raise CliError("compare needs a speed pmf or a single shared speed")

    return ExperimentConfig(
        command=command,
        region_length=region_length,
        agents=agents,
        method=method,
        allocation=allocation,
        speeds=speeds,
        trials=trials,
        seed=seed,
        workers=workers,
        output=ns.output,
        fmt=ns.fmt,
        with_analytic=getattr(ns, "with_analytic", False),
        targets=targets,
    )


def _config_line(cfg: ExperimentConfig) -> str:
    parts = ["coopsearch", cfg.command, "--region-length", _fmt_float(cfg.region_length)]
    if cfg.command == "pl-hist":
        parts += ["--agents", ",".join(str(m) for m in cfg.agents)]
        parts += ["--allocation", "random"]
        parts += ["--trials", str(cfg.trials), "--seed", str(cfg.seed)]
    elif cfg.command == "expected":
        parts += ["--agents", ",".join(str(m) for m in cfg.agents)]
        parts += ["--strategy", cfg.method, "--speeds", _speeds_text(cfg.speeds)]
    elif cfg.command == "simulate":
        parts += ["--agents", str(cfg.agents[0]), "--strategy", cfg.method]
        if cfg.allocation is not None:
            parts += ["--allocation", cfg.allocation]
        parts += ["--speeds", _speeds_text(cfg.speeds)]
        parts += ["--trials", str(cfg.trials), "--seed", str(cfg.seed)]
    elif cfg.command == "sweep":
        parts += ["--agents", ",".join(str(m) for m in cfg.agents)]
        parts += ["--strategy", cfg.method]
        if cfg.allocation is not None:
            parts += ["--allocation", cfg.allocation]
        parts += ["--speeds", _speeds_text(cfg.speeds)]
        parts += ["--trials", str(cfg.trials), "--seed", str(cfg.seed)]
        if cfg.with_analytic:
            parts.append("--with-analytic")
    elif cfg.command == "compare":
        parts += ["--targets", ",".join(f"{t}:{m}" for t, m in cfg.targets)]
        parts += ["--speeds", _speeds_text(cfg.speeds)]
        parts += ["--trials", str(cfg.trials), "--seed", str(cfg.seed)]
    parts += ["--format", cfg.fmt]
    return " ".join(shlex.quote(p) for p in parts)


def cmd_pl_hist(cfg: ExperimentConfig) -> OutputRecord:
    rows = []
    for m in cfg.agents:
        seed = np.random.SeedSequence(entropy=cfg.seed, spawn_key=(m,))
        est = estimate_length_pmf(cfg.region_length, m, cfg.trials, seed)
        oracle = spacing_pmf_oracle(cfg.region_length, m)
        for k, (e_mass, o_mass) in enumerate(zip(est.masses, oracle.masses)):
            rows.append((m, k, float(e_mass), float(o_mass)))
    return OutputRecord(
        columns=("m", "bin", "estimated_mass", "oracle_mass"),
        rows=tuple(rows),
        config_line=_config_line(cfg),
    )


def _analytic_value(
    strategy: StrategySpec,
    allocation: str,
    region_length: float,
    m: int,
    speeds: SpeedDistribution | tuple[float, ...],
) -> float | None:
    """Closed-form mean for the configuration, when one exists."""
    L = region_length
    if strategy.kind == "proportional":
        if isinstance(speeds, SpeedDistribution):
            return expected_time_proportional_resampled(L, speeds, m)
        v = speeds if len(speeds) == m else speeds * m
        return expected_time_proportional(L, v)
    if strategy.kind != "one-directional":
        return None
    if isinstance(speeds, SpeedDistribution):
        inv_mean = mean_inverse_speed(speeds)
    else:
        v = speeds if len(speeds) == m else speeds * m
        inv_mean = float(np.mean([1.0 / s for s in v]))
    if allocation == "equal":
        second = (L / m) ** 2
    elif allocation == "semi-equal":
        second = second_moment(length_pmf_semi_equal(L, m))
    else:
        second = 2.0 * L * L / (m * (m + 1))
    return m / (2.0 * L) * inv_mean * second


def cmd_expected(cfg: ExperimentConfig) -> OutputRecord:
    rows = []
    L = cfg.region_length
    pmf = cfg.speeds
    for m in cfg.agents:
        if cfg.method == "equal":
            value = expected_time_independent(pmf, length_pmf_equal(L, m), m, L)
        elif cfg.method == "semi-equal":
            value = expected_time_independent(pmf, length_pmf_semi_equal(L, m), m, L)
        elif cfg.method == "random":
            value = expected_time_random_starts(L, m, pmf)
        else:
            value = expected_time_proportional_resampled(L, pmf, m)
        rows.append((cfg.method, m, value))
    return OutputRecord(
        columns=("strategy", "m", "expected_time"),
        rows=tuple(rows),
        config_line=_config_line(cfg),
    )


def _plan(cfg: ExperimentConfig, m: int) -> TrialPlan:
    strategy, allocation = resolve_method(cfg.method, cfg.allocation)
    return TrialPlan(
        region=RegionSpec(cfg.region_length),
        num_agents=m,
        strategy=strategy,
        allocation=allocation,
        speeds=cfg.speeds,
        trials=cfg.trials,
        base_seed=cfg.seed,
    )


def cmd_simulate(cfg: ExperimentConfig) -> OutputRecord:
    m = cfg.agents[0]
    stats = run_trials(_plan(cfg, m), workers=cfg.workers)
    row = (cfg.method, m, stats.mean, stats.stderr, stats.ci95, stats.trials, cfg.seed)
    return OutputRecord(columns=STAT_COLUMNS, rows=(row,), config_line=_config_line(cfg))


def cmd_sweep(cfg: ExperimentConfig) -> OutputRecord:
    strategy, allocation = resolve_method(cfg.method, cfg.allocation)
    template = _plan(cfg, cfg.agents[0])
    result = sweep_m(template, cfg.agents, workers=cfg.workers)
    columns = STAT_COLUMNS + (("analytic",) if cfg.with_analytic else ())
    rows = []
    for m, stats in result.entries:
        row = [cfg.method, m, stats.mean, stats.stderr, stats.ci95, stats.trials, cfg.seed]
        if cfg.with_analytic:
            row.append(_analytic_value(strategy, allocation, cfg.region_length, m, cfg.speeds))
        rows.append(tuple(row))
    return OutputRecord(columns=columns, rows=tuple(rows), config_line=_config_line(cfg))


def cmd_compare(cfg: ExperimentConfig) -> OutputRecord:
    speeds = cfg.speeds
    table = compare_strategies(
        RegionSpec(cfg.region_length),
        speeds,
        cfg.targets,
        trials=cfg.trials,
        base_seed=cfg.seed,
        workers=cfg.workers,
    )
    rows = tuple(
        (row.method, row.m, row.stats.mean, row.stats.stderr, row.stats.ci95, row.stats.trials, cfg.seed)
        for row in table
    )
    return OutputRecord(columns=STAT_COLUMNS, rows=rows, config_line=_config_line(cfg))


_COMMANDS = {
    "pl-hist": cmd_pl_hist,
    "expected": cmd_expected,
    "simulate": cmd_simulate,
    "sweep": cmd_sweep,
    "compare": cmd_compare,
}


def main(argv=None) -> int:
    try:
        cfg = parse_config(argv)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    try:
        record = _COMMANDS[cfg.command](cfg)
        text = record.render(cfg.fmt)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    if cfg.output:
        Path(cfg.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
