"""Core value types: the circular region, agents, speed laws, solution placement."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "RegionSpec",
    "AgentProfile",
    "SpeedDistribution",
    "SolutionPlacement",
    "wrap_distance",
]


@dataclass(frozen=True)
class RegionSpec:
    """Circular (wrap-around) search region; positions live on [0, length)."""

    length: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.length) and self.length > 0):
            raise ValueError(f"region length must be finite and positive, got {self.length!r}")

    def contains(self, position: float) -> bool:
        return 0.0 <= position < self.length

    def require(self, position: float, what: str = "position") -> float:
        if not (math.isfinite(position) and self.contains(position)):
            raise ValueError(f"{what} {position!r} outside [0, {self.length})")
        return position


def wrap_distance(start: float, target: float, region: RegionSpec) -> float:
    """Distance from `start` to `target` moving in the positive direction, with wrap.

    Both positions must lie in [0, region.length); the result does too.
    """
    L = region.length
    region.require(start, "start")
    region.require(target, "target")
    d = (target - start) % L
    # float residue can round up to exactly L when the true gap is just below it
    if d >= L:
        d = math.nextafter(L, 0.0)
    return d


@dataclass(frozen=True)
class AgentProfile:
    """A single searcher: identity, sweep speed, starting position on the circle."""

    agent_id: int
    speed: float
    start: float

    def __post_init__(self) -> None:
        if self.agent_id < 0:
            raise ValueError(f"agent_id must be non-negative, got {self.agent_id}")
        if not (math.isfinite(self.speed) and self.speed > 0):
            raise ValueError(f"agent speed must be finite and positive, got {self.speed!r}")
        if not (math.isfinite(self.start) and self.start >= 0):
            raise ValueError(f"agent start must be finite and non-negative, got {self.start!r}")


@dataclass(frozen=True)
class SpeedDistribution:
    """Discrete probability law over agent speeds.

    `atoms` is a tuple of (speed, mass) pairs; masses must sum to 1.
    """

    atoms: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        if not self.atoms:
            raise ValueError("speed distribution needs at least one atom")
        seen = set()
        for speed, mass in self.atoms:
            if not (math.isfinite(speed) and speed > 0):
                raise ValueError(f"speed atom must be finite and positive, got {speed!r}")
            if not (math.isfinite(mass) and 0 < mass <= 1):
                raise ValueError(f"mass for speed {speed} must lie in (0, 1], got {mass!r}")
            if speed in seen:
                raise ValueError(f"duplicate speed atom {speed}")
            seen.add(speed)
        total = math.fsum(mass for _, mass in self.atoms)
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"speed masses must sum to 1, got {total!r}")

    @classmethod
    def point_mass(cls, speed: float) -> "SpeedDistribution":
        return cls(((speed, 1.0),))

    @property
    def speeds(self) -> np.ndarray:
        return np.array([s for s, _ in self.atoms], dtype=float)

    @property
    def masses(self) -> np.ndarray:
        return np.array([p for _, p in self.atoms], dtype=float)

    def mean(self) -> float:
        return math.fsum(s * p for s, p in self.atoms)

    def sample(self, rng: np.random.Generator, size: int | tuple[int, ...]) -> np.ndarray:
        return rng.choice(self.speeds, size=size, p=self.masses)

    def is_degenerate(self) -> bool:
        return len(self.atoms) == 1


@dataclass(frozen=True)
class SolutionPlacement:
    """Where the sought solution sits on the circle."""

    position: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.position) and self.position >= 0):
            raise ValueError(f"solution position must be finite and non-negative, got {self.position!r}")

    @classmethod
    def sample(cls, region: RegionSpec, rng: np.random.Generator) -> "SolutionPlacement":
        return cls(float(rng.uniform(0.0, region.length)))
