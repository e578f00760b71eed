"""Trace-generating policies and the simulation driver.

A policy is a frozen configuration whose ``generate(T, rng)`` emits T rows
deterministically from a seeded generator.  Shipped policies: a faithful
single-walker Bernoulli source, two negative controls (deterministic
alternation, fully independent walkers), greedy random avoiding walkers on
the complete graph, and the wave transform turning a loopless policy into a
looped one.  Only the single-walker sources are faithful; the avoiding
walkers keep the no-collision discipline but make no claim about marginals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import ClassVar

import numpy as np

from .traces import CouplingTrace, WalkerTrace

__all__ = [
    "trivial_k1",
    "round_robin",
    "independent",
    "avoiding_walkers",
    "staying_in_waves",
    "simulate",
    "BernoulliSite",
    "RoundRobin",
    "IndependentSites",
    "AvoidingWalkers",
    "StayingInWaves",
]


@dataclass(frozen=True)
class BernoulliSite:
    """One walker occupying the site i.i.d. with probability p (faithful)."""

    p: float
    kind: ClassVar[str] = "binary"
    k: ClassVar[int] = 1

    def __post_init__(self) -> None:
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    def generate(self, T: int, rng: np.random.Generator) -> np.ndarray:
        return (rng.random(T) < self.p).astype(np.uint8)[:, None]


@dataclass(frozen=True)
class RoundRobin:
    """Deterministic alternation: walker 1 + (t-1 mod k) occupies at time t.

    Negative control: marginal frequency is exactly 1/k but nothing is
    independent across time.
    """

    k: int
    kind: ClassVar[str] = "binary"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")

    def generate(self, T: int, rng: np.random.Generator) -> np.ndarray:
        rows = np.zeros((T, self.k), dtype=np.uint8)
        rows[np.arange(T), np.arange(T) % self.k] = 1
        return rows


@dataclass(frozen=True)
class IndependentSites:
    """k walkers occupying independently with probability p each.

    Negative control: collides at rate about p^2 per unordered pair.
    """

    k: int
    p: float
    kind: ClassVar[str] = "binary"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not 0.0 < self.p < 1.0:
            raise ValueError(f"p must lie in (0, 1), got {self.p}")

    def generate(self, T: int, rng: np.random.Generator) -> np.ndarray:
        return (rng.random((T, self.k)) < self.p).astype(np.uint8)


@dataclass(frozen=True)
class AvoidingWalkers:
    """Greedy random avoiding walkers on the complete graph.

    Each walker in turn picks uniformly among vertices not blocked by the
    new positions of earlier movers or the standing positions of later ones
    (nor its own seat, when loopless).  Collision-free by construction; the
    marginals are not simple random walks for k >= 2.
    """

    n: int
    k: int
    looped: bool = False
    start: tuple[int, ...] = field(default=())
    kind: ClassVar[str] = "walker"

    def __post_init__(self) -> None:
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        needed = self.k if self.looped else self.k + 1
        if self.n < needed:
            raise ValueError(
                f"n={self.n} leaves no legal move for k={self.k} "
                f"{'looped' if self.looped else 'loopless'} walkers"
            )
        if not self.start:
            object.__setattr__(self, "start", tuple(range(1, self.k + 1)))
        if len(self.start) != self.k or len(set(self.start)) != self.k:
            raise ValueError("start must hold k distinct vertices")
        if min(self.start) < 1 or max(self.start) > self.n:
            raise ValueError(f"start positions must lie in 1..{self.n}")

    def generate(self, T: int, rng: np.random.Generator) -> np.ndarray:
        n, k = self.n, self.k
        if k == 1:
            if self.looped:
                return rng.integers(1, n + 1, size=T, dtype=np.int64)[:, None]
            # cumulative uniform steps over the n-1 other vertices
            steps = rng.integers(1, n, size=T, dtype=np.int64)
            pos = (self.start[0] - 1 + np.cumsum(steps)) % n + 1
            return pos[:, None]
        pos = np.empty((T, k), dtype=np.int64)
        cur = list(self.start)
        for t in range(T):
            for i in range(k):
                blocked = set(cur[:i]) | set(cur[i + 1 :])
                if not self.looped:
                    blocked.add(cur[i])
                choices = [v for v in range(1, n + 1) if v not in blocked]
                cur[i] = choices[rng.integers(len(choices))]
                pos[t, i] = cur[i]
        return pos


@dataclass(frozen=True)
class StayingInWaves:
    """Looped-graph transform: freeze every walker for a round with prob 1/n.

    The wave indicators for all T rounds are drawn first from the generator,
    then the inner loopless policy consumes the remaining stream for its
    non-frozen rounds; a frozen round repeats the previous row exactly.
    """

    inner: AvoidingWalkers
    n: int
    kind: ClassVar[str] = "walker"
    looped: ClassVar[bool] = True

    def __post_init__(self) -> None:
        if getattr(self.inner, "kind", None) != "walker" or self.inner.looped:
            raise ValueError("inner policy must emit loopless walker rows")
        if self.n != self.inner.n:
            raise ValueError(f"n={self.n} does not match the inner policy's n={self.inner.n}")

    @property
    def k(self) -> int:
        return self.inner.k

    @property
    def start(self) -> tuple[int, ...]:
        return self.inner.start

    def generate(self, T: int, rng: np.random.Generator) -> np.ndarray:
        waves = rng.random(T) < 1.0 / self.n
        moving = ~waves
        m = int(np.count_nonzero(moving))
        if m:
            inner_rows = self.inner.generate(m, rng)
        else:
            inner_rows = np.empty((0, self.k), dtype=np.int64)
        idx = np.cumsum(moving) - 1  # last inner row emitted so far; -1 = none yet
        out = np.empty((T, self.k), dtype=np.int64)
        seeded = idx >= 0
        out[~seeded] = np.asarray(self.start, dtype=np.int64)
        out[seeded] = inner_rows[idx[seeded]]
        return out


def trivial_k1(p: float) -> BernoulliSite:
    return BernoulliSite(p)


def round_robin(k: int) -> RoundRobin:
    return RoundRobin(k)


def independent(k: int, p: float) -> IndependentSites:
    return IndependentSites(k, p)


def avoiding_walkers(
    n: int, k: int, looped: bool = False, start: tuple[int, ...] = ()
) -> AvoidingWalkers:
    return AvoidingWalkers(n, k, looped, tuple(start))


def staying_in_waves(policy: AvoidingWalkers, n: int) -> StayingInWaves:
    return StayingInWaves(policy, n)


def simulate(policy, T: int, seed: int) -> CouplingTrace | WalkerTrace:
    """Run a policy for T rounds; bit-exact reproduction for a fixed seed."""
    if T < 1:
        raise ValueError(f"T must be >= 1, got {T}")
    rng = np.random.default_rng(seed)
    rows = policy.generate(T, rng)
    if policy.kind == "binary":
        return CouplingTrace(policy.k, rows)
    return WalkerTrace(policy.n, policy.k, policy.looped, rows)
