"""Analytic bounds on avoidance couplings and the related series evaluations.

The feasibility pressure p(1 - p log p) must stay below 1/k for k coupled
Bernoulli(p) walkers; inverting it bounds the admissible p for a given k,
and on the complete graph with loops it caps the walker count by
ceil(n - log n).  Natural logarithm throughout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

__all__ = [
    "feasible_pressure",
    "max_p",
    "max_walkers",
    "taylor_partial",
    "WalkerBound",
    "DEFAULT_TOL",
]

DEFAULT_TOL = 1e-12

# raw values of n - log n this close to an integer get flagged instead of
# silently rounded
CEILING_GUARD = 1e-9


def feasible_pressure(p: float) -> float:
    """p * (1 - p * ln p); strictly increasing on (0, 1], with value 1 at p=1."""
    if not 0.0 < p <= 1.0:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    return p * (1.0 - p * math.log(p))


def max_p(k: int, tol: float = DEFAULT_TOL) -> float:
    """Largest p consistent with k walkers: the root of feasible_pressure(p) = 1/k.

    Bisection on the monotone pressure function; the bracket (0, 1] is valid
    for every k >= 2 and k = 1 returns the boundary value 1.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if tol <= 0.0:
        raise ValueError(f"tolerance must be positive, got {tol}")
    if k == 1:
        return 1.0
    target = 1.0 / k
    lo, hi = 0.0, 1.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible_pressure(mid) < target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class WalkerBound:
    """ceil(n - ln n) plus the intermediate quantity n^2 / (n + ln n).

    ``ambiguous`` flags a raw value within CEILING_GUARD of an integer, where
    float evaluation cannot certify which side of the ceiling it falls on.
    """

    n: int
    value: int
    raw: float
    intermediate: float
    ambiguous: bool


def max_walkers(n: int) -> WalkerBound:
    """Upper bound on the walker count of an avoidance coupling on n vertices."""
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    log_n = math.log(n)
    raw = n - log_n
    return WalkerBound(
        n=n,
        value=math.ceil(raw),
        raw=raw,
        intermediate=n * n / (n + log_n),
        ambiguous=abs(raw - round(raw)) < CEILING_GUARD,
    )


def taylor_partial(p: float, terms: int) -> float:
    """Partial sum of p^2 (1-p)^b / b for b = 1..terms.

    Increases to the limit -p^2 ln p; the tail after N terms is at most
    p (1-p)^(N+1) / (N+1).
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    if terms < 1:
        raise ValueError(f"terms must be >= 1, got {terms}")
    g = 1.0 - p
    power = 1.0
    acc = 0.0
    for b in range(1, terms + 1):
        power *= g
        acc += power / b
    return p * p * acc
