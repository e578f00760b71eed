"""Finite words over a walker alphabet and their neighbor-pair weight calculus.

A word records which of k walkers (if any) occupies a tracked site at each
time step; the blank symbol ``B`` marks times when the site is empty.  Two
successive occurrences of the same walker form a neighbor pair whose weight
is 1/b, where b counts the distinct symbols strictly between them (0 for an
adjacent pair).  All weights are exact rationals: the central inequality
(total weight <= blank count) can be tight, so float tolerances are unusable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = [
    "BLANK",
    "Seq",
    "NeighborPair",
    "WeightReport",
    "symbol_text",
    "parse_seq",
    "is_permissible",
    "neighbor_pairs",
    "total_weight",
    "blank_count",
]

BLANK = 0  # sorts below every walker index, giving the order B < 1 < ... < k


def symbol_text(sym: int) -> str:
    """Render one symbol in the text format: "B" or the decimal walker index."""
    return "B" if sym == BLANK else str(sym)


@dataclass(frozen=True)
class Seq:
    """Immutable word over {B, 1, ..., k}; blanks stored as 0.

    Positions are 1-based throughout, matching the time index t = 1..T.
    The empty word is a valid degenerate value.
    """

    k: int
    symbols: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.k < 0:
            raise ValueError(f"walker count must be nonnegative, got {self.k}")
        if self.symbols:
            if min(self.symbols) < 0 or max(self.symbols) > self.k:
                bad = next(s for s in self.symbols if not 0 <= s <= self.k)
                raise ValueError(f"symbol {bad} outside alphabet {{B, 1..{self.k}}}")

    def __len__(self) -> int:
        return len(self.symbols)

    @property
    def T(self) -> int:
        return len(self.symbols)

    def text(self) -> str:
        """Whitespace-separated token form, e.g. ``"1 3 B 2"``."""
        return " ".join(symbol_text(s) for s in self.symbols)

    def __repr__(self) -> str:
        shown = self.text()
        if len(shown) > 60:
            shown = shown[:57] + "..."
        return f"Seq(k={self.k}, T={self.T}, '{shown}')"


@dataclass(frozen=True)
class NeighborPair:
    """Two successive occurrences t1 < t2 of the same walker symbol.

    ``b`` is the number of distinct alphabet elements strictly between the
    occurrences (the blank counts as one element); the weight is 1/b, or 0
    for an adjacent pair (b = 0).
    """

    symbol: int
    t1: int
    t2: int
    b: int
    weight: Fraction


@dataclass(frozen=True)
class WeightReport:
    pairs: tuple[NeighborPair, ...]
    per_symbol_output: dict[int, Fraction]
    total: Fraction
    blanks: int


def parse_seq(text: str, k: int) -> Seq:
    """Parse whitespace-separated tokens ("B" or a walker index in 1..k)."""
    if k < 1:
        raise ValueError(f"walker count must be >= 1, got {k}")
    syms = []
    for tok in text.split():
        if tok == "B":
            syms.append(BLANK)
            continue
        if not tok.isdigit():
            raise ValueError(f"malformed token {tok!r}: expected 'B' or a walker index")
        idx = int(tok)
        if not 1 <= idx <= k:
            raise ValueError(f"walker index {idx} out of range 1..{k}")
        syms.append(idx)
    return Seq(k, tuple(syms))


def is_permissible(s: Seq) -> bool:
    """True iff adjacent walker symbols never decrease; blanks are unconstrained."""
    syms = s.symbols
    for a, b in zip(syms, syms[1:]):
        if a != BLANK and b != BLANK and a > b:
            return False
    return True


def neighbor_pairs(s: Seq) -> list[NeighborPair]:
    """All neighbor pairs, ordered by (symbol, t1).

    Each walker symbol occurring m >= 1 times contributes exactly m - 1 pairs.
    """
    occ: dict[int, list[int]] = {}
    for t, sym in enumerate(s.symbols, start=1):
        if sym != BLANK:
            occ.setdefault(sym, []).append(t)
    pairs = []
    for sym in sorted(occ):
        ts = occ[sym]
        for t1, t2 in zip(ts, ts[1:]):
            b = len(set(s.symbols[t1 : t2 - 1]))
            weight = Fraction(1, b) if b else Fraction(0)
            pairs.append(NeighborPair(sym, t1, t2, b, weight))
    return pairs


def total_weight(s: Seq) -> WeightReport:
    """Sum all pair weights, exactly, with per-symbol subtotals ("outputs")."""
    pairs = neighbor_pairs(s)
    per: dict[int, Fraction] = {}
    total = Fraction(0)
    for p in pairs:
        per[p.symbol] = per.get(p.symbol, Fraction(0)) + p.weight
        total += p.weight
    return WeightReport(tuple(pairs), per, total, blank_count(s))


def blank_count(s: Seq) -> int:
    return s.symbols.count(BLANK)
