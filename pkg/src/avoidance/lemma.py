"""Constructive reduction proving total weight <= blank count, with certificates.

Every permissible word shrinks to a trivial one through four edit rules,
applied in a fixed priority:

1. CollapseBlanks        -- replace "B B" by "B"          (weight 0, blanks -1)
2. DeleteZeroWeightPair  -- drop the right of "i i"       (weight 0, blanks 0)
3. CollapseWeightOnePair -- replace "i B i" by "i"        (weight -1, blanks -1)
4. DeleteVictimSymbol    -- remove every occurrence of a walker whose
   redistributed input is at least its output             (weight >= 0, blanks 0)

Unwinding the recorded deltas from the trivial endpoint proves the inequality
for the initial word; the step list is a certificate an independent checker
replays with exact arithmetic.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .sequences import (
    BLANK,
    NeighborPair,
    Seq,
    blank_count,
    is_permissible,
    neighbor_pairs,
    parse_seq,
    total_weight,
)

__all__ = [
    "COLLAPSE_BLANKS",
    "DELETE_ZERO_WEIGHT_PAIR",
    "COLLAPSE_WEIGHT_ONE_PAIR",
    "DELETE_VICTIM_SYMBOL",
    "Donation",
    "RedistributionReport",
    "ReductionStep",
    "ReductionCertificate",
    "CheckResult",
    "ExhaustiveReport",
    "redistribution",
    "reduce_step",
    "reduce_certificate",
    "check_certificate",
    "is_terminal",
    "apply_edit",
    "certificate_to_text",
    "certificate_from_text",
    "permissible_words",
    "verify_lemma_exhaustive",
    "ENUMERATION_BUDGET",
]

COLLAPSE_BLANKS = "CollapseBlanks"
DELETE_ZERO_WEIGHT_PAIR = "DeleteZeroWeightPair"
COLLAPSE_WEIGHT_ONE_PAIR = "CollapseWeightOnePair"
DELETE_VICTIM_SYMBOL = "DeleteVictimSymbol"

RULES = (
    COLLAPSE_BLANKS,
    DELETE_ZERO_WEIGHT_PAIR,
    COLLAPSE_WEIGHT_ONE_PAIR,
    DELETE_VICTIM_SYMBOL,
)

ENUMERATION_BUDGET = 10_000_000


@dataclass(frozen=True)
class Donation:
    pair: NeighborPair
    recipient: int
    amount: Fraction


@dataclass(frozen=True)
class RedistributionReport:
    """Weight redistribution over a word with no rule-1..3 pattern left.

    Every pair has b >= 2 distinct symbols between its endpoints, one of
    them a blank, so it donates 1/(b(b-1)) to each of the b - 1 distinct
    walker symbols in between.  ``input`` maps a walker to what it receives,
    ``output`` to the summed weight of its own pairs; both sum to the total
    weight, so some walker has input >= output.
    """

    input: dict[int, Fraction]
    output: dict[int, Fraction]
    donations: tuple[Donation, ...]

    def input_of(self, j: int) -> Fraction:
        return self.input.get(j, Fraction(0))

    def output_of(self, j: int) -> Fraction:
        return self.output.get(j, Fraction(0))


@dataclass(frozen=True)
class ReductionStep:
    """One edit: ``after`` is ``before`` with the rule applied at the anchor.

    ``pos`` is the 1-based anchor of the edited pattern (rules 1..3);
    ``symbol`` is the walker involved (rules 2..4, the victim for rule 4).
    Deltas are after-minus-before values, stored exactly.
    """

    rule: str
    pos: int | None
    symbol: int | None
    before: Seq
    after: Seq
    weight_delta: Fraction
    blank_delta: int
    redistribution: RedistributionReport | None = None


@dataclass(frozen=True)
class ReductionCertificate:
    initial: Seq
    steps: tuple[ReductionStep, ...]
    final: Seq


@dataclass(frozen=True)
class CheckResult:
    ok: bool
    failure: str | None = None

    def __bool__(self) -> bool:
        return self.ok


def redistribution(s: Seq) -> RedistributionReport:
    """Donate each pair's weight to the distinct walker symbols between it.

    Requires a permissible word with rules 1..3 exhausted, i.e. every pair
    has b >= 2 and a blank between its endpoints (so exactly b - 1 distinct
    walkers receive 1/(b(b-1)) each, summing to the pair's weight 1/b).
    A pair never donates to its own symbol: that symbol cannot occur
    strictly between the pair's endpoints.
    """
    if not is_permissible(s):
        raise ValueError("sequence is not permissible")
    inp: dict[int, Fraction] = {}
    out: dict[int, Fraction] = {}
    donations = []
    for pair in neighbor_pairs(s):
        if pair.b <= 1:
            raise ValueError(
                f"pair ({pair.t1},{pair.t2}) of symbol {pair.symbol} has "
                f"b={pair.b}; rules 1..3 are not exhausted"
            )
        between = s.symbols[pair.t1 : pair.t2 - 1]
        recipients = sorted(set(between) - {BLANK})
        if len(recipients) != pair.b - 1:
            raise ValueError(
                f"pair ({pair.t1},{pair.t2}) has no blank between its endpoints"
            )
        amount = Fraction(1, pair.b * (pair.b - 1))
        for r in recipients:
            donations.append(Donation(pair, r, amount))
            inp[r] = inp.get(r, Fraction(0)) + amount
        out[pair.symbol] = out.get(pair.symbol, Fraction(0)) + pair.weight
    return RedistributionReport(
        dict(sorted(inp.items())), dict(sorted(out.items())), tuple(donations)
    )


def apply_edit(s: Seq, rule: str, arg: int) -> Seq:
    """Apply a rule's edit mechanically at a 1-based anchor (or victim symbol)."""
    syms = s.symbols
    if rule in (COLLAPSE_BLANKS, DELETE_ZERO_WEIGHT_PAIR):
        if not 1 <= arg < len(syms):
            raise ValueError(f"anchor {arg} out of range for length {len(syms)}")
        return Seq(s.k, syms[:arg] + syms[arg + 1 :])
    if rule == COLLAPSE_WEIGHT_ONE_PAIR:
        if not 1 <= arg <= len(syms) - 2:
            raise ValueError(f"anchor {arg} out of range for length {len(syms)}")
        return Seq(s.k, syms[:arg] + syms[arg + 2 :])
    if rule == DELETE_VICTIM_SYMBOL:
        if arg == BLANK or arg not in syms:
            raise ValueError(f"victim {arg} does not occur")
        return Seq(s.k, tuple(x for x in syms if x != arg))
    raise ValueError(f"unknown rule {rule!r}")


def _edit_matches(step: ReductionStep) -> str | None:
    """Check the recorded rule's pattern holds at the anchor; None if it does."""
    syms = step.before.symbols
    if step.rule == COLLAPSE_BLANKS:
        t = step.pos
        if t is None or not 1 <= t < len(syms):
            return "anchor out of range"
        if not (syms[t - 1] == BLANK and syms[t] == BLANK):
            return f"no blank pair at position {t}"
    elif step.rule == DELETE_ZERO_WEIGHT_PAIR:
        t = step.pos
        if t is None or not 1 <= t < len(syms):
            return "anchor out of range"
        if not (syms[t - 1] != BLANK and syms[t - 1] == syms[t]):
            return f"no adjacent equal walker pair at position {t}"
        if step.symbol != syms[t - 1]:
            return "recorded symbol does not match the pair"
    elif step.rule == COLLAPSE_WEIGHT_ONE_PAIR:
        t = step.pos
        if t is None or not 1 <= t <= len(syms) - 2:
            return "anchor out of range"
        if not (syms[t - 1] != BLANK and syms[t] == BLANK and syms[t + 1] == syms[t - 1]):
            return f"no walker-blank-walker pattern at position {t}"
        if step.symbol != syms[t - 1]:
            return "recorded symbol does not match the pattern"
    elif step.rule == DELETE_VICTIM_SYMBOL:
        if step.symbol is None or step.symbol == BLANK or step.symbol not in syms:
            return f"victim {step.symbol} does not occur"
    else:
        return f"unknown rule {step.rule!r}"
    arg = step.symbol if step.rule == DELETE_VICTIM_SYMBOL else step.pos
    expected = apply_edit(step.before, step.rule, arg)
    if expected != step.after:
        return "recorded result does not match the edit"
    return None


def _make_step(
    rule: str,
    pos: int | None,
    symbol: int | None,
    before: Seq,
    after: Seq,
    red: RedistributionReport | None = None,
) -> ReductionStep:
    wd = total_weight(after).total - total_weight(before).total
    bd = blank_count(after) - blank_count(before)
    return ReductionStep(rule, pos, symbol, before, after, wd, bd, red)


def reduce_step(s: Seq) -> ReductionStep:
    """Apply the first applicable rule in the fixed priority order.

    Raises on a non-permissible word or a terminal one (no walker symbol and
    no adjacent blanks).  The victim of rule 4 is the smallest walker present
    whose redistributed input is at least its output; one always exists since
    inputs and outputs both sum to the total weight.
    """
    if not is_permissible(s):
        raise ValueError("sequence is not permissible")
    syms = s.symbols
    for t in range(len(syms) - 1):
        if syms[t] == BLANK and syms[t + 1] == BLANK:
            return _make_step(
                COLLAPSE_BLANKS, t + 1, None, s, apply_edit(s, COLLAPSE_BLANKS, t + 1)
            )
    for t in range(len(syms) - 1):
        if syms[t] != BLANK and syms[t] == syms[t + 1]:
            return _make_step(
                DELETE_ZERO_WEIGHT_PAIR,
                t + 1,
                syms[t],
                s,
                apply_edit(s, DELETE_ZERO_WEIGHT_PAIR, t + 1),
            )
    for t in range(len(syms) - 2):
        if syms[t] != BLANK and syms[t + 1] == BLANK and syms[t + 2] == syms[t]:
            return _make_step(
                COLLAPSE_WEIGHT_ONE_PAIR,
                t + 1,
                syms[t],
                s,
                apply_edit(s, COLLAPSE_WEIGHT_ONE_PAIR, t + 1),
            )
    present = sorted(set(syms) - {BLANK})
    if not present:
        raise ValueError("terminal sequence: no rule applies")
    red = redistribution(s)
    victim = None
    for j in present:
        if red.input_of(j) >= red.output_of(j):
            victim = j
            break
    if victim is None:
        raise AssertionError(
            "no admissible victim; conservation of redistributed weight is broken"
        )
    return _make_step(
        DELETE_VICTIM_SYMBOL, None, victim, s, apply_edit(s, DELETE_VICTIM_SYMBOL, victim), red
    )


def is_terminal(s: Seq) -> bool:
    syms = s.symbols
    if any(x != BLANK for x in syms):
        return False
    return not any(
        syms[t] == BLANK and syms[t + 1] == BLANK for t in range(len(syms) - 1)
    )


def reduce_certificate(s: Seq) -> ReductionCertificate:
    """Reduce to a terminal word, recording every step.

    Terminates because each step strictly shortens the word.
    """
    if not is_permissible(s):
        raise ValueError("sequence is not permissible")
    steps = []
    cur = s
    while not is_terminal(cur):
        step = reduce_step(cur)
        steps.append(step)
        cur = step.after
    return ReductionCertificate(s, tuple(steps), cur)


def check_certificate(cert: ReductionCertificate) -> CheckResult:
    """Independently re-verify a certificate with exact arithmetic.

    Recomputes every step's edit, weight/blank deltas, rule-specific delta
    contracts, redistribution tables and victim admissibility, checks the
    chain links up from the initial word to a pair-free final word, and
    confirms the unwound inequality total_weight(initial) <= blank_count(initial).
    """
    if not is_permissible(cert.initial):
        return CheckResult(False, "initial sequence is not permissible")
    prev = cert.initial
    for idx, step in enumerate(cert.steps):
        where = f"step {idx}"
        if step.before != prev:
            return CheckResult(False, f"{where}: broken chain (before != previous after)")
        if len(step.after) >= len(step.before):
            return CheckResult(False, f"{where}: edit does not shorten the sequence")
        mismatch = _edit_matches(step)
        if mismatch is not None:
            return CheckResult(False, f"{where}: {mismatch}")
        wd = total_weight(step.after).total - total_weight(step.before).total
        bd = blank_count(step.after) - blank_count(step.before)
        if wd != step.weight_delta:
            return CheckResult(
                False, f"{where}: stored weight delta {step.weight_delta} != recomputed {wd}"
            )
        if bd != step.blank_delta:
            return CheckResult(
                False, f"{where}: stored blank delta {step.blank_delta} != recomputed {bd}"
            )
        if step.rule == COLLAPSE_BLANKS and not (wd == 0 and bd == -1):
            return CheckResult(False, f"{where}: blank collapse must have deltas (0, -1)")
        if step.rule == DELETE_ZERO_WEIGHT_PAIR and not (wd == 0 and bd == 0):
            return CheckResult(False, f"{where}: zero-weight deletion must have deltas (0, 0)")
        if step.rule == COLLAPSE_WEIGHT_ONE_PAIR and not (wd == -1 and bd == -1):
            return CheckResult(False, f"{where}: weight-one collapse must have deltas (-1, -1)")
        if step.rule == DELETE_VICTIM_SYMBOL:
            try:
                red = redistribution(step.before)
            except ValueError as exc:
                return CheckResult(False, f"{where}: redistribution precondition: {exc}")
            total = total_weight(step.before).total
            if sum(red.input.values(), Fraction(0)) != total:
                return CheckResult(False, f"{where}: redistributed inputs do not sum to the total")
            if sum(red.output.values(), Fraction(0)) != total:
                return CheckResult(False, f"{where}: outputs do not sum to the total")
            if step.redistribution is not None:
                if (
                    step.redistribution.input != red.input
                    or step.redistribution.output != red.output
                ):
                    return CheckResult(False, f"{where}: stored redistribution tables differ")
            j = step.symbol
            if red.input_of(j) < red.output_of(j):
                return CheckResult(
                    False, f"{where}: victim {j} has input < output, not admissible"
                )
            if wd != red.input_of(j) - red.output_of(j):
                return CheckResult(
                    False, f"{where}: weight delta != input - output of the victim"
                )
            if bd != 0:
                return CheckResult(False, f"{where}: victim deletion must preserve blanks")
        prev = step.after
    if cert.final != prev:
        return CheckResult(False, "final sequence does not match the last step")
    if neighbor_pairs(cert.final):
        return CheckResult(False, "final sequence still contains neighbor pairs")
    initial = total_weight(cert.initial)
    if initial.total > blank_count(cert.initial):
        return CheckResult(False, "unwound inequality fails: total weight > blanks")
    return CheckResult(True)


def certificate_to_text(cert: ReductionCertificate) -> str:
    """Serialize: header "k T", initial line, one line per step, final line.

    Step lines carry the rule name, the anchor position (or victim symbol),
    the weight delta as num/den, and the blank delta.  Bit-exact for golden
    tests; intermediate words are reconstructed on parse by replaying edits.
    """
    lines = [f"{cert.initial.k} {cert.initial.T}", cert.initial.text()]
    for st in cert.steps:
        arg = st.symbol if st.rule == DELETE_VICTIM_SYMBOL else st.pos
        wd = st.weight_delta
        lines.append(f"{st.rule} {arg} {wd.numerator}/{wd.denominator} {st.blank_delta}")
    lines.append(cert.final.text())
    return "\n".join(lines) + "\n"


def certificate_from_text(text: str) -> ReductionCertificate:
    """Parse and replay a serialized certificate.

    Replaying applies each recorded edit mechanically; judging whether the
    result is a valid proof is check_certificate's job.
    """
    lines = text.splitlines()
    if len(lines) < 3:
        raise ValueError("certificate needs a header, initial and final line")
    try:
        k, T = map(int, lines[0].split())
    except ValueError as exc:
        raise ValueError(f"malformed header {lines[0]!r}") from exc
    initial = parse_seq(lines[1], k)
    if initial.T != T:
        raise ValueError(f"header says T={T} but initial line has {initial.T} symbols")
    steps = []
    cur = initial
    for line in lines[2:-1]:
        parts = line.split()
        if len(parts) != 4:
            raise ValueError(f"malformed step line {line!r}")
        rule, arg_s, wd_s, bd_s = parts
        if rule not in RULES:
            raise ValueError(f"unknown rule {rule!r}")
        try:
            arg = int(arg_s)
            num, den = map(int, wd_s.split("/"))
            wd = Fraction(num, den)
            bd = int(bd_s)
        except (ValueError, ZeroDivisionError) as exc:
            raise ValueError(f"malformed step line {line!r}") from exc
        after = apply_edit(cur, rule, arg)
        pos = None if rule == DELETE_VICTIM_SYMBOL else arg
        symbol = arg if rule == DELETE_VICTIM_SYMBOL else (
            cur.symbols[arg - 1] if rule != COLLAPSE_BLANKS else None
        )
        steps.append(ReductionStep(rule, pos, symbol, cur, after, wd, bd))
        cur = after
    final = parse_seq(lines[-1], k)
    if final != cur:
        raise ValueError("final line does not match the replayed steps")
    return ReductionCertificate(initial, tuple(steps), final)


def permissible_words(k: int, max_len: int):
    """Yield all permissible symbol tuples of length 1..max_len.

    Depth-first, extending by symbols in the order B < 1 < ... < k, so a word
    precedes its extensions and siblings appear lexicographically.
    """

    def extend(prefix: tuple[int, ...]):
        last = prefix[-1] if prefix else BLANK
        for sym in range(k + 1):
            if last != BLANK and sym != BLANK and sym < last:
                continue
            word = prefix + (sym,)
            yield word
            if len(word) < max_len:
                yield from extend(word)

    yield from extend(())


@dataclass(frozen=True)
class ExhaustiveReport:
    k: int
    max_len: int
    checked: int
    by_length: dict[int, int]
    counterexamples: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.counterexamples


def _verify_words(k: int, words) -> tuple[int, dict[int, int], list[str]]:
    checked = 0
    by_length: dict[int, int] = {}
    bad: list[str] = []
    for word in words:
        checked += 1
        by_length[len(word)] = by_length.get(len(word), 0) + 1
        s = Seq(k, word)
        rep = total_weight(s)
        if rep.total > rep.blanks:
            bad.append(s.text())
            continue
        cert = reduce_certificate(s)
        if not check_certificate(cert):
            bad.append(s.text())
    return checked, by_length, bad


def _verify_prefix(args: tuple[int, int, tuple[int, ...]]):
    k, max_len, prefix = args

    def walk(word):
        yield word
        if len(word) < max_len:
            last = word[-1]
            for sym in range(k + 1):
                if last != BLANK and sym != BLANK and sym < last:
                    continue
                yield from walk(word + (sym,))

    return _verify_words(k, walk(prefix))


def verify_lemma_exhaustive(k: int, max_len: int, jobs: int = 1) -> ExhaustiveReport:
    """Check the inequality and certificate round-trip on every permissible word.

    Words of length 1..max_len over {B, 1..k}.  Raises when the raw word
    count (k+1)^max_len exceeds the enumeration budget.  ``jobs`` > 1
    partitions the search by first symbol across processes.
    """
    if k < 1 or max_len < 1:
        raise ValueError("need k >= 1 and max_len >= 1")
    if (k + 1) ** max_len > ENUMERATION_BUDGET:
        raise ValueError(
            f"(k+1)^max_len = {(k + 1) ** max_len} exceeds budget {ENUMERATION_BUDGET}"
        )
    if jobs > 1:
        from concurrent.futures import ProcessPoolExecutor

        tasks = [(k, max_len, (first,)) for first in range(k + 1)]
        checked = 0
        by_length: dict[int, int] = {}
        bad: list[str] = []
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            for c, bl, cx in pool.map(_verify_prefix, tasks):
                checked += c
                for length, cnt in bl.items():
                    by_length[length] = by_length.get(length, 0) + cnt
                bad.extend(cx)
        bad.sort()
    else:
        checked, by_length, bad = _verify_words(k, permissible_words(k, max_len))
    return ExhaustiveReport(k, max_len, checked, dict(sorted(by_length.items())), tuple(bad))
