"""Command-line front end.

Subcommands: weights, reduce, verify-lemma, bound, maxp, taylor, simulate,
check-trace, stats, lp-build, lp-scan.  Exit codes: 0 success/verified/
feasible, 1 violation/counterexample/infeasible, 2 usage or domain error.
Identical invocations (same flags and seed) produce byte-identical output;
JSON and CSV reports embed the tool version, the seed, and the full flag set.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
from fractions import Fraction

from . import __version__, bounds, lemma, lp, policies, sequences, stats, traces
from .reporting import frac_text, jsonable, render_csv, render_json, sig12

POLICIES = ("trivial-k1", "round-robin", "independent", "walkers", "walkers-looped", "waves")

# capped listings keep reports on huge traces readable and deterministic
MAX_LISTED_VIOLATIONS = 100


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="avoidance",
        description="Verification, simulation, and bounds for avoidance couplings.",
    )
    parser.add_argument("--version", action="version", version=f"avoidance {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, help_, **kwargs):
        sp = sub.add_parser(name, help=help_, **kwargs)
        sp.add_argument("--format", choices=("json", "csv", "text"), default="text")
        sp.add_argument("--out", default=None, help="output path (default stdout)")
        return sp

    sp = add("weights", "neighbor-pair weights of a sequence")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--in", dest="infile", default="-", help="sequence file, - for stdin")

    sp = add("reduce", "reduction certificate for a sequence")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--in", dest="infile", default="-")

    sp = add("verify-lemma", "exhaustively check total weight <= blanks")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--max-len", type=int, required=True)
    sp.add_argument("--jobs", type=int, default=os.cpu_count() or 1)

    sp = add("bound", "walker-count bound ceil(n - ln n)")
    sp.add_argument("--n", type=int, required=True)

    sp = add("maxp", "largest p consistent with k walkers")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--tol", type=float, default=bounds.DEFAULT_TOL)

    sp = add("taylor", "partial sum of p^2 (1-p)^b / b, b = 1..T")
    sp.add_argument("--p", type=float, required=True)
    sp.add_argument("--T", type=int, required=True, help="number of series terms")

    sp = add("simulate", "generate a trace with a named policy")
    sp.add_argument("policy", choices=POLICIES)
    sp.add_argument("--T", type=int, required=True)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--k", type=int, default=1)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--p", type=float, default=None)

    sp = add("check-trace", "avoidance checks for a trace file")
    sp.add_argument("--in", dest="infile", default="-")

    sp = add("stats", "empirical statistics and faithfulness tests of a binary trace")
    sp.add_argument("--in", dest="infile", default="-")
    sp.add_argument("--p", type=float, required=True)

    sp = add("lp-build", "build the window LP and export it as MPS")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--p", type=str, required=True, help="rational, e.g. 0.3 or 1/8")
    sp.add_argument("--m", type=int, required=True)

    sp = add("lp-scan", "window-LP feasibility over a grid of p values")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--m", type=int, required=True)
    sp.add_argument("--grid", type=str, required=True, help="comma-separated p values")
    sp.add_argument("--tol", type=float, default=1e-9)

    return parser


def _meta(ns: argparse.Namespace) -> dict:
    args = {
        k: v
        for k, v in sorted(vars(ns).items())
        if k not in ("command",) and v is not None
    }
    return {
        "tool": "avoidance",
        "version": __version__,
        "command": ns.command,
        "seed": getattr(ns, "seed", None),
        "args": args,
    }


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(ns: argparse.Namespace, text: str) -> None:
    if ns.out is None:
        sys.stdout.write(text)
    else:
        with open(ns.out, "w") as fh:
            fh.write(text)


def _emit(ns, body: dict, text_lines: list[str], csv_rows=None, csv_columns=None) -> None:
    if ns.format == "json":
        _write(ns, render_json({**_meta(ns), **body}))
    elif ns.format == "csv":
        if csv_rows is None:
            csv_columns = ["key", "value"]
            csv_rows = [{"key": k, "value": v} for k, v in _flatten(body)]
        _write(ns, render_csv(_meta(ns), csv_columns, csv_rows))
    else:
        _write(ns, "\n".join(text_lines) + "\n")


def _flatten(body: dict, prefix: str = ""):
    for k, v in body.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _flatten(v, key + ".")
        elif isinstance(v, (list, tuple)):
            yield key, " ".join(str(jsonable(x)) for x in v)
        else:
            yield key, jsonable(v)


def cmd_weights(ns) -> int:
    seq = sequences.parse_seq(_read_text(ns.infile), ns.k)
    rep = sequences.total_weight(seq)
    body = {
        "k": seq.k,
        "T": seq.T,
        "permissible": sequences.is_permissible(seq),
        "total": rep.total,
        "blanks": rep.blanks,
        "output": {str(i): w for i, w in sorted(rep.per_symbol_output.items())},
        "pairs": [
            {"symbol": p.symbol, "t1": p.t1, "t2": p.t2, "b": p.b, "weight": p.weight}
            for p in rep.pairs
        ],
    }
    lines = [f"total {frac_text(rep.total)}", f"blanks {rep.blanks}"]
    lines += [f"output {i} {frac_text(w)}" for i, w in sorted(rep.per_symbol_output.items())]
    lines += [
        f"pair {p.symbol} {p.t1} {p.t2} b={p.b} w={frac_text(p.weight)}" for p in rep.pairs
    ]
    _emit(ns, body, lines)
    return 0


def cmd_reduce(ns) -> int:
    seq = sequences.parse_seq(_read_text(ns.infile), ns.k)
    cert = lemma.reduce_certificate(seq)
    check = lemma.check_certificate(cert)
    cert_text = lemma.certificate_to_text(cert)
    if ns.format == "json":
        rep = sequences.total_weight(seq)
        body = {
            "steps": len(cert.steps),
            "total": rep.total,
            "blanks": rep.blanks,
            "verified": check.ok,
            "certificate": cert_text.splitlines(),
        }
        _write(ns, render_json({**_meta(ns), **body}))
    else:
        _write(ns, cert_text)
    return 0 if check.ok else 1


def cmd_verify_lemma(ns) -> int:
    report = lemma.verify_lemma_exhaustive(ns.k, ns.max_len, jobs=ns.jobs)
    body = {
        "k": report.k,
        "max_len": report.max_len,
        "checked": report.checked,
        "by_length": {str(l): c for l, c in report.by_length.items()},
        "counterexamples": list(report.counterexamples),
        "ok": report.ok,
    }
    lines = [f"checked {report.checked}", f"counterexamples {len(report.counterexamples)}"]
    lines += [f"counterexample {text}" for text in report.counterexamples]
    rows = [{"length": l, "count": c} for l, c in report.by_length.items()]
    _emit(ns, body, lines, csv_rows=rows, csv_columns=["length", "count"])
    return 0 if report.ok else 1


def cmd_bound(ns) -> int:
    wb = bounds.max_walkers(ns.n)
    body = {
        "n": wb.n,
        "value": wb.value,
        "raw": wb.raw,
        "intermediate": wb.intermediate,
        "ambiguous": wb.ambiguous,
    }
    _emit(ns, body, [str(wb.value)])
    return 0


def cmd_maxp(ns) -> int:
    p_star = bounds.max_p(ns.k, ns.tol)
    residual = abs(bounds.feasible_pressure(p_star) - 1.0 / ns.k) if ns.k >= 1 else None
    body = {"k": ns.k, "value": p_star, "residual": residual, "tol": ns.tol}
    _emit(ns, body, [repr(p_star)])
    return 0


def cmd_taylor(ns) -> int:
    value = bounds.taylor_partial(ns.p, ns.T)
    limit = -ns.p * ns.p * math.log(ns.p)
    body = {"p": ns.p, "terms": ns.T, "value": value, "limit": limit, "gap": limit - value}
    _emit(ns, body, [repr(value)])
    return 0


def _make_policy(ns):
    name = ns.policy
    if name == "trivial-k1":
        if ns.p is None:
            raise ValueError("trivial-k1 requires --p")
        return policies.trivial_k1(ns.p)
    if name == "round-robin":
        return policies.round_robin(ns.k)
    if name == "independent":
        if ns.p is None:
            raise ValueError("independent requires --p")
        return policies.independent(ns.k, ns.p)
    if ns.n is None:
        raise ValueError(f"{name} requires --n")
    if name == "walkers":
        return policies.avoiding_walkers(ns.n, ns.k, looped=False)
    if name == "walkers-looped":
        return policies.avoiding_walkers(ns.n, ns.k, looped=True)
    if name == "waves":
        return policies.staying_in_waves(policies.avoiding_walkers(ns.n, ns.k, looped=False), ns.n)
    raise ValueError(f"unknown policy {name!r}")


def cmd_simulate(ns) -> int:
    trace = policies.simulate(_make_policy(ns), ns.T, ns.seed)
    _write(ns, traces.write_trace(trace))
    return 0


def cmd_check_trace(ns) -> int:
    if ns.infile == "-":
        trace = traces.read_trace(sys.stdin)
    else:
        trace = traces.read_trace(ns.infile)
    if isinstance(trace, traces.WalkerTrace):
        report = traces.check_walker_avoidance(trace)
        kind = "walker"
    else:
        report = traces.check_1avoidance(trace)
        kind = "binary"
    counts = {}
    for v in report.violations:
        counts[v.kind] = counts.get(v.kind, 0) + 1
    listed = report.violations[:MAX_LISTED_VIOLATIONS]
    body = {
        "trace": kind,
        "rounds": report.rounds,
        "ok": report.ok,
        "violation_count": len(report.violations),
        "counts": {k: counts[k] for k in sorted(counts)},
        "violations": [
            {"kind": v.kind, "t": v.t, "i": v.i, "j": v.j} for v in listed
        ],
        "listed": len(listed),
    }
    if report.ok:
        lines = ["OK"]
    else:
        lines = [f"violations {len(report.violations)}"]
        lines += [f"{v.kind} t={v.t} i={v.i} j={v.j}" for v in listed]
        if len(report.violations) > len(listed):
            lines.append(f"... {len(report.violations) - len(listed)} more")
    _emit(ns, body, lines)
    return 0 if report.ok else 1


def cmd_stats(ns) -> int:
    if ns.infile == "-":
        trace = traces.read_trace(sys.stdin)
    else:
        trace = traces.read_trace(ns.infile)
    if not isinstance(trace, traces.CouplingTrace):
        raise ValueError("stats expects a binary occupancy trace")
    report = stats.faithfulness_tests(trace, ns.p)
    body = {"T": trace.T, "k": trace.k, "p": ns.p, "faithful": report.passed}
    lines = [f"T {trace.T}", f"k {trace.k}", f"faithful {str(report.passed).lower()}"]
    try:
        seq = traces.encode(trace)
    except ValueError:
        seq = None
        body["encodable"] = False
        lines.append("encodable false")
    if seq is not None:
        est = stats.empirical_stats(seq, ns.p)
        body.update(
            {
                "encodable": True,
                "blanks": est.blanks,
                "blank_rate": est.blank_rate,
                "occupancy_rate": est.occupancy_rate,
                "weight_rate_total": est.weight_rate_total,
                "weight_rate": {str(i): w for i, w in sorted(est.weight_rate.items())},
                "gap_histogram": {
                    str(i): {str(g): c for g, c in h.items()}
                    for i, h in sorted(est.gap_histogram.items())
                },
            }
        )
        lines += [
            f"blanks {est.blanks}",
            f"blank_rate {sig12(float(est.blank_rate))}",
            f"occupancy_rate {sig12(float(est.occupancy_rate))}",
            f"weight_rate_total {frac_text(est.weight_rate_total)}",
        ]
        lines += [
            f"weight_rate {i} {frac_text(w)}" for i, w in sorted(est.weight_rate.items())
        ]
    body["tests"] = [
        {
            "name": o.name,
            "walker": o.walker,
            "statistic": o.statistic,
            "threshold": o.threshold,
            "passed": o.passed,
        }
        for o in report.outcomes
    ]
    lines += [
        f"test {o.name} walker={o.walker} stat={sig12(o.statistic)} "
        f"threshold={sig12(o.threshold)} {'pass' if o.passed else 'FAIL'}"
        for o in report.outcomes
    ]
    _emit(ns, body, lines)
    return 0 if report.passed else 1


def cmd_lp_build(ns) -> int:
    inst = lp.build_window_lp(ns.k, ns.p, ns.m)
    mps = lp.write_mps(inst)
    if ns.format == "json":
        body = {
            "k": inst.k,
            "p": inst.p,
            "m": inst.m,
            "variables": inst.num_vars,
            "rows": inst.num_rows,
            "support_zeros": len(inst.zero_vars),
            "mps": mps.splitlines(),
        }
        _write(ns, render_json({**_meta(ns), **body}))
    else:
        _write(ns, mps)
    return 0


def cmd_lp_scan(ns) -> int:
    grid = [Fraction(tok) for tok in ns.grid.split(",") if tok.strip()]
    if not grid:
        raise ValueError("empty grid")
    report = lp.scan_p(ns.k, ns.m, grid, tol=ns.tol)
    rows = [
        {
            "p": e.p,
            "status": e.status,
            "gap": e.gap,
            "residual": e.residual,
            "analytic_maxp_verdict": e.within_max_p,
            "trivial_verdict": e.within_trivial,
        }
        for e in report.entries
    ]
    body = {
        "k": report.k,
        "m": report.m,
        "tol": report.tol,
        "entries": [
            {**row, "p": frac_text(e.p)} for row, e in zip(rows, report.entries)
        ],
    }
    lines = [
        f"p={frac_text(e.p)} status={e.status}"
        + (f" gap={sig12(e.gap)}" if e.gap is not None else "")
        + f" within_maxp={str(e.within_max_p).lower()}"
        for e in report.entries
    ]
    _emit(
        ns,
        body,
        lines,
        csv_rows=rows,
        csv_columns=[
            "p",
            "status",
            "gap",
            "residual",
            "analytic_maxp_verdict",
            "trivial_verdict",
        ],
    )
    return 1 if report.any_infeasible else 0


HANDLERS = {
    "weights": cmd_weights,
    "reduce": cmd_reduce,
    "verify-lemma": cmd_verify_lemma,
    "bound": cmd_bound,
    "maxp": cmd_maxp,
    "taylor": cmd_taylor,
    "simulate": cmd_simulate,
    "check-trace": cmd_check_trace,
    "stats": cmd_stats,
    "lp-build": cmd_lp_build,
    "lp-scan": cmd_lp_scan,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return HANDLERS[ns.command](ns)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
