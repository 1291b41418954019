"""Benchmark harness: per-instance solve times, per-query IIS times,
overhead ratios, and IIS size comparisons between algorithms.

For every (instance, query kind, algorithm) triple the suite solves the main
problem once, auto-generates a query from the optimal solution (veto kinds
target assignments that did occur, enforce kinds target ones that did not),
runs the explanation pipeline, and records timings.  Overhead is the ratio
of IIS-extraction time to main-solve time.  Structural fields (sizes,
outcomes, memberships) are deterministic across runs; timings are not and
are excluded from golden comparisons.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import time
from dataclasses import dataclass, field

import numpy as np

from .errors import ExmipError
from .fixtures import (
    chain_rcpsp,
    contention_rcpsp,
    diamond_rcpsp,
    running_example_rcpsp,
    toy_wdp,
)
from .generators import random_rcpsp
from .iis import verify_iis
from .queries import ExtendedCase, Query, explain
from .rcpsp import RcpspContext, build_rcpsp_context
from .solver import solve_milp, MilpStatus
from .wdp import WdpContext, build_wdp_context

DEFAULT_ALGORITHMS = ("deletion", "additive", "smallest")
RCPSP_BENCH_KINDS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q6", "Q7", "Q8")
WDP_BENCH_KINDS = ("W1", "W2", "W3", "W4")

CSV_COLUMNS = (
    "instance_id",
    "family",
    "distribution",
    "query_kind",
    "algorithm",
    "outcome",
    "t_milp",
    "t_iis",
    "overhead",
    "iis_size",
    "seed",
    "error",
)


@dataclass(frozen=True)
class BenchProblem:
    instance_id: str
    family: str
    distribution: str
    ctx: RcpspContext | WdpContext


@dataclass(frozen=True)
class BenchRecord:
    instance_id: str
    family: str
    distribution: str
    query_kind: str
    algorithm: str
    outcome: str
    t_milp: float
    t_iis: float | None
    overhead: float | None
    iis_size: int | None
    seed: int
    error: str = ""
    query: dict | None = field(default=None, compare=False)
    iis_ids: tuple[str, ...] | None = None
    iis_tags: tuple[str, ...] | None = None
    oracle_calls: int | None = None

    def csv_row(self) -> list:
        return [
            self.instance_id,
            self.family,
            self.distribution,
            self.query_kind,
            self.algorithm,
            self.outcome,
            f"{self.t_milp:.6f}",
            "" if self.t_iis is None else f"{self.t_iis:.6f}",
            "" if self.overhead is None else f"{self.overhead:.9f}",
            "" if self.iis_size is None else self.iis_size,
            self.seed,
            self.error,
        ]


class Ungeneratable(ExmipError):
    """The optimal solution offers no sensible target for this query kind."""


def _record_seed(suite_seed: int, instance_id: str, kind: str) -> int:
    digest = hashlib.sha256(f"{suite_seed}:{instance_id}:{kind}".encode()).digest()
    return int.from_bytes(digest[:4], "big")


def generate_query(problem: BenchProblem, solution, kind: str, rng: np.random.Generator) -> Query:
    """Sample a query of the given kind against the realized optimum."""
    if problem.family == "rcpsp":
        return _generate_rcpsp_query(problem.ctx, solution, kind, rng)
    return _generate_wdp_query(problem.ctx, solution, kind, rng)


def _choice(rng: np.random.Generator, seq):
    return seq[int(rng.integers(0, len(seq)))]


def _generate_rcpsp_query(
    ctx: RcpspContext, completions: dict[int, int], kind: str, rng: np.random.Generator
) -> Query:
    inst = ctx.instance
    tw = ctx.windows
    real = [a.id for a in inst.real_activities()]

    def window(j):
        return range(tw.ef[j], tw.lf[j] + 1)

    if kind == "Q1":  # veto a realized completion
        j = _choice(rng, real)
        return Query(kind="Q1", activity=j, time=completions[j])
    if kind == "Q2":  # enforce an unrealized completion
        cands = [j for j in real if tw.lf[j] > tw.ef[j]]
        if not cands:
            raise Ungeneratable("no activity has an alternative completion time")
        j = _choice(rng, cands)
        times = [t for t in window(j) if t != completions[j]]
        return Query(kind="Q2", activity=j, time=_choice(rng, times))
    if kind == "Q3":  # enforce completion before the realized time
        cands = [j for j in real if completions[j] > tw.ef[j]]
        if not cands:
            raise Ungeneratable("every activity already completes at its earliest finish")
        j = _choice(rng, cands)
        return Query(kind="Q3", activity=j, time=completions[j])
    if kind == "Q4":  # enforce completion after the realized time
        cands = [j for j in real if completions[j] < tw.lf[j]]
        if not cands:
            raise Ungeneratable("every activity already completes at its latest finish")
        j = _choice(rng, cands)
        return Query(kind="Q4", activity=j, time=completions[j])
    if kind in ("Q5", "Q5all"):  # veto a realized group completion
        by_time: dict[int, list[int]] = {}
        for j in real:
            by_time.setdefault(completions[j], []).append(j)
        shared = [(t, js) for t, js in sorted(by_time.items()) if len(js) >= 2]
        if shared:
            t, js = _choice(rng, shared)
            return Query(kind=kind, activities=tuple(js[:3]), time=t)
        j = _choice(rng, real)
        return Query(kind=kind, activities=(j,), time=completions[j])
    if kind == "Q6":  # enforce a group completion that did not occur
        pairs = []
        for i, j in ((a, b) for a in real for b in real if a < b):
            common = [
                t
                for t in window(i)
                if tw.ef[j] <= t <= tw.lf[j]
                and not (completions[i] == t and completions[j] == t)
            ]
            pairs.extend((i, j, t) for t in common)
        if not pairs:
            raise Ungeneratable("no joint completion time available for any pair")
        i, j, t = _choice(rng, pairs)
        return Query(kind="Q6", activities=(i, j), time=t)
    if kind == "Q7":  # move one activity to a different time
        cands = [j for j in real if tw.lf[j] > tw.ef[j]]
        if not cands:
            raise Ungeneratable("no activity has an alternative completion time")
        j = _choice(rng, cands)
        alts = [t for t in window(j) if t != completions[j]]
        return Query(kind="Q7", activity=j, time=completions[j], time_alt=_choice(rng, alts))
    if kind == "Q8":  # swap which activity completes at the realized time
        cands = []
        for j in real:
            t = completions[j]
            for other in real:
                if other != j and tw.ef[other] <= t <= tw.lf[other] and completions[other] != t:
                    cands.append((j, other, t))
        if not cands:
            raise Ungeneratable("no swap partner shares a window")
        j, other, t = _choice(rng, cands)
        return Query(kind="Q8", activity=j, activity_other=other, time=t)
    raise Ungeneratable(f"unknown scheduling query kind {kind!r}")


def _generate_wdp_query(
    ctx: WdpContext, selected: tuple[int, ...], kind: str, rng: np.random.Generator
) -> Query:
    all_bids = [b.id for b in ctx.instance.bids]
    losers = [b for b in all_bids if b not in selected]
    if kind == "W1":
        if not selected:
            raise Ungeneratable("no winning bid to veto")
        return Query(kind="W1", bid=_choice(rng, list(selected)))
    if kind == "W2":
        if not losers:
            raise Ungeneratable("every bid already wins")
        return Query(kind="W2", bid=_choice(rng, losers))
    if kind == "W3":
        if not selected:
            raise Ungeneratable("no winning bids to veto")
        group = list(selected)[:3]
        return Query(kind="W3", bids=tuple(group))
    if kind == "W4":
        if not selected or not losers:
            raise Ungeneratable("need one winner and one loser to swap")
        return Query(kind="W4", bid=_choice(rng, list(selected)), bid_other=_choice(rng, losers))
    raise Ungeneratable(f"unknown auction query kind {kind!r}")


def run_suite(
    problems,
    kinds: dict[str, tuple[str, ...]] | None = None,
    algorithms=DEFAULT_ALGORITHMS,
    time_limit: float | None = 120.0,
    seed: int = 0,
    verify: bool = False,
) -> list[BenchRecord]:
    """One record per (problem, applicable query kind, algorithm).

    Failures are captured per record and never abort the suite.
    """
    kinds = kinds or {"rcpsp": RCPSP_BENCH_KINDS, "wdp": WDP_BENCH_KINDS}
    records: list[BenchRecord] = []
    for problem in problems:
        t0 = time.monotonic()
        result = solve_milp(problem.ctx.model, time_limit=time_limit)
        t_milp = time.monotonic() - t0
        if result.status is not MilpStatus.OPTIMAL:
            for kind in kinds[problem.family]:
                for algo in algorithms:
                    records.append(
                        BenchRecord(
                            problem.instance_id, problem.family, problem.distribution,
                            kind, algo, "error", t_milp, None, None, None,
                            _record_seed(seed, problem.instance_id, kind),
                            error=f"main solve {result.status.value}",
                        )
                    )
            continue
        if problem.family == "rcpsp":
            solution = problem.ctx.decode_completions(result.assignment)
        else:
            solution = problem.ctx.decode_selection(result.assignment)

        for kind in kinds[problem.family]:
            record_seed = _record_seed(seed, problem.instance_id, kind)
            rng = np.random.default_rng(record_seed)
            try:
                query = generate_query(problem, solution, kind, rng)
            except Ungeneratable as exc:
                for algo in algorithms:
                    records.append(
                        BenchRecord(
                            problem.instance_id, problem.family, problem.distribution,
                            kind, algo, "skipped", t_milp, None, None, None,
                            record_seed, error=str(exc),
                        )
                    )
                continue
            for algo in algorithms:
                records.append(
                    _run_one(problem, result.objective, query, kind, algo,
                             t_milp, record_seed, time_limit, verify)
                )
    return records


def _run_one(problem, f_star, query, kind, algo, t_milp, record_seed, time_limit, verify):
    try:
        r = explain(problem.ctx, f_star, query, algorithm=algo, time_limit=time_limit)
    except ExmipError as exc:
        return BenchRecord(
            problem.instance_id, problem.family, problem.distribution,
            kind, algo, "error", t_milp, None, None, None, record_seed,
            error=f"{type(exc).__name__}: {exc}", query=query.to_json(),
        )
    if r.case is ExtendedCase.OPTIMALITY:
        return BenchRecord(
            problem.instance_id, problem.family, problem.distribution,
            kind, algo, r.case.value, t_milp, None, None, None, record_seed,
            query=query.to_json(),
        )
    error = ""
    if verify:
        audit = verify_iis(r.asp.model, r.iis.constraint_ids)
        if not audit.valid:
            error = f"iis-audit-failed: redundant={audit.redundant_ids}"
    tags = tuple(
        r.asp.model.constraint(cid).tag.kind.value for cid in r.iis.constraint_ids
    )
    overhead = r.t_iis / t_milp if t_milp > 0 and r.t_iis > 0 else None
    return BenchRecord(
        problem.instance_id, problem.family, problem.distribution,
        kind, algo, r.case.value, t_milp, r.t_iis, overhead, len(r.iis),
        record_seed, error=error, query=query.to_json(),
        iis_ids=r.iis.constraint_ids, iis_tags=tags,
        oracle_calls=r.iis.stats.oracle_calls,
    )


# ---------------------------------------------------------------------------
# Built-in corpus
# ---------------------------------------------------------------------------


def bundled_fixture(filename: str) -> str:
    """Text of a fixture file shipped inside the package."""
    from importlib import resources

    return resources.files("exmip").joinpath("data", filename).read_text(encoding="utf-8")


def builtin_corpus(seed: int = 0, include_running_example: bool = True) -> list[BenchProblem]:
    """Hand fixtures, seeded generated schedules, and the bundled CATS files."""
    from .wdp import parse_cats

    problems: list[BenchProblem] = []
    hand = [chain_rcpsp(), diamond_rcpsp(), contention_rcpsp()]
    if include_running_example:
        hand.append(running_example_rcpsp())
    for inst in hand:
        problems.append(BenchProblem(inst.name, "rcpsp", "hand", build_rcpsp_context(inst)))
    for k in range(3):
        inst = random_rcpsp(f"rand{k}", n_real=4 + k, n_resources=1 + (k % 2), seed=seed + k)
        problems.append(BenchProblem(inst.name, "rcpsp", "random", build_rcpsp_context(inst)))

    problems.append(BenchProblem("toy", "wdp", "hand", build_wdp_context(toy_wdp())))
    for dist in ("paths", "regions", "matching", "scheduling"):
        for k in range(2):
            name = f"{dist}{k}"
            inst = parse_cats(bundled_fixture(f"{name}.cats"), name=name, distribution=dist)
            problems.append(BenchProblem(name, "wdp", dist, build_wdp_context(inst)))
    return problems


# ---------------------------------------------------------------------------
# Reporting
# ---------------------------------------------------------------------------


def _quartiles(values) -> tuple[float, float, float]:
    q1, med, q3 = np.percentile(np.asarray(values, dtype=float), [25, 50, 75])
    return float(q1), float(med), float(q3)


def _summary_block(title: str, groups: dict[str, list[BenchRecord]]) -> list[str]:
    lines = [title, "-" * len(title)]
    header = f"{'group':<14}{'n':>4}  {'t_milp med':>11}  {'t_iis med [q1, q3]':>26}  {'overhead med':>13}"
    lines.append(header)
    ranked = sorted(
        groups.items(),
        key=lambda kv: float(np.mean([r.t_iis for r in kv[1] if r.t_iis is not None] or [0.0])),
    )
    for name, recs in ranked:
        t_milp = [r.t_milp for r in recs]
        t_iis = [r.t_iis for r in recs if r.t_iis is not None]
        over = [r.overhead for r in recs if r.overhead is not None]
        _, m_milp, _ = _quartiles(t_milp)
        if t_iis:
            q1, med, q3 = _quartiles(t_iis)
            iis_s = f"{med:.3f} [{q1:.3f}, {q3:.3f}]"
        else:
            iis_s = "-"
        if over:
            _, m_over, _ = _quartiles(over)
            over_s = f"{100 * m_over:.1f}%"
        else:
            over_s = "-"
        lines.append(f"{name:<14}{len(recs):>4}  {m_milp:>11.3f}  {iis_s:>26}  {over_s:>13}")
    lines.append("")
    return lines


def size_reduction_histogram(records) -> dict[int, int]:
    """Per (instance, kind): size(deletion) - size(smallest), counted."""
    sizes: dict[tuple[str, str, str], int] = {}
    for r in records:
        if r.iis_size is not None:
            sizes[(r.instance_id, r.query_kind, r.algorithm)] = r.iis_size
    hist: dict[int, int] = {}
    for (inst, kind, algo), size in sizes.items():
        if algo != "deletion":
            continue
        small = sizes.get((inst, kind, "smallest"))
        if small is None:
            continue
        delta = size - small
        hist[delta] = hist.get(delta, 0) + 1
    return dict(sorted(hist.items()))


def emit_report(records, out_dir: str | None = None) -> tuple[str, str]:
    """Render the CSV and a text summary; optionally write them to out_dir."""
    if not records:
        raise ValueError("no records to report")
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in records:
        writer.writerow(r.csv_row())
    csv_text = buf.getvalue()

    done = [r for r in records if not r.error and r.outcome != "skipped"]
    lines = [f"benchmark records: {len(records)} total, {len(done)} completed", ""]

    for family in ("rcpsp", "wdp"):
        fam = [r for r in done if r.family == family]
        if not fam:
            continue
        by_kind: dict[str, list[BenchRecord]] = {}
        for r in fam:
            by_kind.setdefault(r.query_kind, []).append(r)
        lines += _summary_block(f"{family}: by query kind (sorted by mean IIS time)", by_kind)
        if family == "wdp":
            by_dist: dict[str, list[BenchRecord]] = {}
            for r in fam:
                by_dist.setdefault(r.distribution, []).append(r)
            lines += _summary_block("wdp: by distribution", by_dist)

    hist = size_reduction_histogram(done)
    total = sum(hist.values())
    if total:
        lines.append("IIS size reduction (deletion size - smallest size)")
        lines.append("--------------------------------------------------")
        for delta, count in hist.items():
            lines.append(f"  reduction {delta}: {count} ({100 * count / total:.1f}%)")
        equal = hist.get(0, 0)
        lines.append(f"  equal-size share: {100 * equal / total:.1f}%")
        lines.append("")
    summary = "\n".join(lines)

    if out_dir is not None:
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "records.csv"), "w", encoding="utf-8") as fh:
            fh.write(csv_text)
        with open(os.path.join(out_dir, "summary.txt"), "w", encoding="utf-8") as fh:
            fh.write(summary)
    return csv_text, summary
