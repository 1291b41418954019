"""Time-indexed RCPSP: instances, completion-time windows, model builder,
and a PSPLIB single-mode (.sm) parser.

Decision variable x_{j,t} = 1 iff activity j completes at time t.  An
activity with duration d completing at t occupies time units t-d+1 .. t,
so its start time is t-d+1.  The first activity is the dummy source and the
last the dummy sink, both with duration 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import CycleError, FormatError, ModelError, UnschedulableActivityError
from .model import (
    Assignment,
    ConstraintTag,
    Integrality,
    LinearExpr,
    MilpModel,
    Relation,
    Sense,
    TagKind,
    TaggedConstraint,
    Variable,
)

VAR_PREFIX = "x"


@dataclass(frozen=True)
class Activity:
    id: int
    duration: int
    demands: tuple[int, ...]


@dataclass(frozen=True)
class RcpspInstance:
    """Activities in canonical order: activities[0] is the dummy source,
    activities[-1] the dummy sink."""

    name: str
    activities: tuple[Activity, ...]
    precedence: tuple[tuple[int, int], ...]  # (predecessor, successor)
    capacities: tuple[int, ...]
    horizon: int

    def __post_init__(self):
        if len(self.activities) < 2:
            raise ModelError("instance needs at least dummy source and sink")
        ids = [a.id for a in self.activities]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate activity ids")
        known = set(ids)
        for a in self.activities:
            if a.duration < 0:
                raise ModelError(f"activity {a.id} has negative duration")
            if len(a.demands) != len(self.capacities):
                raise ModelError(f"activity {a.id} demand vector length mismatch")
        for d in (self.activities[0], self.activities[-1]):
            if d.duration != 0:
                raise ModelError(f"dummy activity {d.id} must have duration 0")
        for h, j in self.precedence:
            if h not in known or j not in known:
                raise ModelError(f"precedence ({h}, {j}) references unknown activity")
        if self.horizon < 1:
            raise ModelError("horizon must be positive")

    @property
    def source(self) -> Activity:
        return self.activities[0]

    @property
    def sink(self) -> Activity:
        return self.activities[-1]

    def activity(self, j: int) -> Activity:
        for a in self.activities:
            if a.id == j:
                return a
        raise ModelError(f"unknown activity {j}")

    def real_activities(self) -> tuple[Activity, ...]:
        return self.activities[1:-1]

    def predecessors(self, j: int) -> tuple[int, ...]:
        return tuple(h for h, s in self.precedence if s == j)


def default_horizon(durations) -> int:
    """Sum of durations: always long enough for a serial schedule."""
    return max(1, sum(durations))


@dataclass(frozen=True)
class TimeWindows:
    ef: dict[int, int]
    lf: dict[int, int]


def _topological_order(inst: RcpspInstance) -> list[int]:
    ids = [a.id for a in inst.activities]
    indeg = {j: 0 for j in ids}
    succs: dict[int, list[int]] = {j: [] for j in ids}
    for h, j in inst.precedence:
        indeg[j] += 1
        succs[h].append(j)
    queue = [j for j in ids if indeg[j] == 0]
    order: list[int] = []
    while queue:
        j = queue.pop(0)
        order.append(j)
        for s in succs[j]:
            indeg[s] -= 1
            if indeg[s] == 0:
                queue.append(s)
    if len(order) != len(ids):
        raise CycleError(f"precedence relation of {inst.name!r} contains a cycle")
    return order


def compute_time_windows(inst: RcpspInstance) -> TimeWindows:
    """Earliest/latest finish per activity by forward/backward critical-path
    passes.  Raises UnschedulableActivityError when a window comes out empty."""
    order = _topological_order(inst)
    duration = {a.id: a.duration for a in inst.activities}
    preds: dict[int, list[int]] = {a.id: [] for a in inst.activities}
    succs: dict[int, list[int]] = {a.id: [] for a in inst.activities}
    for h, j in inst.precedence:
        preds[j].append(h)
        succs[h].append(j)

    ef: dict[int, int] = {}
    for j in order:
        base = max((ef[h] for h in preds[j]), default=0)
        ef[j] = base + duration[j]
    lf: dict[int, int] = {}
    for j in reversed(order):
        lf[j] = min((lf[s] - duration[s] for s in succs[j]), default=inst.horizon)
    for j in ef:
        if ef[j] > lf[j]:
            raise UnschedulableActivityError(
                f"activity {j}: empty completion window [{ef[j]}, {lf[j]}]"
            )
    return TimeWindows(ef, lf)


@dataclass(frozen=True)
class RcpspContext:
    """Built model plus the (activity, time) <-> variable index."""

    instance: RcpspInstance
    windows: TimeWindows
    model: MilpModel
    var_of: dict[tuple[int, int], int] = field(repr=False)
    family: str = "rcpsp"

    def completion_of(self, assignment: Assignment, j: int, tol: float = 1e-6) -> int:
        for t in range(self.windows.ef[j], self.windows.lf[j] + 1):
            if assignment[self.var_of[(j, t)]] > 1 - tol:
                return t
        raise ModelError(f"assignment completes activity {j} nowhere")

    def decode_completions(self, assignment: Assignment) -> dict[int, int]:
        return {a.id: self.completion_of(assignment, a.id) for a in self.instance.activities}


def build_rcpsp_context(inst: RcpspInstance, tw: TimeWindows | None = None) -> RcpspContext:
    tw = tw if tw is not None else compute_time_windows(inst)
    for j in (a.id for a in inst.activities):
        if tw.ef[j] > tw.lf[j]:
            raise UnschedulableActivityError(
                f"activity {j}: empty completion window [{tw.ef[j]}, {tw.lf[j]}]"
            )

    variables: list[Variable] = []
    var_of: dict[tuple[int, int], int] = {}
    for a in inst.activities:
        for t in range(tw.ef[a.id], tw.lf[a.id] + 1):
            var_of[(a.id, t)] = len(variables)
            variables.append(
                Variable(len(variables), f"{VAR_PREFIX}_{a.id}_{t}", 0.0, 1.0, Integrality.BINARY)
            )

    def window(j: int):
        return range(tw.ef[j], tw.lf[j] + 1)

    constraints: list[TaggedConstraint] = []
    for a in inst.activities:
        constraints.append(
            TaggedConstraint(
                f"comp_{a.id}",
                LinearExpr.from_terms((var_of[(a.id, t)], 1.0) for t in window(a.id)),
                Relation.EQ,
                1.0,
                ConstraintTag.make(TagKind.COMPLETION, j=a.id),
            )
        )
    durations = {a.id: a.duration for a in inst.activities}
    for h, j in inst.precedence:
        terms = [(var_of[(j, t)], float(t)) for t in window(j)]
        terms += [(var_of[(h, t)], -float(t)) for t in window(h)]
        constraints.append(
            TaggedConstraint(
                f"prec_{j}_{h}",
                LinearExpr.from_terms(terms),
                Relation.GE,
                float(durations[j]),
                ConstraintTag.make(TagKind.PRECEDENCE, j=j, h=h),
            )
        )
    for r_idx, cap in enumerate(inst.capacities):
        rid = r_idx + 1
        for t in range(1, inst.horizon + 1):
            terms = []
            for a in inst.real_activities():
                use = a.demands[r_idx]
                if use <= 0 or a.duration <= 0:
                    continue
                # a completing at t' is in progress at t iff t <= t' <= t+d-1
                t_lo = max(tw.ef[a.id], t)
                t_hi = min(tw.lf[a.id], t + a.duration - 1)
                terms.extend((var_of[(a.id, tp)], float(use)) for tp in range(t_lo, t_hi + 1))
            if terms:
                constraints.append(
                    TaggedConstraint(
                        f"res_{rid}_{t}",
                        LinearExpr.from_terms(terms),
                        Relation.LE,
                        float(cap),
                        ConstraintTag.make(TagKind.RESOURCE, r=rid, t=t),
                    )
                )

    sink = inst.sink.id
    objective = LinearExpr.from_terms((var_of[(sink, t)], float(t)) for t in window(sink))
    model = MilpModel(tuple(variables), tuple(constraints), objective, Sense.MINIMIZE)
    return RcpspContext(inst, tw, model, var_of)


def build_rcpsp_milp(inst: RcpspInstance, tw: TimeWindows | None = None) -> MilpModel:
    return build_rcpsp_context(inst, tw).model


def start_time(activity: Activity, completion: int) -> int:
    return completion - activity.duration + 1 if activity.duration > 0 else completion


def schedule_is_feasible(inst: RcpspInstance, completions: dict[int, int]) -> bool:
    """Independent simulation of a completion-time schedule: checks presence,
    horizon, precedence, and per-time-unit resource usage."""
    for a in inst.activities:
        if a.id not in completions:
            return False
        t = completions[a.id]
        if t < a.duration or t > inst.horizon:
            return False
    for h, j in inst.precedence:
        d_j = inst.activity(j).duration
        if completions[j] - d_j < completions[h]:
            return False
    for u in range(1, inst.horizon + 1):
        usage = [0] * len(inst.capacities)
        for a in inst.real_activities():
            if a.duration <= 0:
                continue
            t = completions[a.id]
            if t - a.duration + 1 <= u <= t:
                for r, need in enumerate(a.demands):
                    usage[r] += need
        if any(usage[r] > cap for r, cap in enumerate(inst.capacities)):
            return False
    return True


# ---------------------------------------------------------------------------
# PSPLIB single-mode (.sm) parser
# ---------------------------------------------------------------------------


def parse_psplib(text: str, name: str = "psplib") -> RcpspInstance:
    """Parse a PSPLIB single-mode instance.  Dummy source/sink are preserved.

    Raises FormatError with the line number and section on malformed input.
    """
    lines = text.splitlines()
    njobs: int | None = None
    horizon: int | None = None
    successors: dict[int, list[int]] = {}
    durations: dict[int, int] = {}
    demands: dict[int, tuple[int, ...]] = {}
    capacities: tuple[int, ...] | None = None

    i = 0
    n = len(lines)

    def fail(msg: str, section: str, lineno: int | None = None):
        raise FormatError(msg, lineno if lineno is not None else i + 1, section)

    while i < n:
        line = lines[i]
        low = line.lower()
        if "jobs (incl." in low:
            try:
                njobs = int(line.split(":")[1].strip())
            except (IndexError, ValueError):
                fail("cannot read job count", "jobs")
        elif low.startswith("horizon"):
            try:
                horizon = int(line.split(":")[1].strip())
            except (IndexError, ValueError):
                fail("cannot read horizon", "horizon")
        elif "precedence relations" in low:
            if njobs is None:
                fail("PRECEDENCE RELATIONS before job count", "precedence relations")
            i += 1  # column header line
            read = 0
            while read < njobs:
                i += 1
                if i >= n:
                    fail("file ends inside precedence table", "precedence relations", i)
                parts = lines[i].split()
                if len(parts) < 3:
                    fail("short precedence row", "precedence relations")
                try:
                    jobnr, nsucc = int(parts[0]), int(parts[2])
                    succs = [int(p) for p in parts[3 : 3 + nsucc]]
                except ValueError:
                    fail("non-integer in precedence row", "precedence relations")
                if len(succs) != nsucc:
                    fail(f"expected {nsucc} successors", "precedence relations")
                successors[jobnr] = succs
                read += 1
        elif "requests/durations" in low:
            if njobs is None:
                fail("REQUESTS/DURATIONS before job count", "requests/durations")
            i += 1  # column header line
            read = 0
            while read < njobs:
                i += 1
                if i >= n:
                    fail("file ends inside durations table", "requests/durations", i)
                if set(lines[i].strip()) <= {"-"}:
                    continue  # separator rule
                parts = lines[i].split()
                if len(parts) < 3:
                    fail("short durations row", "requests/durations")
                try:
                    jobnr, dur = int(parts[0]), int(parts[2])
                    reqs = tuple(int(p) for p in parts[3:])
                except ValueError:
                    fail("non-integer in durations row", "requests/durations")
                durations[jobnr] = dur
                demands[jobnr] = reqs
                read += 1
        elif "resourceavailabilities" in low:
            i += 1  # column header line
            i += 1
            if i >= n:
                fail("file ends before availability values", "resourceavailabilities", i)
            try:
                capacities = tuple(int(p) for p in lines[i].split())
            except ValueError:
                fail("non-integer availability", "resourceavailabilities")
        i += 1

    if njobs is None:
        raise FormatError("missing job count ('jobs (incl. ...)')", section="jobs")
    if not successors:
        raise FormatError("missing section", section="precedence relations")
    if not durations:
        raise FormatError("missing section", section="requests/durations")
    if capacities is None:
        raise FormatError("missing section", section="resourceavailabilities")
    missing = [j for j in range(1, njobs + 1) if j not in durations]
    if missing:
        raise FormatError(f"jobs {missing} lack durations", section="requests/durations")

    nres = len(capacities)
    activities = tuple(
        Activity(j, durations[j], (demands[j] + (0,) * nres)[:nres]) for j in range(1, njobs + 1)
    )
    precedence = tuple(
        (h, s) for h in range(1, njobs + 1) for s in successors.get(h, ())
    )
    if horizon is None:
        horizon = default_horizon(a.duration for a in activities)
    return RcpspInstance(name, activities, precedence, capacities, horizon)
