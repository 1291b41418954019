"""Contrastive queries: translation to constraints, the augmented
satisfiability problem, and the extended-problem trichotomy.

A query either *enforces* assignments the optimum left out or *vetoes*
assignments it made.  Its constraint encoding joins the main constraints and
a minimality bound (objective no worse than the proven optimum) to form a
pure satisfiability problem: if that system is infeasible, an IIS of it is
the raw material for the explanation; if it is feasible, the queried
alternative is itself optimal and the honest answer is a witness, not a
graph.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .errors import (
    InvalidQueryError,
    ModelError,
    SolveTimeout,
    TimeOutOfWindowError,
    UnknownEntityError,
)
from .iis import Iis, additive_method, deletion_filter, smallest_iis
from .model import (
    Assignment,
    ConstraintTag,
    LinearExpr,
    MilpModel,
    Relation,
    Sense,
    TagKind,
    TaggedConstraint,
)
from .rcpsp import RcpspContext
from .reasons import ReasonGraph, to_reason_graph
from .solver import MilpResult, MilpStatus, solve_milp
from .wdp import WdpContext

MINIMALITY_ID = "minimality"
CLASSIFY_TOL = 1e-6

RCPSP_KINDS = ("Q1", "Q2", "Q3", "Q4", "Q5", "Q5all", "Q6", "Q7", "Q8")
WDP_KINDS = ("W1", "W2", "W3", "W4")

ProblemContext = RcpspContext | WdpContext


class ExtendedCase(Enum):
    INFEASIBILITY = "infeasibility"
    OPTIMALITY = "optimality"
    SUBOPTIMALITY = "suboptimality"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class ExtendedOutcome:
    case: ExtendedCase
    extended_objective: float | None = None


@dataclass(frozen=True)
class Query:
    kind: str
    activity: int | None = None
    time: int | None = None
    time_alt: int | None = None
    activity_other: int | None = None
    activities: tuple[int, ...] | None = None
    bid: int | None = None
    bid_other: int | None = None
    bids: tuple[int, ...] | None = None

    @staticmethod
    def from_json(payload: Mapping) -> "Query":
        if not isinstance(payload, Mapping) or "kind" not in payload:
            raise InvalidQueryError("query payload must be an object with a 'kind' field")
        kind = payload["kind"]
        if kind not in RCPSP_KINDS + WDP_KINDS:
            raise InvalidQueryError(f"unknown query kind {kind!r}")
        known = {
            "kind", "activity", "time", "time_alt", "activity_other",
            "activities", "bid", "bid_other", "bids",
        }
        extra = set(payload) - known
        if extra:
            raise InvalidQueryError(f"unknown query fields {sorted(extra)}")

        def opt_int(name):
            value = payload.get(name)
            if value is None:
                return None
            if not isinstance(value, int) or isinstance(value, bool):
                raise InvalidQueryError(f"field {name!r} must be an integer")
            return value

        def opt_list(name):
            value = payload.get(name)
            if value is None:
                return None
            if not isinstance(value, (list, tuple)) or not value:
                raise InvalidQueryError(f"field {name!r} must be a nonempty list of integers")
            if any(not isinstance(v, int) or isinstance(v, bool) for v in value):
                raise InvalidQueryError(f"field {name!r} must contain only integers")
            if len(set(value)) != len(value):
                raise InvalidQueryError(f"field {name!r} must not repeat entries")
            return tuple(value)

        return Query(
            kind=kind,
            activity=opt_int("activity"),
            time=opt_int("time"),
            time_alt=opt_int("time_alt"),
            activity_other=opt_int("activity_other"),
            activities=opt_list("activities"),
            bid=opt_int("bid"),
            bid_other=opt_int("bid_other"),
            bids=opt_list("bids"),
        )

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind}
        for name in ("activity", "time", "time_alt", "activity_other", "bid", "bid_other"):
            value = getattr(self, name)
            if value is not None:
                out[name] = value
        for name in ("activities", "bids"):
            value = getattr(self, name)
            if value is not None:
                out[name] = list(value)
        return out


def _require(query: Query, *fields: str) -> list:
    values = []
    for f in fields:
        v = getattr(query, f)
        if v is None:
            raise InvalidQueryError(f"query {query.kind} requires field {f!r}")
        values.append(v)
    return values


def _query_tag(kind: str, role: str, **params) -> ConstraintTag:
    return ConstraintTag.make(TagKind.QUERY, q=kind, role=role, **params)


def _check_activity(ctx: RcpspContext, j: int) -> None:
    inst = ctx.instance
    known = {a.id for a in inst.activities}
    if j not in known:
        raise UnknownEntityError(f"unknown activity {j}")
    if j in (inst.source.id, inst.sink.id):
        raise UnknownEntityError(f"activity {j} is a dummy source/sink; not queryable")


def _check_time(ctx: RcpspContext, j: int, t: int) -> None:
    ef, lf = ctx.windows.ef[j], ctx.windows.lf[j]
    if not ef <= t <= lf:
        raise TimeOutOfWindowError(f"activity {j}: time {t} outside window [{ef}, {lf}]")


def _var(ctx: RcpspContext, j: int, t: int) -> int:
    return ctx.var_of[(j, t)]


def _sum_over(ctx: RcpspContext, j: int, t_lo: int, t_hi: int) -> LinearExpr:
    return LinearExpr.from_terms(
        (_var(ctx, j, t), 1.0) for t in range(t_lo, t_hi + 1)
    )


def _translate_rcpsp(query: Query, ctx: RcpspContext) -> list[TaggedConstraint]:
    kind = query.kind
    eq = Relation.EQ

    if kind in ("Q1", "Q2"):
        j, t = _require(query, "activity", "time")
        _check_activity(ctx, j)
        _check_time(ctx, j, t)
        expr = LinearExpr.from_terms([(_var(ctx, j, t), 1.0)])
        if kind == "Q1":
            return [TaggedConstraint("query", expr, eq, 0.0, _query_tag(kind, "veto_at", j=j, t=t))]
        return [TaggedConstraint("query", expr, eq, 1.0, _query_tag(kind, "enforce_at", j=j, t=t))]

    if kind == "Q3":
        j, t = _require(query, "activity", "time")
        _check_activity(ctx, j)
        _check_time(ctx, j, t)
        ef = ctx.windows.ef[j]
        if t - 1 < ef:
            raise TimeOutOfWindowError(
                f"activity {j} cannot complete before {t}: earliest finish is {ef}"
            )
        expr = _sum_over(ctx, j, ef, t - 1)
        return [TaggedConstraint("query", expr, eq, 1.0, _query_tag(kind, "enforce_before", j=j, t=t))]

    if kind == "Q4":
        j, t = _require(query, "activity", "time")
        _check_activity(ctx, j)
        _check_time(ctx, j, t)
        lf = ctx.windows.lf[j]
        if t + 1 > lf:
            raise TimeOutOfWindowError(
                f"activity {j} cannot complete after {t}: latest finish is {lf}"
            )
        expr = _sum_over(ctx, j, t + 1, lf)
        return [TaggedConstraint("query", expr, eq, 1.0, _query_tag(kind, "enforce_after", j=j, t=t))]

    if kind in ("Q5", "Q5all", "Q6"):
        (group, t) = _require(query, "activities", "time")
        for j in group:
            _check_activity(ctx, j)
            _check_time(ctx, j, t)
        expr = LinearExpr.from_terms((_var(ctx, j, t), 1.0) for j in group)
        js = ",".join(str(j) for j in group)
        if kind == "Q5":  # strict '< |A|' normalised to <= |A|-1
            tag = _query_tag(kind, "veto_group", js=js, t=t)
            return [TaggedConstraint("query", expr, Relation.LE, float(len(group) - 1), tag)]
        if kind == "Q5all":
            tag = _query_tag(kind, "veto_group_all", js=js, t=t)
            return [TaggedConstraint("query", expr, eq, 0.0, tag)]
        tag = _query_tag(kind, "enforce_group", js=js, t=t)
        return [TaggedConstraint("query", expr, eq, float(len(group)), tag)]

    if kind == "Q7":
        j, t, t_alt = _require(query, "activity", "time", "time_alt")
        _check_activity(ctx, j)
        _check_time(ctx, j, t)
        _check_time(ctx, j, t_alt)
        if t == t_alt:
            raise InvalidQueryError("Q7 needs two distinct times")
        enforce = LinearExpr.from_terms([(_var(ctx, j, t_alt), 1.0)])
        veto = LinearExpr.from_terms([(_var(ctx, j, t), 1.0)])
        return [
            TaggedConstraint("query_enforce", enforce, eq, 1.0, _query_tag(kind, "enforce_at", j=j, t=t_alt)),
            TaggedConstraint("query_veto", veto, eq, 0.0, _query_tag(kind, "veto_at", j=j, t=t)),
        ]

    if kind == "Q8":
        j, j_other, t = _require(query, "activity", "activity_other", "time")
        _check_activity(ctx, j)
        _check_activity(ctx, j_other)
        if j == j_other:
            raise InvalidQueryError("Q8 needs two distinct activities")
        _check_time(ctx, j, t)
        _check_time(ctx, j_other, t)
        enforce = LinearExpr.from_terms([(_var(ctx, j_other, t), 1.0)])
        veto = LinearExpr.from_terms([(_var(ctx, j, t), 1.0)])
        return [
            TaggedConstraint("query_enforce", enforce, eq, 1.0, _query_tag(kind, "enforce_at", j=j_other, t=t)),
            TaggedConstraint("query_veto", veto, eq, 0.0, _query_tag(kind, "veto_at", j=j, t=t)),
        ]

    raise InvalidQueryError(f"query kind {kind!r} does not apply to scheduling instances")


def _check_bid(ctx: WdpContext, b: int) -> None:
    if b not in ctx.var_of:
        raise UnknownEntityError(f"unknown bid {b}")


def _translate_wdp(query: Query, ctx: WdpContext) -> list[TaggedConstraint]:
    kind = query.kind
    eq = Relation.EQ

    if kind in ("W1", "W2"):
        (b,) = _require(query, "bid")
        _check_bid(ctx, b)
        expr = LinearExpr.from_terms([(ctx.var_of[b], 1.0)])
        if kind == "W1":
            return [TaggedConstraint("query", expr, eq, 0.0, _query_tag(kind, "veto_bid", b=b))]
        return [TaggedConstraint("query", expr, eq, 1.0, _query_tag(kind, "enforce_bid", b=b))]

    if kind == "W3":
        (group,) = _require(query, "bids")
        for b in group:
            _check_bid(ctx, b)
        expr = LinearExpr.from_terms((ctx.var_of[b], 1.0) for b in group)
        bs = ",".join(str(b) for b in group)
        tag = _query_tag(kind, "veto_bid_group", bs=bs)
        return [TaggedConstraint("query", expr, Relation.LE, float(len(group) - 1), tag)]

    if kind == "W4":
        b, b_other = _require(query, "bid", "bid_other")
        _check_bid(ctx, b)
        _check_bid(ctx, b_other)
        if b == b_other:
            raise InvalidQueryError("W4 needs two distinct bids")
        enforce = LinearExpr.from_terms([(ctx.var_of[b_other], 1.0)])
        veto = LinearExpr.from_terms([(ctx.var_of[b], 1.0)])
        return [
            TaggedConstraint("query_enforce", enforce, eq, 1.0, _query_tag(kind, "enforce_bid", b=b_other)),
            TaggedConstraint("query_veto", veto, eq, 0.0, _query_tag(kind, "veto_bid", b=b)),
        ]

    raise InvalidQueryError(f"query kind {kind!r} does not apply to auction instances")


def translate_query(query: Query, ctx: ProblemContext) -> list[TaggedConstraint]:
    """Encode a query as tagged constraints over the context's variables."""
    if isinstance(ctx, RcpspContext):
        if query.kind not in RCPSP_KINDS:
            raise InvalidQueryError(f"query kind {query.kind!r} does not apply to scheduling instances")
        return _translate_rcpsp(query, ctx)
    if query.kind not in WDP_KINDS:
        raise InvalidQueryError(f"query kind {query.kind!r} does not apply to auction instances")
    return _translate_wdp(query, ctx)


@dataclass(frozen=True)
class AspProblem:
    """Satisfiability system {minimality, C, C_Q} for a solved main problem."""

    model: MilpModel
    f_star: float
    main: MilpModel
    query: Query | None
    query_ids: tuple[str, ...]
    minimality_id: str = MINIMALITY_ID


def build_asp(main: MilpModel, f_star: float, cq, query: Query | None = None) -> AspProblem:
    """Assemble minimality + C + C_Q over the main problem's variables.

    The minimality bound is sense-aware: objective <= f* when minimising,
    >= f* when maximising.
    """
    if MINIMALITY_ID in main.constraint_ids():
        raise ModelError(f"main problem already uses constraint id {MINIMALITY_ID!r}")
    relation = Relation.LE if main.sense is Sense.MINIMIZE else Relation.GE
    minimality = TaggedConstraint(
        MINIMALITY_ID,
        main.objective,
        relation,
        float(f_star),
        ConstraintTag.make(TagKind.MINIMALITY, bound=float(f_star)),
    )
    cq = tuple(cq)
    model = MilpModel(
        variables=main.variables,
        constraints=(minimality,) + main.constraints + cq,
        objective=main.objective,
        sense=main.sense,
    )
    return AspProblem(model, float(f_star), main, query, tuple(c.id for c in cq))


def _solve_extended(
    main: MilpModel, f_star: float, cq, time_limit: float | None
) -> tuple[ExtendedOutcome, MilpResult]:
    extended = MilpModel(
        variables=main.variables,
        constraints=main.constraints + tuple(cq),
        objective=main.objective,
        sense=main.sense,
    )
    result = solve_milp(extended, time_limit=time_limit)
    if result.status is MilpStatus.TIMEOUT:
        return ExtendedOutcome(ExtendedCase.UNKNOWN), result
    if result.status is MilpStatus.INFEASIBLE:
        return ExtendedOutcome(ExtendedCase.INFEASIBILITY), result
    obj = result.objective
    worse = obj - f_star if main.sense is Sense.MINIMIZE else f_star - obj
    if worse < -CLASSIFY_TOL:
        raise ModelError(
            f"extended problem beat the declared optimum ({obj} vs {f_star}): "
            "f_star is not the optimum of the main problem"
        )
    if worse <= CLASSIFY_TOL:
        return ExtendedOutcome(ExtendedCase.OPTIMALITY, obj), result
    return ExtendedOutcome(ExtendedCase.SUBOPTIMALITY, obj), result


def classify_extended(
    main: MilpModel, f_star: float, cq, time_limit: float | None = None
) -> ExtendedOutcome:
    """Solve the extended problem (main constraints plus query constraints)
    and classify it as infeasible, equal-optimal, or strictly worse."""
    outcome, _ = _solve_extended(main, f_star, cq, time_limit)
    return outcome


@dataclass(frozen=True)
class AlternateOptimumNotice:
    """Returned when the queried alternative is itself optimal: there is no
    IIS to show, the honest answer is a witness solution."""

    witness: Assignment
    f_star: float
    message: str


_ALGORITHMS = {
    "deletion": deletion_filter,
    "additive": additive_method,
    "smallest": smallest_iis,
}


@dataclass(frozen=True)
class ExplainResult:
    case: ExtendedCase
    asp: AspProblem
    graph: ReasonGraph | None
    notice: AlternateOptimumNotice | None
    iis: Iis | None
    extended_objective: float | None
    t_iis: float


def explain(
    ctx: ProblemContext,
    f_star: float,
    query: Query | None,
    algorithm: str = "deletion",
    time_limit: float | None = None,
) -> ExplainResult:
    """Full pipeline: translate, classify, and either extract an IIS and its
    reason graph or hand back an alternate-optimum witness."""
    if algorithm not in _ALGORITHMS:
        raise InvalidQueryError(f"unknown IIS algorithm {algorithm!r}; pick one of {sorted(_ALGORITHMS)}")
    main = ctx.model
    cq = translate_query(query, ctx) if query is not None else []
    outcome, extended_result = _solve_extended(main, f_star, cq, time_limit)
    asp = build_asp(main, f_star, cq, query)

    if outcome.case is ExtendedCase.UNKNOWN:
        raise SolveTimeout("extended problem timed out", incumbent=extended_result.assignment)
    if outcome.case is ExtendedCase.OPTIMALITY:
        notice = AlternateOptimumNotice(
            witness=extended_result.assignment,
            f_star=f_star,
            message=(
                "The queried alternative is also optimal: a solution satisfying "
                f"the query reaches the same objective value {f_star:g}."
            ),
        )
        return ExplainResult(outcome.case, asp, None, notice, None, outcome.extended_objective, 0.0)

    t0 = time.monotonic()
    iis = _ALGORITHMS[algorithm](asp.model, oracle_budget=time_limit)
    t_iis = time.monotonic() - t0
    graph = to_reason_graph(iis, asp.model)
    return ExplainResult(outcome.case, asp, graph, None, iis, outcome.extended_objective, t_iis)
