"""Branch-and-bound MILP solver and the feasibility oracle built on it.

Depth-first search over LP relaxations, branching on the most fractional
integer variable (ties to the lowest id), incumbent pruning by LP bound.
Deterministic given the model: no randomisation, fixed traversal order.
No presolve and no cuts, which keeps the constraint set of every node
identical to the input model's - IIS extraction depends on that mapping.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace
from enum import Enum
from typing import IO

import numpy as np

from .errors import ModelError, UnboundedModelError
from .model import (
    Assignment,
    Integrality,
    LinearExpr,
    MilpModel,
    Sense,
    evaluate,
)
from .simplex import LpStatus, ModelArrays, solve_lp_raw

INT_TOL = 1e-6
_PRUNE_SLACK = 1e-9


class MilpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    TIMEOUT = "timeout"


class Feasibility(Enum):
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    UNKNOWN = "unknown"


@dataclass(frozen=True)
class SolveStats:
    nodes: int
    lp_solves: int
    wall_time: float


@dataclass(frozen=True)
class MilpResult:
    status: MilpStatus
    assignment: Assignment | None
    objective: float | None
    stats: SolveStats


@dataclass(frozen=True)
class FeasibilityResult:
    verdict: Feasibility
    witness: Assignment | None = None


def _round_integers(assignment: Assignment, integer_ids) -> Assignment:
    values = list(assignment.values)
    for vid in integer_ids:
        values[vid] = float(round(values[vid]))
    return Assignment(tuple(values))


def solve_milp(
    model: MilpModel,
    time_limit: float | None = None,
    trace: IO | None = None,
) -> MilpResult:
    """Solve to proven optimality, or report infeasibility / timeout.

    On timeout the result carries the best incumbent found so far (possibly
    none).  All integer variables must have finite bounds.
    """
    for v in model.variables:
        if v.integrality is not Integrality.CONTINUOUS and not (
            math.isfinite(v.lower) and math.isfinite(v.upper)
        ):
            raise ModelError(f"integer variable {v.name!r} must have finite bounds")

    t0 = time.monotonic()
    deadline = t0 + time_limit if time_limit is not None else None
    arrays = ModelArrays(model)
    int_ids = arrays.integer_ids
    sign = 1.0 if model.sense is Sense.MINIMIZE else -1.0

    best_x: np.ndarray | None = None
    best_val = math.inf  # in minimisation space
    nodes = 0
    lp_solves = 0
    stack: list[dict[int, tuple[float, float]]] = [{}]
    timed_out = False

    while stack:
        if deadline is not None and time.monotonic() > deadline:
            timed_out = True
            break
        node_bounds = stack.pop()
        nodes += 1
        status, x, obj, _ = solve_lp_raw(arrays, node_bounds)
        lp_solves += 1

        if status is LpStatus.INFEASIBLE:
            if trace:
                trace.write(f"node {nodes}: LP infeasible\n")
            continue
        if status is LpStatus.UNBOUNDED:
            raise UnboundedModelError("LP relaxation is unbounded")

        lp_bound = sign * obj
        if lp_bound >= best_val - _PRUNE_SLACK:
            if trace:
                trace.write(f"node {nodes}: pruned bound={obj:.6g}\n")
            continue

        branch_var = -1
        if int_ids.size:
            xi = x[int_ids]
            dist = np.abs(xi - np.rint(xi))
            worst = int(np.argmax(dist))  # first max: lowest id wins ties
            if dist[worst] > INT_TOL:
                branch_var = int(int_ids[worst])

        if branch_var < 0:
            rounded = x.copy()
            if int_ids.size:
                rounded[int_ids] = np.rint(rounded[int_ids])
            val = sign * float(arrays.obj_dense @ rounded + arrays.obj_const)
            if val < best_val - _PRUNE_SLACK:
                best_val = val
                best_x = rounded
                if trace:
                    trace.write(f"node {nodes}: incumbent obj={sign * val:.6g}\n")
            continue

        v = float(x[branch_var])
        lo_known, hi_known = node_bounds.get(branch_var, (-math.inf, math.inf))
        down = dict(node_bounds)
        down[branch_var] = (lo_known, min(hi_known, math.floor(v)))
        up = dict(node_bounds)
        up[branch_var] = (max(lo_known, math.ceil(v)), hi_known)
        if trace:
            trace.write(f"node {nodes}: branch x{branch_var} at {v:.4f}\n")
        stack.append(up)
        stack.append(down)  # explore the floor branch first

    wall = time.monotonic() - t0
    stats = SolveStats(nodes, lp_solves, wall)
    incumbent = Assignment(tuple(float(v) for v in best_x)) if best_x is not None else None
    if timed_out:
        obj = evaluate(model.objective, incumbent) if incumbent else None
        return MilpResult(MilpStatus.TIMEOUT, incumbent, obj, stats)
    if incumbent is None:
        return MilpResult(MilpStatus.INFEASIBLE, None, None, stats)
    return MilpResult(
        MilpStatus.OPTIMAL,
        incumbent,
        evaluate(model.objective, incumbent),
        stats,
    )


def check_feasible(model: MilpModel, time_limit: float | None = None) -> FeasibilityResult:
    """Pure satisfiability: ignore the objective, find any integral point.

    Implemented as solve_milp with a zero objective, which terminates at the
    first incumbent.  Timeouts map to UNKNOWN, never to a verdict.
    """
    probe = replace(model, objective=LinearExpr(), sense=Sense.MINIMIZE)
    result = solve_milp(probe, time_limit=time_limit)
    if result.status is MilpStatus.OPTIMAL:
        return FeasibilityResult(Feasibility.FEASIBLE, result.assignment)
    if result.status is MilpStatus.INFEASIBLE:
        return FeasibilityResult(Feasibility.INFEASIBLE)
    return FeasibilityResult(Feasibility.UNKNOWN)
