"""Irreducible Infeasible Subsystem extraction.

Three extractors over a common feasibility oracle:

* deletion_filter - one pass over constraints in stored order, dropping a
  constraint for good whenever the rest stays infeasible;
* additive_method - grows a working set from empty, recording the constraint
  whose addition tips the set into infeasibility, until the recorded set is
  itself infeasible;
* smallest_iis - implicit hitting set over correction sets (complements of
  maximal feasible subsets): a minimum hitting set of the collected
  correction sets that is itself infeasible is a minimum-cardinality IIS.

plus brute_force_smallest_iis, a subset-enumeration oracle used for testing.

All extractors assume consistent variable bounds: the infeasibility to
explain must come from the constraints, not from an empty variable domain.
A timeout inside any oracle call aborts the whole extraction with
OracleTimeoutError; partial results are never returned.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

from .errors import (
    FeasibleInputError,
    InfeasibleSeedError,
    OracleTimeoutError,
    TooLargeError,
)
from .model import (
    Integrality,
    LinearExpr,
    MilpModel,
    Relation,
    Sense,
    TaggedConstraint,
    Variable,
    subsystem,
)
from .solver import Feasibility, MilpStatus, check_feasible, solve_milp

BRUTE_FORCE_CAP = 14


@dataclass(frozen=True)
class IisStats:
    oracle_calls: int
    wall_time: float


@dataclass(frozen=True)
class Iis:
    constraint_ids: tuple[str, ...]
    source_model: MilpModel
    algorithm: str
    stats: IisStats

    def __len__(self) -> int:
        return len(self.constraint_ids)


@dataclass(frozen=True)
class IisAudit:
    """Outcome of the leave-one-out irreducibility check."""

    valid: bool
    whole_infeasible: bool
    redundant_ids: tuple[str, ...]  # members whose removal keeps infeasibility
    oracle_calls: int


class FeasibilityOracle:
    """Counts solver invocations and enforces a shared wall-clock budget.

    With `cache=True`, repeated queries for the same constraint subset are
    answered from memory and do not count as oracle calls.
    """

    def __init__(self, model: MilpModel, budget: float | None = None, cache: bool = False):
        self.model = model
        self.deadline = time.monotonic() + budget if budget is not None else None
        self.calls = 0
        self._memo: dict[frozenset[str], bool] | None = {} if cache else None

    def _remaining(self) -> float | None:
        if self.deadline is None:
            return None
        left = self.deadline - time.monotonic()
        if left <= 0:
            raise OracleTimeoutError("feasibility oracle budget exhausted")
        return left

    def feasible(self, keep) -> bool:
        key = frozenset(keep)
        if self._memo is not None and key in self._memo:
            return self._memo[key]
        remaining = self._remaining()
        result = check_feasible(subsystem(self.model, key), time_limit=remaining)
        if result.verdict is Feasibility.UNKNOWN:
            raise OracleTimeoutError("feasibility check timed out")
        self.calls += 1
        verdict = result.verdict is Feasibility.FEASIBLE
        if self._memo is not None:
            self._memo[key] = verdict
        return verdict


def _in_model_order(model: MilpModel, ids) -> tuple[str, ...]:
    wanted = set(ids)
    return tuple(cid for cid in model.constraint_ids() if cid in wanted)


def deletion_filter(model: MilpModel, oracle_budget: float | None = None) -> Iis:
    """Single deletion pass in stored constraint order; 1 + n oracle calls."""
    t0 = time.monotonic()
    oracle = FeasibilityOracle(model, oracle_budget)
    all_ids = model.constraint_ids()
    if oracle.feasible(all_ids):
        raise FeasibleInputError("deletion_filter requires an infeasible model")
    working = set(all_ids)
    for cid in all_ids:
        trial = working - {cid}
        if not oracle.feasible(trial):
            working = trial
    return Iis(
        _in_model_order(model, working),
        model,
        "deletion",
        IisStats(oracle.calls, time.monotonic() - t0),
    )


def additive_method(model: MilpModel, oracle_budget: float | None = None) -> Iis:
    """Grow an IIS by repeatedly scanning for the constraint that tips a
    feasible working set into infeasibility."""
    t0 = time.monotonic()
    oracle = FeasibilityOracle(model, oracle_budget, cache=True)
    all_ids = model.constraint_ids()
    if oracle.feasible(all_ids):
        raise FeasibleInputError("additive_method requires an infeasible model")

    members: list[str] = []
    while not members or oracle.feasible(members):
        current = set(members)
        scan = list(members)
        for cid in all_ids:
            if cid in current:
                continue
            scan.append(cid)
            current.add(cid)
            if not oracle.feasible(scan):
                members.append(cid)
                break
        else:  # cannot happen: the full set is infeasible
            raise FeasibleInputError("additive scan never reached infeasibility")
    return Iis(
        _in_model_order(model, members),
        model,
        "additive",
        IisStats(oracle.calls, time.monotonic() - t0),
    )


def _grow(oracle: FeasibilityOracle, seed, all_ids) -> set[str]:
    grown = set(seed)
    state = list(grown)
    for cid in all_ids:
        if cid in grown:
            continue
        state.append(cid)
        if oracle.feasible(state):
            grown.add(cid)
        else:
            state.pop()
    return grown


def grow_mfs(model: MilpModel, seed, oracle_budget: float | None = None) -> tuple[str, ...]:
    """Extend a feasible seed to a maximal feasible subset (constraint order
    decides which maximal set is reached)."""
    oracle = FeasibilityOracle(model, oracle_budget, cache=True)
    if not oracle.feasible(seed):
        raise InfeasibleSeedError("grow_mfs seed is infeasible")
    grown = _grow(oracle, seed, model.constraint_ids())
    return _in_model_order(model, grown)


def _min_hitting_set(universe: tuple[str, ...], sets: list[frozenset[str]]) -> tuple[str, ...]:
    """Exact minimum hitting set, solved as a tiny covering MILP."""
    if not sets:
        return ()
    index = {cid: i for i, cid in enumerate(universe)}
    variables = tuple(
        Variable(i, f"y_{i}", 0.0, 1.0, Integrality.BINARY) for i in range(len(universe))
    )
    constraints = tuple(
        TaggedConstraint(
            f"hit_{k}",
            LinearExpr.from_terms((index[cid], 1.0) for cid in s),
            Relation.GE,
            1.0,
        )
        for k, s in enumerate(sets)
    )
    objective = LinearExpr.from_terms((i, 1.0) for i in range(len(universe)))
    hs_model = MilpModel(variables, constraints, objective, Sense.MINIMIZE)
    result = solve_milp(hs_model)
    if result.status is not MilpStatus.OPTIMAL:  # y = 1 everywhere is always feasible
        raise OracleTimeoutError("hitting-set subproblem did not solve")
    return tuple(cid for cid in universe if result.assignment[index[cid]] > 0.5)


def smallest_iis(model: MilpModel, oracle_budget: float | None = None) -> Iis:
    """Minimum-cardinality IIS via implicit hitting set over correction sets.

    Every infeasible subset must hit the complement of every maximal feasible
    subset, so a minimum hitting set of collected complements bounds the
    smallest IIS size from below; when the hitting set is itself infeasible
    the bound is attained and the set is a smallest IIS (its proper subsets
    are below minimum infeasible cardinality, hence feasible).
    """
    t0 = time.monotonic()
    oracle = FeasibilityOracle(model, oracle_budget, cache=True)
    all_ids = model.constraint_ids()
    if oracle.feasible(all_ids):
        raise FeasibleInputError("smallest_iis requires an infeasible model")

    universe = frozenset(all_ids)
    correction_sets: list[frozenset[str]] = []
    while True:
        candidate = _min_hitting_set(all_ids, correction_sets)
        if not oracle.feasible(candidate):
            return Iis(
                _in_model_order(model, candidate),
                model,
                "smallest",
                IisStats(oracle.calls, time.monotonic() - t0),
            )
        mfs = _grow(oracle, candidate, all_ids)
        correction_sets.append(universe - mfs)


def brute_force_smallest_iis(
    model: MilpModel,
    max_constraints: int = BRUTE_FORCE_CAP,
    oracle_budget: float | None = None,
) -> Iis:
    """Enumerate subsets by increasing cardinality; the first infeasible one
    is a smallest IIS.  Test oracle only: exponential in the constraint count."""
    t0 = time.monotonic()
    all_ids = model.constraint_ids()
    if len(all_ids) > max_constraints:
        raise TooLargeError(
            f"{len(all_ids)} constraints exceed the brute-force cap of {max_constraints}"
        )
    oracle = FeasibilityOracle(model, oracle_budget)
    if oracle.feasible(all_ids):
        raise FeasibleInputError("brute_force_smallest_iis requires an infeasible model")
    for size in range(1, len(all_ids) + 1):
        for combo in itertools.combinations(all_ids, size):
            if not oracle.feasible(combo):
                return Iis(
                    combo,
                    model,
                    "brute",
                    IisStats(oracle.calls, time.monotonic() - t0),
                )
    raise AssertionError("unreachable: the full set is infeasible")


def verify_iis(model: MilpModel, ids, oracle_budget: float | None = None) -> IisAudit:
    """Check the defining property of an IIS: the subsystem is infeasible and
    every leave-one-out subsystem is feasible."""
    oracle = FeasibilityOracle(model, oracle_budget)
    ids = _in_model_order(model, ids)
    whole_infeasible = not oracle.feasible(ids)
    redundant = tuple(
        cid for cid in ids if not oracle.feasible(set(ids) - {cid})
    )
    return IisAudit(
        valid=whole_infeasible and not redundant,
        whole_infeasible=whole_infeasible,
        redundant_ids=redundant,
        oracle_calls=oracle.calls,
    )
