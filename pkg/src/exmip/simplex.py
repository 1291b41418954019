"""Two-phase primal simplex for LP relaxations, with bounded variables.

Dense-tableau implementation sized for desk-scale models (hundreds of rows
and columns).  Variable bounds are handled natively: nonbasic variables may
sit at either bound, so binary upper bounds never become explicit rows.
Phase 1 minimises the sum of artificial variables; no big-M.  Dantzig pricing
with a Bland's-rule fallback guards against cycling, and a full Bland restart
is attempted once before declaring numerical failure.

The model is translated once into flat numpy arrays (`ModelArrays`), which
branch-and-bound reuses across nodes: only bound vectors change per node.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import NumericalInstabilityError
from .model import Assignment, MilpModel, Relation, Sense

_PIVOT_TOL = 1e-9
_COST_TOL = 1e-9
_PHASE1_TOL = 1e-7
_REFRESH_EVERY = 128

_SHIFT, _NEG, _FREE = 0, 1, 2


class LpStatus(Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: LpStatus
    assignment: Assignment | None = None
    objective: float | None = None
    iterations: int = 0


class ModelArrays:
    """Flat numpy view of a model, built once and reused across LP solves.

    Variables are substituted into z-space with z >= 0: finite-lower
    variables are shifted, (-inf, u] variables are negated, free variables
    are split.  The substitution kind is fixed by the root bounds, so
    branch-and-bound bound tightenings stay valid.
    """

    def __init__(self, model: MilpModel):
        self.model = model
        n = len(model.variables)
        m = len(model.constraints)
        self.nvars, self.nrows = n, m
        self.lo0 = np.array([v.lower for v in model.variables], dtype=float)
        self.hi0 = np.array([v.upper for v in model.variables], dtype=float)

        kind = np.empty(n, dtype=np.int8)
        zcol = np.empty(n, dtype=np.int64)  # for FREE: the positive column; negative is +1
        col = 0
        for i in range(n):
            if math.isfinite(self.lo0[i]):
                kind[i] = _SHIFT
                zcol[i] = col
                col += 1
            elif math.isfinite(self.hi0[i]):
                kind[i] = _NEG
                zcol[i] = col
                col += 1
            else:
                kind[i] = _FREE
                zcol[i] = col
                col += 2
        self.kind, self.zcol, self.nstruct = kind, zcol, col

        rows: list[int] = []
        cols: list[int] = []
        coefs: list[float] = []
        off_rows: list[int] = []
        off_vars: list[int] = []
        off_coefs: list[float] = []
        rhs0 = np.empty(m)
        rel = np.empty(m, dtype=np.int8)  # 0 LE, 1 GE, 2 EQ
        rel_code = {Relation.LE: 0, Relation.GE: 1, Relation.EQ: 2}
        for i, c in enumerate(model.constraints):
            rhs0[i] = c.rhs - c.expr.constant
            rel[i] = rel_code[c.relation]
            for vid, a in c.expr.terms:
                k = kind[vid]
                if k == _SHIFT:
                    rows.append(i)
                    cols.append(zcol[vid])
                    coefs.append(a)
                    off_rows.append(i)
                    off_vars.append(vid)
                    off_coefs.append(a)
                elif k == _NEG:
                    rows.append(i)
                    cols.append(zcol[vid])
                    coefs.append(-a)
                    off_rows.append(i)
                    off_vars.append(vid)
                    off_coefs.append(a)
                else:
                    rows.extend((i, i))
                    cols.extend((zcol[vid], zcol[vid] + 1))
                    coefs.extend((a, -a))
        self.a_rows = np.array(rows, dtype=np.int64)
        self.a_cols = np.array(cols, dtype=np.int64)
        self.a_coefs = np.array(coefs)
        self.off_rows = np.array(off_rows, dtype=np.int64)
        self.off_vars = np.array(off_vars, dtype=np.int64)
        self.off_coefs = np.array(off_coefs)
        self.rhs0, self.rel = rhs0, rel

        sign = 1.0 if model.sense is Sense.MINIMIZE else -1.0
        cost = np.zeros(self.nstruct)
        for vid, a in model.objective.terms:
            k = kind[vid]
            if k == _SHIFT:
                cost[zcol[vid]] += sign * a
            elif k == _NEG:
                cost[zcol[vid]] -= sign * a
            else:
                cost[zcol[vid]] += sign * a
                cost[zcol[vid] + 1] -= sign * a
        self.cost_z = cost

        self.shift_mask = kind == _SHIFT
        self.neg_mask = kind == _NEG
        self.free_mask = kind == _FREE
        self.off_is_shift = kind[self.off_vars] == _SHIFT if self.off_vars.size else np.empty(0, bool)
        self.integer_ids = np.array(
            [v.id for v in model.variables if v.integrality.value != "cont"], dtype=np.int64
        )
        self.obj_dense = np.zeros(n)
        for vid, a in model.objective.terms:
            self.obj_dense[vid] = a
        self.obj_const = model.objective.constant
        self.template = _TableauTemplate(self)

    def effective_bounds(
        self, bounds: dict[int, tuple[float, float]] | None
    ) -> tuple[np.ndarray, np.ndarray]:
        lo, hi = self.lo0, self.hi0
        if bounds:
            lo, hi = lo.copy(), hi.copy()
            for vid, (bl, bh) in bounds.items():
                if bl > lo[vid]:
                    lo[vid] = bl
                if bh < hi[vid]:
                    hi[vid] = bh
        return lo, hi

    def x_from_z(self, z: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
        x = np.empty(self.nvars)
        s, g, f = self.shift_mask, self.neg_mask, self.free_mask
        if s.any():
            x[s] = lo[s] + z[self.zcol[s]]
        if g.any():
            x[g] = hi[g] - z[self.zcol[g]]
        if f.any():
            x[f] = z[self.zcol[f]] - z[self.zcol[f] + 1]
        return x


class _TableauTemplate:
    """Bound-independent part of the initial tableau, built once per model.

    The constraint matrix, slack columns, and relation layout never change
    across branch-and-bound nodes; only the rhs offsets and variable upper
    bounds do.  Rows are NOT rhs-normalised here - that depends on bounds -
    so the template reserves an artificial column per row and the per-node
    setup decides which ones are used.
    """

    def __init__(self, arrays: ModelArrays):
        m, nstruct = arrays.nrows, arrays.nstruct
        nslack = int(np.count_nonzero(arrays.rel != 2))
        total = nstruct + nslack + m
        T = np.zeros((m, total))
        if arrays.a_rows.size:
            T[arrays.a_rows, arrays.a_cols] = arrays.a_coefs
        slack_col = np.full(m, -1, dtype=np.int64)
        col = nstruct
        for i in range(m):
            if arrays.rel[i] == 0:
                T[i, col] = 1.0
                slack_col[i] = col
                col += 1
            elif arrays.rel[i] == 1:
                T[i, col] = -1.0
                slack_col[i] = col
                col += 1
        self.T = T
        self.slack_col = slack_col
        self.art_base = col  # artificial for row i, when needed, sits at art_base + i
        self.ncols = total
        self.nstruct = nstruct
        self.m = m


class _Tableau:
    """Mutable simplex state: tableau, basis, and nonbasic bound statuses."""

    def __init__(self, arrays: ModelArrays, lo: np.ndarray, hi: np.ndarray):
        tpl = arrays.template
        m, nstruct = tpl.m, tpl.nstruct
        rhs = arrays.rhs0.copy()
        if arrays.off_rows.size:
            base = np.where(arrays.off_is_shift, lo[arrays.off_vars], hi[arrays.off_vars])
            np.subtract.at(rhs, arrays.off_rows, arrays.off_coefs * base)

        T = tpl.T.copy()
        neg = rhs < 0
        if neg.any():
            T[neg, :] *= -1.0
            rhs[neg] *= -1.0

        basis = np.empty(m, dtype=np.int64)
        art_rows = []
        for i in range(m):
            s = tpl.slack_col[i]
            if s >= 0 and T[i, s] > 0.5:
                basis[i] = s
            else:
                c = tpl.art_base + i
                T[i, c] = 1.0
                basis[i] = c
                art_rows.append(c)

        ncols = tpl.ncols
        self.T = T
        self.Tb = rhs
        self.upper = np.full(ncols, math.inf)
        sel = arrays.shift_mask
        self.upper[arrays.zcol[sel]] = hi[sel] - lo[sel]
        self.basis = basis
        self.is_basic = np.zeros(ncols, dtype=bool)
        self.is_basic[basis] = True
        self.at_upper = np.zeros(ncols, dtype=bool)
        self.art = np.zeros(ncols, dtype=bool)
        self.art[art_rows] = True
        self.m, self.ncols, self.nstruct = m, ncols, nstruct
        self.iterations = 0
        self.xb = rhs.copy()  # all nonbasics start at lower bound (zero)

    def refresh_xb(self) -> None:
        xb = self.Tb.copy()
        up = np.flatnonzero(self.at_upper)
        if up.size:
            xb -= self.T[:, up] @ self.upper[up]
        self.xb = xb

    def values(self) -> np.ndarray:
        x = np.where(self.at_upper & np.isfinite(self.upper), self.upper, 0.0)
        if self.m:
            self.refresh_xb()
            x[self.basis] = self.xb
        return x

    def run(self, cost: np.ndarray, allowed: np.ndarray, max_iter: int, bland_after: int) -> str:
        """Minimise `cost` from the current state.  Returns 'optimal',
        'unbounded', or 'stalled' (iteration budget exhausted)."""
        if self.ncols == 0:
            return "optimal"
        T, Tb, upper, basis = self.T, self.Tb, self.upper, self.basis
        m = self.m
        movable = (allowed & (upper > _PIVOT_TOL)).astype(float)
        movable[self.is_basic] = 0.0
        # direction sign per column: -1 at lower (improve by increasing),
        # +1 at upper (improve by decreasing)
        dirsign = np.where(self.at_upper, 1.0, -1.0)
        red = cost - cost[basis] @ T if m else cost.astype(float)
        self.refresh_xb()
        xb = self.xb
        finite_ub = np.isfinite(upper)

        for it in range(max_iter):
            self.iterations += 1
            if m and it % _REFRESH_EVERY == _REFRESH_EVERY - 1:  # drift control
                red = cost - cost[basis] @ T
                self.refresh_xb()
                xb = self.xb

            viol = dirsign * red * movable
            if it >= bland_after:
                improving = viol > _COST_TOL
                if not improving.any():
                    return "optimal"
                j = int(np.argmax(improving))  # first True: least index
            else:
                j = int(np.argmax(viol))
                if viol[j] <= _COST_TOL:
                    return "optimal"

            at_up = self.at_upper[j]
            sigma = -1.0 if at_up else 1.0
            own = upper[j]
            if m:
                rate = T[:, j] if at_up else -T[:, j]  # d(xb)/d(step)
                ub_b = upper[basis]
                with np.errstate(divide="ignore", invalid="ignore"):
                    lim_dn = np.where(rate < -_PIVOT_TOL, np.maximum(xb, 0.0) / -rate, math.inf)
                    lim_up = np.where(
                        (rate > _PIVOT_TOL) & finite_ub[basis],
                        np.maximum(ub_b - xb, 0.0) / rate,
                        math.inf,
                    )
                lims = np.minimum(lim_dn, lim_up)
                row = int(np.argmin(lims))
                best = float(lims[row])
            else:
                rate = np.empty(0)
                lims = np.empty(0)
                best = math.inf

            if own <= best + _PIVOT_TOL:
                if not math.isfinite(own):
                    return "unbounded"
                # bound flip: step of size `own`, no basis change
                self.at_upper[j] = not at_up
                dirsign[j] = -dirsign[j]
                if m:
                    xb += rate * own
                    np.maximum(xb, 0.0, out=xb)
                continue

            ties = np.flatnonzero(lims <= best + _PIVOT_TOL)
            if ties.size > 1:
                row = int(ties[np.argmin(basis[ties])])
                best = float(lims[row])
            leaving_to_upper = rate[row] > 0

            # step along the edge before T mutates (`rate` views column j)
            entering_value = (own - best) if at_up else best
            xb += rate * best
            xb[row] = entering_value
            np.maximum(xb, 0.0, out=xb)

            # pivot at (row, j)
            piv = T[row, j]
            T[row, :] /= piv
            Tb[row] /= piv
            factors = T[:, j].copy()
            factors[row] = 0.0
            nz = np.flatnonzero(np.abs(factors) > 1e-13)
            if nz.size:
                T[nz, :] -= np.outer(factors[nz], T[row, :])
                Tb[nz] -= factors[nz] * Tb[row]
            T[:, j] = 0.0
            T[row, j] = 1.0
            red -= red[j] * T[row, :]
            red[j] = 0.0

            leaving = basis[row]
            self.is_basic[leaving] = False
            goes_upper = leaving_to_upper and finite_ub[leaving]
            self.at_upper[leaving] = goes_upper
            dirsign[leaving] = 1.0 if goes_upper else -1.0
            movable[leaving] = 1.0 if (allowed[leaving] and upper[leaving] > _PIVOT_TOL) else 0.0
            basis[row] = j
            self.is_basic[j] = True
            self.at_upper[j] = False
            dirsign[j] = -1.0
            movable[j] = 0.0
        return "stalled"


def _solve_tableau(tab: _Tableau, cost_z: np.ndarray, max_iter: int, bland_after: int) -> str:
    if tab.m and tab.art.any():
        phase1 = np.where(tab.art, 1.0, 0.0)
        outcome = tab.run(phase1, np.ones(tab.ncols, dtype=bool), max_iter, bland_after)
        if outcome != "optimal":  # phase 1 cannot be unbounded; treat as stall
            return "stalled"
        if float(phase1 @ tab.values()) > _PHASE1_TOL:
            return "infeasible"
        tab.upper[tab.art] = 0.0  # pin artificials at zero; they never re-enter

    cost = np.zeros(tab.ncols)
    cost[: tab.nstruct] = cost_z
    return tab.run(cost, ~tab.art, max_iter, bland_after)


def solve_lp_raw(
    arrays: ModelArrays,
    bounds: dict[int, tuple[float, float]] | None = None,
) -> tuple[LpStatus, np.ndarray | None, float | None, int]:
    """Numpy-level LP solve: returns (status, x, objective, iterations)
    without building Assignment objects.  Hot path for branch-and-bound."""
    lo, hi = arrays.effective_bounds(bounds)
    if np.any(lo > hi + 1e-12):
        return LpStatus.INFEASIBLE, None, None, 0

    size = arrays.nrows + arrays.nstruct + 8
    attempts = ((60 * size, 15 * size), (300 * size, 0))  # second try: pure Bland
    outcome, tab = "stalled", None
    for max_iter, bland_after in attempts:
        tab = _Tableau(arrays, lo, hi)
        outcome = _solve_tableau(tab, arrays.cost_z, max_iter, bland_after)
        if outcome != "stalled":
            break
    if outcome == "stalled":
        raise NumericalInstabilityError(
            f"simplex did not converge within {attempts[-1][0]} iterations (even under Bland's rule)"
        )
    if outcome == "infeasible":
        return LpStatus.INFEASIBLE, None, None, tab.iterations
    if outcome == "unbounded":
        return LpStatus.UNBOUNDED, None, None, tab.iterations

    z = tab.values()[: arrays.nstruct]
    x = arrays.x_from_z(z, lo, hi)
    obj = float(arrays.obj_dense @ x + arrays.obj_const)
    return LpStatus.OPTIMAL, x, obj, tab.iterations


def solve_lp_arrays(
    arrays: ModelArrays,
    bounds: dict[int, tuple[float, float]] | None = None,
) -> LpResult:
    status, x, obj, iters = solve_lp_raw(arrays, bounds)
    if status is not LpStatus.OPTIMAL:
        return LpResult(status, iterations=iters)
    return LpResult(
        LpStatus.OPTIMAL,
        assignment=Assignment(tuple(float(v) for v in x)),
        objective=obj,
        iterations=iters,
    )


def solve_lp(
    model: MilpModel,
    bounds: dict[int, tuple[float, float]] | None = None,
) -> LpResult:
    """Solve the LP relaxation of `model` (integrality ignored).

    `bounds` optionally tightens variable bounds by id, which is how the
    branch-and-bound driver expresses branching decisions.
    """
    return solve_lp_arrays(ModelArrays(model), bounds)
