"""Core MILP representation: variables, tagged linear constraints, models.

Models are immutable after construction and all operations on them are pure,
so values can be shared freely between threads.  Constraint order is
significant and preserved everywhere: IIS extraction results depend on it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping, Sequence

from .errors import FormatError, ModelError

DEFAULT_TOL = 1e-6

ParamValue = int | float | str


class Integrality(Enum):
    CONTINUOUS = "cont"
    INTEGER = "int"
    BINARY = "bin"


class Relation(Enum):
    LE = "<="
    GE = ">="
    EQ = "="


class Sense(Enum):
    MINIMIZE = "min"
    MAXIMIZE = "max"


class TagKind(Enum):
    COMPLETION = "completion"
    PRECEDENCE = "precedence"
    RESOURCE = "resource"
    GOOD_ALLOCATION = "good_allocation"
    MINIMALITY = "minimality"
    QUERY = "query"
    GENERIC = "generic"


@dataclass(frozen=True)
class Variable:
    id: int
    name: str
    lower: float
    upper: float
    integrality: Integrality = Integrality.CONTINUOUS

    def __post_init__(self):
        if self.lower > self.upper:
            raise ModelError(f"variable {self.name!r}: lower {self.lower} > upper {self.upper}")
        if self.integrality is Integrality.BINARY and not (self.lower >= 0 and self.upper <= 1):
            raise ModelError(f"binary variable {self.name!r} must have bounds within [0, 1]")


@dataclass(frozen=True)
class LinearExpr:
    """Sparse linear expression: sum of coeff*var terms plus a constant.

    Terms are stored sorted by variable id with no duplicates and no zero
    coefficients, so structural equality is canonical.
    """

    terms: tuple[tuple[int, float], ...] = ()
    constant: float = 0.0

    def __post_init__(self):
        ids = [v for v, _ in self.terms]
        if ids != sorted(set(ids)):
            raise ModelError("LinearExpr terms must be sorted by variable id without duplicates")
        if any(c == 0.0 for _, c in self.terms):
            raise ModelError("LinearExpr must not store zero coefficients")

    @staticmethod
    def from_terms(terms: Iterable[tuple[int, float]], constant: float = 0.0) -> "LinearExpr":
        """Build an expression, merging duplicate variables and dropping zeros."""
        acc: dict[int, float] = {}
        for var, coeff in terms:
            acc[var] = acc.get(var, 0.0) + float(coeff)
        clean = tuple((v, c) for v, c in sorted(acc.items()) if c != 0.0)
        return LinearExpr(clean, float(constant))

    def scope(self) -> frozenset[int]:
        return frozenset(v for v, _ in self.terms)

    def coefficient(self, var: int) -> float:
        for v, c in self.terms:
            if v == var:
                return c
        return 0.0


@dataclass(frozen=True)
class ConstraintTag:
    kind: TagKind = TagKind.GENERIC
    params: tuple[tuple[str, ParamValue], ...] = ()

    @staticmethod
    def make(kind: TagKind, **params: ParamValue) -> "ConstraintTag":
        return ConstraintTag(kind, tuple(sorted(params.items())))

    def param_dict(self) -> dict[str, ParamValue]:
        return dict(self.params)


@dataclass(frozen=True)
class TaggedConstraint:
    id: str
    expr: LinearExpr
    relation: Relation
    rhs: float
    tag: ConstraintTag = ConstraintTag()

    @property
    def scope(self) -> frozenset[int]:
        return self.expr.scope()


@dataclass(frozen=True)
class Assignment:
    """Dense vector of variable values, indexed by variable id."""

    values: tuple[float, ...]

    def __getitem__(self, var: int) -> float:
        return self.values[var]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class MilpModel:
    variables: tuple[Variable, ...]
    constraints: tuple[TaggedConstraint, ...]
    objective: LinearExpr
    sense: Sense = Sense.MINIMIZE

    def __post_init__(self):
        n = len(self.variables)
        for i, v in enumerate(self.variables):
            if v.id != i:
                raise ModelError(f"variable ids must be dense 0..{n - 1}; got {v.id} at index {i}")
        names = [v.name for v in self.variables]
        if len(set(names)) != n:
            raise ModelError("variable names must be unique")
        seen: set[str] = set()
        for c in self.constraints:
            if c.id in seen:
                raise ModelError(f"duplicate constraint id {c.id!r}")
            seen.add(c.id)
            bad = [v for v in c.scope if not (0 <= v < n)]
            if bad:
                raise ModelError(f"constraint {c.id!r} references unknown variables {bad}")
        bad = [v for v in self.objective.scope() if not (0 <= v < n)]
        if bad:
            raise ModelError(f"objective references unknown variables {bad}")

    def constraint_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.constraints)

    def constraint(self, cid: str) -> TaggedConstraint:
        for c in self.constraints:
            if c.id == cid:
                return c
        raise ModelError(f"unknown constraint id {cid!r}")

    def variable_by_name(self, name: str) -> Variable:
        for v in self.variables:
            if v.name == name:
                return v
        raise ModelError(f"unknown variable name {name!r}")


def evaluate(expr: LinearExpr, assignment: Assignment) -> float:
    """Value of the expression at the assignment."""
    total = expr.constant
    for var, coeff in expr.terms:
        if var >= len(assignment):
            raise ModelError(f"assignment of length {len(assignment)} lacks variable {var}")
        total += coeff * assignment[var]
    return total


def satisfies(constraint: TaggedConstraint, assignment: Assignment, tol: float = DEFAULT_TOL) -> bool:
    """Whether the assignment satisfies the constraint within tolerance tol."""
    if tol < 0:
        raise ValueError("tol must be nonnegative")
    lhs = evaluate(constraint.expr, assignment)
    if constraint.relation is Relation.LE:
        return lhs <= constraint.rhs + tol
    if constraint.relation is Relation.GE:
        return lhs >= constraint.rhs - tol
    return abs(lhs - constraint.rhs) <= tol


def satisfies_all(model: MilpModel, assignment: Assignment, tol: float = DEFAULT_TOL) -> bool:
    return all(satisfies(c, assignment, tol) for c in model.constraints)


def subsystem(model: MilpModel, keep: Iterable[str]) -> MilpModel:
    """Model restricted to the constraints in `keep`, order preserved."""
    keep = set(keep)
    known = set(model.constraint_ids())
    unknown = keep - known
    if unknown:
        raise ModelError(f"unknown constraint ids {sorted(unknown)}")
    return MilpModel(
        variables=model.variables,
        constraints=tuple(c for c in model.constraints if c.id in keep),
        objective=model.objective,
        sense=model.sense,
    )


# ---------------------------------------------------------------------------
# Canonical line-oriented text format.
#
#   # comment
#   vars N cons M sense min|max
#   var <id> <name> <lo> <hi> <cont|int|bin>        (N lines)
#   con <id> <kind> <k=v,...|-> : <coeff>*<name> ... <rel> <rhs>   (M lines)
#   obj : <coeff>*<name> ... [<constant>]
# ---------------------------------------------------------------------------

_INTEGRALITY_CODES = {m.value: m for m in Integrality}
_RELATION_CODES = {m.value: m for m in Relation}
_SENSE_CODES = {m.value: m for m in Sense}
_KIND_CODES = {m.value: m for m in TagKind}


def _fmt_num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def _parse_num(token: str, line: int, section: str) -> float:
    if token == "inf":
        return math.inf
    if token == "-inf":
        return -math.inf
    try:
        return float(token)
    except ValueError:
        raise FormatError(f"expected a number, got {token!r}", line, section) from None


def _fmt_params(tag: ConstraintTag) -> str:
    if not tag.params:
        return "-"
    return ",".join(f"{k}={v}" for k, v in tag.params)


def _parse_param_value(raw: str) -> ParamValue:
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        return raw


def _fmt_terms(expr: LinearExpr, names: Sequence[str]) -> str:
    return " ".join(f"{_fmt_num(c)}*{names[v]}" for v, c in expr.terms)


def write_model(model: MilpModel) -> str:
    """Serialize a model to the canonical text format."""
    names = [v.name for v in model.variables]
    lines = [f"vars {len(model.variables)} cons {len(model.constraints)} sense {model.sense.value}"]
    for v in model.variables:
        lines.append(
            f"var {v.id} {v.name} {_fmt_num(v.lower)} {_fmt_num(v.upper)} {v.integrality.value}"
        )
    for c in model.constraints:
        terms = _fmt_terms(c.expr, names)
        body = f"{terms} " if terms else ""
        if c.expr.constant:
            body += f"{_fmt_num(c.expr.constant)} "
        lines.append(
            f"con {c.id} {c.tag.kind.value} {_fmt_params(c.tag)} : {body}{c.relation.value} {_fmt_num(c.rhs)}"
        )
    obj_terms = _fmt_terms(model.objective, names)
    parts = ["obj", ":"]
    if obj_terms:
        parts.append(obj_terms)
    if model.objective.constant or not obj_terms:
        parts.append(_fmt_num(model.objective.constant))
    lines.append(" ".join(parts))
    return "\n".join(lines) + "\n"


def _parse_expr_tokens(
    tokens: list[str], name_to_id: Mapping[str, int], line: int, section: str
) -> LinearExpr:
    terms: list[tuple[int, float]] = []
    constant = 0.0
    for tok in tokens:
        if "*" in tok:
            coeff_s, _, name = tok.partition("*")
            coeff = _parse_num(coeff_s, line, section)
            if name not in name_to_id:
                raise FormatError(f"unknown variable {name!r}", line, section)
            terms.append((name_to_id[name], coeff))
        else:
            constant += _parse_num(tok, line, section)
    return LinearExpr.from_terms(terms, constant)


def parse_model(text: str) -> MilpModel:
    """Parse the canonical text format; raises FormatError with line context."""
    rows: list[tuple[int, str]] = []
    for no, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            rows.append((no, stripped))
    if not rows:
        raise FormatError("empty model file", section="header")

    line, header = rows[0]
    parts = header.split()
    if len(parts) != 6 or parts[0] != "vars" or parts[2] != "cons" or parts[4] != "sense":
        raise FormatError("expected header 'vars N cons M sense min|max'", line, "header")
    try:
        n_vars, n_cons = int(parts[1]), int(parts[3])
    except ValueError:
        raise FormatError("header counts must be integers", line, "header") from None
    if parts[5] not in _SENSE_CODES:
        raise FormatError(f"unknown sense {parts[5]!r}", line, "header")
    sense = _SENSE_CODES[parts[5]]

    expected = 1 + n_vars + n_cons + 1
    if len(rows) != expected:
        raise FormatError(
            f"expected {expected} content lines, found {len(rows)}", rows[-1][0], "body"
        )

    variables: list[Variable] = []
    for line, content in rows[1 : 1 + n_vars]:
        parts = content.split()
        if len(parts) != 6 or parts[0] != "var":
            raise FormatError("expected 'var <id> <name> <lo> <hi> <kind>'", line, "variables")
        if parts[5] not in _INTEGRALITY_CODES:
            raise FormatError(f"unknown integrality {parts[5]!r}", line, "variables")
        try:
            vid = int(parts[1])
        except ValueError:
            raise FormatError("variable id must be an integer", line, "variables") from None
        variables.append(
            Variable(
                id=vid,
                name=parts[2],
                lower=_parse_num(parts[3], line, "variables"),
                upper=_parse_num(parts[4], line, "variables"),
                integrality=_INTEGRALITY_CODES[parts[5]],
            )
        )
    name_to_id = {v.name: v.id for v in variables}

    constraints: list[TaggedConstraint] = []
    for line, content in rows[1 + n_vars : 1 + n_vars + n_cons]:
        parts = content.split()
        if len(parts) < 7 or parts[0] != "con" or parts[4] != ":":
            raise FormatError(
                "expected 'con <id> <kind> <params> : <terms> <rel> <rhs>'", line, "constraints"
            )
        cid, kind_s, params_s = parts[1], parts[2], parts[3]
        if kind_s not in _KIND_CODES:
            raise FormatError(f"unknown tag kind {kind_s!r}", line, "constraints")
        params: tuple[tuple[str, ParamValue], ...] = ()
        if params_s != "-":
            pairs = []
            for item in params_s.split(","):
                key, sep, raw = item.partition("=")
                if not sep or not key:
                    raise FormatError(f"malformed params {params_s!r}", line, "constraints")
                pairs.append((key, _parse_param_value(raw)))
            params = tuple(pairs)
        rel_s, rhs_s = parts[-2], parts[-1]
        if rel_s not in _RELATION_CODES:
            raise FormatError(f"unknown relation {rel_s!r}", line, "constraints")
        expr = _parse_expr_tokens(parts[5:-2], name_to_id, line, "constraints")
        constraints.append(
            TaggedConstraint(
                id=cid,
                expr=expr,
                relation=_RELATION_CODES[rel_s],
                rhs=_parse_num(rhs_s, line, "constraints"),
                tag=ConstraintTag(_KIND_CODES[kind_s], params),
            )
        )

    line, content = rows[-1]
    parts = content.split()
    if len(parts) < 2 or parts[0] != "obj" or parts[1] != ":":
        raise FormatError("expected 'obj : <terms> [<constant>]'", line, "objective")
    objective = _parse_expr_tokens(parts[2:], name_to_id, line, "objective")

    try:
        return MilpModel(tuple(variables), tuple(constraints), objective, sense)
    except ModelError as exc:
        raise FormatError(str(exc), section="model") from exc
