"""Model core: expressions, constraints, subsystems, canonical format."""

import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exmip.errors import FormatError, ModelError
from exmip.model import (
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
    evaluate,
    parse_model,
    satisfies,
    subsystem,
    write_model,
)


def expr(*terms, constant=0.0):
    return LinearExpr.from_terms(terms, constant)


def test_evaluate_basic():
    # 3*x1 - x2 + 1 at (2, 1) -> 6
    e = expr((0, 3.0), (1, -1.0), constant=1.0)
    assert evaluate(e, Assignment((2.0, 1.0))) == 6.0


def test_evaluate_empty_expr_is_constant():
    assert evaluate(LinearExpr(constant=4.5), Assignment((1.0,))) == 4.5


def test_evaluate_wdp_objective(toy_wdp_ctx):
    # objective of the toy auction at selection (1, 1, 0) -> 9, which
    # enumeration of all 8 selections confirms is the optimum
    from oracles import enumerate_binary

    status, opt = enumerate_binary(toy_wdp_ctx.model)
    assert status == "optimal" and opt == 9.0
    value = evaluate(toy_wdp_ctx.model.objective, Assignment((1.0, 1.0, 0.0)))
    assert value == 9.0


def test_evaluate_out_of_range():
    with pytest.raises(ModelError):
        evaluate(expr((3, 1.0)), Assignment((0.0,)))


def test_satisfies_le_boundary():
    c = TaggedConstraint("c", expr((0, 1.0)), Relation.LE, 0.0)
    assert satisfies(c, Assignment((0.0,)))
    assert satisfies(c, Assignment((1e-7,)), tol=1e-6)
    assert not satisfies(c, Assignment((1e-3,)), tol=1e-6)


def test_satisfies_eq():
    c = TaggedConstraint("c", expr((0, 1.0)), Relation.EQ, 1.0)
    assert not satisfies(c, Assignment((0.0,)))
    assert satisfies(c, Assignment((1.0,)))


def test_satisfies_rejects_negative_tol():
    c = TaggedConstraint("c", expr((0, 1.0)), Relation.EQ, 1.0)
    with pytest.raises(ValueError):
        satisfies(c, Assignment((1.0,)), tol=-1.0)


def _toy_model(n_cons=3):
    variables = (Variable(0, "x", -10.0, 10.0),)
    cons = tuple(
        TaggedConstraint(f"c{i}", expr((0, 1.0)), Relation.LE, float(i)) for i in range(n_cons)
    )
    return MilpModel(variables, cons, expr((0, 1.0)))


def test_subsystem_identity_and_empty():
    m = _toy_model()
    assert subsystem(m, m.constraint_ids()) == m
    assert subsystem(m, ()).constraints == ()


def test_subsystem_single_keep_preserves_order():
    m = _toy_model()
    sub = subsystem(m, {"c1"})
    assert [c.id for c in sub.constraints] == ["c1"]
    both = subsystem(m, {"c2", "c0"})
    assert [c.id for c in both.constraints] == ["c0", "c2"]


def test_subsystem_unknown_id():
    with pytest.raises(ModelError):
        subsystem(_toy_model(), {"nope"})


@given(st.lists(st.tuples(st.integers(0, 5), st.floats(-4, 4)), max_size=8), st.floats(-4, 4))
def test_from_terms_merges_and_drops_zeros(terms, constant):
    e = LinearExpr.from_terms(terms, constant)
    ids = [v for v, _ in e.terms]
    assert ids == sorted(set(ids))
    assert all(c != 0.0 for _, c in e.terms)


@st.composite
def models(draw):
    n_vars = draw(st.integers(1, 5))
    variables = []
    for i in range(n_vars):
        lo = draw(st.integers(-5, 2))
        hi = lo + draw(st.integers(0, 6))
        kind = draw(st.sampled_from(list(Integrality)))
        if kind is Integrality.BINARY:
            lo, hi = 0, 1
        variables.append(Variable(i, f"v{i}", float(lo), float(hi), kind))
    n_cons = draw(st.integers(0, 5))
    cons = []
    for k in range(n_cons):
        terms = draw(
            st.lists(
                st.tuples(st.integers(0, n_vars - 1), st.integers(-5, 5).filter(bool)),
                min_size=1,
                max_size=4,
            )
        )
        e = LinearExpr.from_terms([(v, float(c)) for v, c in terms])
        if not e.terms:
            continue
        rel = draw(st.sampled_from(list(Relation)))
        kind = draw(st.sampled_from(list(TagKind)))
        tag = ConstraintTag.make(kind, j=draw(st.integers(0, 30)), t=draw(st.integers(0, 30)))
        cons.append(TaggedConstraint(f"c{k}", e, rel, float(draw(st.integers(-9, 9))), tag))
    obj_terms = draw(
        st.lists(st.tuples(st.integers(0, n_vars - 1), st.integers(-5, 5).filter(bool)), max_size=4)
    )
    objective = LinearExpr.from_terms([(v, float(c)) for v, c in obj_terms],
                                      float(draw(st.integers(-5, 5))))
    sense = draw(st.sampled_from(list(Sense)))
    return MilpModel(tuple(variables), tuple(cons), objective, sense)


@settings(max_examples=120, deadline=None)
@given(models())
def test_canonical_format_round_trip(model):
    assert parse_model(write_model(model)) == model


@settings(max_examples=60, deadline=None)
@given(models(), st.data())
def test_subsystem_monotone(model, data):
    ids = list(model.constraint_ids())
    keep2 = set(data.draw(st.lists(st.sampled_from(ids), unique=True))) if ids else set()
    keep1 = set(data.draw(st.lists(st.sampled_from(sorted(keep2)), unique=True))) if keep2 else set()
    sub1 = {c.id for c in subsystem(model, keep1).constraints}
    sub2 = {c.id for c in subsystem(model, keep2).constraints}
    assert sub1 <= sub2


def test_satisfies_matches_exact_rationals():
    # integer data evaluated in float64 is exact; compare against Fraction
    cases = [
        ((3, -7, 2), (5, 1, -4), Relation.LE, -16),
        ((1, 1, 1), (2, 3, 4), Relation.EQ, 9),
        ((10, -2, 0), (1, 4, 9), Relation.GE, 2),
    ]
    for coeffs, point, rel, rhs in cases:
        e = expr(*[(i, float(c)) for i, c in enumerate(coeffs) if c])
        c = TaggedConstraint("c", e, rel, float(rhs))
        exact = sum(Fraction(a) * Fraction(x) for a, x in zip(coeffs, point))
        if rel is Relation.LE:
            expected = exact <= rhs
        elif rel is Relation.GE:
            expected = exact >= rhs
        else:
            expected = exact == rhs
        assert satisfies(c, Assignment(tuple(float(x) for x in point)), tol=0.0) == expected


def test_variable_invariants():
    with pytest.raises(ModelError):
        Variable(0, "x", 2.0, 1.0)
    with pytest.raises(ModelError):
        Variable(0, "x", 0.0, 2.0, Integrality.BINARY)


def test_model_invariants():
    v = (Variable(0, "x", 0.0, 1.0),)
    c = TaggedConstraint("c", expr((0, 1.0)), Relation.LE, 1.0)
    with pytest.raises(ModelError):
        MilpModel(v, (c, c), LinearExpr())  # duplicate ids
    with pytest.raises(ModelError):
        MilpModel(v, (TaggedConstraint("d", expr((7, 1.0)), Relation.LE, 1.0),), LinearExpr())


def test_parse_errors_carry_location():
    with pytest.raises(FormatError) as exc:
        parse_model("vars 1 cons 0 sense min\nvar 0 x 0 oops cont\nobj : 1*x\n")
    assert exc.value.line == 2
    assert exc.value.section == "variables"
    with pytest.raises(FormatError):
        parse_model("")


def test_format_handles_infinities_and_params():
    model = MilpModel(
        (Variable(0, "x", 0.0, math.inf), Variable(1, "y", -math.inf, 3.5)),
        (
            TaggedConstraint(
                "r1",
                expr((0, 1.5), (1, -2.0)),
                Relation.GE,
                1.0,
                ConstraintTag.make(TagKind.RESOURCE, r=4, t=23),
            ),
        ),
        expr((0, 1.0), constant=2.0),
        Sense.MAXIMIZE,
    )
    again = parse_model(write_model(model))
    assert again == model
    assert again.constraints[0].tag.param_dict() == {"r": 4, "t": 23}
