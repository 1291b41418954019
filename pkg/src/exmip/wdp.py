"""Winner determination for combinatorial auctions as set packing,
plus a CATS-format parser.

Binary x_b selects bid b; each good may go to at most one winning bid;
revenue is maximised.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .errors import FormatError, ModelError
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


@dataclass(frozen=True)
class Bid:
    id: int
    goods: frozenset[int]
    price: float


@dataclass(frozen=True)
class WdpInstance:
    name: str
    goods: int
    bids: tuple[Bid, ...]
    distribution: str = "unknown"

    def __post_init__(self):
        ids = [b.id for b in self.bids]
        if len(set(ids)) != len(ids):
            raise ModelError("duplicate bid ids")
        for b in self.bids:
            if not b.goods:
                raise ModelError(f"bid {b.id} requests no goods")
            if b.price < 0:
                raise ModelError(f"bid {b.id} has negative price")
            bad = [g for g in b.goods if not (0 <= g < self.goods)]
            if bad:
                raise ModelError(f"bid {b.id} references unknown goods {bad}")

    def bid(self, bid_id: int) -> Bid:
        for b in self.bids:
            if b.id == bid_id:
                return b
        raise ModelError(f"unknown bid {bid_id}")


@dataclass(frozen=True)
class WdpContext:
    instance: WdpInstance
    model: MilpModel
    var_of: dict[int, int] = field(repr=False)  # bid id -> variable id
    family: str = "wdp"

    def decode_selection(self, assignment: Assignment, tol: float = 1e-6) -> tuple[int, ...]:
        return tuple(
            b.id for b in self.instance.bids if assignment[self.var_of[b.id]] > 1 - tol
        )


def build_wdp_context(inst: WdpInstance) -> WdpContext:
    variables = []
    var_of: dict[int, int] = {}
    for b in inst.bids:
        var_of[b.id] = len(variables)
        variables.append(Variable(len(variables), f"b{b.id}", 0.0, 1.0, Integrality.BINARY))

    constraints = []
    for g in range(inst.goods):
        holders = [b for b in inst.bids if g in b.goods]
        if not holders:
            continue
        constraints.append(
            TaggedConstraint(
                f"good_{g}",
                LinearExpr.from_terms((var_of[b.id], 1.0) for b in holders),
                Relation.LE,
                1.0,
                ConstraintTag.make(TagKind.GOOD_ALLOCATION, g=g),
            )
        )
    objective = LinearExpr.from_terms((var_of[b.id], b.price) for b in inst.bids if b.price)
    model = MilpModel(tuple(variables), tuple(constraints), objective, Sense.MAXIMIZE)
    return WdpContext(inst, model, var_of)


def build_wdp_milp(inst: WdpInstance) -> MilpModel:
    return build_wdp_context(inst).model


def parse_cats(text: str, name: str = "cats", distribution: str = "unknown") -> WdpInstance:
    """Parse CATS output: '%' comments, `goods N`, `bids M`, optional
    `dummy K`, then bid lines `id price good good ... #`.

    Dummy goods (ids >= goods) model mutual exclusion between bids of one
    bidder; they are folded in as ordinary goods, which preserves exactly
    that exclusion semantics in the set-packing model.
    """
    goods: int | None = None
    nbids: int | None = None
    dummy = 0
    bids: list[Bid] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("%"):
            continue
        parts = line.split()
        head = parts[0].lower()
        if head == "goods":
            if len(parts) != 2:
                raise FormatError("expected 'goods N'", lineno, "goods")
            goods = _int(parts[1], lineno, "goods")
        elif head == "bids":
            if len(parts) != 2:
                raise FormatError("expected 'bids M'", lineno, "bids")
            nbids = _int(parts[1], lineno, "bids")
        elif head == "dummy":
            if len(parts) != 2:
                raise FormatError("expected 'dummy K'", lineno, "dummy")
            dummy = _int(parts[1], lineno, "dummy")
        else:
            if goods is None or nbids is None:
                raise FormatError("bid line before goods/bids headers", lineno, "bids")
            if parts[-1] == "#":
                parts = parts[:-1]
            if len(parts) < 3:
                raise FormatError("bid line needs id, price, and goods", lineno, "bid")
            bid_id = _int(parts[0], lineno, "bid")
            try:
                price = float(parts[1])
            except ValueError:
                raise FormatError(f"bad price {parts[1]!r}", lineno, "bid") from None
            good_ids = frozenset(_int(p, lineno, "bid") for p in parts[2:])
            bids.append(Bid(bid_id, good_ids, price))

    if goods is None:
        raise FormatError("missing 'goods N' header", section="goods")
    if nbids is None:
        raise FormatError("missing 'bids M' header", section="bids")
    if len(bids) != nbids:
        raise FormatError(f"expected {nbids} bids, found {len(bids)}", section="bids")
    try:
        return WdpInstance(name, goods + dummy, tuple(bids), distribution)
    except ModelError as exc:
        raise FormatError(str(exc), section="bids") from exc


def _int(token: str, lineno: int, section: str) -> int:
    try:
        return int(token)
    except ValueError:
        raise FormatError(f"expected integer, got {token!r}", lineno, section) from None
