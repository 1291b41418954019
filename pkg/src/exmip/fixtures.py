"""Hand-built desk-scale instances used by the benchmark corpus and tests."""

from __future__ import annotations

from .rcpsp import Activity, RcpspInstance
from .wdp import Bid, WdpInstance


def chain_rcpsp() -> RcpspInstance:
    """Serial chain with durations 2, 3, 1; ample capacity; makespan 6."""
    acts = (
        Activity(0, 0, (0,)),
        Activity(1, 2, (1,)),
        Activity(2, 3, (1,)),
        Activity(3, 1, (1,)),
        Activity(4, 0, (0,)),
    )
    prec = ((0, 1), (1, 2), (2, 3), (3, 4))
    return RcpspInstance("chain", acts, prec, (2,), 6)


def diamond_rcpsp() -> RcpspInstance:
    """Source -> {a, b} -> join; a and b share a capacity-1 resource."""
    acts = (
        Activity(0, 0, (0,)),
        Activity(1, 2, (1,)),
        Activity(2, 2, (1,)),
        Activity(3, 1, (1,)),
        Activity(4, 0, (0,)),
    )
    prec = ((0, 1), (0, 2), (1, 3), (2, 3), (3, 4))
    return RcpspInstance("diamond", acts, prec, (1,), 8)


def contention_rcpsp() -> RcpspInstance:
    """Two independent duration-2 activities on a capacity-1 resource."""
    acts = (
        Activity(0, 0, (0,)),
        Activity(1, 2, (1,)),
        Activity(2, 2, (1,)),
        Activity(3, 0, (0,)),
    )
    prec = ((0, 1), (0, 2), (1, 3), (2, 3))
    return RcpspInstance("contention", acts, prec, (1,), 5)


def running_example_rcpsp() -> RcpspInstance:
    """Desk-scale mirror of the worked scheduling walkthrough: the precedence
    chain 16/17 -> 22 -> 23 -> 24 with resource-4 contention between 16 and
    17 (their joint demand exceeds the capacity, so they serialise)."""
    acts = (
        Activity(0, 0, (0, 0, 0, 0)),
        Activity(16, 5, (0, 0, 0, 5)),
        Activity(17, 3, (0, 0, 0, 8)),
        Activity(22, 4, (2, 0, 0, 0)),
        Activity(23, 1, (3, 0, 0, 0)),
        Activity(24, 2, (0, 9, 0, 0)),
        Activity(99, 0, (0, 0, 0, 0)),
    )
    prec = ((0, 16), (0, 17), (16, 22), (17, 22), (22, 23), (23, 24), (24, 99))
    return RcpspInstance("running-example", acts, prec, (4, 10, 5, 10), 15)


def toy_wdp() -> WdpInstance:
    """Three bids over two goods; unique optimum selects the two singletons."""
    return WdpInstance(
        "toy",
        2,
        (
            Bid(0, frozenset({0}), 5.0),
            Bid(1, frozenset({1}), 4.0),
            Bid(2, frozenset({0, 1}), 8.0),
        ),
        "hand",
    )


def twin_optimum_wdp() -> WdpInstance:
    """Two disjoint optima with equal revenue: vetoing one winning bid is
    answered by the alternate optimum, not by an IIS."""
    return WdpInstance(
        "twin",
        2,
        (
            Bid(0, frozenset({0}), 5.0),
            Bid(1, frozenset({0}), 5.0),
            Bid(2, frozenset({1}), 3.0),
        ),
        "hand",
    )
