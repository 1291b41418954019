"""Seeded desk-scale instance generators.

The auction generators are lightweight stand-ins for the four classic bid
distribution families (paths, regions, matching, scheduling); they keep the
shape of each family - which goods tend to be demanded together - at sizes
where every benchmark query solves in seconds.  They are not calibrated
replicas of the reference generators.
"""

from __future__ import annotations

import numpy as np

from .rcpsp import Activity, RcpspInstance, default_horizon
from .wdp import Bid, WdpInstance


def random_rcpsp(
    name: str,
    n_real: int,
    n_resources: int = 1,
    seed: int = 0,
    max_duration: int = 3,
    edge_prob: float = 0.35,
    horizon_slack: int = 0,
) -> RcpspInstance:
    """Random layered DAG with contended renewable resources.

    Capacities are set low enough that some activities cannot run in
    parallel, which is what makes contrastive queries bite.
    """
    rng = np.random.default_rng(seed)
    source, sink = 0, n_real + 1
    durations = {j: int(rng.integers(1, max_duration + 1)) for j in range(1, n_real + 1)}

    edges: list[tuple[int, int]] = []
    for j in range(1, n_real + 1):
        for k in range(j + 1, n_real + 1):
            if rng.random() < edge_prob:
                edges.append((j, k))
    has_pred = {j for _, j in edges}
    has_succ = {h for h, _ in edges}
    for j in range(1, n_real + 1):
        if j not in has_pred:
            edges.insert(0, (source, j))
        if j not in has_succ:
            edges.append((j, sink))

    demands = {}
    for j in range(1, n_real + 1):
        row = [0] * n_resources
        row[int(rng.integers(0, n_resources))] = int(rng.integers(1, 4))
        demands[j] = tuple(row)
    caps = []
    for r in range(n_resources):
        total = sum(demands[j][r] for j in demands)
        peak = max((demands[j][r] for j in demands), default=1)
        caps.append(max(peak, int(np.ceil(total / 2)) if total else 1))

    activities = (
        (Activity(source, 0, (0,) * n_resources),)
        + tuple(Activity(j, durations[j], demands[j]) for j in range(1, n_real + 1))
        + (Activity(sink, 0, (0,) * n_resources),)
    )
    horizon = default_horizon(durations.values()) + horizon_slack
    # order edges: source edges first, then by (pred, succ)
    ordered = tuple(sorted(set(edges)))
    return RcpspInstance(name, activities, ordered, tuple(caps), horizon)


def _price(rng: np.random.Generator, size: int) -> float:
    return float(np.round(size * rng.uniform(8, 12), 0))


def random_wdp(
    name: str,
    distribution: str,
    n_goods: int,
    n_bids: int,
    seed: int = 0,
) -> WdpInstance:
    rng = np.random.default_rng(seed)
    bids: list[Bid] = []
    for b in range(n_bids):
        if distribution == "paths":
            # contiguous segment of a line of goods
            length = int(rng.integers(2, max(3, n_goods // 3) + 1))
            start = int(rng.integers(0, n_goods - length + 1))
            goods = frozenset(range(start, start + length))
        elif distribution == "regions":
            # a seed good plus neighbours on a ring
            center = int(rng.integers(0, n_goods))
            radius = int(rng.integers(1, 3))
            goods = frozenset((center + d) % n_goods for d in range(-radius, radius + 1))
        elif distribution == "matching":
            # pairs of distinct goods, as in edge/matching markets
            pair = rng.choice(n_goods, size=2, replace=False)
            goods = frozenset(int(g) for g in pair)
        elif distribution == "scheduling":
            # a window of consecutive time slots with a random start
            length = int(rng.integers(1, 4))
            start = int(rng.integers(0, n_goods - length + 1))
            goods = frozenset(range(start, start + length))
        else:
            raise ValueError(f"unknown distribution {distribution!r}")
        bids.append(Bid(b, goods, _price(rng, len(goods))))
    return WdpInstance(name, n_goods, tuple(bids), distribution)


def wdp_to_cats(inst: WdpInstance) -> str:
    """Render an instance in CATS text format."""
    lines = [
        f"% {inst.name} ({inst.distribution} distribution, desk scale)",
        f"goods {inst.goods}",
        f"bids {len(inst.bids)}",
        "dummy 0",
    ]
    for b in inst.bids:
        goods = " ".join(str(g) for g in sorted(b.goods))
        price = int(b.price) if float(b.price).is_integer() else b.price
        lines.append(f"{b.id} {price} {goods} #")
    return "\n".join(lines) + "\n"
