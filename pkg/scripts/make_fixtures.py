#!/usr/bin/env python3
"""Regenerate the bundled CATS fixture files (deterministic, seeded).

The files under src/exmip/data/ are committed; rerun this only when the
generator or the fixture roster changes, then commit the diff.
"""

import os

from exmip.generators import random_wdp, wdp_to_cats

SPECS = [
    ("paths0", "paths", 8, 12, 0),
    ("paths1", "paths", 10, 16, 10),
    ("regions0", "regions", 8, 12, 0),
    ("regions1", "regions", 10, 16, 10),
    ("matching0", "matching", 8, 12, 0),
    ("matching1", "matching", 10, 16, 10),
    ("scheduling0", "scheduling", 8, 12, 0),
    ("scheduling1", "scheduling", 10, 16, 10),
]


def main() -> None:
    here = os.path.dirname(os.path.abspath(__file__))
    data_dir = os.path.join(here, "..", "src", "exmip", "data")
    for name, dist, goods, bids, seed in SPECS:
        inst = random_wdp(name, dist, n_goods=goods, n_bids=bids, seed=seed)
        path = os.path.join(data_dir, f"{name}.cats")
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(wdp_to_cats(inst))
        print(path)


if __name__ == "__main__":
    main()
