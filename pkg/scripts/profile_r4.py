"""Time the large-n pipeline over random 3-colorings.

    python3 scripts/profile_r4.py --seeds 20
    python3 scripts/profile_r4.py --n 120 --seeds 5
"""

import argparse
import sys
import time
from collections import Counter

import numpy as np

from bergecycles import Params, r4_find, random_coloring, verify_berge_certificate


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=85)
    ap.add_argument("--seeds", type=int, default=10)
    args = ap.parse_args(argv)

    p = Params(n=args.n, r=4, t=2, c=3)
    gen_times, find_times = [], []
    branches = Counter()
    for seed in range(args.seeds):
        t0 = time.monotonic()
        h = random_coloring(p, seed=seed)
        t1 = time.monotonic()
        res = r4_find(h)
        t2 = time.monotonic()
        assert verify_berge_certificate(res.certificate, h) is None
        gen_times.append(t1 - t0)
        find_times.append(t2 - t1)
        branches[res.trace.branch] += 1
        print(f"seed {seed:>3}: gen {t1 - t0:5.2f}s  find {t2 - t1:5.2f}s  "
              f"{res.trace.branch}")

    print(f"\nn={args.n}, {p.num_edges} edges, {args.seeds} seeds")
    print(f"generate: mean {np.mean(gen_times):.2f}s  max {max(gen_times):.2f}s")
    print(f"find:     mean {np.mean(find_times):.2f}s  max {max(find_times):.2f}s")
    print(f"branches: {dict(branches)}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
