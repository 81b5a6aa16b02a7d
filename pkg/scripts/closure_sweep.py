"""Compare multi-traversal optima on sparse graphs with tour optima on their closures.

    python3 scripts/closure_sweep.py --trials 60 --max-n 7 --max-extra 4
"""

import argparse
import random
import time
from dataclasses import dataclass

from t3co.generators import random_connected
from t3co.grammar import parse
from t3co.instance import metric_closure
from t3co.semantics import resolve
from t3co.solvers import brute_force

WALKS = "⟨=1|≥1|circuit; undirected|c:E↦ℝ≥0|min c(S)⟩"
TOURS = "⟨=1|=1|circuit; complete; undirected|c:E↦ℝ≥0|min c(S)⟩"


@dataclass
class SweepConfig:
    trials: int = 60
    min_n: int = 3
    max_n: int = 7
    max_extra: int = 4
    seed: int = 0


def run(cfg: SweepConfig):
    rng = random.Random(cfg.seed)
    walks, tours = resolve(parse(WALKS)), resolve(parse(TOURS))
    rows = []
    for _ in range(cfg.trials):
        n = rng.randint(cfg.min_n, cfg.max_n)
        extra = rng.randint(0, min(cfg.max_extra, n * (n - 1) // 2 - (n - 1)))
        inst = random_connected(rng, n, extra=extra)
        t0 = time.perf_counter()
        a = brute_force(walks, inst, strategy="multiset")
        t1 = time.perf_counter()
        b = brute_force(tours, metric_closure(inst))
        t2 = time.perf_counter()
        rows.append((n, extra, a.value, b.value, t1 - t0, t2 - t1))
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, default in vars(SweepConfig()).items():
        ap.add_argument("--" + f.replace("_", "-"), type=int, default=default)
    rows = run(SweepConfig(**vars(ap.parse_args())))
    print(" n extra  walks  tours   t_walks   t_tours")
    for n, extra, a, b, ta, tb in rows:
        flag = "" if a == b else "  MISMATCH"
        print(f"{n:2} {extra:5} {str(a):>6} {str(b):>6} {ta:8.3f}s {tb:8.3f}s{flag}")
    print(f"{sum(r[2] == r[3] for r in rows)}/{len(rows)} equal")


if __name__ == "__main__":
    main()
