"""Measure heuristic-to-optimal ratios on random Euclidean instances.

    python3 scripts/ratio_sweep.py --trials 40 --min-n 4 --max-n 8
"""

import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from t3co.generators import random_metric
from t3co.grammar import parse
from t3co.semantics import resolve
from t3co.solvers import brute_force, christofides, double_tree, nearest_neighbor

TOUR = "⟨=1|=1|circuit; complete; undirected|c:E↦ℝ≥0|min c(S)⟩"


@dataclass
class SweepConfig:
    trials: int = 40
    min_n: int = 4
    max_n: int = 8
    seed: int = 0


def run(cfg: SweepConfig) -> dict[str, list[Fraction]]:
    rng = random.Random(cfg.seed)
    variant = resolve(parse(TOUR))
    ratios = {"nn": [], "double-tree": [], "christofides": []}
    for _ in range(cfg.trials):
        inst = random_metric(rng, rng.randint(cfg.min_n, cfg.max_n))
        opt = brute_force(variant, inst).value
        for name, fn in (("nn", nearest_neighbor), ("double-tree", double_tree), ("christofides", christofides)):
            ratios[name].append(fn(inst)[1] / opt)
    return ratios


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    for f, default in vars(SweepConfig()).items():
        ap.add_argument("--" + f.replace("_", "-"), type=int, default=default)
    cfg = SweepConfig(**vars(ap.parse_args()))
    for name, rs in run(cfg).items():
        mean = sum(rs) / len(rs)
        print(f"{name:13} mean {float(mean):.4f}  worst {float(max(rs)):.4f}  optimal in {sum(r == 1 for r in rs)}/{len(rs)}")


if __name__ == "__main__":
    main()
