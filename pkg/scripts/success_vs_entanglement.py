"""Closed-form vs sampled success rate along the diagonal a = c.

    python scripts/success_vs_entanglement.py --trials 100000 --seed 7
"""

import argparse
import math

import numpy as np

from remote_prep.analysis import closed_form_success, exact_branch_report, monte_carlo
from remote_prep.protocol import ChannelPair, random_target


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--trials", type=int, default=100_000)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--points", type=int, default=8)
    args = parser.parse_args()

    t = random_target(np.random.default_rng(args.seed))
    print(f"{'a=c':>8} {'closed':>10} {'exact':>10} {'sampled':>10} {'z':>7}")
    for a in np.linspace(0, 1 / math.sqrt(2), args.points):
        ch = ChannelPair.from_ac(float(a), float(a))
        p = closed_form_success(ch)
        exact = exact_branch_report(t, ch).total_success
        s = monte_carlo(t, ch, args.trials, args.seed)
        sigma = math.sqrt(p * (1 - p) / args.trials)
        z = (s.estimated_rate - p) / sigma if sigma else 0.0
        print(f"{a:8.4f} {p:10.6f} {exact:10.6f} {s.estimated_rate:10.6f} {z:7.2f}")


if __name__ == "__main__":
    main()
