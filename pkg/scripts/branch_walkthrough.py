"""Print every branch of one protocol run: sender outcome, receiver state, ancilla result.

    python scripts/branch_walkthrough.py --target 0.5,0+0.5j,0.5,0+0.5j --a 0.6 --c 0.6
"""

import argparse
import math

import numpy as np

from remote_prep.cli import parse_target
from remote_prep.protocol import AuxOutcome, ChannelPair, DegenerateBranchError, Outcome, run_protocol, validate_target


def fmt(amps):
    return "(" + ", ".join(f"{z.real:+.4f}{z.imag:+.4f}j" for z in amps) + ")"


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--target", type=parse_target, default=(0.5, 0.5, 0.5, 0.5))
    parser.add_argument("--a", type=float, default=1 / math.sqrt(2))
    parser.add_argument("--c", type=float, default=1 / math.sqrt(2))
    args = parser.parse_args()
    t = validate_target(*args.target)
    ch = ChannelPair.from_ac(args.a, args.c)
    print(f"channel a={ch.a:.4f} b={ch.b:.4f} c={ch.c:.4f} d={ch.d:.4f}; target {fmt(t.coefficients)}")
    total = 0.0
    for o in Outcome:
        for aux in (AuxOutcome.AUX0, AuxOutcome.AUX1) if o.correctable else (None,):
            try:
                res = run_protocol(t, ch, alice=o, aux=aux)
            except DegenerateBranchError:
                continue
            if res.success:
                total += res.probability
            label = o.slug if aux is None else f"{o.slug}/aux{int(aux)}"
            print(
                f"{label:<14} p={res.probability:.6f} F={res.fidelity_to_target:.6f} "
                f"{'ok  ' if res.success else 'fail'} bob={fmt(res.final_bob_state.amps)}"
            )
    print(f"total success {total:.10f}  vs 2(ac)^2 = {2 * (ch.a * ch.c) ** 2:.10f}")


if __name__ == "__main__":
    np.set_printoptions(precision=4)
    main()
