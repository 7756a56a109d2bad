#!/usr/bin/env python3
"""Batch-audit the postselection-invariance statement on random instances.

Degenerate mode draws observables with scaled-identity system factors (the
hypothesis holds by construction) and reports the largest deviation between
conditional and unconditional means. Generic mode drops the restriction and
shows how large the gap gets once the hypothesis fails.
"""

import argparse

from nogosim.nogo import random_audit


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--count", type=int, default=1000)
    parser.add_argument("--generic-count", type=int, default=100)
    parser.add_argument("--seed", type=int, default=20240)
    parser.add_argument("--tol-verify", type=float, default=1e-9)
    args = parser.parse_args()

    degenerate = random_audit(count=args.count, seed=args.seed, mode="degenerate", tol_verify=args.tol_verify)
    print(
        f"degenerate mode: {degenerate.count} instances, {degenerate.violations} violations, "
        f"gap max {degenerate.gap_max:.3e} median {degenerate.gap_median:.3e}"
    )

    generic = random_audit(count=args.generic_count, seed=args.seed, mode="generic", tol_verify=args.tol_verify)
    print(
        f"generic mode:    {generic.count} instances, gap max {generic.gap_max:.3f} "
        f"median {generic.gap_median:.3f} min {generic.gap_min:.3e}"
    )
    large = sum(1 for inst in generic.instances if inst.gap > 0.01)
    print(f"generic instances with gap > 0.01: {large}/{generic.count}")
    return 1 if degenerate.violations else 0


if __name__ == "__main__":
    raise SystemExit(main())
