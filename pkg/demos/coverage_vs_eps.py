"""Watch the direct coverage estimate fall as the lines get thinner.

At a fixed width every orbit that passes within eps of a line counts as
covered, so thin cells around periodic islands are swallowed and the
estimate sits above its zero-width limit. Shrinking eps tenfold while
running ten times longer shows the approach to that limit.

    python demos/coverage_vs_eps.py            # about ten minutes on one core
    python demos/coverage_vs_eps.py --quick
"""

import argparse

from hemipwi import coverage
from hemipwi.pwi import Protocol


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--quick", action="store_true", help="two widths only")
    ap.add_argument("--grid", type=int, default=100)
    args = ap.parse_args()
    schedule = [(1e-3, 20_000), (1e-4, 200_000)]
    if not args.quick:
        schedule.append((1e-5, 2_000_000))
    for deg in ((45, 45), (57, 57), (57, 32.75)):
        prot = Protocol.from_degrees(*deg)
        row = [f"{coverage.phi_direct(prot, eps, n, args.grid).phi:.3f}" for eps, n in schedule]
        print(f"{deg!s:>12}  " + "  ".join(f"eps={e:g}: {v}" for (e, _), v in zip(schedule, row)))


if __name__ == "__main__":
    main()
