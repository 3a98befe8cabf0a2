"""Four simple poles colliding pairwise at (a, 0) and (-a, 0).

Prints the corrected disc objective along eps -> 0 next to the limit
Green value 2 log|a| and the relaxed reference log|gamma|.
"""

import math

from plurigreen.collisions import eps_schedule, four_pole_scenario, sweep


def main(a=0.5, gamma=0.3):
    scn = four_pole_scenario(a, gamma, eps_schedule(6))
    print(f"base disc objective {scn.base.objective:.8f}")
    print(f"2 log a = {2 * math.log(a):.8f}   log gamma = {math.log(gamma):.8f}")
    for row in sweep(scn):
        r = "fallback  " if row.r is None else f"{row.r:.8f}"
        line = f"eps = {row.eps.real:8.0e}  r = {r}  L = {row.objective:.8f}  residual {row.residual:.1e}"
        print(line + (f"  ({row.notice})" if row.notice else ""))


if __name__ == "__main__":
    main()
