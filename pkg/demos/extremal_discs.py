"""Closed-form Green values against explicit extremal discs.

Builds the one-pole and horizontal-system discs, checks them with the
feasibility report and compares the objective with the closed form.
"""

from plurigreen import feasibility
from plurigreen.green import green_horizontal_bidisc, green_one_pole_polydisc
from plurigreen.indicators import Indicator
from plurigreen.lempert import construct_horizontal, construct_one_pole


def main():
    z, a, ind = (0.1 + 0.2j, -0.3, 0.5j), (0.4, 0.2 - 0.1j, -0.6), Indicator((1, 2, 3))
    cand = construct_one_pole(z, a, ind)
    g = green_one_pole_polydisc(z, a, ind).value
    print(f"one pole     G = {g:.12f}  L = {cand.objective:.12f}  residual {feasibility(cand).residual:.1e}")

    poles = [(0.5, 1), (-0.3 + 0.4j, 2), (0.1j, 3)]
    for z in [(0.0, 1e-5), (0.0, 0.01), (0.2, 0.3), (-0.4j, 0.8)]:
        cand = construct_horizontal(z, poles)
        g = green_horizontal_bidisc(z, poles)
        print(f"horizontal   z = {z}  {cand.method:<34} G = {g.value:.12f}  L = {cand.objective:.12f}")


if __name__ == "__main__":
    main()
