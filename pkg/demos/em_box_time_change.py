"""Drift-free Euler-Maruyama in a two-valued box: the time-change picture.

Integrating dx = sqrt(2 D(x)) dB with no drift and reflecting walls puts
the chain in the 1/D equilibrium: with D twice as large on the right, the
particle spends half as much time there.  This is one self-consistent
reading of "no external forces" -- the billiard experiments show it is not
the only one.

The large step size mimics a quick naive integration; shrinking h removes
the visible wall/interface bias.
"""

from statediff.sampler import em_box_occupation

print("D_left=1, D_right=2, box [-5,5] x [0,5]")
print("h        steps/chain  chains   ratio right/left   (1/D prediction: 0.5)")
for h, steps, chains in [(0.5, 400, 2000), (0.05, 2000, 2000), (0.01, 10000, 2000)]:
    n_l, n_r = em_box_occupation(1.0, 2.0, (-5.0, 0.0, 5.0, 5.0), h,
                                 steps, chains, seed=99)
    print(f"{h:<8g} {steps:<12d} {chains:<8d} {n_r / n_l:.4f}")
