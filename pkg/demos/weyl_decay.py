"""Weyl sums of floor(n^1.5) shrink with j; those of the squares do not.

    python demos/weyl_decay.py
"""

from fractions import Fraction

from sumsetlab.averaging import SequenceFamily, equidistribution_profile

J = (1000, 10000, 100000)

power = equidistribution_profile(SequenceFamily.power_floor(Fraction(3, 2)), 1024, J)
squares = equidistribution_profile(SequenceFamily.explicit([n * n for n in range(1, J[-1] + 1)]), 1024, J)

print("max over theta = 2 pi k / 1024 of |(1/j) sum_n exp(i theta a_n)|\n")
print(f"{'j':>8} {'floor(n^1.5)':>14} {'n^2':>10} {'n^2 argmax k':>13}")
for p, s in zip(power.rows, squares.rows):
    print(f"{p.j:>8} {p.max_abs:>14.6f} {s.max_abs:>10.6f} {s.k_argmax:>13}")

# squares mod 4 are only 0 and 1, so theta = pi/2 sees (1 + i)/2 forever
print("\nthe squares stall at 1/sqrt(2) = 0.707107 on k = 256, i.e. theta = pi/2")
