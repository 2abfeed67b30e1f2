"""A + B for a Bohr set B: how long are the runs?

    python demos/thickness.py
"""

from sumsetlab.verify import verify_thickness

B = "bohr:torus:d=1,alpha=sqrt2@box:0,0.3"

for family, j in (("power:1.5", 10**4), ("explicit:squares", 1000), ("list:0", 1), ("list:0,1", 2)):
    rep = verify_thickness(family, B, (0, 10**6), 50, j)
    m = rep.measured
    print(f"A = {family:<17} |A| = {m['A_size']:>6}  longest run of A+B on [0,10^6]: {m['longest_run']}")

# B's gaps are 2, 3 and 5, so a few small summands already close every hole
print("\nB alone is syndetic with short gaps; a handful of spread out elements of A make A+B thick")
