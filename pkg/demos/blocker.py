"""Build a dense B for which A + B misses one coset, from a finite-group certificate.

    python demos/blocker.py
"""

from fractions import Fraction

from sumsetlab import finitegroup as fg
from sumsetlab.windowsets import banach_density_estimate, piecewise_syndetic_scan, sumset
from sumsetlab.integersets import example_set

G = fg.parse_group("product:4,9,5,7,11,13")
window = (0, 10**6)

for kind in ("squares", "primes"):
    B, cert = fg.build_blocker(kind, G, Fraction(1, 5), 0, window)
    print(f"{kind}: E = image of A in G has {cert.E.size} of {G.order} residues")
    for (m, r), cost in zip(cert.cosets, cert.costs):
        print(f"  omitted coset {r} + H{m}, cost {cost}")
    print(f"  m(K) = {cert.measure_K}, replay ok: {cert.replay()}")
    dens = banach_density_estimate(B, 10**4)
    print(f"  Banach density of B at M=10^4: {dens.value} ~ {float(dens.value):.4f}")
    scan = piecewise_syndetic_scan(sumset(example_set(kind, window), B, window), 24, 200)
    # one omitted coset is periodic, so A+B still has long runs at this scale
    print(f"  pws scan of A+B: {scan.verdict}, longest runs {list(scan.longest_runs)}\n")
