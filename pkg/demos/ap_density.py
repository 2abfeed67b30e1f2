"""Which differences d keep 3-step progressions inside Bohr(sqrt2, [0, 0.4))?

    python demos/ap_density.py
"""

import math

from sumsetlab.verify import run_experiment, PRESETS

rep = run_experiment(PRESETS["ap_density_sqrt2"])
m = rep.measured
succ = rep.witnesses["successful_d"]
print(f"{m['successful_count']} of 10^4 differences beat density {m['threshold']}")
print(f"smallest d = {m['smallest_d']}, best d = {m['best_d']} with density {m['best_density']}")
print(f"predicted from the torus alone: {m['predicted_count']}; outside region: {m['outside_region']}")

# successes are exactly the d with d*sqrt2 close to an integer
print("\n   d   ||d sqrt2||")
for d in succ[:8]:
    x = d * math.sqrt(2) % 1
    print(f"{d:>5}   {min(x, 1 - x):.5f}")
