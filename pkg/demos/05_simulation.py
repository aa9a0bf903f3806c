"""Exact stochastic simulation and comparison with the solved stationary law.

Run as: python3 demos/05_simulation.py
"""

import math

import crn
from crn import Box, Measure, SsaConfig

# The chain 0 <-> A with unit constants has the Poisson(1) stationary law.
sys = crn.parse_network("0 <-> A : 1, 1")

# Paths are exact (direct method) and bit-reproducible for a fixed seed.
cfg = SsaConfig(seed=42, t_end=30.0)
path = crn.ssa_path(sys, (0,), cfg)
print("first jumps:", [(round(t, 3), x) for t, x in path[:6]])
assert path == crn.ssa_path(sys, (0,), cfg)

# The time-averaged occupancy over a long run approximates the stationary
# distribution; replicas use seed + replica index.
occ = crn.occupancy_measure(sys, (0,), SsaConfig(seed=42, t_end=1e5))
pois = {(x,): math.exp(-1.0) / math.factorial(x) for x in range(30)}
z = sum(pois.values())
poisson = Measure({x: w / z for x, w in pois.items()}, normalized=True)
print("TV(occupancy, Poisson(1)):", round(crn.tv_distance(occ, poisson), 5))

# The same comparison against the linear-algebra stationary solve.
comp = crn.communicating_class(sys, (0,), Box.cube(1, 40))
dist = crn.stationary_distribution(sys, comp, allow_truncated=True)
print("TV(occupancy, solved stationary):",
      round(crn.tv_distance(occ, dist), 5))
for x in range(4):
    print(f"  x={x}: occupancy {occ((x,)):.4f}  stationary {dist((x,)):.4f}")
