"""
Random networks are minimal when they can be
============================================

Sample many networks with Gaussian entries on the same tree.  On an
admissible tree every sample is minimal; on an inadmissible one none is.
"""

from ttnmin import genericity_experiment, path_topology, star_topology

train = path_topology([3, 3, 3, 3], [2, 3, 2])
res = genericity_experiment(train, trials=200, seed=0)
print(f"{res.minimal_count}/{res.trials} minimal, worst margin {min(res.failure_margins):.3g}")

star = star_topology([10, 10, 10], [2, 2, 5])
res = genericity_experiment(star, trials=50, seed=0)
print(f"{res.minimal_count}/{res.trials} minimal")
