"""
Squeezing out redundant bond dimension
======================================

Three matrices X (6x5), Y (5x3), Z (3x7) form a path.  Their product has rank
at most 3, so the first bond of size 5 is wasted.  Reduction finds the
smallest bonds that still represent the same tensor.
"""

import numpy as np

from ttnmin import Bond, DenseTensor, Physical, TreeNetwork, contract, path_topology, reduce_to_minimal

rng = np.random.default_rng(0)
x, y, z = rng.standard_normal((6, 5)), rng.standard_normal((5, 3)), rng.standard_normal((3, 7))

# the middle vertex has a trivial physical index of size 1
net = TreeNetwork(path_topology([6, 1, 7], [5, 3]), {
    1: DenseTensor(x, [Physical(1), Bond(1, 2)]),
    2: DenseTensor(y[None], [Physical(2), Bond(1, 2), Bond(2, 3)]),
    3: DenseTensor(z.T, [Physical(3), Bond(2, 3)]),
})

reduced, trace = reduce_to_minimal(net)
print("bonds before:", trace.before)
print("bonds after: ", trace.after)
print("reconstruction error:", trace.reconstruction_error)

for step in trace.truncations:
    print(step)

# the reduced network still multiplies out to XYZ
full = contract(reduced).data.reshape(6, 7)
print(np.allclose(full, x @ y @ z))
