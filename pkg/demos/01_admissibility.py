"""
Which bond dimensions can be minimal?
=====================================

A bond is only worth its size if the vertex on either end can actually fill
it.  At vertex i the bond towards j can carry at most
``dim V_i * prod(other bonds at i)`` independent directions.
"""

from ttnmin import is_admissible, local_bound, star_topology, tucker_admissible

# a Tucker-style star: center 0 carries no physical index, three leaves of size 10
ok = star_topology([10, 10, 10], [2, 2, 4])
bad = star_topology([10, 10, 10], [2, 2, 5])

print(is_admissible(ok))
print(is_admissible(bad))

# the center can feed at most 2 * 2 = 4 directions into the third bond
print("bound on bond (0, 3):", local_bound(bad, 0, 3))

# for stars the same answer comes from the classical Tucker inequalities
print(tucker_admissible([2, 2, 4], [10, 10, 10]), tucker_admissible([2, 2, 5], [10, 10, 10]))
