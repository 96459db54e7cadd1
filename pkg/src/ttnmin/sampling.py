"""Random tree networks and the genericity experiment.

Entries are i.i.d. standard normal drawn from numpy's counter-based Philox
bit generator keyed by the seed.  Local tensors are filled vertex by vertex in
ascending id, each in the canonical axis order of
:func:`ttnmin.network.local_labels`, so a ``(topology, seed)`` pair always
yields the same bytes.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .network import (
    TreeNetwork,
    apply_edge_factors,
    check_minimality,
    local_labels,
    local_shape,
    minimality_margin,
)
from .tensors import DEFAULT_TOL, DenseTensor
from .topology import TreeTopology

U64 = 2**64


def make_rng(seed: int) -> np.random.Generator:
    """Philox generator for a seed reduced modulo 2**64."""
    return np.random.Generator(np.random.Philox(int(seed) % U64))


def sample_network(topology: TreeTopology, seed: int = 0) -> TreeNetwork:
    """Fill every local tensor with standard normal entries.

    Admissibility is not required; sampling an inadmissible topology is how
    negative tests are built.
    """
    rng = make_rng(seed)
    tensors = {
        i: DenseTensor(rng.standard_normal(local_shape(topology, i)), local_labels(topology, i))
        for i in topology.vertices
    }
    return TreeNetwork(topology, tensors)


def inflate_bond(net: TreeNetwork, u: int, v: int, new_bond: int, rng: np.random.Generator) -> TreeNetwork:
    """Grow bond ``{u, v}`` to ``new_bond`` without changing the tensor.

    Inserts ``P`` at ``u`` and ``Q = P (P^T P)^-1`` at ``v`` with ``P`` a random
    ``new_bond x r`` matrix, so ``P^T Q = I`` while ``P Q^T`` has rank ``r``.
    """
    r = net.topology.bond(u, v)
    if new_bond < r:
        raise ValueError(f"cannot inflate bond {r} down to {new_bond}")
    p = rng.standard_normal((new_bond, r))
    q = p @ np.linalg.inv(p.T @ p)
    return apply_edge_factors(net, u, v, p, q)


@dataclass
class GenericityResult:
    trials: int
    minimal_count: int
    seed: int
    tol_rel: float
    failure_margins: list[float] = field(default_factory=list)


def genericity_experiment(
    topology: TreeTopology, trials: int, seed: int = 0, tol_rel: float = DEFAULT_TOL
) -> GenericityResult:
    """Sample ``trials`` networks (trial ``k`` uses seed ``seed + k``) and count
    how many pass :func:`check_minimality`.

    ``failure_margins[k]`` is the smallest ``sigma_{r_ij} / sigma_1`` over the
    local flattenings of trial ``k``; values near ``tol_rel`` flag verdicts
    that hinge on the tolerance.
    """
    if trials < 0:
        raise ValueError("trials must be non-negative")
    count, margins = 0, []
    for k in range(trials):
        net = sample_network(topology, (seed + k) % U64)
        if check_minimality(net, tol_rel).minimal:
            count += 1
        margins.append(minimality_margin(net))
    return GenericityResult(trials, count, seed, tol_rel, margins)
