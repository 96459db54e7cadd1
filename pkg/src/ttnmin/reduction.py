"""Exact recompression of a tree network to minimal bond dimensions.

A vertex is refactored along one bond by an SVD of its flattening
``T_i^(j) = U diag(s) V^T``: the vertex keeps the core ``diag(s) V^T`` and the
orthonormal factor ``U`` is pushed into the neighbour.  Only singular values
at or below ``tol_rel * s_1`` are dropped, so the represented tensor is
preserved up to roundoff.

:func:`reduce_to_minimal` sweeps leaves-to-root (each vertex toward its
parent) and then root-to-leaves (each vertex toward each child).  After the
first sweep every subtree matrix is injective; the second sweep then
truncates every bond to the rank of the global cut through it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import MemoryBudgetExceeded, ShapeMismatch
from .network import (
    DEFAULT_MEMORY_BUDGET,
    TreeNetwork,
    contract,
    cut_flattening,
    local_flattening,
)
from .tensors import (
    DEFAULT_TOL,
    Bond,
    DenseTensor,
    FlatteningSpec,
    Physical,
    mode_multiply,
    numerical_rank,
    rank_from_singular_values,
    svd,
    unflatten,
)
from .topology import Edge, TreeTopology, root_at


class ReductionStep(NamedTuple):
    vertex: int
    neighbor: int
    old: int
    new: int
    discarded: float  # Frobenius norm of the dropped singular values


@dataclass
class ReductionTrace:
    steps: list[ReductionStep] = field(default_factory=list)
    before: dict[Edge, int] = field(default_factory=dict)
    after: dict[Edge, int] = field(default_factory=dict)
    reconstruction_error: float | None = None

    @property
    def truncations(self) -> list[ReductionStep]:
        return [s for s in self.steps if s.new < s.old]


def _refactor(net: TreeNetwork, i: int, j: int, tol_rel: float) -> tuple[TreeNetwork, ReductionStep]:
    if j not in net.topology.neighbors(i):
        raise ShapeMismatch(f"{{{i}, {j}}} is not an edge")
    old = net.topology.bond(i, j)
    m = local_flattening(net, i, j)
    u, s, vt = svd(m)
    mu = rank_from_singular_values(s, tol_rel)
    new = max(mu, 1)
    discarded = float(np.sqrt(np.sum(s[mu:] ** 2)))
    if new == old:
        return net, ReductionStep(i, j, old, new, discarded)

    if mu == 0:
        # rank-0 clamp: zero core, zero factor
        core = np.zeros((1, m.shape[1]))
        factor = np.zeros((old, 1))
    else:
        core = s[:mu, None] * vt[:mu]
        factor = u[:, :mu]

    ti = net[i]
    b = Bond(i, j)
    spec = FlatteningSpec.rows(ti, [b])
    dims = dict(zip(ti.labels, ti.dims))
    dims[b] = new
    new_i = unflatten(core, spec, dims, ti.labels)
    new_j = mode_multiply(net[j], factor.T, b)
    return net.replace({i: new_i, j: new_j}, bonds={(i, j): new}), ReductionStep(i, j, old, new, discarded)


def local_tucker_refactor(net: TreeNetwork, vertex: int, neighbor: int, tol_rel: float = DEFAULT_TOL) -> TreeNetwork:
    """Shrink bond ``{vertex, neighbor}`` to the rank of ``T_vertex^(neighbor)``.

    The orthonormal factor is absorbed into ``neighbor``; the contracted
    tensor is unchanged up to the dropped singular values.  A rank-0
    flattening leaves a bond of dimension 1 carrying zeros.
    """
    return _refactor(net, vertex, neighbor, tol_rel)[0]


def _relative_error(ref: DenseTensor, other: DenseTensor) -> float:
    diff = float(np.linalg.norm(ref.data - other.data))
    scale = float(np.linalg.norm(ref.data))
    return diff / scale if scale > 0 else diff


def reduce_to_minimal(
    net: TreeNetwork,
    tol_rel: float = DEFAULT_TOL,
    root: int | None = None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> tuple[TreeNetwork, ReductionTrace]:
    """Two-sweep hierarchical SVD that returns a minimal network for the
    same tensor, plus a trace of every refactoring.

    ``trace.reconstruction_error`` is the relative Frobenius distance between
    the contracted tensors before and after, or ``None`` when the full
    tensor does not fit in ``memory_budget``.
    """
    view = root_at(net.topology, root)
    trace = ReductionTrace(before=dict(net.topology.bond_dims))
    out = net
    for v in view.traversal:
        p = view.parent[v]
        if p is not None:
            out, step = _refactor(out, v, p, tol_rel)
            trace.steps.append(step)
    for v in view.depth_first():
        for c in view.children[v]:
            out, step = _refactor(out, v, c, tol_rel)
            trace.steps.append(step)
    trace.after = dict(out.topology.bond_dims)
    try:
        trace.reconstruction_error = _relative_error(
            contract(net, memory_budget=memory_budget), contract(out, memory_budget=memory_budget)
        )
    except MemoryBudgetExceeded:
        trace.reconstruction_error = None
    return out, trace


def minimal_bonds_oracle(
    t: DenseTensor,
    topology: TreeTopology,
    tol_rel: float = DEFAULT_TOL,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> dict[Edge, int]:
    """Ranks of every edge-cut flattening of a full tensor, clamped to >= 1.

    These are the smallest bonds with which ``t`` can be represented on the
    tree, computed directly from ``t`` without any network.
    """
    expected = {Physical(v): n for v, n in topology.phys_dims.items()}
    if dict(zip(t.labels, t.dims)) != expected:
        raise ShapeMismatch(f"tensor axes {dict(zip(t.labels, t.dims))} do not match {expected}")
    if t.data.size > memory_budget:
        raise MemoryBudgetExceeded(f"tensor has {t.data.size} scalars, budget is {memory_budget}")
    return {
        (a, b): max(numerical_rank(cut_flattening(t, topology, a, b), tol_rel)[0], 1)
        for a, b in topology.edges
    }
