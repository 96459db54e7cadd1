"""Tree tensor networks: contraction, local and global ranks, minimality.

The central fact implemented here: a network is minimal for the tensor it
represents exactly when every local tensor ``T_i`` has full rank along each
incident bond, i.e. the flattening ``T_i^(j)`` (bond ``{i, j}`` as rows,
everything else as columns) has rank ``r_ij``.  :func:`check_minimality`
decides this locally without contracting anything; :func:`cross_validate`
confirms it against the ranks of the contracted tensor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from .errors import (
    AxisMismatch,
    InconsistencyDetected,
    MemoryBudgetExceeded,
    ShapeMismatch,
    UnknownVertex,
)
from .tensors import (
    DEFAULT_TOL,
    Bond,
    DenseTensor,
    FlatteningSpec,
    Physical,
    flatten,
    mode_multiply,
    numerical_rank,
    rank_from_singular_values,
    singular_values,
)
from .topology import Edge, RootedView, TreeTopology, edge_key, root_at

DEFAULT_MEMORY_BUDGET = 2**28


def local_labels(topology: TreeTopology, i: int) -> tuple:
    """Canonical axis order of the local tensor at ``i``: the physical axis,
    then one bond axis per neighbour in ascending id."""
    return (Physical(i),) + tuple(Bond(i, k) for k in topology.neighbors(i))


def local_shape(topology: TreeTopology, i: int) -> tuple[int, ...]:
    return (topology.phys_dims[i],) + tuple(topology.bond(i, k) for k in topology.neighbors(i))


class TreeNetwork:
    """A :class:`TreeTopology` with one local tensor per vertex.

    Local tensors are stored in the canonical axis order of
    :func:`local_labels`; input tensors may list their axes in any order.

    Raises:
        AxisMismatch: a local tensor has missing or foreign axes.
        ShapeMismatch: an axis length disagrees with the topology.
    """

    __slots__ = ("_topology", "_tensors")

    def __init__(self, topology: TreeTopology, tensors: Mapping[int, DenseTensor]):
        if set(tensors) != set(topology.vertices):
            raise AxisMismatch(
                f"tensors given for {sorted(tensors)}, topology has {list(topology.vertices)}"
            )
        canon = {}
        for i in topology.vertices:
            t = tensors[i]
            labels = local_labels(topology, i)
            if set(t.labels) != set(labels) or t.order != len(labels):
                raise AxisMismatch(f"vertex {i}: expected axes {labels}, got {t.labels}")
            t = t.transpose(labels)
            if t.dims != local_shape(topology, i):
                raise ShapeMismatch(
                    f"vertex {i}: axis lengths {t.dims} != {local_shape(topology, i)}"
                )
            canon[i] = t
        self._topology = topology
        self._tensors = canon

    @property
    def topology(self) -> TreeTopology:
        return self._topology

    @property
    def tensors(self) -> Mapping[int, DenseTensor]:
        return dict(self._tensors)

    def __getitem__(self, i: int) -> DenseTensor:
        try:
            return self._tensors[i]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {i!r}") from None

    def replace(self, tensors: Mapping[int, DenseTensor], bonds: Mapping[Edge, int] | None = None) -> "TreeNetwork":
        """New network with some local tensors (and optionally bonds) swapped."""
        topo = self._topology.with_bonds(bonds) if bonds else self._topology
        new = dict(self._tensors)
        new.update(tensors)
        return TreeNetwork(topo, new)

    def num_parameters(self) -> int:
        return sum(t.data.size for t in self._tensors.values())

    def __repr__(self):
        return f"TreeNetwork({self._topology!r})"


def apply_edge_factors(net: TreeNetwork, u: int, v: int, left, right) -> TreeNetwork:
    """Act on both ends of edge ``{u, v}``: ``T_u`` is mode-multiplied by
    ``left`` and ``T_v`` by ``right`` along the shared bond.

    Both matrices must have the same row count, which becomes the new bond
    dimension.  The represented tensor is preserved iff ``left.T @ right`` is
    the identity.
    """
    left, right = np.asarray(left, dtype=float), np.asarray(right, dtype=float)
    if left.shape[0] != right.shape[0]:
        raise ShapeMismatch("edge factors must have equal row counts")
    b = Bond(u, v)
    return net.replace(
        {u: mode_multiply(net[u], left, b), v: mode_multiply(net[v], right, b)},
        bonds={(u, v): left.shape[0]},
    )


def insert_gauge(net: TreeNetwork, u: int, v: int, x) -> TreeNetwork:
    """Insert ``X X^-1`` on edge ``{u, v}``; the represented tensor is unchanged."""
    x = np.asarray(x, dtype=float)
    return apply_edge_factors(net, u, v, x, np.linalg.inv(x).T)


# contraction ---------------------------------------------------------------


def _absorb(acc: DenseTensor, child: DenseTensor, bond: Bond, budget: int) -> DenseTensor:
    i, j = acc.axis(bond), child.axis(bond)
    out_size = (acc.data.size // acc.dims[i]) * (child.data.size // child.dims[j])
    if out_size > budget:
        raise MemoryBudgetExceeded(
            f"contraction over {bond!r} needs {out_size} scalars, budget is {budget}"
        )
    data = np.tensordot(acc.data, child.data, axes=([i], [j]))
    labels = [l for l in acc.labels if l != bond] + [l for l in child.labels if l != bond]
    return DenseTensor(data, labels)


def _contract_subtree(net: TreeNetwork, view: RootedView, top: int, budget: int) -> DenseTensor:
    """Contract every internal edge below ``top`` in ``view``.

    The result carries the physical axes of the subtree plus, unless ``top``
    is the root, the bond toward ``view.parent[top]``.
    """
    parent = view.parent[top]
    members = set(net.topology.side_of(top, parent)) if parent is not None else None
    partial: dict[int, DenseTensor] = {}
    for v in view.traversal:
        if members is not None and v not in members:
            continue
        acc = net[v]
        for c in view.children[v]:
            acc = _absorb(acc, partial.pop(c), Bond(v, c), budget)
        partial[v] = acc
        if v == top:
            break
    return partial[top]


def contract(
    net: TreeNetwork, root: int | None = None, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> DenseTensor:
    """Full contraction ``g(T_1 (x) ... (x) T_d)``.

    Vertices are absorbed leaves-to-root, children in ascending id.  The
    result has one physical axis per vertex in ascending vertex order
    (length-1 axes included).

    Raises:
        MemoryBudgetExceeded: the output or an intermediate exceeds
            ``memory_budget`` scalars.
    """
    total = math.prod(net.topology.phys_dims.values())
    if total > memory_budget:
        raise MemoryBudgetExceeded(f"full tensor has {total} scalars, budget is {memory_budget}")
    view = root_at(net.topology, root)
    out = _contract_subtree(net, view, view.root, memory_budget)
    return out.transpose([Physical(v) for v in net.topology.vertices])


def subtree_matrix(
    net: TreeNetwork, a: int, p: int, memory_budget: int = DEFAULT_MEMORY_BUDGET
) -> np.ndarray:
    """Matrix of the subtree hanging off ``a`` once edge ``{a, p}`` is cut.

    Rows run over the physical indices of that subtree (ascending vertex
    order), columns over the bond ``{a, p}``.
    """
    view = root_at(net.topology, p)
    part = _contract_subtree(net, view, a, memory_budget)
    rows = [Physical(v) for v in net.topology.side_of(a, p)]
    return flatten(part, FlatteningSpec(rows, (Bond(a, p),)))


def cut_flattening(t: DenseTensor, topology: TreeTopology, a: int, b: int) -> np.ndarray:
    """Flatten a full tensor along the cut of edge ``{a, b}``: physical axes on
    ``a``'s side as rows, the rest as columns."""
    side = set(topology.side_of(a, b))
    rows = [Physical(v) for v in topology.vertices if v in side]
    return flatten(t, FlatteningSpec.rows(t, rows))


# ranks ---------------------------------------------------------------------


def local_flattening(net: TreeNetwork, i: int, j: int) -> np.ndarray:
    """``T_i^(j)``: bond ``{i, j}`` as rows, physical and other bonds as columns."""
    if j not in net.topology.neighbors(i):
        raise UnknownVertex(f"{j!r} is not a neighbour of {i!r}")
    t = net[i]
    return flatten(t, FlatteningSpec.rows(t, [Bond(i, j)]))


def local_spectra(net: TreeNetwork, i: int) -> dict[int, np.ndarray]:
    """Singular values of ``T_i^(j)`` for every neighbour ``j`` of ``i``."""
    return {
        j: singular_values(local_flattening(net, i, j))
        for j in net.topology.neighbors(i)
    }


def effective_multilinear_rank(
    net: TreeNetwork, vertex: int, tol_rel: float = DEFAULT_TOL
) -> dict[int, int]:
    """Numerical rank of ``T_i^(j)`` for each neighbour ``j``."""
    return {
        j: rank_from_singular_values(s, tol_rel) for j, s in local_spectra(net, vertex).items()
    }


def edge_cut_rank(
    net: TreeNetwork,
    edge: tuple[int, int],
    tol_rel: float = DEFAULT_TOL,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
    full: DenseTensor | None = None,
) -> int:
    """Rank of the contracted tensor flattened along the cut of ``edge``.

    ``full`` may pass an already contracted tensor to avoid recontracting.
    """
    a, b = edge
    net.topology.bond(a, b)
    if full is None:
        full = contract(net, memory_budget=memory_budget)
    return numerical_rank(cut_flattening(full, net.topology, a, b), tol_rel)[0]


def _tail(s: np.ndarray, rank: int) -> tuple[float, float]:
    if s.size == 0 or s[0] == 0.0:
        return (0.0, 0.0)
    at = float(s[rank - 1] / s[0]) if rank >= 1 else 0.0
    nxt = float(s[rank] / s[0]) if rank < s.size else 0.0
    return (at, nxt)


@dataclass
class RankReport:
    """Measured ranks next to the declared bond dimensions.

    ``singular_tails`` maps ``"local:i:j"`` and ``"cut:u:v"`` to the ratios
    ``(sigma_rank / sigma_1, sigma_{rank+1} / sigma_1)``; a verdict is shaky
    when the two straddle ``tol_rel`` by less than a factor of ten.
    """

    effective_ranks: dict[tuple[int, int], int]
    bond_dims: dict[Edge, int]
    tol_rel: float
    edge_cut_ranks: dict[Edge, int] | None = None
    singular_tails: dict[str, tuple[float, float]] = field(default_factory=dict)


class Failure(NamedTuple):
    vertex: int
    neighbor: int
    measured: int
    declared: int


@dataclass
class MinimalityCertificate:
    minimal: bool
    failures: list[Failure]
    report: RankReport


def local_report(net: TreeNetwork, tol_rel: float = DEFAULT_TOL) -> RankReport:
    ranks, tails = {}, {}
    for i in net.topology.vertices:
        for j, s in local_spectra(net, i).items():
            r = rank_from_singular_values(s, tol_rel)
            ranks[(i, j)] = r
            tails[f"local:{i}:{j}"] = _tail(s, r)
    return RankReport(
        effective_ranks=ranks,
        bond_dims=dict(net.topology.bond_dims),
        tol_rel=tol_rel,
        singular_tails=tails,
    )


def check_minimality(net: TreeNetwork, tol_rel: float = DEFAULT_TOL) -> MinimalityCertificate:
    """Decide minimality from the local tensors alone.

    Minimal iff every effective multilinear rank equals the bond dimension of
    its edge.  No global contraction takes place.
    """
    report = local_report(net, tol_rel)
    failures = [
        Failure(i, j, r, net.topology.bond(i, j))
        for (i, j), r in report.effective_ranks.items()
        if r < net.topology.bond(i, j)
    ]
    return MinimalityCertificate(not failures, failures, report)


def cross_validate(
    net: TreeNetwork,
    tol_rel: float = DEFAULT_TOL,
    certificate: MinimalityCertificate | None = None,
    memory_budget: int = DEFAULT_MEMORY_BUDGET,
) -> RankReport:
    """Check a minimality certificate against the contracted tensor.

    For every edge the global cut rank must not exceed the certified bond;
    a local failure ``(i, j, mu)`` must bound the cut rank of ``{i, j}`` by
    ``mu``; and a certificate claiming minimality must see every cut rank
    equal to its bond.  ``certificate`` defaults to a fresh
    :func:`check_minimality` of ``net``.

    Returns:
        the certificate's report with ``edge_cut_ranks`` filled in.

    Raises:
        InconsistencyDetected: listing each disagreeing edge.
        MemoryBudgetExceeded: the full tensor does not fit.
    """
    if certificate is None:
        certificate = check_minimality(net, tol_rel)
    report = certificate.report
    full = contract(net, memory_budget=memory_budget)
    cuts, tails = {}, dict(report.singular_tails)
    for a, b in net.topology.edges:
        r, s = numerical_rank(cut_flattening(full, net.topology, a, b), tol_rel)
        cuts[(a, b)] = r
        tails[f"cut:{a}:{b}"] = _tail(s, r)
    report = RankReport(
        effective_ranks=dict(report.effective_ranks),
        bond_dims=dict(report.bond_dims),
        tol_rel=report.tol_rel,
        edge_cut_ranks=cuts,
        singular_tails=tails,
    )

    bad: dict[Edge, str] = {}
    for e, r in cuts.items():
        declared = report.bond_dims.get(e)
        if declared is None:
            bad[e] = "edge missing from certificate"
        elif r > declared:
            bad[e] = f"cut rank {r} exceeds bond {declared}"
        elif certificate.minimal and r != declared:
            bad[e] = f"certified minimal but cut rank {r} != bond {declared}"
    for f in certificate.failures:
        e = edge_key(f.vertex, f.neighbor)
        if e in cuts and cuts[e] > f.measured:
            bad.setdefault(e, f"cut rank {cuts[e]} exceeds local rank {f.measured} at {f.vertex}")
    if bad:
        lines = "; ".join(f"{e}: {why}" for e, why in sorted(bad.items()))
        raise InconsistencyDetected(f"inconsistent edges: {lines}", sorted(bad), report)
    return report


def minimality_margin(net: TreeNetwork) -> float:
    """Smallest ``sigma_{r_ij} / sigma_1`` over all local flattenings.

    0 means some flattening cannot reach its bond; a network is minimal at
    tolerance ``tol`` iff the margin exceeds ``tol``.
    """
    margin = 1.0
    for i in net.topology.vertices:
        for j, s in local_spectra(net, i).items():
            r = net.topology.bond(i, j)
            if s.size < r or s[0] == 0.0:
                return 0.0
            margin = min(margin, float(s[r - 1] / s[0]))
    return margin
