"""Tree graphs carrying physical and bond dimensions.

A :class:`TreeTopology` is immutable and always valid: the constructor runs
:func:`validate` and refuses anything that is not a finite tree with positive
dimensions.  Edges are stored undirected under the canonical key ``(u, v)``
with ``u < v``; an orientation is derived on demand with :func:`root_at`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .errors import (
    CycleDetected,
    Disconnected,
    DuplicateEdge,
    NonPositiveDimension,
    TopologyError,
    UnknownVertex,
)

Edge = tuple[int, int]

SATURATION_CAP = 2**63 - 1


def edge_key(u: int, v: int) -> Edge:
    """Canonical undirected key for the edge between ``u`` and ``v``."""
    return (u, v) if u < v else (v, u)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def _check(phys_dims: Mapping[int, int], edges: Sequence[tuple[int, int, int]]) -> None:
    for v, n in phys_dims.items():
        if not _is_int(v) or v < 0:
            raise TopologyError(f"vertex id must be a non-negative integer, got {v!r}")
        if not _is_int(n) or n < 1:
            raise NonPositiveDimension(f"vertex {v}: physical dimension {n!r} < 1")
    if not phys_dims:
        raise TopologyError("a tree needs at least one vertex")

    seen: set[Edge] = set()
    for u, v, r in edges:
        for w in (u, v):
            if w not in phys_dims:
                raise UnknownVertex(f"edge ({u}, {v}) references unknown vertex {w!r}")
        if u == v:
            raise CycleDetected(f"self-loop at vertex {u}")
        if not _is_int(r) or r < 1:
            raise NonPositiveDimension(f"edge ({u}, {v}): bond dimension {r!r} < 1")
        key = edge_key(u, v)
        if key in seen:
            raise DuplicateEdge(f"edge {key} listed more than once")
        seen.add(key)

    # union-find: the first edge joining two already-connected vertices closes a cycle
    parent = {v: v for v in phys_dims}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v, _ in edges:
        ru, rv = find(u), find(v)
        if ru == rv:
            raise CycleDetected(f"edge {edge_key(u, v)} closes a cycle")
        parent[ru] = rv

    roots = {find(v) for v in phys_dims}
    if len(roots) > 1:
        anchor = find(min(phys_dims))
        stray = sorted(v for v in phys_dims if find(v) != anchor)
        raise Disconnected(f"vertices {stray} are not connected to vertex {min(phys_dims)}")


class TreeTopology:
    """A tree ``G = (V, E)`` with a physical dimension per vertex and a bond
    dimension per edge.

    Args:
        phys_dims: vertex id -> dimension of the physical space at that vertex.
            A value of 1 encodes a vertex without physical output.
        edges: ``(u, v, bond)`` triples, in either vertex order.

    Raises:
        CycleDetected, Disconnected, NonPositiveDimension, DuplicateEdge,
        UnknownVertex: if the data is not a valid tree.
    """

    __slots__ = ("_phys", "_bonds", "_nbrs")

    def __init__(self, phys_dims: Mapping[int, int], edges: Iterable[tuple[int, int, int]] = ()):
        phys = dict(phys_dims)
        edges = [tuple(e) for e in edges]
        _check(phys, edges)
        self._phys = MappingProxyType(dict(sorted(phys.items())))
        self._bonds = MappingProxyType(
            dict(sorted((edge_key(u, v), r) for u, v, r in edges))
        )
        nbrs: dict[int, list[int]] = {v: [] for v in self._phys}
        for u, v in self._bonds:
            nbrs[u].append(v)
            nbrs[v].append(u)
        self._nbrs = MappingProxyType({v: tuple(sorted(ns)) for v, ns in nbrs.items()})

    @property
    def vertices(self) -> tuple[int, ...]:
        return tuple(self._phys)

    @property
    def phys_dims(self) -> Mapping[int, int]:
        return self._phys

    @property
    def bond_dims(self) -> Mapping[Edge, int]:
        return self._bonds

    @property
    def edges(self) -> tuple[Edge, ...]:
        return tuple(self._bonds)

    def neighbors(self, v: int) -> tuple[int, ...]:
        try:
            return self._nbrs[v]
        except KeyError:
            raise UnknownVertex(f"unknown vertex {v!r}") from None

    def bond(self, u: int, v: int) -> int:
        try:
            return self._bonds[edge_key(u, v)]
        except KeyError:
            raise UnknownVertex(f"no edge between {u!r} and {v!r}") from None

    def with_bonds(self, bonds: Mapping[Edge, int]) -> "TreeTopology":
        """Copy with some bond dimensions replaced (keys in either order)."""
        new = dict(self._bonds)
        for (u, v), r in bonds.items():
            key = edge_key(u, v)
            if key not in new:
                raise UnknownVertex(f"no edge between {u!r} and {v!r}")
            new[key] = r
        return TreeTopology(self._phys, [(u, v, r) for (u, v), r in new.items()])

    def relabel(self, mapping: Mapping[int, int]) -> "TreeTopology":
        """Image of this topology under a vertex relabeling."""
        return TreeTopology(
            {mapping[v]: n for v, n in self._phys.items()},
            [(mapping[u], mapping[v], r) for (u, v), r in self._bonds.items()],
        )

    def side_of(self, a: int, b: int) -> tuple[int, ...]:
        """Vertices in the component containing ``a`` once edge ``{a, b}`` is cut."""
        self.bond(a, b)
        out, stack, seen = [], [a], {a, b}
        while stack:
            x = stack.pop()
            out.append(x)
            for y in self._nbrs[x]:
                if y not in seen:
                    seen.add(y)
                    stack.append(y)
        return tuple(sorted(out))

    def __eq__(self, other):
        if not isinstance(other, TreeTopology):
            return NotImplemented
        return self._phys == other._phys and self._bonds == other._bonds

    def __hash__(self):
        return hash((tuple(self._phys.items()), tuple(self._bonds.items())))

    def __repr__(self):
        bonds = ", ".join(f"{u}-{v}:{r}" for (u, v), r in self._bonds.items())
        return f"TreeTopology(phys={dict(self._phys)}, bonds=[{bonds}])"


def validate(topology: TreeTopology) -> None:
    """Re-check every tree invariant; raises the matching TopologyError subclass."""
    _check(
        dict(topology.phys_dims),
        [(u, v, r) for (u, v), r in topology.bond_dims.items()],
    )


def path_topology(phys_dims: Sequence[int], bonds: Sequence[int]) -> TreeTopology:
    """Tensor-train path ``1 - 2 - ... - d``."""
    if len(bonds) != max(len(phys_dims) - 1, 0):
        raise TopologyError("a path on d vertices needs d - 1 bonds")
    return TreeTopology(
        {i + 1: n for i, n in enumerate(phys_dims)},
        [(i + 1, i + 2, r) for i, r in enumerate(bonds)],
    )


def star_topology(leaf_dims: Sequence[int], bonds: Sequence[int], center_dim: int = 1) -> TreeTopology:
    """Star with center 0 and leaves ``1..d``; ``center_dim=1`` gives a Tucker graph."""
    if len(leaf_dims) != len(bonds):
        raise TopologyError("one bond per leaf required")
    phys = {0: center_dim}
    phys.update({i + 1: n for i, n in enumerate(leaf_dims)})
    return TreeTopology(phys, [(0, i + 1, r) for i, r in enumerate(bonds)])


@dataclass(frozen=True)
class RootedView:
    """Orientation of a tree toward ``root``.

    ``traversal`` lists every vertex after all of its children (post-order,
    children visited in ascending id).
    """

    root: int
    parent: Mapping[int, int | None]
    children: Mapping[int, tuple[int, ...]]
    traversal: tuple[int, ...]

    def depth_first(self) -> tuple[int, ...]:
        """Root-to-leaves order: every vertex before its children."""
        return tuple(reversed(self.traversal))


def root_at(topology: TreeTopology, root: int | None = None) -> RootedView:
    """Orient ``topology`` toward ``root`` (default: the smallest vertex id)."""
    if root is None:
        root = topology.vertices[0]
    if root not in topology.phys_dims:
        raise UnknownVertex(f"unknown root {root!r}")
    parent: dict[int, int | None] = {root: None}
    children: dict[int, tuple[int, ...]] = {}
    order: list[int] = []
    # iterative post-order; children ascending
    stack: list[tuple[int, bool]] = [(root, False)]
    while stack:
        v, expanded = stack.pop()
        if expanded:
            order.append(v)
            continue
        kids = tuple(w for w in topology.neighbors(v) if w != parent[v])
        children[v] = kids
        for w in kids:
            parent[w] = v
        stack.append((v, True))
        stack.extend((w, False) for w in reversed(kids))
    return RootedView(
        root=root,
        parent=MappingProxyType(parent),
        children=MappingProxyType(children),
        traversal=tuple(order),
    )


class Violation(NamedTuple):
    vertex: int
    neighbor: int
    bond: int
    bound: int  # saturated at SATURATION_CAP


@dataclass(frozen=True)
class AdmissibilityVerdict:
    admissible: bool
    violations: tuple[Violation, ...] = ()

    def __bool__(self):
        return self.admissible


def _saturating_prod(values: Iterable[int], start: int = 1) -> int:
    acc = start
    for x in values:
        acc = acc * x
        if acc >= SATURATION_CAP:
            return SATURATION_CAP
    return acc


def local_bound(topology: TreeTopology, i: int, j: int) -> int:
    """``dim V_i`` times the bonds at ``i`` other than ``{i, j}``, saturated."""
    return _saturating_prod(
        (topology.bond(i, k) for k in topology.neighbors(i) if k != j),
        start=topology.phys_dims[i],
    )


def is_admissible(topology: TreeTopology) -> AdmissibilityVerdict:
    """Check ``r_ij <= dim V_i * prod_{k in nb(i), k != j} r_ik`` at every
    vertex ``i`` and every neighbour ``j``; all violations are listed."""
    violations = []
    for i in topology.vertices:
        for j in topology.neighbors(i):
            r = topology.bond(i, j)
            bound = local_bound(topology, i, j)
            if r > bound:
                violations.append(Violation(i, j, r, bound))
    return AdmissibilityVerdict(not violations, tuple(violations))


def tucker_admissible(bonds: Sequence[int], leaf_dims: Sequence[int]) -> bool:
    """Tucker inequalities for a Tucker graph with bonds ``r_0i``:
    ``r_0i <= prod_{j != i} r_0j`` and ``r_0i <= dim V_i`` for every leaf."""
    bonds = list(bonds)
    for i, (r, n) in enumerate(zip(bonds, leaf_dims)):
        others = math.prod(bonds[:i] + bonds[i + 1:])
        if r > others or r > n:
            return False
    return True
