import itertools
import math

import numpy as np
import pytest
from hypothesis import strategies as st

from ttnmin.topology import TreeTopology, is_admissible

# every unlabeled tree on <= 5 vertices, as parent lists (vertex k+2 hangs off parents[k])
TREE_SHAPES = {
    "single": [],
    "edge": [1],
    "path3": [1, 2],
    "path4": [1, 2, 3],
    "star4": [1, 1, 1],
    "path5": [1, 2, 3, 4],
    "star5": [1, 1, 1, 1],
    "fork5": [1, 2, 2, 2],
}


def tree_from_parents(parents, phys, bonds):
    return TreeTopology(
        {i + 1: n for i, n in enumerate(phys)},
        [(k + 2, p, r) for k, (p, r) in enumerate(zip(parents, bonds))],
    )


def random_tree(rng, n, max_phys=4, max_bond=4, min_phys=1):
    parents = [int(rng.integers(1, k + 2)) for k in range(n - 1)]
    phys = [int(rng.integers(min_phys, max_phys + 1)) for _ in range(n)]
    bonds = [int(rng.integers(1, max_bond + 1)) for _ in range(n - 1)]
    return tree_from_parents(parents, phys, bonds)


def random_admissible_tree(rng, max_vertices=6, max_phys=4, max_bond=4):
    while True:
        topo = random_tree(rng, int(rng.integers(1, max_vertices + 1)), max_phys, max_bond)
        if is_admissible(topo).admissible:
            return topo


@st.composite
def trees(draw, max_vertices=5, max_phys=3, max_bond=4):
    n = draw(st.integers(1, max_vertices))
    parents = [draw(st.integers(1, k + 1)) for k in range(n - 1)]
    phys = draw(st.lists(st.integers(1, max_phys), min_size=n, max_size=n))
    bonds = draw(st.lists(st.integers(1, max_bond), min_size=n - 1, max_size=n - 1))
    return tree_from_parents(parents, phys, bonds)


def brute_contract(net):
    """Contraction oracle: sum over every bond index assignment of the product
    of local tensor entries, evaluated entry by entry."""
    topo = net.topology
    verts = list(topo.vertices)
    edges = list(topo.edges)
    out = np.zeros([topo.phys_dims[v] for v in verts])
    for phys_idx in itertools.product(*(range(topo.phys_dims[v]) for v in verts)):
        total = 0.0
        for bond_idx in itertools.product(*(range(topo.bond_dims[e]) for e in edges)):
            assign = dict(zip(edges, bond_idx))
            term = 1.0
            for v, a in zip(verts, phys_idx):
                idx = (a,) + tuple(assign[tuple(sorted((v, k)))] for k in topo.neighbors(v))
                term *= net[v].data[idx]
            total += term
        out[phys_idx] = total
    return out


def rel_err(a, b):
    a, b = np.asarray(a), np.asarray(b)
    scale = np.linalg.norm(b)
    return np.linalg.norm(a - b) / (scale if scale > 0 else 1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)
