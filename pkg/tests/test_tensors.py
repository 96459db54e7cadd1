import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ttnmin.errors import AxisMismatch, NonFiniteEntries, ShapeMismatch
from ttnmin.tensors import (
    Bond,
    DenseTensor,
    FlatteningSpec,
    Physical,
    flatten,
    mode_multiply,
    multilinear_rank,
    numerical_rank,
    outer,
    svd,
    unflatten,
)


def labels(k):
    return [Physical(i) for i in range(k)]


def tucker_product(core, factors):
    t = np.asarray(core)
    for k, a in enumerate(factors):
        t = np.moveaxis(np.tensordot(a, t, axes=([1], [k])), 0, k)
    return t


def unfolding_rank(arr, mode, tol=1e-9):
    # reference unfolding via moveaxis/reshape, independent of FlatteningSpec
    m = np.moveaxis(arr, mode, 0).reshape(arr.shape[mode], -1)
    s = np.linalg.svd(m, compute_uv=False)
    return int(np.sum(s > tol * s[0])) if s[0] > 0 else 0


def test_dense_tensor_rejects_bad_labels():
    with pytest.raises(AxisMismatch):
        DenseTensor(np.zeros((2, 2)), [Physical(1), Physical(1)])
    with pytest.raises(AxisMismatch):
        DenseTensor(np.zeros((2, 2)), [Physical(1)])


def test_bond_label_is_undirected():
    assert Bond(3, 1) == Bond(1, 3) and Bond(3, 1).edge == (1, 3)


def test_dense_tensor_is_read_only():
    t = DenseTensor(np.zeros((2, 3)), labels(2))
    with pytest.raises(ValueError):
        t.data[0, 0] = 1.0


def test_mode0_unfolding_shape(rng):
    t = DenseTensor(rng.standard_normal((2, 3, 4)), labels(3))
    m = flatten(t, FlatteningSpec.rows(t, [Physical(0)]))
    assert m.shape == (2, 12)


def test_flatten_orders_indices_row_major(rng):
    arr = rng.standard_normal((2, 3, 4))
    t = DenseTensor(arr, labels(3))
    m = flatten(t, FlatteningSpec((Physical(2), Physical(0)), (Physical(1),)))
    for a, b, c in itertools.product(range(2), range(3), range(4)):
        assert m[c * 2 + a, b] == arr[a, b, c]


@pytest.mark.parametrize("rows", [(0,), (1,), (0, 2), (2, 1), (0, 1, 2)])
def test_elementary_tensor_flattens_to_rank_one(rows, rng):
    vs = [rng.standard_normal(n) for n in (2, 3, 4)]
    t = outer(vs, labels(3))
    m = flatten(t, FlatteningSpec.rows(t, [Physical(i) for i in rows]))
    assert numerical_rank(m)[0] == 1
    left = np.ones(1)
    for i in rows:
        left = np.kron(left, vs[i])
    right = np.ones(1)
    for i in range(3):
        if i not in rows:
            right = np.kron(right, vs[i])
    np.testing.assert_allclose(m, np.outer(left, right), rtol=1e-14)


def test_flatten_rejects_non_bipartition(rng):
    t = DenseTensor(rng.standard_normal((2, 3)), labels(2))
    with pytest.raises(AxisMismatch):
        flatten(t, FlatteningSpec((Physical(0),), ()))
    with pytest.raises(AxisMismatch):
        flatten(t, FlatteningSpec((Physical(0),), (Physical(5),)))


def test_unflatten_mode0(rng):
    m = rng.standard_normal((2, 12))
    spec = FlatteningSpec((Physical(0),), (Physical(1), Physical(2)))
    t = unflatten(m, spec, {Physical(0): 2, Physical(1): 3, Physical(2): 4})
    assert t.dims == (2, 3, 4)
    np.testing.assert_array_equal(t.data.reshape(2, 12), m)


def test_unflatten_degenerate():
    spec = FlatteningSpec((Physical(0),), (Physical(1),))
    t = unflatten([[7.0]], spec, {Physical(0): 1, Physical(1): 1})
    assert t.dims == (1, 1) and t.data[0, 0] == 7.0


def test_unflatten_against_index_loop(rng):
    m = rng.standard_normal((6, 4))
    spec = FlatteningSpec((Physical(0), Physical(1)), (Physical(2),))
    t = unflatten(m, spec, {Physical(0): 2, Physical(1): 3, Physical(2): 4})
    expected = np.empty((2, 3, 4))
    for a, b, c in itertools.product(range(2), range(3), range(4)):
        expected[a, b, c] = m[a * 3 + b, c]
    np.testing.assert_array_equal(t.data, expected)
    # the mode-2 flattening is the transpose of the input
    m2 = flatten(t, FlatteningSpec.rows(t, [Physical(2)]))
    np.testing.assert_array_equal(m2.T, m)


def test_unflatten_shape_mismatch():
    spec = FlatteningSpec((Physical(0),), (Physical(1),))
    with pytest.raises(ShapeMismatch):
        unflatten(np.zeros((3, 3)), spec, {Physical(0): 2, Physical(1): 3})


@settings(max_examples=60)
@given(st.data())
def test_flatten_round_trip_bitwise(data):
    order = data.draw(st.integers(1, 5))
    dims = data.draw(st.lists(st.integers(1, 4), min_size=order, max_size=order))
    arr = data.draw(arrays(np.float64, dims, elements=st.floats(-1e6, 1e6, allow_nan=False)))
    lbl = labels(order)
    t = DenseTensor(arr, lbl)
    perm = data.draw(st.permutations(lbl))
    cut = data.draw(st.integers(0, order))
    spec = FlatteningSpec(tuple(perm[:cut]), tuple(perm[cut:]))
    m = flatten(t, spec)
    back = unflatten(m, spec, dict(zip(lbl, dims)), lbl)
    assert back.data.tobytes() == t.data.tobytes()
    assert flatten(back, spec).tobytes() == m.tobytes()


def test_numerical_rank_identity():
    r, s = numerical_rank(np.eye(3), 1e-9)
    assert r == 3
    np.testing.assert_allclose(s, [1, 1, 1])


def test_numerical_rank_zero():
    assert numerical_rank(np.zeros((5, 5)))[0] == 0
    assert numerical_rank(np.zeros((0, 4)))[0] == 0


def test_numerical_rank_low_rank_product(rng):
    m = rng.standard_normal((5, 2)) @ rng.standard_normal((2, 5))
    r, s = numerical_rank(m, 1e-9)
    assert r == 2
    assert s[2] / s[0] < 1e-12


def test_numerical_rank_rejects_nan():
    with pytest.raises(NonFiniteEntries):
        numerical_rank(np.array([[1.0, np.nan]]))
    with pytest.raises(NonFiniteEntries):
        numerical_rank(np.array([[np.inf]]))


@given(st.floats(1e-200, 1e200))
def test_rank_is_scale_invariant(scale):
    m = np.diag([1.0, 1e-3, 1e-12])
    assert numerical_rank(m * scale, 1e-9)[0] == 2


def test_mode_multiply_identity(rng):
    t = DenseTensor(rng.standard_normal((2, 3, 4)), labels(3))
    for k, n in enumerate(t.dims):
        out = mode_multiply(t, np.eye(n), Physical(k))
        np.testing.assert_array_equal(out.data, t.data)


def test_mode_multiply_matrix_product(rng):
    a = rng.standard_normal((3, 4))
    m = rng.standard_normal((5, 3))
    out = mode_multiply(DenseTensor(a, labels(2)), m, Physical(0))
    np.testing.assert_allclose(out.data, m @ a, rtol=1e-13)


def test_mode_multiply_loop_oracle(rng):
    arr = rng.standard_normal((2, 3, 4))
    m = rng.standard_normal((5, 3))
    out = mode_multiply(DenseTensor(arr, labels(3)), m, Physical(1))
    expected = np.zeros((2, 5, 4))
    for a, j, c in itertools.product(range(2), range(5), range(4)):
        for b in range(3):
            expected[a, j, c] += m[j, b] * arr[a, b, c]
    np.testing.assert_allclose(out.data, expected, rtol=1e-13, atol=1e-14)


def test_mode_multiply_rank_one_projector(rng):
    t = DenseTensor(rng.standard_normal((3, 3, 3)), labels(3))
    for k in range(3):
        v = rng.standard_normal((3, 1))
        proj = v @ v.T / (v.T @ v)
        assert multilinear_rank(mode_multiply(t, proj, Physical(k)))[k] <= 1


def test_mode_multiply_shape_mismatch(rng):
    t = DenseTensor(rng.standard_normal((2, 3)), labels(2))
    with pytest.raises(ShapeMismatch):
        mode_multiply(t, np.eye(4), Physical(0))
    with pytest.raises(AxisMismatch):
        mode_multiply(t, np.eye(2), Physical(9))


def test_multilinear_rank_elementary(rng):
    for order in range(1, 5):
        t = outer([rng.standard_normal(3) for _ in range(order)], labels(order))
        assert multilinear_rank(t) == (1,) * order


def test_multilinear_rank_zero():
    assert multilinear_rank(DenseTensor(np.zeros((2, 3, 4)), labels(3))) == (0, 0, 0)


def test_multilinear_rank_tucker_product(rng):
    core = rng.standard_normal((2, 2, 3))
    factors = [rng.standard_normal((n, r)) for n, r in zip((2, 3, 4), (2, 2, 3))]
    arr = tucker_product(core, factors)
    expected = tuple(unfolding_rank(arr, k) for k in range(3))
    assert expected == (2, 2, 3)
    assert multilinear_rank(DenseTensor(arr, labels(3))) == expected


def random_low_rank_tensor(rng, dims):
    ranks = [int(rng.integers(1, n + 1)) for n in dims]
    core = rng.standard_normal(ranks)
    return tucker_product(core, [rng.standard_normal((n, r)) for n, r in zip(dims, ranks)])


def test_flattening_rank_transposition_invariance(rng):
    for _ in range(50):
        order = int(rng.integers(2, 5))
        dims = [int(n) for n in rng.integers(1, 5, size=order)]
        t = DenseTensor(random_low_rank_tensor(rng, dims), labels(order))
        rows = [l for l in t.labels if rng.random() < 0.5]
        spec = FlatteningSpec.rows(t, rows)
        assert numerical_rank(flatten(t, spec))[0] == numerical_rank(flatten(t, spec.transposed()))[0]


def test_multilinear_rank_bounds(rng):
    for _ in range(50):
        order = int(rng.integers(1, 5))
        dims = [int(n) for n in rng.integers(1, 5, size=order)]
        t = DenseTensor(random_low_rank_tensor(rng, dims), labels(order))
        total = int(np.prod(dims))
        for k, mu in enumerate(multilinear_rank(t)):
            assert mu <= min(dims[k], total // dims[k])


def test_orthonormal_rows_never_increase_rank(rng):
    for _ in range(30):
        dims = [int(n) for n in rng.integers(2, 5, size=3)]
        t = DenseTensor(random_low_rank_tensor(rng, dims), labels(3))
        k = int(rng.integers(0, 3))
        rows = int(rng.integers(1, dims[k] + 1))
        q = np.linalg.qr(rng.standard_normal((dims[k], rows)))[0].T
        before, after = multilinear_rank(t), multilinear_rank(mode_multiply(t, q, Physical(k)))
        assert all(a <= b for a, b in zip(after, before))


def test_invertible_matrix_preserves_rank(rng):
    for _ in range(30):
        dims = [int(n) for n in rng.integers(2, 5, size=3)]
        t = DenseTensor(random_low_rank_tensor(rng, dims), labels(3))
        k = int(rng.integers(0, 3))
        x = rng.standard_normal((dims[k], dims[k]))
        assert multilinear_rank(mode_multiply(t, x, Physical(k))) == multilinear_rank(t)


@pytest.mark.parametrize("shape", [(1, 1), (3, 7), (7, 3), (50, 20), (200, 200)])
def test_svd_reconstruction(shape, rng):
    m = rng.standard_normal(shape)
    u, s, vt = svd(m)
    assert np.all(np.diff(s) <= 0)
    assert np.linalg.norm(u @ np.diag(s) @ vt - m) / np.linalg.norm(m) <= 1e-12
