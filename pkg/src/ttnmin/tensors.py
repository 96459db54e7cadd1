"""Dense labelled tensors, flattenings, mode products and numerical rank.

Every axis of a :class:`DenseTensor` carries a label: either the physical
space of a vertex (:class:`Physical`) or the bond space of an edge
(:class:`Bond`).  A bond and its dual are not told apart; over the reals with
fixed bases the pairing between them is the ordinary dot product.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence, Union

import numpy as np

from .errors import AxisMismatch, NonFiniteEntries, ShapeMismatch

DEFAULT_TOL = 1e-9


@dataclass(frozen=True, order=True)
class Physical:
    vertex: int

    def __repr__(self):
        return f"P({self.vertex})"


@dataclass(frozen=True, order=True)
class Bond:
    u: int
    v: int

    def __post_init__(self):
        if self.u == self.v:
            raise AxisMismatch(f"bond label needs two distinct vertices, got {self.u}")
        if self.u > self.v:
            u, v = self.v, self.u
            object.__setattr__(self, "u", u)
            object.__setattr__(self, "v", v)

    @property
    def edge(self) -> tuple[int, int]:
        return (self.u, self.v)

    def __repr__(self):
        return f"B({self.u},{self.v})"


AxisLabel = Union[Physical, Bond]


class DenseTensor:
    """Immutable real tensor with one label per axis.

    Args:
        data: array-like of reals; copied and stored as a read-only float64
            C-contiguous array.
        labels: one distinct :data:`AxisLabel` per axis.
    """

    __slots__ = ("_data", "_labels")

    def __init__(self, data, labels: Sequence[AxisLabel]):
        arr = np.array(data, dtype=np.float64, order="C", copy=True)
        labels = tuple(labels)
        if arr.ndim != len(labels):
            raise AxisMismatch(f"{arr.ndim}-way array given {len(labels)} labels")
        if len(set(labels)) != len(labels):
            raise AxisMismatch(f"duplicate axis labels in {labels}")
        if any(n < 1 for n in arr.shape):
            raise ShapeMismatch(f"axis lengths must be positive, got {arr.shape}")
        arr.setflags(write=False)
        self._data = arr
        self._labels = labels

    @classmethod
    def from_flat(cls, dims: Sequence[int], flat, labels: Sequence[AxisLabel]) -> "DenseTensor":
        """Build from a row-major flat buffer."""
        flat = np.asarray(flat, dtype=np.float64).ravel()
        if flat.size != math.prod(dims):
            raise ShapeMismatch(f"{flat.size} values cannot fill dims {tuple(dims)}")
        return cls(flat.reshape(tuple(dims)), labels)

    @property
    def data(self) -> np.ndarray:
        return self._data

    @property
    def labels(self) -> tuple[AxisLabel, ...]:
        return self._labels

    @property
    def dims(self) -> tuple[int, ...]:
        return self._data.shape

    @property
    def order(self) -> int:
        return self._data.ndim

    def axis(self, label: AxisLabel) -> int:
        try:
            return self._labels.index(label)
        except ValueError:
            raise AxisMismatch(f"no axis {label!r} in {self._labels}") from None

    def dim(self, label: AxisLabel) -> int:
        return self._data.shape[self.axis(label)]

    def transpose(self, labels: Sequence[AxisLabel]) -> "DenseTensor":
        """Same tensor with axes permuted into the given label order."""
        labels = tuple(labels)
        if set(labels) != set(self._labels) or len(labels) != len(self._labels):
            raise AxisMismatch(f"{labels} is not a permutation of {self._labels}")
        if labels == self._labels:
            return self
        return DenseTensor(np.transpose(self._data, [self.axis(l) for l in labels]), labels)

    def relabel(self, mapping: Mapping[AxisLabel, AxisLabel]) -> "DenseTensor":
        return DenseTensor(self._data, [mapping.get(l, l) for l in self._labels])

    def norm(self) -> float:
        return float(np.linalg.norm(self._data))

    def __repr__(self):
        return f"DenseTensor(dims={self.dims}, labels={list(self._labels)})"


@dataclass(frozen=True)
class FlatteningSpec:
    """Bipartition of a tensor's axes into matrix rows and columns."""

    row_axes: tuple[AxisLabel, ...]
    col_axes: tuple[AxisLabel, ...]

    def __post_init__(self):
        object.__setattr__(self, "row_axes", tuple(self.row_axes))
        object.__setattr__(self, "col_axes", tuple(self.col_axes))
        both = self.row_axes + self.col_axes
        if len(set(both)) != len(both):
            raise AxisMismatch("row and column axes must be disjoint and distinct")

    @classmethod
    def rows(cls, t: DenseTensor, row_axes: Sequence[AxisLabel]) -> "FlatteningSpec":
        """Rows as given; columns are the remaining axes in ``t``'s order."""
        row_axes = tuple(row_axes)
        for l in row_axes:
            t.axis(l)
        return cls(row_axes, tuple(l for l in t.labels if l not in row_axes))

    def transposed(self) -> "FlatteningSpec":
        return FlatteningSpec(self.col_axes, self.row_axes)


def flatten(t: DenseTensor, spec: FlatteningSpec) -> np.ndarray:
    """Matrix unfolding ``T_(S)`` of ``t``.

    Rows run over the multi-index of ``spec.row_axes`` and columns over that
    of ``spec.col_axes``, both row-major in the listed order.
    """
    if set(spec.row_axes + spec.col_axes) != set(t.labels) or (
        len(spec.row_axes) + len(spec.col_axes) != t.order
    ):
        raise AxisMismatch(f"{spec} is not a bipartition of {t.labels}")
    perm = [t.axis(l) for l in spec.row_axes + spec.col_axes]
    nrows = math.prod(t.dims[t.axis(l)] for l in spec.row_axes)
    ncols = math.prod(t.dims[t.axis(l)] for l in spec.col_axes)
    return np.ascontiguousarray(np.transpose(t.data, perm)).reshape(nrows, ncols)


def unflatten(
    m,
    spec: FlatteningSpec,
    dims: Mapping[AxisLabel, int],
    labels: Sequence[AxisLabel] | None = None,
) -> DenseTensor:
    """Inverse of :func:`flatten`.

    Args:
        m: matrix of shape ``(prod rows, prod cols)``.
        spec: the bipartition ``m`` was flattened with.
        dims: axis length for every label in ``spec``.
        labels: axis order of the result; defaults to rows then columns.
    """
    m = np.asarray(m, dtype=np.float64)
    order = spec.row_axes + spec.col_axes
    try:
        shape = [dims[l] for l in order]
    except KeyError as exc:
        raise AxisMismatch(f"no length given for axis {exc.args[0]!r}") from None
    nrows = math.prod(shape[: len(spec.row_axes)])
    ncols = math.prod(shape[len(spec.row_axes):])
    if m.ndim != 2 or m.shape != (nrows, ncols):
        raise ShapeMismatch(f"matrix of shape {m.shape} does not match {dict(dims)}")
    t = DenseTensor(m.reshape(shape), order)
    return t if labels is None else t.transpose(labels)


def svd(m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = U @ diag(s) @ Vt`` with ``s`` descending."""
    m = np.asarray(m, dtype=np.float64)
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")
    if m.size == 0:
        k = 0
        return np.zeros((m.shape[0], k)), np.zeros(k), np.zeros((k, m.shape[1]))
    return np.linalg.svd(m, full_matrices=False)


def singular_values(m) -> np.ndarray:
    """Singular values of a finite matrix, descending; empty for empty input."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeMismatch(f"expected a matrix, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise NonFiniteEntries("matrix has NaN or infinite entries")
    if m.size == 0:
        return np.zeros(0)
    return np.linalg.svd(m, compute_uv=False)


def rank_from_singular_values(s: np.ndarray, tol_rel: float = DEFAULT_TOL) -> int:
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol_rel * s[0]))


def numerical_rank(m, tol_rel: float = DEFAULT_TOL) -> tuple[int, np.ndarray]:
    """Number of singular values above ``tol_rel * sigma_1``.

    Returns:
        ``(rank, singular_values)`` with the singular values descending.
    """
    if not tol_rel > 0:
        raise ValueError("tol_rel must be positive")
    s = singular_values(m)
    return rank_from_singular_values(s, tol_rel), s


def mode_multiply(t: DenseTensor, m, axis: AxisLabel) -> DenseTensor:
    """Contract the columns of ``m`` with axis ``axis`` of ``t``.

    The axis keeps its label and position; its new length is ``m.shape[0]``.
    """
    m = np.asarray(m, dtype=np.float64)
    k = t.axis(axis)
    if m.ndim != 2 or m.shape[1] != t.dims[k]:
        raise ShapeMismatch(f"matrix {m.shape} cannot act on axis {axis!r} of length {t.dims[k]}")
    out = np.tensordot(m, t.data, axes=([1], [k]))
    return DenseTensor(np.moveaxis(out, 0, k), t.labels)


def multilinear_rank(t: DenseTensor, tol_rel: float = DEFAULT_TOL) -> tuple[int, ...]:
    """Tuple of ranks of the single-mode unfoldings, in axis order."""
    return tuple(
        numerical_rank(flatten(t, FlatteningSpec.rows(t, [l])), tol_rel)[0] for l in t.labels
    )


def outer(vectors: Sequence, labels: Sequence[AxisLabel]) -> DenseTensor:
    """Elementary tensor ``v_1 (x) ... (x) v_k``."""
    out = np.ones(())
    for v in vectors:
        out = np.multiply.outer(out, np.asarray(v, dtype=np.float64))
    return DenseTensor(out, labels)
