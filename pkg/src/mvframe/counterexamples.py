"""Operators and witnesses showing where matrix-valued bases break down.

* ``entry_swap``: f11 <-> f12. Bounded, bijective, self-adjoint for the
  trace inner product, but not adjointable for the matrix-valued one.
* Its image of the diagonal orthonormal basis is not a frame; the function
  with a single nonzero entry in position (2, 1) has zero coefficients.
* ``pointwise_transpose``: maps the diagonal basis to itself (which is its
  own dual) and yet is not a positive operator.
"""

from __future__ import annotations

import numpy as np

from .errors import UnsupportedShapeError
from .operators import LinOp, entry_permutation
from .space import MatFn, SpaceSpec


def entry_swap(spec: SpaceSpec) -> LinOp:
    if spec.r < 2:
        raise UnsupportedShapeError("entry swap needs at least two columns")
    return entry_permutation(spec, {(0, 0): (0, 1), (0, 1): (0, 0)})


def pointwise_transpose(spec: SpaceSpec) -> LinOp:
    if spec.s != spec.r:
        raise UnsupportedShapeError("pointwise transpose needs square matrices (s == r)")
    return entry_permutation(spec, {(i, j): (j, i) for i in range(spec.s) for j in range(spec.r)})


def lower_left_witness(spec: SpaceSpec, h) -> MatFn:
    """[[0, 0], [h, 0]]: orthogonal to every entry-swapped diagonal basis element."""
    if spec.s < 2:
        raise UnsupportedShapeError("witness needs at least two rows")
    return MatFn.from_entries(spec, {(1, 0): np.asarray(h)})


def transpose_witness(spec: SpaceSpec, h) -> MatFn:
    """[[0, h], [-h, h]] with tr<Uf, f> = -||h||^2 for the pointwise transpose U."""
    if spec.s != 2 or spec.r != 2:
        raise UnsupportedShapeError("transpose witness is defined for 2 x 2 functions")
    h = np.asarray(h)
    return MatFn.from_entries(spec, {(0, 1): h, (1, 0): -h, (1, 1): h})
