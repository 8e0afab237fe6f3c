"""The space L^2(G, C^{s x r}) of matrix-valued functions on a finite group.

A function f is stored as an array of shape (s, r, |G|); flattening it in
C order puts entry (i, j) at element x at position ``(i*r + j)*|G| + index(x)``.
With this layout the trace inner product is the plain complex dot product
of coordinate vectors, and row i of f is the contiguous slice of length
r*|G| starting at ``i*r*|G|``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError
from .group import GroupSpec, scalar_onb

MAX_MATRIX_SIDE = 16


@dataclass(frozen=True)
class SpaceSpec:
    group: GroupSpec
    s: int
    r: int

    def __post_init__(self):
        if not isinstance(self.group, GroupSpec):
            object.__setattr__(self, "group", GroupSpec(tuple(self.group)))
        for name in ("s", "r"):
            v = int(getattr(self, name))
            if not 1 <= v <= MAX_MATRIX_SIDE:
                raise ValueError(f"{name} must lie in [1, {MAX_MATRIX_SIDE}], got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def of(cls, orders, s: int, r: int) -> SpaceSpec:
        if isinstance(orders, int):
            orders = (orders,)
        return cls(GroupSpec(tuple(orders)), s, r)

    @property
    def n(self) -> int:
        """Group order |G|."""
        return self.group.size

    @property
    def row_dim(self) -> int:
        """Length r*|G| of one row of a function."""
        return self.r * self.group.size

    @property
    def dim(self) -> int:
        """Complex dimension D = |G| s r of the ambient space."""
        return self.s * self.r * self.group.size

    ambient_dim = dim

    @property
    def shape(self) -> tuple[int, int, int]:
        return (self.s, self.r, self.group.size)


class MatFn:
    """Immutable matrix-valued function f: G -> C^{s x r}."""

    __slots__ = ("spec", "values")

    def __init__(self, spec: SpaceSpec, values):
        arr = np.array(values, dtype=complex)
        if arr.ndim == 1:
            if arr.size != spec.dim:
                raise DimensionError(f"vector of length {arr.size} does not fit D = {spec.dim}")
            arr = arr.reshape(spec.shape)
        if arr.shape != spec.shape:
            raise DimensionError(f"values of shape {arr.shape} do not match {spec.shape}")
        arr.setflags(write=False)
        object.__setattr__(self, "spec", spec)
        object.__setattr__(self, "values", arr)

    def __setattr__(self, name, value):
        raise AttributeError("MatFn is immutable")

    @classmethod
    def zeros(cls, spec: SpaceSpec) -> MatFn:
        return cls(spec, np.zeros(spec.shape, dtype=complex))

    @classmethod
    def from_pointwise(cls, spec: SpaceSpec, mats) -> MatFn:
        """Build from a sequence of |G| matrices of shape (s, r), in element order."""
        mats = np.asarray(mats, dtype=complex)
        return cls(spec, np.moveaxis(mats, 0, -1))

    @classmethod
    def from_entries(cls, spec: SpaceSpec, entries: dict) -> MatFn:
        """Place scalar functions (arrays over G) at given (i, j) positions."""
        out = np.zeros(spec.shape, dtype=complex)
        for (i, j), h in entries.items():
            out[i, j] = h
        return cls(spec, out)

    @classmethod
    def random(cls, spec: SpaceSpec, rng: np.random.Generator) -> MatFn:
        z = rng.standard_normal(spec.shape) + 1j * rng.standard_normal(spec.shape)
        return cls(spec, z / np.sqrt(2))

    @property
    def vector(self) -> np.ndarray:
        return self.values.reshape(-1)

    @property
    def rows(self) -> np.ndarray:
        """Array of shape (s, r*|G|); row i of f as one vector."""
        return self.values.reshape(self.spec.s, -1)

    def at(self, x) -> np.ndarray:
        """The s x r matrix f(x); ``x`` is a GroupElement or an index."""
        if not isinstance(x, (int, np.integer)):
            x = self.spec.group.index(x)
        return self.values[:, :, x]

    def __add__(self, other: MatFn) -> MatFn:
        _check_same(self, other)
        return MatFn(self.spec, self.values + other.values)

    def __sub__(self, other: MatFn) -> MatFn:
        _check_same(self, other)
        return MatFn(self.spec, self.values - other.values)

    def __neg__(self) -> MatFn:
        return MatFn(self.spec, -self.values)

    def __mul__(self, c) -> MatFn:
        return MatFn(self.spec, complex(c) * self.values)

    __rmul__ = __mul__

    def __eq__(self, other):
        return (isinstance(other, MatFn) and self.spec == other.spec
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __repr__(self):
        s, r, n = self.spec.shape
        return f"MatFn(s={s}, r={r}, |G|={n}, norm={frob_norm(self):.6g})"

    def to_dict(self) -> dict:
        v = self.vector
        return {
            "shape": list(self.spec.shape),
            "entries": [[float(z.real), float(z.imag)] for z in v],
        }

    @classmethod
    def from_dict(cls, data: dict, group: GroupSpec | None = None) -> MatFn:
        s, r, n = (int(v) for v in data["shape"])
        if group is None:
            group = GroupSpec((n,))
        elif group.size != n:
            raise DimensionError(f"shape says |G| = {n} but group has {group.size} elements")
        spec = SpaceSpec(group, s, r)
        entries = np.asarray(data["entries"], dtype=float)
        if entries.shape != (spec.dim, 2):
            raise DimensionError(f"expected {spec.dim} [re, im] pairs, got array of shape {entries.shape}")
        return cls(spec, entries[:, 0] + 1j * entries[:, 1])


def _check_same(f: MatFn, g: MatFn):
    if f.spec != g.spec:
        raise DimensionError(f"space mismatch: {f.spec} vs {g.spec}")


def mat_inner(f: MatFn, g: MatFn) -> np.ndarray:
    """Matrix-valued inner product <f, g> = sum_x f(x) g(x)^*, an s x s matrix."""
    _check_same(f, g)
    return f.rows @ g.rows.conj().T


def trace_inner(f: MatFn, g: MatFn) -> complex:
    """tr <f, g>; the Hilbert-space inner product on L^2(G, C^{s x r})."""
    _check_same(f, g)
    return complex(np.vdot(g.vector, f.vector))


def frob_norm(f: MatFn) -> float:
    return float(np.linalg.norm(f.vector))


def left_mul(M, f: MatFn) -> MatFn:
    """Pointwise left multiplication (M f)(x) = M f(x) by a constant s x s matrix."""
    M = np.asarray(M, dtype=complex)
    s = f.spec.s
    if M.shape != (s, s):
        raise DimensionError(f"left multiplier must be {s}x{s}, got {M.shape}")
    return MatFn(f.spec, (M @ f.rows).reshape(f.spec.shape))


def lin_comb(coeffs, fs) -> MatFn:
    coeffs = list(coeffs)
    fs = list(fs)
    if len(coeffs) != len(fs):
        raise DimensionError(f"{len(coeffs)} coefficients for {len(fs)} functions")
    if not fs:
        raise DimensionError("empty linear combination")
    for g in fs[1:]:
        _check_same(fs[0], g)
    out = np.zeros(fs[0].spec.shape, dtype=complex)
    for c, g in zip(coeffs, fs):
        out += complex(c) * g.values
    return MatFn(fs[0].spec, out)


def matrix_unit(s: int, p: int, q: int) -> np.ndarray:
    E = np.zeros((s, s), dtype=complex)
    E[p, q] = 1.0
    return E


def stack(fs) -> np.ndarray:
    """Stack a family into an array of shape (N, s, r*|G|) of rows."""
    fs = list(fs)
    if not fs:
        raise DimensionError("empty family")
    for g in fs[1:]:
        _check_same(fs[0], g)
    return np.stack([g.rows for g in fs])


def gram_blocks(fs, gs) -> np.ndarray:
    """All pairwise matrix inner products: ``out[k, j] = <f_k, g_j>``, shape (N, M, s, s)."""
    F = stack(fs)
    G = stack(gs)
    return np.einsum("kpl,jql->kjpq", F, G.conj())


def coordinate_basis(spec: SpaceSpec) -> list[MatFn]:
    """The D canonical unit functions, in vectorization order."""
    eye = np.eye(spec.dim, dtype=complex)
    return [MatFn(spec, eye[a]) for a in range(spec.dim)]


def embed_scalar(spec: SpaceSpec, i: int, j: int, h) -> MatFn:
    """The function with scalar ``h`` (an array over G) at entry (i, j) and zeros elsewhere."""
    return MatFn.from_entries(spec, {(i, j): np.asarray(h)})


def scalar_basis_function(spec: SpaceSpec, k: int) -> np.ndarray:
    return scalar_onb(spec.group)[k]
