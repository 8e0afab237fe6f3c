"""Seeded random module maps.

Every operator here is a row lift I_s (x) B, so it is adjointable for the
matrix-valued inner product by construction; spectra are controlled so the
bijectivity assumptions hold with margin.
"""

from __future__ import annotations

import numpy as np

from .group import GroupSpec
from .operators import LinOp, row_lift
from .space import SpaceSpec


def complex_gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    Q, R = np.linalg.qr(complex_gaussian(rng, (n, n)))
    d = np.diag(R)
    return Q * (d / np.abs(d))


def random_module_map(spec: SpaceSpec, rng: np.random.Generator, sv_range=(0.2, 5.0)) -> LinOp:
    """Gaussian B with its singular values clamped into ``sv_range``."""
    B = complex_gaussian(rng, (spec.row_dim, spec.row_dim))
    U, sv, Vh = np.linalg.svd(B)
    sv = np.clip(sv, *sv_range)
    return row_lift(spec, (U * sv) @ Vh)


def random_psd_module_map(spec: SpaceSpec, rng: np.random.Generator, eig_range=(0.2, 5.0),
                          norm: float | None = None, eigvecs: np.ndarray | None = None) -> LinOp:
    """Q diag(lambda) Q^* with lambda uniform in ``eig_range``.

    ``norm`` pins the largest eigenvalue; ``eigvecs`` reuses a unitary Q
    so that several maps commute.
    """
    L = spec.row_dim
    Q = random_unitary(rng, L) if eigvecs is None else eigvecs
    lam = rng.uniform(*eig_range, size=L)
    if norm is not None:
        lam[np.argmax(lam)] = norm
        lam = np.minimum(lam, norm)
    return row_lift(spec, (Q * lam) @ Q.conj().T)


def random_self_adjoint_module_map(spec: SpaceSpec, rng: np.random.Generator) -> LinOp:
    B = complex_gaussian(rng, (spec.row_dim, spec.row_dim))
    return row_lift(spec, 0.5 * (B + B.conj().T))


def random_contraction(spec: SpaceSpec, rng: np.random.Generator, norm: float = 0.9) -> LinOp:
    B = complex_gaussian(rng, (spec.row_dim, spec.row_dim))
    return row_lift(spec, B * (norm / np.linalg.norm(B, 2)))


# (orders, s, r) shapes with s | r and D = |G| s r <= 256
SHAPES = (
    ((4,), 2, 2),
    ((2, 2), 2, 2),
    ((3,), 1, 1),
    ((5,), 1, 2),
    ((6,), 1, 3),
    ((2, 3), 2, 2),
    ((3,), 2, 4),
    ((4,), 3, 3),
    ((8,), 2, 2),
    ((2, 4), 2, 4),
    ((16,), 2, 2),
    ((4,), 3, 6),
    ((7,), 2, 2),
    ((2, 2, 2), 1, 2),
    ((4, 4), 2, 4),
    ((8,), 3, 6),
    ((64,), 2, 2),
    ((16,), 4, 4),
)


def random_space(rng: np.random.Generator, max_dim: int = 256, accept=None) -> SpaceSpec:
    """Draw from SHAPES; ``accept(s, r)`` optionally filters the candidates."""
    shapes = [sh for sh in SHAPES if np.prod(sh[0]) * sh[1] * sh[2] <= max_dim
              and (accept is None or accept(sh[1], sh[2]))]
    if not shapes:
        raise ValueError(f"no test shape with dimension <= {max_dim}")
    orders, s, r = shapes[int(rng.integers(len(shapes)))]
    return SpaceSpec(GroupSpec(orders), s, r)
