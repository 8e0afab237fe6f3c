"""Finite abelian groups Z_{n1} x ... x Z_{nm} with counting Haar measure.

Elements are enumerated lexicographically (first coordinate most
significant), so the index of an element is its mixed-radix rank.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

MAX_GROUP_SIZE = 4096


@dataclass(frozen=True)
class GroupElement:
    coords: tuple[int, ...]

    def __iter__(self):
        return iter(self.coords)

    def __len__(self):
        return len(self.coords)


@dataclass(frozen=True)
class GroupSpec:
    orders: tuple[int, ...]

    def __post_init__(self):
        orders = tuple(int(n) for n in self.orders)
        if not orders:
            raise ValueError("group needs at least one cyclic factor")
        if any(n < 1 for n in orders):
            raise ValueError(f"cyclic orders must be positive, got {orders}")
        if math.prod(orders) > MAX_GROUP_SIZE:
            raise ValueError(f"|G| = {math.prod(orders)} exceeds cap {MAX_GROUP_SIZE}")
        object.__setattr__(self, "orders", orders)

    @classmethod
    def cyclic(cls, n: int) -> GroupSpec:
        return cls((n,))

    @property
    def size(self) -> int:
        return math.prod(self.orders)

    def element(self, *coords) -> GroupElement:
        """Canonical element with each coordinate reduced mod its order."""
        if len(coords) == 1 and not isinstance(coords[0], (int, np.integer)):
            coords = tuple(coords[0])
        if len(coords) != len(self.orders):
            raise ValueError(f"expected {len(self.orders)} coordinates, got {len(coords)}")
        return GroupElement(tuple(int(c) % n for c, n in zip(coords, self.orders)))

    def elements(self) -> list[GroupElement]:
        return [GroupElement(c) for c in itertools.product(*(range(n) for n in self.orders))]

    def index(self, x: GroupElement) -> int:
        idx = 0
        for c, n in zip(x.coords, self.orders):
            if not 0 <= c < n:
                raise ValueError(f"{x} is not a canonical element of {self}")
            idx = idx * n + c
        return idx

    def add(self, x: GroupElement, y: GroupElement) -> GroupElement:
        return self.element(*(a + b for a, b in zip(x.coords, y.coords)))

    def neg(self, x: GroupElement) -> GroupElement:
        return self.element(*(-a for a in x.coords))

    def __str__(self):
        return " x ".join(f"Z_{n}" for n in self.orders)


def character(spec: GroupSpec, dual_index: GroupElement, x: GroupElement) -> complex:
    """chi_k(x) = exp(2 pi i sum_j k_j x_j / n_j)."""
    # exact rational phase keeps roots of unity like i and -1 clean
    phase = sum((k * c) % n / n for k, c, n in zip(dual_index.coords, x.coords, spec.orders))
    phase %= 1.0
    quarter = phase * 4
    if quarter == int(quarter):
        return (1, 1j, -1, -1j)[int(quarter)]
    return complex(np.exp(2j * np.pi * phase))


def character_table(spec: GroupSpec) -> np.ndarray:
    """Matrix ``X[k, x] = chi_k(x)`` in the stable element order.

    Built as the Kronecker product of the cyclic DFT matrices, which
    matches the lexicographic enumeration.
    """
    return _character_table(spec.orders)


def scalar_onb(spec: GroupSpec) -> np.ndarray:
    """Rows are the orthonormal basis e_k = chi_k / sqrt|G| of L^2(G)."""
    return character_table(spec) / np.sqrt(spec.size)


_tables: dict[tuple[int, ...], np.ndarray] = {}


def _character_table(orders: tuple[int, ...]) -> np.ndarray:
    table = _tables.get(orders)
    if table is None:
        table = np.ones((1, 1), dtype=complex)
        for n in orders:
            k = np.arange(n)
            table = np.kron(table, np.exp(2j * np.pi * (np.outer(k, k) % n) / n))
        table.setflags(write=False)
        _tables[orders] = table
    return table
