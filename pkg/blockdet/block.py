"""Block matrices A = [A_ij] in M_n(M_{p x q}) and the Khatri-Rao product."""

from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Sequence, Tuple

import numpy as np

from .dense import as_matrix, kronecker
from .errors import BlockGridMismatch, DimensionMismatch, EmptyFactorList, IndexOutOfRange

Grid = Tuple[Tuple[np.ndarray, ...], ...]


@dataclass(frozen=True, eq=False)
class BlockMatrix:
    """An n x n grid of p x q blocks."""

    n: int
    p: int
    q: int
    blocks: Grid

    def __post_init__(self):
        if min(self.n, self.p, self.q) < 1:
            raise DimensionMismatch(f"block grid needs positive n, p, q; got {self.n}, {self.p}, {self.q}")
        if len(self.blocks) != self.n or any(len(row) != self.n for row in self.blocks):
            raise DimensionMismatch(f"expected a {self.n}x{self.n} grid of blocks")
        for i, row in enumerate(self.blocks):
            for j, blk in enumerate(row):
                if blk.shape != (self.p, self.q):
                    raise DimensionMismatch(
                        f"block ({i},{j}) has shape {blk.shape}, expected ({self.p}, {self.q})"
                    )

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable]) -> BlockMatrix:
        grid = tuple(tuple(as_matrix(b) for b in row) for row in blocks)
        if not grid or not grid[0]:
            raise DimensionMismatch("empty block grid")
        p, q = grid[0][0].shape
        return cls(len(grid), p, q, grid)

    @property
    def has_square_blocks(self) -> bool:
        return self.p == self.q

    @property
    def shape(self) -> Tuple[int, int]:
        return self.n * self.p, self.n * self.q

    def block(self, i: int, j: int) -> np.ndarray:
        return self.blocks[i][j]

    def __eq__(self, other):
        if not isinstance(other, BlockMatrix):
            return NotImplemented
        return (self.n, self.p, self.q) == (other.n, other.p, other.q) and all(
            np.array_equal(x, y)
            for row_a, row_b in zip(self.blocks, other.blocks)
            for x, y in zip(row_a, row_b)
        )

    __hash__ = None


@dataclass(frozen=True)
class BlockFactorList:
    """Ordered Khatri-Rao factors sharing one block-grid order n."""

    factors: Tuple[BlockMatrix, ...]

    def __post_init__(self):
        if not self.factors:
            raise EmptyFactorList("at least one block factor is required")
        orders = {f.n for f in self.factors}
        if len(orders) != 1:
            raise BlockGridMismatch(f"factors have different grid orders {sorted(orders)}")

    @classmethod
    def of(cls, factors: Sequence[BlockMatrix] | BlockFactorList) -> BlockFactorList:
        if isinstance(factors, BlockFactorList):
            return factors
        return cls(tuple(factors))

    @property
    def n(self) -> int:
        return self.factors[0].n

    @property
    def m(self) -> int:
        return len(self.factors)

    @property
    def block_dims(self) -> Tuple[int, ...]:
        return tuple(f.q for f in self.factors)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)


def partition(a, n: int, p: int, q: int) -> BlockMatrix:
    """Split an (n*p) x (n*q) matrix into an n x n grid of p x q blocks."""
    a = as_matrix(a)
    if n < 1 or p < 1 or q < 1 or a.shape != (n * p, n * q):
        raise DimensionMismatch(f"cannot partition {a.shape[0]}x{a.shape[1]} into {n}x{n} blocks of {p}x{q}")
    grid = tuple(
        tuple(a[i * p:(i + 1) * p, j * q:(j + 1) * q].copy() for j in range(n))
        for i in range(n)
    )
    return BlockMatrix(n, p, q, grid)


def flatten(a: BlockMatrix) -> np.ndarray:
    """Assemble the (n*p) x (n*q) matrix from the block grid."""
    return np.block([list(row) for row in a.blocks])


def khatri_rao(a: BlockMatrix, b: BlockMatrix) -> BlockMatrix:
    """A * B = [A_ij (x) B_ij]."""
    if a.n != b.n:
        raise BlockGridMismatch(f"Khatri-Rao product needs equal grid orders, got {a.n} and {b.n}")
    grid = tuple(
        tuple(kronecker(x, y) for x, y in zip(row_a, row_b))
        for row_a, row_b in zip(a.blocks, b.blocks)
    )
    return BlockMatrix(a.n, a.p * b.p, a.q * b.q, grid)


def khatri_rao_all(factors: Sequence[BlockMatrix] | BlockFactorList) -> BlockMatrix:
    """Left fold ((A1 * A2) * A3) * ... of the factors."""
    factors = BlockFactorList.of(factors)
    return reduce(khatri_rao, factors.factors)


def leading_block_submatrix(a: BlockMatrix, mu: int) -> BlockMatrix:
    """The mu x mu leading principal block submatrix [A_ij]_{i,j<=mu}."""
    if not 1 <= mu <= a.n:
        raise IndexOutOfRange(f"block order {mu} outside 1..{a.n}")
    grid = tuple(row[:mu] for row in a.blocks[:mu])
    return BlockMatrix(mu, a.p, a.q, grid)


def diagonal_block(a: BlockMatrix, mu: int) -> np.ndarray:
    """The diagonal block A_{mu mu}, 1-based."""
    if not 1 <= mu <= a.n:
        raise IndexOutOfRange(f"diagonal block {mu} outside 1..{a.n}")
    return a.blocks[mu - 1][mu - 1]
