"""Seeded generation of Hermitian positive (semi)definite test matrices.

Random numbers come from SplitMix64, specified bit-for-bit so an instance
stream is reproducible in any language::

    state  = (state + 0x9E3779B97F4A7C15) mod 2**64
    z      = state
    z      = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) mod 2**64
    z      = ((z ^ (z >> 27)) * 0x94D049BB133111EB) mod 2**64
    output = z ^ (z >> 31)

Uniform doubles are ``(output >> 11) * 2**-53``. Standard normals come in
pairs from Box-Muller with ``u1 = 1 - uniform()`` and ``u2 = uniform()``.
Matrix entries are drawn row-major; complex entries take all real parts
first, then all imaginary parts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from .block import BlockMatrix, partition
from .dense import DTYPE, identity, symmetrize
from .errors import ConfigInvalid

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB
_TWO_POW_53 = float(1 << 53)

REAL = "real"
COMPLEX = "complex"


class SplitMix64:
    """64-bit SplitMix generator."""

    __slots__ = ("state",)

    def __init__(self, seed: int):
        self.state = int(seed) & MASK64

    def next_u64(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * _MIX1) & MASK64
        z = ((z ^ (z >> 27)) * _MIX2) & MASK64
        return z ^ (z >> 31)

    def next_float(self) -> float:
        """Uniform on [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) / _TWO_POW_53

    def normals(self, count: int) -> List[float]:
        out: List[float] = []
        while len(out) < count:
            u1 = 1.0 - self.next_float()
            u2 = self.next_float()
            radius = math.sqrt(-2.0 * math.log(u1))
            angle = 2.0 * math.pi * u2
            out.append(radius * math.cos(angle))
            out.append(radius * math.sin(angle))
        return out[:count]


def derive_seed(seed: int, *path: int) -> int:
    """Sub-seed for a position in the instance stream.

    Each path component is added to the running seed and pushed through one
    SplitMix64 step, so (seed, i, j) streams are independent of each other.
    """
    current = int(seed) & MASK64
    for index in path:
        current = SplitMix64((current + int(index)) & MASK64).next_u64()
    return current


@dataclass(frozen=True)
class GenConfig:
    """What to generate: ``dim`` for a dense matrix, or ``n`` and ``block_dim``
    for an n x n grid of block_dim x block_dim blocks."""

    seed: int
    dim: Optional[int] = None
    n: Optional[int] = None
    block_dim: Optional[int] = None
    cond_cap: float = 1e4
    scalar_kind: str = REAL
    rank_deficit: int = 0

    def __post_init__(self):
        if self.dim is None and (self.n is None or self.block_dim is None):
            raise ConfigInvalid("either dim or both n and block_dim must be set")
        for key in ("dim", "n", "block_dim"):
            value = getattr(self, key)
            if value is not None and value < 1:
                raise ConfigInvalid(f"{key} must be positive, got {value}")
        if self.dim is not None and self.n is not None and self.block_dim is not None:
            if self.dim != self.n * self.block_dim:
                raise ConfigInvalid(f"dim {self.dim} != n * block_dim = {self.n * self.block_dim}")
        if not (math.isfinite(self.cond_cap) and self.cond_cap >= 1.0):
            raise ConfigInvalid(f"condCap must be a finite number >= 1, got {self.cond_cap}")
        if self.scalar_kind not in (REAL, COMPLEX):
            raise ConfigInvalid(f"scalarKind must be {REAL!r} or {COMPLEX!r}, got {self.scalar_kind!r}")
        if not 0 <= self.rank_deficit < self.total_dim:
            raise ConfigInvalid(
                f"rankDeficit must lie in 0..{self.total_dim - 1}, got {self.rank_deficit}"
            )

    @property
    def total_dim(self) -> int:
        if self.dim is not None:
            return self.dim
        return self.n * self.block_dim

    @property
    def grid(self) -> tuple[int, int]:
        """(n, block_dim), treating a plain ``dim`` as one block."""
        if self.n is not None and self.block_dim is not None:
            return self.n, self.block_dim
        return 1, self.total_dim


def _gaussian(rng: SplitMix64, rows: int, cols: int, kind: str) -> np.ndarray:
    size = rows * cols
    real = np.array(rng.normals(size), dtype=np.float64).reshape(rows, cols)
    if kind == REAL:
        return real.astype(DTYPE)
    imag = np.array(rng.normals(size), dtype=np.float64).reshape(rows, cols)
    return (real + 1j * imag).astype(DTYPE)


def _gram(cfg: GenConfig, cols: int) -> np.ndarray:
    g = _gaussian(SplitMix64(cfg.seed), cfg.total_dim, cols, cfg.scalar_kind)
    return symmetrize(g @ g.conj().T)


def random_pd(cfg: GenConfig) -> np.ndarray:
    """G G^H + delta I with condition number at most ``cond_cap``.

    delta = trace / (cond_cap - 1) bounds lambda_max / delta, hence the
    condition number (lambda_max + delta) / (lambda_min + delta).
    """
    if cfg.rank_deficit:
        raise ConfigInvalid("random_pd needs rankDeficit == 0")
    dim = cfg.total_dim
    a = _gram(cfg, dim)
    trace = float(np.trace(a).real)
    eye = identity(dim)
    if cfg.cond_cap == 1.0:
        return (trace / dim) * eye
    return a + (trace / (cfg.cond_cap - 1.0)) * eye


def random_psd_singular(cfg: GenConfig) -> np.ndarray:
    """G G^H with G of shape dim x (dim - rank_deficit)."""
    if cfg.rank_deficit < 1:
        raise ConfigInvalid("random_psd_singular needs rankDeficit >= 1")
    return _gram(cfg, cfg.total_dim - cfg.rank_deficit)


def _as_blocks(cfg: GenConfig, a: np.ndarray) -> BlockMatrix:
    n, q = cfg.grid
    return partition(a, n, q, q)


def random_block_pd(cfg: GenConfig) -> BlockMatrix:
    return _as_blocks(cfg, random_pd(cfg))


def random_block_psd_singular(cfg: GenConfig) -> BlockMatrix:
    """Block-partitioned :func:`random_psd_singular`.

    With ``rank_deficit <= total_dim - block_dim`` every diagonal block stays
    nonsingular almost surely.
    """
    return _as_blocks(cfg, random_psd_singular(cfg))


def random_ge1_array(seed: int, m: int, n: int, cap: float) -> np.ndarray:
    """m x n array uniform on [1, cap]."""
    if m < 1 or n < 1:
        raise ConfigInvalid(f"array shape must be positive, got {m}x{n}")
    if not (math.isfinite(cap) and cap >= 1.0):
        raise ConfigInvalid(f"cap must be a finite number >= 1, got {cap}")
    rng = SplitMix64(seed)
    values = [1.0 + (cap - 1.0) * rng.next_float() for _ in range(m * n)]
    return np.array(values, dtype=np.float64).reshape(m, n)


def next_int(rng: SplitMix64, low: int, high: int) -> int:
    """Integer uniform on [low, high] by the multiply-shift method."""
    span = high - low + 1
    return low + ((rng.next_u64() * span) >> 64)
