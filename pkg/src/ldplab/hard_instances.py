"""Hard product distributions over the sign hypercube.

Coordinates are numbered 1..d. A point x in {-1,+1}^d is encoded canonically
as an integer in 0..2^d-1 whose bit k (counting from 0) is set iff coordinate
k+1 equals +1; enumeration-heavy callers work directly on these indices.

A :class:`HardInstance` mixes, with weight ``alpha``, the uniform distribution
conditioned on coordinate ``j`` carrying sign ``b`` into the uniform
distribution on the cube. Coordinate ``j`` then has mean ``alpha * b`` and all
other coordinates have mean zero; averaging over the 2d (b, j) pairs recovers
the uniform distribution exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "HardInstance",
    "Dataset",
    "MixtureIndex",
    "index_to_signs",
    "signs_to_index",
    "enumerate_signs",
    "uniform_pmf",
    "mixture_pmf",
]

MAX_ENUM_DIM = 12


def index_to_signs(index: int, d: int) -> np.ndarray:
    """Decode a canonical input index into a length-d sign vector."""
    if not 0 <= index < 2**d:
        raise ValueError(f"index {index} out of range for d={d}")
    bits = (index >> np.arange(d)) & 1
    return (2 * bits - 1).astype(np.int8)


def signs_to_index(x) -> int:
    """Encode a sign vector as its canonical input index."""
    x = np.asarray(x)
    bits = (x == 1).astype(np.int64)
    return int(bits @ (1 << np.arange(x.size, dtype=np.int64)))


def enumerate_signs(d: int) -> np.ndarray:
    """All 2^d sign vectors, row i being the decoding of index i."""
    if not 1 <= d <= MAX_ENUM_DIM:
        raise ValueError(f"enumeration requires 1 <= d <= {MAX_ENUM_DIM}, got {d}")
    ids = np.arange(2**d, dtype=np.int64)
    bits = (ids[:, None] >> np.arange(d)) & 1
    return (2 * bits - 1).astype(np.int8)


def uniform_pmf(d: int) -> np.ndarray:
    """The uniform pmf over {-1,+1}^d in canonical index order."""
    if not 1 <= d <= MAX_ENUM_DIM:
        raise ValueError(f"enumeration requires 1 <= d <= {MAX_ENUM_DIM}, got {d}")
    return np.full(2**d, 2.0**-d)


def _validate_point(x, d: int) -> np.ndarray:
    x = np.asarray(x)
    if x.shape != (d,):
        raise ValueError(f"point has shape {x.shape}, expected ({d},)")
    if not np.isin(x, (-1, 1)).all():
        raise ValueError("point entries must be -1 or +1")
    return x


@dataclass(frozen=True)
class Dataset:
    """A batch of n samples from {-1,+1}^d, stored as an (n, d) sign matrix."""

    samples: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.samples, dtype=np.int8)
        if a.ndim != 2:
            raise ValueError(f"samples must be 2-dimensional, got ndim={a.ndim}")
        if a.size and not (np.abs(a) == 1).all():
            raise ValueError("samples must contain only -1 and +1")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "samples", a)

    @property
    def n(self) -> int:
        return self.samples.shape[0]

    @property
    def d(self) -> int:
        return self.samples.shape[1]


@dataclass(frozen=True)
class HardInstance:
    """Uniform cube distribution biased so that coordinate j has sign b
    with probability (1 + alpha) / 2."""

    d: int
    alpha: float
    b: int
    j: int

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if self.b not in (-1, 1):
            raise ValueError(f"b must be -1 or +1, got {self.b}")
        if not 1 <= self.j <= self.d:
            raise ValueError(f"j must lie in 1..{self.d}, got {self.j}")

    def pmf(self, x) -> float:
        """Probability of a single point x in {-1,+1}^d."""
        x = _validate_point(x, self.d)
        biased = self.alpha * 2.0 ** (1 - self.d) if x[self.j - 1] == self.b else 0.0
        return biased + (1.0 - self.alpha) * 2.0**-self.d

    def pmf_vector(self) -> np.ndarray:
        """Full pmf over canonical input indices (requires d <= 12)."""
        signs = enumerate_signs(self.d)
        p = np.full(2**self.d, (1.0 - self.alpha) * 2.0**-self.d)
        p[signs[:, self.j - 1] == self.b] += self.alpha * 2.0 ** (1 - self.d)
        return p

    def coordinate_means(self) -> np.ndarray:
        """Exact mean vector: alpha * b at coordinate j, zero elsewhere."""
        mu = np.zeros(self.d)
        mu[self.j - 1] = self.alpha * self.b
        return mu

    def sample(self, n: int, rng: np.random.Generator) -> Dataset:
        """Draw n iid points; deterministic given the generator state.

        The generator is consumed in a fixed order (sign matrix first, then
        the mixture mask), so callers may rely on reproducible streams.
        """
        if n < 0:
            raise ValueError(f"n must be nonnegative, got {n}")
        signs = (2 * rng.integers(0, 2, size=(n, self.d), dtype=np.int8) - 1).astype(
            np.int8
        )
        conditioned = rng.random(n) < self.alpha
        signs[conditioned, self.j - 1] = self.b
        return Dataset(signs)


@dataclass(frozen=True)
class MixtureIndex:
    """A latent (sign, coordinate) pair; uniform over the 2d possibilities."""

    b: int
    j: int

    def __post_init__(self):
        if self.b not in (-1, 1):
            raise ValueError(f"b must be -1 or +1, got {self.b}")
        if self.j < 1:
            raise ValueError(f"j must be positive, got {self.j}")

    @staticmethod
    def draw(d: int, rng: np.random.Generator) -> "MixtureIndex":
        b = 1 if rng.integers(0, 2) == 1 else -1
        j = int(rng.integers(1, d + 1))
        return MixtureIndex(b, j)


def mixture_pmf(d: int, alpha: float, x) -> float:
    """Average the instance pmf over all 2d (b, j) pairs.

    Computed literally as the mixture average; the result equals 2^-d for
    every x, which is the identity enumeration tests assert.
    """
    total = 0.0
    for b in (1, -1):
        for j in range(1, d + 1):
            total += HardInstance(d, alpha, b, j).pmf(x)
    return total / (2 * d)
