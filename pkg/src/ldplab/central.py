"""Central-model baselines: exponential-mechanism selection and Laplace means.

Selection runs over the 2d signed basis vectors, ordered (+1, 1), ...,
(+1, d), (-1, 1), ..., (-1, d); the utility of candidate (b, j) on a dataset
is the empirical mean of b * x_j. Sensitivity is taken under swap adjacency,
where replacing one sample moves a utility by at most 2/n.
"""

from __future__ import annotations

from collections import defaultdict

import numpy as np

from .hard_instances import Dataset, HardInstance, enumerate_signs

__all__ = [
    "candidate_pairs",
    "candidate_vectors",
    "utilities",
    "em_probabilities",
    "exponential_mechanism",
    "standard_laplace",
    "laplace_mean",
    "em_success_probability_exact",
]

MAX_EXACT_BITS = 24


def candidate_pairs(d: int) -> list[tuple[int, int]]:
    """The 2d (sign, coordinate) pairs in canonical candidate order."""
    return [(1, j) for j in range(1, d + 1)] + [(-1, j) for j in range(1, d + 1)]


def candidate_vectors(d: int) -> np.ndarray:
    """The 2d signed basis vectors, one per candidate, as a (2d, d) matrix."""
    eye = np.eye(d)
    return np.vstack([eye, -eye])


def utilities(data: Dataset) -> np.ndarray:
    """Empirical utility of every candidate; entry c is mean of b_c * x_{j_c}."""
    if data.n < 1:
        raise ValueError("utilities require a nonempty dataset")
    col_means = data.samples.mean(axis=0)
    return np.concatenate([col_means, -col_means])


def em_probabilities(data: Dataset, epsilon: float) -> np.ndarray:
    """Exact selection distribution: probabilities proportional to exp(eps*n*u/4)."""
    if data.n < 1:
        raise ValueError("exponential mechanism requires a nonempty dataset")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    col_sums = data.samples.sum(axis=0, dtype=float)
    scores = epsilon * np.concatenate([col_sums, -col_sums]) / 4.0
    w = np.exp(scores - scores.max())
    return w / w.sum()


def exponential_mechanism(
    data: Dataset, epsilon: float, rng: np.random.Generator
) -> tuple[int, int]:
    """Sample a (sign, coordinate) candidate with probability exp(eps*n*u/4)."""
    probs = em_probabilities(data, epsilon)
    idx = int(rng.choice(probs.size, p=probs))
    return candidate_pairs(data.d)[idx]


def standard_laplace(rng: np.random.Generator, size: int) -> np.ndarray:
    """Unit-scale Laplace draws by inverting the CDF of one uniform per entry."""
    u = np.maximum(rng.random(size), 2.0**-53)
    return np.where(u < 0.5, np.log(2.0 * u), -np.log(2.0 * (1.0 - u)))


def laplace_mean(data: Dataset, epsilon: float, rng: np.random.Generator) -> np.ndarray:
    """Empirical mean plus iid Laplace noise of scale 2d/(n*eps) per coordinate.

    The scale calibrates to the l1 swap-sensitivity of the mean vector, which
    is 2d/n for sign-valued samples.
    """
    if data.n < 1:
        raise ValueError("laplace_mean requires a nonempty dataset")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    scale = 2.0 * data.d / (data.n * epsilon)
    return data.samples.mean(axis=0) + scale * standard_laplace(rng, data.d)


def em_success_probability_exact(inst: HardInstance, n: int, epsilon: float) -> float:
    """Exact probability that the mechanism selects the instance's (b, j).

    Enumerates size-n datasets through their column-sum sufficient statistic:
    the sum vector's distribution is built by n exact convolution steps over
    the 2^d single-sample outcomes, then the selection probability is averaged
    over it. Requires d*n <= 24 so the state space stays small.
    """
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if inst.d * n > MAX_EXACT_BITS:
        raise ValueError(
            f"exact enumeration requires d*n <= {MAX_EXACT_BITS}, got {inst.d * n}"
        )
    d = inst.d
    signs = enumerate_signs(d)
    point_probs = inst.pmf_vector()
    dist: dict[tuple[int, ...], float] = {(0,) * d: 1.0}
    for _ in range(n):
        stepped: dict[tuple[int, ...], float] = defaultdict(float)
        for state, weight in dist.items():
            for idx in range(2**d):
                p = point_probs[idx]
                if p == 0.0:
                    continue
                nxt = tuple(state[k] + int(signs[idx, k]) for k in range(d))
                stepped[nxt] += weight * p
        dist = stepped
    target = (inst.j - 1) if inst.b == 1 else d + (inst.j - 1)
    total = 0.0
    for state, weight in dist.items():
        sums = np.asarray(state, dtype=float)
        scores = epsilon * np.concatenate([sums, -sums]) / 4.0
        w = np.exp(scores - scores.max())
        total += weight * w[target] / w.sum()
    return total
