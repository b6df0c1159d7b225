"""Non-interactive local protocols and vertex-selection geometry.

The concrete protocol pairs the coordinate-sampling randomizer with a
debiased-mean aggregator: each user reports a uniformly chosen coordinate of
their sample through binary randomized response, the aggregator inverts the
response bias per coordinate, and the decoder picks the coordinate of largest
estimated magnitude. The same decoder doubles as the vertex oracle for linear
objectives over the l1 ball and the probability simplex.

Tie-breaking is deterministic everywhere: smallest index wins, and a zero
entry decodes to sign +1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channels import Channel, _audit_rows, audit_epsilon, coordinate_sampling_rr
from .hard_instances import MAX_ENUM_DIM, Dataset, HardInstance

__all__ = [
    "L1_BALL",
    "SIMPLEX",
    "CoordinateSamplingProtocol",
    "IdentificationResult",
    "FeasiblePoint",
    "aggregate_debiased_means",
    "select_coordinate",
    "run_identification",
    "optimal_vertex",
    "optimization_gap",
    "vertex_to_pair",
]

L1_BALL = "l1_ball"
SIMPLEX = "simplex"


@dataclass(frozen=True)
class CoordinateSamplingProtocol:
    """Local protocol (randomizer, aggregator) with a declared privacy budget.

    The randomizer is the coordinate-sampling channel; the aggregator is the
    debiased per-coordinate mean. Randomization works functionally at any d,
    while the dense channel view is available for d <= 12.
    """

    d: int
    epsilon: float

    def __post_init__(self):
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if self.epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon}")

    def channel(self) -> Channel:
        """Dense matrix view of the randomizer (d <= 12 only)."""
        return coordinate_sampling_rr(self.d, self.epsilon)

    def audited_epsilon(self) -> float:
        """Exact audit of the randomizer actually used.

        For d <= 12 this audits the dense channel. For larger d it audits the
        two all-(-1)/all-(+1) rows, which attain every column's extreme
        probabilities, so the result is still exact.
        """
        if self.d <= MAX_ENUM_DIM:
            return audit_epsilon(self.channel()).epsilon_exact
        p = math.exp(self.epsilon) / (1.0 + math.exp(self.epsilon))
        all_minus = np.empty(2 * self.d)
        all_minus[0::2] = p / self.d
        all_minus[1::2] = (1.0 - p) / self.d
        all_plus = np.empty(2 * self.d)
        all_plus[0::2] = (1.0 - p) / self.d
        all_plus[1::2] = p / self.d
        return _audit_rows(np.vstack([all_minus, all_plus])).epsilon_exact

    def randomize(self, data: Dataset, rng: np.random.Generator) -> np.ndarray:
        """Per-user reports as an (n, 2) array of (coordinate, bit) pairs.

        The generator is consumed in a fixed order: coordinate picks first,
        then flip decisions.
        """
        if data.d != self.d:
            raise ValueError(f"dataset dimension {data.d} != protocol dimension {self.d}")
        n = data.n
        picked = rng.integers(1, self.d + 1, size=n)
        kept = data.samples[np.arange(n), picked - 1].astype(np.int64)
        flip = rng.random(n) < 1.0 / (1.0 + math.exp(self.epsilon))
        bits = np.where(flip, -kept, kept)
        return np.column_stack([picked, bits])

    def aggregate(self, reports: np.ndarray) -> np.ndarray:
        return aggregate_debiased_means(reports, self.d, self.epsilon)


def aggregate_debiased_means(reports, d: int, epsilon: float) -> np.ndarray:
    """Per-coordinate debiased mean of the reported bits.

    Each bit reported for coordinate j is rescaled by
    (e^eps + 1)/(e^eps - 1), making the bucket average conditionally unbiased
    for that coordinate's true mean. Coordinates with no reports estimate 0.
    """
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    reports = np.asarray(reports)
    mu = np.zeros(d)
    if reports.size == 0:
        return mu
    if reports.ndim != 2 or reports.shape[1] != 2:
        raise ValueError(f"reports must have shape (n, 2), got {reports.shape}")
    coords = reports[:, 0].astype(np.int64) - 1
    if (coords < 0).any() or (coords >= d).any():
        raise ValueError("report coordinates must lie in 1..d")
    scale = (math.exp(epsilon) + 1.0) / (math.exp(epsilon) - 1.0)
    counts = np.bincount(coords, minlength=d)
    sums = np.bincount(coords, weights=reports[:, 1].astype(float), minlength=d)
    hit = counts > 0
    mu[hit] = scale * sums[hit] / counts[hit]
    return mu


def select_coordinate(mu_hat) -> tuple[int, int]:
    """Decode an estimated mean vector to (sign, coordinate)."""
    mu_hat = np.asarray(mu_hat, dtype=float)
    if mu_hat.ndim != 1 or mu_hat.size == 0:
        raise ValueError("mu_hat must be a nonempty vector")
    j = int(np.argmax(np.abs(mu_hat))) + 1
    b = 1 if mu_hat[j - 1] >= 0 else -1
    return b, j


@dataclass(frozen=True)
class IdentificationResult:
    b_hat: int
    j_hat: int
    mu_hat: np.ndarray
    matched_pair: bool
    matched_coordinate: bool


def run_identification(
    inst: HardInstance,
    n: int,
    protocol: CoordinateSamplingProtocol,
    rng: np.random.Generator,
) -> IdentificationResult:
    """Sample, randomize, aggregate, and decode one end-to-end protocol run."""
    if inst.d != protocol.d:
        raise ValueError(f"instance dimension {inst.d} != protocol dimension {protocol.d}")
    data = inst.sample(n, rng)
    reports = protocol.randomize(data, rng)
    mu_hat = protocol.aggregate(reports)
    b_hat, j_hat = select_coordinate(mu_hat)
    return IdentificationResult(
        b_hat=b_hat,
        j_hat=j_hat,
        mu_hat=mu_hat,
        matched_pair=(b_hat == inst.b and j_hat == inst.j),
        matched_coordinate=(j_hat == inst.j),
    )


@dataclass(frozen=True)
class FeasiblePoint:
    """A vector tagged with its optimization domain (l1 ball or simplex)."""

    vector: np.ndarray
    geometry: str

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float)
        if v.ndim != 1 or v.size == 0:
            raise ValueError("vector must be a nonempty 1-d array")
        if self.geometry == L1_BALL:
            if np.abs(v).sum() > 1.0 + 1e-9:
                raise ValueError("l1 norm exceeds 1")
        elif self.geometry == SIMPLEX:
            if (v < -1e-12).any():
                raise ValueError("simplex entries must be nonnegative")
            if abs(v.sum() - 1.0) > 1e-9:
                raise ValueError("simplex entries must sum to 1")
        else:
            raise ValueError(f"unknown geometry {self.geometry!r}")
        v = v.copy()
        v.flags.writeable = False
        object.__setattr__(self, "vector", v)


def optimal_vertex(mu, geometry: str) -> FeasiblePoint:
    """Vertex maximizing <mu, theta> over the chosen domain.

    Linear objectives attain their maximum at a vertex: a signed basis vector
    on the l1 ball, a plain basis vector on the simplex.
    """
    mu = np.asarray(mu, dtype=float)
    d = mu.size
    v = np.zeros(d)
    if geometry == L1_BALL:
        j = int(np.argmax(np.abs(mu)))
        v[j] = 1.0 if mu[j] >= 0 else -1.0
    elif geometry == SIMPLEX:
        j = int(np.argmax(mu))
        v[j] = 1.0
    else:
        raise ValueError(f"unknown geometry {geometry!r}")
    return FeasiblePoint(v, geometry)


def optimization_gap(mu, theta_hat: FeasiblePoint) -> float:
    """Objective shortfall <mu, vertex(mu)> - <mu, theta_hat>; never negative."""
    mu = np.asarray(mu, dtype=float)
    if mu.shape != theta_hat.vector.shape:
        raise ValueError(
            f"mean vector shape {mu.shape} != point shape {theta_hat.vector.shape}"
        )
    best = float(mu @ optimal_vertex(mu, theta_hat.geometry).vector)
    return max(best - float(mu @ theta_hat.vector), 0.0)


def vertex_to_pair(theta_hat: FeasiblePoint) -> tuple[int, int]:
    """Decode a feasible point to (sign, coordinate) by largest magnitude."""
    v = theta_hat.vector
    j = int(np.argmax(np.abs(v))) + 1
    if theta_hat.geometry == SIMPLEX:
        return 1, j
    b = 1 if v[j - 1] >= 0 else -1
    return b, j
