"""Finite local randomizers as dense row-stochastic channels.

Rows are indexed by the canonical input encoding of
:mod:`ldplab.hard_instances`; columns are abstract message indices. The
auditor reports the exact worst-case log-likelihood ratio between any two
rows, which for a memoryless randomizer is its pure differential-privacy
parameter in nats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .hard_instances import MAX_ENUM_DIM, enumerate_signs

__all__ = [
    "Channel",
    "PrivacyAudit",
    "rr_bit",
    "coordinate_sampling_rr",
    "full_rr",
    "audit_epsilon",
    "push_forward",
    "random_dp_channel",
    "write_channel",
    "read_channel",
]

ROW_SUM_TOL = 1e-12


@dataclass(frozen=True)
class Channel:
    """A row-stochastic map from {-1,+1}^input_dim to a finite message set."""

    input_dim: int
    probabilities: np.ndarray

    def __post_init__(self):
        if not 1 <= self.input_dim <= MAX_ENUM_DIM:
            raise ValueError(
                f"input_dim must lie in 1..{MAX_ENUM_DIM} for a dense channel,"
                f" got {self.input_dim}"
            )
        p = np.asarray(self.probabilities, dtype=float)
        if p.ndim != 2 or p.shape[0] != 2**self.input_dim:
            raise ValueError(
                f"probabilities must have shape (2^{self.input_dim}, m),"
                f" got {p.shape}"
            )
        if p.shape[1] < 1:
            raise ValueError("message alphabet must be nonempty")
        if (p < 0).any():
            raise ValueError("probabilities must be nonnegative")
        row_err = np.abs(p.sum(axis=1) - 1.0).max()
        if row_err > ROW_SUM_TOL:
            raise ValueError(f"rows must sum to 1 within {ROW_SUM_TOL}, off by {row_err}")
        p = p.copy()
        p.flags.writeable = False
        object.__setattr__(self, "probabilities", p)

    @property
    def message_alphabet_size(self) -> int:
        return self.probabilities.shape[1]


@dataclass(frozen=True)
class PrivacyAudit:
    """Exact pure-DP parameter of a channel, in nats, with a witness.

    ``attained_at`` is a (message, input, input') index triple realizing the
    maximal likelihood ratio. Mutually-zero column entries count as ratio 1;
    a positive entry opposite a zero makes the parameter infinite.
    """

    epsilon_exact: float
    attained_at: tuple[int, int, int]


def rr_bit(epsilon: float) -> Channel:
    """Binary randomized response: keep the bit with probability e^eps / (1 + e^eps)."""
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    p = math.exp(epsilon) / (1.0 + math.exp(epsilon))
    return Channel(1, np.array([[p, 1.0 - p], [1.0 - p, p]]))


def coordinate_sampling_rr(d: int, epsilon: float) -> Channel:
    """Pick a coordinate uniformly, randomize that bit, report (coordinate, bit).

    Message (j, y) with j in 1..d and y in {-1,+1} occupies column
    2*(j-1) + (1 if y == +1 else 0), so the alphabet has size 2d.
    """
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    p = math.exp(epsilon) / (1.0 + math.exp(epsilon))
    signs = enumerate_signs(d)
    probs = np.empty((2**d, 2 * d))
    for k in range(d):
        keep = signs[:, k] == 1
        probs[:, 2 * k] = np.where(keep, 1.0 - p, p) / d
        probs[:, 2 * k + 1] = np.where(keep, p, 1.0 - p) / d
    return Channel(d, probs)


def full_rr(d: int, epsilon: float) -> Channel:
    """Randomize every coordinate independently with budget epsilon / d.

    Messages are full sign vectors under the canonical encoding, so the
    alphabet has size 2^d and the dense matrix caps d at 12.
    """
    if not 1 <= d <= MAX_ENUM_DIM:
        raise ValueError(f"full_rr requires 1 <= d <= {MAX_ENUM_DIM}, got {d}")
    if epsilon <= 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    p0 = math.exp(epsilon / d) / (1.0 + math.exp(epsilon / d))
    ids = np.arange(2**d, dtype=np.uint64)
    flips = np.bitwise_count(np.bitwise_xor.outer(ids, ids)).astype(np.int64)
    probs = p0 ** (d - flips) * (1.0 - p0) ** flips
    return Channel(d, probs)


def _audit_rows(rows: np.ndarray) -> PrivacyAudit:
    eps = 0.0
    witness = (0, 0, 0)
    for z in range(rows.shape[1]):
        col = rows[:, z]
        hi = int(np.argmax(col))
        lo = int(np.argmin(col))
        if col[hi] == 0.0:
            continue
        if col[lo] == 0.0:
            return PrivacyAudit(math.inf, (z, hi, lo))
        ratio = math.log(col[hi] / col[lo])
        if ratio > eps:
            eps = ratio
            witness = (z, hi, lo)
    return PrivacyAudit(eps, witness)


def audit_epsilon(ch: Channel) -> PrivacyAudit:
    """Exact pure-DP parameter: max over messages and input pairs of the log ratio."""
    return _audit_rows(ch.probabilities)


def push_forward(ch: Channel, input_dist) -> np.ndarray:
    """Message distribution induced by an input distribution over the cube."""
    q = np.asarray(input_dist, dtype=float)
    if q.shape != (2**ch.input_dim,):
        raise ValueError(
            f"input distribution has shape {q.shape},"
            f" expected ({2**ch.input_dim},)"
        )
    if (q < -1e-12).any():
        raise ValueError("input distribution must be nonnegative")
    if abs(q.sum() - 1.0) > 1e-9:
        raise ValueError(f"input distribution must sum to 1 within 1e-9, got {q.sum()}")
    return q @ ch.probabilities


def random_dp_channel(
    d: int,
    epsilon: float,
    alphabet_size: int,
    rng: np.random.Generator,
    max_rejects: int = 200,
) -> Channel:
    """Draw a random channel whose audited parameter does not exceed epsilon.

    A positive base row is scaled per input by factors inside
    [e^(-eps/2), e^(eps/2)] and renormalized. Renormalization can push the
    worst-case ratio past e^eps, so candidates failing the audit are redrawn;
    each rejection narrows the factor range, and once its log half-width
    drops to eps/4 acceptance is certain (factor spread and normalizer spread
    each stay within eps/2), so the loop terminates.
    """
    if not 1 <= d <= 8:
        raise ValueError(f"random channels require 1 <= d <= 8, got {d}")
    if alphabet_size < 1:
        raise ValueError(f"alphabet_size must be positive, got {alphabet_size}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    rows = 2**d
    if alphabet_size == 1:
        return Channel(d, np.ones((rows, 1)))
    if epsilon == 0.0:
        base = -np.log(rng.random(alphabet_size))
        base /= base.sum()
        return Channel(d, np.tile(base, (rows, 1)))
    half_width = epsilon / 2.0
    for _ in range(max_rejects):
        base = -np.log(rng.random(alphabet_size))
        base /= base.sum()
        factors = np.exp(rng.uniform(-half_width, half_width, size=(rows, alphabet_size)))
        probs = base * factors
        probs /= probs.sum(axis=1, keepdims=True)
        ch = Channel(d, probs)
        if audit_epsilon(ch).epsilon_exact <= epsilon:
            return ch
        half_width *= 0.85
    raise RuntimeError(
        f"rejection limit {max_rejects} exceeded drawing a channel with eps <= {epsilon}"
    )


def write_channel(ch: Channel, path) -> None:
    """Serialize as plain text: a `d m` header then 2^d rows of probabilities."""
    lines = [f"{ch.input_dim} {ch.message_alphabet_size}"]
    for row in ch.probabilities:
        lines.append(" ".join(repr(float(v)) for v in row))
    Path(path).write_text("\n".join(lines) + "\n")


def read_channel(path) -> Channel:
    """Parse the plain-text channel format written by :func:`write_channel`."""
    text = Path(path).read_text()
    lines = [ln for ln in (raw.strip() for raw in text.splitlines()) if ln]
    if not lines:
        raise ValueError(f"channel file {path} is empty")
    header = lines[0].split()
    if len(header) != 2:
        raise ValueError(f"channel header must be 'd m', got {lines[0]!r}")
    d, m = int(header[0]), int(header[1])
    body = lines[1:]
    if len(body) != 2**d:
        raise ValueError(f"expected {2**d} rows for d={d}, found {len(body)}")
    probs = np.array([[float(v) for v in ln.split()] for ln in body])
    if probs.shape != (2**d, m):
        raise ValueError(f"expected {m} probabilities per row, got shape {probs.shape}")
    return Channel(d, probs)
