"""Exact information-theoretic verification on dense channels.

Everything here enumerates: divergences between exact message distributions,
mutual information computed two independent ways, Walsh-Hadamard analysis of
the centered likelihood ratio of each message, and the closed-form sample
bound those quantities certify. Entropies and mutual information are reported
in bits; the chi-square comparison against KL lives in nats.

For a message z of a channel with uniform-marginal output p_Z, the centered
likelihood ratio is the function x -> P(z|x)/p_Z(z) - 1. Its mean under the
uniform input is zero, its sup norm is at most e^eps - 1 for an eps-audited
channel, and its degree-one Fourier mass controls the (b, j)-averaged
chi-square divergence; the checks below confirm each fact numerically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channels import Channel, audit_epsilon, push_forward
from .hard_instances import HardInstance, uniform_pmf

__all__ = [
    "KLDivergence",
    "DivergenceReport",
    "AverageCorrelationCheck",
    "SupNormCheck",
    "FanoBound",
    "SampleLowerBound",
    "chi_square",
    "kl",
    "entropy_bits",
    "wht",
    "wht_inverse",
    "centered_likelihood_ratio",
    "average_chi_square",
    "mutual_information_per_sample",
    "verify_average_correlation",
    "verify_ratio_sup_norm",
    "tensorized_mi_bound",
    "fano_success_bound",
    "sample_complexity_lower_bound",
]

LN2 = math.log(2.0)
LOWER_BOUND_MIN_DIM = 32


def _validate_pmf(p, name: str) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1 or p.size == 0:
        raise ValueError(f"{name} must be a nonempty vector")
    if (p < -1e-12).any():
        raise ValueError(f"{name} must be nonnegative")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ValueError(f"{name} must sum to 1 within 1e-9, got {p.sum()}")
    return np.maximum(p, 0.0)


def chi_square(p, q) -> float:
    """Chi-square divergence sum_z (p(z) - q(z))^2 / q(z).

    Infinite when p puts mass where q does not; mutually-zero entries
    contribute nothing.
    """
    p = _validate_pmf(p, "p")
    q = _validate_pmf(q, "q")
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    if ((q == 0.0) & (p > 0.0)).any():
        return math.inf
    live = q > 0.0
    diff = p[live] - q[live]
    return float(np.sum(diff * diff / q[live]))


class KLDivergence(NamedTuple):
    """KL divergence in both logarithm bases."""

    nats: float
    bits: float


def kl(p, q) -> KLDivergence:
    """KL divergence sum_z p(z) log(p(z)/q(z)), reported in nats and bits."""
    p = _validate_pmf(p, "p")
    q = _validate_pmf(q, "q")
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    if ((q == 0.0) & (p > 0.0)).any():
        return KLDivergence(math.inf, math.inf)
    live = p > 0.0
    nats = float(np.sum(p[live] * np.log(p[live] / q[live])))
    return KLDivergence(nats, nats / LN2)


def entropy_bits(p) -> float:
    """Shannon entropy in bits."""
    p = _validate_pmf(p, "p")
    live = p > 0.0
    return float(-np.sum(p[live] * np.log2(p[live])))


def wht(values) -> np.ndarray:
    """Fourier coefficients over the sign hypercube, indexed by subset masks.

    Input is a function table over canonical input indices; output entry at
    mask s is the expectation of f(x) times the product of the coordinates in
    s under the uniform distribution. Runs the fast butterfly in O(2^d * d).
    """
    f = np.array(values, dtype=float)
    if f.ndim != 1 or f.size == 0 or f.size & (f.size - 1):
        raise ValueError(f"length must be a power of two, got {f.shape}")
    d = f.size.bit_length() - 1
    t = f.reshape((2,) * d) if d else f
    for axis in range(d):
        minus = t.take(0, axis=axis)
        plus = t.take(1, axis=axis)
        t = np.stack([minus + plus, plus - minus], axis=axis)
    return t.reshape(f.size) / f.size


def wht_inverse(coefficients) -> np.ndarray:
    """Rebuild the function table from its Fourier coefficients."""
    c = np.array(coefficients, dtype=float)
    if c.ndim != 1 or c.size == 0 or c.size & (c.size - 1):
        raise ValueError(f"length must be a power of two, got {c.shape}")
    d = c.size.bit_length() - 1
    t = c.reshape((2,) * d) if d else c
    for axis in range(d):
        even = t.take(0, axis=axis)
        odd = t.take(1, axis=axis)
        t = np.stack([even - odd, even + odd], axis=axis)
    return t.reshape(c.size)


def centered_likelihood_ratio(ch: Channel, z: int, p_z: float | None = None) -> np.ndarray:
    """The function x -> P(z|x)/p_Z(z) - 1 for one message, as a table."""
    if not 0 <= z < ch.message_alphabet_size:
        raise ValueError(f"message index {z} out of range")
    if p_z is None:
        p_z = float(ch.probabilities[:, z].mean())
    if p_z <= 0.0:
        raise ValueError(f"message {z} has zero probability under the uniform input")
    return ch.probabilities[:, z] / p_z - 1.0


def _pair_pmfs(d: int, alpha: float) -> list[tuple[int, int, np.ndarray]]:
    out = []
    for b in (1, -1):
        for j in range(1, d + 1):
            out.append((b, j, HardInstance(d, alpha, b, j).pmf_vector()))
    return out


@dataclass(frozen=True)
class DivergenceReport:
    """Exact per-channel divergence summary for one bias weight.

    Pair arrays have shape (2, d): row 0 holds sign +1, row 1 sign -1, and
    column j-1 holds coordinate j. ``chi2_privacy_bound`` is
    alpha^2 (e^eps - 1)^2 / d with the audited parameter; ``fano_ceiling``
    is the success ceiling (n*I + 1)/log2(2d) for n samples.
    """

    d: int
    alpha: float
    epsilon_exact: float
    chi2_pairs: np.ndarray
    chi2_average: float
    kl_pairs_nats: np.ndarray
    mi_bits: float
    chi2_privacy_bound: float
    n: int
    fano_ceiling: float
    fano_saturated: bool
    n_lower_bound: float
    small_d: bool

    def to_text(self) -> str:
        lines = [
            f"d = {self.d}",
            f"alpha = {self.alpha!r}",
            f"epsilon_exact = {self.epsilon_exact!r}",
            f"chi2_average = {self.chi2_average!r}",
            f"chi2_privacy_bound = {self.chi2_privacy_bound!r}",
            f"mi_bits_per_sample = {self.mi_bits!r}",
            f"n = {self.n}",
            f"fano_ceiling = {self.fano_ceiling!r}",
            f"fano_saturated = {self.fano_saturated}",
            f"n_lower_bound = {self.n_lower_bound!r}",
            f"small_d = {self.small_d}",
        ]
        for row, b in enumerate((1, -1)):
            for j in range(1, self.d + 1):
                lines.append(
                    f"chi2[b={b:+d},j={j}] = {float(self.chi2_pairs[row, j - 1])!r}"
                )
        return "\n".join(lines)

    @staticmethod
    def csv_header() -> str:
        return (
            "d,alpha,epsilon_exact,chi2_average,chi2_privacy_bound,"
            "mi_bits_per_sample,n,fano_ceiling,fano_saturated,"
            "n_lower_bound,small_d"
        )

    def to_csv_row(self) -> str:
        return ",".join(
            [
                str(self.d),
                repr(float(self.alpha)),
                repr(float(self.epsilon_exact)),
                repr(float(self.chi2_average)),
                repr(float(self.chi2_privacy_bound)),
                repr(float(self.mi_bits)),
                str(self.n),
                repr(float(self.fano_ceiling)),
                str(int(self.fano_saturated)),
                repr(float(self.n_lower_bound)),
                str(int(self.small_d)),
            ]
        )


def average_chi_square(ch: Channel, alpha: float, n: int = 1) -> DivergenceReport:
    """Exact divergence report for a channel against the hard family.

    Pushes every (b, j) instance and the uniform distribution through the
    channel, computes per-pair chi-square and KL divergences, their average,
    the privacy bound implied by the audited parameter, and the downstream
    Fano and sample-count numbers for n samples.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    d = ch.input_dim
    marginal = push_forward(ch, uniform_pmf(d))
    chi2 = np.empty((2, d))
    kl_nats = np.empty((2, d))
    for row, b in enumerate((1, -1)):
        for j in range(1, d + 1):
            conditional = push_forward(ch, HardInstance(d, alpha, b, j).pmf_vector())
            chi2[row, j - 1] = chi_square(conditional, marginal)
            kl_nats[row, j - 1] = kl(conditional, marginal).nats
    eps = audit_epsilon(ch).epsilon_exact
    if math.isinf(eps):
        bound = math.inf
    else:
        bound = alpha**2 * (math.exp(eps) - 1.0) ** 2 / d
    mi = mutual_information_per_sample(ch, alpha)
    fano = fano_success_bound(tensorized_mi_bound(mi, n), 2 * d)
    lower = sample_complexity_lower_bound(d, alpha, eps)
    return DivergenceReport(
        d=d,
        alpha=alpha,
        epsilon_exact=eps,
        chi2_pairs=chi2,
        chi2_average=float(chi2.mean()),
        kl_pairs_nats=kl_nats,
        mi_bits=mi,
        chi2_privacy_bound=bound,
        n=n,
        fano_ceiling=fano.ceiling,
        fano_saturated=fano.saturated,
        n_lower_bound=lower.n_min,
        small_d=lower.small_d,
    )


def mutual_information_per_sample(ch: Channel, alpha: float) -> float:
    """Information (bits) one message carries about the latent (b, j) pair.

    Computed two ways that must agree within 1e-10: the KL divergence of the
    joint (pair, message) law from the product of its marginals, and the
    average over pairs of the conditional-vs-marginal KL. Raises
    ArithmeticError if the cross-check fails.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    d = ch.input_dim
    marginal = push_forward(ch, uniform_pmf(d))
    conditionals = [
        push_forward(ch, pmf) for _, _, pmf in _pair_pmfs(d, alpha)
    ]
    averaged = sum(kl(c, marginal).bits for c in conditionals) / len(conditionals)
    joint = np.concatenate(conditionals) / len(conditionals)
    product = np.tile(marginal, len(conditionals)) / len(conditionals)
    joint_kl = kl(joint, product).bits
    if abs(joint_kl - averaged) > 1e-10:
        raise ArithmeticError(
            f"mutual information cross-check failed: {joint_kl} vs {averaged}"
        )
    return averaged


@dataclass(frozen=True)
class AverageCorrelationCheck:
    """Per-message diagnostics for the averaged squared-correlation bound.

    ``max_identity_residual`` compares the enumerated pair average against
    its degree-one Fourier form (alpha^2 / d) * sum_j coeff({j})^2;
    ``min_bound_slack``/``max_bound_slack`` track
    alpha^2 * supnorm^2 / d minus the enumerated average across messages.
    """

    max_identity_residual: float
    min_bound_slack: float
    max_bound_slack: float
    messages_checked: int
    messages_skipped: int


def verify_average_correlation(ch: Channel, alpha: float) -> AverageCorrelationCheck:
    """Check the Fourier identity and sup-norm bound for every message.

    For each message z with positive marginal probability, the enumerated
    average over (b, j) of the squared shift in the centered likelihood
    ratio's mean must equal its degree-one Fourier mass scaled by alpha^2/d
    and stay below alpha^2 * supnorm^2 / d.
    """
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    d = ch.input_dim
    marginal = push_forward(ch, uniform_pmf(d))
    uniform = uniform_pmf(d)
    pair_pmfs = _pair_pmfs(d, alpha)
    max_residual = 0.0
    min_slack = math.inf
    max_slack = -math.inf
    checked = 0
    skipped = 0
    for z in range(ch.message_alphabet_size):
        if marginal[z] <= 0.0:
            skipped += 1
            continue
        ratio = centered_likelihood_ratio(ch, z, float(marginal[z]))
        base = float(uniform @ ratio)
        shifts = np.array([pmf @ ratio - base for _, _, pmf in pair_pmfs])
        lhs = float(np.mean(shifts**2))
        coeffs = wht(ratio)
        degree_one = sum(float(coeffs[1 << k]) ** 2 for k in range(d))
        identity_rhs = alpha**2 / d * degree_one
        bound_rhs = alpha**2 * float(np.abs(ratio).max()) ** 2 / d
        max_residual = max(max_residual, abs(lhs - identity_rhs))
        slack = bound_rhs - lhs
        min_slack = min(min_slack, slack)
        max_slack = max(max_slack, slack)
        checked += 1
    if checked == 0:
        raise ValueError("channel emits no message with positive probability")
    return AverageCorrelationCheck(
        max_identity_residual=max_residual,
        min_bound_slack=min_slack,
        max_bound_slack=max_slack,
        messages_checked=checked,
        messages_skipped=skipped,
    )


@dataclass(frozen=True)
class SupNormCheck:
    """Worst-case centered likelihood ratio against the privacy limit e^eps - 1."""

    max_ratio_sup_norm: float
    limit: float
    ratio_to_limit: float
    epsilon_exact: float
    messages_skipped: int


def verify_ratio_sup_norm(ch: Channel) -> SupNormCheck:
    """Largest sup norm of the centered likelihood ratio over live messages.

    The audited channel parameter eps caps every ratio P(z|x)/p_Z(z) inside
    [e^-eps, e^eps], so the sup norm cannot exceed e^eps - 1. Messages with
    zero marginal probability are skipped and counted.
    """
    eps = audit_epsilon(ch).epsilon_exact
    if math.isinf(eps):
        raise ValueError("sup-norm check requires a channel with finite audited epsilon")
    marginal = push_forward(ch, uniform_pmf(ch.input_dim))
    sup = 0.0
    skipped = 0
    for z in range(ch.message_alphabet_size):
        if marginal[z] <= 0.0:
            skipped += 1
            continue
        ratio = centered_likelihood_ratio(ch, z, float(marginal[z]))
        sup = max(sup, float(np.abs(ratio).max()))
    limit = math.exp(eps) - 1.0
    return SupNormCheck(
        max_ratio_sup_norm=sup,
        limit=limit,
        ratio_to_limit=sup / limit if limit > 0.0 else 0.0,
        epsilon_exact=eps,
        messages_skipped=skipped,
    )


def tensorized_mi_bound(i_per_sample: float, n: int) -> float:
    """Information after n independent messages is at most n times one message's."""
    if i_per_sample < 0:
        raise ValueError(f"information must be nonnegative, got {i_per_sample}")
    if n < 0:
        raise ValueError(f"n must be nonnegative, got {n}")
    return n * i_per_sample


class FanoBound(NamedTuple):
    """Identification success ceiling (I + 1)/log2(k); vacuous above 1."""

    ceiling: float
    saturated: bool


def fano_success_bound(i_total_bits: float, outcomes: int) -> FanoBound:
    """Fano ceiling on guessing one of ``outcomes`` values from I bits."""
    if i_total_bits < 0:
        raise ValueError(f"information must be nonnegative, got {i_total_bits}")
    if outcomes < 2:
        raise ValueError(f"need at least 2 outcomes, got {outcomes}")
    ceiling = (i_total_bits + 1.0) / math.log2(outcomes)
    return FanoBound(ceiling, ceiling > 1.0)


class SampleLowerBound(NamedTuple):
    """Closed-form minimum sample count; flagged when d is below 32."""

    n_min: float
    small_d: bool


def sample_complexity_lower_bound(d: int, alpha: float, epsilon: float) -> SampleLowerBound:
    """Minimum samples for any local protocol to identify the latent pair.

    Evaluates d * log2(2d) / (6 * alpha^2 * (e^eps - 1)^2). Zero alpha or
    zero epsilon makes the bound infinite. The derivation assumes d >= 32;
    smaller d is allowed but flagged.
    """
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if epsilon < 0:
        raise ValueError(f"epsilon must be nonnegative, got {epsilon}")
    small = d < LOWER_BOUND_MIN_DIM
    if alpha == 0.0 or epsilon == 0.0:
        return SampleLowerBound(math.inf, small)
    value = d * math.log2(2 * d) / (6.0 * alpha**2 * (math.exp(epsilon) - 1.0) ** 2)
    return SampleLowerBound(value, small)
