"""Independent slow-path implementations used to cross-check the library.

Everything here recomputes results from definitions with explicit loops or
exhaustive enumeration, deliberately avoiding the code paths under test.
"""

from __future__ import annotations

import numpy as np

from ldplab import Channel, HardInstance
from ldplab.hard_instances import enumerate_signs


def em_success_brute_force(
    inst: HardInstance, n: int, epsilon: float, chunk: int = 1 << 18
) -> float:
    """Exact selection probability by enumerating every ordered dataset.

    Datasets are mixed-radix integers with one base-2^d digit per sample;
    chunked so the (2^d)^n grid never materializes at once.
    """
    d = inst.d
    k = 2**d
    signs = enumerate_signs(d).astype(np.float64)
    point_probs = inst.pmf_vector()
    target = (inst.j - 1) if inst.b == 1 else d + (inst.j - 1)
    total = k**n
    acc = 0.0
    for lo in range(0, total, chunk):
        ids = np.arange(lo, min(lo + chunk, total), dtype=np.int64)
        weight = np.ones(ids.size)
        sums = np.zeros((ids.size, d))
        rest = ids
        for _ in range(n):
            digit = rest % k
            rest = rest // k
            weight *= point_probs[digit]
            sums += signs[digit]
        scores = epsilon * np.concatenate([sums, -sums], axis=1) / 4.0
        scores -= scores.max(axis=1, keepdims=True)
        w = np.exp(scores)
        acc += float(weight @ (w[:, target] / w.sum(axis=1)))
    return acc


def instance_pmf_inline(d: int, alpha: float, b: int, j: int, x_index: int) -> float:
    """Closed-form point probability recomputed from scratch."""
    sign = 1 if (x_index >> (j - 1)) & 1 else -1
    p = (1.0 - alpha) * 2.0**-d
    if sign == b:
        p += alpha * 2.0 ** (1 - d)
    return p


def average_chi_square_brute_force(ch: Channel, alpha: float) -> float:
    """Pair-averaged chi-square divergence via explicit Python loops."""
    d = ch.input_dim
    k = 2**d
    m = ch.message_alphabet_size
    probs = ch.probabilities
    marginal = [sum(probs[x][z] for x in range(k)) / k for z in range(m)]
    total = 0.0
    for b in (1, -1):
        for j in range(1, d + 1):
            chi2 = 0.0
            for z in range(m):
                cond = sum(
                    instance_pmf_inline(d, alpha, b, j, x) * probs[x][z]
                    for x in range(k)
                )
                if marginal[z] > 0.0:
                    diff = cond - marginal[z]
                    chi2 += diff * diff / marginal[z]
            total += chi2
    return total / (2 * d)


def wht_direct(values) -> np.ndarray:
    """Fourier coefficients by direct summation over all (mask, input) pairs."""
    f = np.asarray(values, dtype=float)
    size = f.size
    d = size.bit_length() - 1
    out = np.empty(size)
    for mask in range(size):
        total = 0.0
        for i in range(size):
            character = 1.0
            for bit in range(d):
                if (mask >> bit) & 1:
                    character *= 1.0 if (i >> bit) & 1 else -1.0
            total += f[i] * character
        out[mask] = total / size
    return out


def correlation_average_brute_force(ch: Channel, alpha: float, z: int) -> float:
    """Average over (b, j) of the squared mean shift of the centered ratio.

    Everything is recomputed inline: the marginal, the ratio table, the
    instance pmfs, and the double loop over latent pairs and inputs.
    """
    d = ch.input_dim
    k = 2**d
    probs = ch.probabilities
    marginal = sum(probs[x][z] for x in range(k)) / k
    ratio = [probs[x][z] / marginal - 1.0 for x in range(k)]
    base = sum(ratio[x] / k for x in range(k))
    total = 0.0
    for b in (1, -1):
        for j in range(1, d + 1):
            shifted = sum(
                instance_pmf_inline(d, alpha, b, j, x) * ratio[x] for x in range(k)
            )
            total += (shifted - base) ** 2
    return total / (2 * d)
