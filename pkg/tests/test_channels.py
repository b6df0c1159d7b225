import math

import numpy as np
import pytest

from ldplab import (
    Channel,
    HardInstance,
    audit_epsilon,
    coordinate_sampling_rr,
    full_rr,
    push_forward,
    random_dp_channel,
    read_channel,
    rr_bit,
    uniform_pmf,
    write_channel,
)

EPS_GRID = (0.1, 0.5, 1.0, 2.0, math.log(3))
D_GRID = (1, 2, 4, 8)


def test_rr_bit_matrix():
    ch = rr_bit(math.log(3))
    expected = np.array([[0.75, 0.25], [0.25, 0.75]])
    assert np.abs(ch.probabilities - expected).max() <= 1e-12


def test_rr_bit_vanishing_epsilon():
    ch = rr_bit(1e-9)
    assert np.abs(ch.probabilities - 0.5).max() <= 1e-9


def test_rr_bit_rejects_nonpositive():
    with pytest.raises(ValueError):
        rr_bit(0.0)
    with pytest.raises(ValueError):
        rr_bit(-1.0)


def test_coordinate_sampling_rr_single_coordinate_is_rr_bit():
    a = coordinate_sampling_rr(1, math.log(3)).probabilities
    b = rr_bit(math.log(3)).probabilities
    assert np.abs(a - b).max() <= 1e-15


def test_coordinate_sampling_rr_row_values():
    ch = coordinate_sampling_rr(2, math.log(3))
    # input x = (+1, -1) sits at index 1; columns are (1,-1),(1,+1),(2,-1),(2,+1)
    row = ch.probabilities[1]
    assert np.abs(row - [1 / 8, 3 / 8, 3 / 8, 1 / 8]).max() <= 1e-12


@pytest.mark.parametrize("d", D_GRID)
@pytest.mark.parametrize("eps", EPS_GRID)
def test_audit_matches_construction(d, eps):
    assert abs(audit_epsilon(coordinate_sampling_rr(d, eps)).epsilon_exact - eps) <= 1e-12
    assert abs(audit_epsilon(rr_bit(eps)).epsilon_exact - eps) <= 1e-12
    assert abs(audit_epsilon(full_rr(d, eps)).epsilon_exact - eps) <= 1e-12


def test_full_rr_product_structure():
    ch = full_rr(2, 2.0)
    keep = math.exp(1.0) / (1.0 + math.exp(1.0))
    for x in range(4):
        assert ch.probabilities[x, x] == pytest.approx(keep**2, abs=1e-15)
    assert abs(audit_epsilon(full_rr(3, 0.3)).epsilon_exact - 0.3) <= 1e-10


def test_full_rr_single_coordinate_is_rr_bit():
    a = full_rr(1, 0.8).probabilities
    b = rr_bit(0.8).probabilities
    assert np.abs(a - b).max() <= 1e-15


def test_row_stochastic_constructors():
    for ch in (rr_bit(0.7), coordinate_sampling_rr(4, 1.3), full_rr(3, 2.1)):
        sums = ch.probabilities.sum(axis=1)
        assert np.abs(sums - 1.0).max() <= 1e-12
        assert (ch.probabilities >= 0).all()


def test_audit_constant_channel_is_zero():
    ch = Channel(2, np.tile([0.3, 0.7], (4, 1)))
    assert audit_epsilon(ch).epsilon_exact == 0.0


def test_audit_structural_zero_is_infinite():
    probs = np.array([[1.0, 0.0], [0.5, 0.5]])
    audit = audit_epsilon(Channel(1, probs))
    assert math.isinf(audit.epsilon_exact)
    z, x, xp = audit.attained_at
    assert probs[x, z] > 0.0 and probs[xp, z] == 0.0


def test_audit_witness_attains_epsilon():
    ch = coordinate_sampling_rr(3, 1.2)
    audit = audit_epsilon(ch)
    z, x, xp = audit.attained_at
    assert math.log(ch.probabilities[x, z] / ch.probabilities[xp, z]) == pytest.approx(
        audit.epsilon_exact, abs=1e-15
    )


def test_audit_invariant_under_message_permutation():
    rng = np.random.default_rng(17)
    ch = random_dp_channel(3, 1.0, 6, rng)
    perm = rng.permutation(6)
    shuffled = Channel(3, ch.probabilities[:, perm])
    assert audit_epsilon(shuffled).epsilon_exact == audit_epsilon(ch).epsilon_exact


def test_push_forward_uniform_through_rr_bit():
    out = push_forward(rr_bit(1.7), uniform_pmf(1))
    assert np.abs(out - 0.5).max() <= 1e-15


def test_push_forward_point_mass_gives_row():
    ch = coordinate_sampling_rr(2, 0.9)
    dist = np.zeros(4)
    dist[3] = 1.0
    assert np.array_equal(push_forward(ch, dist), ch.probabilities[3])


def test_push_forward_hard_instance_through_rr_bit():
    out = push_forward(rr_bit(math.log(3)), HardInstance(1, 1.0, 1, 1).pmf_vector())
    assert np.abs(out - [0.25, 0.75]).max() <= 1e-12


def test_push_forward_conserves_mass_and_is_linear():
    rng = np.random.default_rng(3)
    ch = random_dp_channel(3, 1.5, 4, rng)
    p = rng.random(8)
    p /= p.sum()
    q = rng.random(8)
    q /= q.sum()
    lam = 0.3
    assert abs(push_forward(ch, p).sum() - 1.0) <= 1e-9
    mixed = push_forward(ch, lam * p + (1 - lam) * q)
    combo = lam * push_forward(ch, p) + (1 - lam) * push_forward(ch, q)
    assert np.abs(mixed - combo).max() <= 1e-12


def test_push_forward_rejects_bad_input():
    ch = rr_bit(1.0)
    with pytest.raises(ValueError):
        push_forward(ch, [0.4, 0.4])
    with pytest.raises(ValueError):
        push_forward(ch, [0.5, 0.25, 0.25])


def test_random_dp_channel_single_column():
    ch = random_dp_channel(2, 1.0, 1, np.random.default_rng(0))
    assert ch.probabilities.shape == (4, 1)
    assert audit_epsilon(ch).epsilon_exact == 0.0


def test_random_dp_channel_zero_epsilon_is_constant():
    ch = random_dp_channel(2, 0.0, 3, np.random.default_rng(4))
    assert np.abs(ch.probabilities - ch.probabilities[0]).max() == 0.0
    assert audit_epsilon(ch).epsilon_exact == 0.0


def test_random_dp_channel_respects_budget():
    ch = random_dp_channel(2, 1.0, 4, np.random.default_rng(12))
    assert audit_epsilon(ch).epsilon_exact <= 1.0


def test_random_dp_channel_deterministic():
    a = random_dp_channel(3, 0.8, 5, np.random.default_rng(77)).probabilities
    b = random_dp_channel(3, 0.8, 5, np.random.default_rng(77)).probabilities
    assert np.array_equal(a, b)


def test_channel_validation():
    with pytest.raises(ValueError):
        Channel(1, np.array([[0.6, 0.5], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        Channel(1, np.array([[1.1, -0.1], [0.5, 0.5]]))
    with pytest.raises(ValueError):
        Channel(2, np.array([[0.5, 0.5], [0.5, 0.5]]))


def test_channel_file_roundtrip(tmp_path):
    ch = coordinate_sampling_rr(3, 1.1)
    path = tmp_path / "ch.txt"
    write_channel(ch, path)
    again = read_channel(path)
    assert again.input_dim == 3
    assert np.array_equal(again.probabilities, ch.probabilities)


def test_read_channel_rejects_malformed(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("2 4\n0.25 0.25 0.25 0.25\n")
    with pytest.raises(ValueError):
        read_channel(path)
    path.write_text("junk\n")
    with pytest.raises(ValueError):
        read_channel(path)
