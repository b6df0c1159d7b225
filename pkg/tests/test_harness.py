import math

import numpy as np
import pytest

from ldplab import CoordinateSamplingProtocol
from ldplab.harness import (
    ExperimentConfig,
    config_from_mapping,
    derive_seed,
    find_n_star,
    override_config,
    parse_config_text,
    records_to_table,
    run_point,
    run_sweep,
    separation_report,
    trial_rng,
    wilson_interval,
)


def test_wilson_contains_rate():
    for successes, trials in ((0, 10), (5, 10), (10, 10), (137, 200)):
        low, high = wilson_interval(successes, trials)
        assert 0.0 <= low <= successes / trials <= high <= 1.0


def test_wilson_coverage_at_half():
    rng = np.random.default_rng(314)
    covered = 0
    for _ in range(100):
        hits = int(rng.binomial(1000, 0.5))
        low, high = wilson_interval(hits, 1000)
        covered += low <= 0.5 <= high
    assert covered >= 90


def test_wilson_validates():
    with pytest.raises(ValueError):
        wilson_interval(5, 0)
    with pytest.raises(ValueError):
        wilson_interval(11, 10)


def test_derive_seed_is_stable_and_sensitive():
    assert derive_seed(1, 2, 0.5, 1.0, 10, 3) == 2146561884903873942
    assert derive_seed(1, 2, 0.5, 1.0, 10, 3) != derive_seed(1, 2, 0.5, 1.0, 10, 4)
    assert derive_seed(0, 2, 0.5, 1.0, 10, 3) != derive_seed(1, 2, 0.5, 1.0, 10, 3)


def test_trial_rng_reproducible():
    a = trial_rng(7, 4, 0.5, 1.0, 100, 3).random(5)
    b = trial_rng(7, 4, 0.5, 1.0, 100, 3).random(5)
    assert np.array_equal(a, b)


def test_parse_config_text():
    mapping = parse_config_text(
        """
        # grid
        d = 2, 4   # inline comment
        alpha = 0.5
        epsilon = 1
        protocol = local-rr
        n = 50, 100
        trials = 20
        criterion = identify-bj
        seed = 9
        """
    )
    assert mapping["d"] == "2, 4"
    assert mapping["protocol"] == "local-rr"
    with pytest.raises(ValueError):
        parse_config_text("no equals sign here")


def test_config_from_mapping_and_validation():
    base = {
        "d": "2",
        "alpha": "0.5",
        "epsilon": "1",
        "protocol": "local-rr",
        "n": "10",
        "trials": "5",
        "criterion": "identify-bj",
        "seed": "3",
    }
    cfg = config_from_mapping(base)
    assert cfg.d_values == (2,) and cfg.n_values == (10,)
    with pytest.raises(ValueError):
        config_from_mapping({**base, "bogus": "1"})
    with pytest.raises(ValueError):
        config_from_mapping({k: v for k, v in base.items() if k != "seed"})
    with pytest.raises(ValueError):
        config_from_mapping({**base, "protocol": "unknown"})
    with pytest.raises(ValueError):
        config_from_mapping({**base, "criterion": "unknown"})
    with pytest.raises(ValueError):
        config_from_mapping({**base, "alpha": "1.5"})
    with pytest.raises(ValueError):
        config_from_mapping({**base, "protocol": "central-em", "n": "0"})


def test_override_config():
    cfg = config_from_mapping(
        {
            "d": "2",
            "alpha": "0.5",
            "epsilon": "1",
            "protocol": "local-rr",
            "n": "10",
            "trials": "5",
            "criterion": "identify-bj",
            "seed": "3",
        }
    )
    assert override_config(cfg, seed=None).seed == 3
    assert override_config(cfg, seed=77).seed == 77


def _small_cfg(**kw):
    base = dict(
        d_values=(2,),
        alpha_values=(0.5,),
        epsilon_values=(1.0,),
        protocol="local-rr",
        n_values=(20, 40),
        trials=20,
        criterion="identify-bj",
        seed=5,
    )
    base.update(kw)
    return ExperimentConfig(**base)


def test_run_sweep_deterministic_and_sorted():
    cfg = _small_cfg(d_values=(4, 2))
    records = run_sweep(cfg)
    again = run_sweep(cfg)
    assert records == again
    keys = [r.sort_key() for r in records]
    assert keys == sorted(keys)
    assert records_to_table(records) == records_to_table(again)


def test_run_sweep_threads_match_serial():
    cfg = _small_cfg()
    serial = run_sweep(cfg)
    threaded = run_sweep(_small_cfg(threads=2))
    assert serial == threaded


def test_records_table_format():
    table = records_to_table(run_sweep(_small_cfg()))
    lines = table.split("\n")
    assert lines[0].startswith("d,alpha,epsilon,protocol,n,trials,successes")
    assert table.endswith("\n")
    assert "\r" not in table
    tsv = records_to_table(run_sweep(_small_cfg()), "tsv")
    assert "\t" in tsv.split("\n")[0]


def test_run_point_near_noiseless_local():
    rec = run_point(2, 1.0, 5.0, "local-rr", "identify-bj", 2000, 200, 42).record
    assert rec.success_rate >= 0.95


def test_run_point_chance_level_at_alpha_zero():
    result = run_point(2, 0.0, 1.0, "central-em", "identify-bj", 50, 400, 11)
    rec = result.record
    assert rec.wilson_ci_low <= 1 / 4 <= rec.wilson_ci_high
    assert rec.successes <= rec.trials
    assert rec.wilson_ci_low <= rec.success_rate <= rec.wilson_ci_high


def test_run_point_gap_criterion_reports_mean_gap():
    result = run_point(2, 0.5, 5.0, "central-laplace-argmax", "gap", 400, 100, 11)
    assert result.mean_gap is not None
    assert result.mean_gap >= 0.0
    assert result.record.success_rate >= 0.9


def test_run_point_identify_j_at_least_pair_rate():
    pair = run_point(2, 0.8, 2.0, "local-rr", "identify-bj", 100, 100, 3).record
    coord = run_point(2, 0.8, 2.0, "local-rr", "identify-j", 100, 100, 3).record
    assert coord.successes >= pair.successes


def test_recorded_epsilon_matches_audit():
    cfg = _small_cfg()
    for rec in run_sweep(cfg):
        audited = CoordinateSamplingProtocol(rec.d, rec.epsilon).audited_epsilon()
        assert abs(audited - rec.epsilon) <= 1e-9


def test_find_n_star_not_found_without_signal():
    res = find_n_star(2, 0.0, 1.0, "local-rr", "identify-bj", 200, 9, 1 / 3, 64)
    assert not res.found and res.n_star is None
    assert all(rec.n <= 64 for rec in res.trace)


def test_find_n_star_finds_clear_signal():
    res = find_n_star(2, 1.0, 2.0, "local-rr", "identify-bj", 200, 9, 0.5, 4096)
    assert res.found
    assert 1 <= res.n_star <= 4096
    # smallest passing tested n: every smaller tested n failed
    for rec in res.trace:
        if rec.n < res.n_star:
            assert rec.wilson_ci_low < 0.5


def test_find_n_star_doubling_trace_statistically_monotone():
    res = find_n_star(2, 0.8, 1.0, "local-rr", "identify-bj", 300, 21, 2 / 3, 1 << 12)
    assert res.found
    doubling = [r for r in res.trace if (r.n & (r.n - 1)) == 0]
    doubling.sort(key=lambda r: r.n)
    for lo, hi in zip(doubling, doubling[1:]):
        lo_half = (lo.wilson_ci_high - lo.wilson_ci_low) / 2
        hi_half = (hi.wilson_ci_high - hi.wilson_ci_low) / 2
        assert hi.success_rate >= lo.success_rate - (lo_half + hi_half)


def test_find_n_star_validates_trials():
    with pytest.raises(ValueError):
        find_n_star(2, 0.5, 1.0, "local-rr", "identify-bj", 30, 9, 2 / 3, 64)
    with pytest.raises(ValueError):
        find_n_star(2, 0.5, 1.0, "local-rr", "identify-bj", 200, 9, 1.5, 64)


def test_separation_report_small_grid():
    report = separation_report(
        (2, 4), 1.0, 2.0, 0.5, 150, 13, n_max_local=4096, n_max_central=512
    )
    assert len(report.rows) == 2
    for row in report.rows:
        assert row.n_local is not None and row.n_central is not None
        assert row.ratio == row.n_local / row.n_central
        assert row.ratio > 0
        assert row.bound_small_d
        assert math.isfinite(row.bound_n_min)
    text = report.to_text()
    assert "n*_local" in text
    csv = report.to_csv()
    assert csv.splitlines()[0] == "d,n_local,n_central,ratio,bound_n_min,bound_small_d"


def test_separation_report_renders_not_found():
    report = separation_report(
        (2,), 0.0, 1.0, 0.5, 150, 13, n_max_local=4, n_max_central=4
    )
    assert report.rows[0].n_local is None
    assert "not-found" in report.to_text()
