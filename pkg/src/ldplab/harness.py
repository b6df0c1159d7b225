"""Reproducible sweep driver: grids, seeding, threshold search, separation.

Every trial owns a generator seeded by a stable 64-bit hash of
(master seed, d, alpha, epsilon, n, trial index), so identical configs
reproduce byte-identical output no matter how points are scheduled. Records
are sorted on (d, alpha, epsilon, protocol, n) before emission, which keeps
parallel runs byte-compatible with serial ones.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from itertools import product

import numpy as np

from .central import exponential_mechanism, laplace_mean
from .hard_instances import HardInstance, MixtureIndex
from .info_engine import sample_complexity_lower_bound
from .protocols import (
    L1_BALL,
    CoordinateSamplingProtocol,
    FeasiblePoint,
    optimization_gap,
    run_identification,
    select_coordinate,
)

__all__ = [
    "PROTOCOLS",
    "CRITERIA",
    "ExperimentConfig",
    "SweepRecord",
    "PointResult",
    "NStarResult",
    "SeparationRow",
    "SeparationReport",
    "wilson_interval",
    "derive_seed",
    "trial_rng",
    "run_point",
    "run_sweep",
    "records_to_table",
    "find_n_star",
    "separation_report",
    "parse_config_text",
    "config_from_mapping",
    "override_config",
]

PROTOCOLS = ("local-rr", "central-em", "central-laplace-argmax")
CRITERIA = ("identify-bj", "identify-j", "gap")

Z95 = 1.959963984540054

CSV_HEADER = (
    "d,alpha,epsilon,protocol,n,trials,successes,success_rate,"
    "wilson_ci_low,wilson_ci_high,seed"
)


def wilson_interval(successes: int, trials: int, z: float = Z95) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion; always contains the rate."""
    if trials < 1:
        raise ValueError(f"trials must be positive, got {trials}")
    if not 0 <= successes <= trials:
        raise ValueError(f"successes {successes} out of range for {trials} trials")
    p = successes / trials
    denom = 1.0 + z * z / trials
    center = (p + z * z / (2 * trials)) / denom
    half = z * math.sqrt(p * (1.0 - p) / trials + z * z / (4 * trials * trials)) / denom
    # the interval contains p in exact arithmetic; rounding at the endpoints
    # (e.g. p = 1) must not break that
    return max(min(center - half, p), 0.0), min(max(center + half, p), 1.0)


def derive_seed(*parts) -> int:
    """Stable 64-bit seed from a mixed tuple of ints, floats, and strings."""
    key = "|".join(repr(float(p)) if isinstance(p, float) else str(p) for p in parts)
    digest = hashlib.blake2b(key.encode("ascii"), digest_size=8).digest()
    return int.from_bytes(digest, "big")


def trial_rng(
    master_seed: int, d: int, alpha: float, epsilon: float, n: int, trial: int
) -> np.random.Generator:
    return np.random.default_rng(derive_seed(master_seed, d, alpha, epsilon, n, trial))


@dataclass(frozen=True)
class SweepRecord:
    """One measured grid point of a sweep."""

    d: int
    alpha: float
    epsilon: float
    protocol: str
    n: int
    trials: int
    successes: int
    success_rate: float
    wilson_ci_low: float
    wilson_ci_high: float
    seed: int

    def sort_key(self):
        return (self.d, self.alpha, self.epsilon, self.protocol, self.n)

    def to_row(self) -> list[str]:
        return [
            str(self.d),
            repr(float(self.alpha)),
            repr(float(self.epsilon)),
            self.protocol,
            str(self.n),
            str(self.trials),
            str(self.successes),
            repr(float(self.success_rate)),
            repr(float(self.wilson_ci_low)),
            repr(float(self.wilson_ci_high)),
            str(self.seed),
        ]


@dataclass(frozen=True)
class PointResult:
    """A sweep record plus the per-trial mean gap when the gap criterion ran."""

    record: SweepRecord
    mean_gap: float | None


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated grid description for a sweep."""

    d_values: tuple[int, ...]
    alpha_values: tuple[float, ...]
    epsilon_values: tuple[float, ...]
    protocol: str
    n_values: tuple[int, ...]
    trials: int
    criterion: str
    seed: int
    out: str | None = None
    threads: int = 1

    def __post_init__(self):
        if not self.d_values or not self.alpha_values or not self.epsilon_values:
            raise ValueError("d, alpha, and epsilon grids must be nonempty")
        if not self.n_values:
            raise ValueError("n grid must be nonempty")
        if any(d < 1 for d in self.d_values):
            raise ValueError("all d values must be positive")
        if any(not 0.0 <= a <= 1.0 for a in self.alpha_values):
            raise ValueError("all alpha values must lie in [0, 1]")
        if any(e <= 0.0 for e in self.epsilon_values):
            raise ValueError("all epsilon values must be positive")
        if self.protocol not in PROTOCOLS:
            raise ValueError(f"unknown protocol {self.protocol!r}; choose from {PROTOCOLS}")
        if self.criterion not in CRITERIA:
            raise ValueError(f"unknown criterion {self.criterion!r}; choose from {CRITERIA}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.protocol != "local-rr" and any(n < 1 for n in self.n_values):
            raise ValueError("central protocols need n >= 1 at every grid point")
        if any(n < 0 for n in self.n_values):
            raise ValueError("n values must be nonnegative")
        if self.threads < 1:
            raise ValueError(f"threads must be positive, got {self.threads}")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


def _run_trial(
    inst: HardInstance,
    protocol: str,
    criterion: str,
    epsilon: float,
    n: int,
    rng: np.random.Generator,
) -> tuple[bool, float | None]:
    if protocol == "local-rr":
        local = CoordinateSamplingProtocol(inst.d, epsilon)
        res = run_identification(inst, n, local, rng)
        b_hat, j_hat = res.b_hat, res.j_hat
    elif protocol == "central-em":
        b_hat, j_hat = exponential_mechanism(inst.sample(n, rng), epsilon, rng)
    elif protocol == "central-laplace-argmax":
        noisy = laplace_mean(inst.sample(n, rng), epsilon, rng)
        b_hat, j_hat = select_coordinate(noisy)
    else:
        raise ValueError(f"unknown protocol {protocol!r}")
    if criterion == "identify-bj":
        return (b_hat == inst.b and j_hat == inst.j), None
    if criterion == "identify-j":
        return j_hat == inst.j, None
    if criterion != "gap":
        raise ValueError(f"unknown criterion {criterion!r}")
    vertex = np.zeros(inst.d)
    vertex[j_hat - 1] = float(b_hat)
    gap = optimization_gap(
        inst.coordinate_means(), FeasiblePoint(vertex, L1_BALL)
    )
    return gap <= inst.alpha / 3.0, gap


def run_point(
    d: int,
    alpha: float,
    epsilon: float,
    protocol: str,
    criterion: str,
    n: int,
    trials: int,
    master_seed: int,
) -> PointResult:
    """Measure one grid point with independent per-trial generators.

    Each trial draws its own latent (b, j) pair before running the protocol,
    so the success rate estimates the mixture experiment.
    """
    successes = 0
    gap_total = 0.0
    for trial in range(trials):
        rng = trial_rng(master_seed, d, alpha, epsilon, n, trial)
        latent = MixtureIndex.draw(d, rng)
        inst = HardInstance(d, alpha, latent.b, latent.j)
        ok, gap = _run_trial(inst, protocol, criterion, epsilon, n, rng)
        successes += ok
        if gap is not None:
            gap_total += gap
    low, high = wilson_interval(successes, trials)
    record = SweepRecord(
        d=d,
        alpha=alpha,
        epsilon=epsilon,
        protocol=protocol,
        n=n,
        trials=trials,
        successes=successes,
        success_rate=successes / trials,
        wilson_ci_low=low,
        wilson_ci_high=high,
        seed=master_seed,
    )
    mean_gap = gap_total / trials if criterion == "gap" else None
    return PointResult(record, mean_gap)


def _point_task(args) -> PointResult:
    return run_point(*args)


def run_sweep(cfg: ExperimentConfig) -> list[SweepRecord]:
    """Run the full grid and return records sorted for deterministic emission."""
    tasks = [
        (d, alpha, epsilon, cfg.protocol, cfg.criterion, n, cfg.trials, cfg.seed)
        for d, alpha, epsilon, n in product(
            cfg.d_values, cfg.alpha_values, cfg.epsilon_values, cfg.n_values
        )
    ]
    if cfg.protocol == "local-rr":
        for d, epsilon in {(t[0], t[2]) for t in tasks}:
            audited = CoordinateSamplingProtocol(d, epsilon).audited_epsilon()
            if abs(audited - epsilon) > 1e-9:
                raise ArithmeticError(
                    f"randomizer audit {audited} disagrees with budget {epsilon}"
                )
    if cfg.threads > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            results = list(pool.map(_point_task, tasks))
    else:
        results = [_point_task(t) for t in tasks]
    records = [r.record for r in results]
    records.sort(key=SweepRecord.sort_key)
    return records


def _quote(field: str, delimiter: str) -> str:
    if any(c in field for c in (delimiter, '"', "\r", "\n")):
        return '"' + field.replace('"', '""') + '"'
    return field


def records_to_table(records, fmt: str = "csv") -> str:
    """Render records with the fixed header, LF line endings, minimal quoting."""
    if fmt not in ("csv", "tsv"):
        raise ValueError(f"format must be csv or tsv, got {fmt!r}")
    delim = "," if fmt == "csv" else "\t"
    lines = [delim.join(CSV_HEADER.split(","))]
    for rec in records:
        lines.append(delim.join(_quote(f, delim) for f in rec.to_row()))
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class NStarResult:
    """Outcome of the threshold search, with every measurement kept."""

    found: bool
    n_star: int | None
    trace: tuple[SweepRecord, ...]
    warning: str | None


def find_n_star(
    d: int,
    alpha: float,
    epsilon: float,
    protocol: str,
    criterion: str,
    trials: int,
    master_seed: int,
    target_rate: float,
    n_max: int,
    n_start: int = 1,
) -> NStarResult:
    """Smallest tested n whose Wilson lower bound reaches the target rate.

    Doubles n until a point passes, then bisects down to the smallest passing
    tested n; statistical monotonicity in n makes this sound. If a clearly
    failing point sits above a clearly passing one (disjoint intervals around
    the target), the run is flagged and the most conservative passing n,
    the one with no clear failure above it, is returned.
    """
    if not 0.0 < target_rate < 1.0:
        raise ValueError(f"target rate must lie in (0, 1), got {target_rate}")
    if n_max < n_start:
        raise ValueError(f"n_max {n_max} below n_start {n_start}")
    approx = wilson_interval(round(target_rate * trials), trials)
    if (approx[1] - approx[0]) / 2.0 >= 0.1:
        raise ValueError(
            f"trials={trials} gives CI half-width >= 0.1 at rate {target_rate};"
            " increase trials"
        )
    measured: dict[int, SweepRecord] = {}

    def measure(n: int) -> SweepRecord:
        if n not in measured:
            measured[n] = run_point(
                d, alpha, epsilon, protocol, criterion, n, trials, master_seed
            ).record
        return measured[n]

    def passes(rec: SweepRecord) -> bool:
        return rec.wilson_ci_low >= target_rate

    def trace() -> tuple[SweepRecord, ...]:
        return tuple(sorted(measured.values(), key=lambda r: r.n))

    n = n_start
    first_pass = None
    last_fail = None
    while n <= n_max:
        rec = measure(n)
        if passes(rec):
            first_pass = n
            break
        last_fail = n
        n *= 2
    if first_pass is None:
        return NStarResult(False, None, trace(), None)
    lo = last_fail if last_fail is not None else first_pass - 1
    hi = first_pass
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if passes(measure(mid)):
            hi = mid
        else:
            lo = mid
    warning = None
    passing = sorted(m for m, rec in measured.items() if passes(rec))
    clear_fail = sorted(
        m for m, rec in measured.items() if rec.wilson_ci_high < target_rate
    )
    if clear_fail and clear_fail[-1] > passing[0]:
        warning = (
            f"non-monotone measurements: clear failure at n={clear_fail[-1]}"
            f" above passing n={passing[0]}"
        )
        above_all_failures = [m for m in passing if m > clear_fail[-1]]
        hi = min(above_all_failures) if above_all_failures else passing[-1]
    return NStarResult(True, hi, trace(), warning)


@dataclass(frozen=True)
class SeparationRow:
    d: int
    n_local: int | None
    n_central: int | None
    ratio: float | None
    bound_n_min: float
    bound_small_d: bool


@dataclass(frozen=True)
class SeparationReport:
    alpha: float
    epsilon: float
    target_rate: float
    trials: int
    seed: int
    rows: tuple[SeparationRow, ...]

    def to_text(self) -> str:
        header = f"{'d':>6} {'n*_local':>10} {'n*_central':>11} {'ratio':>10} {'n_min_bound':>12}"
        lines = [
            f"separation at alpha={self.alpha!r} epsilon={self.epsilon!r}"
            f" target={self.target_rate!r} trials={self.trials} seed={self.seed}",
            header,
        ]
        for row in self.rows:
            loc = str(row.n_local) if row.n_local is not None else "not-found"
            cen = str(row.n_central) if row.n_central is not None else "not-found"
            rat = f"{row.ratio:.2f}" if row.ratio is not None else "-"
            bound = f"{row.bound_n_min:.1f}" + ("*" if row.bound_small_d else "")
            lines.append(f"{row.d:>6} {loc:>10} {cen:>11} {rat:>10} {bound:>12}")
        if any(r.bound_small_d for r in self.rows):
            lines.append("* closed-form bound evaluated below its d >= 32 hypothesis")
        return "\n".join(lines)

    def to_csv(self) -> str:
        lines = ["d,n_local,n_central,ratio,bound_n_min,bound_small_d"]
        for row in self.rows:
            lines.append(
                ",".join(
                    [
                        str(row.d),
                        str(row.n_local) if row.n_local is not None else "",
                        str(row.n_central) if row.n_central is not None else "",
                        repr(float(row.ratio)) if row.ratio is not None else "",
                        repr(float(row.bound_n_min)),
                        str(int(row.bound_small_d)),
                    ]
                )
            )
        return "\n".join(lines) + "\n"


def separation_report(
    d_values,
    alpha: float,
    epsilon: float,
    target_rate: float,
    trials: int,
    master_seed: int,
    n_max_local: int = 1 << 17,
    n_max_central: int = 1 << 14,
    criterion: str = "identify-bj",
) -> SeparationReport:
    """Measure local and central sample thresholds side by side per dimension."""
    rows = []
    for d in d_values:
        local = find_n_star(
            d, alpha, epsilon, "local-rr", criterion, trials, master_seed,
            target_rate, n_max_local,
        )
        central = find_n_star(
            d, alpha, epsilon, "central-em", criterion, trials, master_seed,
            target_rate, n_max_central,
        )
        ratio = None
        if local.found and central.found:
            ratio = local.n_star / central.n_star
        bound = sample_complexity_lower_bound(d, alpha, epsilon)
        rows.append(
            SeparationRow(
                d=d,
                n_local=local.n_star,
                n_central=central.n_star,
                ratio=ratio,
                bound_n_min=bound.n_min,
                bound_small_d=bound.small_d,
            )
        )
    return SeparationReport(
        alpha=alpha,
        epsilon=epsilon,
        target_rate=target_rate,
        trials=trials,
        seed=master_seed,
        rows=tuple(rows),
    )


def parse_config_text(text: str) -> dict[str, str]:
    """Parse `key = value` lines; `#` starts a comment, blank lines ignored."""
    out: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def _int_list(value: str) -> tuple[int, ...]:
    return tuple(int(v.strip()) for v in value.split(",") if v.strip())


def _float_list(value: str) -> tuple[float, ...]:
    return tuple(float(v.strip()) for v in value.split(",") if v.strip())


def config_from_mapping(mapping: dict[str, str]) -> ExperimentConfig:
    """Build a validated config from string key-value pairs."""
    known = {"d", "alpha", "epsilon", "protocol", "n", "trials", "criterion", "seed", "out", "threads"}
    unknown = set(mapping) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    missing = {"d", "alpha", "epsilon", "protocol", "n", "trials", "criterion", "seed"} - set(mapping)
    if missing:
        raise ValueError(f"missing config keys: {sorted(missing)}")
    return ExperimentConfig(
        d_values=_int_list(mapping["d"]),
        alpha_values=_float_list(mapping["alpha"]),
        epsilon_values=_float_list(mapping["epsilon"]),
        protocol=mapping["protocol"],
        n_values=_int_list(mapping["n"]),
        trials=int(mapping["trials"]),
        criterion=mapping["criterion"],
        seed=int(mapping["seed"]),
        out=mapping.get("out"),
        threads=int(mapping.get("threads", "1")),
    )


def override_config(cfg: ExperimentConfig, **overrides) -> ExperimentConfig:
    """Apply non-None overrides (CLI flags win over file values)."""
    live = {k: v for k, v in overrides.items() if v is not None}
    return replace(cfg, **live) if live else cfg
