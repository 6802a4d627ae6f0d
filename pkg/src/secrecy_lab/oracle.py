"""Independent verification oracles: a seeded Monte Carlo event simulator and
adaptive Simpson quadrature of the outage integrals.

Both routes evaluate the outage event from its definition (secrecy capacity
below the target rate) without reusing the closed-form algebra, so agreement
between all three is a meaningful cross-check.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import SystemConfig, sample_gains, secrecy_threshold, _check_user
from .results import Method, OutageResult, clamp_probability

__all__ = [
    "Policy",
    "SimulationSpec",
    "ConvergenceError",
    "simulate_outage",
    "simulate_scheduling_counts",
    "adaptive_simpson",
    "quadrature_roundrobin_user",
    "quadrature_proposed",
    "worker_count",
    "QUADRATURE_TOLERANCE",
]

THREADS_ENV_VAR = "SECRECY_LAB_THREADS"

# Absolute tolerance per integral; the truncation tail beyond threshold +
# 50 * sigma2_main is below exp(-50) ~ 2e-22 and lives inside this budget.
QUADRATURE_TOLERANCE = 1e-10
TAIL_LIFETIMES = 50.0


class Policy(Enum):
    ROUND_ROBIN = "round_robin"
    MAX_GAIN = "max_gain"


class ConvergenceError(RuntimeError):
    """Quadrature failed to reach its tolerance within the subdivision limit."""


@dataclass(frozen=True)
class SimulationSpec:
    """Monte Carlo run description.

    Trials are partitioned into blocks of block_size; block b draws its own
    generator from (seed, b), so estimates are bitwise reproducible for fixed
    (seed, trials, block_size) regardless of how blocks are parallelized.
    """

    trials: int
    seed: int
    policy: Policy
    block_size: int = 65536

    def __post_init__(self):
        if not isinstance(self.trials, (int, np.integer)) or self.trials < 1:
            raise ValueError(f"trials must be an integer >= 1, got {self.trials!r}")
        if not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed < 2 ** 64:
            raise ValueError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if not isinstance(self.policy, Policy):
            raise ValueError(f"policy must be a Policy, got {self.policy!r}")
        if not isinstance(self.block_size, (int, np.integer)) or self.block_size < 1:
            raise ValueError(f"block_size must be an integer >= 1, got {self.block_size!r}")


def worker_count() -> int:
    """Worker parallelism cap: SECRECY_LAB_THREADS if set, else available cores."""
    raw = os.environ.get(THREADS_ENV_VAR)
    if raw is None:
        return os.cpu_count() or 1
    try:
        count = int(raw)
    except ValueError:
        count = 0
    if count < 1:
        raise ValueError(f"{THREADS_ENV_VAR} must be a positive integer, got {raw!r}")
    return count


def _simulate_block(config: SystemConfig, spec: SimulationSpec, block: int):
    """Outage count and per-user scheduling counts for one trial block."""
    start = block * spec.block_size
    count = min(spec.block_size, spec.trials - start)
    key = np.array([spec.seed, block], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    gain_main, gain_eve = sample_gains(config, rng, count)
    if spec.policy is Policy.ROUND_ROBIN:
        # Users take turns; the global trial index keeps cycling across blocks.
        scheduled = (start + np.arange(count, dtype=np.int64)) % config.num_users
    else:
        # argmax returns the first maximum, i.e. ties break to the lowest index.
        scheduled = np.argmax(gain_main, axis=1)
    rows = np.arange(count)
    snr = config.power[scheduled] / config.noise
    cap_main = np.log2(1.0 + gain_main[rows, scheduled] * snr)
    cap_eve = np.log2(1.0 + gain_eve[rows, scheduled, :] * snr[:, None])
    outage = cap_main - cap_eve.max(axis=1) < config.secrecy_rate
    return int(outage.sum()), np.bincount(scheduled, minlength=config.num_users)


def _run_blocks(config: SystemConfig, spec: SimulationSpec):
    num_blocks = -(-spec.trials // spec.block_size)
    workers = min(worker_count(), num_blocks)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            block_results = list(pool.map(lambda b: _simulate_block(config, spec, b),
                                          range(num_blocks)))
    else:
        block_results = [_simulate_block(config, spec, b) for b in range(num_blocks)]
    # Integer reduction in ascending block order: exact and order-insensitive.
    outage_total = 0
    scheduled_total = np.zeros(config.num_users, dtype=np.int64)
    for outage, scheduled in block_results:
        outage_total += outage
        scheduled_total += scheduled
    return outage_total, scheduled_total


def simulate_outage(config: SystemConfig, spec: SimulationSpec) -> OutageResult:
    """Monte Carlo estimate of the secrecy outage probability.

    Per trial: draw a full channel realization, schedule one user (round-robin
    cycles trial index mod M; max-gain picks the largest instantaneous BS-channel
    gain, ties to the lowest index), and record whether that user's secrecy
    capacity falls below the target rate.  Returns the outage fraction with
    std_error = sqrt(p*(1-p)/trials).
    """
    outage_total, _ = _run_blocks(config, spec)
    p_hat = outage_total / spec.trials
    std_error = math.sqrt(p_hat * (1.0 - p_hat) / spec.trials)
    return OutageResult(probability=p_hat, method=Method.MONTE_CARLO,
                        trials=spec.trials, std_error=std_error)


def simulate_scheduling_counts(config: SystemConfig, spec: SimulationSpec) -> np.ndarray:
    """Number of trials each user was scheduled; entries sum to spec.trials."""
    _, scheduled_total = _run_blocks(config, spec)
    return scheduled_total


def adaptive_simpson(func, lower: float, upper: float, tolerance: float = QUADRATURE_TOLERANCE,
                     max_depth: int = 60, panels: int = 8) -> float:
    """Adaptive Simpson integration of func over [lower, upper].

    The interval is split into equal starting panels, each refined recursively
    with the standard 15*tol acceptance rule and Richardson extrapolation.
    Raises ConvergenceError if the subdivision limit is hit.
    """
    if not (math.isfinite(lower) and math.isfinite(upper)) or upper < lower:
        raise ValueError(f"invalid integration interval [{lower!r}, {upper!r}]")
    if upper == lower:
        return 0.0
    span = upper - lower
    edges = [lower + span * (k / panels) for k in range(panels)] + [upper]
    return _simpson_over_edges(func, edges, tolerance, max_depth)


def _simpson_over_edges(func, edges, tolerance: float, max_depth: int) -> float:
    pieces = []
    per_panel = tolerance / (len(edges) - 1)
    for a, b in zip(edges, edges[1:]):
        fa, fb = func(a), func(b)
        mid = 0.5 * (a + b)
        fmid = func(mid)
        whole = (b - a) / 6.0 * (fa + 4.0 * fmid + fb)
        pieces.append(_refine(func, a, b, fa, fmid, fb, whole, per_panel, max_depth))
    return math.fsum(pieces)


def _graded_edges(lower: float, upper: float, levels: int = 24) -> list:
    """Panel edges geometrically refined toward `lower`.

    The outage integrands can concentrate their mass in a thin layer above the
    lower endpoint (fast eavesdropper decay against a slowly varying density),
    which equal-width starting panels can step over entirely.  Grading the
    edges over dyadic fractions of the span guarantees starting panels at
    every scale down to 2**-levels of the interval.
    """
    span = upper - lower
    return ([lower]
            + [lower + span * 2.0 ** (-k) for k in range(levels, 0, -1)]
            + [upper])


def _refine(func, a, b, fa, fm, fb, whole, tolerance, depth):
    mid = 0.5 * (a + b)
    lmid = 0.5 * (a + mid)
    rmid = 0.5 * (mid + b)
    flm = func(lmid)
    frm = func(rmid)
    left = (mid - a) / 6.0 * (fa + 4.0 * flm + fm)
    right = (b - mid) / 6.0 * (fm + 4.0 * frm + fb)
    delta = left + right - whole
    if abs(delta) <= 15.0 * tolerance:
        return left + right + delta / 15.0
    if depth <= 0:
        raise ConvergenceError(
            f"quadrature did not reach tolerance {tolerance:g} on [{a:g}, {b:g}]"
        )
    half = 0.5 * tolerance
    return (_refine(func, a, mid, fa, flm, fm, left, half, depth - 1)
            + _refine(func, mid, b, fm, frm, fb, right, half, depth - 1))


def quadrature_roundrobin_user(config: SystemConfig, user: int,
                               tolerance: float = QUADRATURE_TOLERANCE) -> OutageResult:
    """Round-robin per-user outage by numerical integration.

    Integrates, over the serving gain x from threshold upward, the probability
    that every eavesdropper stays below (x - threshold) / 2**rate, weighted by
    the exponential density of x; the outage probability is one minus that.
    """
    user = _check_user(config, user)
    threshold = secrecy_threshold(config, user)
    sigma_main = float(config.sigma2_main[user])
    inv_sigma = 1.0 / sigma_main
    eve_rates = (1.0 / (2.0 ** config.secrecy_rate * config.sigma2_eve[user])).tolist()
    exp = math.exp

    def integrand(x: float) -> float:
        diff = x - threshold
        covered = 1.0
        for rate in eve_rates:
            covered *= 1.0 - exp(-diff * rate)
        return covered * inv_sigma * exp(-x * inv_sigma)

    upper = threshold + TAIL_LIFETIMES * sigma_main
    integral = _simpson_over_edges(integrand, _graded_edges(threshold, upper), tolerance, 60)
    probability, clamped = clamp_probability(1.0 - integral)
    return OutageResult(probability=probability, method=Method.QUADRATURE, clamped=clamped)


def quadrature_proposed(config: SystemConfig,
                        tolerance: float = QUADRATURE_TOLERANCE) -> OutageResult:
    """Max-gain scheduling outage by numerical integration.

    For each user i, conditioned on its serving gain x, multiply the
    probability that all other users fall below x (so that i is scheduled) by
    the outage probability of the eavesdropper event: certain for x below the
    threshold, one minus the product of eavesdropper CDFs above it.  The two
    x-ranges give one integral each; results are summed over users.
    """
    exp = math.exp
    pieces = []
    for i in range(config.num_users):
        threshold = secrecy_threshold(config, i)
        sigma_main = float(config.sigma2_main[i])
        inv_sigma = 1.0 / sigma_main
        other_rates = (1.0 / np.delete(config.sigma2_main, i)).tolist()
        eve_rates = (1.0 / (2.0 ** config.secrecy_rate * config.sigma2_eve[i])).tolist()

        def scheduled_density(x: float) -> float:
            weight = inv_sigma * exp(-x * inv_sigma)
            for rate in other_rates:
                weight *= 1.0 - exp(-x * rate)
            return weight

        def integrand_above(x: float) -> float:
            diff = x - threshold
            covered = 1.0
            for rate in eve_rates:
                covered *= 1.0 - exp(-diff * rate)
            return (1.0 - covered) * scheduled_density(x)

        if threshold > 0.0:
            pieces.append(adaptive_simpson(scheduled_density, 0.0, threshold, tolerance))
        upper = threshold + TAIL_LIFETIMES * sigma_main
        pieces.append(_simpson_over_edges(integrand_above, _graded_edges(threshold, upper),
                                          tolerance, 60))
    probability, clamped = clamp_probability(math.fsum(pieces))
    return OutageResult(probability=probability, method=Method.QUADRATURE, clamped=clamped)
