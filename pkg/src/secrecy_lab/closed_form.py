"""Exact secrecy outage probabilities via inclusion-exclusion subset enumeration.

Under Rayleigh fading every squared channel gain is exponential, so the joint
CDF of "all eavesdroppers below x" (or "all other users below x") is a product
of exponential CDFs.  Expanding such a product with the binomial theorem turns
it into a signed sum over channel subsets, and each summand integrates in
closed form against the exponential density of the serving channel.  The
resulting alternating sums cancel heavily, so terms are accumulated with
compensated summation and the final value is clamped to [0, 1] with a hard
error when the violation exceeds the rounding allowance.
"""

import math
from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

from .model import SystemConfig, secrecy_threshold, _check_user
from .results import Method, OutageResult, clamp_probability

__all__ = [
    "SubsetTerm",
    "EnumerationBudgetError",
    "NeumaierSum",
    "enumerate_subset_terms",
    "roundrobin_user_outage",
    "roundrobin_outage",
    "proposed_outage",
    "MAX_SUBSET_SIZE",
    "MAX_PROPOSED_USERS",
    "MAX_PROPOSED_EVES",
    "PROPOSED_WORK_BUDGET",
]

# Subset enumeration is exponential by construction; refuse silently slow calls.
MAX_SUBSET_SIZE = 20
MAX_PROPOSED_USERS = 16
MAX_PROPOSED_EVES = 16
PROPOSED_WORK_BUDGET = 1 << 28


class EnumerationBudgetError(ValueError):
    """Requested evaluation exceeds the subset-enumeration budget."""


class NeumaierSum:
    """Compensated accumulator (Kahan-Babuska / Neumaier variant).

    Keeps the running error of an alternating series at the level of one
    rounding of the true sum instead of growing with the term count.
    See https://en.wikipedia.org/wiki/Kahan_summation_algorithm.
    """

    __slots__ = ("partial", "compensation")

    def __init__(self):
        self.partial = 0.0
        self.compensation = 0.0

    def add(self, value: float):
        s = self.partial
        t = s + value
        if abs(s) >= abs(value):
            self.compensation += (s - t) + value
        else:
            self.compensation += (value - t) + s
        self.partial = t

    def update(self, values: Iterable[float]):
        s = self.partial
        c = self.compensation
        for v in values:
            t = s + v
            if abs(s) >= abs(v):
                c += (s - t) + v
            else:
                c += (v - t) + s
            s = t
        self.partial = s
        self.compensation = c

    @property
    def total(self) -> float:
        return self.partial + self.compensation


@dataclass(frozen=True)
class SubsetTerm:
    """One signed inclusion-exclusion term over a ground set of channels.

    mask: bitset selecting the subset; cardinality: popcount of mask;
    sign: (-1)**cardinality; inv_gain_sum: sum of the subset's weights.
    """

    mask: int
    cardinality: int
    sign: int
    inv_gain_sum: float


def _subset_sums(weights: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Subset sums and cardinalities for all 2**n bitmasks, index = mask."""
    n = weights.size
    sums = np.zeros(1 << n)
    card = np.zeros(1 << n, dtype=np.int64)
    for k in range(n):
        lo = 1 << k
        sums[lo : lo << 1] = sums[:lo] + weights[k]
        card[lo : lo << 1] = card[:lo] + 1
    return sums, card


def _checked_weights(weights: Sequence[float]) -> np.ndarray:
    arr = np.asarray(weights, dtype=float)
    if arr.ndim != 1:
        raise ValueError(f"weights must be one-dimensional, got shape {arr.shape}")
    if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
        raise ValueError("weights must be finite and strictly positive")
    return arr


def enumerate_subset_terms(weights: Sequence[float]) -> Iterator[SubsetTerm]:
    """Yield all 2**n signed subset terms of a weight vector, masks ascending.

    The empty subset comes first with sign +1 and zero sum.  Feeding the terms
    into sum(sign * exp(-x * inv_gain_sum)) reproduces the product
    prod_k (1 - exp(-x * w_k)) for any x, which is the identity the closed
    forms below are built on.
    """
    arr = _checked_weights(weights)
    if arr.size > MAX_SUBSET_SIZE:
        raise EnumerationBudgetError(
            f"ground set of size {arr.size} exceeds the enumeration cap of {MAX_SUBSET_SIZE}"
        )
    sums, card = _subset_sums(arr)
    for mask in range(sums.size):
        c = int(card[mask])
        yield SubsetTerm(mask=mask, cardinality=c, sign=-1 if c & 1 else 1,
                         inv_gain_sum=float(sums[mask]))


def roundrobin_user_outage(config: SystemConfig, user: int) -> OutageResult:
    """Secrecy outage probability of one user transmitting on its round-robin turn.

    Inclusion-exclusion over the N eavesdroppers gives

        p = 1 - exp(-t/s_b) * sum_S (-1)**|S| / (1 + s_b * sum_{j in S} w_j)

    where t is the user's secrecy threshold, s_b its average BS-channel gain,
    w_j = 1 / (2**rate * s_e[j]) and S ranges over all eavesdropper subsets.
    """
    user = _check_user(config, user)
    if config.num_eves > MAX_SUBSET_SIZE:
        raise EnumerationBudgetError(
            f"N={config.num_eves} eavesdroppers exceed the enumeration cap of {MAX_SUBSET_SIZE}"
        )
    threshold = secrecy_threshold(config, user)
    sigma_main = float(config.sigma2_main[user])
    weights = 1.0 / (2.0 ** config.secrecy_rate * config.sigma2_eve[user])
    sums, card = _subset_sums(weights)
    signs = 1.0 - 2.0 * (card & 1)
    terms = signs / (1.0 + sigma_main * sums)
    acc = NeumaierSum()
    acc.update(terms.tolist())
    raw = 1.0 - math.exp(-threshold / sigma_main) * acc.total
    probability, clamped = clamp_probability(raw)
    return OutageResult(probability=probability, method=Method.CLOSED_FORM, clamped=clamped)


def roundrobin_outage(config: SystemConfig) -> OutageResult:
    """Aggregate round-robin outage: the mean of the M per-user probabilities."""
    per_user = [roundrobin_user_outage(config, i) for i in range(config.num_users)]
    acc = NeumaierSum()
    acc.update(r.probability for r in per_user)
    probability, clamped = clamp_probability(acc.total / config.num_users)
    return OutageResult(
        probability=probability,
        method=Method.CLOSED_FORM,
        clamped=clamped or any(r.clamped for r in per_user),
    )


def proposed_outage(config: SystemConfig) -> OutageResult:
    """Secrecy outage probability under max-gain scheduling.

    The user with the highest instantaneous BS-channel gain transmits.  For
    each candidate user i the scheduling event "all other users below i's
    gain" and the eavesdropper event are expanded by inclusion-exclusion,
    giving a sum over subsets U of the other users of

        (-1)**|U| * (1 - E_U) / (1 + s_i * t_U)

    plus, for each non-empty eavesdropper subset S, a term

        (-1)**(|U| + |S| + 1) * E_U / (1 + s_i * (w_S + t_U))

    where t_U = sum_{k in U} 1/s_k over other-user gains,
    w_S = sum_{j in S} 1/(2**rate * s_e[i, j]), s_i the user's average gain
    and E_U = exp(-threshold_i * (t_U + 1/s_i)).  Every term of every user is
    routed through one compensated accumulator in deterministic mask order.
    """
    m_users, n_eves = config.num_users, config.num_eves
    if m_users > MAX_PROPOSED_USERS or n_eves > MAX_PROPOSED_EVES:
        raise EnumerationBudgetError(
            f"M={m_users}, N={n_eves} exceeds the caps M<={MAX_PROPOSED_USERS}, "
            f"N<={MAX_PROPOSED_EVES}"
        )
    work = m_users * (1 << (m_users - 1)) * (1 << n_eves)
    if work > PROPOSED_WORK_BUDGET:
        raise EnumerationBudgetError(
            f"M={m_users}, N={n_eves} needs {work} terms, over the budget of "
            f"{PROPOSED_WORK_BUDGET}"
        )
    rate_scale = 2.0 ** config.secrecy_rate
    acc = NeumaierSum()
    for i in range(m_users):
        threshold = secrecy_threshold(config, i)
        sigma_main = float(config.sigma2_main[i])
        inv_sigma = 1.0 / sigma_main
        other_weights = 1.0 / np.delete(config.sigma2_main, i)
        user_sums, user_card = _subset_sums(other_weights)
        user_signs = 1.0 - 2.0 * (user_card & 1)
        decay = np.exp(-threshold * (user_sums + inv_sigma))
        denom = 1.0 + sigma_main * user_sums
        acc.update((user_signs * (1.0 - decay) / denom).tolist())
        eve_sums, eve_card = _subset_sums(1.0 / (rate_scale * config.sigma2_eve[i]))
        # Non-empty eavesdropper subsets only; the leading (-1) folds the +1
        # in the (-1)**(|U|+|S|+1) sign into the subset signs.
        eve_signs = -(1.0 - 2.0 * (eve_card[1:] & 1))
        eve_load = sigma_main * eve_sums[1:]
        for m in range(user_sums.size):
            coeff = user_signs[m] * decay[m]
            acc.update(((coeff * eve_signs) / (denom[m] + eve_load)).tolist())
    probability, clamped = clamp_probability(acc.total)
    return OutageResult(probability=probability, method=Method.CLOSED_FORM, clamped=clamped)
