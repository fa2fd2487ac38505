"""Adaptive attitude elicitation: support estimates and query planning.

A query plan is a budgeted list of (participant, idea) pairs to ask next.
Three policies are provided behind the same interface so they can be
compared in simulation: uniform sampling over the unknown cells,
position-weighted sampling driven by a ranking, and uncertainty-greedy
sampling driven by confidence-interval width. Plans only ever target
unknown cells of active participants, never repeat a pair, and are fully
determined by their seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .matrix import AttitudeMatrix, IdeaId, ParticipantId

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class ElicitationWeights:
    """Knobs shared by estimation and exploration-aware ranking."""

    c_explore: float = 1.0
    prior_mean: float = 0.5
    prior_weight: float = 1.0

    def __post_init__(self) -> None:
        for name in ("c_explore", "prior_mean", "prior_weight"):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise ParameterError(f"{name} must be finite")
        if self.c_explore < 0 or self.prior_weight < 0:
            raise ParameterError("c_explore and prior_weight must be non-negative")
        if not 0.0 <= self.prior_mean <= 1.0:
            raise ParameterError("prior_mean must lie in [0, 1]")


@dataclass(frozen=True)
class SupportEstimate:
    idea: IdeaId
    mean: float
    ci_low: float
    ci_high: float
    sample_size: int


@dataclass(frozen=True)
class QueryPlan:
    """Pairs to query, in draw order. ``shortfall`` counts unfilled budget."""

    pairs: tuple[tuple[ParticipantId, IdeaId], ...]
    policy_name: str
    seed: int
    shortfall: int = 0


def wilson_interval(approvals: int, responses: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% score interval for a binomial proportion; [0, 1] with no data."""
    if responses == 0:
        return 0.0, 1.0
    phat = approvals / responses
    denom = 1.0 + z * z / responses
    center = (phat + z * z / (2 * responses)) / denom
    half = z * math.sqrt(phat * (1 - phat) / responses + z * z / (4 * responses * responses)) / denom
    return center - half, center + half


def estimate_support(matrix: AttitudeMatrix, p: IdeaId, weights: ElicitationWeights = ElicitationWeights()) -> SupportEstimate:
    """Prior-smoothed support estimate with a Wilson interval on raw data.

    The interval is widened, if necessary, to contain the smoothed mean so
    that ci_low <= mean <= ci_high always holds.
    """
    approvals, responses = matrix.column_counts(p)
    denominator = responses + weights.prior_weight
    if denominator == 0:
        mean = weights.prior_mean
    else:
        mean = (approvals + weights.prior_mean * weights.prior_weight) / denominator
    low, high = wilson_interval(approvals, responses)
    return SupportEstimate(
        idea=p,
        mean=mean,
        ci_low=min(low, mean),
        ci_high=max(high, mean),
        sample_size=responses,
    )


def estimate_all_supports(matrix: AttitudeMatrix, weights: ElicitationWeights = ElicitationWeights()) -> np.ndarray:
    """Smoothed support means for every idea at once."""
    approvals, responses = matrix.column_counts_all()
    denom = responses + weights.prior_weight
    prior = weights.prior_mean * weights.prior_weight
    with np.errstate(invalid="ignore", divide="ignore"):
        means = np.where(denom > 0, (approvals + prior) / np.maximum(denom, 1e-300), weights.prior_mean)
    return means.astype(float)


# -- plan building -----------------------------------------------------------


def _active_set(matrix: AttitudeMatrix, active) -> list[int]:
    requested = matrix.active_participants if active is None else frozenset(active)
    usable = sorted(requested & matrix.active_participants)
    return usable


def _unknown_by_idea(matrix: AttitudeMatrix, active: list[int]) -> list[list[int]]:
    """Per idea, the active participants whose cell is still unknown."""
    known = matrix.known_mask()
    out: list[list[int]] = []
    for p in range(matrix.n_ideas):
        out.append([i for i in active if not known[i, p]])
    return out


def plan_uniform(matrix: AttitudeMatrix, active, budget: int, seed: int) -> QueryPlan:
    """Sample unknown (participant, idea) pairs uniformly, no replacement."""
    if budget < 0:
        raise ParameterError("budget must be non-negative")
    usable = _active_set(matrix, active)
    known = matrix.known_mask()
    pool = [(i, p) for i in usable for p in range(matrix.n_ideas) if not known[i, p]]
    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pool))
    take = min(budget, len(pool))
    pairs = tuple(pool[j] for j in order[:take])
    return QueryPlan(pairs=pairs, policy_name="uniform", seed=seed, shortfall=budget - take)


def plan_ranking_proportional(matrix: AttitudeMatrix, ranking, active, budget: int, seed: int,
                              position_weight=None) -> QueryPlan:
    """Sample ideas with probability proportional to a position weight.

    The idea at 1-based rank r is drawn with weight 1/r by default; the
    participant is drawn uniformly among active ones whose cell is still
    unknown. Ideas with no unknown cells left are resampled away (their
    weight is renormalized out). When no unknown pair remains the plan is
    returned short, with the shortfall recorded.
    """
    if budget < 0:
        raise ParameterError("budget must be non-negative")
    order = list(ranking.order)
    if sorted(order) != list(range(matrix.n_ideas)):
        raise ParameterError("ranking does not cover the current idea set")
    if position_weight is None:
        position_weight = lambda r: 1.0 / r
    usable = _active_set(matrix, active)
    available = _unknown_by_idea(matrix, usable)
    weights = np.zeros(matrix.n_ideas)
    for rank, p in enumerate(order, start=1):
        weights[p] = position_weight(rank)
    if np.any(weights < 0):
        raise ParameterError("position weights must be non-negative")

    rng = np.random.default_rng(seed)
    pairs: list[tuple[int, int]] = []
    for _ in range(budget):
        open_ideas = [p for p in range(matrix.n_ideas) if available[p]]
        if not open_ideas:
            break
        w = weights[open_ideas]
        total = w.sum()
        if total <= 0:
            break
        p = int(rng.choice(open_ideas, p=w / total))
        candidates = available[p]
        i = candidates[int(rng.integers(len(candidates)))]
        candidates.remove(i)
        pairs.append((i, p))
    return QueryPlan(
        pairs=tuple(pairs),
        policy_name="ranking",
        seed=seed,
        shortfall=budget - len(pairs),
    )


def plan_uncertainty(matrix: AttitudeMatrix, active, budget: int,
                     weights: ElicitationWeights = ElicitationWeights(), *, seed: int) -> QueryPlan:
    """Query the ideas with the widest support intervals first.

    Each query goes to the idea whose interval is currently widest (ties to
    the lowest id); the participant is drawn uniformly among active ones
    with the cell unknown. Queries already planned this round provisionally
    discount an idea's width by the usual 1/sqrt(sample size) factor, so a
    round's budget spreads over the uncertain ideas instead of piling onto
    one of them.
    """
    if budget < 0:
        raise ParameterError("budget must be non-negative")
    usable = _active_set(matrix, active)
    available = _unknown_by_idea(matrix, usable)
    m = matrix.n_ideas
    widths = np.empty(m)
    responses = np.empty(m)
    for p in range(m):
        est = estimate_support(matrix, p, weights)
        widths[p] = est.ci_high - est.ci_low
        responses[p] = est.sample_size
    pending = np.zeros(m)

    rng = np.random.default_rng(seed)
    pairs: list[tuple[int, int]] = []
    while len(pairs) < budget:
        best, best_width = -1, -1.0
        for p in range(m):
            if not available[p]:
                continue
            effective = widths[p] * math.sqrt((responses[p] + 1) / (responses[p] + 1 + pending[p]))
            if effective > best_width:
                best, best_width = p, effective
        if best < 0:
            break
        candidates = available[best]
        i = candidates.pop(int(rng.integers(len(candidates))))
        pending[best] += 1
        pairs.append((i, best))
    return QueryPlan(
        pairs=tuple(pairs),
        policy_name="uncertainty",
        seed=seed,
        shortfall=budget - len(pairs),
    )


POLICY_NAMES = ("uniform", "ranking", "uncertainty")
