"""Stratified optimal resampling of changepoint particles (Fearnhead–Liu)."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from kinematics.error_types import ParticleDepletionError, ValidationError


@dataclass(frozen=True)
class ResampleResult:
    """Indices of surviving particles and their log weights after resampling."""
    indices: np.ndarray
    log_weights: np.ndarray
    alpha: Optional[float] = None


def determine_alpha(weights: np.ndarray, budget: int) -> float:
    """Threshold α solving Σ min(w/α, 1) = budget for normalized weights.

    Raises:
        ValidationError: when no more than ``budget`` weights are positive
    """
    weights = np.asarray(weights, dtype=float)
    weights = np.sort(weights[weights > 0.0])[::-1]
    if len(weights) <= budget:
        raise ValidationError("alpha needs more positive weights than the budget",
                              {'positive': len(weights), 'budget': budget})
    k_old, k = -1, 0
    c = 0.0
    while k != k_old:
        k_old = k
        c = (budget - k_old) / np.sum(weights[k_old:])
        k = k_old + int(np.sum(c * weights[k_old:] > 1.0))
    return 1.0 / c


def stratified_optimal_resample(log_weights: np.ndarray, M: int,
                                seed=None, timestep: Optional[int] = None) -> ResampleResult:
    """Keep exactly ``M`` of the particles whose (unnormalized) log weights are given.

    The highest-weight particle is kept as is; ties for the highest weight are
    broken uniformly at random. Of the rest, those with normalized weight at
    least α survive with their weight unchanged; the others go through a
    stratified draw and survivors get weight α, so the expected total weight
    is preserved. When underflow leaves no more than ``M - 1`` of the rest with
    positive weight, those all survive and the free slots go to the highest
    remaining log weights, unchanged.

    Args:
        log_weights: particle log weights; NaN counts as -inf
        M: survivor count
        seed: int, SeedSequence or Generator for the stratified draw
        timestep: reported on depletion

    Raises:
        ValidationError: when M < 1
        ParticleDepletionError: when every weight is zero
    """
    log_weights = np.asarray(log_weights, dtype=float)
    n = len(log_weights)
    if M < 1:
        raise ValidationError("particle cap must be at least 1", {'M': M})
    if n <= M:
        return ResampleResult(np.arange(n), log_weights.copy())

    log_weights = np.where(np.isnan(log_weights), -np.inf, log_weights)
    log_total = logsumexp(log_weights)
    if not np.isfinite(log_total):
        raise ParticleDepletionError("all particle weights are zero", timestep=timestep)

    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    ties = np.flatnonzero(log_weights == log_weights.max())
    protected = int(rng.choice(ties)) if len(ties) > 1 else int(ties[0])
    rest = np.delete(np.arange(n), protected)
    budget = M - 1
    if budget == 0:
        return ResampleResult(np.array([protected]), log_weights[[protected]])

    weights = np.exp(log_weights - log_total)
    rest_weights = weights[rest]
    positive = rest_weights > 0.0
    if int(positive.sum()) <= budget:
        # underflowed weights cannot be drawn; fill the free slots by log weight
        order = np.argsort(-log_weights[rest[~positive]], kind='stable')
        fill = rest[~positive][order[:budget - int(positive.sum())]]
        survivors = np.sort(np.concatenate([[protected], rest[positive], fill]).astype(int))
        return ResampleResult(survivors, log_weights[survivors])

    rest, rest_weights = rest[positive], rest_weights[positive]
    rest_mass = rest_weights.sum()
    alpha = determine_alpha(rest_weights / rest_mass, budget) * rest_mass
    keep = rest_weights >= alpha
    draw = rest[~keep]
    draw_weights = rest_weights[~keep]
    n_draw = budget - int(keep.sum())

    chosen = np.array([], dtype=int)
    if n_draw > 0:
        cumulative = np.cumsum(draw_weights)
        step = cumulative[-1] / n_draw
        positions = (rng.uniform() + np.arange(n_draw)) * step
        picks = np.minimum(np.searchsorted(cumulative, positions, side='right'), len(draw) - 1)
        chosen = draw[np.unique(picks)]

    new_log = log_weights.copy()
    new_log[chosen] = np.log(alpha) + log_total
    survivors = np.sort(np.concatenate([[protected], rest[keep], chosen]).astype(int))
    return ResampleResult(survivors, new_log[survivors], alpha=float(alpha))
