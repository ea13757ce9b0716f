"""Finite games in normal form: payoff tensors, mixed profiles, equilibria.

Payoffs are stored as one real tensor per player, indexed by every player's
pure strategy. Mixed profiles are per-player distributions; expected payoff is
the multilinear contraction of a payoff tensor with all of them.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .config import DEFAULT_TOLS
from .linalg import as_rng

__all__ = [
    "FiniteGame",
    "MixedProfile",
    "EquilibriumCertificate",
    "ConvexityReport",
    "expected_payoff",
    "pure_deviation_payoffs",
    "counters",
    "best_response_mixed",
    "deviation_gains",
    "is_epsilon_nash",
    "support_enumeration_nash",
    "random_profile",
    "mix_profiles",
    "verify_countering_convexity",
]


class FiniteGame:
    """Normal-form game given by one payoff tensor per player.

    Tensor ``i`` has shape ``strategy_counts`` and holds player ``i``'s payoff
    at each pure-strategy combination.
    """

    __slots__ = ("_tensors",)

    def __init__(self, payoff_tensors: Sequence):
        tensors = tuple(np.array(t, dtype=np.float64) for t in payoff_tensors)
        if len(tensors) < 2:
            raise ValueError("a game needs at least two players")
        shape = tensors[0].shape
        if len(shape) != len(tensors):
            raise ValueError(
                f"{len(tensors)} players but payoff tensors have {len(shape)} axes"
            )
        for i, t in enumerate(tensors):
            if t.shape != shape:
                raise ValueError(f"payoff tensor {i} has shape {t.shape}, expected {shape}")
            if not np.all(np.isfinite(t)):
                raise ValueError(f"payoff tensor {i} has non-finite entries")
            t.setflags(write=False)
        if any(k < 1 for k in shape):
            raise ValueError("every player needs at least one strategy")
        self._tensors = tensors

    @property
    def payoff_tensors(self) -> tuple[np.ndarray, ...]:
        return self._tensors

    @property
    def num_players(self) -> int:
        return len(self._tensors)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return self._tensors[0].shape

    def __repr__(self) -> str:
        return f"FiniteGame(strategy_counts={self.strategy_counts})"


class MixedProfile:
    """One probability distribution over pure strategies per player."""

    __slots__ = ("_distributions",)

    def __init__(self, distributions: Sequence):
        dists = []
        for i, d in enumerate(distributions):
            arr = np.array(d, dtype=np.float64)
            if arr.ndim != 1 or arr.size < 1:
                raise ValueError(f"distribution {i} is not a nonempty vector")
            if not np.all(np.isfinite(arr)):
                raise ValueError(f"distribution {i} has non-finite entries")
            if arr.min() < -1e-12:
                raise ValueError(f"distribution {i} has a negative entry: {arr.min()!r}")
            total = arr.sum()
            if abs(total - 1.0) > 1e-10:
                raise ValueError(f"distribution {i} sums to {total!r}, not 1")
            arr = np.clip(arr, 0.0, None)
            arr.setflags(write=False)
            dists.append(arr)
        if len(dists) < 2:
            raise ValueError("a profile needs at least two players")
        self._distributions = tuple(dists)

    @property
    def distributions(self) -> tuple[np.ndarray, ...]:
        return self._distributions

    @property
    def num_players(self) -> int:
        return len(self._distributions)

    @property
    def strategy_counts(self) -> tuple[int, ...]:
        return tuple(d.size for d in self._distributions)

    def replace(self, i: int, distribution: np.ndarray) -> "MixedProfile":
        dists = list(self._distributions)
        dists[i] = distribution
        return MixedProfile(dists)

    def __repr__(self) -> str:
        return f"MixedProfile(strategy_counts={self.strategy_counts})"


@dataclass(frozen=True)
class EquilibriumCertificate:
    """Witness that a profile is an epsilon-equilibrium.

    ``per_player_gain[i]`` is the most player ``i`` could add to their expected
    payoff by a unilateral deviation; ``epsilon`` bounds all of them.
    """

    profile: MixedProfile
    epsilon: float
    per_player_gain: tuple[float, ...]

    def __post_init__(self):
        if self.epsilon < max(self.per_player_gain):
            raise ValueError("certificate epsilon is below the recorded gains")


def _check_compatible(game: FiniteGame, profile: MixedProfile) -> None:
    if game.strategy_counts != profile.strategy_counts:
        raise ValueError(
            f"profile strategy counts {profile.strategy_counts} do not match "
            f"game {game.strategy_counts}"
        )


def expected_payoff(game: FiniteGame, profile: MixedProfile, i: int) -> float:
    """Expected payoff of player ``i``: the tensor contracted with every distribution."""
    _check_compatible(game, profile)
    t = game.payoff_tensors[i]
    for d in reversed(profile.distributions):
        t = t @ d
    return float(t)


def pure_deviation_payoffs(game: FiniteGame, profile: MixedProfile, i: int) -> np.ndarray:
    """Player ``i``'s expected payoff for each own pure strategy, others fixed."""
    _check_compatible(game, profile)
    t = game.payoff_tensors[i]
    for j in reversed(range(game.num_players)):
        if j == i:
            continue
        t = np.tensordot(t, profile.distributions[j], axes=([j], [0]))
    return np.asarray(t, dtype=np.float64).reshape(game.strategy_counts[i])


def counters(game: FiniteGame, p_prime: MixedProfile, p: MixedProfile) -> bool:
    """Whether every player weakly gains by swapping in their ``p_prime`` part.

    Player ``i``'s component of ``p_prime`` is evaluated against the other
    players' components of ``p`` (a unilateral swap). That evaluation is
    linear in the swapped-in distribution, so the set of profiles countering
    a fixed ``p`` is a product of half-spaces and hence convex; evaluating
    ``p_prime`` jointly instead would break convexity. Comparisons carry the
    countering slack so exact ties survive rounding.
    """
    slack = DEFAULT_TOLS.countering_slack
    return all(
        pure_deviation_payoffs(game, p, i) @ p_prime.distributions[i]
        >= expected_payoff(game, p, i) - slack
        for i in range(game.num_players)
    )


def best_response_mixed(game: FiniteGame, profile: MixedProfile, i: int) -> np.ndarray:
    """One-hot best reply for player ``i`` (lowest index wins ties)."""
    payoffs = pure_deviation_payoffs(game, profile, i)
    best = np.zeros_like(payoffs)
    best[int(np.argmax(payoffs))] = 1.0
    return best


def deviation_gains(game: FiniteGame, profile: MixedProfile) -> np.ndarray:
    """Per-player gap between the best pure deviation and the current payoff."""
    _check_compatible(game, profile)
    gains = np.empty(game.num_players)
    for i in range(game.num_players):
        payoffs = pure_deviation_payoffs(game, profile, i)
        current = float(payoffs @ profile.distributions[i])
        gains[i] = payoffs.max() - current
    return gains


def is_epsilon_nash(
    game: FiniteGame, profile: MixedProfile, epsilon: float
) -> EquilibriumCertificate | None:
    """Certificate if no player can gain more than ``epsilon``, else None."""
    if epsilon < 0:
        raise ValueError("epsilon must be nonnegative")
    gains = deviation_gains(game, profile)
    if gains.max() <= epsilon:
        return EquilibriumCertificate(profile, float(epsilon), tuple(gains))
    return None


def _support_candidate(
    payoffs: np.ndarray, rows: tuple[int, ...], cols: tuple[int, ...]
) -> np.ndarray | None:
    """Solve the indifference system: a distribution on ``cols`` equalizing ``rows``.

    ``payoffs`` is the row player's matrix; returns the column player's weights
    or None when the system is singular or leaves the simplex.
    """
    m = len(rows)
    sub = payoffs[np.ix_(rows, cols)]
    a = np.zeros((m + 1, m + 1))
    a[:m, :m] = sub
    a[:m, m] = -1.0       # common payoff value v
    a[m, :m] = 1.0        # weights sum to one
    rhs = np.zeros(m + 1)
    rhs[m] = 1.0
    try:
        sol = np.linalg.solve(a, rhs)
    except np.linalg.LinAlgError:
        return None
    weights = sol[:m]
    if weights.min() < -1e-9:
        return None
    return np.clip(weights, 0.0, None)


def _embed(weights: np.ndarray, support: tuple[int, ...], size: int) -> np.ndarray:
    full = np.zeros(size)
    full[list(support)] = weights
    total = full.sum()
    if total <= 0:
        return full
    return full / total


def support_enumeration_nash(game: FiniteGame) -> list[EquilibriumCertificate]:
    """All equal-support-size Nash equilibria of a two-player game.

    Walks support pairs in increasing size, solves the two indifference
    systems, and keeps solutions that survive the best-response filter. Every
    returned certificate is checked to solver precision. Intended for games
    with at most eight strategies per player.
    """
    if game.num_players != 2:
        raise ValueError("support enumeration is implemented for two players")
    k1, k2 = game.strategy_counts
    if max(k1, k2) > 8:
        raise ValueError("support enumeration is limited to 8 strategies per player")
    a, b = game.payoff_tensors
    eps = DEFAULT_TOLS.solver_epsilon
    found: list[EquilibriumCertificate] = []
    seen: list[tuple[np.ndarray, np.ndarray]] = []
    for size in range(1, min(k1, k2) + 1):
        for rows in itertools.combinations(range(k1), size):
            for cols in itertools.combinations(range(k2), size):
                y = _support_candidate(a, rows, cols)
                x = _support_candidate(b.T, cols, rows)
                if x is None or y is None:
                    continue
                profile = MixedProfile(
                    [_embed(x, rows, k1), _embed(y, cols, k2)]
                )
                gains = deviation_gains(game, profile)
                if gains.max() > eps:
                    continue
                xs, ys = profile.distributions
                if any(
                    np.abs(xs - px).max() <= 1e-8 and np.abs(ys - py).max() <= 1e-8
                    for px, py in seen
                ):
                    continue
                seen.append((xs, ys))
                found.append(
                    EquilibriumCertificate(
                        profile, float(max(gains.max(), 0.0)), tuple(gains)
                    )
                )
    return found


def random_profile(game: FiniteGame, rng: np.random.Generator) -> MixedProfile:
    """Profile with each distribution drawn uniformly from its simplex."""
    return MixedProfile(
        [rng.dirichlet(np.ones(k)) for k in game.strategy_counts]
    )


def mix_profiles(p: MixedProfile, q: MixedProfile, weight: float) -> MixedProfile:
    """Convex combination weight*p + (1-weight)*q, taken per player."""
    if not 0.0 <= weight <= 1.0:
        raise ValueError("weight must lie in [0, 1]")
    if p.strategy_counts != q.strategy_counts:
        raise ValueError("profiles have mismatched strategy counts")
    return MixedProfile(
        [weight * dp + (1.0 - weight) * dq
         for dp, dq in zip(p.distributions, q.distributions)]
    )


@dataclass(frozen=True)
class ConvexityReport:
    """Outcome of sampling convex combinations of countering profiles."""

    requested: int
    performed: int
    passes: int
    failures: int
    rejected_draws: int
    shortfall: bool

    @property
    def ok(self) -> bool:
        return self.failures == 0 and not self.shortfall


def verify_countering_convexity(
    game: FiniteGame,
    base: MixedProfile,
    num_samples: int,
    seed: int | np.random.Generator | None,
    *,
    max_draws_per_sample: int = 2000,
) -> ConvexityReport:
    """Sample pairs of profiles countering ``base`` and test their mixtures.

    With multilinear expected payoffs the set of countering profiles is
    convex, so every sampled combination must counter ``base`` as well; any
    failure is reported rather than raised. Pairs are found by rejection
    sampling, and the report flags a shortfall when the draw budget runs out.
    """
    _check_compatible(game, base)
    rng = as_rng(seed)
    # The swap payoff is a fixed linear form per player, so precompute it
    # once and test candidates with dot products; candidates are drawn in
    # batches to keep the rejection loop out of Python.
    slack = DEFAULT_TOLS.countering_slack
    forms = [pure_deviation_payoffs(game, base, i) for i in range(game.num_players)]
    floors = [expected_payoff(game, base, i) - slack for i in range(game.num_players)]

    def _counters(profile: MixedProfile) -> bool:
        return all(
            form @ dist >= floor
            for form, dist, floor in zip(forms, profile.distributions, floors)
        )

    queue: list[MixedProfile] = []
    performed = passes = failures = rejected = 0
    for _ in range(num_samples):
        draws = 0
        while len(queue) < 2 and draws < max_draws_per_sample:
            batch = min(256, max_draws_per_sample - draws)
            draws += batch
            blocks = [rng.dirichlet(np.ones(k), size=batch) for k in game.strategy_counts]
            keep = np.ones(batch, dtype=bool)
            for block, form, floor in zip(blocks, forms, floors):
                keep &= block @ form >= floor
            rejected += batch - int(keep.sum())
            for idx in np.flatnonzero(keep):
                queue.append(MixedProfile([block[idx] for block in blocks]))
        if len(queue) < 2:
            return ConvexityReport(
                num_samples, performed, passes, failures, rejected, shortfall=True
            )
        mixed = mix_profiles(queue.pop(), queue.pop(), float(rng.uniform()))
        performed += 1
        if _counters(mixed):
            passes += 1
        else:
            failures += 1
    return ConvexityReport(num_samples, performed, passes, failures, rejected, shortfall=False)
