"""Pair-level Monte Carlo realization of the distillation pipeline."""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
import math

import numpy as np

from .distill import distill_pipeline

BLOCK = 1 << 16  # fixed block size; streams depend on block index, never on worker count


@dataclass
class EnsembleState:
    pair_count: int
    rng_seed: int
    alive: np.ndarray
    stage_reached: np.ndarray

    @property
    def alive_count(self):
        return int(self.alive.sum())


@dataclass
class EnsembleResult:
    report: object
    surviving_pairs: int
    n_pairs: int
    stage_counts: list
    expected_survivors: float
    sigma: float

    @property
    def empirical_efficiency(self):
        return self.surviving_pairs / self.n_pairs

    @property
    def z_score(self):
        if self.sigma == 0:
            return 0.0 if self.surviving_pairs == self.expected_survivors else math.inf
        return (self.surviving_pairs - self.expected_survivors) / self.sigma

    @property
    def consistent(self):
        return abs(self.z_score) <= 5.0

    def to_dict(self):
        return {
            "n_pairs": self.n_pairs,
            "surviving_pairs": self.surviving_pairs,
            "stage_counts": self.stage_counts,
            "empirical_efficiency": self.empirical_efficiency,
            "exact_efficiency": self.report.cumulative_efficiency,
            "expected_survivors": self.expected_survivors,
            "sigma": self.sigma,
            "z_score": self.z_score,
            "consistent_5sigma": self.consistent,
        }


def _bernoulli(seed, stage, count, prob, workers):
    """``count`` Bernoulli(prob) draws; item ``i`` uses the stream of block ``i // BLOCK``."""
    if prob >= 1.0:
        return np.ones(count, dtype=bool)
    nblocks = -(-count // BLOCK)

    def block(b):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stage, b)))
        n = min(BLOCK, count - b * BLOCK)
        return rng.random(n) < prob

    if workers > 1 and nblocks > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(block, range(nblocks)))
    else:
        parts = [block(b) for b in range(nblocks)]
    return np.concatenate(parts) if parts else np.zeros(0, dtype=bool)


def chain_moments(n_pairs, factors):
    """Mean and standard deviation of the survivor count.

    ``factors`` is a list of ``(probability, pairs_per_attempt)``; each stage
    groups survivors into attempts and keeps one pair per successful attempt.
    """
    mean, var = float(n_pairs), 0.0
    for prob, per in factors:
        attempts_mean = mean / per
        attempts_var = var / (per * per)
        mean, var = (
            prob * attempts_mean,
            prob * (1 - prob) * attempts_mean + prob * prob * attempts_var,
        )
    return mean, math.sqrt(var)


def simulate_ensemble(rho, n_pairs, f_target, seed, max_steps=50, workers=1, side="B", filt=None):
    """Run the exact pipeline, then realize it pair by pair with seeded randomness.

    Pairs that fail the filter are discarded; BBPSSW attempts group consecutive
    survivors two at a time, an unmatched leftover pair is dropped, and a
    successful attempt keeps its source pair. Output is bit-identical for a
    fixed seed whatever ``workers`` is.
    """
    if n_pairs < 2:
        raise ValueError("n_pairs must be >= 2")
    report = distill_pipeline(rho, f_target, max_steps=max_steps, side=side, filt=filt)
    state = EnsembleState(
        pair_count=n_pairs,
        rng_seed=seed,
        alive=np.ones(n_pairs, dtype=bool),
        stage_reached=np.zeros(n_pairs, dtype=np.int32),
    )
    idx = np.arange(n_pairs)
    counts = [n_pairs]
    for k, st in enumerate(report.stages, start=1):
        per = int(st.pairs_consumed_ratio)
        n_att = len(idx) // per
        sources = idx[: n_att * per : per]
        ok = _bernoulli(seed, k, n_att, st.pass_probability, workers)
        state.alive[idx] = False
        idx = sources[ok]
        state.alive[idx] = True
        state.stage_reached[idx] = k
        counts.append(int(len(idx)))
    mean, sigma = chain_moments(
        n_pairs, [(st.pass_probability, st.pairs_consumed_ratio) for st in report.stages]
    )
    return EnsembleResult(report, state.alive_count, n_pairs, counts, mean, sigma)
