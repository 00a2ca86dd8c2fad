"""Monte Carlo estimation of the mode-event probabilities."""

from __future__ import annotations

from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .channel import SystemParams, sample_channel_draw
from .markov import ModeProbabilities
from .policy import Indicators, indicators
from .rates import secrecy_snapshot

__all__ = ["ProbEstimate", "estimate_mode_probs", "draw_indicators", "EVENTS"]

DEFAULT_CHUNK = 50_000

# Disjoint events partitioning every slot, plus the overlapping S3=1 count.
EVENTS = ("k1", "k2", "k3", "idle", "p_rf", "p_df_only", "p_df_total")

IndicatorMask = Callable[[Indicators], Indicators]


@dataclass(frozen=True)
class ProbEstimate:
    probs: ModeProbabilities
    stderr: dict
    n_samples: int
    counts: dict

    def to_dict(self) -> dict:
        return {"probs": self.probs.to_dict(), "stderr": dict(self.stderr),
                "n_samples": self.n_samples, "counts": dict(self.counts)}


def as_seed_sequence(seed) -> np.random.SeedSequence:
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(seed)


def draw_indicators(rng: np.random.Generator, params: SystemParams, n: int,
                    strict_region: bool = False,
                    mask: IndicatorMask | None = None) -> Indicators:
    """Sample ``n`` slots and return their (optionally masked) indicator arrays."""
    draw = sample_channel_draw(rng, params, size=n)
    ind = indicators(secrecy_snapshot(draw, params), params.rate_s, strict_region)
    return mask(ind) if mask is not None else ind


def count_events(ind: Indicators) -> dict:
    s_star, s3, s4, s5 = (np.asarray(x, dtype=bool) for x in
                          (ind.s_star, ind.s3, ind.s4, ind.s5))
    hd = ~s_star & ~s3
    return {
        "k1": int(np.count_nonzero(hd & s4 & s5)),
        "k2": int(np.count_nonzero(hd & ~s4 & s5)),
        "k3": int(np.count_nonzero(hd & s4 & ~s5)),
        "idle": int(np.count_nonzero(hd & ~s4 & ~s5)),
        "p_rf": int(np.count_nonzero(s_star)),
        "p_df_only": int(np.count_nonzero(~s_star & s3)),
        "p_df_total": int(np.count_nonzero(s3)),
    }


def _count_stream(seed_seq, params, n, strict_region, mask, chunk):
    rng = np.random.default_rng(seed_seq)
    totals = dict.fromkeys(EVENTS, 0)
    done = 0
    while done < n:
        m = min(chunk, n - done)
        for key, value in count_events(
                draw_indicators(rng, params, m, strict_region, mask)).items():
            totals[key] += value
        done += m
    return totals


def estimate_mode_probs(params: SystemParams, n_samples: int, seed=None, *,
                        strict_region: bool = False,
                        mask: IndicatorMask | None = None,
                        workers: int = 1,
                        chunk_size: int = DEFAULT_CHUNK) -> ProbEstimate:
    """Empirical frequencies of the six events over ``n_samples`` i.i.d. slots.

    With ``workers > 1`` the samples are split into equal shares, each drawn
    from a stream spawned off ``seed``; counts are summed, so the result is
    deterministic for a fixed worker count. ``mask`` rewrites the indicators
    before counting (used for the restricted comparison schemes).
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    if workers < 1:
        raise ValueError("workers must be >= 1")
    root = as_seed_sequence(seed)
    if workers == 1:
        totals = _count_stream(root, params, n_samples, strict_region, mask, chunk_size)
    else:
        shares = [n_samples // workers + (i < n_samples % workers) for i in range(workers)]
        children = root.spawn(workers)
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(
                lambda job: _count_stream(job[0], params, job[1], strict_region, mask,
                                          chunk_size),
                [(c, s) for c, s in zip(children, shares) if s > 0]))
        totals = {key: sum(p[key] for p in parts) for key in EVENTS}

    n = n_samples
    freq = {key: totals[key] / n for key in EVENTS}
    probs = ModeProbabilities(k1=freq["k1"], k2=freq["k2"], k3=freq["k3"],
                              p_rf=freq["p_rf"], p_df_total=freq["p_df_total"],
                              p_df_only=freq["p_df_only"])
    stderr = {key: float(np.sqrt(p * (1.0 - p) / n)) for key, p in freq.items()}
    return ProbEstimate(probs=probs, stderr=stderr, n_samples=n, counts=totals)
