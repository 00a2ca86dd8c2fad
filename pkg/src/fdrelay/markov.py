"""Birth-death analysis of Rooney's buffer and the secure throughput."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from .policy import QueuePolicy

__all__ = [
    "ModeProbabilities",
    "StationaryDistribution",
    "NonErgodicChainError",
    "transition_probs",
    "stationary",
    "limiting_distribution",
    "throughput",
    "evaluate_policy",
]

_TOL = 1e-12
LOG_SPACE_ABOVE_Q = 64


class NonErgodicChainError(ValueError):
    """The buffer chain has an absorbing or disconnected set of states."""


@dataclass(frozen=True)
class ModeProbabilities:
    """Event probabilities that drive the buffer chain.

    k1 : Pr{S*=0, S3=0, S4=1, S5=1}  (tie: either HD hop)
    k2 : Pr{S*=0, S3=0, S4=0, S5=1}  (only Rooney -> Bob)
    k3 : Pr{S*=0, S3=0, S4=1, S5=0}  (only Alice -> Rooney)
    p_rf : Pr{S*=1}
    p_df_total : Pr{S3=1}
    p_df_only : Pr{S*=0, S3=1}
    """

    k1: float
    k2: float
    k3: float
    p_rf: float
    p_df_total: float
    p_df_only: float

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not (-_TOL <= value <= 1 + _TOL):
                raise ValueError(f"{name}={value} is not a probability")
        if self.k1 + self.k2 + self.k3 + self.p_rf + self.p_df_only > 1 + 1e-9:
            raise ValueError("disjoint event probabilities sum above 1")
        if self.p_df_only > self.p_df_total + _TOL:
            raise ValueError("p_df_only cannot exceed p_df_total")
        if self.p_df_total - self.p_df_only > self.p_rf + _TOL:
            raise ValueError("p_df_total - p_df_only cannot exceed p_rf")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class StationaryDistribution:
    zeta: np.ndarray

    @property
    def cap_q(self) -> int:
        return len(self.zeta) - 1


def transition_probs(probs: ModeProbabilities, policy: QueuePolicy):
    """Up-probabilities a_0..a_{Q-1} and down-probabilities b_1..b_Q.

    ``b[i]`` holds b_{i+1}.
    """
    alphas = np.asarray(policy.alphas)
    a = probs.k1 * alphas[:-1] + probs.k3
    b = probs.k1 * (1.0 - alphas[1:]) + probs.k2
    return a, b


def stationary(a, b) -> StationaryDistribution:
    """Product-form stationary distribution of the birth-death chain."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("a and b must be 1-d arrays of equal length Q >= 1")
    for n in range(a.size):
        if b[n] <= 0 and a[n] > 0:
            raise NonErgodicChainError(
                f"state {n + 1} is absorbing: b_{n + 1} = 0 while a_{n} = {a[n]:g}")
        if b[n] <= 0 and a[n] <= 0:
            raise NonErgodicChainError(f"states {n} and {n + 1} do not communicate")

    if a.size > LOG_SPACE_ABOVE_Q:
        with np.errstate(divide="ignore"):
            log_phi = np.concatenate(([0.0], np.cumsum(np.log(a) - np.log(b))))
        log_phi -= log_phi.max()
        phi = np.exp(log_phi)
    else:
        phi = np.concatenate(([1.0], np.cumprod(a / b)))
    return StationaryDistribution(phi / phi.sum())


def limiting_distribution(a, b) -> StationaryDistribution:
    """Long-run occupancy of the chain started from an empty buffer.

    Equals :func:`stationary` for an ergodic chain. Otherwise only the states
    reachable from 0 count (up to the first ``a_n = 0``), and the chain ends
    in the highest of them that it cannot leave downwards (``b_n = 0``).
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape or a.ndim != 1 or a.size < 1:
        raise ValueError("a and b must be 1-d arrays of equal length Q >= 1")
    q = a.size
    top = next((n for n in range(q) if a[n] <= 0), q)
    low = max((m for m in range(1, top + 1) if b[m - 1] <= 0), default=0)
    zeta = np.zeros(q + 1)
    if low == top:
        zeta[top] = 1.0
    else:
        zeta[low:top + 1] = stationary(a[low:top], b[low:top]).zeta
    return StationaryDistribution(zeta)


def throughput(zeta: StationaryDistribution, b, probs: ModeProbabilities) -> float:
    """Average secure end-to-end throughput in packets/slot."""
    z = np.asarray(zeta.zeta if isinstance(zeta, StationaryDistribution) else zeta)
    b = np.asarray(b, dtype=float)
    served_by_fd = probs.p_rf + probs.p_df_only
    return float(np.dot(b, z[1:]) + served_by_fd
                 + (probs.p_df_total - served_by_fd) * z[0])


def evaluate_policy(probs: ModeProbabilities, policy: QueuePolicy, *,
                    from_empty: bool = False) -> float:
    """Throughput of ``policy`` via transition_probs -> stationary -> throughput.

    ``from_empty=True`` uses :func:`limiting_distribution` instead, which
    also covers reducible chains.
    """
    a, b = transition_probs(probs, policy)
    dist = limiting_distribution(a, b) if from_empty else stationary(a, b)
    return throughput(dist, b, probs)
