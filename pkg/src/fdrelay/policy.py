"""Indicator evaluation, mode selection and the buffer update of one slot."""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .rates import SecrecySnapshot

__all__ = [
    "Indicators",
    "Mode",
    "QueuePolicy",
    "PolicyError",
    "indicators",
    "select_mode",
    "apply_mode",
]


class PolicyError(ValueError):
    """A mode or queue state that violates the relay's buffer contract."""


class Mode(enum.Enum):
    RF_FD = "rf_fd"
    DF_FD = "df_fd"
    HD_A_TO_R = "hd_a_to_r"
    HD_R_TO_B = "hd_r_to_b"
    IDLE = "idle"


@dataclass(frozen=True)
class Indicators:
    """Secrecy-feasibility flags of one slot (or boolean arrays over slots).

    ``s1``/``s2``: RF-FD hop bounds, ``s3``: DF-FD end to end, ``s4``/``s5``:
    HD hops, ``s_star``: RF-FD usable.
    """

    s1: bool | np.ndarray
    s2: bool | np.ndarray
    s3: bool | np.ndarray
    s4: bool | np.ndarray
    s5: bool | np.ndarray
    s_star: bool | np.ndarray

    def __getitem__(self, idx) -> "Indicators":
        return Indicators(*(bool(np.asarray(v)[idx]) for v in
                            (self.s1, self.s2, self.s3, self.s4, self.s5, self.s_star)))


@dataclass(frozen=True)
class QueuePolicy:
    """Probabilities alpha_0..alpha_Q that Alice (not Rooney) sends in a tie slot.

    The tie slot is S*=0, S3=0, S4=1, S5=1. ``alpha_0 = 1`` and
    ``alpha_Q = 0`` are fixed by the buffer boundaries.
    """

    alphas: tuple[float, ...]

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        if len(alphas) < 2:
            raise ValueError("a policy needs alpha_0..alpha_Q with Q >= 1")
        if any(not (0.0 <= a <= 1.0) for a in alphas):
            raise ValueError(f"alphas must lie in [0, 1], got {alphas}")
        if alphas[0] != 1.0 or alphas[-1] != 0.0:
            raise ValueError("alpha_0 must be 1 and alpha_Q must be 0")
        object.__setattr__(self, "alphas", alphas)

    @property
    def cap_q(self) -> int:
        return len(self.alphas) - 1

    @classmethod
    def from_interior(cls, interior) -> "QueuePolicy":
        """Build from alpha_1..alpha_{Q-1}."""
        return cls((1.0, *map(float, interior), 0.0))

    @classmethod
    def constant(cls, cap_q: int, value: float) -> "QueuePolicy":
        return cls.from_interior([value] * (cap_q - 1))


def indicators(snapshot: SecrecySnapshot, rate_s: float,
               strict_region: bool = False) -> Indicators:
    """Compare each secrecy rate against ``rate_s`` (boundary inclusive).

    With ``strict_region`` the RF-FD mode additionally needs the sum bound to
    carry both hops, ``sec_sum_fd_bound >= 2 * rate_s``.
    """
    s1 = np.asarray(snapshot.sec_ar_fd_bound) >= rate_s
    s2 = np.asarray(snapshot.sec_rb_fd_bound) >= rate_s
    s3 = np.asarray(snapshot.sec_ab_df) >= rate_s
    s4 = np.asarray(snapshot.sec_ar_hd) >= rate_s
    s5 = np.asarray(snapshot.sec_rb_hd) >= rate_s
    s_star = s1 & s2
    if strict_region:
        s_star = s_star & (np.asarray(snapshot.sec_sum_fd_bound) >= 2.0 * rate_s)
    if s1.ndim == 0:
        return Indicators(bool(s1), bool(s2), bool(s3), bool(s4), bool(s5), bool(s_star))
    return Indicators(s1, s2, s3, s4, s5, s_star)


def select_mode(ind: Indicators, queue: int, policy: QueuePolicy, u: float) -> Mode:
    """Pick the transmission mode of one slot.

    ``u`` is a uniform sample in [0, 1) that resolves the tie slot:
    Alice sends iff ``u < alpha_queue``.
    """
    cap_q = policy.cap_q
    if not 0 <= queue <= cap_q:
        raise PolicyError(f"queue {queue} outside [0, {cap_q}]")

    if queue == 0:
        if ind.s3:
            return Mode.DF_FD
        # An RF-FD-feasible slot is not counted in a_0, so Alice stays silent.
        if ind.s4 and not ind.s_star:
            return Mode.HD_A_TO_R
        return Mode.IDLE

    if ind.s_star:
        return Mode.RF_FD
    if ind.s3:
        return Mode.DF_FD
    if ind.s4 and ind.s5:
        return Mode.HD_A_TO_R if u < policy.alphas[queue] else Mode.HD_R_TO_B
    if ind.s4:
        # Nothing can be stored into a full buffer.
        return Mode.HD_A_TO_R if queue < cap_q else Mode.IDLE
    if ind.s5:
        return Mode.HD_R_TO_B
    return Mode.IDLE


def apply_mode(queue: int, mode: Mode, cap_q: int) -> tuple[int, int]:
    """Return ``(new_queue, delivered)`` after one slot in ``mode``."""
    if not 0 <= queue <= cap_q:
        raise PolicyError(f"queue {queue} outside [0, {cap_q}]")
    if mode is Mode.RF_FD:
        if queue == 0:
            raise PolicyError("RF-FD needs a buffered packet")
        return queue, 1
    if mode is Mode.DF_FD:
        return queue, 1
    if mode is Mode.HD_A_TO_R:
        if queue == cap_q:
            raise PolicyError("buffer is full")
        return queue + 1, 0
    if mode is Mode.HD_R_TO_B:
        if queue == 0:
            raise PolicyError("buffer is empty")
        return queue - 1, 1
    return queue, 0
