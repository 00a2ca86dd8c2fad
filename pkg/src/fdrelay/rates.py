"""Achievable rates and secrecy rates of the RF-FD, DF-FD and HD modes."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelDraw, SinrSet, SystemParams, compute_sinrs

__all__ = [
    "SecrecySnapshot",
    "rf_fd_region",
    "tridiag_toeplitz_logdet",
    "df_fd_eve_rate",
    "secrecy_snapshot",
]

_LN2 = np.log(2.0)


def _pos(x):
    return np.maximum(x, 0.0)


@dataclass(frozen=True)
class SecrecySnapshot:
    """Per-slot rates in bits/sec/Hz. Fields are scalars or per-slot arrays."""

    r_ar_fd: np.ndarray | float
    r_ar_hd: np.ndarray | float
    r_rb: np.ndarray | float
    r_ae_fd: np.ndarray | float
    r_re_fd: np.ndarray | float
    r_e_sum: np.ndarray | float
    sec_ar_fd_bound: np.ndarray | float
    sec_rb_fd_bound: np.ndarray | float
    sec_sum_fd_bound: np.ndarray | float
    r_ab_df: np.ndarray | float
    r_e_df: np.ndarray | float
    sec_ab_df: np.ndarray | float
    sec_ar_hd: np.ndarray | float
    sec_rb_hd: np.ndarray | float


def eve_sum_rate(sinrs: SinrSet):
    """Rate Eve decodes jointly from Alice and Rooney (RF-FD mode)."""
    return np.log2(1.0 + sinrs.gamma_ae_hd + sinrs.gamma_re_hd)


def rf_fd_region(sinrs: SinrSet):
    """Return the three RF-FD secrecy bounds (Alice, Rooney, sum)."""
    r_ar = np.log2(1.0 + sinrs.gamma_r_fd)
    r_rb = np.log2(1.0 + sinrs.gamma_rb)
    sec_ar = _pos(r_ar - np.log2(1.0 + sinrs.gamma_ae_fd))
    sec_rb = _pos(r_rb - np.log2(1.0 + sinrs.gamma_re_fd))
    sec_sum = _pos(r_ar + r_rb - eve_sum_rate(sinrs))
    return sec_ar, sec_rb, sec_sum


def tridiag_toeplitz_logdet(diag, offdiag_sq, n: int, check_every: int = 16):
    """Natural log-determinant of an n x n tridiagonal Toeplitz matrix.

    The matrix has ``diag`` on the diagonal and off-diagonal entries whose
    product ``c * conj(c)`` equals ``offdiag_sq``. Uses the continuant
    recurrence ``D_k = d D_{k-1} - |c|^2 D_{k-2}`` tracked through the ratio
    ``r_k = D_k / D_{k-1} = d - |c|^2 / r_{k-1}`` so that ``log D_n`` is a sum
    of logs and never overflows. Requires ``diag**2 >= 4 * offdiag_sq``,
    which holds for every ``I + H^* H`` of a two-tap channel.

    Both inputs may be arrays (evaluated elementwise). Once every ratio has
    reached its fixed point the remaining terms are added in one step.
    """
    if n < 1:
        raise ValueError("matrix size must be >= 1")
    d = np.asarray(diag, dtype=float)
    c2 = np.asarray(offdiag_sq, dtype=float)
    r = d.copy()
    total = np.log(r)
    k = 1
    while k < n:
        r_next = d - c2 / r
        total = total + np.log(r_next)
        k += 1
        if k % check_every == 0 and np.all(np.abs(r_next - r) <= 1e-15 * r_next):
            total = total + (n - k) * np.log(r_next)
            return total
        r = r_next
    return total


def df_fd_eve_rate(draw: ChannelDraw, params: SystemParams):
    """Eve's rate (bits/sec/Hz) on the two-tap ISI channel of the DF-FD mode.

    Evaluates ``(1/B) log2 det(I_B + H^* H / (kappa_E W))`` where ``H`` is
    the (B+1) x B Toeplitz matrix with first column
    ``[sqrt(p_a) h_ae, sqrt(p_r) h_re, 0, ...]``.
    """
    noise_e = params.kappa_e * params.bandwidth_w
    x = params.p_a * np.abs(draw.h_ae) ** 2 / noise_e
    y = params.p_r * np.abs(draw.h_re) ** 2 / noise_e
    b = params.codeword_len_b
    logdet = tridiag_toeplitz_logdet(1.0 + x + y, x * y, b)
    return logdet / (b * _LN2)


def secrecy_snapshot(draw: ChannelDraw, params: SystemParams) -> SecrecySnapshot:
    sinrs = compute_sinrs(draw, params)
    r_ar_fd = np.log2(1.0 + sinrs.gamma_r_fd)
    r_ar_hd = np.log2(1.0 + sinrs.gamma_ar_hd)
    r_rb = np.log2(1.0 + sinrs.gamma_rb)
    sec_ar_fd, sec_rb_fd, sec_sum_fd = rf_fd_region(sinrs)

    r_ab_df = np.minimum(r_ar_fd, r_rb)
    r_e_df = df_fd_eve_rate(draw, params)
    return SecrecySnapshot(
        r_ar_fd=r_ar_fd,
        r_ar_hd=r_ar_hd,
        r_rb=r_rb,
        r_ae_fd=np.log2(1.0 + sinrs.gamma_ae_fd),
        r_re_fd=np.log2(1.0 + sinrs.gamma_re_fd),
        r_e_sum=eve_sum_rate(sinrs),
        sec_ar_fd_bound=sec_ar_fd,
        sec_rb_fd_bound=sec_rb_fd,
        sec_sum_fd_bound=sec_sum_fd,
        r_ab_df=r_ab_df,
        r_e_df=r_e_df,
        sec_ab_df=_pos(r_ab_df - r_e_df),
        sec_ar_hd=_pos(r_ar_hd - np.log2(1.0 + sinrs.gamma_ae_hd)),
        sec_rb_hd=_pos(r_rb - np.log2(1.0 + sinrs.gamma_re_hd)),
    )
