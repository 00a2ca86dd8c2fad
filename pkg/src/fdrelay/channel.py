"""System parameters, block-fading channel sampling and per-slot SINRs.

Every function here accepts either scalar channel coefficients or numpy
arrays of them (one entry per slot), so a whole batch of slots can be
evaluated at once.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields, replace

import numpy as np

__all__ = [
    "SystemParams",
    "ChannelDraw",
    "SinrSet",
    "sample_channel_draw",
    "compute_sinrs",
]

# Order in which the five links consume the random stream.
LINKS = ("ar", "rb", "ae", "re", "rr")


@dataclass(frozen=True)
class SystemParams:
    """Physical constants of the Alice -> Rooney -> Bob link with Eve listening.

    Parameters
    ----------
    p_a, p_r : float
        Transmit powers of Alice and Rooney (W).
    kappa_r, kappa_b, kappa_e : float
        Noise power spectral densities at Rooney, Bob and Eve (W/Hz).
    bandwidth_w : float
        Channel bandwidth (Hz).
    slot_t : float
        Slot duration (s).
    var_ar, var_rb, var_ae, var_re : float
        Fading variances of the four radio links.
    var_rr : float
        Variance of the residual self-interference coefficient at Rooney.
    buffer_cap_q : int
        Maximum number of packets Rooney can store.
    rate_s : float
        Target secrecy rate (bits/sec/Hz).
    codeword_len_b : int, optional
        Codeword length in symbols. Defaults to ``floor(bandwidth_w * slot_t)``.
    """

    p_a: float = 10.0
    p_r: float = 10.0
    kappa_r: float = 1e-6
    kappa_b: float = 1e-6
    kappa_e: float = 1e-6
    bandwidth_w: float = 1e6
    slot_t: float = 1e-3
    var_ar: float = 1.0
    var_rb: float = 1.0
    var_ae: float = 1.0
    var_re: float = 1.0
    var_rr: float = 0.1
    buffer_cap_q: int = 1
    rate_s: float = 1.0
    codeword_len_b: int | None = field(default=None)

    def __post_init__(self):
        for name in ("p_a", "p_r", "var_ar", "var_rb", "var_ae", "var_re", "var_rr"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value >= 0):
                raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
        # Zero noise makes the HD SNRs infinite and the secrecy rates undefined.
        for name in ("kappa_r", "kappa_b", "kappa_e", "bandwidth_w", "slot_t", "rate_s"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be finite and > 0, got {value!r}")
        if int(self.buffer_cap_q) != self.buffer_cap_q or self.buffer_cap_q < 1:
            raise ValueError(f"buffer_cap_q must be an integer >= 1, got {self.buffer_cap_q!r}")
        object.__setattr__(self, "buffer_cap_q", int(self.buffer_cap_q))
        if self.codeword_len_b is None:
            # W*T is usually an integer computed from two inexact floats.
            b = math.floor(self.bandwidth_w * self.slot_t * (1 + 1e-12))
            object.__setattr__(self, "codeword_len_b", b)
        if int(self.codeword_len_b) != self.codeword_len_b or self.codeword_len_b < 1:
            raise ValueError(f"codeword_len_b must be an integer >= 1, got {self.codeword_len_b!r}")
        object.__setattr__(self, "codeword_len_b", int(self.codeword_len_b))

    @classmethod
    def from_snr_db(cls, snr_db: float = 10.0, **overrides) -> "SystemParams":
        """Parameters with equal noise at every node and ``P / (kappa W)`` set in dB.

        The noise power ``kappa * W`` is normalized to 1, so both transmit
        powers equal ``10 ** (snr_db / 10)``. The remaining defaults are the
        reference setting: W = 1 MHz, T = 1 ms, unit link variances,
        self-interference variance 0.1 and a target secrecy rate of 1.
        """
        bandwidth = overrides.pop("bandwidth_w", 1e6)
        power = 10.0 ** (snr_db / 10.0)
        kappa = 1.0 / bandwidth
        kw = dict(p_a=power, p_r=power, kappa_r=kappa, kappa_b=kappa, kappa_e=kappa,
                  bandwidth_w=bandwidth)
        kw.update(overrides)
        return cls(**kw)

    def with_(self, **changes) -> "SystemParams":
        """Copy with some fields replaced. ``codeword_len_b`` is re-derived unless given."""
        if "codeword_len_b" not in changes and (
            "bandwidth_w" in changes or "slot_t" in changes
        ):
            changes["codeword_len_b"] = None
        return replace(self, **changes)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass(frozen=True)
class ChannelDraw:
    """Complex channel coefficients of one slot, or of a batch of slots."""

    h_ar: np.ndarray | complex
    h_rb: np.ndarray | complex
    h_ae: np.ndarray | complex
    h_re: np.ndarray | complex
    h_rr: np.ndarray | complex

    def __len__(self):
        return int(np.size(self.h_ar))

    def __getitem__(self, idx) -> "ChannelDraw":
        return ChannelDraw(*(np.asarray(getattr(self, "h_" + k))[idx] for k in LINKS))


@dataclass(frozen=True)
class SinrSet:
    """Received SINRs for every transmission mode (dimensionless)."""

    gamma_r_fd: np.ndarray | float
    gamma_rb: np.ndarray | float
    gamma_ar_hd: np.ndarray | float
    gamma_ae_hd: np.ndarray | float
    gamma_rb_hd: np.ndarray | float
    gamma_re_hd: np.ndarray | float
    gamma_ae_fd: np.ndarray | float
    gamma_re_fd: np.ndarray | float


def sample_channel_draw(rng: np.random.Generator, params: SystemParams,
                        size: int | None = None) -> ChannelDraw:
    """Draw zero-mean circularly-symmetric complex Gaussian coefficients.

    Each slot consumes exactly ten standard normals from ``rng``: real then
    imaginary part for h_ar, h_rb, h_ae, h_re, h_rr in that order. A batch of
    ``size`` slots therefore reproduces ``size`` consecutive single draws.
    """
    n = 1 if size is None else int(size)
    z = rng.standard_normal((n, 2 * len(LINKS)))
    coeffs = []
    for i, link in enumerate(LINKS):
        scale = math.sqrt(getattr(params, "var_" + link) / 2.0)
        h = scale * (z[:, 2 * i] + 1j * z[:, 2 * i + 1])
        coeffs.append(complex(h[0]) if size is None else h)
    return ChannelDraw(*coeffs)


def compute_sinrs(draw: ChannelDraw, params: SystemParams) -> SinrSet:
    g_ar = np.abs(draw.h_ar) ** 2
    g_rb = np.abs(draw.h_rb) ** 2
    g_ae = np.abs(draw.h_ae) ** 2
    g_re = np.abs(draw.h_re) ** 2
    g_rr = np.abs(draw.h_rr) ** 2

    noise_r = params.kappa_r * params.bandwidth_w
    noise_b = params.kappa_b * params.bandwidth_w
    noise_e = params.kappa_e * params.bandwidth_w

    rx_a_at_e = g_ae * params.p_a
    rx_r_at_e = g_re * params.p_r
    gamma_rb = g_rb * params.p_r / noise_b
    return SinrSet(
        gamma_r_fd=g_ar * params.p_a / (g_rr * params.p_r + noise_r),
        gamma_rb=gamma_rb,
        gamma_ar_hd=g_ar * params.p_a / noise_r,
        gamma_ae_hd=rx_a_at_e / noise_e,
        gamma_rb_hd=gamma_rb,
        gamma_re_hd=rx_r_at_e / noise_e,
        gamma_ae_fd=rx_a_at_e / (rx_r_at_e + noise_e),
        gamma_re_fd=rx_r_at_e / (rx_a_at_e + noise_e),
    )
