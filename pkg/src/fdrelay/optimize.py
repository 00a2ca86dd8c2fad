"""Throughput-optimal tie-break probabilities via a linear-fractional program.

With ``phi_n = prod_{m<n} a_m / b_{m+1}`` (``phi_0 = 1``) the throughput is a
ratio of affine functions of ``phi`` and every ``alpha_n * phi_n`` is affine
in ``phi`` too, through the balance recurrence

    alpha_n phi_n = e phi_n - d phi_{n-1} - alpha_{n-1} phi_{n-1},

with ``d = k3/k1``, ``e = (k1+k2)/k1`` and ``alpha_0 phi_0 = 1``. The
coefficients below are generated by unrolling that recurrence. The program
is turned into an LP by the Charnes-Cooper substitution ``y = t phi``,
``t = 1 / (1 + sum(phi))``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .lp import LPError, linprog_max
from .markov import (ModeProbabilities, NonErgodicChainError, evaluate_policy,
                     limiting_distribution, stationary, throughput,
                     transition_probs)
from .policy import QueuePolicy

__all__ = [
    "LfpInstance",
    "PolicySolution",
    "DegenerateInstance",
    "LfpError",
    "LfpInfeasible",
    "build_lfp",
    "solve_lfp",
    "optimize_policy",
    "brute_force_policy",
    "phi_from_policy",
    "PHI_FLOOR",
    "ALPHA_CLAMP_TOL",
]

PHI_FLOOR = 1e-9
ALPHA_CLAMP_TOL = 1e-7
MAX_GRID_EVALUATIONS = 10**8
_SIGMA_FLOOR = 1e-250


class DegenerateInstance(ValueError):
    """k1 = 0: the tie slot never happens, so the alphas do not matter."""


class LfpError(RuntimeError):
    pass


class LfpInfeasible(LfpError):
    """No policy meets every floor ``phi_n >= eps``; ``violated`` names them."""

    def __init__(self, message, violated=()):
        super().__init__(message)
        self.violated = tuple(violated)


@dataclass(frozen=True)
class LfpInstance:
    """``max (c.phi + f) / (1.phi + 1)`` s.t. ``0 <= c_n.phi + g_n <= phi_n``.

    ``phi`` is ordered ``phi_1..phi_Q``. Row ``n-1`` of ``c_n`` and entry
    ``n-1`` of ``g_n`` give ``alpha_n phi_n`` as an affine function of ``phi``;
    the last row must vanish (``alpha_Q = 0``).
    """

    probs: ModeProbabilities
    cap_q: int
    d: float
    e: float
    beta: float
    c: np.ndarray
    f: float
    c_n: np.ndarray
    g_n: np.ndarray

    def objective(self, phi) -> float:
        phi = np.asarray(phi, dtype=float)
        return float((self.c @ phi + self.f) / (phi.sum() + 1.0))

    def alphas_from_phi(self, phi) -> np.ndarray:
        """alpha_1..alpha_Q recovered from ``phi`` (unclamped).

        ``alpha_n phi_n = c_n.phi + g_n`` is an alternating sum of the terms
        ``r_m = e phi_m - d phi_{m-1}``. Summed from the front it is anchored
        on ``alpha_0 = 1``; summed from the back on ``alpha_Q = 0``. Each
        entry uses the direction with the smaller accumulated magnitude, which
        avoids cancellation when ``phi`` spans many orders of magnitude. The
        last entry is always the forward sum, i.e. the residual of the
        ``alpha_Q = 0`` constraint.
        """
        phi = np.asarray(phi, dtype=float)
        q = phi.size
        prev = np.concatenate(([1.0], phi[:-1]))
        r = self.e * phi - self.d * prev
        fwd = np.empty(q)
        acc = 1.0
        for n in range(q):
            acc = r[n] - acc
            fwd[n] = acc
        bwd = np.empty(q)
        acc = 0.0
        for n in range(q - 1, -1, -1):
            bwd[n] = acc
            acc = r[n] - acc
        fwd_mag = 1.0 + np.cumsum(np.abs(r))
        bwd_mag = np.concatenate((np.cumsum(np.abs(r)[::-1])[::-1][1:], [0.0]))
        alpha_phi = np.where(fwd_mag <= bwd_mag, fwd, bwd)
        alpha_phi[-1] = fwd[-1]
        return alpha_phi / phi

    def alphas_from_phi_affine(self, phi) -> np.ndarray:
        """Same as :meth:`alphas_from_phi` via the dense ``c_n``/``g_n`` form."""
        phi = np.asarray(phi, dtype=float)
        return (self.c_n @ phi + self.g_n) / phi


@dataclass(frozen=True)
class PolicySolution:
    policy: QueuePolicy
    mu: float
    phi: np.ndarray
    method: str
    diagnostics: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "alphas": list(self.policy.alphas),
            "mu": self.mu,
            "phi": [float(v) for v in self.phi],
            "method": self.method,
            "diagnostics": dict(self.diagnostics),
        }


def build_lfp(probs: ModeProbabilities, cap_q: int) -> LfpInstance:
    if cap_q < 1:
        raise ValueError("cap_q must be >= 1")
    k1, k2, k3 = probs.k1, probs.k2, probs.k3
    if k1 <= 0:
        raise DegenerateInstance("k1 = 0: the tie-break probabilities have no effect")
    d = k3 / k1
    e = (k1 + k2) / k1
    beta = (k1 + k3) / k1

    q = cap_q
    c_n = np.zeros((q, q))
    g_n = np.zeros(q)
    prev_coef, prev_const = np.zeros(q), 1.0      # alpha_0 phi_0
    prev_phi_coef, prev_phi_const = np.zeros(q), 1.0  # phi_0
    for n in range(1, q + 1):
        coef = -d * prev_phi_coef - prev_coef
        coef[n - 1] += e
        const = -d * prev_phi_const - prev_const
        c_n[n - 1], g_n[n - 1] = coef, const
        prev_coef, prev_const = coef, const
        prev_phi_coef = np.zeros(q)
        prev_phi_coef[n - 1] = 1.0
        prev_phi_const = 0.0

    # sum_n b_n phi_n = (k1 + k2) sum phi - k1 sum_{n<Q} alpha_n phi_n, and the
    # RF-FD / DF-FD deliveries add K (1 + sum phi) + (p_df_total - K).
    served_by_fd = probs.p_rf + probs.p_df_only
    c = (k1 + k2 + served_by_fd) * np.ones(q) - k1 * c_n[:-1].sum(axis=0)
    f = probs.p_df_total - k1 * g_n[:-1].sum()
    return LfpInstance(probs=probs, cap_q=q, d=d, e=e, beta=beta, c=c, f=float(f),
                       c_n=c_n, g_n=g_n)


def _balance_lp(inst: LfpInstance, sigma: np.ndarray, phi_floor: float, basis=None):
    """Charnes-Cooper LP of the instance in a sparse, column-scaled form.

    With ``zeta = phi / (1 + sum(phi))`` (so ``t = zeta_0``) the variables are
    ``v_n = zeta_n / sigma_n`` for ``n = 0..Q`` and
    ``w_n = alpha_n zeta_n / sigma_n`` for ``n = 1..Q-1``. Neighbouring states
    are tied by their two-term balance equation instead of the dense unrolled
    rows ``c_n``; with ``sigma`` close to the optimum all variables are O(1),
    which keeps the tableau well conditioned however widely ``phi`` is spread.
    """
    probs, q = inst.probs, inst.cap_q
    k1, k2, k3 = probs.k1, probs.k2, probs.k3
    served_by_fd = probs.p_rf + probs.p_df_only
    iv = np.arange(q + 1)
    iw = q + 1 + np.arange(q - 1)
    n_var = 2 * q

    obj = np.zeros(n_var)
    obj[iv[1:]] = (k1 + k2 + served_by_fd) * sigma[1:]
    obj[iv[0]] = probs.p_df_total * sigma[0]
    obj[iw] = -k1 * sigma[1:-1]
    obj_scale = np.abs(obj).max()
    if obj_scale == 0.0:
        obj_scale = 1.0

    a_eq = np.zeros((q + 1, n_var))
    a_eq[0, iv] = sigma
    for n in range(1, q + 1):
        row = a_eq[n]
        # k1 alpha_{n-1} zeta_{n-1} + k3 zeta_{n-1} = (k1 + k2) zeta_n - k1 alpha_n zeta_n
        if n == 1:
            row[iv[0]] += (k1 + k3) * sigma[0]
        else:
            row[iw[n - 2]] += k1 * sigma[n - 1]
            row[iv[n - 1]] += k3 * sigma[n - 1]
        row[iv[n]] -= (k1 + k2) * sigma[n]
        if n < q:
            row[iw[n - 1]] += k1 * sigma[n]
    b_eq = np.zeros(q + 1)
    b_eq[0] = 1.0

    a_ub = np.zeros((2 * q - 1, n_var))
    for n in range(1, q):
        a_ub[n - 1, iw[n - 1]] = 1.0
        a_ub[n - 1, iv[n]] = -1.0
    for n in range(1, q + 1):
        a_ub[q - 2 + n, iv[n]] = -sigma[n]
        a_ub[q - 2 + n, iv[0]] = phi_floor * sigma[0]
    b_ub = np.zeros(2 * q - 1)

    try:
        res = linprog_max(obj / obj_scale, a_ub, b_ub, a_eq, b_eq, initial_basis=basis)
    except LPError as exc:
        raise LfpError(f"LP for Q={q} failed: {exc}") from exc
    zeta = sigma * res.x[iv]
    if zeta[0] <= 0.0:
        raise LfpError("LP optimum has zeta_0 = 0; the buffer chain is not ergodic")
    alphas = res.x[iw] / res.x[iv[1:-1]]
    return zeta, alphas, res


def _reference(probs: ModeProbabilities, cap_q: int, phi_floor: float):
    """Best threshold policy: its stationary distribution and its LP vertex.

    Candidates are ``alpha_n = 1`` below a threshold and 0 above it, or the
    reverse. Optimal policies are vertices of the LP and usually of this
    form, so the distribution is a good column scale and the vertex a good
    starting basis.
    """
    best_mu, best = -math.inf, None
    for cut in range(cap_q + 1):
        for low, high in ((1.0, 0.0), (0.0, 1.0)):
            interior = [low if n < cut else high for n in range(1, cap_q)]
            a, b = transition_probs(probs, QueuePolicy.from_interior(interior))
            try:
                dist = stationary(a, b)
            except NonErgodicChainError:
                continue
            if np.any(dist.zeta[1:] < phi_floor * dist.zeta[0] * (1 + 1e-9)):
                continue
            mu = throughput(dist, b, probs)
            if mu > best_mu:
                best_mu, best = mu, (dist.zeta, interior)
    if best is None:
        return np.full(cap_q + 1, 1.0 / (cap_q + 1)), None
    zeta, interior = best
    q = cap_q
    # Columns: v_0..v_Q, w_1..w_{Q-1}, then slacks of the Q-1 rows w_n <= v_n
    # and of the Q floor rows.
    basis = list(range(q + 1))
    for n in range(1, q):
        basis.append(q + n if interior[n - 1] == 1.0 else 2 * q + n - 1)
    basis.extend(3 * q - 1 + np.arange(q))
    return np.maximum(zeta, _SIGMA_FLOOR), basis


def solve_lfp(inst: LfpInstance, phi_floor: float = PHI_FLOOR,
              refine: int = 2, warm_start: bool = True) -> PolicySolution:
    """Solve the LFP through its Charnes-Cooper linear program.

    The simplex starts from the vertex of the best threshold policy with
    columns scaled by its stationary distribution, then is rerun ``refine``
    times scaled by the previous solution (``warm_start=False`` starts from
    uniform scales and a phase-one basis instead), so that states with little probability mass keep their
    relative precision.
    """
    probs, q = inst.probs, inst.cap_q
    # phi is nondecreasing in every alpha, so fill-first bounds each phi_n.
    try:
        zeta_max = stationary(*transition_probs(probs, QueuePolicy.constant(q, 1.0))).zeta
    except NonErgodicChainError:
        zeta_max = None
    short = []
    if zeta_max is not None and zeta_max[0] > 0:
        short = [f"phi_{n} >= {phi_floor:g}" for n in range(1, q + 1)
                 if zeta_max[n] < phi_floor * zeta_max[0]]
    if short:
        raise LfpInfeasible(f"LP infeasible for Q={q}: no policy satisfies "
                            + ", ".join(short), short)
    if warm_start:
        sigma, basis = _reference(probs, q, phi_floor)
    else:
        sigma, basis = np.full(q + 1, 1.0 / (q + 1)), None
    passes = pivots = 0
    while True:
        zeta, alphas, res = _balance_lp(inst, sigma, phi_floor, basis)
        passes += 1
        pivots += res.n_pivots
        if passes > refine:
            break
        sigma = np.maximum(zeta, _SIGMA_FLOOR)
        basis = res.basis or None

    worst = max(0.0, float(np.max(-alphas, initial=0.0)),
                float(np.max(alphas - 1.0, initial=0.0)))
    if worst > ALPHA_CLAMP_TOL:
        raise LfpError(f"recovered alpha leaves [0, 1] by {worst:.3e}")
    phi = zeta[1:] / zeta[0]
    policy = QueuePolicy.from_interior(np.clip(alphas, 0.0, 1.0))
    mu = evaluate_policy(probs, policy)
    return PolicySolution(policy=policy, mu=mu, phi=phi, method="lfp",
                          diagnostics={"lfp_objective": inst.objective(phi),
                                       "scale_t": float(zeta[0]),
                                       "n_pivots": pivots,
                                       "lp_passes": passes,
                                       "alpha_violation": worst})


def optimize_policy(probs: ModeProbabilities, cap_q: int) -> PolicySolution:
    """Optimal policy for buffer size ``cap_q``, with the k1 = 0 fallback."""
    try:
        inst = build_lfp(probs, cap_q)
    except DegenerateInstance:
        policy = QueuePolicy.constant(cap_q, 0.5)
        zeta = limiting_distribution(*transition_probs(probs, policy)).zeta
        # phi is undefined when the chain never returns to the empty state
        phi = zeta[1:] / zeta[0] if zeta[0] > 0 else np.zeros(0)
        return PolicySolution(policy=policy,
                              mu=evaluate_policy(probs, policy, from_empty=True),
                              phi=phi, method="degenerate")
    return solve_lfp(inst)


def phi_from_policy(probs: ModeProbabilities, policy: QueuePolicy) -> np.ndarray:
    """phi_1..phi_Q of a policy."""
    a, b = transition_probs(probs, policy)
    return np.cumprod(a / b)


def brute_force_policy(probs: ModeProbabilities, cap_q: int,
                       grid_step: float = 0.01) -> PolicySolution:
    """Best policy on the grid ``{0, step, ..., 1}^(Q-1)``."""
    points = int(round(1.0 / grid_step)) + 1
    n_free = cap_q - 1
    n_evals = points ** n_free
    if n_evals > MAX_GRID_EVALUATIONS:
        raise ValueError(f"grid needs {n_evals} evaluations (limit {MAX_GRID_EVALUATIONS})")
    grid = np.linspace(0.0, 1.0, points)

    best_mu, best_policy = -math.inf, None
    for interior in itertools.product(grid, repeat=n_free):
        policy = QueuePolicy.from_interior(interior)
        try:
            mu = evaluate_policy(probs, policy)
        except NonErgodicChainError:
            continue
        if mu > best_mu:
            best_mu, best_policy = mu, policy
    if best_policy is None:
        raise NonErgodicChainError("no grid point gives an ergodic buffer chain")
    return PolicySolution(policy=best_policy, mu=best_mu,
                          phi=phi_from_policy(probs, best_policy), method="grid",
                          diagnostics={"evaluations": n_evals, "grid_step": grid_step})
