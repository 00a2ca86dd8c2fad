"""Two-phase revised simplex with Bland's anti-cycling rule.

Meant for small dense problems (a few hundred rows at most). The basis is
refactorized from scratch at every iteration, so rounding errors do not
accumulate across pivots.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = ["LPResult", "LPError", "LPInfeasible", "LPUnbounded", "linprog_max"]


class LPError(RuntimeError):
    pass


class LPInfeasible(LPError):
    def __init__(self, message, violated_rows=()):
        super().__init__(message)
        self.violated_rows = tuple(violated_rows)


class LPUnbounded(LPError):
    pass


@dataclass(frozen=True)
class LPResult:
    x: np.ndarray
    objective: float
    n_pivots: int
    basis: tuple = ()


_PIVOT_TOL = 1e-9
# Consecutive degenerate pivots before ties are broken strictly by Bland's rule.
_STRICT_AFTER = 50


class _Simplex:
    def __init__(self, A, b, basis, tol, max_pivots):
        self.A, self.b = A, b
        self.basis = list(basis)
        self.tol = tol
        self.max_pivots = max_pivots
        self.pivots = 0

    def basic_values(self):
        B = self.A[:, self.basis]
        x_b = np.linalg.solve(B, self.b)
        # one step of iterative refinement
        x_b += np.linalg.solve(B, self.b - B @ x_b)
        return x_b

    def run(self, cost, allowed):
        try:
            self._run(cost, allowed)
        except np.linalg.LinAlgError as exc:
            raise LPError(f"basis became singular after {self.pivots} pivots") from exc

    def _run(self, cost, allowed):
        """Maximize ``cost @ x`` starting from the current feasible basis."""
        A, tol = self.A, self.tol
        degenerate_run = 0
        while True:
            if self.pivots >= self.max_pivots:
                raise LPError(f"no convergence after {self.max_pivots} pivots")
            B = A[:, self.basis]
            x_b = np.linalg.solve(B, self.b)
            y = np.linalg.solve(B.T, cost[self.basis])
            reduced = cost - A.T @ y
            reduced[self.basis] = 0.0
            candidates = np.flatnonzero((reduced > tol) & allowed)
            if candidates.size == 0:
                return
            col = int(candidates[0])
            direction = np.linalg.solve(B, A[:, col])
            rows = np.flatnonzero(direction > _PIVOT_TOL * max(1.0, np.abs(direction).max()))
            if rows.size == 0:
                raise LPUnbounded(f"objective unbounded along column {col}")
            ratios = np.maximum(x_b[rows], 0.0) / direction[rows]
            best = ratios.min()
            ties = rows[ratios <= best + tol * max(1.0, best)]
            if degenerate_run < _STRICT_AFTER:
                # largest pivot among the tied rows keeps the basis well conditioned
                row = int(ties[np.argmax(direction[ties])])
            else:
                row = int(min(ties, key=lambda r: self.basis[r]))
            degenerate_run = degenerate_run + 1 if best <= tol else 0
            self.basis[row] = col
            self.pivots += 1


def linprog_max(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, *,
                tol: float = 1e-11, max_pivots: int = 100_000,
                initial_basis=None) -> LPResult:
    """Maximize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    ``initial_basis`` optionally names one column per constraint row (indices
    ``>= len(c)`` refer to the slack of inequality row ``j - len(c)``). If it
    is a nonsingular, primal feasible basis, phase one is skipped. The optimal
    basis is returned in the same numbering when no artificial remains in it.

    Raises :class:`LPInfeasible` (with the indices of the constraints that
    phase one could not satisfy; equality rows are numbered after the
    inequality rows) or :class:`LPUnbounded`.
    """
    c = np.asarray(c, dtype=float)
    n = c.size
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, float))
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, float))
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, float).ravel()
    m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
    m = m_ub + m_eq

    A = np.vstack([A_ub, A_eq])
    b = np.concatenate([b_ub, b_eq])
    # Equilibrate rows, then structural columns, so tolerances are relative.
    row_scale = np.maximum(np.abs(A).max(axis=1, initial=0.0), np.abs(b))
    row_scale[row_scale == 0.0] = 1.0
    A = A / row_scale[:, None]
    b = b / row_scale
    col_scale = np.abs(A).max(axis=0, initial=0.0)
    col_scale[col_scale == 0.0] = 1.0
    A = A / col_scale
    cost = c / col_scale

    slack = np.zeros((m, m_ub))
    slack[np.arange(m_ub), np.arange(m_ub)] = 1.0
    flip = b < 0
    A[flip] *= -1.0
    slack[flip] *= -1.0
    b[flip] *= -1.0

    needs_art = np.ones(m, dtype=bool)
    needs_art[:m_ub] = flip[:m_ub]
    art_rows = np.flatnonzero(needs_art)
    art = np.zeros((m, art_rows.size))
    art[art_rows, np.arange(art_rows.size)] = 1.0

    full = np.hstack([A, slack, art])
    n_struct = n + m_ub
    n_cols = n_struct + art_rows.size
    basis = np.empty(m, dtype=int)
    basis[:m_ub] = n + np.arange(m_ub)
    basis[art_rows] = n_struct + np.arange(art_rows.size)

    n_struct = n + m_ub
    warm = _feasible_basis(full[:, :n_struct], b, initial_basis)
    if warm is not None:
        full, n_cols, basis = full[:, :n_struct], n_struct, warm
        art_rows = art_rows[:0]

    lp = _Simplex(full, b, basis, tol, max_pivots)
    allowed = np.ones(n_cols, dtype=bool)
    if art_rows.size:
        phase1 = np.zeros(n_cols)
        phase1[n_struct:] = -1.0
        lp.run(phase1, allowed)
        x_b = lp.basic_values()
        basic = np.array(lp.basis)
        is_art = basic >= n_struct
        infeasibility = x_b[is_art].sum()
        if infeasibility > 1e-9:
            bad = [int(art_rows[basic[i] - n_struct]) for i in range(m)
                   if is_art[i] and x_b[i] > 1e-9]
            raise LPInfeasible(f"infeasible: residual {infeasibility:.3e} on rows {bad}", bad)
        # Drive the remaining (zero-level) artificials out of the basis.
        keep = np.ones(m, dtype=bool)
        for i in range(m):
            if lp.basis[i] < n_struct:
                continue
            B = lp.A[:, lp.basis]
            row_i = np.linalg.solve(B.T, np.eye(m)[i])
            entries = row_i @ lp.A[:, :n_struct]
            entries[[j for j in lp.basis if j < n_struct]] = 0.0
            cols = np.flatnonzero(np.abs(entries) > 1e-9)
            if cols.size:
                lp.basis[i] = int(cols[np.argmax(np.abs(entries[cols]))])
            else:
                keep[i] = False  # redundant row
        if not keep.all():
            lp.A = lp.A[keep]
            lp.b = lp.b[keep]
            lp.basis = [j for j, k in zip(lp.basis, keep) if k]
            m = int(keep.sum())
        allowed[n_struct:] = False

    phase2 = np.zeros(n_cols)
    phase2[:n] = cost
    lp.run(phase2, allowed)

    x = np.zeros(n_cols)
    x[lp.basis] = lp.basic_values()
    x = np.maximum(x[:n], 0.0) / col_scale
    final = tuple(int(j) for j in lp.basis) if len(lp.basis) == m_ub + m_eq else ()
    if any(j >= n_struct for j in final):
        final = ()
    return LPResult(x=x, objective=float(c @ x), n_pivots=lp.pivots, basis=final)


def _feasible_basis(A, b, basis):
    if basis is None:
        return None
    basis = [int(j) for j in basis]
    m = A.shape[0]
    if len(basis) != m or len(set(basis)) != m or not all(0 <= j < A.shape[1] for j in basis):
        return None
    B = A[:, basis]
    try:
        if np.linalg.cond(B) > 1e12:
            return None
        x_b = np.linalg.solve(B, b)
    except np.linalg.LinAlgError:
        return None
    return basis if np.all(x_b >= -1e-9) else None
