"""Dense linear-algebra kernel: cyclic Jacobi eigensolver, the largest
generalized eigenvalue of a symmetric pencil, and a small dense simplex
solver (Bland's rule).

Everything here is deterministic and sized for desk-scale problems; these
routines double as oracles for the rest of the package.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

__all__ = [
    "ConvergenceError",
    "LinearMap",
    "LpCyclingError",
    "LpProblem",
    "LpResult",
    "NotPSDError",
    "gen_eigmax",
    "jacobi_eigen",
    "solve_lp",
    "symmetric",
]


class ConvergenceError(RuntimeError):
    """Raised when the Jacobi sweep budget is exhausted."""

    def __init__(self, sweeps, off):
        super().__init__(
            "Jacobi iteration did not converge after %d sweeps "
            "(off-diagonal norm %.3e)" % (sweeps, off))
        self.sweeps = sweeps
        self.off = off


class NotPSDError(ValueError):
    """Raised when a matrix required to be PSD has a negative eigenvalue."""


class LpCyclingError(RuntimeError):
    """Raised when the simplex pivot budget is exhausted."""


def symmetric(M, check=True, tol=0.0):
    """Return `M` as a float array with exactly symmetric entries.

    With ``check=True`` an asymmetry larger than ``tol`` raises; the
    stored result is always ``(M + M.T) / 2`` so ``S[i, j] == S[j, i]``
    holds bit for bit.
    """
    M = np.array(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("expected a square matrix, got shape %s" % (M.shape,))
    if not np.all(np.isfinite(M)):
        raise ValueError("matrix has non-finite entries")
    if check and np.max(np.abs(M - M.T), initial=0.0) > tol:
        raise ValueError("matrix is not symmetric")
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class LinearMap:
    """Dense linear map ``x -> M @ x`` with its adjoint ``y -> M.T @ y``."""

    matrix: np.ndarray

    def __post_init__(self):
        M = np.atleast_2d(np.array(self.matrix, dtype=float))
        if not np.all(np.isfinite(M)):
            raise ValueError("linear map has non-finite coefficients")
        M.setflags(write=False)
        object.__setattr__(self, "matrix", M)

    @property
    def shape(self):
        return self.matrix.shape

    def __call__(self, x):
        return self.matrix @ np.asarray(x, dtype=float)

    def adjoint(self):
        return LinearMap(self.matrix.T)

    @classmethod
    def identity(cls, n):
        return cls(np.eye(n))


# ---------------------------------------------------------------------------
# Jacobi eigensolver
# ---------------------------------------------------------------------------

def jacobi_eigen(M, max_sweeps=60, tol=1e-15):
    """Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Parameters
    ----------
    M : (n, n) array_like
        Symmetric matrix, ``n <= 200``.
    max_sweeps : int
        Budget of full cyclic sweeps.
    tol : float
        Stop once the off-diagonal Frobenius norm is below
        ``tol * ||M||_F``.

    Returns
    -------
    w : (n,) ndarray
        Eigenvalues in descending order.
    V : (n, n) ndarray
        Orthonormal eigenvectors, ``M @ V[:, i] = w[i] * V[:, i]``.
    """
    A = symmetric(M, check=True, tol=1e-12 * (1.0 + np.abs(np.asarray(M)).max(initial=0.0)))
    n = A.shape[0]
    if n > 200:
        raise ValueError("jacobi_eigen supports n <= 200, got %d" % n)
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if n <= 1 or scale == 0.0:
        return np.diag(A).copy(), V
    target = tol * scale
    for sweep in range(max_sweeps + 1):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= target:
            break
        if sweep == max_sweeps:
            raise ConvergenceError(sweep, off)
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if apq == 0.0:
                    continue
                app, aqq = A[p, p], A[q, q]
                if abs(apq) <= 1e-300 * max(abs(app), abs(aqq)):
                    A[p, q] = A[q, p] = 0.0
                    continue
                theta = (aqq - app) / (2.0 * apq)
                if abs(theta) > 1e150:
                    t = 0.5 / theta
                else:
                    t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                ap = A[:, p].copy()
                aq = A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                A[p, :] = A[:, p]
                A[q, :] = A[:, q]
                A[p, p] = app - t * apq
                A[q, q] = aqq + t * apq
                A[p, q] = A[q, p] = 0.0
                vp = V[:, p].copy()
                vq = V[:, q].copy()
                V[:, p] = c * vp - s * vq
                V[:, q] = s * vp + c * vq
    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


# ---------------------------------------------------------------------------
# Generalized eigenvalue of a symmetric pencil
# ---------------------------------------------------------------------------

def gen_eigmax(U, C, psd_tol=1e-10):
    """Largest generalized eigenvalue of ``U v = lam C v`` for ``C`` PSD.

    This is ``sup { x'Ux / x'Cx : x'Cx > 0 }`` extended to the singular
    case: ``+inf`` is returned when some null direction ``w`` of ``C``
    makes ``U`` unbounded above on ``{x : x'Cx = 1}``; otherwise the null
    block is eliminated by a (generalized) Schur complement and the
    problem reduces to the range of ``C``.

    Returns
    -------
    lam : float
        Possibly ``math.inf``; ``-math.inf`` only when ``C == 0`` and
        ``U`` is negative semidefinite (no admissible ``x``).
    v : ndarray
        Leading generalized eigenvector scaled so ``v'Cv = 1`` (finite
        case), or a witness direction for the infinite case.

    Raises
    ------
    NotPSDError
        If ``C`` has an eigenvalue below ``-psd_tol * ||C||_F``.
    """
    U = symmetric(U, check=True, tol=1e-9 * (1.0 + np.abs(np.asarray(U)).max(initial=0.0)))
    C = symmetric(C, check=True, tol=1e-9 * (1.0 + np.abs(np.asarray(C)).max(initial=0.0)))
    if U.shape != C.shape:
        raise ValueError("U and C must have the same order")
    n = U.shape[0]
    c_norm = np.linalg.norm(C)
    thresh = psd_tol * c_norm
    d, Q = jacobi_eigen(C)
    if n and d[-1] < -thresh:
        raise NotPSDError("C is not PSD (min eigenvalue %.3e)" % d[-1])

    rng_mask = d > thresh
    if rng_mask.all():
        # C positive definite: Cholesky reduction L^{-1} U L^{-T}.
        L = np.linalg.cholesky(C)
        Linv = np.linalg.solve(L, np.eye(n))
        w, Z = jacobi_eigen(Linv @ U @ Linv.T)
        v = Linv.T @ Z[:, 0]
        return float(w[0]), v / math.sqrt(v @ C @ v)

    R = Q[:, rng_mask]
    N = Q[:, ~rng_mask]
    u_thresh = psd_tol * max(1.0, np.linalg.norm(U))
    Unn = N.T @ U @ N
    wn, Zn = jacobi_eigen(Unn)
    if wn[0] > u_thresh:
        return math.inf, N @ Zn[:, 0]
    if R.shape[1] == 0:
        return -math.inf, np.zeros(n)
    Urn = R.T @ U @ N
    # Coupling into the kernel of Unn with no curvature to absorb it.
    ker = Zn[:, np.abs(wn) <= u_thresh]
    if ker.shape[1]:
        coupling = Urn @ ker
        if np.max(np.abs(coupling)) > u_thresh:
            i, j = np.unravel_index(np.argmax(np.abs(coupling)), coupling.shape)
            return math.inf, N @ ker[:, j]
    inv_w = np.array([1.0 / x if abs(x) > u_thresh else 0.0 for x in wn])
    Unn_pinv = (Zn * inv_w) @ Zn.T
    S = R.T @ U @ R - Urn @ Unn_pinv @ Urn.T
    scale = 1.0 / np.sqrt(d[rng_mask])
    w, Z = jacobi_eigen((S * scale).T * scale)
    r = scale * Z[:, 0]
    v = R @ r - N @ (Unn_pinv @ (Urn.T @ r))
    return float(w[0]), v / math.sqrt(v @ C @ v)


# ---------------------------------------------------------------------------
# Dense simplex with Bland's rule
# ---------------------------------------------------------------------------

@dataclass
class LpProblem:
    """``min c'x  s.t.  A_ub x <= b_ub,  A_eq x = b_eq,  lo <= x <= hi``.

    ``bounds`` follows the usual convention: a single ``(lo, hi)`` pair or
    one pair per variable, ``None`` meaning unbounded. The default is
    ``(0, None)`` for every variable.
    """

    c: np.ndarray
    A_ub: Optional[np.ndarray] = None
    b_ub: Optional[np.ndarray] = None
    A_eq: Optional[np.ndarray] = None
    b_eq: Optional[np.ndarray] = None
    bounds: object = (0.0, None)

    def __post_init__(self):
        self.c = np.atleast_1d(np.asarray(self.c, dtype=float))
        n = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, n, "ub")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, n, "eq")
        for arr in (self.c, self.A_ub, self.b_ub, self.A_eq, self.b_eq):
            if not np.all(np.isfinite(arr)):
                raise ValueError("LP coefficients must be finite")
        self.bounds = _bounds(self.bounds, n)

    @property
    def n(self):
        return self.c.size


def _rows(A, b, n, tag):
    if A is None:
        return np.zeros((0, n)), np.zeros(0)
    A = np.asarray(A, dtype=float).reshape(-1, n)
    b = np.atleast_1d(np.asarray(b, dtype=float))
    if b.shape != (A.shape[0],):
        raise ValueError("A_%s has %d rows but b_%s has shape %s" % (tag, A.shape[0], tag, b.shape))
    return A, b


def _bounds(bounds, n):
    if bounds is None:
        bounds = (None, None)
    if len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)) \
            and not isinstance(bounds[1], (tuple, list)):
        bounds = [bounds] * n
    if len(bounds) != n:
        raise ValueError("expected %d bounds, got %d" % (n, len(bounds)))
    out = []
    for lo, hi in bounds:
        lo = -math.inf if lo is None else float(lo)
        hi = math.inf if hi is None else float(hi)
        if lo > hi:
            raise ValueError("empty bound interval [%g, %g]" % (lo, hi))
        out.append((lo, hi))
    return out


@dataclass
class LpResult:
    status: str
    value: float
    x: Optional[np.ndarray]
    iterations: int = 0
    # marginals: d(value)/d(rhs) for ub and eq rows (<= 0 for ub rows)
    ineq_marginals: Optional[np.ndarray] = None
    eq_marginals: Optional[np.ndarray] = None
    message: str = ""


class _Tableau:
    """Standard-form tableau ``min c'z, Mz = r, z >= 0`` with Bland pivots."""

    def __init__(self, M, r, tol, max_pivots):
        self.m, self.n = M.shape
        self.tol = tol
        self.max_pivots = max_pivots
        self.pivots = 0
        # columns: n structural + m artificial, then rhs
        self.T = np.hstack([M, np.eye(self.m), r[:, None]])
        self.basis = list(range(self.n, self.n + self.m))

    def _pivot(self, i, j):
        self.pivots += 1
        if self.pivots > self.max_pivots:
            raise LpCyclingError("simplex exceeded %d pivots" % self.max_pivots)
        T = self.T
        T[i] /= T[i, j]
        col = T[:, j].copy()
        col[i] = 0.0
        T -= np.outer(col, T[i])
        self.basis[i] = j

    def run(self, cost, allowed):
        """Minimise ``cost @ z`` over columns flagged in ``allowed``."""
        T = self.T
        tol = self.tol
        while True:
            cb = cost[self.basis]
            reduced = cost - cb @ T[:, :-1]
            entering = None
            for j in np.flatnonzero(allowed):
                if reduced[j] < -tol:
                    entering = j
                    break
            if entering is None:
                return "optimal", reduced
            col = T[:, entering]
            rows = np.flatnonzero(col > tol)
            if rows.size == 0:
                return "unbounded", reduced
            ratios = T[rows, -1] / col[rows]
            tied = rows[ratios <= ratios.min() + tol]
            # Bland: among tied rows, the smallest basic variable leaves
            leave = min(tied, key=lambda i: self.basis[i])
            self._pivot(leave, entering)


def solve_lp(p, tol=1e-10, max_pivots=20000):
    """Solve a small dense LP by the two-phase simplex method with Bland's rule.

    Returns an :class:`LpResult` with ``status`` in ``{"optimal",
    "infeasible", "unbounded"}``. The pivot rule makes the result fully
    deterministic. Raises :class:`LpCyclingError` if ``max_pivots`` is hit.
    """
    n = p.n
    # Map original variables onto nonnegative standard-form columns:
    # x_j = offset_j + sum_k coef_jk * z_k
    cols = []          # (var index, coefficient)
    offset = np.zeros(n)
    extra_ub = []      # (column, upper bound) rows z <= u - l
    for j, (lo, hi) in enumerate(p.bounds):
        if math.isfinite(lo):
            offset[j] = lo
            cols.append((j, 1.0))
            if math.isfinite(hi):
                extra_ub.append((len(cols) - 1, hi - lo))
        elif math.isfinite(hi):
            offset[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nz = len(cols)
    X = np.zeros((n, nz))
    for k, (j, s) in enumerate(cols):
        X[j, k] = s

    m_ub = p.A_ub.shape[0]
    m_eq = p.A_eq.shape[0]
    m_bd = len(extra_ub)
    m = m_ub + m_bd + m_eq
    n_slack = m_ub + m_bd
    M = np.zeros((m, nz + n_slack))
    r = np.zeros(m)
    M[:m_ub, :nz] = p.A_ub @ X
    r[:m_ub] = p.b_ub - p.A_ub @ offset
    for i, (k, u) in enumerate(extra_ub):
        M[m_ub + i, k] = 1.0
        r[m_ub + i] = u
    M[:n_slack, nz:] = np.eye(n_slack)
    M[n_slack:, :nz] = p.A_eq @ X
    r[n_slack:] = p.b_eq - p.A_eq @ offset
    sign = np.where(r < 0, -1.0, 1.0)
    M *= sign[:, None]
    r *= sign

    nt = nz + n_slack
    cost_struct = np.concatenate([p.c @ X, np.zeros(n_slack)])
    tab = _Tableau(M, r, tol, max_pivots)

    # Phase 1
    cost1 = np.concatenate([np.zeros(nt), np.ones(m)])
    allowed = np.ones(nt + m, dtype=bool)
    tab.run(cost1, allowed)
    infeas = float(np.sum(tab.T[[i for i, b in enumerate(tab.basis) if b >= nt], -1]))
    scale = 1.0 + np.abs(r).max(initial=0.0)
    if infeas > 1e-9 * scale:
        return LpResult("infeasible", math.nan, None, tab.pivots,
                        message="phase-1 residual %.3e" % infeas)
    # drive artificials out of the basis where possible
    for i in range(m):
        b = tab.basis[i]
        if b >= nt:
            row = tab.T[i, :nt]
            cand = np.flatnonzero(np.abs(row) > 1e-9)
            if cand.size:
                tab._pivot(i, int(cand[0]))

    # Phase 2; artificials stay in the tableau (for marginals) but may not enter.
    cost2 = np.concatenate([cost_struct, np.zeros(m)])
    allowed = np.zeros(nt + m, dtype=bool)
    allowed[:nt] = True
    status, reduced = tab.run(cost2, allowed)
    if status == "unbounded":
        return LpResult("unbounded", -math.inf, None, tab.pivots)

    z = np.zeros(nt + m)
    for i, b in enumerate(tab.basis):
        z[b] = tab.T[i, -1]
    x = offset + X @ z[:nz]
    value = float(p.c @ x)
    # duals of standard-form rows: y = -reduced cost of artificial columns
    y_std = -reduced[nt:] * sign
    return LpResult("optimal", value, x, tab.pivots,
                    ineq_marginals=y_std[:m_ub].copy(),
                    eq_marginals=y_std[n_slack:].copy())
