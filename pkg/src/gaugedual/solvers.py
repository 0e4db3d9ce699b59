"""Projected subgradient solver for gauge and Lagrange duals, plus primal oracles.

The gauge-dual feasible set ``{y : <b, y> - sigma rho_polar(y) >= 1}`` is
ray-like, so feasibility is restored by scaling ``y / t`` with ``t`` the
margin (exact Euclidean projection onto the halfspace when ``sigma = 0``).
When the objective polar has a polyhedral epigraph the subgradient phase is
followed by an outer-approximation (Kelley) refinement that linearises
``rho_polar`` by cuts, which is exact when ``rho_polar`` is polyhedral too.

The primal oracles are independent of the dual machinery and serve as
ground truth on desk-scale instances: an LP reformulation, a grid search
over PSD matrices of order at most 3, and soft thresholding for BPDN with
``A = I``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .cones import PsdCone, vec
from .duality import GaugeProblem, InvalidProblemError
from .gauges import ConicLinear, Norm
from .linalg import LpProblem, jacobi_eigen, solve_lp
from .polyhedra import LpAssembler

__all__ = [
    "NoFeasibleSeedError",
    "SolveResult",
    "SubgradConfig",
    "UnsupportedFamilyError",
    "family_tolerance",
    "solve_gauge_dual",
    "solve_lagrange_dual",
    "solve_primal_oracle",
    "subgradient_of_dual_objective",
]


class NoFeasibleSeedError(RuntimeError):
    pass


class UnsupportedFamilyError(NotImplementedError):
    pass


@dataclass(frozen=True)
class SubgradConfig:
    """Parameters of the projected subgradient method.

    The step at iteration ``k`` is ``step_c / sqrt(k)`` times ``|y0|`` along
    the normalised subgradient, so ``step_c`` is scale free.
    """

    max_iters: int = 50000
    step_c: float = 1.0
    stall_tol: float = 1e-7
    stall_iters: int = 2000
    seed: int = 0
    refine: bool = True
    refine_tol: float = 1e-11
    refine_cuts: int = 200

    def __post_init__(self):
        if self.max_iters <= 0 or self.step_c <= 0 or self.stall_tol <= 0 or self.stall_iters <= 0:
            raise ValueError("solver parameters must be positive")


@dataclass
class SolveResult:
    x: np.ndarray
    value: float
    iterations: int
    stalled: bool
    residual: float
    method: str = "subgradient"
    history: list = field(default_factory=list, repr=False)
    bound: Optional[float] = None

    def as_dict(self):
        return {
            "value": float(self.value),
            "iterations": int(self.iterations),
            "stalled": bool(self.stalled),
            "residual": float(self.residual),
            "method": self.method,
            "x": [float(v) for v in np.ravel(self.x)],
        }


def subgradient_of_dual_objective(d, y):
    """A subgradient (supergradient for a Lagrange dual) of ``d.objective`` at ``y``."""
    y = np.asarray(y, dtype=float)
    if not math.isfinite(d.objective(y)):
        raise ValueError("dual objective is infinite at this point")
    return d.subgradient(y)


# ---------------------------------------------------------------------------
# dual solvers


def _seed(d, rng, tries=2000):
    p = d.problem
    b = p.b
    if d.kind == "gauge_dual":
        y = d.restore(b / float(b @ b))
        if y is not None and math.isfinite(d.objective(y)):
            return y
        for _ in range(tries):
            y = d.restore(rng.standard_normal(b.size))
            if y is not None and math.isfinite(d.objective(y)):
                return y
    else:
        y = np.zeros(b.size)
        if d.feasible(y):
            return y
    raise NoFeasibleSeedError("no feasible starting point found for the %s" % d.kind)


def _residual(d, y):
    if d.kind == "gauge_dual":
        return max(0.0, 1.0 - d.constraint_value(y))
    return max(0.0, d.constraint_value(y) - 1.0)


def _run(d, cfg, sign):
    """Shared loop; ``sign = 1`` minimises, ``sign = -1`` maximises."""
    rng = np.random.default_rng(cfg.seed)
    y = _seed(d, rng)
    scale = max(np.linalg.norm(y), 1.0 / max(np.linalg.norm(d.problem.b), 1e-300))
    best_y, best = y.copy(), d.objective(y)
    history = [best]
    last_gain, k = 0, 0
    stalled = False
    for k in range(1, cfg.max_iters + 1):
        g = d.subgradient(y)
        ng = np.linalg.norm(g)
        if ng == 0:
            break
        step = cfg.step_c * scale / math.sqrt(k)
        z = d.restore(y - sign * step * g / ng)
        while z is None or not math.isfinite(d.objective(z)):
            step *= 0.5
            if step < 1e-16 * scale:
                z = y
                break
            z = d.restore(y - sign * step * g / ng)
        y = z
        v = d.objective(y)
        if sign * (best - v) > cfg.stall_tol * max(1.0, abs(best)):
            last_gain = k
        if sign * (best - v) > 0:
            best, best_y = v, y.copy()
        if k % 100 == 0:
            history.append(best)
        if k - last_gain >= cfg.stall_iters:
            stalled = True
            break
    return best_y, best, k, stalled, history


def solve_gauge_dual(d, cfg=SubgradConfig()):
    """Minimise ``kappa_polar(A' y)`` over the gauge-dual feasible set."""
    if d.kind != "gauge_dual":
        raise ValueError("expected a gauge dual, got %s" % d.kind)
    y, v, its, stalled, hist = _run(d, cfg, 1.0)
    method = "subgradient"
    bound = None
    if cfg.refine and d.problem.objective_gauge().polar_epigraph() is not None:
        out = _kelley_gauge(d, cfg)
        if out is not None:
            yr, vr, bound = out
            if vr <= v:
                y, v, method = yr, vr, "subgradient+cuts"
    return SolveResult(y, v, its, stalled, _residual(d, y), method, hist, bound)


def solve_lagrange_dual(d, cfg=SubgradConfig()):
    """Maximise ``<b, y> - sigma rho_polar(y)`` over ``kappa_polar(A' y) <= 1``."""
    if d.kind != "lagrange_dual":
        raise ValueError("expected a Lagrange dual, got %s" % d.kind)
    y, v, its, stalled, hist = _run(d, cfg, -1.0)
    method = "subgradient"
    bound = None
    if cfg.refine and d.problem.objective_gauge().polar_epigraph() is not None:
        out = _kelley_lagrange(d, cfg)
        if out is not None:
            yr, vr, bound = out
            if vr >= v:
                y, v, method = yr, vr, "subgradient+cuts"
    return SolveResult(y, v, its, stalled, _residual(d, y), method, hist, bound)


def _initial_cuts(p):
    m = p.m
    out = [p.rho.polar_subgradient(p.b)]
    for i in range(m):
        for s in (1.0, -1.0):
            e = np.zeros(m)
            e[i] = s
            out.append(p.rho.polar_subgradient(e))
    return out


def _kelley_gauge(d, cfg):
    """Outer approximation of ``rho_polar`` by cuts ``r >= <g, y>``.

    The LP value is a lower bound; scaling its point to feasibility gives
    an upper bound. Returns ``(y, upper, lower)``.
    """
    p = d.problem
    pe = p.objective_gauge().polar_epigraph()
    m, n = p.m, p.n
    cuts = [] if p.sigma == 0 else _initial_cuts(p)
    best_y, best = None, math.inf
    lower = -math.inf
    for _ in range(cfg.refine_cuts):
        L = LpAssembler()
        y = L.var(m)
        s = L.var(1)
        L.member(pe, [(np.vstack([p.A.T, np.zeros((1, m))]), y),
                      (np.concatenate([np.zeros(n), [1.0]])[:, None], s)])
        if p.sigma == 0:
            L.ub([(-p.b, y)], -1.0)
        else:
            r = L.var(1)
            for g in cuts:
                L.ub([(g, y), ([-1.0], r)], 0.0)
            L.ub([(-p.b, y), ([p.sigma], r)], -1.0)
        res = L.solve([([1.0], s)])
        if res.status != "optimal":
            return None
        lower = res.value
        yk = res.x[y]
        z = d.restore(yk)
        if z is not None:
            v = d.objective(z)
            if v < best:
                best, best_y = v, z
        if p.sigma == 0 or (best_y is not None and best - lower <= cfg.refine_tol * max(1.0, abs(best))):
            break
        cuts.append(p.rho.polar_subgradient(yk))
    if best_y is None:
        return None
    return best_y, best, lower


def _kelley_lagrange(d, cfg, box=1e6):
    p = d.problem
    pe = p.objective_gauge().polar_epigraph()
    m, n = p.m, p.n
    cuts = [] if p.sigma == 0 else _initial_cuts(p)
    best_y, best = None, -math.inf
    upper = math.inf
    for _ in range(cfg.refine_cuts):
        L = LpAssembler()
        y = L.var(m)
        L.member(pe, [(np.vstack([p.A.T, np.zeros((1, m))]), y)],
                 const=np.concatenate([np.zeros(n), [1.0]]))
        # a large box keeps the cut LP bounded before enough cuts exist
        L.ub([(np.eye(m), y)], box)
        L.ub([(-np.eye(m), y)], box)
        if p.sigma == 0:
            res = L.solve([(p.b, y)], maximize=True)
        else:
            r = L.var(1)
            for g in cuts:
                L.ub([(g, y), ([-1.0], r)], 0.0)
            res = L.solve([(p.b, y), ([-p.sigma], r)], maximize=True)
        if res.status != "optimal":
            return None
        upper = res.value
        yk = res.x[y]
        z = d.restore(yk)
        if z is not None:
            v = d.objective(z)
            if v > best:
                best, best_y = v, z
        if p.sigma == 0 or (best_y is not None and upper - best <= cfg.refine_tol * max(1.0, abs(best))):
            break
        cuts.append(p.rho.polar_subgradient(yk))
    if best_y is None:
        return None
    return best_y, best, upper


# ---------------------------------------------------------------------------
# primal oracles

_FAMILY_TOL = {"lp": 1e-6, "soft-threshold": 1e-6, "psd-grid": 1e-3}


def family_tolerance(method):
    """Tolerance on ``v_p v_g`` appropriate to the oracle that produced ``v_p``."""
    return _FAMILY_TOL.get(method, 1e-3)


def solve_primal_oracle(p, grid=41, depth=4):
    """Optimal primal value by an independent route.

    Families: LP reformulation when the objective gauge and the misfit set
    are polyhedral; grid search with refinement for PSD objectives of
    order at most 3; soft thresholding for BPDN with ``A = I``.

    Raises
    ------
    UnsupportedFamilyError
    """
    g = p.objective_gauge()
    if g.epigraph() is not None and p.misfit_polyhedral:
        return _lp_oracle(p, g)
    if isinstance(p.kappa, ConicLinear) and isinstance(p.kappa.cone, PsdCone) and p.D is None \
            and p.cone is None and p.sigma == 0 and p.kappa.cone.order <= 3:
        return _psd_grid_oracle(p, grid, depth)
    if _is_bpdn_identity(p):
        return _bpdn_oracle(p)
    raise UnsupportedFamilyError("no primal oracle for %r" % (p,))


def _lp_oracle(p, g):
    n = p.n
    L = LpAssembler()
    x = L.var(n)
    t = L.var(1)
    L.member(g.epigraph(), [(np.vstack([np.eye(n), np.zeros((1, n))]), x),
                            (np.concatenate([np.zeros(n), [1.0]])[:, None], t)])
    L.member(p.misfit_set().polyhedron(), [(p.A, x)])
    res = L.solve([([1.0], t)])
    if res.status != "optimal":
        raise InvalidProblemError("primal LP is %s" % res.status)
    xs = res.x[x]
    return SolveResult(xs, res.value, res.iterations, False, p.primal_residual(xs), "lp")


def _is_bpdn_identity(p):
    return (isinstance(p.kappa, Norm) and p.kappa.kind == "one" and p.kappa.unweighted
            and isinstance(p.rho, Norm) and p.rho.kind == "two" and p.rho.unweighted
            and p.D is None and p.cone is None and p.m == p.n
            and np.array_equal(p.A, np.eye(p.n)))


def _bpdn_oracle(p, iters=200):
    """``x = soft(b, lam)`` with ``|b - x|_2 = |clip(b, -lam, lam)|_2 = sigma``."""
    b, sigma = p.b, p.sigma
    lo, hi = 0.0, float(np.abs(b).max())
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if np.linalg.norm(np.clip(b, -mid, mid)) < sigma:
            lo = mid
        else:
            hi = mid
    lam = 0.5 * (lo + hi)
    x = np.sign(b) * np.maximum(np.abs(b) - lam, 0.0)
    return SolveResult(x, float(np.abs(x).sum()), iters, False, p.primal_residual(x), "soft-threshold")


def _sym_basis(order):
    """Columns map upper-triangle coordinates to vectorised symmetric matrices."""
    cols = []
    for i in range(order):
        for j in range(i, order):
            E = np.zeros((order, order))
            E[i, j] = E[j, i] = 1.0
            cols.append(vec(E))
    return np.array(cols).T


def _psd_screen(X, tol):
    """Vectorised principal-minor test for a stack of 2x2 or 3x3 symmetric matrices."""
    n = X.shape[-1]
    d = np.diagonal(X, axis1=1, axis2=2)
    ok = np.all(d >= -tol, axis=1)
    for i in range(n):
        for j in range(i + 1, n):
            ok &= X[:, i, i] * X[:, j, j] - X[:, i, j] ** 2 >= -tol
    if n == 3:
        ok &= np.linalg.det(X) >= -tol
    return ok


def _psd_grid_oracle(p, grid, depth, shrink=4.0):
    order = p.kappa.cone.order
    C = p.kappa.c.reshape(order, order)
    S = _sym_basis(order)
    M = p.A @ S
    u0 = np.linalg.lstsq(M, p.b, rcond=None)[0]
    if np.abs(M @ u0 - p.b).max() > 1e-9 * (1.0 + np.abs(p.b).max()):
        raise InvalidProblemError("affine constraints have no symmetric solution")
    _, sv, Vt = np.linalg.svd(M)
    rank = int(np.sum(sv > 1e-12 * max(1.0, sv.max(initial=0.0))))
    N = Vt[rank:].T
    k = N.shape[1]
    if k > 3:
        raise UnsupportedFamilyError("PSD grid oracle handles at most 3 free parameters")

    def mats(Z):
        U = u0 + Z @ N.T
        return (U @ S.T).reshape(-1, order, order)

    def objective(Xs):
        return np.einsum("kij,ij->k", Xs, C)

    if k == 0:
        X = mats(np.zeros((1, 0)))[0]
        w, _ = jacobi_eigen(X)
        if w[-1] < -1e-9:
            raise InvalidProblemError("the unique affine solution is not PSD")
        return SolveResult(vec(X), float(np.sum(C * X)), 1, False, 0.0, "psd-grid")
    # coarse pass over a wide cube, then zoom on the box spanned by the PSD points
    radius = 4.0 * max(1.0, np.abs(u0).max()) * order
    lo, hi = np.full(k, -radius), np.full(k, radius)
    best_val, best_z, best_X = math.inf, None, None
    evals = 0
    for level in range(depth + 2):
        axes = [np.linspace(a, c, grid) for a, c in zip(lo, hi)]
        step = (hi - lo) / (grid - 1)
        Z = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, k)
        Xs = mats(Z)
        ok = _psd_screen(Xs, 1e-12)
        evals += len(Z)
        if not np.any(ok):
            if best_z is None:
                raise InvalidProblemError("no PSD point found on the grid")
            lo, hi = best_z - step, best_z + step
            continue
        vals = np.where(ok, objective(Xs), np.inf)
        i = int(np.argmin(vals))
        # confirm with the Jacobi eigensolver before accepting
        w, _ = jacobi_eigen(Xs[i])
        if w[-1] >= -1e-10 and vals[i] < best_val:
            best_val, best_z, best_X = float(vals[i]), Z[i], Xs[i]
        if level == 0:
            F = Z[ok]
            lo, hi = F.min(axis=0) - step, F.max(axis=0) + step
            box = (lo.copy(), hi.copy())
            # the centroid of PSD grid points is PSD, usually strictly
            center = F.mean(axis=0)
        else:
            half = np.maximum(2.0 * step, (hi - lo) / (2.0 * shrink))
            lo, hi = best_z - half, best_z + half
    z, val, cuts = _psd_cut_refine(mats, C, N, S, box, center)
    if val < best_val:
        best_val, best_X = val, mats(z[None, :])[0]
    evals += cuts
    return SolveResult(vec(best_X), best_val, evals, False, p.primal_residual(vec(best_X)),
                       "psd-grid")


def _psd_cut_refine(mats, C, N, S, box, z_in, tol=1e-10, max_cuts=500):
    """Kelley refinement of ``min <C, X(z)>`` over PSD ``X(z)`` inside ``box``.

    Each cut ``v' X(z) v >= 0`` comes from the eigenvector of the most
    negative eigenvalue at the LP point. The LP value bounds the optimum
    from below; bisecting the segment from the strictly feasible grid
    point ``z_in`` to the LP point bounds it from above.
    """
    k = z_in.size
    # objective and cut coefficients in z-coordinates
    c = N.T @ (S.T @ vec(C))
    c0 = float(np.sum(C * mats(np.zeros((1, k)))[0]))
    X0 = mats(np.zeros((1, k)))[0]
    basis = [mats(np.eye(k)[i][None, :])[0] - X0 for i in range(k)]
    rows, rhs = [], []
    best_z, best = z_in.copy(), float(c @ z_in) + c0
    if jacobi_eigen(mats(z_in[None, :])[0])[0][-1] < 0:
        best = math.inf
    lower = -math.inf
    n_cut = 0
    bounds = list(zip(box[0], box[1]))
    for n_cut in range(1, max_cuts + 1):
        res = solve_lp(LpProblem(c, A_ub=np.array(rows).reshape(-1, k), b_ub=np.array(rhs),
                                 bounds=bounds))
        if res.status != "optimal":
            break
        z = res.x
        lower = float(res.value) + c0
        w, V = jacobi_eigen(mats(z[None, :])[0])
        if w[-1] >= -1e-13:
            best_z, best = z, lower
            break
        # segment from the interior point toward the LP point
        a, b = 0.0, 1.0
        for _ in range(60):
            t = 0.5 * (a + b)
            if jacobi_eigen(mats((z_in + t * (z - z_in))[None, :])[0])[0][-1] >= 0:
                a = t
            else:
                b = t
        zf = z_in + a * (z - z_in)
        vf = float(c @ zf) + c0
        if vf < best:
            best_z, best = zf, vf
        if best - lower <= tol * max(1.0, abs(best)):
            break
        v = V[:, -1]
        # v' X(z) v >= 0  <=>  -sum_i z_i v' B_i v <= v' X0 v
        rows.append([-float(v @ B @ v) for B in basis])
        rhs.append(float(v @ X0 @ v))
    return best_z, best, n_cut
