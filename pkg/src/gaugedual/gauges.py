"""Gauge functions with exact polars and polar subgradients.

A gauge is a nonnegative, positively homogeneous convex function that
vanishes at the origin. Each variant below evaluates itself, its polar

    kappa_polar(y) = sup { <x, y> : kappa(x) <= 1 },

and a maximiser of that supremum (a subgradient of the polar). Polyhedral
variants also expose a lifted conic epigraph so that LP routes can be
assembled for compositions and sums.

Infinite values are ``math.inf``, never a large sentinel float.
"""

from __future__ import annotations

import math

import numpy as np

from .cones import ConeDescr, FreeSpace, NonnegOrthant, PolyhedralCone, PsdCone, ZeroCone, mat, vec
from .linalg import LpProblem, gen_eigmax, solve_lp, symmetric
from .polyhedra import FREE, Polyhedron, polar_epigraph

__all__ = [
    "Atomic",
    "Composed",
    "ConicLinear",
    "DimensionError",
    "EpigraphIndicator",
    "Gauge",
    "InfinitePolarError",
    "Lovasz",
    "Norm",
    "Sum",
    "Support",
    "UnsupportedGaugeError",
    "check_polar_inequality",
    "minkowski_of_set",
    "polar_gauge",
]

_HOMOG_TOL = 1e-12


class DimensionError(ValueError):
    pass


class UnsupportedGaugeError(NotImplementedError):
    pass


class InfinitePolarError(ValueError):
    pass


class Gauge:
    """Base class. Subclasses set ``dim`` and override the closed forms."""

    dim: int
    closed = True

    def __call__(self, x):
        return self.evaluate(x)

    def _vec(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise DimensionError("%s expects length %d, got %d"
                                 % (type(self).__name__, self.dim, x.size))
        return x

    # -- default LP routes ------------------------------------------------

    def epigraph(self):
        """Conic lifted epigraph over ``(x, t)``, or ``None`` if not polyhedral."""
        return None

    def polar_epigraph(self):
        epi = self.epigraph()
        return None if epi is None else polar_epigraph(epi, self.dim)

    @property
    def is_polyhedral(self):
        return self.epigraph() is not None

    def evaluate(self, x):
        x = self._vec(x)
        epi = self._require_epigraph()
        return _lp_min_t(epi, x)

    def polar(self, y):
        return self._lp_polar(self._vec(y))[0]

    def polar_subgradient(self, y):
        val, x = self._lp_polar(self._vec(y))
        if math.isinf(val):
            raise InfinitePolarError("polar is +inf at this point")
        return x

    def _require_epigraph(self):
        epi = self.epigraph()
        if epi is None:
            raise UnsupportedGaugeError("%s has no polyhedral epigraph" % type(self).__name__)
        return epi

    def _lp_polar(self, y):
        # sup <y, x> over {(x, 1, w) in epi}
        epi = self._require_epigraph()
        n = self.dim
        fix_t = np.zeros((1, epi.G.shape[1]))
        fix_t[0, n] = 1.0
        E = np.vstack([epi.E, fix_t])
        f = np.concatenate([epi.f, [1.0]])
        c = np.zeros(epi.G.shape[1])
        c[:n] = -y
        res = solve_lp(LpProblem(c, A_ub=epi.G, b_ub=epi.h, A_eq=E, b_eq=f, bounds=FREE))
        if res.status == "unbounded":
            return math.inf, None
        if res.status != "optimal":
            raise RuntimeError("polar LP failed: %s" % res.status)
        return max(0.0, -res.value), res.x[:n]

    def __repr__(self):
        return "%s(dim=%d)" % (type(self).__name__, self.dim)


def _lp_min_t(epi, x):
    """``min { t : (x, t) in epi }`` for a lifted epigraph; ``inf`` if empty."""
    n = x.size
    L = np.zeros((n + 1, 1))
    L[n, 0] = 1.0
    sub = epi.preimage(L, np.concatenate([x, [0.0]]))
    val, _ = sub.minimize(np.ones(1))
    if val == -math.inf:
        raise RuntimeError("epigraph unbounded below in t")
    return max(0.0, val)


class _EpigraphGauge(Gauge):
    """Gauge given only by a polyhedral lifted epigraph."""

    def __init__(self, epi, dim, label="polyhedral"):
        self._epi = epi
        self.dim = dim
        self.label = label

    def epigraph(self):
        return self._epi

    def __repr__(self):
        return "_EpigraphGauge(%s, dim=%d)" % (self.label, self.dim)


# ---------------------------------------------------------------------------
# norms

_KINDS = {"one": "one", 1: "one", "1": "one", "l1": "one",
          "two": "two", 2: "two", "2": "two", "l2": "two",
          "inf": "inf", math.inf: "inf", "l_inf": "inf", "linf": "inf"}
_DUAL_KIND = {"one": "inf", "two": "two", "inf": "one"}


class Norm(Gauge):
    """Weighted norm ``||w * x||``; the polar is the dual norm of ``y / w``.

    Parameters
    ----------
    kind : {"one", "two", "inf"}
    dim : int
    weights : array_like, optional
        Strictly positive weights; default all ones.
    """

    def __init__(self, kind, dim, weights=None):
        try:
            self.kind = _KINDS[kind]
        except (KeyError, TypeError):
            raise ValueError("unknown norm kind %r" % (kind,)) from None
        self.dim = int(dim)
        w = np.ones(self.dim) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
        if w.size != self.dim:
            raise DimensionError("weights have length %d, expected %d" % (w.size, self.dim))
        if not np.all(w > 0) or not np.all(np.isfinite(w)):
            raise ValueError("norm weights must be finite and strictly positive")
        self.weights = w
        self.weights.setflags(write=False)

    @property
    def unweighted(self):
        return bool(np.all(self.weights == 1.0))

    @staticmethod
    def _norm(kind, v):
        if kind == "one":
            return float(np.abs(v).sum())
        if kind == "two":
            return float(np.linalg.norm(v))
        return float(np.abs(v).max(initial=0.0))

    def evaluate(self, x):
        return self._norm(self.kind, self.weights * self._vec(x))

    def polar(self, y):
        return self._norm(_DUAL_KIND[self.kind], self._vec(y) / self.weights)

    def polar_subgradient(self, y):
        y = self._vec(y)
        u = y / self.weights
        x = np.zeros(self.dim)
        if self.kind == "one":
            # dual is inf-norm: lowest index among maximisers
            a = np.abs(u)
            if a.max(initial=0.0) == 0.0:
                return x
            i = int(np.argmax(a))
            x[i] = np.sign(u[i]) / self.weights[i]
        elif self.kind == "two":
            nu = np.linalg.norm(u)
            if nu == 0.0:
                return x
            x = u / nu / self.weights
        else:
            x = np.sign(u) / self.weights
        return x

    def epigraph(self):
        n, w = self.dim, self.weights
        W = np.diag(w)
        if self.kind == "one":
            # (x, t, a): +-w x - a <= 0, sum a - t <= 0
            G = np.vstack([
                np.hstack([W, np.zeros((n, 1)), -np.eye(n)]),
                np.hstack([-W, np.zeros((n, 1)), -np.eye(n)]),
                np.concatenate([np.zeros(n), [-1.0], np.ones(n)])[None, :],
            ])
            return Polyhedron.build(n + 1, G=G, h=np.zeros(2 * n + 1))
        if self.kind == "inf":
            col = -np.ones((n, 1))
            G = np.vstack([np.hstack([W, col]), np.hstack([-W, col])])
            return Polyhedron.build(n + 1, G=G, h=np.zeros(2 * n))
        return None

    def __repr__(self):
        if self.unweighted:
            return "Norm(%r, %d)" % (self.kind, self.dim)
        return "Norm(%r, %d, weights=%s)" % (self.kind, self.dim, self.weights.tolist())


# ---------------------------------------------------------------------------
# atomic gauge and its polar


class Atomic(Gauge):
    """``inf { sum c_a : x = sum c_a a, c_a >= 0 }`` over a finite atom set.

    Atoms are the columns of ``atoms`` (shape ``(dim, n_atoms)``). The polar
    is the support function of ``conv({0} U atoms)``, clamped below at 0.
    """

    def __init__(self, atoms):
        A = np.asarray(atoms, dtype=float)
        if A.ndim != 2 or A.shape[1] == 0:
            raise ValueError("atoms must be a (dim, n_atoms) array with at least one atom")
        self.atoms = A
        self.atoms.setflags(write=False)
        self.dim = A.shape[0]

    def evaluate(self, x):
        x = self._vec(x)
        k = self.atoms.shape[1]
        res = solve_lp(LpProblem(np.ones(k), A_eq=self.atoms, b_eq=x))
        if res.status == "infeasible":
            return math.inf
        return max(0.0, res.value)

    def polar(self, y):
        return max(0.0, float(np.max(self.atoms.T @ self._vec(y))))

    def polar_subgradient(self, y):
        s = self.atoms.T @ self._vec(y)
        i = int(np.argmax(s))
        if s[i] <= 0.0:
            return np.zeros(self.dim)
        return self.atoms[:, i].copy()

    def epigraph(self):
        n, k = self.atoms.shape
        # (x, t, c): x - A c = 0, sum c - t <= 0, -c <= 0
        E = np.hstack([np.eye(n), np.zeros((n, 1)), -self.atoms])
        G = np.vstack([
            np.concatenate([np.zeros(n), [-1.0], np.ones(k)])[None, :],
            np.hstack([np.zeros((k, n + 1)), -np.eye(k)]),
        ])
        return Polyhedron.build(n + 1, G=G, h=np.zeros(k + 1), E=E, f=np.zeros(n))

    def __repr__(self):
        return "Atomic(%d atoms in R^%d)" % (self.atoms.shape[1], self.dim)


class Support(Gauge):
    """``max(0, max_i <p_i, x>)``: support function of ``conv({0} U points)``."""

    def __init__(self, points):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[1] == 0:
            raise ValueError("points must be a (dim, n_points) array")
        self.points = P
        self.points.setflags(write=False)
        self.dim = P.shape[0]

    def evaluate(self, x):
        return max(0.0, float(np.max(self.points.T @ self._vec(x))))

    def polar(self, y):
        return Atomic(self.points).evaluate(y)

    def epigraph(self):
        n, k = self.points.shape
        G = np.vstack([np.hstack([self.points.T, -np.ones((k, 1))]),
                       np.concatenate([np.zeros(n), [-1.0]])[None, :]])
        return Polyhedron.build(n + 1, G=G, h=np.zeros(k + 1))


# ---------------------------------------------------------------------------
# conic gauge


class ConicLinear(Gauge):
    """``<c, x> + indicator_K(x)`` with ``c`` in the dual cone ``K*``.

    The polar is ``inf { alpha >= 0 : alpha c - u in K* }``. For the PSD
    cone this is ``max(0, lambda_max(U, C))``, the largest generalized
    eigenvalue, and it may be ``+inf`` when ``C`` is singular.
    """

    def __init__(self, c, cone):
        if not isinstance(cone, ConeDescr):
            raise TypeError("cone must be a ConeDescr")
        c = np.asarray(c, dtype=float)
        if isinstance(cone, PsdCone) and c.ndim == 2:
            c = vec(symmetric(c))
        c = c.reshape(-1)
        if c.size != cone.dim:
            raise DimensionError("c has length %d, cone lives in R^%d" % (c.size, cone.dim))
        if not cone.dual_contains(c):
            raise ValueError("c must lie in the dual cone for a gauge")
        self.c = c
        self.c.setflags(write=False)
        self.cone = cone
        self.dim = cone.dim

    def evaluate(self, x):
        x = self._vec(x)
        if not self.cone.contains(x, tol=1e-9):
            return math.inf
        if isinstance(self.cone, PsdCone):
            X = symmetric(mat(x), check=False)
            return max(0.0, float(np.sum(mat(self.c) * X)))
        return max(0.0, float(self.c @ x))

    @staticmethod
    def _ratio_polar(cc, uu):
        # inf { alpha >= 0 : alpha cc >= uu } and the first active index
        best, arg = 0.0, -1
        for i, (ci, ui) in enumerate(zip(cc, uu)):
            if ci > 0:
                r = ui / ci
            elif ui > 0:
                return math.inf, i
            else:
                continue
            if r > best:
                best, arg = r, i
        return best, arg

    def _psd(self, u):
        U = symmetric(mat(u), check=False)
        return gen_eigmax(U, mat(self.c))

    def polar(self, y):
        u = self._vec(y)
        K = self.cone
        if isinstance(K, NonnegOrthant):
            return self._ratio_polar(self.c, u)[0]
        if isinstance(K, PolyhedralCone):
            R = K.generators
            return self._ratio_polar(R.T @ self.c, R.T @ u)[0]
        if isinstance(K, ZeroCone):
            return 0.0
        if isinstance(K, FreeSpace):
            return 0.0 if np.all(u == 0) else math.inf
        if isinstance(K, PsdCone):
            lam, _ = self._psd(u)
            return max(0.0, lam)
        raise UnsupportedGaugeError("no polar for cone %r" % (K,))

    def polar_subgradient(self, y):
        u = self._vec(y)
        K = self.cone
        x = np.zeros(self.dim)
        if isinstance(K, (NonnegOrthant, PolyhedralCone)):
            R = np.eye(self.dim) if isinstance(K, NonnegOrthant) else K.generators
            cc, uu = R.T @ self.c, R.T @ u
            val, i = self._ratio_polar(cc, uu)
            if math.isinf(val):
                raise InfinitePolarError("polar is +inf at this point")
            if i < 0:
                return x
            return R[:, i] / cc[i]
        if isinstance(K, ZeroCone):
            return x
        if isinstance(K, FreeSpace):
            if np.any(u != 0):
                raise InfinitePolarError("polar is +inf at this point")
            return x
        if isinstance(K, PsdCone):
            lam, v = self._psd(u)
            if math.isinf(lam):
                raise InfinitePolarError("polar is +inf: coupling into the null space of C")
            if lam <= 0:
                return x
            return vec(np.outer(v, v))
        raise UnsupportedGaugeError("no polar for cone %r" % (K,))

    def epigraph(self):
        P = self.cone.polyhedron()
        if P is None:
            return None
        n, k = self.dim, P.n_aux
        # (x, t, w): cone rows on (x, w), <c, x> - t <= 0
        G = np.vstack([
            np.hstack([P.G[:, :n], np.zeros((P.G.shape[0], 1)), P.G[:, n:]]),
            np.concatenate([self.c, [-1.0], np.zeros(k)])[None, :],
        ])
        E = np.hstack([P.E[:, :n], np.zeros((P.E.shape[0], 1)), P.E[:, n:]])
        return Polyhedron.build(n + 1, G=G, h=np.zeros(G.shape[0]), E=E, f=np.zeros(E.shape[0]))

    def __repr__(self):
        return "ConicLinear(c=%s, %r)" % (np.round(self.c, 6).tolist(), self.cone)


# ---------------------------------------------------------------------------
# sums over disjoint blocks


class Sum(Gauge):
    """``sum_j kappa_j(x[block_j])`` over disjoint blocks covering ``0..dim-1``.

    The polar is the max of the block polars.
    """

    def __init__(self, parts):
        parts = list(parts)
        if not parts:
            raise ValueError("Sum needs at least one part")
        blocks = []
        for g, blk in parts:
            idx = np.arange(blk.stop)[blk] if isinstance(blk, slice) else np.asarray(blk, dtype=int)
            if idx.size != g.dim:
                raise DimensionError("block of size %d for a gauge of dim %d" % (idx.size, g.dim))
            blocks.append(idx)
        allidx = np.concatenate(blocks)
        self.dim = int(allidx.size)
        if not np.array_equal(np.sort(allidx), np.arange(self.dim)):
            raise ValueError("blocks must be disjoint and cover 0..dim-1")
        self.parts = [g for g, _ in parts]
        self.blocks = blocks
        self.closed = all(g.closed for g in self.parts)

    def evaluate(self, x):
        x = self._vec(x)
        return float(sum(g.evaluate(x[b]) for g, b in zip(self.parts, self.blocks)))

    def _part_polars(self, y):
        return [g.polar(y[b]) for g, b in zip(self.parts, self.blocks)]

    def polar(self, y):
        return max(self._part_polars(self._vec(y)))

    def polar_subgradient(self, y):
        y = self._vec(y)
        vals = self._part_polars(y)
        j = int(np.argmax(vals))
        x = np.zeros(self.dim)
        if vals[j] > 0:
            x[self.blocks[j]] = self.parts[j].polar_subgradient(y[self.blocks[j]])
        return x

    def epigraph(self):
        epis = [g.epigraph() for g in self.parts]
        if any(e is None for e in epis):
            return None
        n, p = self.dim, len(self.parts)
        # variables: x (n), t, then per part (t_j, w_j)
        widths = [e.n_aux + 1 for e in epis]
        total = n + 1 + sum(widths)
        G_rows, E_rows = [], []
        tie = np.zeros(total)
        tie[n] = -1.0
        off = n + 1
        for e, blk, wd in zip(epis, self.blocks, widths):
            d = blk.size
            for M, rows in ((e.G, G_rows), (e.E, E_rows)):
                R = np.zeros((M.shape[0], total))
                R[:, blk] = M[:, :d]
                R[:, off] = M[:, d]
                R[:, off + 1:off + wd] = M[:, d + 1:]
                rows.append(R)
            tie[off] = 1.0
            off += wd
        G = np.vstack(G_rows + [tie[None, :]])
        E = np.vstack(E_rows) if E_rows else np.zeros((0, total))
        return Polyhedron.build(n + 1, G=G, h=np.zeros(G.shape[0]), E=E, f=np.zeros(E.shape[0]),
                                n_aux=total - n - 1)

    def __repr__(self):
        return "Sum(%s)" % ", ".join(repr(g) for g in self.parts)


# ---------------------------------------------------------------------------
# composition with a linear map


class Composed(Gauge):
    """``kappa(A x)``; the polar is ``inf { kappa_polar(u) : A' u = y }``.

    The infimum is solved as an LP when the inner polar is polyhedral.
    Otherwise the cases with a closed form are: ``A`` with full row rank
    (``u`` is then unique) and a Euclidean inner norm (minimum-norm
    ``u``). Other combinations raise :class:`UnsupportedGaugeError`.
    The relative-interior qualification needed for attainment outside the
    polyhedral case is the caller's responsibility.
    """

    def __init__(self, inner, A):
        A = np.atleast_2d(np.asarray(getattr(A, "matrix", A), dtype=float))
        if A.shape[0] != inner.dim:
            raise DimensionError("map has %d rows, inner gauge dim %d" % (A.shape[0], inner.dim))
        self.inner = inner
        self.A = A
        self.A.setflags(write=False)
        self.dim = A.shape[1]
        self.closed = inner.closed
        self._rank = int(np.linalg.matrix_rank(A)) if A.size else 0

    def evaluate(self, x):
        return self.inner.evaluate(self.A @ self._vec(x))

    def epigraph(self):
        epi = self.inner.epigraph()
        if epi is None:
            return None
        m, n = self.A.shape
        L = np.zeros((m + 1, n + 1))
        L[:m, :n] = self.A
        L[m, n] = 1.0
        return epi.preimage(L)

    def _route(self):
        if self.inner.polar_epigraph() is not None:
            return "lp"
        if self._rank == self.A.shape[0]:
            return "full_row_rank"
        if isinstance(self.inner, Norm) and self.inner.kind == "two":
            return "min_norm"
        raise UnsupportedGaugeError(
            "polar of %r composed with a rank-deficient map is not supported" % (self.inner,))

    def _solve_u(self, y):
        """Minimising ``u`` (or ``None`` with value ``inf`` when infeasible)."""
        route = self._route()
        A = self.A
        if route == "lp":
            pe = self.inner.polar_epigraph()
            m = self.inner.dim
            # variables (u, s, aux): min s  s.t.  (u, s) in polar epi,  A' u = y
            width = pe.G.shape[1]
            link = np.zeros((self.dim, width))
            link[:, :m] = A.T
            E = np.vstack([pe.E, link])
            f = np.concatenate([pe.f, y])
            c = np.zeros(width)
            c[m] = 1.0
            res = solve_lp(LpProblem(c, A_ub=pe.G, b_ub=pe.h, A_eq=E, b_eq=f, bounds=FREE))
            if res.status == "infeasible":
                return math.inf, None
            if res.status != "optimal":
                raise RuntimeError("composition LP: %s" % res.status)
            return max(0.0, res.value), res.x[:m]
        if route == "full_row_rank":
            u = np.linalg.solve(A @ A.T, A @ y)
        else:
            # minimise ||u / w|| subject to A' u = y with u = w * v
            w = self.inner.weights
            u = w * np.linalg.lstsq(A.T * w[None, :], y, rcond=None)[0]
        scale = 1.0 + np.abs(y).max(initial=0.0)
        if np.abs(A.T @ u - y).max(initial=0.0) > 1e-9 * scale:
            return math.inf, None
        return self.inner.polar(u), u

    def polar(self, y):
        return self._solve_u(self._vec(y))[0]

    def polar_subgradient(self, y):
        y = self._vec(y)
        if self._route() == "lp":
            # maximiser of sup { <y, x> : kappa(A x) <= 1 } via the lifted epigraph
            return Gauge.polar_subgradient(self, y)
        val, u = self._solve_u(y)
        if math.isinf(val):
            raise InfinitePolarError("polar is +inf at this point")
        # the inner maximiser lies in the range of A in both closed-form routes
        z = self.inner.polar_subgradient(u)
        return np.linalg.lstsq(self.A, z, rcond=None)[0]

    def __repr__(self):
        return "Composed(%r, A%s)" % (self.inner, self.A.shape)


# ---------------------------------------------------------------------------
# Lovasz extension


class Lovasz(Gauge):
    """Lovasz extension of a submodular, non-decreasing ``f`` with ``f(empty) = 0``.

    Restricted to the nonnegative orthant (``+inf`` elsewhere). The polar
    is ``max(0, max_{A nonempty} <y, 1_A> / f(A))`` by enumeration, with
    ``+inf`` if some ``f(A) = 0`` while ``<y, 1_A> > 0``.

    Parameters
    ----------
    f : callable, mapping or array_like
        Set function. A callable receives a ``frozenset`` of indices; a
        mapping is keyed by frozensets or tuples (missing keys are an
        error); an array is indexed by bitmask.
    n : int
        Ground-set size, at most 12.
    """

    MAX_GROUND = 12

    def __init__(self, f, n):
        n = int(n)
        if n < 1 or n > self.MAX_GROUND:
            raise ValueError("ground set size must be in 1..%d" % self.MAX_GROUND)
        self.dim = n
        masks = np.arange(1 << n)
        self._bits = ((masks[:, None] >> np.arange(n)[None, :]) & 1).astype(float)
        self.table = self._tabulate(f, n)
        self.table.setflags(write=False)
        self._validate()

    @staticmethod
    def _tabulate(f, n):
        size = 1 << n
        if callable(f):
            return np.array([float(f(frozenset(i for i in range(n) if m >> i & 1)))
                             for m in range(size)])
        if isinstance(f, dict):
            out = np.empty(size)
            norm = {frozenset(k): float(v) for k, v in f.items()}
            for m in range(size):
                key = frozenset(i for i in range(n) if m >> i & 1)
                if key not in norm:
                    raise ValueError("set function missing value for %s" % sorted(key))
                out[m] = norm[key]
            return out
        arr = np.asarray(f, dtype=float).reshape(-1)
        if arr.size != size:
            raise ValueError("table needs %d entries, got %d" % (size, arr.size))
        return arr.copy()

    def _validate(self, tol=1e-12):
        t, n = self.table, self.dim
        if not np.all(np.isfinite(t)):
            raise ValueError("set function must be finite")
        if abs(t[0]) > tol:
            raise ValueError("set function must vanish on the empty set")
        masks = np.arange(1 << n)
        for i in range(n):
            without = masks[(masks >> i & 1) == 0]
            if np.any(t[without] > t[without | (1 << i)] + tol):
                raise ValueError("set function must be non-decreasing")
        # submodularity on all pairs: f(A) + f(B) >= f(A | B) + f(A & B)
        Am, Bm = np.meshgrid(masks, masks, indexing="ij")
        gap = t[Am] + t[Bm] - t[Am | Bm] - t[Am & Bm]
        if np.any(gap < -tol * (1.0 + np.abs(t).max())):
            raise ValueError("set function is not submodular")

    def evaluate(self, x):
        x = self._vec(x)
        if np.any(x < -_HOMOG_TOL * (1.0 + np.abs(x).max())):
            return math.inf
        x = np.maximum(x, 0.0)
        order = np.argsort(-x, kind="stable")
        masks = np.cumsum(1 << order)
        fvals = self.table[masks]
        incr = np.diff(np.concatenate([[0.0], fvals]))
        return max(0.0, float(incr @ x[order]))

    def _ratios(self, y):
        s = self._bits[1:] @ y
        fA = self.table[1:]
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.where(fA > 0, s / np.where(fA > 0, fA, 1.0),
                         np.where(s > 0, math.inf, -math.inf))
        return r

    def polar(self, y):
        r = self._ratios(self._vec(y))
        return max(0.0, float(r.max()))

    def polar_subgradient(self, y):
        r = self._ratios(self._vec(y))
        j = int(np.argmax(r))
        if math.isinf(r[j]):
            raise InfinitePolarError("polar is +inf: a zero-valued set has positive mass")
        if r[j] <= 0:
            return np.zeros(self.dim)
        return self._bits[j + 1] / self.table[j + 1]

    def polar_epigraph(self):
        n = self.dim
        B = self._bits[1:]
        fA = self.table[1:]
        # (y, s): <1_A, y> - f(A) s <= 0 for all nonempty A,  -s <= 0
        G = np.vstack([np.hstack([B, -fA[:, None]]),
                       np.concatenate([np.zeros(n), [-1.0]])[None, :]])
        return Polyhedron.build(n + 1, G=G, h=np.zeros(G.shape[0]))

    def epigraph(self):
        return polar_epigraph(self.polar_epigraph(), self.dim)

    def __repr__(self):
        return "Lovasz(n=%d)" % self.dim


# ---------------------------------------------------------------------------
# indicator of an epigraph


class EpigraphIndicator(Gauge):
    """Indicator of ``epi rho = {(r, tau) : rho(r) <= tau}``.

    Its polar is the indicator of ``{(r, alpha) : rho_polar(r) <= -alpha}``.
    """

    def __init__(self, rho):
        self.rho = rho
        self.dim = rho.dim + 1
        self.closed = rho.closed

    def evaluate(self, x):
        x = self._vec(x)
        r, tau = x[:-1], x[-1]
        v = self.rho.evaluate(r)
        return 0.0 if v <= tau + 1e-9 * (1.0 + abs(tau)) else math.inf

    def polar(self, y):
        y = self._vec(y)
        r, alpha = y[:-1], y[-1]
        v = self.rho.polar(r)
        return 0.0 if v <= -alpha + 1e-9 * (1.0 + abs(alpha)) else math.inf

    def polar_subgradient(self, y):
        if math.isinf(self.polar(y)):
            raise InfinitePolarError("polar is +inf at this point")
        return np.zeros(self.dim)

    def epigraph(self):
        epi = self.rho.epigraph()
        if epi is None:
            return None
        m, k = self.rho.dim, epi.n_aux
        # variables (r, tau, t, w): rho-epigraph rows on (r, tau, w), -t <= 0
        def widen(M):
            return np.hstack([M[:, :m + 1], np.zeros((M.shape[0], 1)), M[:, m + 1:]])
        t_row = np.zeros((1, m + 2 + k))
        t_row[0, m + 1] = -1.0
        G = np.vstack([widen(epi.G), t_row])
        E = widen(epi.E)
        return Polyhedron.build(m + 2, G=G, h=np.zeros(G.shape[0]), E=E, f=np.zeros(E.shape[0]))

    def __repr__(self):
        return "EpigraphIndicator(%r)" % (self.rho,)


class _Restricted(Gauge):
    """``kappa(x) + indicator_K(x)``; polar evaluated through an LP.

    Used for conic side constraints, where the polar is
    ``inf { kappa_polar(z) : z - y in ... }`` in general; here only the
    polyhedral case is needed.
    """

    def __init__(self, inner, cone):
        if cone.dim != inner.dim:
            raise DimensionError("cone dimension mismatch")
        self.inner = inner
        self.cone = cone
        self.dim = inner.dim
        self.closed = inner.closed

    def evaluate(self, x):
        x = self._vec(x)
        if not self.cone.contains(x, tol=1e-9):
            return math.inf
        return self.inner.evaluate(x)

    def epigraph(self):
        epi = self.inner.epigraph()
        P = self.cone.polyhedron()
        if epi is None or P is None:
            return None
        n = self.dim
        L = np.zeros((n, n + 1))
        L[:, :n] = np.eye(n)
        return epi.intersect(P.preimage(L))


# ---------------------------------------------------------------------------
# free functions


def check_polar_inequality(g, x, y):
    """``<x, y> <= kappa(x) kappa_polar(y)`` up to ``1e-9 (1 + |<x, y>|)``.

    Infinite values satisfy the inequality vacuously.
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    ip = float(x @ y)
    kx, ky = g.evaluate(x), g.polar(y)
    if math.isinf(kx) or math.isinf(ky):
        return True
    return ip <= kx * ky + 1e-9 * (1.0 + abs(ip))


def polar_gauge(g):
    """The polar as a :class:`Gauge` object, built without closed forms.

    Norms map to dual norms and atomic gauges to support functions (and
    back). Any other polyhedral gauge maps to a gauge carried by the LP-dual
    epigraph, so evaluating the result twice exercises a route independent
    of the closed-form polars.
    """
    if isinstance(g, Norm):
        return Norm(_DUAL_KIND[g.kind], g.dim, weights=1.0 / g.weights)
    if isinstance(g, Atomic):
        return Support(g.atoms)
    if isinstance(g, Support):
        return Atomic(g.points)
    pe = g.polar_epigraph()
    if pe is None:
        raise UnsupportedGaugeError("no polar gauge object for %r" % (g,))
    return _EpigraphGauge(pe, g.dim, label="polar of %r" % (g,))


def minkowski_of_set(D):
    """Gauge ``inf { lam >= 0 : x in lam D }`` of a set containing 0 in ``conv({0} U D)``.

    Origin-centred balls of a norm map to rescaled norms and point hulls
    to atomic gauges. Any other polyhedral descriptor gives an LP gauge
    over the homogenised description ``{(x, t) : x in t D, t >= 0}``,
    i.e. the gauge of ``conv({0} U D)`` up to closure.
    """
    from . import sets as S

    if isinstance(D, S.GaugeBallTranslate) and not np.any(D.b) and D.sigma > 0:
        rho = D.rho
        if isinstance(rho, Norm):
            return Norm(rho.kind, rho.dim, weights=rho.weights / D.sigma)
    if isinstance(D, S.Hull):
        return Atomic(D.points)
    P = D.polyhedron()
    if P is None:
        raise UnsupportedGaugeError("no Minkowski gauge for %r" % (D,))
    n, k = P.n, P.n_aux
    # variables (x, t, w): G[x; w] - t h <= 0, E[x; w] - t f = 0, -t <= 0
    G = np.vstack([
        np.hstack([P.G[:, :n], -P.h[:, None], P.G[:, n:]]),
        np.concatenate([np.zeros(n), [-1.0], np.zeros(k)])[None, :],
    ])
    E = np.hstack([P.E[:, :n], -P.f[:, None], P.E[:, n:]])
    epi = Polyhedron.build(n + 1, G=G, h=np.zeros(G.shape[0]), E=E, f=np.zeros(E.shape[0]))
    return _EpigraphGauge(epi, n, label="Minkowski gauge of %r" % (D,))

