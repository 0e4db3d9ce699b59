"""Symbolic convex-set descriptors.

Every descriptor answers membership within a tolerance and, where it can,
the linear infimum ``inf { <y, x> : x in S }`` and a lifted
:class:`~gaugedual.polyhedra.Polyhedron`. These three handles are what the
antipolar calculus composes.
"""

from __future__ import annotations

import math

import numpy as np

from .cones import ConeDescr, NonnegOrthant, PsdCone, ZeroCone
from .gauges import Gauge, InfinitePolarError
from .polyhedra import FREE, Polyhedron
from .linalg import LpProblem, solve_lp

TOL = 1e-9


class UnsupportedSetError(NotImplementedError):
    """Raised when a query is undecidable for a descriptor combination."""


def _arr(v):
    return np.atleast_1d(np.asarray(v, dtype=float)).reshape(-1)


def _mat(A):
    return np.atleast_2d(np.asarray(getattr(A, "matrix", A), dtype=float))


class ConvexSet:
    dim: int
    closed_convex = True

    def _vec(self, x):
        x = _arr(x)
        if x.size != self.dim:
            raise ValueError("%s lives in R^%d, got a point of length %d"
                             % (type(self).__name__, self.dim, x.size))
        return x

    def contains(self, x, tol=TOL):
        P = self.polyhedron()
        if P is None:
            raise UnsupportedSetError("membership undecidable for %r" % (self,))
        return P.contains(self._vec(x), tol)

    def inf_linear(self, y):
        """``inf { <y, x> : x in S }`` (``-inf`` if unbounded, ``+inf`` if empty)."""
        P = self.polyhedron()
        if P is None:
            raise UnsupportedSetError("linear infimum unavailable for %r" % (self,))
        return P.minimize(self._vec(y))[0]

    def polyhedron(self):
        return None

    def sample(self, rng, count):
        P = self.polyhedron()
        if P is None:
            raise UnsupportedSetError("cannot sample %r" % (self,))
        return sample_polyhedron(P, rng, count)

    def __contains__(self, x):
        return self.contains(x)


# ---------------------------------------------------------------------------
# primitive descriptors


class Halfspace(ConvexSet):
    """``{x : <a, x> >= beta}``."""

    def __init__(self, a, beta):
        self.a = _arr(a)
        if not np.any(self.a):
            raise ValueError("halfspace normal must be nonzero")
        self.beta = float(beta)
        self.dim = self.a.size

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        return float(self.a @ x) >= self.beta - tol * (1.0 + abs(self.beta) + np.abs(self.a) @ np.abs(x))

    def inf_linear(self, y):
        y = self._vec(y)
        lam = float(y @ self.a) / float(self.a @ self.a)
        if lam < 0 or np.abs(y - lam * self.a).max() > 1e-12 * (1.0 + np.abs(y).max()):
            return -math.inf
        return lam * self.beta

    def polyhedron(self):
        return Polyhedron.build(self.dim, G=-self.a[None, :], h=[-self.beta])

    def sample(self, rng, count):
        X = rng.standard_normal((count, self.dim)) * 2.0
        gap = self.beta - X @ self.a
        lift = np.maximum(gap, 0.0) + rng.exponential(0.5, size=count)
        return X + np.outer(lift / (self.a @ self.a), self.a)

    def __repr__(self):
        return "Halfspace(a=%s, beta=%g)" % (self.a.tolist(), self.beta)


class Ray(ConvexSet):
    """``{lam d : lam >= 1}``."""

    def __init__(self, d):
        self.d = _arr(d)
        if not np.any(self.d):
            raise ValueError("ray direction must be nonzero")
        self.dim = self.d.size

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        lam = float(x @ self.d) / float(self.d @ self.d)
        scale = 1.0 + np.abs(x).max()
        return lam >= 1.0 - tol * scale and np.abs(x - lam * self.d).max() <= tol * scale

    def inf_linear(self, y):
        s = float(self._vec(y) @ self.d)
        return s if s >= 0 else -math.inf

    def polyhedron(self):
        n = self.dim
        E = np.hstack([np.eye(n), -self.d[:, None]])
        G = np.concatenate([np.zeros(n), [-1.0]])[None, :]
        return Polyhedron.build(n, G=G, h=[-1.0], E=E, f=np.zeros(n))

    def sample(self, rng, count):
        return np.outer(1.0 + rng.exponential(1.0, size=count), self.d)

    def __repr__(self):
        return "Ray(d=%s)" % self.d.tolist()


class Hull(ConvexSet):
    """Convex hull of the columns of ``points``."""

    def __init__(self, points):
        P = np.asarray(points, dtype=float)
        if P.ndim != 2 or P.shape[1] == 0:
            raise ValueError("points must be a (dim, count) array")
        self.points = P
        self.dim = P.shape[0]

    def inf_linear(self, y):
        return float(np.min(self.points.T @ self._vec(y)))

    def polyhedron(self):
        n, k = self.points.shape
        E = np.vstack([np.hstack([np.eye(n), -self.points]),
                       np.concatenate([np.zeros(n), np.ones(k)])[None, :]])
        G = np.hstack([np.zeros((k, n)), -np.eye(k)])
        return Polyhedron.build(n, G=G, h=np.zeros(k), E=E, f=np.concatenate([np.zeros(n), [1.0]]))

    def sample(self, rng, count):
        W = rng.dirichlet(np.ones(self.points.shape[1]), size=count)
        return W @ self.points.T

    def __repr__(self):
        return "Hull(%d points in R^%d)" % (self.points.shape[1], self.dim)


class GaugeBallTranslate(ConvexSet):
    """``{x : rho(b - x) <= sigma}``."""

    def __init__(self, rho, b, sigma):
        if not isinstance(rho, Gauge):
            raise TypeError("rho must be a Gauge")
        self.rho = rho
        self.b = _arr(b)
        if self.b.size != rho.dim:
            raise ValueError("b has length %d, rho acts on R^%d" % (self.b.size, rho.dim))
        self.sigma = float(sigma)
        if self.sigma < 0:
            raise ValueError("sigma must be nonnegative")
        self.dim = rho.dim

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        return self.rho.evaluate(self.b - x) <= self.sigma + tol * (1.0 + self.sigma + np.abs(x).max())

    def inf_linear(self, y):
        y = self._vec(y)
        if self.sigma == 0:
            return float(y @ self.b)
        p = self.rho.polar(y)
        if math.isinf(p):
            return -math.inf
        return float(y @ self.b) - self.sigma * p

    def polyhedron(self):
        n = self.dim
        if self.sigma == 0:
            # rho vanishes only at the origin, so the set is the point b
            return Polyhedron.build(n, E=np.eye(n), f=self.b)
        epi = self.rho.epigraph()
        if epi is None:
            return None
        # (b - x, sigma) in epi
        L = np.zeros((n + 1, n))
        L[:n] = -np.eye(n)
        return epi.preimage(L, np.concatenate([self.b, [self.sigma]]))

    def sample(self, rng, count, shrink=0.95):
        out = np.empty((count, self.dim))
        for i in range(count):
            r = rng.standard_normal(self.dim)
            v = self.rho.evaluate(r)
            out[i] = self.b - r * (self.sigma * shrink * rng.uniform() ** (1.0 / self.dim) / v)
        return out

    def __repr__(self):
        return "GaugeBallTranslate(%r, b=%s, sigma=%g)" % (self.rho, self.b.tolist(), self.sigma)


class Affine(ConvexSet):
    """``{x : A x = b}``."""

    def __init__(self, A, b):
        self.A = _mat(A)
        self.b = _arr(b)
        if self.A.shape[0] != self.b.size:
            raise ValueError("A has %d rows but b has length %d" % (self.A.shape[0], self.b.size))
        self.dim = self.A.shape[1]

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        r = self.A @ x - self.b
        return bool(np.abs(r).max(initial=0.0) <= tol * (1.0 + np.abs(self.b).max(initial=0.0)
                                                        + np.abs(x).max()))

    def _particular(self):
        x0 = np.linalg.lstsq(self.A, self.b, rcond=None)[0]
        if not self.contains(x0, tol=1e-10):
            return None
        return x0

    def inf_linear(self, y):
        y = self._vec(y)
        x0 = self._particular()
        if x0 is None:
            return math.inf
        z = np.linalg.lstsq(self.A.T, y, rcond=None)[0]
        if np.abs(self.A.T @ z - y).max() > 1e-10 * (1.0 + np.abs(y).max()):
            return -math.inf
        return float(y @ x0)

    def polyhedron(self):
        return Polyhedron.build(self.dim, E=self.A, f=self.b)

    def sample(self, rng, count):
        x0 = self._particular()
        if x0 is None:
            raise ValueError("empty affine set")
        _, s, Vt = np.linalg.svd(self.A)
        rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
        N = Vt[rank:].T
        return x0 + (rng.standard_normal((count, N.shape[1])) * 2.0) @ N.T

    def __repr__(self):
        return "Affine(A%s, b=%s)" % (self.A.shape, self.b.tolist())


class ConeTranslate(ConvexSet):
    """``b + K``."""

    def __init__(self, b, cone):
        if not isinstance(cone, ConeDescr):
            raise TypeError("cone must be a ConeDescr")
        self.b = _arr(b)
        self.cone = cone
        if self.b.size != cone.dim:
            raise ValueError("b has length %d, cone lives in R^%d" % (self.b.size, cone.dim))
        self.dim = cone.dim

    def contains(self, x, tol=TOL):
        return self.cone.contains(self._vec(x) - self.b, tol)

    def inf_linear(self, y):
        y = self._vec(y)
        if not self.cone.dual_contains(y, tol=1e-12):
            return -math.inf
        return float(y @ self.b)

    def polyhedron(self):
        P = self.cone.polyhedron()
        return None if P is None else P.preimage(np.eye(self.dim), -self.b)

    def sample(self, rng, count):
        return np.array([self.b + self.cone.sample(rng) for _ in range(count)])

    def __repr__(self):
        return "ConeTranslate(b=%s, %r)" % (self.b.tolist(), self.cone)


class ConeSet(ConvexSet):
    """The cone ``K`` itself, or its dual ``K*`` when ``dual`` is set."""

    def __init__(self, cone, dual=False):
        self.cone = cone
        self.dual = bool(dual)
        self.dim = cone.dim

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        return self.cone.dual_contains(x, tol) if self.dual else self.cone.contains(x, tol)

    def inf_linear(self, y):
        y = self._vec(y)
        # the dual of K* is K itself (symmetric PSD matrices included)
        inside = self.cone.contains(y, tol=1e-12) if self.dual else self.cone.dual_contains(y, tol=1e-12)
        return 0.0 if inside else -math.inf

    def polyhedron(self):
        return self.cone.dual_polyhedron() if self.dual else self.cone.polyhedron()

    def sample(self, rng, count):
        if self.dual and not isinstance(self.cone, (NonnegOrthant, PsdCone, ZeroCone)):
            return super().sample(rng, count)
        if self.dual and isinstance(self.cone, ZeroCone):
            return rng.standard_normal((count, self.dim))
        return np.array([self.cone.sample(rng) for _ in range(count)])

    def __repr__(self):
        return "ConeSet(%r%s)" % (self.cone, ", dual" if self.dual else "")


class Superlevel(ConvexSet):
    """``{y : <b, y> - sigma rho_polar(y) >= 1}``.

    This is the antipolar of a gauge-ball translate ``{x : rho(b - x) <= sigma}``.
    """

    def __init__(self, rho, b, sigma):
        self.rho = rho
        self.b = _arr(b)
        self.sigma = float(sigma)
        self.dim = self.b.size

    def margin(self, y):
        p = self.rho.polar(y)
        return -math.inf if math.isinf(p) else float(self.b @ y) - self.sigma * p

    def margin_subgradient(self, y):
        return self.b - self.sigma * self.rho.polar_subgradient(y)

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        return self.margin(x) >= 1.0 - tol * (1.0 + np.abs(x).max())

    def inf_linear(self, x):
        """``sup { mu >= 0 : rho(mu b - x) <= mu sigma }`` when positive, else ``-inf``.

        By the homogeneity of the defining margin, the infimum of ``<x, y>``
        over the set equals the largest ``mu`` with ``x / mu`` in the
        gauge ball. ``phi(mu) = rho(mu b - x) - mu sigma`` is convex, so a
        golden-section minimisation followed by bisection to the right
        root finds it. Nonpositive values are reported as ``-inf`` since
        only the sign matters to callers.
        """
        x = self._vec(x)
        rho_b = self.rho.evaluate(self.b)
        if not np.any(x):
            return 0.0
        rho_x = self.rho.evaluate(-x)

        def phi(mu):
            return self.rho.evaluate(mu * self.b - x) - mu * self.sigma

        hi = rho_x / (rho_b - self.sigma) * (1.0 + 1e-9) + 1e-300
        lo, up = 0.0, hi
        g = (math.sqrt(5.0) - 1.0) / 2.0
        a, c = up - g * (up - lo), lo + g * (up - lo)
        fa, fc = phi(a), phi(c)
        for _ in range(200):
            if fa <= fc:
                up, c, fc = c, a, fa
                a = up - g * (up - lo)
                fa = phi(a)
            else:
                lo, a, fa = a, c, fc
                c = lo + g * (up - lo)
                fc = phi(c)
            if up - lo <= 1e-15 * (1.0 + hi):
                break
        mu_star = 0.5 * (lo + up)
        if phi(mu_star) > 1e-12 * (1.0 + rho_x):
            return -math.inf
        lo, up = mu_star, hi
        for _ in range(200):
            mid = 0.5 * (lo + up)
            if phi(mid) <= 0:
                lo = mid
            else:
                up = mid
            if up - lo <= 1e-15 * (1.0 + hi):
                break
        return lo if lo > 0 else -math.inf

    def polyhedron(self):
        pe = self.rho.polar_epigraph()
        if pe is None:
            return None
        n = self.dim
        # (y, s, aux) with (y, s) in epi rho_polar and <b, y> - sigma s >= 1
        row = np.zeros((1, pe.G.shape[1]))
        row[0, :n] = -self.b
        row[0, n] = self.sigma
        G = np.vstack([pe.G, row])
        h = np.concatenate([pe.h, [-1.0]])
        # project out s: it becomes auxiliary
        return _reorder_aux(Polyhedron(n + 1, G, h, pe.E, pe.f), n)

    def sample(self, rng, count):
        out = []
        tries = 0
        while len(out) < count:
            tries += 1
            if tries > 200 * count:
                raise RuntimeError("could not sample the superlevel set")
            y = rng.standard_normal(self.dim) + self.b / max(1e-12, np.linalg.norm(self.b))
            t = self.margin(y)
            if t > 1e-6:
                out.append(y / t * (1.0 + rng.exponential(0.5)))
        return np.array(out)

    def __repr__(self):
        return "Superlevel(%r, b=%s, sigma=%g)" % (self.rho, self.b.tolist(), self.sigma)


def _reorder_aux(P, n):
    """Treat the last ``P.n - n`` coordinates of the point as auxiliary."""
    return Polyhedron(n, P.G, P.h, P.E, P.f)


# ---------------------------------------------------------------------------
# compound descriptors


class Image(ConvexSet):
    """``{A x : x in inner}``."""

    closure_slack = 1e-7

    def __init__(self, A, inner):
        self.A = _mat(A)
        if self.A.shape[1] != inner.dim:
            raise ValueError("map has %d columns, inner set lives in R^%d" % (self.A.shape[1], inner.dim))
        self.inner = inner
        self.dim = self.A.shape[0]

    def polyhedron(self):
        P = self.inner.polyhedron()
        return None if P is None else P.image(self.A)

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        P = self.polyhedron()
        if P is not None:
            return P.contains(x, tol)
        A = self.A
        if np.linalg.matrix_rank(A) == A.shape[1]:
            u = np.linalg.lstsq(A, x, rcond=None)[0]
            if np.abs(A @ u - x).max() > tol * (1.0 + np.abs(x).max()):
                return False
            return self.inner.contains(u, tol)
        if hasattr(self.inner, "margin"):
            return _fiber_margin(self.inner, A, x) >= 1.0 - max(tol, self.closure_slack)
        raise UnsupportedSetError("membership in the image of %r is undecidable" % (self.inner,))

    def inf_linear(self, y):
        return self.inner.inf_linear(self.A.T @ self._vec(y))

    def sample(self, rng, count):
        return self.inner.sample(rng, count) @ self.A.T

    def __repr__(self):
        return "Image(A%s, %r)" % (self.A.shape, self.inner)


def _fiber_margin(S, A, x, iters=4000):
    """Approximate ``sup { margin(u) : A u = x }`` by projected subgradient ascent."""
    u0 = np.linalg.lstsq(A, x, rcond=None)[0]
    if np.abs(A @ u0 - x).max() > 1e-9 * (1.0 + np.abs(x).max()):
        return -math.inf
    _, s, Vt = np.linalg.svd(A)
    rank = int(np.sum(s > 1e-12 * max(1.0, s.max(initial=0.0))))
    N = Vt[rank:].T
    if N.shape[1] == 0:
        return S.margin(u0)
    z = np.zeros(N.shape[1])
    best = S.margin(u0)
    scale = 1.0 + np.linalg.norm(u0)
    for k in range(1, iters + 1):
        u = u0 + N @ z
        try:
            g = N.T @ S.margin_subgradient(u)
        except InfinitePolarError:
            g = -z
        ng = np.linalg.norm(g)
        if ng == 0:
            break
        z = z + (scale / math.sqrt(k)) * g / ng
        best = max(best, S.margin(u0 + N @ z))
    return best


class Preimage(ConvexSet):
    """``{x : A x in inner}``.

    ``ri_certified`` records a caller declaration that the relative
    interior of ``inner`` meets the range of ``A``, which makes the
    antipolar of the preimage closed without being polyhedral.
    """

    def __init__(self, A, inner, ri_certified=False):
        self.A = _mat(A)
        if self.A.shape[0] != inner.dim:
            raise ValueError("map has %d rows, inner set lives in R^%d" % (self.A.shape[0], inner.dim))
        self.inner = inner
        self.ri_certified = bool(ri_certified)
        self.dim = self.A.shape[1]

    def contains(self, x, tol=TOL):
        return self.inner.contains(self.A @ self._vec(x), tol)

    def polyhedron(self):
        P = self.inner.polyhedron()
        return None if P is None else P.preimage(self.A)

    def inf_linear(self, y):
        y = self._vec(y)
        if self.polyhedron() is not None:
            return super().inf_linear(y)
        A = self.A
        if np.linalg.matrix_rank(A) == A.shape[0]:
            u = np.linalg.lstsq(A.T, y, rcond=None)[0]
            if np.abs(A.T @ u - y).max() > 1e-10 * (1.0 + np.abs(y).max()):
                return -math.inf
            return self.inner.inf_linear(u)
        raise UnsupportedSetError("linear infimum over the preimage of %r" % (self.inner,))

    def sample(self, rng, count):
        if self.polyhedron() is not None:
            return super().sample(rng, count)
        A = self.A
        if A.shape[0] == A.shape[1] and np.linalg.matrix_rank(A) == A.shape[0]:
            return np.linalg.solve(A, self.inner.sample(rng, count).T).T
        raise UnsupportedSetError("cannot sample the preimage of %r" % (self.inner,))

    def __repr__(self):
        return "Preimage(A%s, %r)" % (self.A.shape, self.inner)


class Union(ConvexSet):
    """Union of sets; antipolar results refer to its closed convex hull."""

    closed_convex = False
    hull_note = "the antipolar of a union equals that of its closed convex hull"

    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ValueError("empty union")
        self.dim = self.parts[0].dim
        if any(p.dim != self.dim for p in self.parts):
            raise ValueError("dimension mismatch in union")

    def contains(self, x, tol=TOL):
        return any(p.contains(x, tol) for p in self.parts)

    def inf_linear(self, y):
        return min(p.inf_linear(y) for p in self.parts)

    def hull_polyhedron(self):
        Ps = [p.polyhedron() for p in self.parts]
        return None if any(P is None for P in Ps) else Polyhedron.hull_of_union(Ps)

    def sample(self, rng, count):
        idx = rng.integers(len(self.parts), size=count)
        out = np.empty((count, self.dim))
        for j, p in enumerate(self.parts):
            sel = np.flatnonzero(idx == j)
            if sel.size:
                out[sel] = p.sample(rng, sel.size)
        return out

    def __repr__(self):
        return "Union(%s)" % ", ".join(repr(p) for p in self.parts)


class Intersection(ConvexSet):
    def __init__(self, parts):
        self.parts = list(parts)
        if not self.parts:
            raise ValueError("empty intersection")
        self.dim = self.parts[0].dim
        if any(p.dim != self.dim for p in self.parts):
            raise ValueError("dimension mismatch in intersection")

    def contains(self, x, tol=TOL):
        return all(p.contains(x, tol) for p in self.parts)

    def polyhedron(self):
        Ps = [p.polyhedron() for p in self.parts]
        if any(P is None for P in Ps):
            return None
        out = Ps[0]
        for P in Ps[1:]:
            out = out.intersect(P)
        return out

    def sample(self, rng, count):
        if self.polyhedron() is not None:
            return super().sample(rng, count)
        out = []
        for _ in range(200):
            for x in self.parts[0].sample(rng, count):
                if all(p.contains(x) for p in self.parts[1:]):
                    out.append(x)
            if len(out) >= count:
                return np.array(out[:count])
        raise UnsupportedSetError("rejection sampling of %r failed" % (self,))

    def __repr__(self):
        return "Intersection(%s)" % ", ".join(repr(p) for p in self.parts)


class HullOfUnion(ConvexSet):
    """``cl conv(S_1 U ... U S_k)``."""

    def __init__(self, parts):
        self.parts = list(parts)
        self.dim = self.parts[0].dim

    def polyhedron(self):
        Ps = [p.polyhedron() for p in self.parts]
        return None if any(P is None for P in Ps) else Polyhedron.hull_of_union(Ps)

    def inf_linear(self, y):
        return min(p.inf_linear(y) for p in self.parts)

    def sample(self, rng, count):
        pts = [p.sample(rng, count) for p in self.parts]
        W = rng.dirichlet(np.ones(len(pts)), size=count)
        return sum(W[:, [j]] * pts[j] for j in range(len(pts)))

    def __repr__(self):
        return "HullOfUnion(%s)" % ", ".join(repr(p) for p in self.parts)


class ScaledUp(ConvexSet):
    """``union_{lam >= 1} lam S``."""

    def __init__(self, inner):
        self.inner = inner
        self.dim = inner.dim

    def polyhedron(self):
        P = self.inner.polyhedron()
        return None if P is None else P.scaled_up()

    def contains(self, x, tol=TOL):
        x = self._vec(x)
        P = self.polyhedron()
        if P is not None:
            return P.contains(x, tol)
        S = self.inner
        if isinstance(S, Preimage):
            # lam {x : A x in T} = {x : A x in lam T}
            return ScaledUp(S.inner).contains(S.A @ x, tol)
        if isinstance(S, GaugeBallTranslate):
            return _ball_scaled_contains(S, x, tol)
        raise UnsupportedSetError("membership in the scaled-up hull of %r" % (S,))

    def sample(self, rng, count):
        lam = 1.0 + rng.exponential(1.0, size=count)
        return self.inner.sample(rng, count) * lam[:, None]

    def __repr__(self):
        return "ScaledUp(%r)" % (self.inner,)


def _ball_scaled_contains(S, x, tol):
    """Is ``min_{lam >= 1} rho(lam b - x) - lam sigma <= 0``?"""
    rho, b, sigma = S.rho, S.b, S.sigma

    def psi(lam):
        return rho.evaluate(lam * b - x) - lam * sigma

    rho_b = rho.evaluate(b)
    top = max(1.0, rho.evaluate(-x) / (rho_b - sigma) * (1.0 + 1e-9))
    lo, up = 1.0, top
    g = (math.sqrt(5.0) - 1.0) / 2.0
    best = min(psi(lo), psi(up))
    a, c = up - g * (up - lo), lo + g * (up - lo)
    fa, fc = psi(a), psi(c)
    for _ in range(200):
        best = min(best, fa, fc)
        if fa <= fc:
            up, c, fc = c, a, fa
            a = up - g * (up - lo)
            fa = psi(a)
        else:
            lo, a, fa = a, c, fc
            c = lo + g * (up - lo)
            fc = psi(c)
        if up - lo <= 1e-14 * top:
            break
    best = min(best, fa, fc)
    return best <= tol * (1.0 + sigma + np.abs(x).max())


class GenericAntipolar(ConvexSet):
    """``{y : <y, x> >= 1 for all x in S}`` straight from the definition."""

    def __init__(self, source):
        self.source = source
        self.dim = source.dim

    def contains(self, y, tol=TOL):
        y = self._vec(y)
        P = self.polyhedron()
        if P is not None:
            return P.contains(y, tol)
        return self.source.inf_linear(y) >= 1.0 - tol * (1.0 + np.abs(y).max())

    def polyhedron(self):
        src = self.source
        P = src.hull_polyhedron() if isinstance(src, Union) else src.polyhedron()
        return None if P is None else antipolar_polyhedron(P)

    def __repr__(self):
        return "GenericAntipolar(%r)" % (self.source,)


def antipolar_polyhedron(P):
    """Lifted description of ``{y : inf_{x in P} <y, x> >= 1}`` for nonempty ``P``.

    LP duality: the infimum equals ``max -h' lam - f' mu`` over
    ``lam >= 0`` with ``Gx' lam + Ex' mu = -y`` and ``Gw' lam + Ew' mu = 0``.
    """
    n, k = P.n, P.n_aux
    Gx, Gw, Ex, Ew = P.G[:, :n], P.G[:, n:], P.E[:, :n], P.E[:, n:]
    p, q = Gx.shape[0], Ex.shape[0]
    width = n + p + q
    E1 = np.hstack([np.eye(n), Gx.T, Ex.T])
    E2 = np.hstack([np.zeros((k, n)), Gw.T, Ew.T])
    G1 = np.concatenate([np.zeros(n), P.h, P.f])[None, :]
    G2 = np.hstack([np.zeros((p, n)), -np.eye(p), np.zeros((p, q))])
    G = np.vstack([G1, G2]).reshape(-1, width)
    h = np.concatenate([[-1.0], np.zeros(p)])
    return Polyhedron(n, G, h, np.vstack([E1, E2]).reshape(-1, width), np.zeros(n + k))


# ---------------------------------------------------------------------------
# sampling


def sample_polyhedron(P, rng, count, box=10.0, vertices=12):
    """Random points of ``P`` intersected with a box.

    Vertices of the boxed polyhedron are found by LPs with random
    objectives, then mixed with Dirichlet weights.
    """
    n = P.n
    width = P.G.shape[1]
    G_box = np.hstack([np.vstack([np.eye(n), -np.eye(n)]), np.zeros((2 * n, width - n))])
    G = np.vstack([P.G, G_box])
    h = np.concatenate([P.h, np.full(2 * n, box)])
    pts = []
    for _ in range(vertices):
        c = np.concatenate([rng.standard_normal(n), np.zeros(width - n)])
        res = solve_lp(LpProblem(c, A_ub=G, b_ub=h, A_eq=P.E, b_eq=P.f, bounds=FREE))
        if res.status != "optimal":
            raise UnsupportedSetError("set is empty inside the sampling box")
        pts.append(res.x[:n])
    V = np.array(pts)
    W = rng.dirichlet(np.full(len(V), 0.5), size=count)
    return W @ V
