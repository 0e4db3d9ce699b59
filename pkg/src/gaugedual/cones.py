"""Closed convex cones used as side constraints and in conic gauges.

PSD cones act on row-major vectorised ``n x n`` matrices, so the plain
Euclidean inner product of two vectors equals the trace inner product of
the matrices. The dual of the PSD cone in that space is
``{S : (S + S') / 2 is PSD}`` since skew parts pair to zero with
symmetric matrices.
"""

from __future__ import annotations

import math

import numpy as np

from .linalg import jacobi_eigen
from .polyhedra import Polyhedron

__all__ = [
    "ConeDescr",
    "FreeSpace",
    "NonnegOrthant",
    "PolyhedralCone",
    "PsdCone",
    "ZeroCone",
    "mat",
    "vec",
]


def vec(X):
    """Row-major vectorisation of a square matrix."""
    return np.asarray(X, dtype=float).reshape(-1)


def mat(x):
    """Inverse of :func:`vec`."""
    x = np.asarray(x, dtype=float)
    n = math.isqrt(x.size)
    if n * n != x.size:
        raise ValueError("vector of length %d is not a vectorised square matrix" % x.size)
    return x.reshape(n, n)


class ConeDescr:
    """Base class; subclasses define membership in ``K`` and ``K*``."""

    dim: int

    def contains(self, x, tol=1e-10):
        raise NotImplementedError

    def dual_contains(self, s, tol=1e-10):
        raise NotImplementedError

    def polyhedron(self):
        """``K`` as a :class:`Polyhedron`, or ``None`` if not polyhedral."""
        return None

    def dual_polyhedron(self):
        return None

    @property
    def is_polyhedral(self):
        return self.polyhedron() is not None

    def _check(self, x):
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.size != self.dim:
            raise ValueError("expected a vector of length %d, got %d" % (self.dim, x.size))
        return x

    def __repr__(self):
        return "%s(%d)" % (type(self).__name__, self.dim)


class NonnegOrthant(ConeDescr):
    def __init__(self, n):
        self.dim = int(n)

    def contains(self, x, tol=1e-10):
        x = self._check(x)
        return bool(np.all(x >= -tol * (1.0 + np.abs(x).max(initial=0.0))))

    def dual_contains(self, s, tol=1e-10):
        return self.contains(s, tol)

    def polyhedron(self):
        return Polyhedron.build(self.dim, G=-np.eye(self.dim), h=np.zeros(self.dim))

    def dual_polyhedron(self):
        return self.polyhedron()

    def sample(self, rng):
        return np.abs(rng.standard_normal(self.dim))


class ZeroCone(ConeDescr):
    def __init__(self, n):
        self.dim = int(n)

    def contains(self, x, tol=1e-10):
        x = self._check(x)
        return bool(np.all(np.abs(x) <= tol))

    def dual_contains(self, s, tol=1e-10):
        self._check(s)
        return True

    def polyhedron(self):
        return Polyhedron.build(self.dim, E=np.eye(self.dim), f=np.zeros(self.dim))

    def dual_polyhedron(self):
        return Polyhedron.whole_space(self.dim)

    def sample(self, rng):
        return np.zeros(self.dim)


class FreeSpace(ConeDescr):
    def __init__(self, n):
        self.dim = int(n)

    def contains(self, x, tol=1e-10):
        self._check(x)
        return True

    def dual_contains(self, s, tol=1e-10):
        s = self._check(s)
        return bool(np.all(np.abs(s) <= tol))

    def polyhedron(self):
        return Polyhedron.whole_space(self.dim)

    def dual_polyhedron(self):
        return Polyhedron.build(self.dim, E=np.eye(self.dim), f=np.zeros(self.dim))

    def sample(self, rng):
        return rng.standard_normal(self.dim)


class PolyhedralCone(ConeDescr):
    """``cone(R[:, 0], ..., R[:, r-1])`` for a generator matrix ``R``."""

    def __init__(self, generators):
        R = np.atleast_2d(np.asarray(generators, dtype=float))
        self.generators = R
        self.dim = R.shape[0]

    def contains(self, x, tol=1e-10):
        x = self._check(x)
        return self.polyhedron().contains(x, tol)

    def dual_contains(self, s, tol=1e-10):
        s = self._check(s)
        v = self.generators.T @ s
        return bool(np.all(v >= -tol * (1.0 + np.abs(v).max(initial=0.0))))

    def polyhedron(self):
        n, r = self.generators.shape
        # x - R lam = 0, lam >= 0
        E = np.hstack([np.eye(n), -self.generators])
        G = np.hstack([np.zeros((r, n)), -np.eye(r)])
        return Polyhedron.build(n, G=G, h=np.zeros(r), E=E, f=np.zeros(n))

    def dual_polyhedron(self):
        return Polyhedron.build(self.dim, G=-self.generators.T,
                                h=np.zeros(self.generators.shape[1]))

    def sample(self, rng):
        return self.generators @ np.abs(rng.standard_normal(self.generators.shape[1]))

    def __repr__(self):
        return "PolyhedralCone(%d generators in R^%d)" % (self.generators.shape[1], self.dim)


class PsdCone(ConeDescr):
    """Symmetric PSD ``n x n`` matrices, vectorised (``dim = n * n``)."""

    def __init__(self, order):
        self.order = int(order)
        self.dim = self.order ** 2

    def contains(self, x, tol=1e-10):
        X = mat(self._check(x))
        scale = 1.0 + np.linalg.norm(X)
        if np.max(np.abs(X - X.T), initial=0.0) > tol * scale:
            return False
        w, _ = jacobi_eigen(0.5 * (X + X.T))
        return bool(w[-1] >= -tol * scale)

    def dual_contains(self, s, tol=1e-10):
        S = mat(self._check(s))
        S = 0.5 * (S + S.T)
        w, _ = jacobi_eigen(S)
        return bool(w[-1] >= -tol * (1.0 + np.linalg.norm(S)))

    def sample(self, rng):
        B = rng.standard_normal((self.order, self.order))
        return vec(B @ B.T)

    def __repr__(self):
        return "PsdCone(order=%d)" % self.order
