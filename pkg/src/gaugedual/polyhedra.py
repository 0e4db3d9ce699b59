"""Lifted polyhedra ``{x : exists w, G[x; w] <= h, E[x; w] = f}``.

Every polyhedral gauge epigraph and polyhedral set descriptor in the
package is carried in this form so that images, preimages, intersections
and convex hulls of unions compose without enumerating vertices. All
queries go through :func:`gaugedual.linalg.solve_lp`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import LpProblem, solve_lp

FREE = (None, None)


def _as2d(M, ncols):
    if M is None:
        return np.zeros((0, ncols))
    M = np.asarray(M, dtype=float)
    return M.reshape(-1, ncols)


@dataclass(frozen=True)
class Polyhedron:
    """``{x in R^n : exists w in R^k, G [x; w] <= h, E [x; w] = f}``.

    ``G`` and ``E`` have ``n + k`` columns; auxiliary variables are free.
    """

    n: int
    G: np.ndarray
    h: np.ndarray
    E: np.ndarray
    f: np.ndarray

    @classmethod
    def build(cls, n, G=None, h=None, E=None, f=None, n_aux=None):
        if n_aux is None:
            width = None
            for M in (G, E):
                if M is not None and np.asarray(M).size:
                    width = np.asarray(M).reshape(np.asarray(M).shape[0], -1).shape[1]
                    break
            n_aux = 0 if width is None else width - n
        ncols = n + n_aux
        G = _as2d(G, ncols)
        E = _as2d(E, ncols)
        h = np.zeros(G.shape[0]) if h is None else np.atleast_1d(np.asarray(h, dtype=float))
        f = np.zeros(E.shape[0]) if f is None else np.atleast_1d(np.asarray(f, dtype=float))
        if h.shape != (G.shape[0],) or f.shape != (E.shape[0],):
            raise ValueError("right-hand sides do not match constraint rows")
        return cls(n, G, h, E, f)

    @classmethod
    def whole_space(cls, n):
        return cls.build(n, n_aux=0)

    @property
    def n_aux(self):
        return self.G.shape[1] - self.n

    @property
    def is_cone(self):
        return not np.any(self.h) and not np.any(self.f)

    # -- queries ---------------------------------------------------------

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        n, k = self.n, self.n_aux
        Gx, Gw = self.G[:, :n], self.G[:, n:]
        Ex, Ew = self.E[:, :n], self.E[:, n:]
        slack_ub = self.h - Gx @ x + tol * (1.0 + np.abs(self.h) + np.abs(Gx) @ np.abs(x))
        rhs_eq = self.f - Ex @ x
        if k == 0:
            return bool(np.all(slack_ub >= 0) and
                        np.all(np.abs(rhs_eq) <= tol * (1.0 + np.abs(self.f) + np.abs(Ex) @ np.abs(x))))
        # feasibility with a small elastic slack on equalities
        m_eq = Ew.shape[0]
        eps = tol * (1.0 + np.abs(self.f) + np.abs(Ex) @ np.abs(x))
        A_ub = np.vstack([Gw, Ew, -Ew]) if m_eq else Gw
        b_ub = np.concatenate([slack_ub, rhs_eq + eps, -rhs_eq + eps]) if m_eq else slack_ub
        res = solve_lp(LpProblem(np.zeros(k), A_ub=A_ub, b_ub=b_ub, bounds=FREE))
        return res.status == "optimal"

    def minimize(self, y, extra=None):
        """``inf { <y, x> : x in P }``; returns ``(value, x)``.

        ``value`` is ``+inf`` for an empty polyhedron and ``-inf`` when
        unbounded below (``x`` is then ``None``).
        """
        y = np.asarray(y, dtype=float)
        c = np.concatenate([y, np.zeros(self.n_aux)])
        res = solve_lp(LpProblem(c, A_ub=self.G, b_ub=self.h, A_eq=self.E, b_eq=self.f,
                                 bounds=FREE))
        if res.status == "infeasible":
            return math.inf, None
        if res.status == "unbounded":
            return -math.inf, None
        return res.value, res.x[: self.n]

    # -- constructions ---------------------------------------------------

    def preimage(self, A, b=None):
        """``{x : A x + b in P}``."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[0] != self.n:
            raise ValueError("map has %d rows, polyhedron lives in R^%d" % (A.shape[0], self.n))
        b = np.zeros(self.n) if b is None else np.asarray(b, dtype=float)
        n = self.n
        G = np.hstack([self.G[:, :n] @ A, self.G[:, n:]])
        E = np.hstack([self.E[:, :n] @ A, self.E[:, n:]])
        h = self.h - self.G[:, :n] @ b
        f = self.f - self.E[:, :n] @ b
        return Polyhedron(A.shape[1], G, h, E, f)

    def image(self, A):
        """``{A x : x in P}``; the old point becomes auxiliary."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        if A.shape[1] != self.n:
            raise ValueError("map has %d columns, polyhedron lives in R^%d" % (A.shape[1], self.n))
        m = A.shape[0]
        k = self.n_aux
        G = np.hstack([np.zeros((self.G.shape[0], m)), self.G])
        E_old = np.hstack([np.zeros((self.E.shape[0], m)), self.E])
        link = np.hstack([np.eye(m), -A, np.zeros((m, k))])
        return Polyhedron(m, G, self.h, np.vstack([E_old, link]),
                          np.concatenate([self.f, np.zeros(m)]))

    def intersect(self, other):
        if other.n != self.n:
            raise ValueError("dimension mismatch")
        n, k1, k2 = self.n, self.n_aux, other.n_aux

        def widen(M, first):
            X, W = M[:, :n], M[:, n:]
            if first:
                return np.hstack([X, W, np.zeros((M.shape[0], k2))])
            return np.hstack([X, np.zeros((M.shape[0], k1)), W])

        G = np.vstack([widen(self.G, True), widen(other.G, False)])
        E = np.vstack([widen(self.E, True), widen(other.E, False)])
        return Polyhedron(n, G, np.concatenate([self.h, other.h]), E,
                          np.concatenate([self.f, other.f]))

    def scaled_up(self):
        """``union_{lam >= 1} lam P`` via homogenisation."""
        n, k = self.n, self.n_aux
        # variables (x, w, lam):  G[x;w] - lam h <= 0,  E[x;w] - lam f = 0,  1 - lam <= 0
        G = np.hstack([self.G, -self.h[:, None]])
        row = np.zeros((1, n + k + 1))
        row[0, -1] = -1.0
        G = np.vstack([G, row])
        h = np.concatenate([np.zeros(self.G.shape[0]), [-1.0]])
        E = np.hstack([self.E, -self.f[:, None]])
        return Polyhedron(n, G, h, E, np.zeros(self.E.shape[0]))

    @staticmethod
    def hull_of_union(parts):
        """Closed convex hull of a union of nonempty polyhedra (disjunctive lift)."""
        parts = list(parts)
        n = parts[0].n
        if any(p.n != n for p in parts):
            raise ValueError("dimension mismatch")
        # variables: x, then per part (x_i, w_i, lam_i)
        sizes = [p.n + p.n_aux + 1 for p in parts]
        total = n + sum(sizes)
        G_rows, h_rows, E_rows, f_rows = [], [], [], []
        link = np.zeros((n, total))
        link[:, :n] = np.eye(n)
        lam_sum = np.zeros((1, total))
        off = n
        for p, size in zip(parts, sizes):
            width = p.n + p.n_aux
            blk = np.zeros((p.G.shape[0], total))
            blk[:, off:off + width] = p.G
            blk[:, off + width] = -p.h
            G_rows.append(blk)
            h_rows.append(np.zeros(p.G.shape[0]))
            blk = np.zeros((p.E.shape[0], total))
            blk[:, off:off + width] = p.E
            blk[:, off + width] = -p.f
            E_rows.append(blk)
            f_rows.append(np.zeros(p.E.shape[0]))
            link[:, off:off + p.n] = -np.eye(n)
            nonneg = np.zeros((1, total))
            nonneg[0, off + width] = -1.0
            G_rows.append(nonneg)
            h_rows.append(np.zeros(1))
            lam_sum[0, off + width] = 1.0
            off += size
        E_rows += [link, lam_sum]
        f_rows += [np.zeros(n), np.ones(1)]
        return Polyhedron(n, np.vstack(G_rows), np.concatenate(h_rows),
                          np.vstack(E_rows), np.concatenate(f_rows))


def polar_epigraph(epi, dim):
    """Epigraph of the polar gauge from a polyhedral gauge epigraph.

    ``epi`` lives over ``(x, t)`` with ``x in R^dim`` and is a cone. The
    polar is ``sup { <u, x> : (x, 1) in epi }``; its LP dual gives the
    epigraph ``{(u, s)}`` over multipliers ``(lam >= 0, mu)``. The
    construction is an involution up to lifting, so it also recovers a
    closed gauge's epigraph from its polar's.
    """
    if epi.n != dim + 1 or not epi.is_cone:
        raise ValueError("expected a conic epigraph over R^%d x R" % dim)
    k = epi.n_aux
    Gx, gt, Gw = epi.G[:, :dim], epi.G[:, dim], epi.G[:, dim + 1:]
    Ex, et, Ew = epi.E[:, :dim], epi.E[:, dim], epi.E[:, dim + 1:]
    p, q = Gx.shape[0], Ex.shape[0]
    width = dim + 1 + p + q
    # equalities: Gx' lam + Ex' mu - u = 0 ;  Gw' lam + Ew' mu = 0
    E1 = np.hstack([-np.eye(dim), np.zeros((dim, 1)), Gx.T, Ex.T])
    E2 = np.hstack([np.zeros((k, dim + 1)), Gw.T, Ew.T])
    # inequalities: -gt' lam - et' mu - s <= 0 ;  -lam <= 0
    G1 = np.concatenate([np.zeros(dim), [-1.0], -gt, -et])[None, :]
    G2 = np.hstack([np.zeros((p, dim + 1)), -np.eye(p), np.zeros((p, q))])
    G = np.vstack([G1, G2])
    E = np.vstack([E1, E2])
    return Polyhedron(dim + 1, G, np.zeros(G.shape[0]), E.reshape(-1, width), np.zeros(E.shape[0]))


class LpAssembler:
    """Incremental LP over named variable blocks, all free unless constrained.

    Polyhedra are attached through :meth:`member`, which places the point
    of a lifted polyhedron at an affine expression of the variables and
    allocates its auxiliary variables.
    """

    def __init__(self):
        self.nvar = 0
        self._G, self._h, self._E, self._f = [], [], [], []

    def var(self, n):
        s = slice(self.nvar, self.nvar + n)
        self.nvar += n
        return s

    @staticmethod
    def _expr(terms, nrows):
        return [(np.atleast_2d(np.asarray(M, dtype=float)).reshape(nrows, -1), s) for M, s in terms]

    def _place(self, M, terms, width):
        R = np.zeros((M.shape[0], width))
        for T, s in terms:
            R[:, s] += M @ T
        return R

    def member(self, P, terms, const=None):
        """Require ``sum_i M_i v_i + const`` to lie in ``P``."""
        terms = self._expr(terms, P.n)
        const = np.zeros(P.n) if const is None else np.asarray(const, dtype=float)
        aux = self.var(P.n_aux)
        self._G.append((P.G, terms, aux, P.h - P.G[:, :P.n] @ const))
        self._E.append((P.E, terms, aux, P.f - P.E[:, :P.n] @ const))
        return aux

    def ub(self, terms, rhs):
        """``sum_i C_i v_i <= rhs`` for row vectors or matrices ``C_i``."""
        terms = [(np.atleast_2d(np.asarray(c, dtype=float)), s) for c, s in terms]
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (terms[0][0].shape[0],)).copy()
        self._G.append((None, terms, None, rhs))

    def eq(self, terms, rhs):
        terms = [(np.atleast_2d(np.asarray(c, dtype=float)), s) for c, s in terms]
        rhs = np.broadcast_to(np.asarray(rhs, dtype=float), (terms[0][0].shape[0],)).copy()
        self._E.append((None, terms, None, rhs))

    def _assemble(self, blocks):
        width = self.nvar
        mats, rhs = [], []
        for M, terms, aux, r in blocks:
            if M is None:
                R = np.zeros((terms[0][0].shape[0], width))
                for c, s in terms:
                    R[:, s] += c
            else:
                n = M.shape[1] - (aux.stop - aux.start)
                R = self._place(M[:, :n], terms, width)
                R[:, aux] += M[:, n:]
            mats.append(R)
            rhs.append(r)
        if not mats:
            return np.zeros((0, width)), np.zeros(0)
        return np.vstack(mats), np.concatenate(rhs)

    def solve(self, objective, maximize=False):
        """Optimise ``sum_i c_i' v_i``; returns the :class:`LpResult` in the original sense."""
        c = np.zeros(self.nvar)
        for coef, s in objective:
            c[s] += np.asarray(coef, dtype=float).reshape(-1)
        if maximize:
            c = -c
        G, h = self._assemble(self._G)
        E, f = self._assemble(self._E)
        res = solve_lp(LpProblem(c, A_ub=G, b_ub=h, A_eq=E, b_eq=f, bounds=FREE))
        if maximize and res.status == "optimal":
            res.value = -res.value
        elif maximize and res.status == "unbounded":
            res.value = math.inf
        return res
