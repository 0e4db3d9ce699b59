"""Small gauge programs with known optima, and feasible-point samplers.

Every builder returns an :class:`Instance`; ``known`` holds hand-derived
reference values (primal optimum, gauge-dual optimum, dual solutions).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .cones import NonnegOrthant, PsdCone, vec
from .duality import GaugeProblem
from .gauges import Atomic, ConicLinear, Norm
from .sets import sample_polyhedron

__all__ = [
    "Instance",
    "bpdn",
    "complete_graph",
    "graphs",
    "conic_orthant",
    "diag_map",
    "maxcut",
    "maxcut_summary",
    "min_norm",
    "phase_toy",
    "random_polyhedral",
    "sample_dual_feasible",
    "sample_primal_feasible",
    "sdp_toy",
]


@dataclass
class Instance:
    name: str
    problem: GaugeProblem
    known: dict = field(default_factory=dict)


def min_norm():
    """``min |x|_1  s.t.  x1 + x2 = 2``: optimum 2, gauge dual 1/2, Lagrange ``y = 1``."""
    p = GaugeProblem(Norm("one", 2), [[1.0, 1.0]], [2.0], Norm("one", 1), 0.0, name="min-norm")
    return Instance("min-norm", p, {"v_p": 2.0, "v_g": 0.5, "v_l": 2.0, "y_lagrange": [1.0],
                                    "y_gauge": [0.5], "x": [2.0, 0.0]})


def bpdn(b=(3.0, 4.0), sigma=1.0):
    """``min |x|_1  s.t.  |b - x|_2 <= sigma`` with ``A = I``."""
    b = np.asarray(b, dtype=float)
    p = GaugeProblem(Norm("one", b.size), np.eye(b.size), b, Norm("two", b.size), sigma,
                     ri_declared=True, name="bpdn")
    known = {}
    if np.allclose(b, [3.0, 4.0]) and sigma == 1.0:
        r = 1.0 / math.sqrt(2.0)
        known = {"v_p": 7.0 - math.sqrt(2.0), "v_g": 1.0 / (7.0 - math.sqrt(2.0)),
                 "y_lagrange": [1.0, 1.0], "x": [3.0 - r, 4.0 - r], "threshold": r}
    return Instance("bpdn", p, known)


def conic_orthant():
    """``min <c, x>`` over ``x >= 0`` with ``x1 = x2``, ``x1 + x2 + x3 = 1``."""
    c = np.array([1.0, 2.0, 3.0])
    A = np.array([[1.0, 1.0, 1.0], [1.0, -1.0, 0.0]])
    p = GaugeProblem(ConicLinear(c, NonnegOrthant(3)), A, [1.0, 0.0], Norm("one", 2), 0.0,
                     name="conic-orthant")
    return Instance("conic-orthant", p, {"v_p": 1.5, "v_g": 2.0 / 3.0, "x": [0.5, 0.5, 0.0]})


def diag_map(n):
    """``X -> diag(X)`` on row-major vectorised ``n x n`` matrices."""
    A = np.zeros((n, n * n))
    for i in range(n):
        A[i, i * n + i] = 1.0
    return A


def sdp_toy():
    """``min <C, X>`` over PSD ``X`` with unit diagonal, ``C = [[2, 1], [1, 2]]``."""
    C = np.array([[2.0, 1.0], [1.0, 2.0]])
    p = GaugeProblem(ConicLinear(C, PsdCone(2)), diag_map(2), [1.0, 1.0], Norm("two", 2), 0.0,
                     name="sdp-toy")
    return Instance("sdp-toy", p, {"v_p": 2.0, "v_g": 0.5, "y_gauge": [0.5, 0.5]})


def complete_graph(n):
    W = np.ones((n, n)) - np.eye(n)
    return W


def maxcut(W):
    """Max-cut relaxation as a gauge program: ``min <D + W, X>``, ``diag X = e``, ``X`` PSD.

    ``<D, X> = 2|E|`` on the feasible set, so the relaxation value is
    ``|E| - v_p / 4``.
    """
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    D = np.diag(W.sum(axis=1))
    p = GaugeProblem(ConicLinear(D + W, PsdCone(n)), diag_map(n), np.ones(n), Norm("two", n), 0.0,
                     name="maxcut")
    edges = float(W.sum() / 2.0)
    known = {"edges": edges}
    if np.array_equal(W, complete_graph(n)) and n == 3:
        known.update({"v_p": 3.0, "v_g": 1.0 / 3.0, "relaxation": 9.0 / 4.0})
    return Instance("maxcut", p, known)


def phase_toy():
    """``min tr X`` over PSD ``2 x 2`` matrices with ``<a a', X> = |<a, x0>|^2``.

    Measurements ``a = e1`` and ``a = (1, 1)`` of ``x0 = (1, 0.5)``.
    """
    a1, a2 = np.array([1.0, 0.0]), np.array([1.0, 1.0])
    x0 = np.array([1.0, 0.5])
    A = np.array([vec(np.outer(a1, a1)), vec(np.outer(a2, a2))])
    b = np.array([(a1 @ x0) ** 2, (a2 @ x0) ** 2])
    p = GaugeProblem(ConicLinear(np.eye(2), PsdCone(2)), A, b, Norm("two", 2), 0.0, name="phase-toy")
    return Instance("phase-toy", p, {"v_p": 1.25, "v_g": 0.8})


def random_polyhedral(rng, n_max=6):
    """A random problem whose gauges and misfit set are all polyhedral."""
    n = int(rng.integers(2, n_max + 1))
    m = int(rng.integers(1, n))
    A = rng.standard_normal((m, n))
    kind = rng.choice(["one", "inf", "atomic", "orthant"])
    if kind == "orthant":
        kappa = ConicLinear(rng.uniform(0.5, 2.0, n), NonnegOrthant(n))
        b = A @ rng.uniform(0.5, 1.5, n)
    elif kind == "atomic":
        P = rng.standard_normal((n, n + 3))
        kappa = Atomic(np.hstack([P, -P]))
        b = rng.standard_normal(m)
    else:
        kappa = Norm(kind, n, weights=rng.uniform(0.5, 2.0, n))
        b = rng.standard_normal(m)
    rho = Norm(rng.choice(["one", "inf"]), m)
    sigma = 0.0 if kind == "orthant" or rng.uniform() < 0.5 else float(rng.uniform(0.1, 0.6) * rho(b))
    p = GaugeProblem(kappa, A, b, rho, sigma, name="random-" + str(kind))
    return Instance(p.name, p, {})


# ---------------------------------------------------------------------------
# samplers


def _psd_diag_sample(n, d, rng):
    V = rng.standard_normal((n, int(rng.integers(1, n + 1))))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    s = np.sqrt(d)
    return vec(s[:, None] * (V @ V.T) * s[None, :])


def sample_primal_feasible(p, rng, count):
    """Random primal-feasible points (rows)."""
    if isinstance(p.kappa, ConicLinear) and isinstance(p.kappa.cone, PsdCone):
        n = p.kappa.cone.order
        if np.array_equal(p.A, diag_map(n)):
            return np.array([_psd_diag_sample(n, p.b, rng) for _ in range(count)])
        raise NotImplementedError("PSD sampling needs a diagonal constraint map")
    P = p.feasible_set().polyhedron()
    if P is not None:
        cone = p.cone
        if isinstance(p.kappa, ConicLinear):
            cone = p.kappa.cone
        if cone is not None:
            P = P.intersect(cone.polyhedron())
        return sample_polyhedron(P, rng, count)
    return p.feasible_set().sample(rng, count)


def sample_dual_feasible(p, rng, count, spread=1.0):
    """Random gauge-dual feasible points, scaled onto the constraint set."""
    out = []
    while len(out) < count:
        y = p.b / float(p.b @ p.b) + spread * rng.standard_normal(p.m) / max(np.linalg.norm(p.b), 1e-12)
        t = p.dual_margin(y)
        if t > 1e-3:
            out.append(y / t * (1.0 + rng.exponential(0.3)))
    return np.array(out)


def graphs(n_max=6, rng=None, count=10):
    """Random simple graphs (adjacency matrices) on 2..n_max vertices."""
    rng = np.random.default_rng(0) if rng is None else rng
    out = []
    while len(out) < count:
        n = int(rng.integers(2, n_max + 1))
        W = np.zeros((n, n))
        for i, j in itertools.combinations(range(n), 2):
            if rng.uniform() < 0.6:
                W[i, j] = W[j, i] = 1.0
        if W.sum() > 0:
            out.append(W)
    return out


def maxcut_summary(W, x):
    """Relaxation value and the constant ``<D, X>`` at a feasible ``x = vec(X)``."""
    W = np.asarray(W, dtype=float)
    n = W.shape[0]
    X = np.asarray(x, dtype=float).reshape(n, n)
    D = np.diag(W.sum(axis=1))
    edges = float(W.sum() / 2.0)
    v = float(np.sum((D + W) * X))
    return {"edges": edges, "degree_pairing": float(np.sum(D * X)),
            "relaxation_value": float(edges - v / 4.0)}
