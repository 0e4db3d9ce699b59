"""Antipolar calculus on set descriptors.

The antipolar of ``C`` is ``{y : <y, x> >= 1 for all x in C}``. Results
are symbolic: :func:`antipolar` picks a rule by descriptor type and wraps
the outcome in :class:`Antipolar`, which records the rule and whether a
closure had to be taken. Membership is the universal interface.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .gauges import Norm
from .sets import (
    TOL,
    Affine,
    ConeSet,
    ConeTranslate,
    ConvexSet,
    GaugeBallTranslate,
    GenericAntipolar,
    Halfspace,
    HullOfUnion,
    Image,
    Intersection,
    Preimage,
    Ray,
    ScaledUp,
    Superlevel,
    Union,
    UnsupportedSetError,
)

__all__ = [
    "Antipolar",
    "BiantipolarReport",
    "NotRayLikeError",
    "OriginInSetError",
    "RecessionReport",
    "antipolar",
    "biantipolar_check",
    "is_raylike",
    "membership",
    "recession_identity_check",
]

COUNTEREXAMPLE = (
    "the intersection rule needs ray-like operands: with C1 = {x1 + x2 >= 1} n {x1 - x2 >= 1} "
    "and C2 = {x1 = 1}, (1, 1.5) lies in the antipolar of C1 n C2 = {y1 >= 1} but not in "
    "cl conv(C1' u C2') = {y1 >= 1, |y2| <= y1}"
)


class OriginInSetError(ValueError):
    pass


class NotRayLikeError(ValueError):
    pass


class Antipolar(ConvexSet):
    """Antipolar of ``source``, represented by the descriptor ``body``."""

    def __init__(self, body, source, rule, closure_taken=False):
        self.body = body
        self.source = source
        self.rule = rule
        self.closure_taken = bool(closure_taken)
        self.dim = body.dim

    def contains(self, x, tol=TOL):
        return self.body.contains(x, tol)

    def inf_linear(self, y):
        return self.body.inf_linear(y)

    def polyhedron(self):
        return self.body.polyhedron()

    def sample(self, rng, count):
        return self.body.sample(rng, count)

    def __repr__(self):
        flag = ", closure" if self.closure_taken else ""
        return "Antipolar[%s%s](%r)" % (self.rule, flag, self.body)


def membership(S, x, tol=TOL):
    """Membership of ``x`` in descriptor ``S`` within ``tol``."""
    return bool(S.contains(x, tol))


# ---------------------------------------------------------------------------
# ray-like test


def _sampled_raylike(S, rng, count=40):
    try:
        pts = S.sample(rng, count)
    except (UnsupportedSetError, RuntimeError, ValueError):
        return "unknown", None
    for i in range(count):
        x = pts[i]
        y = pts[(i * 7 + 3) % count]
        for alpha in (1.0, 10.0):
            if not S.contains(x + alpha * y, tol=1e-7):
                return "no", (x, y, alpha)
    return "unknown", None


def is_raylike(S, seed=0):
    """Tri-state ray-like verdict ``("yes" | "no" | "unknown", witness)``.

    The witness for ``"no"`` is ``(x, y, alpha)`` with ``x, y`` in ``S`` and
    ``x + alpha y`` outside it.
    """
    if isinstance(S, (Antipolar, GenericAntipolar, Superlevel, Ray, ScaledUp, ConeSet)):
        return "yes", None
    if isinstance(S, Halfspace):
        if S.beta >= 0:
            return "yes", None
        x = S.a * (S.beta / float(S.a @ S.a))
        return "no", (x, x, 1.0)
    if isinstance(S, ConeTranslate):
        if S.cone.contains(S.b):
            return "yes", None
        return "no", (S.b, S.b, 1.0)
    if isinstance(S, Affine):
        x0 = S._particular()
        if x0 is None:
            return "yes", None
        if not np.any(S.b):
            return "yes", None
        if not S.contains(2.0 * x0):
            return "no", (x0, x0, 1.0)
    if isinstance(S, (Intersection, Image, Preimage)):
        parts = S.parts if isinstance(S, Intersection) else [S.inner]
        if all(is_raylike(p, seed)[0] == "yes" for p in parts):
            return "yes", None
    return _sampled_raylike(S, np.random.default_rng(seed))


# ---------------------------------------------------------------------------
# the rule table


def _origin_check(C):
    if C.contains(np.zeros(C.dim)):
        raise OriginInSetError("the origin lies in %r; its antipolar is empty" % (C,))


def _sigma_zero_check(rho, rng, count=200):
    if isinstance(rho, Norm):
        return
    V = rng.standard_normal((count, rho.dim))
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    if min(rho.evaluate(v) for v in V) <= 0:
        raise ValueError("rho vanishes at a nonzero point; sigma = 0 needs rho^-1(0) = {0}")


def antipolar(C, seed=0):
    """Symbolic antipolar of a descriptor.

    Raises
    ------
    OriginInSetError
        If ``0`` lies in ``C``.
    NotRayLikeError
        For an intersection whose operands are not all certified ray-like.
    """
    if isinstance(C, Antipolar):
        inner = C.body
        if not isinstance(inner, (Ray, Halfspace, Image, Preimage, Intersection, Union)):
            return Antipolar(GenericAntipolar(C), C, "definition")
        out = antipolar(inner, seed)
        return Antipolar(out.body, C, out.rule, out.closure_taken)
    _origin_check(C)
    if isinstance(C, Halfspace):
        return Antipolar(Ray(C.a / C.beta), C, "halfspace to ray")
    if isinstance(C, Ray):
        return Antipolar(Halfspace(C.d, 1.0), C, "ray to halfspace")
    if isinstance(C, GaugeBallTranslate):
        if C.rho.evaluate(C.b) <= C.sigma:
            raise OriginInSetError("sigma >= rho(b): the origin is feasible")
        if C.sigma == 0:
            _sigma_zero_check(C.rho, np.random.default_rng(seed))
            return Antipolar(Halfspace(C.b, 1.0), C, "gauge-ball translate, zero radius")
        return Antipolar(Superlevel(C.rho, C.b, C.sigma), C, "gauge-ball translate")
    if isinstance(C, ConeTranslate):
        body = Intersection([ConeSet(C.cone, dual=True), Halfspace(C.b, 1.0)])
        return Antipolar(body, C, "cone translate")
    if isinstance(C, Affine):
        return Antipolar(Image(C.A.T, Halfspace(C.b, 1.0)), C, "affine set")
    if isinstance(C, Image):
        inner = antipolar(C.inner, seed)
        return Antipolar(Preimage(C.A.T, inner), C, "linear image", inner.closure_taken)
    if isinstance(C, Preimage):
        inner = antipolar(C.inner, seed)
        exact = C.inner.polyhedron() is not None or C.ri_certified
        return Antipolar(Image(C.A.T, inner), C, "linear preimage",
                         inner.closure_taken or not exact)
    if isinstance(C, (Union, HullOfUnion)):
        parts = [antipolar(p, seed) for p in C.parts]
        return Antipolar(Intersection(parts), C, "union",
                         any(p.closure_taken for p in parts))
    if isinstance(C, Intersection):
        verdicts = [is_raylike(p, seed) for p in C.parts]
        if any(v != "yes" for v, _ in verdicts):
            raise NotRayLikeError(COUNTEREXAMPLE)
        if any(p.contains(np.zeros(C.dim)) for p in C.parts):
            # a part through the origin has an empty antipolar; use the definition
            return Antipolar(GenericAntipolar(C), C, "definition")
        parts = [antipolar(p, seed) for p in C.parts]
        return Antipolar(HullOfUnion(parts), C, "intersection of ray-like sets",
                         any(p.closure_taken for p in parts))
    return Antipolar(GenericAntipolar(C), C, "definition")


# ---------------------------------------------------------------------------
# bi-antipolar and recession checks


@dataclass
class BiantipolarReport:
    samples: int
    agreement: float
    equals_set_rate: float
    raylike: str
    rule_chain: tuple
    disagreements: list = field(default_factory=list)

    @property
    def ok(self):
        if self.agreement < 1.0:
            return False
        return self.raylike != "yes" or self.equals_set_rate == 1.0

    def as_dict(self):
        return {"samples": self.samples, "agreement": self.agreement,
                "equals_set_rate": self.equals_set_rate, "raylike": self.raylike,
                "rules": list(self.rule_chain), "ok": self.ok}


def _probe_points(C, rng, samples):
    """Mix of points of ``C``, their scalings and generic points nearby."""
    base = C.sample(rng, samples)
    scale = 1.0 + np.abs(base).max()
    k = samples // 4
    pts = np.empty_like(base)
    pts[:k] = base[:k]
    lam = rng.uniform(1.0, 4.0, size=samples)
    pts[k:2 * k] = base[k:2 * k] * lam[k:2 * k, None]
    shrink = rng.uniform(0.2, 0.9, size=samples)
    pts[2 * k:3 * k] = base[2 * k:3 * k] * shrink[2 * k:3 * k, None]
    pts[3 * k:] = base[3 * k:] + rng.standard_normal(base[3 * k:].shape) * scale * 0.5
    return pts


def biantipolar_check(C, samples=500, seed=0):
    """Compare ``union_{lam >= 1} lam C`` with the twice-applied antipolar.

    Points are drawn from ``C``, scalings of it and random perturbations.
    For a ray-like ``C`` both must also coincide with ``C`` itself.
    """
    rng = np.random.default_rng(seed)
    route_a = ScaledUp(C)
    first = antipolar(C, seed)
    route_b = antipolar(first, seed)
    pts = _probe_points(C, rng, samples)
    agree = same = 0
    bad = []
    for x in pts:
        a = route_a.contains(x, 1e-8)
        b = route_b.contains(x, 1e-8)
        agree += a == b
        same += a == C.contains(x, 1e-8)
        if a != b and len(bad) < 5:
            bad.append((x.tolist(), a, b))
    verdict, _ = is_raylike(C, seed)
    return BiantipolarReport(samples, agree / samples, same / samples, verdict,
                             (first.rule, route_b.rule), bad)


@dataclass
class RecessionReport:
    directions: int
    agreement: float
    in_dual_cone: int
    disagreements: list = field(default_factory=list)

    @property
    def ok(self):
        return self.agreement == 1.0

    def as_dict(self):
        return {"directions": self.directions, "agreement": self.agreement,
                "in_dual_cone": self.in_dual_cone, "ok": self.ok}


def _cone_hull_contains(Cp, d, y0):
    P = Cp.polyhedron()
    if P is not None:
        # closure of the cone over P: homogenise and allow the zero level
        from .polyhedra import Polyhedron
        n, k = P.n, P.n_aux
        G = np.vstack([np.hstack([P.G, -P.h[:, None]]),
                       np.concatenate([np.zeros(n + k), [-1.0]])[None, :]])
        E = np.hstack([P.E, -P.f[:, None]])
        H = Polyhedron(n, G, np.zeros(G.shape[0]), E, np.zeros(E.shape[0]))
        return H.contains(d, 1e-8)
    z = d + 1e-6 * y0
    return any(Cp.contains(z * s, 1e-8) for s in (1e2, 1e4, 1e6, 1e8))


# 1, 10 and 100 alone cannot reject directions within about 1/100 of the
# boundary of C*, so a far step is appended.
RECESSION_STEPS = (1.0, 10.0, 100.0, 1e8)


def _boundary_anchor(Cp, rng, tries=8):
    """A point of ``C'`` pulled back along its ray to (nearly) the boundary.

    A deep anchor would let ``y0 + tau d`` stay inside for bad directions
    when ``tau`` is bounded, so the smallest sample is shrunk by bisection.
    """
    pts = Cp.sample(rng, tries)
    y = pts[np.argmin(np.linalg.norm(pts, axis=1))]
    lo, hi = 0.0, 1.0
    for _ in range(60):
        mid = 0.5 * (lo + hi)
        if Cp.contains(mid * y, 0.0):
            hi = mid
        else:
            lo = mid
    return hi * y * (1.0 + 1e-6)


def recession_identity_check(C, directions=500, seed=0):
    """Three-way test of ``cl cone C' = C* = recession cone of C'``.

    For each sampled direction ``d``: ``d in C*`` via the linear infimum of
    ``C``; ``y0 + tau d in C'`` for every ``tau`` in ``RECESSION_STEPS``; and membership
    of ``d`` in the closed conic hull of ``C'``. Half the directions are
    drawn from ``C'`` itself so that the positive case is exercised.
    """
    rng = np.random.default_rng(seed)
    Cp = antipolar(C, seed)
    y0 = _boundary_anchor(Cp, rng)
    half = directions // 2
    D = np.vstack([rng.standard_normal((directions - half, C.dim)), Cp.sample(rng, half)])
    D /= np.linalg.norm(D, axis=1, keepdims=True)
    agree = hits = 0
    bad = []
    for d in D:
        t1 = C.inf_linear(d) >= -1e-9
        t2 = all(Cp.contains(y0 + tau * d, 1e-8) for tau in RECESSION_STEPS)
        t3 = _cone_hull_contains(Cp, d, y0)
        ok = t1 == t2 == t3
        agree += ok
        hits += t1
        if not ok and len(bad) < 5:
            bad.append((d.tolist(), t1, t2, t3))
    return RecessionReport(directions, agree / directions, hits, bad)

