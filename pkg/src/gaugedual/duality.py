"""Gauge, Lagrange and bi-dual problems of a gauge program, and certificates.

The primal is

    minimize kappa(D x)  subject to  rho(b - A x) <= sigma,  x in K,

with ``D`` and ``K`` optional. Its gauge dual minimises
``kappa_polar(A' y)`` over ``<b, y> - sigma rho_polar(y) >= 1`` and its
Lagrange dual maximises ``<b, y> - sigma rho_polar(y)`` over
``kappa_polar(A' y) <= 1``. With ``D`` or ``K`` present the objective
gauge is lifted to ``xi(x) = kappa(D x) + indicator_K(x)``, whose polar
``inf { kappa_polar(z) : D' z - w in K* }`` is evaluated by LP and yields
the auxiliary dual variable ``z``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .antipolar import antipolar
from .cones import FreeSpace, PsdCone
from .gauges import (
    Atomic,
    Composed,
    ConicLinear,
    InfinitePolarError,
    Lovasz,
    Norm,
    Sum,
    UnsupportedGaugeError,
    _Restricted,
    polar_gauge,
)
from .linalg import LpProblem, solve_lp
from .polyhedra import LpAssembler, polar_epigraph
from .sets import GaugeBallTranslate, Preimage, ScaledUp

__all__ = [
    "DualProblem",
    "DualityCertificate",
    "GaugeProblem",
    "InvalidProblemError",
    "TrivialProblemError",
    "build_bidual",
    "build_gauge_dual",
    "build_lagrange_dual",
    "certify",
    "map_dual_solutions",
]

FEAS_TOL = 1e-9


class InvalidProblemError(ValueError):
    pass


class TrivialProblemError(InvalidProblemError):
    pass


def _mat(A):
    return np.atleast_2d(np.asarray(getattr(A, "matrix", A), dtype=float))


class GaugeProblem:
    """Data ``(kappa, A, b, rho, sigma, K, D)`` of a gauge program.

    Parameters
    ----------
    kappa : Gauge
        Objective gauge, acting on ``D x`` (or ``x`` when ``D`` is absent).
    A : array_like, shape (m, n)
    b : array_like, shape (m,)
    rho : Gauge
        Misfit gauge on ``R^m``.
    sigma : float
        Misfit tolerance, ``0 <= sigma < rho(b)``.
    cone : ConeDescr, optional
        Side constraint ``x in K``.
    D : array_like, optional
        Objective map.
    ri_declared : bool
        Caller declaration that the relative-interior qualifications hold
        (they are not decided mechanically outside the polyhedral branch).
    """

    def __init__(self, kappa, A, b, rho, sigma, cone=None, D=None, ri_declared=False,
                 name="", seed=0):
        self.kappa = kappa
        self.A = _mat(A)
        self.b = np.atleast_1d(np.asarray(b, dtype=float)).reshape(-1)
        self.rho = rho
        self.sigma = float(sigma)
        self.cone = cone
        self.D = None if D is None else _mat(D)
        self.ri_declared = bool(ri_declared)
        self.name = name
        m, n = self.A.shape
        if self.b.size != m:
            raise InvalidProblemError("b has length %d but A has %d rows" % (self.b.size, m))
        if rho.dim != m:
            raise InvalidProblemError("rho acts on R^%d but A has %d rows" % (rho.dim, m))
        kdim = n if self.D is None else self.D.shape[0]
        if self.D is not None and self.D.shape[1] != n:
            raise InvalidProblemError("D has %d columns but A has %d" % (self.D.shape[1], n))
        if kappa.dim != kdim:
            raise InvalidProblemError("kappa acts on R^%d, expected R^%d" % (kappa.dim, kdim))
        if cone is not None and cone.dim != n:
            raise InvalidProblemError("cone lives in R^%d, x in R^%d" % (cone.dim, n))
        if self.sigma < 0:
            raise InvalidProblemError("sigma must be nonnegative")
        if self.sigma >= rho.evaluate(self.b):
            raise TrivialProblemError("origin feasible: trivial optimum (sigma >= rho(b))")
        if self.sigma == 0 and not isinstance(rho, Norm):
            V = np.random.default_rng(seed).standard_normal((256, m))
            V /= np.linalg.norm(V, axis=1, keepdims=True)
            if min(rho.evaluate(v) for v in V) <= 0:
                raise InvalidProblemError("sigma = 0 needs rho to vanish only at the origin")

    @property
    def n(self):
        return self.A.shape[1]

    @property
    def m(self):
        return self.A.shape[0]

    @property
    def extended(self):
        return self.D is not None or (self.cone is not None and not isinstance(self.cone, FreeSpace))

    def objective_gauge(self):
        """``x -> kappa(D x) + indicator_K(x)`` as a gauge on ``R^n``."""
        g = self.kappa if self.D is None else Composed(self.kappa, self.D)
        if self.cone is not None and not isinstance(self.cone, FreeSpace):
            g = _Restricted(g, self.cone)
        return g

    def misfit_set(self):
        """``C0 = {r : rho(b - r) <= sigma}``."""
        return GaugeBallTranslate(self.rho, self.b, self.sigma)

    def feasible_set(self):
        """``C = {x : A x in C0}`` (the side cone is handled separately)."""
        return Preimage(self.A, self.misfit_set(), ri_certified=self.ri_declared)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.objective_gauge().evaluate(x)

    def primal_residual(self, x):
        x = np.asarray(x, dtype=float)
        r = max(0.0, self.rho.evaluate(self.b - self.A @ x) - self.sigma)
        if self.cone is not None and not self.cone.contains(x, tol=1e-9):
            r = max(r, 1.0)
        return r

    def dual_margin(self, y):
        """``<b, y> - sigma rho_polar(y)``."""
        y = np.asarray(y, dtype=float)
        if self.sigma == 0:
            return float(self.b @ y)
        p = self.rho.polar(y)
        return -math.inf if math.isinf(p) else float(self.b @ y) - self.sigma * p

    @property
    def misfit_polyhedral(self):
        return self.sigma == 0 or self.rho.epigraph() is not None

    def assumption_flags(self):
        full = _full_domains(self.kappa) and self.D is None and not self.extended
        return {
            "kappa_closed": bool(self.kappa.closed),
            "misfit_polyhedral": bool(self.misfit_polyhedral),
            "full_domains": bool(full),
            "ri_declared": self.ri_declared,
        }

    def strong_duality_basis(self):
        """Which sufficient condition for ``v_p v_g = 1`` with attainment applies, if any."""
        f = self.assumption_flags()
        if not f["kappa_closed"]:
            return None
        if f["misfit_polyhedral"] and (f["full_domains"] or f["ri_declared"]):
            return "gauge pair with polyhedral misfit set"
        if f["ri_declared"]:
            return "gauge pair under declared relative-interior conditions"
        return None

    def __repr__(self):
        return "GaugeProblem(%s m=%d n=%d sigma=%g)" % (self.name + ":" if self.name else "",
                                                       self.m, self.n, self.sigma)


def _full_domains(g):
    """Are ``kappa`` and its polar finite everywhere (checked per variant)?"""
    if isinstance(g, Norm):
        return True
    if isinstance(g, Atomic):
        return _atoms_span_cone(g.atoms)
    if isinstance(g, Sum):
        return all(_full_domains(p) for p in g.parts)
    return False


def _atoms_span_cone(P):
    # cone(P) = R^d iff P has full row rank and P lam = 0 for some lam >= 1
    if np.linalg.matrix_rank(P) < P.shape[0]:
        return False
    res = solve_lp(LpProblem(np.zeros(P.shape[1]), A_eq=P, b_eq=-P.sum(axis=1)))
    return res.status == "optimal"


# ---------------------------------------------------------------------------
# naming


def _polar_name(g, arg):
    if isinstance(g, Norm):
        sub = {"one": "∞", "two": "2", "inf": "1"}[g.kind]
        if g.unweighted:
            return "‖%s‖_%s" % (arg, sub)
        return "‖(%s)/w‖_%s" % (arg, sub)
    if isinstance(g, ConicLinear):
        if isinstance(g.cone, PsdCone):
            return "max(0, λmax(%s, C))" % arg
        return "inf{α ≥ 0 : αc − %s ∈ K*}" % arg
    if isinstance(g, Atomic):
        return "max(0, max_a ⟨%s, a⟩)" % arg
    if isinstance(g, Lovasz):
        return "max(0, max_S ⟨%s, 1_S⟩/f(S))" % arg
    if isinstance(g, Sum):
        return "max_j κ_j°((%s)_j)" % arg
    if isinstance(g, Composed):
        return "inf{κ°(u) : M*u = %s}" % arg
    return "κ°(%s)" % arg


def _margin_name(p):
    if p.sigma == 0:
        return "⟨b,y⟩"
    return "⟨b,y⟩ − σ%s" % _polar_name(p.rho, "y")


# ---------------------------------------------------------------------------
# dual problems


@dataclass
class DualProblem:
    """A constructed dual with objective and constraint handles.

    ``objective``/``subgradient`` act on the dual variable ``y`` (length
    ``m``, or ``n`` for the bi-dual). ``constraint_value`` is the margin
    that must be ``>= 1`` for a gauge dual and the polar value that must be
    ``<= 1`` for a Lagrange dual; ``restore`` maps a point with positive
    margin (or finite polar) onto the feasible set.
    """

    kind: str
    sense: str
    problem: GaugeProblem
    dim: int
    objective: Callable
    subgradient: Callable
    constraint_value: Callable
    feasible: Callable
    restore: Callable
    description: str
    provenance: str
    closure_taken: bool = False
    constraint_set: object = None
    halfspace: Optional[np.ndarray] = None
    lp_solve: Optional[Callable] = None
    recover_z: Optional[Callable] = None
    notes: list = field(default_factory=list)

    @property
    def polyhedral(self):
        return self.lp_solve is not None

    def summary(self):
        return {
            "kind": self.kind,
            "sense": self.sense,
            "problem": self.description,
            "rule": self.provenance,
            "closure_taken": self.closure_taken,
            "polyhedral": self.polyhedral,
        }


def _lifted_polar(p):
    """Objective gauge whose polar is evaluated at ``A' y``."""
    g = p.objective_gauge()
    if p.extended and g.epigraph() is None:
        raise UnsupportedGaugeError(
            "cone or objective map with a non-polyhedral objective gauge is not supported")
    return g


def build_gauge_dual(p):
    """``minimize kappa_polar(A' y)  s.t.  <b, y> - sigma rho_polar(y) >= 1``."""
    g = _lifted_polar(p)
    A, b = p.A, p.b

    def objective(y):
        return g.polar(A.T @ np.asarray(y, dtype=float))

    def subgradient(y):
        return A @ g.polar_subgradient(A.T @ np.asarray(y, dtype=float))

    def feasible(y, tol=FEAS_TOL):
        return p.dual_margin(y) >= 1.0 - tol

    bb = float(b @ b)

    def restore(y):
        y = np.asarray(y, dtype=float)
        if p.sigma == 0:
            # exact Euclidean projection onto the halfspace <b, y> >= 1
            return y + max(0.0, 1.0 - float(b @ y)) * b / bb
        t = p.dual_margin(y)
        if not t > 0:
            return None
        return y / t

    arg = "A*y"
    if p.extended:
        obj = _polar_name(p.kappa, "z")
        desc = "min %s s.t. %s ≥ 1, D*z − A*y ∈ K*" % (obj, _margin_name(p))
        if p.D is None:
            desc = desc.replace("D*z", "z")
        rule = "gauge dual with objective map and side cone"
    else:
        desc = "min %s s.t. %s ≥ 1" % (_polar_name(p.kappa, arg), _margin_name(p))
        rule = "gauge dual, zero misfit tolerance" if p.sigma == 0 else \
            "gauge dual, positive misfit tolerance"
    closure = not (p.misfit_polyhedral or p.ri_declared)
    C0p = antipolar(p.misfit_set())

    lp = None
    pe_k, pe_r = g.polar_epigraph(), p.rho.polar_epigraph()
    if pe_k is not None and (p.sigma == 0 or pe_r is not None):
        def lp():
            return _gauge_dual_lp(p, pe_k, pe_r)

    recover = None
    if p.extended:
        def recover(y):
            return _recover_z(p, A.T @ np.asarray(y, dtype=float))

    return DualProblem("gauge_dual", "min", p, p.m, objective, subgradient,
                       p.dual_margin, feasible, restore, desc, rule, closure, C0p,
                       b.copy() if p.sigma == 0 else None, lp, recover)


def _gauge_dual_lp(p, pe_k, pe_r):
    m, n = p.m, p.n
    L = LpAssembler()
    y = L.var(m)
    s = L.var(1)
    # (A' y, s) in epi of the objective polar
    L.member(pe_k, [(np.vstack([p.A.T, np.zeros((1, m))]), y),
                    (np.concatenate([np.zeros(n), [1.0]])[:, None], s)])
    if p.sigma == 0:
        L.ub([(-p.b, y)], -1.0)
    else:
        r = L.var(1)
        L.member(pe_r, [(np.vstack([np.eye(m), np.zeros((1, m))]), y),
                        (np.concatenate([np.zeros(m), [1.0]])[:, None], r)])
        L.ub([(-p.b, y), ([p.sigma], r)], -1.0)
    res = L.solve([([1.0], s)])
    if res.status != "optimal":
        raise RuntimeError("gauge-dual LP: %s" % res.status)
    return res.value, res.x[y]


def _recover_z(p, w):
    """``argmin { kappa_polar(z) : D' z - w in K* }`` by LP (polyhedral data)."""
    kpe = p.kappa.polar_epigraph()
    if kpe is None:
        raise UnsupportedGaugeError("z recovery needs a polyhedral objective gauge")
    n = p.n
    D = np.eye(n) if p.D is None else p.D
    q = D.shape[0]
    L = LpAssembler()
    z = L.var(q)
    s = L.var(1)
    L.member(kpe, [(np.vstack([np.eye(q), np.zeros((1, q))]), z),
                   (np.concatenate([np.zeros(q), [1.0]])[:, None], s)])
    cone = p.cone if p.cone is not None else FreeSpace(n)
    L.member(cone.dual_polyhedron(), [(D.T, z)], const=-w)
    res = L.solve([([1.0], s)])
    if res.status != "optimal":
        raise RuntimeError("z recovery LP: %s" % res.status)
    return res.x[z], res.value


def build_lagrange_dual(p):
    """``maximize <b, y> - sigma rho_polar(y)  s.t.  kappa_polar(A' y) <= 1``."""
    g = _lifted_polar(p)
    A, b = p.A, p.b

    def objective(y):
        return p.dual_margin(y)

    def subgradient(y):
        # supergradient of the concave objective
        y = np.asarray(y, dtype=float)
        if p.sigma == 0:
            return b.copy()
        return b - p.sigma * p.rho.polar_subgradient(y)

    def constraint_value(y):
        return g.polar(A.T @ np.asarray(y, dtype=float))

    def feasible(y, tol=FEAS_TOL):
        return constraint_value(y) <= 1.0 + tol

    def restore(y):
        y = np.asarray(y, dtype=float)
        c = constraint_value(y)
        if math.isinf(c):
            return None
        return y / c if c > 1.0 else y

    desc = "max %s s.t. %s ≤ 1" % (_margin_name(p), _polar_name(p.kappa, "A*y"))
    if p.extended:
        desc = "max %s s.t. min{%s : D*z − A*y ∈ K*} ≤ 1" % (_margin_name(p), _polar_name(p.kappa, "z"))
    lp = None
    pe_k, pe_r = g.polar_epigraph(), p.rho.polar_epigraph()
    if pe_k is not None and (p.sigma == 0 or pe_r is not None):
        def lp():
            return _lagrange_lp(p, pe_k, pe_r)

    return DualProblem("lagrange_dual", "max", p, p.m, objective, subgradient, constraint_value,
                       feasible, restore, desc, "Lagrange dual", False, None, None, lp)


def _lagrange_lp(p, pe_k, pe_r):
    m, n = p.m, p.n
    L = LpAssembler()
    y = L.var(m)
    L.member(pe_k, [(np.vstack([p.A.T, np.zeros((1, m))]), y)],
             const=np.concatenate([np.zeros(n), [1.0]]))
    if p.sigma == 0:
        res = L.solve([(p.b, y)], maximize=True)
    else:
        r = L.var(1)
        L.member(pe_r, [(np.vstack([np.eye(m), np.zeros((1, m))]), y),
                        (np.concatenate([np.zeros(m), [1.0]])[:, None], r)])
        res = L.solve([(p.b, y), ([-p.sigma], r)], maximize=True)
    if res.status != "optimal":
        raise RuntimeError("Lagrange-dual LP: %s" % res.status)
    return res.value, res.x[y]


def build_bidual(p):
    """``minimize kappa_polar_polar(x)  s.t.  x in C''`` with ``C'' = union_{lam >= 1} lam C``.

    Raises
    ------
    InvalidProblemError
        If ``kappa`` is not closed.
    """
    if not p.kappa.closed:
        raise InvalidProblemError("the bi-dual needs a closed objective gauge")
    g = p.objective_gauge()
    C = p.feasible_set()
    Cpp = ScaledUp(C)
    try:
        gpp = polar_gauge(polar_gauge(g))
    except UnsupportedGaugeError:
        gpp = g

    def objective(x):
        return gpp.evaluate(np.asarray(x, dtype=float))

    def subgradient(x):
        raise NotImplementedError("the bi-dual is certified by value, not solved by subgradients")

    def feasible(x, tol=FEAS_TOL):
        x = np.asarray(x, dtype=float)
        if p.cone is not None and not p.cone.contains(x, tol=1e-9):
            return False
        return Cpp.contains(x, tol)

    def restore(x):
        return None

    lp = None
    epi = g.epigraph()
    Pc = C.polyhedron()
    if epi is not None and Pc is not None:
        def lp():
            return _bidual_lp(p, epi, Pc)

    desc = "min κ°°(x) s.t. x ∈ ∪_{λ≥1} λC"
    return DualProblem("bidual", "min", p, p.n, objective, subgradient, lambda x: math.nan,
                       feasible, restore, desc, "bi-dual over the scaled-up feasible set",
                       False, Cpp, None, lp)


def _bidual_lp(p, epi, Pc):
    n = p.n
    # the twice-dualised epigraph, not the original one
    epi2 = polar_epigraph(polar_epigraph(epi, n), n)
    Pcc = Pc.scaled_up()
    L = LpAssembler()
    x = L.var(n)
    t = L.var(1)
    L.member(epi2, [(np.vstack([np.eye(n), np.zeros((1, n))]), x),
                    (np.concatenate([np.zeros(n), [1.0]])[:, None], t)])
    L.member(Pcc, [(np.eye(n), x)])
    if p.cone is not None and p.cone.polyhedron() is not None:
        L.member(p.cone.polyhedron(), [(np.eye(n), x)])
    res = L.solve([([1.0], t)])
    if res.status != "optimal":
        raise RuntimeError("bi-dual LP: %s" % res.status)
    return res.value, res.x[x]


# ---------------------------------------------------------------------------
# certificates and solution maps


@dataclass
class DualityCertificate:
    x: np.ndarray
    y: np.ndarray
    v_p: float
    v_g: float
    product: Optional[float]
    primal_residual: float
    dual_residual: float
    flags: dict
    strong_duality: Optional[str]
    z: Optional[np.ndarray] = None
    v_f: Optional[float] = None

    @property
    def feasible(self):
        return self.primal_residual <= 1e-8 and self.dual_residual <= 1e-8

    def as_dict(self):
        def num(v):
            if v is None:
                return None
            return float(v) if math.isfinite(v) else str(v)
        return {
            "x": [float(v) for v in self.x],
            "y": [float(v) for v in self.y],
            "v_p": num(self.v_p),
            "v_g": num(self.v_g),
            "v_f": num(self.v_f),
            "product": num(self.product),
            "primal_residual": float(self.primal_residual),
            "dual_residual": float(self.dual_residual),
            "flags": dict(self.flags),
            "strong_duality": self.strong_duality,
        }


def certify(p, x, y, tol=1e-8):
    """Weak-duality certificate for a primal point ``x`` and gauge-dual point ``y``.

    The product ``v_p v_g`` is reported only when both points are feasible
    (residuals at most ``tol``); the strong-duality basis is attached only
    when the problem's recorded assumptions support one.
    """
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    g = p.objective_gauge()
    v_p = g.evaluate(x)
    z = None
    if p.extended and g.epigraph() is not None and p.kappa.polar_epigraph() is not None:
        z, v_g = _recover_z(p, p.A.T @ y)
    else:
        try:
            v_g = g.polar(p.A.T @ y)
        except InfinitePolarError:
            v_g = math.inf
    pres = p.primal_residual(x)
    margin = p.dual_margin(y)
    dres = max(0.0, 1.0 - margin) if math.isfinite(margin) else math.inf
    product = None
    if pres <= tol and dres <= tol and math.isfinite(v_p) and math.isfinite(v_g):
        product = v_p * v_g
    v_f = 1.0 / v_g if v_g and math.isfinite(v_g) else None
    return DualityCertificate(x, y, v_p, v_g, product, pres, dres, p.assumption_flags(),
                              p.strong_duality_basis(), z, v_f)


def map_dual_solutions(y, source, values):
    """Rescale a dual solution between the Lagrange, gauge and Fenchel duals.

    Parameters
    ----------
    y : array_like
    source : {"lagrange", "gauge", "fenchel"}
    values : dict
        ``{"v_l": ...}`` for ``lagrange`` (``y / v_l`` solves the gauge
        dual), ``{"v_l": ...}`` for ``gauge`` (``v_l y`` solves the
        Lagrange dual), ``{"v_f": ...}`` for ``fenchel`` (``y / v_f``
        solves the gauge dual).
    """
    y = np.asarray(y, dtype=float)
    key = "v_f" if source == "fenchel" else "v_l"
    if source not in ("lagrange", "gauge", "fenchel"):
        raise ValueError("unknown source %r" % (source,))
    v = values.get(key)
    if v is None and source == "gauge" and values.get("v_g"):
        v = 1.0 / values["v_g"]
    if v is None or not math.isfinite(v) or v <= 0:
        raise ValueError("rescaling needs a positive finite %s" % key)
    return y * v if source == "gauge" else y / v
