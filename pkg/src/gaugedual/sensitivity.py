"""Value function of a gauge program under perturbations of ``b`` and ``sigma``.

``v(h, k)`` is the optimal value with data ``b + h`` and tolerance
``sigma + k``. At the origin its subgradients are the pairs
``(y, -rho_polar(y))`` with ``y`` a Lagrange-dual solution; equivalently
``v(0, 0) (y, -rho_polar(y))`` with ``y`` a gauge-dual solution.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .duality import GaugeProblem, build_gauge_dual, build_lagrange_dual
from .solvers import (
    SubgradConfig,
    UnsupportedFamilyError,
    solve_gauge_dual,
    solve_lagrange_dual,
    solve_primal_oracle,
)

__all__ = [
    "ConstraintQualificationError",
    "InvalidPerturbationError",
    "SensitivityReport",
    "Subgradient2",
    "ValueFunctionProbe",
    "check_subgradient_inequality",
    "convexity_midpoints",
    "sigma_sweep",
    "value_function",
    "value_subgradient",
]

FD_STEPS = (1e-3, 1e-4)


class InvalidPerturbationError(ValueError):
    pass


class ConstraintQualificationError(ValueError):
    pass


@dataclass(frozen=True)
class Subgradient2:
    """An element ``(y, tau)`` of the subdifferential of ``v`` at the origin."""

    y: np.ndarray
    tau: float
    route: str = "lagrange"

    def pair(self, h, k):
        return float(self.y @ np.asarray(h, dtype=float)) + self.tau * float(k)

    def as_dict(self):
        return {"y": [float(v) for v in self.y], "tau": float(self.tau), "route": self.route}

    def distance(self, other):
        """Largest coordinate gap to another subgradient."""
        return float(max(np.abs(self.y - other.y).max(initial=0.0), abs(self.tau - other.tau)))


@dataclass
class ValueFunctionProbe:
    """Perturbation grid around a base problem.

    ``steps`` is applied along every coordinate of ``h`` and along ``k``;
    the grid is their Cartesian product. ``interior_declared`` records the
    caller's claim that ``(0, 0)`` lies in the interior of ``dom v``.
    """

    problem: GaugeProblem
    steps: tuple = (-0.1, 0.0, 0.1)
    interior_declared: bool = False
    directions: list = field(default_factory=list)

    def grid(self):
        m = self.problem.m
        for t in itertools.product(self.steps, repeat=m + 1):
            yield np.array(t[:m], dtype=float), float(t[m])

    def perturbed(self, h, k):
        p = self.problem
        h = np.asarray(h, dtype=float)
        b, sigma = p.b + h, p.sigma + float(k)
        if sigma < 0:
            raise InvalidPerturbationError("sigma + k = %g is negative" % sigma)
        if sigma >= p.rho.evaluate(b):
            raise InvalidPerturbationError("sigma + k >= rho(b + h): the origin becomes feasible")
        return GaugeProblem(p.kappa, p.A, b, p.rho, sigma, cone=p.cone, D=p.D,
                            ri_declared=p.ri_declared, name=p.name)

    def valid(self, h, k):
        try:
            self.perturbed(h, k)
        except InvalidPerturbationError:
            return False
        return True


def value_function(probe, h, k):
    """``v(h, k)`` by the primal oracle of the perturbed problem."""
    return solve_primal_oracle(probe.perturbed(h, k)).value


def value_subgradient(p, route="lagrange", cfg=SubgradConfig(), interior_declared=True, v00=None):
    """A subgradient of ``v`` at the origin from a solved dual.

    Parameters
    ----------
    route : {"lagrange", "gauge"}
        ``lagrange`` returns ``(y, -rho_polar(y))`` for a Lagrange-dual
        solution ``y``; ``gauge`` rescales a gauge-dual solution by
        ``v(0, 0)``.
    v00 : float, optional
        Base value for the gauge route; the primal oracle is used when
        omitted and ``1 / v_g`` when no oracle exists.
    """
    if not interior_declared:
        raise ConstraintQualificationError(
            "the origin must be declared interior to dom v before extracting subgradients")
    if route == "lagrange":
        res = solve_lagrange_dual(build_lagrange_dual(p), cfg)
        if not res.value > 0:
            raise ValueError("v(0, 0) must be positive")
        y = res.x
        return Subgradient2(y, -p.rho.polar(y), "lagrange")
    if route != "gauge":
        raise ValueError("unknown route %r" % (route,))
    res = solve_gauge_dual(build_gauge_dual(p), cfg)
    if v00 is None:
        try:
            v00 = solve_primal_oracle(p).value
        except UnsupportedFamilyError:
            v00 = 1.0 / res.value
    if not v00 > 0:
        raise ValueError("v(0, 0) must be positive")
    y = v00 * res.x
    return Subgradient2(y, -p.rho.polar(y), "gauge")


@dataclass
class SensitivityReport:
    base_value: float
    subgradient: Subgradient2
    rows: list
    derivatives: list

    @property
    def pass_rate(self):
        checked = [r for r in self.rows if r["ok"] is not None]
        return sum(r["ok"] for r in checked) / max(1, len(checked))

    @property
    def derivatives_ok(self):
        return all(d["ok"] for d in self.derivatives if d["differentiable"])

    @property
    def ok(self):
        return self.pass_rate == 1.0 and self.derivatives_ok

    def as_dict(self):
        return {
            "base_value": self.base_value,
            "subgradient": self.subgradient.as_dict(),
            "pass_rate": self.pass_rate,
            "derivatives_ok": self.derivatives_ok,
            "grid": [{"h": [float(v) for v in r["h"]], "k": r["k"], "value": r["value"],
                      "bound": r["bound"], "ok": r["ok"]} for r in self.rows],
            "derivatives": self.derivatives,
        }


def _directions(probe):
    if probe.directions:
        return [(np.asarray(h, dtype=float), float(k)) for h, k in probe.directions]
    m = probe.problem.m
    out = []
    for i in range(m + 1):
        e = np.zeros(m + 1)
        e[i] = 1.0
        out.append((e[:m], float(e[m])))
    return out


def check_subgradient_inequality(probe, g, tol=1e-7, deriv_tol=1e-3, kink_tol=1e-4):
    """Check ``v(h, k) >= v(0, 0) + <g, (h, k)>`` on the probe grid.

    Along each direction, forward and backward differences at the steps in
    ``FD_STEPS`` decide differentiability (agreement within ``kink_tol``);
    where differentiable the derivative must match ``<g, dir>`` within
    ``deriv_tol``. Points whose perturbation is invalid are reported with
    ``ok = None``.
    """
    m = probe.problem.m
    v00 = value_function(probe, np.zeros(m), 0.0)
    rows = []
    for h, k in probe.grid():
        if not probe.valid(h, k):
            rows.append({"h": h, "k": k, "value": None, "bound": None, "ok": None})
            continue
        v = value_function(probe, h, k)
        bound = v00 + g.pair(h, k)
        rows.append({"h": h, "k": k, "value": float(v), "bound": float(bound),
                     "ok": bool(v >= bound - tol)})
    derivs = []
    for h, k in _directions(probe):
        fwd, bwd = [], []
        for t in FD_STEPS:
            if probe.valid(t * h, t * k):
                fwd.append((value_function(probe, t * h, t * k) - v00) / t)
            if probe.valid(-t * h, -t * k):
                bwd.append((v00 - value_function(probe, -t * h, -t * k)) / t)
        pred = g.pair(h, k)
        two_sided = len(fwd) == len(FD_STEPS) and len(bwd) == len(FD_STEPS)
        smooth = two_sided and all(abs(a - b) <= kink_tol for a, b in zip(fwd, bwd)) \
            and abs(fwd[-1] - fwd[0]) <= kink_tol * 10
        entry = {"h": [float(v) for v in h], "k": k, "predicted": pred,
                 "forward": fwd[-1] if fwd else None, "backward": bwd[-1] if bwd else None,
                 "differentiable": bool(smooth)}
        if smooth:
            entry["ok"] = bool(abs(0.5 * (fwd[-1] + bwd[-1]) - pred) <= deriv_tol)
        else:
            # one-sided derivatives still bracket every subgradient pairing
            ok = True
            if fwd:
                ok &= fwd[-1] >= pred - deriv_tol
            if bwd:
                ok &= bwd[-1] <= pred + deriv_tol
            entry["ok"] = bool(ok)
        derivs.append(entry)
    return SensitivityReport(float(v00), g, rows, derivs)


def convexity_midpoints(probe, rng, count=20, radius=0.1):
    """Midpoint-convexity defects ``v(mid) - (v(a) + v(b)) / 2`` on random segments."""
    m = probe.problem.m
    out = []
    while len(out) < count:
        a = rng.uniform(-radius, radius, m + 1)
        b = rng.uniform(-radius, radius, m + 1)
        c = 0.5 * (a + b)
        if not all(probe.valid(z[:m], z[m]) for z in (a, b, c)):
            continue
        va, vb, vc = (value_function(probe, z[:m], z[m]) for z in (a, b, c))
        out.append(vc - 0.5 * (va + vb))
    return np.array(out)


def sigma_sweep(probe):
    """``v(0, k)`` over the probe steps in ``k``, and whether it is nonincreasing."""
    m = probe.problem.m
    rows = []
    for k in sorted(set(probe.steps)):
        if probe.valid(np.zeros(m), k):
            rows.append((float(k), float(value_function(probe, np.zeros(m), k))))
    vals = [v for _, v in rows]
    mono = all(b <= a + 1e-9 * max(1.0, abs(a)) for a, b in zip(vals, vals[1:]))
    return {"k": [k for k, _ in rows], "value": vals, "nonincreasing": mono}
