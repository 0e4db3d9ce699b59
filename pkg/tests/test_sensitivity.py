import math

import numpy as np
import pytest

from gaugedual.duality import GaugeProblem
from gaugedual.gauges import Norm
from gaugedual.instances import bpdn, conic_orthant, min_norm
from gaugedual.sensitivity import (
    ConstraintQualificationError,
    InvalidPerturbationError,
    Subgradient2,
    ValueFunctionProbe,
    check_subgradient_inequality,
    convexity_midpoints,
    sigma_sweep,
    value_function,
    value_subgradient,
)


def polyhedral_ball():
    return GaugeProblem(Norm("one", 2), [[1.0, 2.0], [1.0, -1.0]], [3.0, 1.0], Norm("inf", 2), 0.5)


# ---------------------------------------------------------------------------
# value function


def test_value_at_origin_is_primal_value():
    probe = ValueFunctionProbe(min_norm().problem)
    assert value_function(probe, [0.0], 0.0) == pytest.approx(2.0)


@pytest.mark.parametrize("eps", [-0.2, 0.05, 0.5])
def test_min_norm_value_is_homogeneous_in_b(eps):
    probe = ValueFunctionProbe(min_norm().problem)
    assert value_function(probe, [2.0 * eps], 0.0) == pytest.approx((1 + eps) * 2.0)


def test_bpdn_value_decreases_in_sigma():
    probe = ValueFunctionProbe(bpdn().problem, steps=tuple(np.linspace(-0.5, 2.0, 11)))
    sweep = sigma_sweep(probe)
    assert sweep["nonincreasing"]
    assert len(sweep["value"]) == 11
    assert all(b < a for a, b in zip(sweep["value"], sweep["value"][1:]))


def test_invalid_perturbations():
    probe = ValueFunctionProbe(bpdn().problem)
    with pytest.raises(InvalidPerturbationError):
        probe.perturbed([0.0, 0.0], -2.0)
    with pytest.raises(InvalidPerturbationError):
        probe.perturbed([0.0, 0.0], 4.5)
    assert not probe.valid([-3.0, -4.0], 0.0)


# ---------------------------------------------------------------------------
# subgradients


def test_min_norm_subgradient():
    g = value_subgradient(min_norm().problem)
    assert g.y == pytest.approx([1.0], abs=1e-9)
    assert g.tau == pytest.approx(-1.0, abs=1e-9)


def test_bpdn_subgradient():
    g = value_subgradient(bpdn().problem)
    assert g.y == pytest.approx([1.0, 1.0], abs=1e-8)
    assert g.tau == pytest.approx(-math.sqrt(2.0), abs=1e-8)


@pytest.mark.parametrize("make", [lambda: min_norm().problem, lambda: bpdn().problem,
                                  lambda: conic_orthant().problem, polyhedral_ball],
                         ids=["min-norm", "bpdn", "conic-orthant", "ball"])
def test_routes_agree(make):
    p = make()
    g1 = value_subgradient(p, "lagrange")
    g2 = value_subgradient(p, "gauge")
    assert g1.distance(g2) <= 1e-6
    for g in (g1, g2):
        assert g.tau == pytest.approx(-p.rho.polar(g.y), abs=1e-8)


def test_subgradient_needs_declared_interior():
    with pytest.raises(ConstraintQualificationError):
        value_subgradient(min_norm().problem, interior_declared=False)


def test_unknown_route():
    with pytest.raises(ValueError):
        value_subgradient(min_norm().problem, route="fenchel")


def test_pairing():
    g = Subgradient2(np.array([1.0, 2.0]), -3.0)
    assert g.pair([1.0, 1.0], 2.0) == pytest.approx(-3.0)
    assert g.as_dict() == {"y": [1.0, 2.0], "tau": -3.0, "route": "lagrange"}


# ---------------------------------------------------------------------------
# inequality and derivatives


def test_min_norm_grid_inequality():
    p = min_norm().problem
    probe = ValueFunctionProbe(p, steps=(-0.1, 0.0, 0.1), interior_declared=True)
    r = check_subgradient_inequality(probe, value_subgradient(p))
    assert len(r.rows) == 9
    assert r.pass_rate == 1.0 and r.ok
    zero = [row for row in r.rows if not np.any(row["h"]) and row["k"] == 0.0][0]
    assert zero["value"] == pytest.approx(zero["bound"], abs=1e-12)


def test_bpdn_grid_inequality_and_sigma_derivative():
    p = bpdn().problem
    probe = ValueFunctionProbe(p, steps=(-0.1, 0.0, 0.1), interior_declared=True)
    g = value_subgradient(p)
    r = check_subgradient_inequality(probe, g)
    assert r.pass_rate == 1.0
    assert r.derivatives_ok
    d_sigma = r.derivatives[-1]
    assert d_sigma["k"] == 1.0
    # v is smooth in sigma here: dv/dk = -rho_polar(y) = -sqrt(2)
    assert d_sigma["differentiable"]
    assert d_sigma["forward"] == pytest.approx(-math.sqrt(2.0), abs=1e-3)


def test_kinks_are_detected():
    # v(0, k) = (1 - sigma) + max(0.5 - sigma, 0) is kinked at sigma = 0.5
    p = GaugeProblem(Norm("one", 2), np.eye(2), [1.0, 0.5], Norm("inf", 2), 0.5)
    probe = ValueFunctionProbe(p, steps=(-0.05, 0.0, 0.05), interior_declared=True)
    r = check_subgradient_inequality(probe, value_subgradient(p))
    assert r.pass_rate == 1.0 and r.derivatives_ok
    d_sigma = r.derivatives[-1]
    assert not d_sigma["differentiable"]
    assert d_sigma["forward"] == pytest.approx(-1.0, abs=1e-6)
    assert d_sigma["backward"] == pytest.approx(-2.0, abs=1e-6)
    assert -2.0 - 1e-9 <= r.subgradient.tau <= -1.0 + 1e-9


def test_polyhedral_ball_grid():
    p = polyhedral_ball()
    probe = ValueFunctionProbe(p, steps=(-0.05, 0.0, 0.05), interior_declared=True)
    r = check_subgradient_inequality(probe, value_subgradient(p))
    assert r.pass_rate == 1.0 and r.derivatives_ok
    assert len(r.rows) == 27 and len(r.derivatives) == 3


def test_wrong_subgradient_is_caught():
    p = min_norm().problem
    probe = ValueFunctionProbe(p, steps=(-0.1, 0.0, 0.1), interior_declared=True)
    r = check_subgradient_inequality(probe, Subgradient2(np.array([2.0]), -1.0))
    assert r.pass_rate < 1.0 and not r.ok


def test_invalid_grid_points_are_skipped():
    p = bpdn().problem
    probe = ValueFunctionProbe(p, steps=(-2.0, 0.0), interior_declared=True)
    r = check_subgradient_inequality(probe, value_subgradient(p))
    assert any(row["ok"] is None for row in r.rows)
    assert r.pass_rate == 1.0


def test_report_dict():
    p = min_norm().problem
    probe = ValueFunctionProbe(p, steps=(0.0,), interior_declared=True)
    d = check_subgradient_inequality(probe, value_subgradient(p)).as_dict()
    assert d["pass_rate"] == 1.0 and len(d["grid"]) == 1


# ---------------------------------------------------------------------------
# convexity


@pytest.mark.parametrize("make", [lambda: min_norm().problem, lambda: bpdn().problem, polyhedral_ball],
                         ids=["min-norm", "bpdn", "ball"])
def test_midpoint_convexity(make):
    probe = ValueFunctionProbe(make())
    defects = convexity_midpoints(probe, np.random.default_rng(0), count=20, radius=0.2)
    assert defects.max() <= 1e-8
