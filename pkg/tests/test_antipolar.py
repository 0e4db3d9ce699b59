import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugedual.antipolar import (
    Antipolar,
    NotRayLikeError,
    OriginInSetError,
    antipolar,
    biantipolar_check,
    is_raylike,
    membership,
    recession_identity_check,
)
from gaugedual.cones import NonnegOrthant, PolyhedralCone
from gaugedual.gauges import Norm
from gaugedual.sets import (
    Affine,
    ConeTranslate,
    GaugeBallTranslate,
    GenericAntipolar,
    Halfspace,
    HullOfUnion,
    Image,
    Intersection,
    Preimage,
    Ray,
    Union,
    UnsupportedSetError,
)

H1 = Halfspace([1.0, 1.0], 1.0)
H2 = Halfspace([1.0, -1.0], 1.0)
C1 = Intersection([H1, H2])
C2 = Affine([[1.0, 0.0]], [1.0])


def random_positive_polyhedron(rng, dim):
    """Intersection of halfspaces ``<a, x> >= beta > 0`` sharing a common direction."""
    k = int(rng.integers(1, 4))
    a = np.eye(dim)[0] + 0.6 * rng.standard_normal((k, dim))
    return Intersection([Halfspace(r, float(rng.uniform(0.5, 2.0))) for r in a])


def probe_near(S, rng, count, spread=0.3):
    """Points of ``S`` jittered so that both memberships occur (Gaussian if ``S`` is empty)."""
    try:
        pts = S.sample(rng, count)
    except UnsupportedSetError:
        return 3.0 * rng.standard_normal((count, S.dim))
    return pts + spread * rng.standard_normal(pts.shape) * (1.0 + np.abs(pts).max(axis=1, keepdims=True))


# ---------------------------------------------------------------------------
# examples


def test_ball_translate_antipolar():
    B = GaugeBallTranslate(Norm("two", 2), [2.0, 0.0], 1.0)
    A = antipolar(B)
    assert A.contains(np.array([1.0, 0.0]))
    assert not A.contains(np.array([0.0, 1.0]))


def test_affine_antipolar():
    A = antipolar(Affine([[1.0, 1.0]], [2.0]))
    assert A.contains(np.array([1.0, 1.0]))
    assert A.contains(np.array([0.5, 0.5]))
    assert not A.contains(np.array([0.4, 0.4]))
    assert not A.contains(np.array([1.0, 0.9]))


def test_cone_translate_antipolar():
    A = antipolar(ConeTranslate([1.0, -0.5], NonnegOrthant(2)))
    assert A.contains(np.array([1.0, 0.0]))
    assert not A.contains(np.array([1.0, -0.1]))
    assert A.rule == "cone translate"


def test_membership_examples():
    assert membership(Halfspace([1.0, 1.0], 1.0), [1.0, 0.0])
    assert membership(GaugeBallTranslate(Norm("two", 2), [3.0, 4.0], 5.0), [0.0, 0.0])
    assert membership(C1, [1.0, 0.0])


def test_origin_in_set_rejected():
    with pytest.raises(OriginInSetError):
        antipolar(Halfspace([1.0, 0.0], -1.0))
    with pytest.raises(OriginInSetError):
        antipolar(GaugeBallTranslate(Norm("two", 2), [3.0, 4.0], 5.0))


def test_halfspace_ray_pair():
    A = antipolar(Halfspace([2.0, 0.0], 4.0))
    assert isinstance(A.body, Ray)
    assert A.contains(np.array([0.5, 0.0])) and A.contains(np.array([3.0, 0.0]))
    assert not A.contains(np.array([0.4, 0.0]))


# ---------------------------------------------------------------------------
# ray-like verdicts


def test_raylike_verdicts():
    verdict, witness = is_raylike(C2)
    assert verdict == "no"
    x, y, alpha = witness
    assert C2.contains(x) and C2.contains(y) and not C2.contains(x + alpha * y)
    assert is_raylike(H1)[0] == "yes"
    assert is_raylike(H2)[0] == "yes"
    assert is_raylike(C1)[0] == "yes"
    assert is_raylike(antipolar(GaugeBallTranslate(Norm("two", 2), [2.0, 0.0], 1.0)))[0] == "yes"


def test_antipolar_outputs_are_raylike_by_sampling():
    rng = np.random.default_rng(0)
    for C in (GaugeBallTranslate(Norm("two", 2), [2.0, 0.0], 1.0), C2, C1):
        A = antipolar(C)
        assert isinstance(A, Antipolar)
        pts = A.sample(rng, 30)
        for i in range(30):
            assert A.contains(pts[i] + 3.0 * pts[(i + 1) % 30], 1e-7)


# ---------------------------------------------------------------------------
# counterexample


def test_counterexample_memberships():
    C = Intersection([C1, C2])
    y = np.array([1.0, 1.5])
    assert GenericAntipolar(C).contains(y)
    hull = HullOfUnion([antipolar(C1), antipolar(C2)])
    assert not hull.contains(y)
    # the hull is {y1 >= 1, |y2| <= y1}
    assert hull.contains(np.array([1.0, 0.9]))


def test_counterexample_rule_refused():
    with pytest.raises(NotRayLikeError) as exc:
        antipolar(Intersection([C1, C2]))
    assert "ray-like" in str(exc.value)


# ---------------------------------------------------------------------------
# soundness and calculus rules


@pytest.mark.parametrize("C", [
    H1,
    C1,
    C2,
    GaugeBallTranslate(Norm("two", 2), [2.0, 0.0], 1.0),
    GaugeBallTranslate(Norm("one", 2), [2.0, 1.0], 0.5),
    ConeTranslate([1.0, -0.5], NonnegOrthant(2)),
    Image([[1.0, 0.0], [1.0, 1.0]], Halfspace([1.0, 2.0], 1.0)),
    Preimage([[1.0, 1.0]], Halfspace([1.0], 1.0)),
    Union([C1, Halfspace([1.0, 0.0], 2.0)]),
], ids=lambda C: type(C).__name__)
def test_antipolar_soundness(C):
    rng = np.random.default_rng(1)
    A = antipolar(C)
    xs = C.sample(rng, 100)
    ys = A.sample(rng, 100)
    assert np.all(np.einsum("ij,ij->i", xs, ys) >= 1 - 1e-8)
    assert np.all((xs @ ys.T) >= 1 - 1e-8)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_union_rule_matches_definition(seed):
    rng = np.random.default_rng(seed)
    U = Union([random_positive_polyhedron(rng, 2), random_positive_polyhedron(rng, 2)])
    rule, definition = antipolar(U), GenericAntipolar(U)
    for y in probe_near(rule, rng, 25):
        assert rule.contains(y) == definition.contains(y)


@settings(max_examples=20, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_image_rule_matches_adjoint_membership(seed):
    rng = np.random.default_rng(seed)
    C = random_positive_polyhedron(rng, 3)
    A = rng.standard_normal((2, 3))
    S = Image(A, C)
    try:
        rule = antipolar(S)
    except OriginInSetError:
        return
    inner = antipolar(C)
    for y in rng.standard_normal((25, 2)) * 3:
        assert rule.contains(y) == inner.contains(A.T @ y)
        assert rule.contains(y) == GenericAntipolar(S).contains(y)


def test_preimage_without_certificate_flags_closure():
    rho = Norm("two", 2)
    S = Preimage([[1.0, 0.0], [0.0, 1.0]], GaugeBallTranslate(rho, [3.0, 0.0], 1.0))
    assert antipolar(S).closure_taken
    S2 = Preimage([[1.0, 0.0], [0.0, 1.0]], GaugeBallTranslate(rho, [3.0, 0.0], 1.0),
                  ri_certified=True)
    assert not antipolar(S2).closure_taken
    assert not antipolar(Preimage([[1.0, 1.0]], Halfspace([1.0], 1.0))).closure_taken


# ---------------------------------------------------------------------------
# bi-antipolar


@pytest.mark.parametrize("C", [
    H1,
    C1,
    Ray([1.0, 2.0]),
    ConeTranslate([1.0, 1.0], NonnegOrthant(2)),
    Intersection([Halfspace([1.0, 0.0, 0.0], 1.0), Halfspace([0.0, 1.0, 1.0], 0.5)]),
], ids=lambda C: type(C).__name__)
def test_biantipolar_raylike(C):
    r = biantipolar_check(C, samples=200, seed=3)
    assert r.raylike == "yes"
    assert r.agreement == 1.0 and r.equals_set_rate == 1.0 and r.ok


def test_biantipolar_line_grows_to_halfline():
    C = Affine([[1.0]], [1.0])
    r = biantipolar_check(C, samples=200, seed=0)
    assert r.agreement == 1.0
    assert r.equals_set_rate < 1.0
    Cpp = antipolar(antipolar(C))
    assert Cpp.contains(np.array([3.0])) and not C.contains(np.array([3.0]))
    assert not Cpp.contains(np.array([0.9]))


def test_biantipolar_ball_strictly_larger():
    C = GaugeBallTranslate(Norm("two", 2), [3.0, 0.0], 1.0)
    r = biantipolar_check(C, samples=200, seed=0)
    assert r.agreement == 1.0 and r.equals_set_rate < 1.0
    assert antipolar(antipolar(C)).contains(np.array([8.0, 0.0]))


# ---------------------------------------------------------------------------
# recession identity


def test_recession_line_example():
    C = Affine([[1.0, 1.0]], [2.0])
    r = recession_identity_check(C, directions=100, seed=0)
    assert r.ok
    d = np.array([1.0, 1.0]) / np.sqrt(2.0)
    assert C.inf_linear(d) >= 0
    y0 = np.array([0.5, 0.5])
    A = antipolar(C)
    assert all(A.contains(y0 + t * d) for t in (1.0, 10.0, 100.0))


def test_recession_cone_translate():
    assert recession_identity_check(ConeTranslate([1.0, 1.0], NonnegOrthant(2)), 200).ok


@settings(max_examples=10, deadline=None)
@given(seed=st.integers(0, 10**6))
def test_recession_random_polyhedral(seed):
    rng = np.random.default_rng(seed)
    C = random_positive_polyhedron(rng, 2)
    assert recession_identity_check(C, directions=60, seed=seed).ok


def test_recession_cone_translate_polyhedral_cone():
    rng = np.random.default_rng(4)
    R = np.abs(rng.standard_normal((3, 4)))
    C = ConeTranslate(R @ np.ones(4), PolyhedralCone(R))
    assert recession_identity_check(C, directions=200, seed=1).ok
