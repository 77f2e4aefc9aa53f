import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from darboux_monodromy.errors import AtInfinity, Boundary, ChartSingularity, DegenerateSplitting, InvalidR
from darboux_monodromy.minkowski import inner, minkowski_defect
from darboux_monodromy.space_forms import (
    ORIGIN, Q_CHECK, Q_HALFPLANE, NullSplitting, SpaceForm, euclidean_lift, gamma, gamma_matrix,
    halfplane_lift, kappa_lift, project, q_kappa, split,
)

coord = st.floats(-3, 3, allow_nan=False)


def test_space_form_vectors():
    for k in (-2.0, -1.0, 0.5, 1.0, 4.0):
        assert inner(q_kappa(k), q_kappa(k)) == pytest.approx(-k, abs=1e-14)
    assert inner(Q_CHECK, Q_CHECK) == 0
    assert SpaceForm.curved(0.0).kind == "euclidean"


def test_euclidean_lift_examples():
    assert np.allclose(euclidean_lift([0, 0]), [0.5, 0, 0, 0.5])
    assert np.allclose(euclidean_lift([1, 0]), [1, 1, 0, 0])
    x = np.array([0.3, -1.2])
    r2 = x @ x
    assert np.allclose(euclidean_lift(x), [(1 + r2) / 2, x[0], x[1], (1 - r2) / 2])


def test_kappa_lift_examples():
    assert np.allclose(kappa_lift([0, 0], -1.0), [1, 0, 0, 1])
    assert np.allclose(kappa_lift([1, 0], 1.0), [1, 1, 0, 0])
    assert np.allclose(kappa_lift([0.2, 0.4], 0.0), euclidean_lift([0.2, 0.4]))
    with pytest.raises(ChartSingularity):
        kappa_lift([1, 0], -1.0)


def test_halfplane_examples():
    assert np.allclose(halfplane_lift([0, 1]), [1, 0, 1, 0])
    assert np.allclose(halfplane_lift([1, 1]), [1.5, 1, 1, -0.5])
    with pytest.raises(Boundary):
        halfplane_lift([1, 0])


@given(coord, coord)
def test_lifts_normalised_and_null(x1, x2):
    x = np.array([x1, x2])
    X = euclidean_lift(x)
    assert abs(inner(X, X)) < 1e-10 * (1 + x @ x) ** 2
    assert inner(X, Q_CHECK) == pytest.approx(-1)
    if abs(x2) > 1e-3:
        assert inner(halfplane_lift(x), Q_HALFPLANE) == pytest.approx(-1)
    for k in (1.0, -0.05):
        if abs(1 + k * (x @ x)) > 1e-3:
            assert inner(kappa_lift(x, k), q_kappa(k)) == pytest.approx(-1, rel=1e-9)


@given(coord, coord)
def test_project_round_trip(x1, x2):
    x = np.array([x1, x2])
    assert np.allclose(project(euclidean_lift(x), SpaceForm.euclidean()), x, atol=1e-12)
    if abs(1 + x @ x) > 1e-3:
        sf = SpaceForm.curved(1.0)
        assert np.allclose(project(sf.lift(x), sf), x, atol=1e-12)
    if abs(x2) > 1e-3:
        sf = SpaceForm.halfplane()
        assert np.allclose(project(sf.lift(x), sf), x, atol=1e-11)


def test_project_examples():
    assert np.allclose(project([1, 0, 0, 1], SpaceForm.curved(-1.0)), [0, 0])
    with pytest.raises(AtInfinity):
        project(3 * Q_CHECK, SpaceForm.euclidean())


def test_metric_checks():
    s = np.linspace(0, 2 * np.pi, 50)
    x = np.stack([np.cos(s) * 0.7, np.sin(2 * s) * 0.3 + 1.5], axis=-1)
    xp = np.stack([-np.sin(s) * 0.7, 0.6 * np.cos(2 * s)], axis=-1)
    n2 = np.sum(xp * xp, axis=-1)
    _, Xp = euclidean_lift(x, xp)
    assert np.allclose(inner(Xp, Xp), n2)
    for k in (1.0, -0.1):
        _, Xp = kappa_lift(x, k, xp)
        assert np.allclose(inner(Xp, Xp), 4 * n2 / (1 + k * np.sum(x * x, axis=-1)) ** 2)
    _, Xp = halfplane_lift(x, xp)
    assert np.allclose(inner(Xp, Xp), n2 / x[:, 1] ** 2)


def random_splitting(rng):
    def null():
        u = rng.normal(size=3)
        return np.concatenate([[np.linalg.norm(u)], u]) * rng.uniform(0.5, 3)
    return NullSplitting(null(), null())


def test_split_and_gamma(rng):
    for _ in range(20):
        s = random_splitting(rng)
        v = rng.normal(size=4)
        vL, vW, vLh = split(v, s)
        assert np.allclose(vL + vW + vLh, v, atol=1e-13)
        assert abs(inner(vW, s.X)) < 1e-12 * np.linalg.norm(v) * np.linalg.norm(s.X) * 10
        assert abs(inner(vW, s.Xhat)) < 1e-12 * np.linalg.norm(v) * np.linalg.norm(s.Xhat) * 10
        assert np.allclose(split(s.X, s)[0], s.X)
        assert np.allclose(split(s.X + s.Xhat, s)[2], s.Xhat)
        r = rng.uniform(0.2, 3) * rng.choice([-1, 1])
        assert np.allclose(gamma(1.0, s, v), v)
        assert np.allclose(gamma(2.0, s, s.Xhat), 2 * s.Xhat)
        assert np.allclose(gamma(r, s, gamma(1 / r, s, v)), v)
        M = gamma_matrix(r, s)
        assert minkowski_defect(M) < 1e-13 * np.linalg.norm(M) ** 2
        assert np.allclose(M @ v, gamma(r, s, v))
        assert np.allclose(M @ vW, vW)
        # scale invariance in each section
        s2 = NullSplitting(3 * s.X, -0.5 * s.Xhat)
        assert np.allclose(gamma_matrix(r, s2), M)


def test_splitting_errors():
    X = np.array([1.0, 1, 0, 0])
    with pytest.raises(DegenerateSplitting):
        split(np.ones(4), NullSplitting(X, 2 * X))
    with pytest.raises(InvalidR):
        gamma(0.0, NullSplitting(X, np.array([1.0, -1, 0, 0])), np.ones(4))
