import numpy as np
import pytest
import scipy.linalg as sl

from darboux_monodromy.errors import StepTooCoarse
from darboux_monodromy.integrators import (
    SCHEMES, StepData, _series_coeffs, integrate_frame, monodromy_matrices, tree_product,
)
from darboux_monodromy.minkowski import G, minkowski_defect, wedge
from darboux_monodromy.space_forms import euclidean_lift


def circle_oracle(mu):
    X0, X0p = euclidean_lift(np.array([1.0, 0]), np.array([0.0, 1]))
    J = np.zeros((4, 4))
    J[2, 1], J[1, 2] = 1, -1
    return sl.expm(2 * np.pi * (-mu * wedge(X0, X0p) - J))


def test_mu_zero_identity(fig1):
    for scheme in SCHEMES:
        assert np.array_equal(integrate_frame(fig1, 0.0, 0, fig1.period, 64, scheme), np.eye(4))


def test_series_matches_expm(rng):
    for _ in range(10):
        A = rng.normal(size=(4, 4)) * 0.3
        W = G @ (A - A.T)
        f = _series_coeffs(0.5 * np.trace(W @ W), np.linalg.det(W))
        E = f[0] * np.eye(4) + f[1] * W + f[2] * W @ W + f[3] * W @ W @ W
        assert np.allclose(E, sl.expm(W), atol=1e-14)


def test_tree_product_order(rng):
    S = rng.normal(size=(7, 4, 4))
    ref = np.eye(4)
    for k in range(7):
        ref = S[k] @ ref
    assert np.allclose(tree_product(S), ref)


@pytest.mark.parametrize("scheme,tol", [("magnus4", 1e-9), ("rk4", 1e-9), ("midpoint", 1e-4)])
def test_circle_oracle(circle, scheme, tol):
    mus = np.array([0.3, 1.7, 4.2])
    M = monodromy_matrices(circle, mus, 4096, scheme)
    for m, mu in zip(M, mus):
        assert np.linalg.norm(m - circle_oracle(mu)) < tol


def test_midpoint_second_order(circle):
    e = [np.linalg.norm(monodromy_matrices(circle, [2.0], n, "midpoint")[0] - circle_oracle(2.0))
         for n in (512, 1024)]
    assert 3.5 < e[0] / e[1] < 4.5


def test_magnus_fourth_order(circle):
    e = [np.linalg.norm(monodromy_matrices(circle, [4.0], n, "magnus4")[0] - circle_oracle(4.0))
         for n in (64, 128)]
    assert 12 < e[0] / e[1] < 20


def test_defect_small(fig1):
    M = integrate_frame(fig1, 1.0, 0, fig1.period, 4096)
    assert minkowski_defect(M) < 1e-10
    assert abs(np.linalg.det(M) - 1) < 1e-10


def test_frames_consistent(fig2):
    data = StepData(fig2, 0, fig2.period, 256)
    A = data.frames(1.3)
    assert np.allclose(A[-1], data.propagate([1.3])[0], atol=1e-11)
    assert np.allclose(A[0], np.eye(4))


def test_step_too_coarse(fig2):
    with pytest.raises(StepTooCoarse):
        integrate_frame(fig2, 6.0, 0, fig2.period, 16, "midpoint", tol_ode=1e-10)
    integrate_frame(fig2, 1.0, 0, fig2.period, 2048, tol_ode=1e-8)


def test_bad_arguments(fig2):
    with pytest.raises(ValueError):
        integrate_frame(fig2, 1.0, 0, 1, 8)
    with pytest.raises(ValueError):
        integrate_frame(fig2, 1.0, 0, 1, 64, "euler")
