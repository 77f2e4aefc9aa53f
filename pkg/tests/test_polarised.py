import numpy as np
import pytest

from darboux_monodromy.curves import Circle, Fourier, Samples, figure2
from darboux_monodromy.errors import NotClosed, NotRegular, WrongPolarisation
from darboux_monodromy.integrators import StepData
from darboux_monodromy.minkowski import inner, wedge
from darboux_monodromy.polarised import (
    PolarisedCurve, candidate_linear_cq, connection_form, linear_cq, verify_pcq,
)
from darboux_monodromy.space_forms import SpaceForm


def test_evaluate_circle(circle):
    sec = circle.evaluate(0.0)
    assert np.allclose(sec.X, [1, 1, 0, 0])
    assert inner(sec.Xp, sec.Xp) == pytest.approx(1)
    assert circle.evaluate(2 * np.pi + 0.3).s == pytest.approx(0.3)


def test_lift_invariants(fig1, fig2):
    s = np.linspace(0, 3, 200)
    for c in (fig1, fig2):
        X, Xp = c.lift(s)
        assert np.allclose(inner(X, c.q), -1)
        assert np.max(np.abs(inner(X, X))) < 1e-10
        assert np.max(np.abs(inner(X, Xp))) < 1e-10


def test_eta_section_independent(fig2):
    s = np.linspace(0, 2 * np.pi, 300)
    X, Xp = fig2.lift(s)
    alpha = 2 + np.sin(3 * s)
    dalpha = 3 * np.cos(3 * s)
    Y = alpha[:, None] * X
    Yp = dalpha[:, None] * X + alpha[:, None] * Xp
    q = fig2.q_coefficient(s)
    assert np.max(np.abs(connection_form(q, Y, Yp) - fig2.eta(s))) < 1e-10
    # general formula agrees with the simplified arc-length one
    assert np.max(np.abs(connection_form(q, X, Xp) - wedge(X, Xp))) < 1e-12


def test_eta_nilpotent_rank2(fig2):
    E = fig2.eta(np.linspace(0, 6, 50))
    assert np.max(np.abs(E @ E @ E)) < 1e-10
    assert all(np.linalg.matrix_rank(e, tol=1e-9) == 2 for e in E)


def test_neg_arc_flips_eta():
    a = PolarisedCurve(figure2(), 2 * np.pi)
    b = PolarisedCurve(figure2(), 2 * np.pi, polarisation="neg_arc")
    s = np.linspace(0, 6, 40)
    assert np.allclose(a.eta(s), -b.eta(s))


def test_linear_cq(fig1, fig2):
    for c in (fig1, fig2):
        p = linear_cq(c)
        assert np.allclose(p.coeffs[0], c.q)
        rep = verify_pcq(c, p)
        assert rep.passed, rep
        for mu in (0.1, 1.0, 3.0):
            v = p(mu)
            assert np.max(np.abs(inner(v, v) + c.kappa + 2 * mu)) < 1e-10


def test_linear_cq_neg_arc():
    c = PolarisedCurve(figure2(), 2 * np.pi, polarisation="neg_arc")
    p = linear_cq(c)
    assert verify_pcq(c, p).passed
    assert np.allclose(p.coeffs[1], -c.lift(p.s)[0])


def test_corrupted_cq_fails(fig2):
    p = linear_cq(fig2)
    p.coeffs = p.coeffs.copy()
    p.coeffs[1] *= 2
    p.derivs = None
    rep = verify_pcq(fig2, p)
    assert not rep.passed
    _, Xp = fig2.lift(p.s)
    assert rep.parallel_residuals[0] == pytest.approx(np.max(np.linalg.norm(Xp, axis=-1)), rel=1e-3)


def test_explicit_polarisation():
    c = PolarisedCurve(figure2(), 2 * np.pi, polarisation="explicit", m=2.0)
    with pytest.raises(WrongPolarisation):
        linear_cq(c)
    assert not verify_pcq(c, candidate_linear_cq(c)).passed
    # m = 1/(X',X') reproduces arc-length
    arc = PolarisedCurve(figure2(), 2 * np.pi)
    s = np.arange(256) * 2 * np.pi / 256
    _, Xp = arc.lift(s)
    grid_m = PolarisedCurve(figure2(), 2 * np.pi, polarisation="explicit",
                            m=lambda t: 1 / inner(arc.lift(t)[1], arc.lift(t)[1]))
    assert np.allclose(grid_m.eta(s), arc.eta(s))
    sampled = PolarisedCurve(figure2(), 2 * np.pi, polarisation="explicit", m=1 / inner(Xp, Xp))
    assert np.max(np.abs(sampled.eta(s) - arc.eta(s))) < 1e-9


def test_pairing_constancy(fig2, rng):
    data = StepData(fig2, 0, fig2.period, 2048)
    A = data.frames(1.7)
    a, b = rng.normal(size=4), rng.normal(size=4)
    pair = inner(A @ a, A @ b)
    assert np.max(np.abs(pair - pair[0])) < 1e-8


def test_validation():
    with pytest.raises(NotClosed):
        PolarisedCurve(Circle(), 5.0)
    with pytest.raises(NotRegular):
        PolarisedCurve(Fourier([[0, 0], [0, 0]], [[0, 0], [0, 0]]), 2 * np.pi)
    with pytest.raises(ValueError):
        PolarisedCurve(Circle(), 2 * np.pi, polarisation="bogus")


def test_sampled_curve_matches_analytic():
    n = 2048
    s = np.arange(n) * 2 * np.pi / n
    pts = figure2().point(s)
    samp = PolarisedCurve(Samples(pts, 2 * np.pi), 2 * np.pi)
    ana = PolarisedCurve(figure2(), 2 * np.pi)
    t = np.linspace(0, 2 * np.pi, 77)
    assert np.max(np.abs(samp.eta(t) - ana.eta(t))) < 1e-6


def test_curved_space_form_cq():
    c = PolarisedCurve(Circle(0.5), 2 * np.pi, SpaceForm.curved(-1.0))
    assert verify_pcq(c, linear_cq(c)).passed
    h = PolarisedCurve(Circle(0.5, (0, 2)), 2 * np.pi, SpaceForm.halfplane())
    assert verify_pcq(h, linear_cq(h)).passed
