import numpy as np
import pytest

from darboux_monodromy.curves import Circle, Fourier, Rose, Samples, fd4, fd4_periodic, figure1, figure2


def fd_check(curve, period, n=4000):
    s = np.arange(n) * period / n
    x, xp = curve(s)
    assert np.max(np.abs(fd4_periodic(x, period / n) - xp)) < 1e-8


def test_analytic_tangents():
    fd_check(Circle(2.0, (1, -1)), 2 * np.pi)
    fd_check(Rose(3, 1), np.pi)
    fd_check(figure2(), 2 * np.pi)
    fd_check(Fourier([[0, 1, 0.1], [0.3, 0, 0]], [[0, 0, 0], [0, 1, -0.2]]), 2 * np.pi)


def test_figure_points():
    assert np.allclose(figure1().point(0.0), [1, 0])
    s = 0.37
    assert np.allclose(figure2().point(s), [2 * np.cos(s) * np.sin(s + 1),
                                            np.sin(3 * s) * np.cos(2 * s) * np.cos(s)])


def test_fd4_one_sided_order():
    errs = []
    for n in (40, 80):
        s = np.linspace(0, 1, n)
        errs.append(np.max(np.abs(fd4(np.exp(s), s[1] - s[0]) - np.exp(s))))
    assert errs[0] / errs[1] > 12


def test_samples_spline():
    n = 512
    s = np.arange(n) * 2 * np.pi / n
    c = Samples(np.stack([np.cos(s), np.sin(s)], axis=-1), 2 * np.pi)
    t = np.linspace(0, 4 * np.pi, 97)
    x, xp = c(t)
    assert np.allclose(x, np.stack([np.cos(t), np.sin(t)], axis=-1), atol=1e-8)
    assert np.allclose(xp, np.stack([-np.sin(t), np.cos(t)], axis=-1), atol=1e-6)
    with pytest.raises(ValueError):
        Samples(np.zeros((3, 2)), 1.0)
