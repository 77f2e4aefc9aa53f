"""Closed plane curve parametrisations with exact derivatives.

Each family maps an array of parameters ``s`` to points ``(..., 2)`` and
tangents ``(..., 2)``.  Sampled curves are turned into a periodic C^1
cubic Hermite spline whose node slopes come from fourth-order central
differences, so point and tangent stay mutually consistent.
"""

import numpy as np
from scipy.interpolate import CubicHermiteSpline


class PlaneCurve:
    name = "curve"

    def point(self, s):
        raise NotImplementedError

    def tangent(self, s):
        raise NotImplementedError

    def __call__(self, s):
        return self.point(s), self.tangent(s)


class Circle(PlaneCurve):
    name = "circle"

    def __init__(self, r=1.0, center=(0.0, 0.0)):
        self.r = float(r)
        self.center = np.asarray(center, dtype=float)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return self.center + self.r * np.stack([np.cos(s), np.sin(s)], axis=-1)

    def tangent(self, s):
        s = np.asarray(s, dtype=float)
        return self.r * np.stack([-np.sin(s), np.cos(s)], axis=-1)


class Rose(PlaneCurve):
    """``x(s) = cos(a s) (cos(b s), sin(b s))``."""

    name = "rose"

    def __init__(self, a=3.0, b=1.0):
        self.a = float(a)
        self.b = float(b)

    def point(self, s):
        s = np.asarray(s, dtype=float)
        c = np.cos(self.a * s)[..., None]
        return c * np.stack([np.cos(self.b * s), np.sin(self.b * s)], axis=-1)

    def tangent(self, s):
        s = np.asarray(s, dtype=float)
        a, b = self.a, self.b
        u = np.stack([np.cos(b * s), np.sin(b * s)], axis=-1)
        up = b * np.stack([-np.sin(b * s), np.cos(b * s)], axis=-1)
        return -a * np.sin(a * s)[..., None] * u + np.cos(a * s)[..., None] * up


class Figure2(PlaneCurve):
    """``x(s) = (2 cos s sin(s+1), sin 3s cos 2s cos s)``."""

    name = "figure2"

    def point(self, s):
        s = np.asarray(s, dtype=float)
        return np.stack(
            [2.0 * np.cos(s) * np.sin(s + 1.0), np.sin(3 * s) * np.cos(2 * s) * np.cos(s)], axis=-1
        )

    def tangent(self, s):
        s = np.asarray(s, dtype=float)
        d1 = 2.0 * np.cos(2.0 * s + 1.0)
        d2 = (
            3.0 * np.cos(3 * s) * np.cos(2 * s) * np.cos(s)
            - 2.0 * np.sin(3 * s) * np.sin(2 * s) * np.cos(s)
            - np.sin(3 * s) * np.cos(2 * s) * np.sin(s)
        )
        return np.stack([d1, d2], axis=-1)


class Fourier(PlaneCurve):
    """Trigonometric polynomial of period ``period``.

    ``cos[j][k]`` and ``sin[j][k]`` multiply ``cos(k w s)`` and
    ``sin(k w s)`` in component ``j``, with ``w = 2 pi / period``.
    """

    name = "fourier"

    def __init__(self, cos, sin, period=2 * np.pi):
        self.cos = np.atleast_2d(np.asarray(cos, dtype=float))
        self.sin = np.atleast_2d(np.asarray(sin, dtype=float))
        if self.cos.shape[0] != 2 or self.sin.shape[0] != 2:
            raise ValueError("fourier coefficients need two rows, one per component")
        self.omega = 2 * np.pi / float(period)

    def _modes(self, s, kmax):
        s = np.asarray(s, dtype=float)
        k = np.arange(kmax)
        arg = self.omega * s[..., None] * k
        return k, np.cos(arg), np.sin(arg)

    def point(self, s):
        kc, cc, _ = self._modes(s, self.cos.shape[1])
        ks, _, ss = self._modes(s, self.sin.shape[1])
        return cc @ self.cos.T + ss @ self.sin.T

    def tangent(self, s):
        kc, _, sc = self._modes(s, self.cos.shape[1])
        ks, cs, _ = self._modes(s, self.sin.shape[1])
        w = self.omega
        return -(sc * (w * kc)) @ self.cos.T + (cs * (w * ks)) @ self.sin.T


def fd4_periodic(values, h):
    """Fourth-order central difference along axis 0 with periodic wrap."""
    f = np.asarray(values, dtype=float)
    return (
        -np.roll(f, -2, axis=0) + 8 * np.roll(f, -1, axis=0) - 8 * np.roll(f, 1, axis=0) + np.roll(f, 2, axis=0)
    ) / (12.0 * h)


def fd4(values, h):
    """Fourth-order differences along axis 0, one-sided at the two ends."""
    f = np.asarray(values, dtype=float)
    n = f.shape[0]
    if n < 5:
        raise ValueError("need at least 5 samples for fourth-order differences")
    d = np.empty_like(f)
    d[2:-2] = (-f[4:] + 8 * f[3:-1] - 8 * f[1:-3] + f[:-4]) / (12.0 * h)
    d[0] = (-25 * f[0] + 48 * f[1] - 36 * f[2] + 16 * f[3] - 3 * f[4]) / (12.0 * h)
    d[1] = (-3 * f[0] - 10 * f[1] + 18 * f[2] - 6 * f[3] + f[4]) / (12.0 * h)
    d[-1] = (25 * f[-1] - 48 * f[-2] + 36 * f[-3] - 16 * f[-4] + 3 * f[-5]) / (12.0 * h)
    d[-2] = (3 * f[-1] + 10 * f[-2] - 18 * f[-3] + 6 * f[-4] - f[-5]) / (12.0 * h)
    return d


class Samples(PlaneCurve):
    """Curve given by samples on the uniform grid ``s_k = k T / N``, k < N."""

    name = "samples"

    def __init__(self, points, period):
        pts = np.asarray(points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 8:
            raise ValueError("samples must be an (N, 2) array with N >= 8")
        self.period = float(period)
        n = pts.shape[0]
        h = self.period / n
        slopes = fd4_periodic(pts, h)
        s = np.arange(n + 1) * h
        self._spline = CubicHermiteSpline(
            s, np.vstack([pts, pts[:1]]), np.vstack([slopes, slopes[:1]]), axis=0
        )
        self._dspline = self._spline.derivative()

    def point(self, s):
        return self._spline(np.mod(np.asarray(s, dtype=float), self.period))

    def tangent(self, s):
        return self._dspline(np.mod(np.asarray(s, dtype=float), self.period))


def figure1():
    return Rose(3.0, 1.0)


def figure2():
    return Figure2()
