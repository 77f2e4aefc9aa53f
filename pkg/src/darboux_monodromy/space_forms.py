"""Lifts of plane curves to the lightcone, their inverses, and the null-splitting gauge."""

from dataclasses import dataclass

import numpy as np

from .errors import AtInfinity, Boundary, ChartSingularity, DegenerateSplitting, InvalidR
from .minkowski import inner, lower

# Fixed basis choice: q_check = (1,0,0,-1), o = (1,0,0,1)/2.
Q_CHECK = np.array([1.0, 0.0, 0.0, -1.0])
ORIGIN = 0.5 * np.array([1.0, 0.0, 0.0, 1.0])
Q_HALFPLANE = np.array([0.0, 0.0, -1.0, 0.0])
for _v in (Q_CHECK, ORIGIN, Q_HALFPLANE):
    _v.setflags(write=False)

CHART_TOL = 1e-10


@dataclass(frozen=True)
class SpaceForm:
    """A space form vector ``q`` together with the chart that goes with it.

    ``kind`` is ``"euclidean"``, ``"kappa"`` or ``"halfplane"``; the
    curvature is always ``-inner(q, q)``.
    """

    kind: str
    q: np.ndarray
    kappa: float

    @classmethod
    def euclidean(cls):
        return cls("euclidean", Q_CHECK.copy(), 0.0)

    @classmethod
    def curved(cls, kappa):
        kappa = float(kappa)
        if kappa == 0.0:
            return cls.euclidean()
        return cls("kappa", q_kappa(kappa), kappa)

    @classmethod
    def halfplane(cls):
        return cls("halfplane", Q_HALFPLANE.copy(), -1.0)

    def lift(self, x, xp=None):
        """Normalised lift of plane points (and, with ``xp``, its derivative)."""
        if self.kind == "euclidean":
            return euclidean_lift(x, xp)
        if self.kind == "kappa":
            return kappa_lift(x, self.kappa, xp)
        return halfplane_lift(x, xp)

    def project(self, X):
        return project(X, self)


def q_kappa(kappa):
    return 0.5 * (Q_CHECK + 2.0 * kappa * ORIGIN)


def euclidean_lift(x, xp=None):
    """``x + o + |x|^2/2 q_check`` in coordinates; optionally with derivative."""
    x = np.asarray(x, dtype=float)
    r2 = np.einsum("...i,...i->...", x, x)
    X = np.stack([0.5 * (1.0 + r2), x[..., 0], x[..., 1], 0.5 * (1.0 - r2)], axis=-1)
    if xp is None:
        return X
    xp = np.asarray(xp, dtype=float)
    d = np.einsum("...i,...i->...", x, xp)
    Xp = np.stack([d, xp[..., 0], xp[..., 1], -d], axis=-1)
    return X, Xp


def kappa_lift(x, kappa, xp=None, tol=CHART_TOL):
    """Lift normalised against ``q_kappa``; kappa = 0 falls back to the Euclidean lift."""
    if kappa == 0.0:
        return euclidean_lift(x, xp)
    x = np.asarray(x, dtype=float)
    r2 = np.einsum("...i,...i->...", x, x)
    den = 1.0 + kappa * r2
    if np.any(np.abs(den) < tol):
        raise ChartSingularity("1 + kappa |x|^2 vanishes", kappa=kappa)
    alpha = 2.0 / den
    if xp is None:
        return alpha[..., None] * euclidean_lift(x)
    Xc, Xcp = euclidean_lift(x, xp)
    dalpha = -4.0 * kappa * np.einsum("...i,...i->...", x, np.asarray(xp, dtype=float)) / den ** 2
    return alpha[..., None] * Xc, dalpha[..., None] * Xc + alpha[..., None] * Xcp


def halfplane_lift(x, xp=None, tol=CHART_TOL):
    """Lift normalised against ``(0,0,-1,0)``, i.e. ``euclidean_lift(x) / x2``."""
    x = np.asarray(x, dtype=float)
    x2 = x[..., 1]
    if np.any(np.abs(x2) <= tol):
        raise Boundary("point on the half-plane boundary x2 = 0")
    alpha = 1.0 / x2
    if xp is None:
        return alpha[..., None] * euclidean_lift(x)
    Xc, Xcp = euclidean_lift(x, xp)
    dalpha = -np.asarray(xp, dtype=float)[..., 1] / x2 ** 2
    return alpha[..., None] * Xc, dalpha[..., None] * Xc + alpha[..., None] * Xcp


def project(X, space_form, tol=CHART_TOL):
    """Plane coordinates of the lightlike point ``X`` in the space form chart.

    Every chart here is a rescaling of the Euclidean one, so after checking
    that ``X`` lies in the chart we read off ``(X1, X2) / (X0 + X3)``.
    """
    X = np.asarray(X, dtype=float)
    scale = np.linalg.norm(X)
    if abs(inner(X, space_form.q)) < tol * scale:
        raise AtInfinity("point leaves the space form chart")
    flat = X[0] + X[3]
    if abs(flat) < tol * scale:
        raise AtInfinity("point maps to infinity of the plane")
    return np.array([X[1] / flat, X[2] / flat])


def project_many(X, space_form, tol=CHART_TOL):
    """Vectorised :func:`project`; returns ``(points, at_infinity_mask)``."""
    X = np.asarray(X, dtype=float)
    scale = np.linalg.norm(X, axis=-1)
    flat = X[..., 0] + X[..., 3]
    bad = (np.abs(inner(X, space_form.q)) < tol * scale) | (np.abs(flat) < tol * scale)
    safe = np.where(bad, 1.0, flat)
    pts = np.stack([X[..., 1] / safe, X[..., 2] / safe], axis=-1)
    pts[bad] = np.nan
    return pts, bad


@dataclass(frozen=True)
class NullSplitting:
    """``R^{3,1} = L + W + Lhat`` from lightlike sections ``X`` of L and ``Xhat`` of Lhat."""

    X: np.ndarray
    Xhat: np.ndarray

    @property
    def pairing(self):
        return inner(self.X, self.Xhat)

    def check(self, tol=1e-12):
        scale = np.linalg.norm(self.X, axis=-1) * np.linalg.norm(self.Xhat, axis=-1)
        if np.any(np.abs(self.pairing) <= tol * scale):
            raise DegenerateSplitting("L and Lhat coincide")


def split(v, s):
    """Components ``(vL, vW, vLhat)`` of ``v`` along the splitting ``s``."""
    s.check()
    v = np.asarray(v, dtype=float)
    pairing = s.pairing
    vL = (inner(v, s.Xhat) / pairing)[..., None] * s.X
    vLhat = (inner(v, s.X) / pairing)[..., None] * s.Xhat
    return vL, v - vL - vLhat, vLhat


def gamma(r, s, v):
    """Gauge ``Gamma(r)``: scale L by 1/r, fix W, scale Lhat by r."""
    r = np.asarray(r, dtype=float)
    if np.any(r == 0):
        raise InvalidR("gamma needs r != 0")
    vL, vW, vLhat = split(v, s)
    r = r[..., None] if r.ndim else r
    return vL / r + vW + r * vLhat


def gamma_matrix(r, s):
    """Matrix of :func:`gamma` (batched over the splitting's leading axes)."""
    s.check()
    X, Xh = np.asarray(s.X, dtype=float), np.asarray(s.Xhat, dtype=float)
    pairing = inner(X, Xh)[..., None, None]
    if r == 0:
        raise InvalidR("gamma needs r != 0")
    PL = X[..., :, None] * lower(Xh)[..., None, :] / pairing
    PLh = Xh[..., :, None] * lower(X)[..., None, :] / pairing
    eye = np.broadcast_to(np.eye(4), PL.shape)
    return eye + (1.0 / r - 1.0) * PL + (r - 1.0) * PLh
