"""Closed polarised curves, their connection form and polynomial conserved quantities."""

from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .curves import fd4, fd4_periodic
from .errors import NotClosed, NotRegular, WrongPolarisation
from .minkowski import inner, wedge
from .space_forms import SpaceForm

ARC_LENGTH = "arc"
NEG_ARC_LENGTH = "neg_arc"
EXPLICIT = "explicit"

TOL_PCQ = 1e-7
REGULARITY_TOL = 1e-12


def connection_form(q_coeff, X, Xp):
    """ds-coefficient of ``q (X ^ dX) / (dX, dX)`` for any lift X of the curve.

    ``q_coeff`` is the coefficient of ds^2 in the quadratic differential.
    The result does not depend on how X is scaled.
    """
    q_coeff = np.asarray(q_coeff, dtype=float)
    return (q_coeff / inner(Xp, Xp))[..., None, None] * wedge(X, Xp)


@dataclass(frozen=True)
class LiftedSection:
    s: float
    X: np.ndarray
    Xp: np.ndarray


class PolarisedCurve:
    """A closed plane curve with a space form and a polarisation.

    ``polarisation`` is ``"arc"``, ``"neg_arc"`` or ``"explicit"``; the
    explicit case takes ``m`` either as a callable of s or as values on the
    uniform grid ``k T / N`` (interpolated by a periodic cubic spline), with
    the quadratic differential ``q = ds^2 / m``.
    """

    def __init__(self, path, period, space_form=None, polarisation=ARC_LENGTH, m=None,
                 check=True, samples=512):
        self.path = path
        self.period = float(period)
        if self.period <= 0:
            raise ValueError("period must be positive")
        self.space_form = space_form if space_form is not None else SpaceForm.euclidean()
        if polarisation not in (ARC_LENGTH, NEG_ARC_LENGTH, EXPLICIT):
            raise ValueError(f"unknown polarisation {polarisation!r}")
        self.polarisation = polarisation
        self._m = None
        if polarisation == EXPLICIT:
            if m is None:
                raise ValueError("explicit polarisation needs m")
            self._m = self._make_m(m)
        if check:
            self.check(samples)

    def _make_m(self, m):
        if callable(m):
            return m
        vals = np.atleast_1d(np.asarray(m, dtype=float))
        if vals.size == 1:
            c = float(vals[0])
            return lambda s: np.full(np.shape(s), c)
        grid = np.arange(vals.size + 1) * self.period / vals.size
        spline = CubicSpline(grid, np.append(vals, vals[0]), bc_type="periodic")
        return lambda s: spline(np.mod(s, self.period))

    @property
    def q(self):
        return self.space_form.q

    @property
    def kappa(self):
        return self.space_form.kappa

    def m(self, s):
        if self._m is None:
            raise WrongPolarisation("m is only stored for explicit polarisations")
        return np.asarray(self._m(s), dtype=float)

    def check(self, samples=512):
        x0, t0 = self.path(np.array(0.0))
        x1, t1 = self.path(np.array(self.period))
        scale = 1.0 + np.max(np.abs(self.path.point(np.linspace(0, self.period, 64))))
        tol = 1e-9 * scale
        if np.linalg.norm(x1 - x0) >= tol or np.linalg.norm(t1 - t0) >= tol:
            raise NotClosed("curve does not close over the declared period",
                            gap=float(np.linalg.norm(x1 - x0)))
        s = np.arange(samples) * self.period / samples
        _, Xp = self.lift(s)
        speed = inner(Xp, Xp)
        if np.any(speed <= REGULARITY_TOL):
            raise NotRegular("tangent is not spacelike", s=float(s[np.argmin(speed)]))
        if self.polarisation == EXPLICIT:
            mv = self.m(s)
            if np.any(~np.isfinite(mv)) or np.any(mv == 0) or np.any(np.abs(1.0 / mv) < 1e-12):
                raise ValueError("1/m must stay away from zero")

    def lift(self, s):
        """Normalised lift X(s) and derivative X'(s), vectorised over s."""
        x, xp = self.path(np.asarray(s, dtype=float))
        return self.space_form.lift(x, xp)

    def evaluate(self, s):
        s = float(np.mod(s, self.period))
        X, Xp = self.lift(np.array(s))
        if inner(Xp, Xp) <= REGULARITY_TOL:
            raise NotRegular("tangent is not spacelike", s=s)
        return LiftedSection(s, X, Xp)

    def q_coefficient(self, s, X=None, Xp=None):
        """Coefficient of ds^2 in the polarisation at s."""
        if self.polarisation == EXPLICIT:
            return 1.0 / self.m(s)
        if Xp is None:
            _, Xp = self.lift(s)
        speed = inner(Xp, Xp)
        return speed if self.polarisation == ARC_LENGTH else -speed

    def rho(self, s, Xp=None):
        """Scalar with ``eta = rho X ^ X'`` for the normalised lift."""
        if self.polarisation == ARC_LENGTH:
            return np.ones(np.shape(s))
        if self.polarisation == NEG_ARC_LENGTH:
            return -np.ones(np.shape(s))
        if Xp is None:
            _, Xp = self.lift(s)
        return 1.0 / (self.m(s) * inner(Xp, Xp))

    def eta(self, s):
        """ds-coefficient of the connection form at s (vectorised)."""
        s = np.asarray(s, dtype=float)
        X, Xp = self.lift(s)
        if np.any(inner(Xp, Xp) <= REGULARITY_TOL):
            raise NotRegular("tangent is not spacelike")
        return self.rho(s, Xp)[..., None, None] * wedge(X, Xp)

    # uniform interface shared with sampled transforms
    def sections_on(self, s):
        return self.lift(s)

    def eta_on(self, s):
        return self.eta(s)


@dataclass
class VecPoly:
    """Polynomial in t whose coefficients are R^{3,1}-valued sections on a grid.

    ``coeffs`` has shape ``(d+1, n, 4)``.  If ``periodic`` the grid is
    ``k T / n`` for k < n; otherwise it may include both end points.
    ``derivs`` optionally carries exact s-derivatives of the coefficients.
    """

    s: np.ndarray
    coeffs: np.ndarray
    period: float
    periodic: bool = True
    derivs: np.ndarray = field(default=None, repr=False)

    @property
    def degree(self):
        return self.coeffs.shape[0] - 1

    def __call__(self, t):
        return np.polynomial.polynomial.polyval(t, self.coeffs)  # (n, 4)

    def derivative(self, n):
        if self.derivs is not None:
            return self.derivs[n]
        h = self.s[1] - self.s[0]
        return fd4_periodic(self.coeffs[n], h) if self.periodic else fd4(self.coeffs[n], h)

    def trimmed(self, tol=1e-12):
        """Drop trailing coefficients that vanish (max norm <= tol)."""
        d = self.degree
        while d > 0 and np.max(np.linalg.norm(self.coeffs[d], axis=-1)) <= tol:
            d -= 1
        derivs = None if self.derivs is None else self.derivs[: d + 1]
        return VecPoly(self.s, self.coeffs[: d + 1], self.period, self.periodic, derivs)


def grid(period, samples):
    return np.arange(samples) * period / samples


def linear_cq(curve, samples=1024, s=None):
    """``q + t X`` (or ``q - t X`` for negative arc-length) sampled on a grid."""
    if curve.polarisation == EXPLICIT:
        raise WrongPolarisation("linear conserved quantity needs arc-length polarisation")
    return _linear_poly(curve, samples, s, 1.0 if curve.polarisation == ARC_LENGTH else -1.0)


def _linear_poly(curve, samples, s, sign):
    periodic = s is None
    s = grid(curve.period, samples) if s is None else np.asarray(s, dtype=float)
    X, Xp = curve.lift(s)
    q = np.broadcast_to(curve.q, X.shape)
    coeffs = np.stack([q, sign * X])
    derivs = np.stack([np.zeros_like(X), sign * Xp])
    return VecPoly(s, coeffs, curve.period, periodic, derivs)


def candidate_linear_cq(curve, samples=1024, sign=1.0):
    """``q + sign t X`` regardless of polarisation; used to test the converse direction."""
    return _linear_poly(curve, samples, None, sign)


@dataclass
class PCQReport:
    constant_residual: float
    parallel_residuals: list
    perp_residual_X: float
    perp_residual_Xp: float
    tol: float

    @property
    def max_residual(self):
        return max([self.constant_residual, self.perp_residual_X, self.perp_residual_Xp,
                    *self.parallel_residuals])

    @property
    def passed(self):
        return self.max_residual < self.tol


def verify_pcq(curve, p, tol=TOL_PCQ, mask=None):
    """Residuals of the three conserved-quantity conditions on p's grid.

    ``curve`` is anything with ``sections_on(s)`` and ``eta_on(s)`` (a
    :class:`PolarisedCurve` or a sampled Darboux transform).  ``mask``
    optionally selects the samples that enter the statistics.
    """
    s = p.s
    X, Xp = curve.sections_on(s)
    eta = curve.eta_on(s)
    keep = np.ones(s.shape, dtype=bool) if mask is None else np.asarray(mask, dtype=bool)

    def worst(a):
        a = np.asarray(a)[keep]
        return float(np.max(np.abs(a))) if a.size else 0.0

    c0 = worst(np.linalg.norm(p.derivative(0), axis=-1))
    par = []
    for n in range(1, p.degree + 1):
        r = p.derivative(n) + np.einsum("kij,kj->ki", eta, p.coeffs[n - 1])
        par.append(worst(np.linalg.norm(r, axis=-1)))
    pd = p.coeffs[p.degree]
    return PCQReport(c0, par, worst(inner(pd, X)), worst(inner(pd, Xp)), tol)
