"""Darboux transforms as parallel sections, and gauge transport of conserved quantities."""

from dataclasses import dataclass, field

import numpy as np

from .curves import fd4, fd4_periodic
from .errors import DivideByMu, NotBacklund, NotLightlike, Parabolic
from .integrators import DEFAULT_SCHEME, StepData
from .minkowski import TOL_NULL, inner, lower, null_directions_in_plane, wedge
from .monodromy import IDENTITY, PARABOLIC_CANDIDATE, REAL_PAIR, UNIT_CIRCLE
from .polarised import VecPoly
from .space_forms import NullSplitting, gamma_matrix, project_many

TOL_CLOSE = 1e-6
PERIODIC_TOL = 1e-8
IMMERSION_TOL = 1e-8
DEFAULT_STEPS = 4096


def closure_residual(a, b):
    """Distance between the lines of a and b, as normalised vectors with the better sign."""
    a = np.asarray(a, dtype=float) / np.linalg.norm(a)
    b = np.asarray(b, dtype=float) / np.linalg.norm(b)
    return float(min(np.linalg.norm(a - b), np.linalg.norm(a + b)))


@dataclass
class TransformCurve:
    """Samples of a Darboux transform on the integration grid ``s_k = k T / n``, k <= n."""

    curve: object = field(repr=False)
    mu: float
    s: np.ndarray = field(repr=False)
    Xhat: np.ndarray = field(repr=False)
    points: np.ndarray = field(repr=False)
    at_infinity: np.ndarray = field(repr=False)
    closure_residual: float = 0.0
    tol_close: float = TOL_CLOSE

    @property
    def closed(self):
        return self.closure_residual < self.tol_close

    @property
    def periodic(self):
        """True when the section itself (not only its line) returns after one period."""
        a, b = self.Xhat[0], self.Xhat[-1]
        return np.linalg.norm(a - b) < PERIODIC_TOL * np.linalg.norm(a)

    @property
    def Xhat_prime(self):
        return -self.mu * np.einsum("kij,kj->ki", self.curve.eta(self.s), self.Xhat)

    def immersed(self, tol=IMMERSION_TOL):
        """Samples where the transform is regular, ``(Xhat', Xhat') > tol * scale``."""
        d = self.Xhat_prime
        speed = inner(d, d)
        scale = np.max(np.einsum("ki,ki->k", d, d))
        return speed > tol * scale

    def _index(self, s):
        h = self.s[1] - self.s[0]
        idx = np.rint((np.asarray(s, dtype=float) - self.s[0]) / h).astype(int)
        if np.any(idx < 0) or np.any(idx >= self.s.size) or not np.allclose(self.s[idx], s, atol=1e-9 * h):
            raise ValueError("transform sections are only available on the integration grid")
        return idx

    def sections_on(self, s):
        idx = self._index(s)
        return self.Xhat[idx], self.Xhat_prime[idx]

    def eta_on(self, s):
        """Connection form of the transform, built from its own sections and the same q."""
        idx = self._index(s)
        s = self.s[idx]
        X, Xp = self.sections_on(s)
        qc = self.curve.q_coefficient(s)
        speed = inner(Xp, Xp)
        safe = np.where(np.abs(speed) > 0, speed, np.inf)
        return (qc / safe)[:, None, None] * wedge(X, Xp)

    def grid(self, periodic=None):
        """Sample parameters and a periodicity flag suitable for a VecPoly."""
        periodic = self.periodic if periodic is None else periodic
        return (self.s[:-1], True) if periodic else (self.s, False)

    def splitting(self, s=None):
        s = self.s if s is None else s
        X, _ = self.curve.lift(s)
        return NullSplitting(X, self.sections_on(s)[0])

    def splitting_derivatives(self, s=None):
        """``(X', Xhat')`` on the same samples as :meth:`splitting`."""
        s = self.s if s is None else s
        _, Xp = self.curve.lift(s)
        return Xp, self.sections_on(s)[1]


def parallel_section(curve, mu, X0, steps=DEFAULT_STEPS, scheme=DEFAULT_SCHEME, tol_close=TOL_CLOSE):
    """``Xhat(s) = A(s) X0`` for the frame of ``d + mu eta``."""
    X0 = np.asarray(X0, dtype=float)
    n0 = np.linalg.norm(X0)
    if n0 == 0 or abs(inner(X0, X0)) > TOL_NULL * n0 * n0:
        raise NotLightlike("initial value must be a non-zero lightlike vector")
    data = StepData(curve, 0.0, curve.period, steps, scheme)
    A = data.frames(mu)
    Xhat = A @ X0
    pts, bad = project_many(Xhat, curve.space_form)
    s = curve.period * np.arange(steps + 1) / steps
    return TransformCurve(curve, float(mu), s, Xhat, pts, bad,
                          closure_residual(Xhat[-1], Xhat[0]), tol_close)


def random_lightlike(rng, n=1):
    """Lightlike vectors ``(1, u)`` with u uniform on the unit sphere."""
    u = rng.normal(size=(n, 3))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    return np.hstack([np.ones((n, 1)), u])


def _real_pair_vectors(mono):
    vecs = [p.vector for p in mono.eigenvectors if p.group == "real_pair"]
    if len(vecs) >= 2:
        return [np.real(v) / np.linalg.norm(np.real(v)) for v in vecs[:2]]
    out = []
    for lam in (np.exp(mono.beta), np.exp(-mono.beta)):
        _, _, vt = np.linalg.svd(mono.M - lam * np.eye(4))
        out.append(vt[-1])
    return out


def closed_transforms(curve, mono, steps=DEFAULT_STEPS, scheme=DEFAULT_SCHEME, tol_close=TOL_CLOSE):
    """The two transforms through the null lines fixed by the monodromy."""
    if mono.branch == PARABOLIC_CANDIDATE:
        raise Parabolic("monodromy is a parabolic candidate", mu=mono.mu)
    if mono.branch == REAL_PAIR:
        seeds = _real_pair_vectors(mono)
    elif mono.branch in (UNIT_CIRCLE, IDENTITY):
        seeds = null_directions_in_plane(*mono.fixed_plane)
    else:
        raise ValueError(f"unknown branch {mono.branch}")
    return tuple(parallel_section(curve, mono.mu, X0, steps, scheme, tol_close) for X0 in seeds)


@dataclass
class BacklundIndicator:
    c: float
    deviation: float

    def __float__(self):
        return self.c


def backlund_indicator(transform, p, mu):
    """``(p^mu, Xhat)`` along the transform: its mean and spread.

    ``p`` must be sampled on the transform grid (or its periodic part).
    """
    Xhat, _ = transform.sections_on(p.s)
    vals = inner(p(mu), Xhat)
    return BacklundIndicator(float(np.mean(vals)), float(np.max(np.abs(vals - np.mean(vals)))))


def _components(p, splitting):
    """Coefficient arrays a_n, w_n, b_n with ``p_n = a_n X + w_n + b_n Xhat``."""
    splitting.check()
    X, Xh = splitting.X, splitting.Xhat
    pairing = splitting.pairing
    a = inner(p.coeffs, Xh[None]) / pairing
    b = inner(p.coeffs, X[None]) / pairing
    w = p.coeffs - a[..., None] * X - b[..., None] * Xh
    return a, w, b


def _component_derivatives(p, splitting, dsplitting, a, b):
    """s-derivatives of a_n, w_n, b_n by the product rule."""
    X, Xh = splitting.X, splitting.Xhat
    Xp, Xhp = dsplitting
    pairing = splitting.pairing
    dpair = inner(Xp, Xh) + inner(X, Xhp)
    dp = p.derivs
    da = (inner(dp, Xh[None]) + inner(p.coeffs, Xhp[None])) / pairing - a * dpair / pairing
    db = (inner(dp, X[None]) + inner(p.coeffs, Xp[None])) / pairing - b * dpair / pairing
    dw = dp - da[..., None] * X - a[..., None] * Xp - db[..., None] * Xh - b[..., None] * Xhp
    return da, dw, db


class _Assembler:
    """Collects ``A_j X + W_j + B_j Xhat`` coefficients (and derivatives when known)."""

    def __init__(self, splitting, dsplitting):
        self.X, self.Xh = splitting.X, splitting.Xhat
        self.d = dsplitting
        self.coeffs, self.derivs = [], []

    def add(self, A, W, B, dA=None, dW=None, dB=None):
        self.coeffs.append(A[:, None] * self.X + W + B[:, None] * self.Xh)
        if self.d is not None:
            Xp, Xhp = self.d
            self.derivs.append(dA[:, None] * self.X + A[:, None] * Xp + dW
                               + dB[:, None] * self.Xh + B[:, None] * Xhp)

    def poly(self, p, tol):
        coeffs = np.array(self.coeffs)
        derivs = np.array(self.derivs) if self.d is not None else None
        scale = np.max(np.linalg.norm(coeffs, axis=-1))
        if coeffs.shape[0] > 1 and np.max(np.linalg.norm(coeffs[-1], axis=-1)) <= tol * scale:
            coeffs = coeffs[:-1]
            derivs = None if derivs is None else derivs[:-1]
        return VecPoly(p.s, coeffs, p.period, p.periodic, derivs)


def _pad(x, k):
    return np.concatenate([x, np.zeros((k,) + x.shape[1:])])


def _derivs_available(p, dsplitting):
    return dsplitting is not None and p.derivs is not None


def transform_pcq(p, mu, splitting, dsplitting=None, tol=1e-9):
    """``[p]_L + (1 - t/mu)[p]_W + (1 - t/mu)^2 [p]_Lhat``, coefficient by coefficient.

    The nominal ``t^(d+2)`` coefficient is ``b_d Xhat / mu^2``; it is dropped
    when it vanishes to ``tol`` relative to the largest coefficient, which
    is the case whenever ``p_d`` is orthogonal to X.  With ``dsplitting =
    (X', Xhat')`` and exact derivatives on ``p`` the result carries exact
    derivatives too; otherwise they come from finite differences.
    """
    if mu == 0:
        raise DivideByMu("spectral parameter must be non-zero")
    a, w, b = _components(p, splitting)
    exact = _derivs_available(p, dsplitting)
    da, dw, db = _component_derivatives(p, splitting, dsplitting, a, b) if exact else (a, w, b)
    d = p.degree
    a, w, b, da, dw, db = (_pad(x, 2) for x in (a, w, b, da, dw, db))
    out = _Assembler(splitting, dsplitting if exact else None)

    def comb(x, y, j, c1, c2):
        r = x[j].copy()
        if j >= 1:
            r = r + c1 * x[j - 1]
        if j >= 2 and c2:
            r = r + c2 * x[j - 2]
        return r

    for j in range(d + 3):
        args = (a[j], comb(w, None, j, -1.0 / mu, 0.0), comb(b, None, j, -2.0 / mu, 1.0 / mu ** 2))
        dargs = (da[j], comb(dw, None, j, -1.0 / mu, 0.0), comb(db, None, j, -2.0 / mu, 1.0 / mu ** 2))
        out.add(*args, *dargs)
    return out.poly(p, tol)


def backlund_pcq(p, mu, splitting, dsplitting=None, tol=1e-6):
    """``Gamma(1 - t/mu) p^t`` for a Baecklund-type transform; degree does not grow.

    ``[p^t]_L = (t - mu) Q^t X`` by synthetic division, and
    ``p~^t = -mu Q^t X + [p^t]_W + (1 - t/mu)[p^t]_Lhat``.
    """
    if mu == 0:
        raise DivideByMu("spectral parameter must be non-zero")
    a, w, b = _components(p, splitting)
    exact = _derivs_available(p, dsplitting)
    da, dw, db = _component_derivatives(p, splitting, dsplitting, a, b) if exact else (a, w, b)
    d = p.degree

    def divide(c):
        q = np.zeros((d + 1,) + c.shape[1:])
        for k in range(d, 0, -1):
            q[k - 1] = c[k] + (mu * q[k] if k < d else 0.0)
        return q, c[0] + mu * q[0] if d >= 1 else c[0]

    q, rem = divide(a)
    dq, _ = divide(da)
    X = splitting.X
    pmu = np.polynomial.polynomial.polyval(mu, p.coeffs)
    scale = max(np.max(np.linalg.norm(pmu, axis=-1)), np.max(np.linalg.norm(p.coeffs, axis=-1)))
    rel = float(np.max(np.abs(rem) * np.linalg.norm(X, axis=-1)) / scale)
    if rel > tol:
        raise NotBacklund("transform is not orthogonal to p at the spectral parameter", remainder=rel)
    w, b, dw, db = (_pad(x, 1) for x in (w, b, dw, db))
    q, dq = _pad(q, 1), _pad(dq, 1)
    out = _Assembler(splitting, dsplitting if exact else None)
    for j in range(d + 2):
        bj = b[j] - (b[j - 1] / mu if j >= 1 else 0.0)
        dbj = db[j] - (db[j - 1] / mu if j >= 1 else 0.0)
        out.add(-mu * q[j], w[j], bj, -mu * dq[j], dw[j], dbj)
    return out.poly(p, 1e-9)


@dataclass
class GaugeEntry:
    t: float
    max_discrepancy: float
    status: str  # "ok" or "SKIPPED"
    excluded: int = 0


def _test_sections(rng, s, period, modes=2):
    w = 2 * np.pi / period
    ac = rng.normal(size=(modes + 1, 4))
    bs = rng.normal(size=(modes + 1, 4))
    k = np.arange(modes + 1)
    c, sn = np.cos(w * np.outer(s, k)), np.sin(w * np.outer(s, k))
    v = c @ ac + sn @ bs
    vp = (-sn * (w * k)) @ ac + (c * (w * k)) @ bs
    return v, vp


def _projector_derivatives(X, Xh, dX, dXh):
    """Derivatives of the projections onto ``L`` and ``Lhat`` along the splitting."""
    c = inner(X, Xh)[:, None, None]
    dc = (inner(dX, Xh) + inner(X, dXh))[:, None, None]

    def outer(a, b):
        return a[:, :, None] * lower(b)[:, None, :]

    PL, PLh = outer(X, Xh) / c, outer(Xh, X) / c
    dPL = (outer(dX, Xh) + outer(X, dXh)) / c - PL * dc / c
    dPLh = (outer(dXh, X) + outer(Xh, dX)) / c - PLh * dc / c
    return dPL, dPLh


def check_gauge(curve, transform, mu, t_values, n_sections=3, seed=0, tol_mu=1e-12, exact=True):
    """Compare ``d^ + t eta^`` with ``Gamma(rho) (d + t eta) Gamma(rho)^-1``, ``rho = 1 - t/mu``.

    The gauged sections ``u = Gamma(1/rho) v`` are differentiated by the
    product rule using the exact splitting derivatives, or with
    ``exact=False`` by fourth-order differences on the transform grid.
    Non-immersed samples are left out.
    """
    rng = np.random.default_rng(seed)
    s, periodic = transform.grid()
    h = s[1] - s[0]
    X, _ = curve.lift(s)
    Xh, _ = transform.sections_on(s)
    split = NullSplitting(X, Xh)
    eta = curve.eta(s)
    eta_hat = transform.eta_on(s)
    keep = transform.immersed()[transform._index(s)]
    if exact:
        dPL, dPLh = _projector_derivatives(X, Xh, *transform.splitting_derivatives(s))
    elif not periodic:
        keep[:2] = keep[-2:] = False
    diff = fd4_periodic if periodic else fd4
    out = []
    for t in t_values:
        t = float(t)
        if abs(t - mu) <= tol_mu * max(1.0, abs(mu)):
            out.append(GaugeEntry(t, float("nan"), "SKIPPED"))
            continue
        rho = 1.0 - t / mu
        G = gamma_matrix(rho, split)
        Ginv = gamma_matrix(1.0 / rho, split)
        worst = 0.0
        for _ in range(n_sections):
            v, vp = _test_sections(rng, s, curve.period)
            u = np.einsum("kij,kj->ki", Ginv, v)
            if exact:
                dGinv = (rho - 1.0) * dPL + (1.0 / rho - 1.0) * dPLh
                up = np.einsum("kij,kj->ki", dGinv, v) + np.einsum("kij,kj->ki", Ginv, vp)
            else:
                up = diff(u, h)
            lhs = vp + t * np.einsum("kij,kj->ki", eta_hat, v)
            rhs = np.einsum("kij,kj->ki", G, up + t * np.einsum("kij,kj->ki", eta, u))
            err = np.linalg.norm(lhs - rhs, axis=-1)[keep]
            worst = max(worst, float(np.max(err)) if err.size else 0.0)
        out.append(GaugeEntry(t, worst, "ok", int(np.sum(~keep))))
    return out
