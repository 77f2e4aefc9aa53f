"""Monodromy matrices, spectral sweeps and resonance points."""

from dataclasses import dataclass, field
from math import gcd

import numpy as np
from scipy.optimize import brentq

from .eigen4 import eigen4, lorentz_spectrum
from .errors import IllConditioned, UnwrapFailure
from .integrators import DEFAULT_SCHEME, StepData
from .minkowski import killing, lorentz_invariants, minkowski_defect
from .polarised import ARC_LENGTH, NEG_ARC_LENGTH

IDENTITY = "IDENTITY"
UNIT_CIRCLE = "UNIT_CIRCLE"
REAL_PAIR = "REAL_PAIR"
PARABOLIC_CANDIDATE = "PARABOLIC_CANDIDATE"

TOL_RES = 1e-6  # relative to ||M||_F
BETA_TOL = 1e-6
PARABOLIC_RATIO = 1e-4
J_UPDATE = 1e-3  # |sin theta| above which the rotation generator is trusted
WINDOW_MARGIN = 1e-3
DEFAULT_STEPS = 4096


def _wrap(a):
    return (a + np.pi) % (2 * np.pi) - np.pi


@dataclass
class MonodromyResult:
    mu: float
    M: np.ndarray
    eigenvalues: np.ndarray
    eigenvectors: list
    branch: str
    theta: float
    beta: float
    krot: np.ndarray = field(repr=False)
    fixed_plane: tuple = field(default=None, repr=False)
    defect: float = 0.0
    residual: float = 0.0
    diagnostic: str = ""

    @property
    def trace(self):
        return float(np.trace(self.M))


def tol_res_for(M, tol_res=TOL_RES):
    return tol_res * float(np.linalg.norm(M))


def classify(M, tol_res=TOL_RES, invariants=None):
    """Branch of a monodromy matrix from its conjugation invariants."""
    theta, beta, _ = lorentz_invariants(M) if invariants is None else invariants
    residual = float(np.linalg.norm(M - np.eye(4)))
    if residual < tol_res_for(M, tol_res):
        return IDENTITY
    K = 0.5 * (M - np.linalg.inv(M))
    if max(abs(np.sin(theta)), np.sinh(beta)) <= PARABOLIC_RATIO * np.linalg.norm(K):
        return PARABOLIC_CANDIDATE
    if beta <= BETA_TOL:
        return UNIT_CIRCLE
    return REAL_PAIR


def _fixed_plane(M):
    """Two right singular vectors of ``M - I`` with the smallest singular values."""
    _, _, vt = np.linalg.svd(M - np.eye(4))
    return vt[2].copy(), vt[3].copy()


def analyse(curve, mu, M, tol_res=TOL_RES, eigen=True):
    """Build a :class:`MonodromyResult` from an already integrated matrix."""
    inv = lorentz_invariants(M)
    theta, beta, krot = float(inv[0]), float(inv[1]), inv[2]
    branch = classify(M, tol_res, (theta, beta, krot))
    diagnostic = ""
    vectors = []
    values = lorentz_spectrum(M)
    if eigen:
        try:
            pairs = eigen4(M)
            values = np.array([p.value for p in pairs])
            vectors = pairs
        except IllConditioned as exc:
            diagnostic = f"ILL_CONDITIONED residual={exc.details.get('residual', float('nan')):.3g}"
    plane = None
    if branch == IDENTITY:
        X0, _ = curve.lift(np.array(0.0))
        plane = (np.asarray(curve.q, dtype=float).copy(), X0)
    elif branch == UNIT_CIRCLE:
        plane = _fixed_plane(M)
    return MonodromyResult(
        mu=float(mu), M=M, eigenvalues=values, eigenvectors=vectors, branch=branch,
        theta=theta, beta=beta, krot=krot, fixed_plane=plane,
        defect=float(minkowski_defect(M)), residual=float(np.linalg.norm(M - np.eye(4))),
        diagnostic=diagnostic,
    )


def monodromy(curve, mu, steps=DEFAULT_STEPS, scheme=DEFAULT_SCHEME, tol_res=TOL_RES, eigen=True):
    """Monodromy ``A(T)`` at one spectral parameter, analysed."""
    M = StepData(curve, 0.0, curve.period, steps, scheme).propagate([mu])[0]
    return analyse(curve, mu, M, tol_res, eigen)


def default_window(curve, mu_max=None, mu_min=None):
    """Sweep window honouring the timelike range of the linear conserved quantity."""
    kappa = curve.kappa
    if curve.polarisation == ARC_LENGTH and mu_min is None:
        mu_min = -kappa / 2.0 + WINDOW_MARGIN
    if curve.polarisation == NEG_ARC_LENGTH and mu_max is None:
        mu_max = kappa / 2.0 - WINDOW_MARGIN
    if mu_min is None or mu_max is None:
        raise ValueError("sweep window needs explicit bounds for this polarisation")
    return float(mu_min), float(mu_max)


@dataclass
class _Point:
    mu: float
    M: np.ndarray
    theta: float
    beta: float
    krot: np.ndarray
    phase: float = 0.0
    J: np.ndarray = None
    grid: bool = True


class _Evaluator:
    def __init__(self, curve, steps, scheme):
        self.data = StepData(curve, 0.0, curve.period, steps, scheme)

    def points(self, mus, grid=True):
        mus = np.atleast_1d(np.asarray(mus, dtype=float))
        if mus.size == 0:
            return []
        Ms = self.data.propagate(mus)
        th, be, kr = lorentz_invariants(Ms)
        return [_Point(float(m), Ms[i], float(th[i]), float(be[i]), kr[i], grid=grid)
                for i, m in enumerate(mus)]


def _signed(pt, J):
    """Angle in (-pi, pi] of ``pt`` measured with orientation J."""
    sign = 1.0 if killing(pt.krot, J) >= 0 else -1.0
    return sign * pt.theta, sign


def _orient(pt, J):
    """Oriented unit generator at ``pt`` and whether it is trustworthy."""
    s = np.sin(pt.theta)
    if s <= J_UPDATE:
        return J, False
    _, sign = _signed(pt, J)
    return sign * pt.krot / s, True


def _walk(ev, start, J0, targets, min_width, max_points):
    """Unwrap the phase from ``start`` along ``targets`` (ordered away from it)."""
    out = []
    prev, J = start, J0
    queue = list(targets)[::-1]
    added = 0
    while queue:
        cand = queue.pop()
        phi, _ = _signed(cand, J)
        dphi = _wrap(phi - _wrap(prev.phase))
        Jc, trusted = _orient(cand, J)
        jump = trusted and killing(Jc, J) < 0.5
        if abs(dphi) > np.pi / 2 or jump:
            width = abs(cand.mu - prev.mu)
            if width <= min_width or added >= max_points:
                raise UnwrapFailure("phase unwrapping did not converge",
                                    interval=(min(prev.mu, cand.mu), max(prev.mu, cand.mu)))
            mid = ev.points([0.5 * (prev.mu + cand.mu)], grid=False)[0]
            added += 1
            queue.append(cand)
            queue.append(mid)
            continue
        cand.phase = prev.phase + dphi
        cand.J = Jc
        J = Jc
        out.append(cand)
        prev = cand
    return out


def _orientation(ev, scale):
    """Generator fixing the sign convention: the phase increases for small mu > 0."""
    delta = 1e-4 * max(scale, 1e-3)
    for _ in range(8):
        pt = ev.points([delta], grid=False)[0]
        s = np.sin(pt.theta)
        if s > 1e-9:
            return pt.krot / s
        delta *= 10.0
    # no rotation near 0: any unit spacelike-plane generator will do
    J = np.zeros((4, 4))
    J[2, 1], J[1, 2] = 1.0, -1.0
    return J


@dataclass
class SpectralSweep:
    curve: object
    mus: np.ndarray
    results: list
    theta_unwrapped: np.ndarray
    generators: list = field(repr=False)
    is_grid: np.ndarray = field(repr=False)
    steps: int = DEFAULT_STEPS
    scheme: str = DEFAULT_SCHEME
    tol_res: float = TOL_RES

    def __len__(self):
        return len(self.results)

    @property
    def lam(self):
        """Continuous eigenvalue branch ``exp(i theta_unwrapped)``."""
        return np.exp(1j * self.theta_unwrapped)


def sweep(curve, mu_min=None, mu_max=None, n=1500, steps=DEFAULT_STEPS, scheme=DEFAULT_SCHEME,
          tol_res=TOL_RES, eigen=True, max_refine=20, max_extra=20000):
    """Monodromy on a uniform mu grid with a continuous phase branch.

    The branch is anchored at ``theta(0) = 0``; if the window does not
    contain 0 an auxiliary path from 0 fixes the offset.  Neighbouring
    points whose phase jumps by more than pi/2 are bisected.
    """
    mu_min, mu_max = default_window(curve, mu_max, mu_min)
    if not mu_min < mu_max:
        raise ValueError("need mu_min < mu_max")
    if n < 2:
        raise ValueError("need n >= 2")
    ev = _Evaluator(curve, steps, scheme)
    grid = np.linspace(mu_min, mu_max, int(n))
    spacing = grid[1] - grid[0]
    min_width = (mu_max - mu_min) * 2.0 ** -max_refine
    J0 = _orientation(ev, spacing)
    anchor = ev.points([0.0], grid=False)[0]
    anchor.J = J0
    pts = ev.points(grid)
    up = [p for p in pts if p.mu > 0]
    down = [p for p in pts if p.mu < 0][::-1]
    zero = [p for p in pts if p.mu == 0]
    if up and up[0].mu > spacing:
        aux = ev.points(np.arange(spacing, up[0].mu, spacing), grid=False)
        up = aux + up
    if down and down[0].mu < -spacing:
        aux = ev.points(-np.arange(spacing, -down[0].mu, spacing), grid=False)
        down = aux + down
    walked = []
    if zero:
        zero[0].J = J0
        walked.append(zero[0])
    elif mu_min < 0 < mu_max:
        walked.append(anchor)
    walked += _walk(ev, anchor, J0, up, min_width, max_extra)
    walked += _walk(ev, anchor, J0, down, min_width, max_extra)
    walked = [p for p in walked if mu_min <= p.mu <= mu_max]
    walked.sort(key=lambda p: p.mu)
    results = [analyse(curve, p.mu, p.M, tol_res, eigen) for p in walked]
    return SpectralSweep(
        curve=curve,
        mus=np.array([p.mu for p in walked]),
        results=results,
        theta_unwrapped=np.array([p.phase for p in walked]),
        generators=[p.J for p in walked],
        is_grid=np.array([p.grid for p in walked]),
        steps=steps, scheme=scheme, tol_res=tol_res,
    )


@dataclass
class ResonancePoint:
    mu_star: float
    cover: int
    winding: int
    residual: float
    recheck_residual: float
    tolerance: float
    status: str  # "resonance" or "parabolic_candidate"

    def as_dict(self):
        return {
            "mu_star": self.mu_star,
            "cover": self.cover,
            "winding": self.winding,
            "residual": self.residual,
            "recheck_residual_at_2x_steps": self.recheck_residual,
            "status": self.status,
        }


def _power_residual(M, ell):
    P = np.eye(4)
    for _ in range(ell):
        P = M @ P
    return float(np.linalg.norm(P - np.eye(4)))


class _Refiner:
    def __init__(self, sw):
        self.sw = sw
        self.ev = _Evaluator(sw.curve, sw.steps, sw.scheme)
        self.fine = None

    def phase_fn(self, i_ref, target):
        sw = self.sw
        J = sw.generators[i_ref]
        base = sw.theta_unwrapped[i_ref]

        def f(mu):
            pt = self.ev.points([mu], grid=False)[0]
            phi, _ = _signed(pt, J)
            return base + _wrap(phi - _wrap(base)) - target

        return f

    def locate(self, i, target):
        """Root of phase = target near the sweep interval [i, i+1]."""
        sw = self.sw
        lo, hi = i, i + 1
        n = len(sw.mus)
        for _ in range(4):
            sins = [abs(np.sin(sw.results[k].theta)) for k in (lo, hi)]
            ref = lo if sins[0] >= sins[1] else hi
            f = self.phase_fn(ref, target)
            a, b = sw.mus[lo], sw.mus[hi]
            fa, fb = f(a), f(b)
            if fa == 0:
                return a
            if fb == 0:
                return b
            if fa * fb < 0:
                return brentq(f, a, b, xtol=1e-15, rtol=4 * np.finfo(float).eps, maxiter=200)
            lo, hi = max(lo - 1, 0), min(hi + 1, n - 1)
        return None

    def verify(self, mu, ell):
        sw = self.sw
        M = self.ev.points([mu], grid=False)[0].M
        if self.fine is None:
            self.fine = _Evaluator(sw.curve, 2 * sw.steps, sw.scheme)
        Mf = self.fine.points([mu], grid=False)[0].M
        tol = tol_res_for(M, sw.tol_res)
        return _power_residual(M, ell), _power_residual(Mf, ell), tol


def _crossings(sw, target):
    th = sw.theta_unwrapped - target
    idx = []
    for i in range(len(th) - 1):
        if th[i] == 0 or th[i] * th[i + 1] < 0:
            idx.append(i)
    if len(th) and th[-1] == 0:
        idx.append(len(th) - 2)
    return idx


def _search(sw, fractions):
    ref = _Refiner(sw)
    out = []
    seen = set()
    trivial = 1e-9 * max(1.0, float(np.max(np.abs(sw.mus))))
    for p, ell in fractions:
        target = 2 * np.pi * p / ell
        for i in _crossings(sw, target):
            if i < 0:
                continue
            mu = ref.locate(i, target)
            if mu is None or abs(mu) <= trivial:
                continue
            key = (round(mu, 10), p, ell)
            if key in seen:
                continue
            seen.add(key)
            res, res2, tol = ref.verify(mu, ell)
            status = "resonance" if max(res, res2) < tol else "parabolic_candidate"
            out.append(ResonancePoint(float(mu), ell, p, res, res2, tol, status))
    out.sort(key=lambda r: (r.mu_star, r.cover))
    return out


def _phase_range(sw):
    return float(np.min(sw.theta_unwrapped)), float(np.max(sw.theta_unwrapped))


def find_resonance(sw):
    """Points where the continuous phase crosses a multiple of 2 pi (one cover)."""
    lo, hi = _phase_range(sw)
    ks = range(int(np.ceil(lo / (2 * np.pi))), int(np.floor(hi / (2 * np.pi))) + 1)
    return _search(sw, [(k, 1) for k in ks])


def find_cover_resonance(sw, l_max):
    """Crossings of ``2 pi p / l`` for reduced fractions with ``2 <= l <= l_max``."""
    if l_max < 2:
        raise ValueError("l_max must be at least 2")
    lo, hi = _phase_range(sw)
    fracs = []
    for ell in range(2, int(l_max) + 1):
        for p in range(int(np.ceil(lo * ell / (2 * np.pi))), int(np.floor(hi * ell / (2 * np.pi))) + 1):
            if gcd(p, ell) == 1:
                fracs.append((p, ell))
    return _search(sw, fracs)
