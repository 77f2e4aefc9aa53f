"""Eigen-decomposition of 4x4 real matrices, specialised to SO(3,1).

Roots come from the characteristic polynomial (Faddeev-LeVerrier
coefficients, a closed-form quartic, Newton polish).  For Lorentz matrices
the roots are then snapped onto the exact ``{e^{+-beta}, e^{+-i theta}}``
structure computed from conjugation invariants, which is far better
conditioned than the quartic when the spectrum clusters at 1.
"""

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import IllConditioned
from .minkowski import TOL_EIG, TOL_ORTHO, lorentz_invariants, minkowski_defect

CLUSTER_TOL = 1e-6


def charpoly(A):
    """Monic characteristic polynomial coefficients ``[1, c3, c2, c1, c0]``."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    coeffs = [1.0]
    Mk = np.zeros_like(A)
    c = 1.0
    for k in range(1, n + 1):
        Mk = A @ Mk + c * np.eye(n)
        c = -np.trace(A @ Mk) / k
        coeffs.append(c)
    return np.array(coeffs)


def _cubic_roots(a, b, c, d):
    """All roots of ``a x^3 + b x^2 + c x + d`` (a != 0), complex."""
    b, c, d = b / a, c / a, d / a
    p = c - b * b / 3.0
    q = 2.0 * b ** 3 / 27.0 - b * c / 3.0 + d
    shift = -b / 3.0
    if abs(p) < 1e-300 and abs(q) < 1e-300:
        return [complex(shift)] * 3
    disc = (q / 2.0) ** 2 + (p / 3.0) ** 3
    sq = cmath.sqrt(disc)
    u3 = -q / 2.0 + sq if abs(-q / 2.0 + sq) >= abs(-q / 2.0 - sq) else -q / 2.0 - sq
    u = u3 ** (1.0 / 3.0) if u3 != 0 else 0.0
    omega = complex(-0.5, np.sqrt(3.0) / 2.0)
    roots = []
    for k in range(3):
        uk = u * omega ** k
        vk = -p / (3.0 * uk) if uk != 0 else 0.0
        roots.append(uk + vk + shift)
    return roots


def quartic_roots(coeffs):
    """Roots of the monic quartic ``x^4 + c3 x^3 + c2 x^2 + c1 x + c0``.

    Ferrari's method on the depressed quartic, falling back to the
    biquadratic form when the resolvent root vanishes.
    """
    _, c3, c2, c1, c0 = [float(c) for c in coeffs]
    s = -c3 / 4.0
    # depressed: y^4 + p y^2 + q y + r with x = y + s
    p = c2 - 3.0 * c3 * c3 / 8.0
    q = c1 - c2 * c3 / 2.0 + c3 ** 3 / 8.0
    r = c0 - c1 * c3 / 4.0 + c2 * c3 * c3 / 16.0 - 3.0 * c3 ** 4 / 256.0
    scale = max(abs(p), abs(q) ** (2.0 / 3.0), abs(r) ** 0.5, 1e-300)
    if abs(q) <= 1e-14 * scale ** 1.5:
        disc = cmath.sqrt(p * p - 4.0 * r)
        ys = []
        for z in ((-p + disc) / 2.0, (-p - disc) / 2.0):
            w = cmath.sqrt(z)
            ys += [w, -w]
    else:
        ms = _cubic_roots(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q)
        m = max(ms, key=abs)
        sq2m = cmath.sqrt(2.0 * m)
        ys = []
        for sgn in (1.0, -1.0):
            inner_ = -(2.0 * p + 2.0 * m + sgn * np.sqrt(2.0) * q / cmath.sqrt(m))
            w = cmath.sqrt(inner_)
            ys += [(sgn * sq2m + w) / 2.0, (sgn * sq2m - w) / 2.0]
    return [y + s for y in ys]


def polish_root(coeffs, z, iters=8):
    """Newton iterations on the polynomial; keeps the best iterate."""
    best, fbest = z, abs(np.polyval(coeffs, z))
    dcoeffs = np.polyder(coeffs)
    for _ in range(iters):
        d = np.polyval(dcoeffs, z)
        if d == 0:
            break
        z = z - np.polyval(coeffs, z) / d
        fz = abs(np.polyval(coeffs, z))
        if fz < fbest:
            best, fbest = z, fz
        if fz == 0:
            break
    return best


def lorentz_spectrum(A):
    """Exact-structure eigenvalues ``[e^b, e^-b, e^{it}, e^{-it}]`` of A in SO+(3,1)."""
    theta, beta, _ = lorentz_invariants(A)
    return np.array([np.exp(beta), np.exp(-beta), cmath.exp(1j * theta), cmath.exp(-1j * theta)])


def _snap(raw, structured):
    """Greedy nearest matching of raw roots onto the structured values."""
    raw = list(raw)
    out = [None] * 4
    free = list(range(4))
    pairs = sorted(((abs(r - s), i, j) for i, r in enumerate(raw) for j, s in enumerate(structured)))
    used = set()
    for _, i, j in pairs:
        if out[i] is None and j not in used:
            out[i] = structured[j]
            used.add(j)
            free.remove(i)
    return np.array(out, dtype=complex)


def null_space(B, dim, tol):
    """Null-space basis of a small square matrix by complete pivoting.

    At least ``dim`` vectors are returned: elimination stops once the
    largest remaining pivot falls under ``tol`` or when ``n - dim`` pivots
    have been taken, whichever comes first.
    """
    B = np.array(B, dtype=complex)
    n = B.shape[0]
    rows = list(range(n))
    cols = list(range(n))
    U = B.copy()
    rank = 0
    for k in range(n - dim):
        sub = np.abs(U[k:, k:])
        i, j = np.unravel_index(np.argmax(sub), sub.shape)
        if sub[i, j] <= tol:
            break
        i += k
        j += k
        U[[k, i]] = U[[i, k]]
        rows[k], rows[i] = rows[i], rows[k]
        U[:, [k, j]] = U[:, [j, k]]
        cols[k], cols[j] = cols[j], cols[k]
        for r in range(k + 1, n):
            f = U[r, k] / U[k, k]
            U[r, k:] -= f * U[k, k:]
        rank += 1
    basis = []
    for free in range(rank, n):
        y = np.zeros(n, dtype=complex)
        y[free] = 1.0
        for k in range(rank - 1, -1, -1):
            y[k] = -(U[k, k + 1:] @ y[k + 1:]) / U[k, k]
        x = np.zeros(n, dtype=complex)
        x[cols] = y
        basis.append(x / np.linalg.norm(x))
    return basis


@dataclass(frozen=True)
class EigenPair:
    value: complex
    vector: np.ndarray
    group: str  # "real_pair", "unit_circle", "one" or "general"


def _group(lam, tol):
    if abs(lam - 1.0) <= tol:
        return "one"
    if abs(lam.imag) <= tol and lam.real > 0:
        return "real_pair"
    if abs(abs(lam) - 1.0) <= tol:
        return "unit_circle"
    return "general"


def eigen4(A, tol_eig=TOL_EIG, tol_ortho=TOL_ORTHO, cluster_tol=CLUSTER_TOL):
    """Eigenvalues and eigenvectors of a 4x4 matrix, Lorentz-aware.

    Returns a list of :class:`EigenPair` ordered real reciprocal pairs, then
    unit-circle conjugate pairs, then eigenvalue-1 entries.  Raises
    ``IllConditioned`` when an eigenvector residual exceeds
    ``tol_eig * ||A||``, which is what a near-parabolic matrix produces.
    """
    A = np.asarray(A, dtype=float)
    if not np.all(np.isfinite(A)):
        raise ValueError("matrix has non-finite entries")
    coeffs = charpoly(A)
    raw = [polish_root(coeffs, complex(z)) for z in quartic_roots(coeffs)]
    if minkowski_defect(A) <= tol_ortho:
        values = _snap(raw, lorentz_spectrum(A))
    else:
        values = np.array(raw, dtype=complex)
    normA = np.linalg.norm(A)
    # cluster nearly equal eigenvalues, extract one null space per cluster
    clusters = []
    for lam in values:
        for cl in clusters:
            if abs(cl[0] - lam) <= cluster_tol:
                cl.append(lam)
                break
        else:
            clusters.append([lam])
    pairs = []
    worst = 0.0
    for cl in clusters:
        centre = complex(np.mean(cl))
        if abs(centre.imag) <= cluster_tol:
            centre = complex(centre.real, 0.0)
        vecs = null_space(A - centre * np.eye(4), len(cl), tol_eig * normA)
        vecs = vecs[: len(cl)]
        for lam, v in zip(cl, vecs):
            if abs(centre.imag) == 0.0 and np.max(np.abs(v.imag)) <= 1e-12 * np.max(np.abs(v)):
                v = v.real.astype(complex)
            worst = max(worst, np.linalg.norm(A @ v - lam * v))
            pairs.append(EigenPair(complex(lam), v, _group(complex(lam), cluster_tol)))
    if worst > tol_eig * max(normA, 1.0):
        raise IllConditioned("eigenvector residual too large", residual=worst)
    order = {"real_pair": 0, "unit_circle": 1, "general": 2, "one": 3}
    pairs.sort(key=lambda p: (order[p.group], -abs(p.value), -p.value.imag))
    return pairs
