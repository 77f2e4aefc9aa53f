"""Linear algebra on R^{3,1} with the (-+++) form.

Vectors are plain ``numpy`` arrays whose last axis has length 4; operators
are ``(..., 4, 4)`` arrays acting on column vectors.  All functions
broadcast over leading axes.
"""

import numpy as np

from .errors import Degenerate, NotLorentzian

G = np.diag([-1.0, 1.0, 1.0, 1.0])
G.setflags(write=False)

TOL_ORTHO = 1e-8
TOL_NULL = 1e-10
TOL_EIG = 1e-8

E0, E1, E2, E3 = np.eye(4)


def inner(u, v):
    """Minkowski inner product ``-u0 v0 + u1 v1 + u2 v2 + u3 v3``."""
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    return -u[..., 0] * v[..., 0] + np.einsum("...i,...i->...", u[..., 1:], v[..., 1:])


def lower(v):
    """Apply the metric, ``G v``."""
    v = np.array(v, dtype=float)
    v[..., 0] *= -1.0
    return v


def is_lightlike(v, tol=TOL_NULL):
    v = np.asarray(v, dtype=float)
    scale = np.maximum(1.0, np.einsum("...i,...i->...", v, v))
    return np.abs(inner(v, v)) <= tol * scale


def wedge(x, y):
    """The skew map ``v -> (x, v) y - (y, v) x`` as a matrix."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return y[..., :, None] * lower(x)[..., None, :] - x[..., :, None] * lower(y)[..., None, :]


def minkowski_defect(A):
    """Frobenius norm of ``A^T G A - G``; zero exactly for A in O(3,1)."""
    A = np.asarray(A, dtype=float)
    D = np.swapaxes(A, -1, -2) @ G @ A - G
    return np.sqrt(np.sum(D * D, axis=(-2, -1)))


def skew_defect(m):
    """Frobenius norm of the symmetric part of ``G m``; zero for skew maps."""
    Gm = G @ np.asarray(m, dtype=float)
    S = Gm + np.swapaxes(Gm, -1, -2)
    return np.sqrt(np.sum(S * S, axis=(-2, -1)))


def lorentz_inverse(A):
    """Inverse of a Lorentz-orthogonal matrix, ``G A^T G``."""
    return G @ np.swapaxes(np.asarray(A, dtype=float), -1, -2) @ G


def killing(a, b):
    """Normalised invariant pairing ``-tr(ab)/2`` on o(3,1).

    A unit rotation generator of a spacelike plane has ``killing(J, J) = 1``.
    """
    return -0.5 * np.einsum("...ij,...ji->...", a, b)


def lorentz_invariants(A):
    """Conjugation invariants of ``A`` in SO+(3,1).

    Returns ``(theta, beta, krot)``: the rotation angle in [0, pi] on the
    spacelike invariant plane, the rapidity >= 0 on the Lorentzian one, and
    ``krot = sin(theta) J`` with ``J`` the unit generator of the rotation.
    Everything is computed from ``K = (A - A^{-1})/2`` and the trace, which
    stays accurate when all four eigenvalues cluster near 1.
    """
    A = np.asarray(A, dtype=float)
    K = 0.5 * (A - lorentz_inverse(A))
    trK2 = np.einsum("...ij,...ji->...", K, K)
    detK = np.linalg.det(K)
    # eigenvalues of K are +-sinh(beta), +-i sin(theta)
    p = 0.5 * trK2  # sinh^2 - sin^2
    qq = np.maximum(-detK, 0.0)  # sinh^2 * sin^2
    root = np.sqrt(p * p + 4.0 * qq)
    big = 0.5 * (np.abs(p) + root)
    small = np.where(big > 0, qq / np.where(big > 0, big, 1.0), 0.0)
    u = np.where(p >= 0, big, small)  # sinh^2(beta)
    w = np.where(p >= 0, small, big)  # sin^2(theta)
    coshb = np.sqrt(1.0 + u)
    cos_t = 0.5 * np.trace(A, axis1=-2, axis2=-1) - coshb
    theta = np.arctan2(np.sqrt(w), cos_t)
    beta = np.arcsinh(np.sqrt(u))
    K3 = K @ K @ K
    denom = u + w
    safe = np.where(denom > 0, denom, 1.0)[..., None, None]
    boost_part = (K3 + w[..., None, None] * K) / safe
    krot = np.where((denom > 0)[..., None, None], K - boost_part, K)
    return theta, beta, krot


def null_directions_in_plane(u, v, tol=1e-12):
    """Two independent lightlike vectors spanning the same plane as u, v.

    The plane must be Lorentzian.  Each output has unit Euclidean length and
    a non-negative time component.
    """
    u = np.asarray(u, dtype=float)
    v = np.asarray(v, dtype=float)
    nu, nv = np.linalg.norm(u), np.linalg.norm(v)
    if nu == 0 or nv == 0:
        raise Degenerate("zero spanning vector")
    u, v = u / nu, v / nv
    cross = np.linalg.norm(np.outer(u, v) - np.outer(v, u)) / np.sqrt(2.0)
    if cross < tol ** 0.5:
        raise Degenerate("spanning vectors nearly parallel", sin_angle=cross)
    uu, uv, vv = inner(u, u), inner(u, v), inner(v, v)
    disc = uv * uv - uu * vv
    if disc <= tol:
        raise NotLorentzian("plane is not Lorentzian", discriminant=disc)
    if max(abs(uu), abs(vv)) <= tol:
        out = [u, v]
    else:
        if abs(uu) < abs(vv):
            u, v, uu, vv = v, u, vv, uu
        # roots a of uu a^2 + 2 uv a + vv = 0 for the vector a u + v
        r1 = (-uv - np.copysign(np.sqrt(disc), uv)) / uu
        r2 = vv / (uu * r1)
        out = [r1 * u + v, r2 * u + v]
    res = []
    for w in out:
        w = w / np.linalg.norm(w)
        if w[0] < 0 or (w[0] == 0 and w[np.flatnonzero(w)[0]] < 0):
            w = -w
        res.append(w)
    return res[0], res[1]
