import numpy as np
import pytest
import scipy.linalg as sl
from hypothesis import given, settings
from hypothesis import strategies as st

from darboux_monodromy.eigen4 import charpoly, eigen4, quartic_roots
from darboux_monodromy.errors import IllConditioned
from darboux_monodromy.minkowski import G


def lorentz(seed, scale=1.0):
    rng = np.random.default_rng(seed)
    A = rng.normal(size=(4, 4)) * scale
    return sl.expm(G @ (A - A.T))


def values(pairs):
    return np.array([p.value for p in pairs])


def test_identity():
    pairs = eigen4(np.eye(4))
    assert np.allclose(values(pairs), 1)
    assert all(p.group == "one" for p in pairs)


def test_rotation():
    th = 0.8
    R = np.eye(4)
    R[1:3, 1:3] = [[np.cos(th), -np.sin(th)], [np.sin(th), np.cos(th)]]
    v = values(eigen4(R))
    assert np.allclose(sorted(v, key=lambda z: (z.imag, z.real)),
                       sorted([1, 1, np.exp(1j * th), np.exp(-1j * th)], key=lambda z: (z.imag, z.real)))


def test_boost():
    phi = 0.6
    B = np.eye(4)
    B[0, 0] = B[3, 3] = np.cosh(phi)
    B[0, 3] = B[3, 0] = np.sinh(phi)
    pairs = eigen4(B)
    v = values(pairs)
    assert pairs[0].group == "real_pair"
    assert np.allclose(sorted(v.real), sorted([np.exp(-phi), 1, 1, np.exp(phi)]))
    for p in pairs:
        assert np.linalg.norm(B @ p.vector - p.value * p.vector) < 1e-10


def test_quartic_against_numpy():
    rng = np.random.default_rng(2)
    for _ in range(50):
        r = rng.normal(size=4) + 1j * rng.normal(size=4) * (rng.uniform() < 0.5)
        c = np.real(np.poly(np.concatenate([r[:2], np.conj(r[:2])])))
        got = np.array(quartic_roots(c))
        for z in np.roots(c):
            assert np.min(np.abs(got - z)) < 1e-6


def test_charpoly():
    A = np.random.default_rng(0).normal(size=(4, 4))
    assert np.allclose(charpoly(A), np.poly(A))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000), st.floats(0.05, 1.0))
def test_trace_det_and_pairing(seed, scale):
    A = lorentz(seed, scale)
    v = values(eigen4(A))
    assert abs(np.sum(v) - np.trace(A)) < 1e-10 * max(1, np.linalg.norm(A))
    assert abs(np.prod(v) - np.linalg.det(A)) < 1e-10 * max(1, np.linalg.norm(A))
    for lam in v:
        assert np.min(np.abs(v - 1 / lam)) < 1e-8
        assert np.min(np.abs(v - np.conj(lam))) < 1e-8


def test_parabolic_is_ill_conditioned():
    # null rotation: unipotent, not diagonalisable
    n = np.zeros((4, 4))
    n[0, 1] = n[1, 0] = 1.0
    n[3, 1] = 1.0
    n[1, 3] = -1.0
    P = sl.expm(0.5 * n)
    with pytest.raises(IllConditioned):
        eigen4(P)
