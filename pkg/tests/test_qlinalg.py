import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdistill.errors import DimensionError, NotHermitian, NotPsd
from qdistill.qlinalg import (
    I2,
    SX,
    SY,
    SZ,
    dagger,
    herm_eig,
    kron,
    rotation_to_su2,
    sqrt_psd,
    su2_to_rotation,
    svd2c,
    svd3r,
)
from qdistill.qstate import P0, partial_transpose, werner_state

from conftest import haar_unitary, random_hermitian


def kron_by_loop(a, b):
    out = np.zeros((4, 4), dtype=complex)
    for i in range(2):
        for j in range(2):
            for k in range(2):
                for l in range(2):
                    out[2 * i + k, 2 * j + l] = a[i, j] * b[k, l]
    return out


def test_kron_identity_and_zz():
    assert np.array_equal(kron(I2, I2), np.eye(4))
    assert np.array_equal(kron(SZ, SZ), np.diag([1, -1, -1, 1]))


def test_kron_matches_loop():
    assert np.allclose(kron(SX, SY), kron_by_loop(SX, SY), atol=0)


def test_kron_rejects_wrong_size():
    with pytest.raises(DimensionError):
        kron(np.eye(4), I2)


@given(st.integers(0, 2**32 - 1))
@settings(max_examples=100)
def test_kron_trace_multiplicative(seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.trace(kron(a, b)) == pytest.approx(np.trace(a) * np.trace(b), abs=1e-12)
    assert np.allclose(kron(a, b), kron_by_loop(a, b), atol=1e-15)


def test_dagger(rng):
    assert np.array_equal(dagger(I2), I2)
    assert np.array_equal(dagger(SY), SY)
    m = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    oracle = np.array([[np.conj(m[j, i]) for j in range(4)] for i in range(4)])
    assert np.array_equal(dagger(m), oracle)
    assert np.array_equal(dagger(dagger(m)), m)


def test_herm_eig_diagonal():
    w, v = herm_eig(np.diag([3.0, 1.0, 2.0, 0.0]))
    assert np.allclose(w, [0, 1, 2, 3], atol=1e-15)


def test_herm_eig_singlet_projector():
    w, _ = herm_eig(P0)
    assert np.allclose(w, [0, 0, 0, 1], atol=1e-14)


def test_herm_eig_werner_pt_against_charpoly():
    pt = partial_transpose(werner_state(0.75))
    roots = np.sort(np.roots(np.poly(pt)).real)
    w, _ = herm_eig(pt)
    assert w[0] == pytest.approx(-0.25, abs=1e-12)
    assert np.allclose(w, roots, atol=1e-7)  # charpoly roots of a degenerate spectrum are ~sqrt(eps)


def test_herm_eig_rejects_non_hermitian():
    m = np.eye(4, dtype=complex)
    m[0, 1] = 1e-9
    with pytest.raises(NotHermitian):
        herm_eig(m)


@pytest.mark.parametrize("n", [2, 4])
def test_herm_eig_random_reconstruction(n):
    rng = np.random.default_rng(n)
    for _ in range(1000):
        h = random_hermitian(rng, n)
        w, v = herm_eig(h)
        assert np.all(np.diff(w) >= 0)
        assert np.max(np.abs(h @ v - v * w)) < 1e-10 * max(1, np.abs(w).max())
        assert np.max(np.abs(dagger(v) @ v - np.eye(n))) < 1e-10
        assert np.linalg.norm((v * w) @ dagger(v) - h) < 1e-9
        assert w.sum() == pytest.approx(np.trace(h).real, abs=1e-11)


def test_svd2c_examples():
    _, s, _ = svd2c(I2)
    assert np.allclose(s, [1, 1])
    _, s, _ = svd2c(np.diag([0.9, 0.1]))
    assert np.allclose(s, [0.9, 0.1])
    singlet_coeffs = np.array([[0, 1], [-1, 0]]) / np.sqrt(2)
    u, s, v = svd2c(singlet_coeffs)
    assert np.allclose(s, [1 / np.sqrt(2)] * 2, atol=1e-15)
    assert np.max(np.abs(u @ np.diag(s) @ dagger(v) - singlet_coeffs)) < 1e-12


def test_svd_reconstruction_random():
    rng = np.random.default_rng(7)
    for _ in range(1000):
        a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        u, s, v = svd2c(a)
        assert np.max(np.abs(u @ np.diag(s) @ dagger(v) - a)) < 1e-11
        assert s[0] >= s[1] >= 0
        t = rng.normal(size=(3, 3))
        o1, d, o2 = svd3r(t)
        assert np.max(np.abs(o1 @ np.diag(d) @ o2.T - t)) < 1e-11
        assert np.linalg.det(o1) == pytest.approx(1.0)
        assert np.linalg.det(o2) == pytest.approx(1.0)
        assert np.all(np.diff(np.abs(d)) <= 1e-15)
        assert np.sign(np.prod(d)) == np.sign(np.linalg.det(t))


def test_svd3r_examples():
    _, d, _ = svd3r(np.eye(3))
    assert np.allclose(d, [1, 1, 1])
    o1, d, o2 = svd3r(-np.eye(3))
    assert np.allclose(np.abs(d), [1, 1, 1])
    assert np.allclose(o1 @ np.diag(d) @ o2.T, -np.eye(3), atol=1e-12)
    assert np.prod(d) == pytest.approx(-1.0)


def test_svd3r_recovers_rotated_diagonal():
    from scipy.spatial.transform import Rotation

    r1 = Rotation.random(random_state=1).as_matrix()
    r2 = Rotation.random(random_state=2).as_matrix()
    _, d, _ = svd3r(r1 @ np.diag([0.9, 0.5, 0.1]) @ r2.T)
    assert np.allclose(np.abs(d), [0.9, 0.5, 0.1], atol=1e-12)


def test_sqrt_psd():
    assert np.allclose(sqrt_psd(I2), I2)
    assert np.allclose(sqrt_psd(np.diag([4.0, 9.0])), np.diag([2.0, 3.0]), atol=1e-14)
    w = np.diag([1.0, 0.5])
    root = sqrt_psd(I2 - dagger(w) @ w)
    assert np.allclose(root, np.diag([0.0, np.sqrt(0.75)]), atol=1e-14)
    assert np.max(np.abs(root @ root - (I2 - w @ w))) < 1e-9


def test_sqrt_psd_rejects_negative():
    with pytest.raises(NotPsd):
        sqrt_psd(np.diag([1.0, -1e-6]))


def test_su2_lift_round_trip(rng):
    for _ in range(200):
        u = haar_unitary(rng)
        r = su2_to_rotation(u)
        assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
        assert np.linalg.det(r) == pytest.approx(1.0)
        assert np.allclose(su2_to_rotation(rotation_to_su2(r)), r, atol=1e-12)
