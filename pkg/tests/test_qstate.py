import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qdistill.errors import NotHermitian, NotPositive, NotUnitTrace, StateFileError, ZeroWeight
from qdistill.geometry import n_value
from qdistill.qlinalg import I2, dagger, herm_eig, kron
from qdistill.qstate import (
    P0,
    apply_local,
    bell_state,
    dumps_state,
    eq10_state,
    loads_state,
    make_density,
    partial_transpose,
    pure_density,
    random_mixed,
    random_separable,
    singlet_fraction,
    werner_state,
)

from conftest import haar_unitary

SQ = 1 / np.sqrt(2)


def test_make_density_accepts_valid():
    assert np.allclose(make_density(np.eye(4) / 4).mat, np.eye(4) / 4)
    assert np.allclose(make_density(P0).mat, P0)


def test_make_density_rejects():
    with pytest.raises(NotPositive, match="NotPositive"):
        make_density(np.diag([0.6, 0.6, -0.1, -0.1]))
    with pytest.raises(NotUnitTrace, match="NotUnitTrace"):
        make_density(np.eye(4) / 4 * (1 + 1e-9))
    m = np.eye(4, dtype=complex) / 4
    m[0, 1] = 1e-6
    with pytest.raises(NotHermitian, match="NotHermitian"):
        make_density(m)


def test_make_density_repair():
    fixed = make_density(np.diag([0.6, 0.6, -0.1, -0.1]), repair=True)
    assert np.allclose(fixed.mat, np.diag([0.5, 0.5, 0, 0]))


def test_density_is_read_only():
    rho = werner_state(0.5)
    with pytest.raises(ValueError):
        rho.mat[0, 0] = 1


def test_bell_states():
    assert np.allclose(bell_state("phi+"), [SQ, 0, 0, SQ])
    assert np.allclose(bell_state("psi-"), [0, SQ, -SQ, 0])
    basis = np.stack([bell_state(k) for k in ("phi+", "phi-", "psi+", "psi-")], axis=1)
    assert np.allclose(dagger(basis) @ basis, np.eye(4), atol=1e-15)


def test_werner_state():
    assert np.allclose(werner_state(1.0).mat, P0)
    assert np.allclose(werner_state(0.25).mat, np.eye(4) / 4)
    w, _ = herm_eig(partial_transpose(werner_state(0.75)))
    assert w[0] == pytest.approx((1 - 2 * 0.75) / 2, abs=1e-12)
    with pytest.raises(ValueError):
        werner_state(1.1)


def test_eq10_state():
    rho = eq10_state(SQ, SQ, 1.0)
    assert np.allclose(rho.mat, pure_density(bell_state("phi+")).mat)
    w, _ = herm_eig(partial_transpose(eq10_state(np.sqrt(0.9), np.sqrt(0.1), 0.8)))
    assert w[0] < -1e-3
    half = eq10_state(np.sqrt(0.9), np.sqrt(0.1), 0.5)
    assert n_value(half) <= 1 + 1e-12
    assert herm_eig(partial_transpose(half))[0][0] >= -1e-10
    with pytest.raises(ValueError):
        eq10_state(0.9, 0.1, 0.5)
    with pytest.raises(ValueError):
        eq10_state(SQ, SQ, 1.5)


def test_random_mixed_valid_and_deterministic():
    for seed in range(50):
        rho = random_mixed(seed, 1 + seed % 5)
        make_density(rho.mat)
    assert np.array_equal(random_mixed(3, 4).mat, random_mixed(3, 4).mat)


def test_random_mixed_ensemble_mean():
    mean = sum(random_mixed(seed, 4).mat for seed in range(10_000)) / 10_000
    assert np.linalg.norm(mean - np.eye(4) / 4) < 0.02


def test_random_separable_is_ppt_and_in_octahedron():
    prod = random_separable(1, terms=1)
    assert herm_eig(partial_transpose(prod))[0][0] >= -1e-12
    for seed in range(300):
        rho = random_separable(seed, 1 + seed % 6)
        assert herm_eig(partial_transpose(rho))[0][0] >= -1e-10
        assert n_value(rho) <= 1 + 1e-9


def test_partial_transpose_examples(rng):
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    b = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    assert np.allclose(partial_transpose(kron(a, b)), kron(a, b.T))
    w, _ = herm_eig(partial_transpose(P0))
    assert np.allclose(w, [-0.5, 0.5, 0.5, 0.5], atol=1e-14)
    m = random_mixed(5).mat
    assert np.array_equal(partial_transpose(partial_transpose(m)), m)


def test_partial_transpose_preserves_hermiticity_and_trace():
    for seed in range(1000):
        pt = partial_transpose(random_mixed(seed, 1 + seed % 4))
        assert np.max(np.abs(pt - dagger(pt))) < 1e-15
        assert np.trace(pt).real == pytest.approx(1.0, abs=1e-14)


def test_apply_local(rng):
    rho = random_mixed(11)
    same, weight = apply_local(rho, I2, I2)
    assert weight == pytest.approx(1.0)
    assert np.allclose(same.mat, rho.mat)
    u1, u2 = haar_unitary(rng), haar_unitary(rng)
    rot, weight = apply_local(rho, u1, u2)
    assert weight == pytest.approx(1.0, abs=1e-14)
    assert np.allclose(herm_eig(rot.mat)[0], herm_eig(rho.mat)[0], atol=1e-12)
    c, d = np.sqrt(0.9), np.sqrt(0.1)
    fam = eq10_state(c, d, 0.8)
    w = np.diag([c, d])
    op = kron(I2, w)
    _, weight = apply_local(fam, I2, w)
    assert weight == pytest.approx(np.trace(op @ fam.mat @ op).real, abs=1e-15)
    with pytest.raises(ZeroWeight):
        apply_local(pure_density([1, 0, 0, 0]), I2, np.diag([0.0, 1.0]))


def test_singlet_fraction_examples():
    res = singlet_fraction(P0)
    assert res.f == pytest.approx(1.0, abs=1e-12)
    assert singlet_fraction(pure_density([1, 0, 0, 0])).f == pytest.approx(0.5, abs=1e-12)
    assert singlet_fraction(werner_state(0.75)).f == pytest.approx(0.25 * (1 + 2), abs=1e-10)


def _reduced(psi):
    m = np.outer(psi, psi.conj()).reshape(2, 2, 2, 2)
    return np.trace(m, axis1=1, axis2=3), np.trace(m, axis1=0, axis2=2)


def test_singlet_fraction_maximizer_is_maximally_entangled():
    for seed in range(100):
        rho = random_mixed(seed, 1 + seed % 4)
        res = singlet_fraction(rho)
        ra, rb = _reduced(res.maximizer)
        assert np.allclose(ra, I2 / 2, atol=1e-9)
        assert np.allclose(rb, I2 / 2, atol=1e-9)
        assert np.real(np.vdot(res.maximizer, rho.mat @ res.maximizer)) == pytest.approx(res.f, abs=1e-9)
        assert 0 <= res.f <= 1


def test_singlet_fraction_against_bell_basis_search():
    # independent oracle: maximize over a dense SU(2) sample by brute force
    rng = np.random.default_rng(4)
    us = [haar_unitary(rng) for _ in range(20000)]
    phi = bell_state("phi+")
    vecs = np.stack([kron(I2, u) @ phi for u in us])
    rho = random_mixed(8, 2)
    brute = np.max(np.real(np.einsum("ni,ij,nj->n", vecs.conj(), rho.mat, vecs)))
    f = singlet_fraction(rho).f
    assert f >= brute - 1e-12
    assert f - brute < 5e-3


@given(st.integers(0, 2**31 - 1))
@settings(max_examples=60, deadline=None)
def test_singlet_fraction_local_unitary_invariance(seed):
    rng = np.random.default_rng(seed)
    rho = random_mixed(seed, 1 + seed % 4)
    rot, _ = apply_local(rho, haar_unitary(rng), haar_unitary(rng))
    assert singlet_fraction(rot).f == pytest.approx(singlet_fraction(rho).f, abs=1e-7)


def test_bell_diagonal_fraction_at_least_quarter(rng):
    basis = [bell_state(k) for k in ("phi+", "phi-", "psi+", "psi-")]
    for _ in range(50):
        p = rng.dirichlet(np.ones(4))
        rho = make_density(sum(pi * np.outer(b, b.conj()) for pi, b in zip(p, basis)))
        assert singlet_fraction(rho).f >= 0.25 - 1e-12
        assert singlet_fraction(rho).f == pytest.approx(p.max(), abs=1e-10)


def test_state_file_round_trip():
    rho = random_mixed(21)
    text = dumps_state(rho)
    back = loads_state(text)
    assert np.array_equal(back.mat, rho.mat)


@pytest.mark.parametrize(
    "text, exc",
    [
        ("not json", StateFileError),
        ('{"dim": 2, "matrix": []}', StateFileError),
        ('{"dim": 4, "matrix": [[[1, 0]]]}', StateFileError),
        ('{"dim": 4}', StateFileError),
    ],
)
def test_state_file_schema_errors(text, exc):
    with pytest.raises(exc):
        loads_state(text)


def test_state_file_physics_errors():
    bad = np.diag([0.6, 0.6, -0.1, -0.1]).astype(complex)
    with pytest.raises(NotPositive):
        loads_state(dumps_state(bad))
    with pytest.raises(NotUnitTrace):
        loads_state(dumps_state(np.eye(4) / 2))
    m = np.eye(4, dtype=complex) / 4
    m[1, 2] = 0.1j
    with pytest.raises(NotHermitian):
        loads_state(dumps_state(m))
