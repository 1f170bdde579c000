"""Hilbert-Schmidt picture of a two-qubit state: Bloch vectors ``r``, ``s`` and
the correlation matrix ``T``, with the tetrahedron / octahedron tests on the
diagonalized ``T``.
"""

from dataclasses import dataclass

import numpy as np

from .errors import NotTState
from .qlinalg import I2, PAULIS, dagger, kron, rotation_to_su2, svd3r
from .qstate import DensityMatrix, make_density

BOUNDARY_TOL = 1e-9
TSTATE_TOL = 1e-10

TETRA_VERTICES = np.array(
    [[-1.0, -1.0, -1.0], [-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]]
)
# outward-sign pattern of each facet; the Bell-diagonal weights are (1 + SIGNS @ d) / 4
_FACET_SIGNS = np.array(
    [[-1.0, -1.0, -1.0], [-1.0, 1.0, 1.0], [1.0, -1.0, 1.0], [1.0, 1.0, -1.0]]
)

_SIGMA_A = [kron(s, I2) for s in PAULIS]
_SIGMA_B = [kron(I2, s) for s in PAULIS]
_SIGMA_AB = [[kron(sn, sm) for sm in PAULIS] for sn in PAULIS]


@dataclass(frozen=True)
class HsForm:
    r: np.ndarray
    s: np.ndarray
    t: np.ndarray

    def matrix(self):
        m = np.eye(4, dtype=complex)
        for i in range(3):
            m = m + self.r[i] * _SIGMA_A[i] + self.s[i] * _SIGMA_B[i]
            for j in range(3):
                m = m + self.t[i, j] * _SIGMA_AB[i][j]
        return m / 4.0


@dataclass(frozen=True)
class TDiagonalization:
    u1: np.ndarray
    u2: np.ndarray
    d: np.ndarray


def decompose(rho):
    """``r_i = Tr rho (s_i x I)``, ``s_i = Tr rho (I x s_i)``, ``t[n, m] = Tr rho (s_n x s_m)``."""
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)

    def ex(op):
        return float(np.real(np.trace(m @ op)))

    r = np.array([ex(op) for op in _SIGMA_A])
    s = np.array([ex(op) for op in _SIGMA_B])
    t = np.array([[ex(op) for op in row] for row in _SIGMA_AB])
    return HsForm(r, s, t)


def reconstruct(form, repair=False):
    """Inverse of :func:`decompose`; raises ``NotPositive`` if ``form`` is not a state."""
    return make_density(form.matrix(), repair=repair)


def n_value(rho):
    """Sum of the singular values of ``T``."""
    _, d, _ = svd3r(decompose(rho).t)
    return float(np.sum(np.abs(d)))


def fidelity_from_n(rho):
    """``(1 + N) / 4`` when ``N > 1``, otherwise ``None``."""
    n = n_value(rho)
    if n > 1.0:
        return 0.25 * (1.0 + n)
    return None


def diagonalize_t(rho):
    """Product unitary that brings ``T`` to ``diag(d)``.

    ``T = o1 diag(d) o2^T`` with proper rotations; lifting ``o1^T`` and
    ``o2^T`` to SU(2) gives ``u1, u2`` such that ``(u1 x u2) rho (u1 x u2)^+``
    has correlation matrix ``diag(d)``.
    """
    o1, d, o2 = svd3r(decompose(rho).t)
    return TDiagonalization(u1=rotation_to_su2(o1.T), u2=rotation_to_su2(o2.T), d=d)


def apply_product(rho, u1, u2):
    op = kron(u1, u2)
    m = rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return DensityMatrix._trusted(op @ m @ dagger(op))


def bell_weights(d):
    """Eigenvalues of the Bell-diagonal T-state with correlation diagonal ``d``."""
    return 0.25 * (1.0 + _FACET_SIGNS @ np.asarray(d, dtype=float))


def in_tetrahedron(d, tol=BOUNDARY_TOL):
    return bool(np.all(bell_weights(d) >= -tol))


def in_octahedron(d, tol=BOUNDARY_TOL):
    """``|d1| + |d2| + |d3| <= 1``; cross-checked against ``T`` and ``-T`` membership."""
    d = np.asarray(d, dtype=float)
    by_norm = bool(np.sum(np.abs(d)) <= 1.0 + tol)
    # facet weights carry a factor 1/4, so tol/4 there is the same slab as tol here
    by_cross_section = in_tetrahedron(d, tol / 4) and in_tetrahedron(-d, tol / 4)
    if by_norm != by_cross_section:
        raise AssertionError(f"octahedron forms disagree at d={d!r}")
    return by_norm


def is_t_state(rho, tol=TSTATE_TOL):
    form = decompose(rho)
    return np.linalg.norm(form.r) < tol and np.linalg.norm(form.s) < tol


def t_state_separable(rho):
    form = decompose(rho)
    if np.linalg.norm(form.r) >= TSTATE_TOL or np.linalg.norm(form.s) >= TSTATE_TOL:
        raise NotTState(
            f"not a T-state: |r| = {np.linalg.norm(form.r):.3e}, |s| = {np.linalg.norm(form.s):.3e}"
        )
    return in_octahedron(diagonalize_t(rho).d)


def geometry_report(rho):
    """Plain-dict record of the Hilbert-Schmidt diagnostics."""
    form = decompose(rho)
    diag = diagonalize_t(rho)
    n = float(np.sum(np.abs(diag.d)))
    return {
        "r": form.r.tolist(),
        "s": form.s.tolist(),
        "T": form.t.tolist(),
        "d": diag.d.tolist(),
        "N": n,
        "in_tetrahedron": in_tetrahedron(diag.d),
        "in_octahedron": in_octahedron(diag.d),
        "fidelity_from_N": 0.25 * (1.0 + n) if n > 1.0 else None,
    }
