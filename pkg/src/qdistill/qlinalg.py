"""Dense complex linear algebra at the fixed sizes used for two qubits.

Operators are plain ``numpy`` arrays of shape (2, 2) or (4, 4). Party A is
always the left tensor factor and the basis order is
``|00>, |01>, |10>, |11>`` (index ``2*i + j``).
"""

import numpy as np

from .errors import DimensionError, NotHermitian, NotPsd

TOL_HERM = 1e-12
TOL_EIG = 1e-10
TOL_PSD = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SX, SY, SZ)


def as_matrix(a, dims=(2, 4)):
    """Coerce ``a`` to a finite complex square matrix with an allowed size."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1] or m.shape[0] not in dims:
        raise DimensionError(f"expected a square matrix of size {dims}, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        raise ValueError("matrix has non-finite entries")
    return m


def kron(a, b):
    """Kronecker product of two 2x2 operators, ``(i, j) -> 2*i + j``."""
    a = as_matrix(a, dims=(2,))
    b = as_matrix(b, dims=(2,))
    return np.kron(a, b)


def dagger(a):
    return np.conj(np.asarray(a, dtype=complex)).T


def hermiticity_defect(a):
    return float(np.max(np.abs(a - dagger(a))))


def _jacobi_hermitian(a, tol=1e-14, max_sweeps=60):
    """Cyclic complex Jacobi. Returns the (unsorted) diagonal and the rotation."""
    a = np.array(a, dtype=complex)
    n = a.shape[0]
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.linalg.norm(a[offdiag]) < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r < 1e-300:
                    continue
                phase = apq / r
                app = a[p, p].real
                aqq = a[q, q].real
                tau = (aqq - app) / (2.0 * r)
                t = np.copysign(1.0, tau) / (abs(tau) + np.hypot(1.0, tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                # g = diag(1, conj(phase)) @ [[c, s], [-s, c]] on the (p, q) plane
                g_pp, g_pq = c, s
                g_qp, g_qq = -s * np.conj(phase), c * np.conj(phase)
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = col_p * g_pp + col_q * g_qp
                a[:, q] = col_p * g_pq + col_q * g_qq
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = np.conj(g_pp) * row_p + np.conj(g_qp) * row_q
                a[q, :] = np.conj(g_pq) * row_p + np.conj(g_qq) * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = vp * g_pp + vq * g_qp
                v[:, q] = vp * g_pq + vq * g_qq
    return np.real(np.diag(a)).copy(), v


def herm_eig(a):
    """Eigen-decomposition of a Hermitian 2x2 or 4x4 matrix.

    Parameters
    ----------
    a : array_like
        Hermitian matrix (max abs asymmetry at most ``TOL_HERM``).

    Returns
    -------
    eigenvalues : ndarray
        Real eigenvalues in ascending order.
    eigenvectors : ndarray
        Orthonormal eigenvectors as columns, matching ``eigenvalues``.
    """
    a = as_matrix(a)
    defect = hermiticity_defect(a)
    if defect > TOL_HERM:
        raise NotHermitian(f"matrix is not Hermitian: max |a - a^dagger| = {defect:.3e}")
    a = 0.5 * (a + dagger(a))
    w, v = _jacobi_hermitian(a)
    order = np.argsort(w, kind="stable")
    return w[order], v[:, order]


def svd2c(a):
    """SVD of a complex 2x2 matrix: ``a = u @ diag(s) @ dagger(v)``, ``s`` descending."""
    a = as_matrix(a, dims=(2,))
    u, s, vh = np.linalg.svd(a)
    return u, s, dagger(vh)


def svd3r(t):
    """Proper-rotation SVD of a real 3x3 matrix.

    Returns ``o1, d, o2`` with ``t = o1 @ diag(d) @ o2.T``, where ``o1`` and
    ``o2`` lie in SO(3) and ``|d|`` is descending. Any reflection is absorbed
    by flipping the sign of the smallest-magnitude entry of ``d``.
    """
    t = np.asarray(t, dtype=float)
    if t.shape != (3, 3):
        raise DimensionError(f"expected a 3x3 real matrix, got shape {t.shape}")
    u, s, vt = np.linalg.svd(t)
    o1 = u.copy()
    o2 = vt.T.copy()
    d = s.copy()
    if np.linalg.det(o1) < 0:
        o1[:, 2] *= -1
        d[2] *= -1
    if np.linalg.det(o2) < 0:
        o2[:, 2] *= -1
        d[2] *= -1
    return o1, d, o2


def sqrt_psd(a):
    """Principal square root of a Hermitian PSD matrix."""
    w, v = herm_eig(a)
    if w[0] < -TOL_PSD:
        raise NotPsd(f"matrix is not positive semidefinite: min eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return (v * np.sqrt(w)) @ dagger(v)


def rotation_to_su2(r):
    """SU(2) lift of a rotation: ``u @ sigma_j @ u^dagger = sum_i r[i, j] sigma_i``.

    The overall sign of ``u`` is not fixed (both lifts map to ``r``).
    """
    r = np.asarray(r, dtype=float)
    # quaternion (w, x, y, z) from the rotation matrix, largest-pivot branch
    tr = np.trace(r)
    if tr > 0:
        s = 2.0 * np.sqrt(1.0 + tr)
        w = 0.25 * s
        x = (r[2, 1] - r[1, 2]) / s
        y = (r[0, 2] - r[2, 0]) / s
        z = (r[1, 0] - r[0, 1]) / s
    elif r[0, 0] > r[1, 1] and r[0, 0] > r[2, 2]:
        s = 2.0 * np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2])
        w = (r[2, 1] - r[1, 2]) / s
        x = 0.25 * s
        y = (r[0, 1] + r[1, 0]) / s
        z = (r[0, 2] + r[2, 0]) / s
    elif r[1, 1] > r[2, 2]:
        s = 2.0 * np.sqrt(1.0 + r[1, 1] - r[0, 0] - r[2, 2])
        w = (r[0, 2] - r[2, 0]) / s
        x = (r[0, 1] + r[1, 0]) / s
        y = 0.25 * s
        z = (r[1, 2] + r[2, 1]) / s
    else:
        s = 2.0 * np.sqrt(1.0 + r[2, 2] - r[0, 0] - r[1, 1])
        w = (r[1, 0] - r[0, 1]) / s
        x = (r[0, 2] + r[2, 0]) / s
        y = (r[1, 2] + r[2, 1]) / s
        z = 0.25 * s
    q = np.array([w, x, y, z])
    q /= np.linalg.norm(q)
    return q[0] * I2 - 1j * (q[1] * SX + q[2] * SY + q[3] * SZ)


def su2_to_rotation(u):
    """Adjoint action of a 2x2 unitary as a 3x3 rotation matrix."""
    u = as_matrix(u, dims=(2,))
    r = np.empty((3, 3))
    for j, sj in enumerate(PAULIS):
        conj = u @ sj @ dagger(u)
        for i, si in enumerate(PAULIS):
            r[i, j] = 0.5 * np.real(np.trace(si @ conj))
    return r
