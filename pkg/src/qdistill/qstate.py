"""Two-qubit density matrices, constructors, partial transpose and singlet fraction."""

from dataclasses import dataclass
import json
import math

import numpy as np

from .errors import NotHermitian, NotPositive, NotUnitTrace, StateFileError, ZeroWeight
from .qlinalg import I2, as_matrix, dagger, herm_eig, hermiticity_defect, kron

TOL_HERM = 1e-12
TOL_TRACE = 1e-12
TOL_POS = 1e-10
TOL_NORM = 1e-12
MIN_WEIGHT = 1e-14


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Validated two-qubit state. Construct through :func:`make_density`."""

    mat: np.ndarray

    def __post_init__(self):
        self.mat.setflags(write=False)

    def __array__(self, dtype=None, copy=None):
        return self.mat if dtype is None else self.mat.astype(dtype)

    @classmethod
    def _trusted(cls, mat):
        # positivity holds by construction; only clean rounding noise
        m = np.array(mat, dtype=complex)
        m = 0.5 * (m + dagger(m))
        m /= np.trace(m).real
        return cls(m)

    def expect(self, op):
        return float(np.real(np.trace(self.mat @ op)))


@dataclass(frozen=True)
class SingletFractionResult:
    f: float
    maximizer: np.ndarray
    converged: bool = True


def make_density(mat, repair=False):
    """Validate ``mat`` as a two-qubit density matrix.

    No silent trace renormalization happens unless ``repair`` is set, in which
    case the matrix is Hermitized, negative eigenvalues are clamped to zero and
    the trace is rescaled to one.
    """
    m = as_matrix(mat, dims=(4,))
    if repair:
        m = 0.5 * (m + dagger(m))
        w, v = herm_eig(m)
        w = np.clip(w, 0.0, None)
        if w.sum() <= 0:
            raise NotPositive("cannot repair: no positive spectrum left")
        m = (v * (w / w.sum())) @ dagger(v)
        return DensityMatrix._trusted(m)
    defect = hermiticity_defect(m)
    if defect > TOL_HERM:
        raise NotHermitian(f"NotHermitian: max |rho - rho^dagger| = {defect:.3e} > {TOL_HERM:g}")
    tr = np.trace(m)
    if abs(tr - 1.0) > TOL_TRACE:
        raise NotUnitTrace(f"NotUnitTrace: trace = {tr.real:.15g}{tr.imag:+.3g}j differs from 1 by {abs(tr - 1):.3e}")
    w, _ = herm_eig(m)
    if w[0] < -TOL_POS:
        raise NotPositive(f"NotPositive: min eigenvalue {w[0]:.6e} < -{TOL_POS:g}")
    return DensityMatrix(0.5 * (m + dagger(m)))


def pure_density(psi):
    psi = validate_pure(psi)
    return DensityMatrix._trusted(np.outer(psi, psi.conj()))


def validate_pure(psi):
    psi = np.asarray(psi, dtype=complex).reshape(-1)
    if psi.shape != (4,):
        raise ValueError(f"expected 4 amplitudes, got {psi.shape}")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > TOL_NORM:
        raise ValueError(f"state vector not normalized: |psi| = {nrm:.15g}")
    return psi


_S = 1.0 / math.sqrt(2.0)
_BELL = {
    "phi+": np.array([_S, 0, 0, _S], dtype=complex),
    "phi-": np.array([_S, 0, 0, -_S], dtype=complex),
    "psi+": np.array([0, _S, _S, 0], dtype=complex),
    "psi-": np.array([0, _S, -_S, 0], dtype=complex),
}


def bell_state(which):
    """One of ``'phi+'``, ``'phi-'``, ``'psi+'``, ``'psi-'`` (the singlet)."""
    key = which.lower().replace("Φ", "phi").replace("Ψ", "psi")
    if key not in _BELL:
        raise ValueError(f"unknown Bell state {which!r}")
    return _BELL[key].copy()


SINGLET = bell_state("psi-")
P0 = np.outer(SINGLET, SINGLET.conj())


def werner_state(f):
    """``f * P0 + (1 - f) * (I - P0) / 3`` with ``P0`` the singlet projector."""
    if not 0.0 <= f <= 1.0:
        raise ValueError(f"Werner parameter f must lie in [0, 1], got {f}")
    return DensityMatrix._trusted(f * P0 + (1.0 - f) * (np.eye(4) - P0) / 3.0)


def eq10_state(c, d, p):
    """Mixture ``p |c00 + d11><.| + (1-p) |c01 + d10><.|``."""
    if c <= 0 or d <= 0:
        raise ValueError("c and d must be positive")
    if abs(c * c + d * d - 1.0) > TOL_NORM:
        raise ValueError(f"c^2 + d^2 must equal 1, got {c * c + d * d:.15g}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    psi1 = np.array([c, 0, 0, d], dtype=complex)
    psi2 = np.array([0, c, d, 0], dtype=complex)
    return DensityMatrix._trusted(p * np.outer(psi1, psi1) + (1 - p) * np.outer(psi2, psi2))


def _haar_vector(rng, n):
    z = rng.normal(size=n) + 1j * rng.normal(size=n)
    return z / np.linalg.norm(z)


def random_mixed(seed, rank_pure_terms=4):
    """Dirichlet-weighted mixture of Haar-random two-qubit pure states."""
    if rank_pure_terms < 1:
        raise ValueError("rank_pure_terms must be >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(rank_pure_terms))
    m = np.zeros((4, 4), dtype=complex)
    for w in weights:
        psi = _haar_vector(rng, 4)
        m += w * np.outer(psi, psi.conj())
    return DensityMatrix._trusted(m)


def random_separable(seed, terms=3):
    """Dirichlet-weighted mixture of random pure product states."""
    if terms < 1:
        raise ValueError("terms must be >= 1")
    rng = np.random.default_rng(seed)
    weights = rng.dirichlet(np.ones(terms))
    m = np.zeros((4, 4), dtype=complex)
    for w in weights:
        psi = np.kron(_haar_vector(rng, 2), _haar_vector(rng, 2))
        m += w * np.outer(psi, psi.conj())
    return DensityMatrix._trusted(m)


def _mat(rho):
    return rho.mat if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)


def partial_transpose(rho):
    """Transpose on party B: ``out[(i j), (k l)] = rho[(i l), (k j)]``."""
    m = _mat(rho).reshape(2, 2, 2, 2)
    return m.transpose(0, 3, 2, 1).reshape(4, 4).copy()


def apply_local(rho, a, b):
    """Apply ``a (x) b`` and renormalize; returns the state and the weight."""
    op = kron(a, b)
    out = op @ _mat(rho) @ dagger(op)
    weight = float(np.trace(out).real)
    if weight <= MIN_WEIGHT:
        raise ZeroWeight(f"local operation annihilates the state (weight {weight:.3e})")
    return DensityMatrix._trusted(out / weight), weight


# (I (x) U_a) phi+ for U_a in {I, -i sx, -i sy, -i sz}; U = q0 I - i q.sigma maps to sum q_a phi_a
_PHI_PLUS = bell_state("phi+")
_MAGIC = np.stack(
    [
        _PHI_PLUS,
        np.kron(I2, np.array([[0, -1j], [-1j, 0]])) @ _PHI_PLUS,
        np.kron(I2, np.array([[0, -1], [1, 0]], dtype=complex)) @ _PHI_PLUS,
        np.kron(I2, np.array([[-1j, 0], [0, 1j]])) @ _PHI_PLUS,
    ],
    axis=1,
)


def _hamilton(p, q):
    w1, v1 = p[..., 0], p[..., 1:]
    w2, v2 = q[..., 0], q[..., 1:]
    w = w1 * w2 - np.sum(v1 * v2, axis=-1)
    v = w1[..., None] * v2 + w2[..., None] * v1 + np.cross(v1, v2)
    return np.concatenate([w[..., None], v], axis=-1)


def _euler_grid(n=16):
    """Unit quaternions of ``Rz(alpha) Ry(beta) Rz(gamma)`` on an n^3 grid."""
    ang = 2 * np.pi * np.arange(n) / n
    beta = np.pi * np.arange(n) / n
    zero = np.zeros(n)
    rz = np.stack([np.cos(ang / 2), zero, zero, np.sin(ang / 2)], axis=1)
    ry = np.stack([np.cos(beta / 2), zero, np.sin(beta / 2), zero], axis=1)
    q = _hamilton(rz[:, None, None, :], ry[None, :, None, :])
    q = _hamilton(q, rz[None, None, :, :])
    return q.reshape(-1, 4)


_GRID = _euler_grid(16)
_UNIT = np.eye(4)[1:]  # pure unit quaternions i, j, k


def singlet_fraction(rho, grad_tol=1e-10, max_sweeps=2000):
    """Maximal overlap of ``rho`` with a maximally entangled pure state.

    Every maximally entangled vector is ``(I (x) U) phi+`` up to phase. The
    overlap is a quadratic form in the unit quaternion of ``U``; a 16^3
    Euler-angle grid seeds coordinate ascent over the three rotation
    generators, each step being an exact maximization along its great circle.
    """
    k = np.real(dagger(_MAGIC) @ _mat(rho) @ _MAGIC)
    k = 0.5 * (k + k.T)
    vals = np.einsum("ni,ij,nj->n", _GRID, k, _GRID)
    q = _GRID[int(np.argmax(vals))].copy()
    converged = False
    for _ in range(max_sweeps):
        tangents = _hamilton(q[None, :], _UNIT)
        kq = k @ q
        if np.linalg.norm(tangents @ kq) < grad_tol:
            converged = True
            break
        for e in _UNIT:
            t = _hamilton(q, e)
            a = q @ k @ q
            b = q @ k @ t
            c = t @ k @ t
            # top eigenvector of [[a, b], [b, c]] gives the best point on the circle
            theta = 0.5 * math.atan2(2 * b, a - c)
            q = math.cos(theta) * q + math.sin(theta) * t
            q /= np.linalg.norm(q)
    psi = _MAGIC @ q
    f = float(np.real(np.vdot(psi, _mat(rho) @ psi)))
    return SingletFractionResult(f=f, maximizer=psi, converged=converged)


def overlap(rho, psi):
    return float(np.real(np.vdot(psi, _mat(rho) @ psi)))


def local_unitary_for_maximizer(psi):
    """Unitary ``U`` with ``(I (x) U) phi+ = psi`` up to phase (``psi`` maximally entangled)."""
    m = np.asarray(psi, dtype=complex).reshape(2, 2)
    # (I (x) U) phi+ has coefficient matrix U^T / sqrt(2)
    return math.sqrt(2.0) * m.T


# -- state file ----------------------------------------------------------------

def _fmt(x):
    return format(float(x), ".17g")


def dumps_state(rho):
    m = _mat(rho)
    rows = []
    for row in m:
        cells = ", ".join(f"[{_fmt(z.real)}, {_fmt(z.imag)}]" for z in row)
        rows.append(f"    [{cells}]")
    return '{\n  "dim": 4,\n  "matrix": [\n' + ",\n".join(rows) + "\n  ]\n}\n"


def loads_state(text, repair=False):
    """Parse the JSON state document; physics violations raise the make_density errors."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise StateFileError(f"state file is not valid JSON: {exc}") from None
    if not isinstance(doc, dict) or "dim" not in doc or "matrix" not in doc:
        raise StateFileError("state file needs fields 'dim' and 'matrix'")
    if doc["dim"] != 4:
        raise StateFileError(f"dim must be 4, got {doc['dim']!r}")
    rows = doc["matrix"]
    try:
        arr = np.array(
            [[complex(float(c[0]), float(c[1])) for c in row] for row in rows],
            dtype=complex,
        )
    except (TypeError, ValueError, IndexError):
        raise StateFileError("matrix entries must be [re, im] number pairs") from None
    if arr.shape != (4, 4) or any(len(c) != 2 for row in rows for c in row):
        raise StateFileError(f"matrix must be 4 rows of 4 [re, im] pairs, got shape {arr.shape}")
    return make_density(arr, repair=repair)


def read_state(path, repair=False):
    with open(path, encoding="utf-8") as fh:
        return loads_state(fh.read(), repair=repair)


def write_state(path, rho):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_state(rho))
